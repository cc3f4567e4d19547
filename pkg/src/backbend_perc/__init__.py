"""Monte Carlo tools for backbend bond percolation on the BCC lattice."""

__version__ = "0.1.0"
