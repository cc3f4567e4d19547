"""``backbend-perc`` command-line front end.

Exit codes: 0 success (valid path, equal clusters), 1 usage or input error,
2 invalid path, 3 walk cluster strictly larger than the path cluster.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from pathlib import Path

import jsonschema

from . import __version__
from .backbend import BackbendSpec, validate_path
from .config import PRF_NAME, PRF_VERSION, RngKey
from .estimate import (
    ExperimentPlan,
    NonBracketingError,
    bisect_pc,
    compare_specs_coupled,
    crossing_curve,
    dumps_record,
    estimate_block_event,
    estimate_theta,
    result_record,
    slab_ladder,
    write_curve_csv,
)
from .lattice import Region, Window, as_vertex
from .reach import reach_saw_oracle, reach_walk

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_WALK_LARGER = 0, 1, 2, 3
THREADS_ENV = "BACKBEND_PERC_THREADS"

SWEEP_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "backbend-perc sweep config",
    "type": "object",
    "required": ["mode"],
    "additionalProperties": False,
    "properties": {
        "mode": {"enum": ["curve", "ladder", "pair"]},
        "dim": {"type": "integer", "minimum": 2, "maximum": 6},
        "region": {"type": "string"},
        "beta": {"type": "string"},
        "beta_a": {"type": "string"},
        "beta_b": {"type": "string"},
        "window": {"type": "string"},
        "radius": {"type": "integer", "minimum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "max_trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 18446744073709551615},
        "predicate": {"enum": ["top", "escape", "size"]},
        "size": {"type": "integer", "minimum": 1},
        "statistic": {"enum": ["crossing", "scaling"]},
        "p_grid": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "minimum": 0, "maximum": 1},
        },
        "e": {"type": "integer", "minimum": 2},
        "l": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "radii": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "target": {"type": "number"},
        "lo": {"type": "number", "minimum": 0, "maximum": 1},
        "hi": {"type": "number", "minimum": 0, "maximum": 1},
    },
    "allOf": [
        {"if": {"properties": {"mode": {"const": "curve"}}}, "then": {"required": ["p_grid"]}},
        {"if": {"properties": {"mode": {"const": "ladder"}}}, "then": {"required": ["l"]}},
        {
            "if": {"properties": {"mode": {"const": "pair"}}},
            "then": {"required": ["beta_a", "beta_b", "p_grid"]},
        },
    ],
}

SWEEP_DEFAULTS = {
    "dim": 2,
    "region": "H",
    "beta": "const:0",
    "trials": 100,
    "predicate": "top",
    "statistic": "crossing",
    "e": 2,
    "tol": 0.01,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for invalid paths
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument types ---------------------------------------------------------------


def _typed(fn, what):
    def conv(text):
        try:
            return fn(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad {what} {text!r}: {exc}") from None

    conv.__name__ = what
    return conv


def parse_vertex(text: str):
    return as_vertex(int(x) for x in text.split(","))


def parse_p(text: str) -> float:
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise ValueError("must lie in [0, 1]")
    return p


def parse_ladder(text: str) -> list:
    """``48,96`` (radii) or ``lo..hix...;lo..hix...`` (windows)."""
    if ".." in text:
        return [Window.parse(w) for w in text.split(";") if w]
    return [int(r) for r in text.split(",") if r]


BETA = _typed(BackbendSpec.parse, "beta")
REGION = _typed(Region.parse, "region")
WINDOW = _typed(Window.parse, "window")
VERTEX = _typed(parse_vertex, "vertex")
PROB = _typed(parse_p, "probability")
LADDER = _typed(parse_ladder, "window ladder")


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(64)
        print(f"seed: {seed}", file=sys.stderr)
    return seed


def header_line(seed: int | None = None) -> str:
    parts = [f"# backbend-perc {__version__}", f"prf={PRF_NAME}/{PRF_VERSION}"]
    if seed is not None:
        parts.append(f"seed={seed}")
    return " ".join(parts)


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------------


def read_path_file(path: str) -> list:
    verts = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            verts.append(tuple(int(x) for x in line.split()))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: expected space-separated integers") from None
    return verts


def cmd_validate_path(args) -> int:
    path = read_path_file(args.path_file)
    for i, v in enumerate(path):
        if len(v) != args.dim:
            raise UsageError(f"{args.path_file}: vertex {i} has {len(v)} coordinates, expected {args.dim}")
    if not path:
        raise UsageError(f"{args.path_file}: empty path")
    check = validate_path(args.beta, path, args.region)
    print(header_line())
    print(f"beta: {args.beta.to_text()}")
    print(f"region: {args.region.to_text()}")
    if check.valid:
        print(f"valid ({len(path)} vertices)")
        return EXIT_OK
    print(f"invalid: index {check.index} violates {check.reason}")
    return EXIT_INVALID


def _plan(args, **extra) -> ExperimentPlan:
    return ExperimentPlan(
        dim=args.dim,
        region=args.region,
        spec=args.beta,
        trials=args.trials,
        seed=args.seed,
        radius=args.radius,
        window=args.window,
        predicate=extra.pop("predicate", getattr(args, "predicate", "top")),
        size=getattr(args, "size", 0) or 0,
        statistic=getattr(args, "statistic", "crossing"),
        max_trials=getattr(args, "max_trials", None),
        threads=args.threads,
        **extra,
    )


def cmd_theta(args) -> int:
    plan = _plan(args)
    est = estimate_theta(plan, args.p)
    emit(dumps_record(result_record("theta", plan, est, reproducible=args.reproducible)), args.output)
    return EXIT_OK


def cmd_pc(args) -> int:
    plan = _plan(args)
    kw = dict(target=args.target, tol=args.tol, lo=args.lo, hi=args.hi)
    if args.synthetic_threshold is not None:
        est = bisect_pc(plan, synthetic_threshold=args.synthetic_threshold, **kw)
    elif args.window_ladder and isinstance(args.window_ladder[0], Window):
        est = bisect_pc(plan, windows=args.window_ladder, **kw)
    else:
        est = bisect_pc(plan, radii=args.window_ladder or None, **kw)
    rec = result_record("pc", plan, est, reproducible=args.reproducible)
    if args.synthetic_threshold is not None:
        rec["plan"]["synthetic_threshold"] = args.synthetic_threshold
    emit(dumps_record(rec), args.output)
    return EXIT_OK


def _schema_error(err: jsonschema.ValidationError) -> str:
    pointer = "".join(f"/{p}" for p in err.absolute_path)
    if err.validator == "required" or err.validator == "additionalProperties":
        # point at the missing / unexpected key rather than its parent
        missing = [k for k in err.validator_value] if err.validator == "required" else []
        for k in missing:
            if k not in err.instance:
                pointer += f"/{k}"
                break
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            if extra:
                pointer += f"/{extra[0]}"
    return f"config error at {pointer or '/'}: {err.message}"


def load_sweep_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    errors = sorted(jsonschema.Draft202012Validator(SWEEP_SCHEMA).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise UsageError(_schema_error(errors[0]))
    cfg = {**SWEEP_DEFAULTS, **data}
    for key, conv in (("region", Region.parse), ("beta", BackbendSpec.parse),
                      ("beta_a", BackbendSpec.parse), ("beta_b", BackbendSpec.parse),
                      ("window", Window.parse)):
        if key in cfg:
            try:
                cfg[key] = conv(cfg[key])
            except ValueError as exc:
                raise UsageError(f"config error at /{key}: {exc}") from None
    if "window" not in cfg and "radius" not in cfg:
        cfg["radius"] = 8
    return cfg


def cmd_sweep(args) -> int:
    cfg = load_sweep_config(args.config)
    # command-line flags win over the config file
    for key in ("seed", "trials"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    cfg["seed"] = resolve_seed(cfg.get("seed"))
    plan = ExperimentPlan(
        dim=cfg["dim"], region=cfg["region"], spec=cfg["beta"], trials=cfg["trials"],
        seed=cfg["seed"], radius=cfg.get("radius"), window=cfg.get("window"),
        predicate=cfg["predicate"], size=cfg.get("size", 0), statistic=cfg["statistic"],
        max_trials=cfg.get("max_trials"), threads=args.threads,
    )
    mode = cfg["mode"]
    if mode == "curve":
        curve = crossing_curve(plan, sorted(cfg["p_grid"]))
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                write_curve_csv(curve, fh)
        rec = result_record("curve", plan, curve, reproducible=args.reproducible)
    elif mode == "ladder":
        kw = {k: cfg[k] for k in ("target", "lo", "hi") if k in cfg}
        ladder = slab_ladder(plan, cfg["e"], cfg["l"], tol=cfg["tol"], radii=cfg.get("radii"), **kw)
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                fh.write("l,lo,hi,midpoint,status\n")
                for l, est in ladder.rows:
                    fh.write(f"{l},{est.lo!r},{est.hi!r},{est.midpoint!r},{est.status}\n")
        rec = result_record("ladder", plan, ladder, reproducible=args.reproducible)
    else:
        reports = [compare_specs_coupled(plan, cfg["beta_a"], cfg["beta_b"], p) for p in sorted(cfg["p_grid"])]
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                fh.write("p,trials,contained,equal,survival_a,survival_b\n")
                for r in reports:
                    fh.write(f"{r.p!r},{r.trials},{r.contained},{r.equal},"
                             f"{r.survival_a.estimate!r},{r.survival_b.estimate!r}\n")
        rec = result_record("pair", plan, reports, reproducible=args.reproducible)
        rec["plan"]["beta_a"] = cfg["beta_a"].to_text()
        rec["plan"]["beta_b"] = cfg["beta_b"].to_text()
    rec["plan"]["mode"] = mode
    emit(dumps_record(rec), args.output)
    return EXIT_OK


def _fmt_set(vs) -> str:
    return " ".join(",".join(map(str, v)) for v in sorted(vs)) or "-"


def cmd_oracle(args) -> int:
    key = RngKey(args.seed, args.trial)
    sources = args.source or [(0,) * args.dim]
    try:
        path_res = reach_saw_oracle(args.region, args.window, args.beta, sources, key, args.p,
                                    guard=args.guard, force=args.force)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    walk_res = reach_walk(args.region, args.window, args.beta, sources, key, args.p)
    print(header_line(args.seed))
    print(f"trial: {args.trial}  p: {args.p!r}  beta: {args.beta.to_text()}")
    print(f"walk ({len(walk_res.reached)}): {_fmt_set(walk_res.reached)}")
    print(f"path ({len(path_res.reached)}): {_fmt_set(path_res.reached)}")
    diff = walk_res.reached ^ path_res.reached
    print(f"difference ({len(diff)}): {_fmt_set(diff)}")
    if not diff:
        return EXIT_OK
    if path_res.reached < walk_res.reached:
        return EXIT_WALK_LARGER
    raise UsageError("path cluster not contained in walk cluster")


def cmd_block_event(args) -> int:
    plan = _plan(args, predicate="block", block=(args.r, args.x, args.z))
    est = estimate_block_event(plan, args.r, args.x, args.z, args.p)
    emit(dumps_record(result_record("block_event", plan, est, reproducible=args.reproducible)), args.output)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, seeded: bool = True, window: bool = True) -> None:
    p.add_argument("--beta", type=BETA, default=BackbendSpec.parse("const:0"),
                   help="backbend spec: const:n | inf | cyclic:a,b | prefix:a,b;<tail> (default const:0)")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--region", type=REGION, default=Region.half_space(),
                   help="H | V | slab:t | halfslab:l,e | box:a..bx... (default H)")
    if window:
        p.add_argument("--window", type=WINDOW, help="lo..hi per axis joined by x, e.g. -8..8x-8..8x0..16")
        p.add_argument("--radius", type=int, help="window [-R,R]^(d-1) x [0,R] clipped to the region")
    if seeded:
        p.add_argument("--seed", type=int, help="master seed (drawn from entropy and printed when omitted)")
        p.add_argument("--threads", type=int, default=default_threads(),
                       help=f"worker threads (default ${THREADS_ENV} or 1)")
        p.add_argument("--reproducible", action="store_true", help="omit the timestamp from records")
        p.add_argument("--output", "-o", help="write the JSON record here instead of stdout")


def _estimation(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--predicate", choices=("top", "escape", "size"), default="top")
    p.add_argument("--size", type=int, default=0, help="cluster-size bound for --predicate size")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="backbend-perc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate-path", help="check a path file against a backbend spec")
    _common(p, seeded=False, window=False)
    p.set_defaults(region=Region.full_space())
    p.add_argument("--path-file", required=True, help="one vertex per line, space-separated integers")
    p.set_defaults(func=cmd_validate_path)

    p = sub.add_parser("theta", help="survival-proxy probability at one p")
    _common(p)
    _estimation(p)
    p.add_argument("--p", type=PROB, required=True)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("pc", help="bracket the critical p by bisection")
    _common(p)
    _estimation(p)
    p.add_argument("--window-ladder", type=LADDER, help="radii 48,96 or windows joined by ';'")
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--target", type=float, help="crossing target (default 0.5, or 0 for scaling)")
    p.add_argument("--statistic", choices=("crossing", "scaling"), default="crossing")
    p.add_argument("--max-trials", type=int, help="cap for adaptive trial doubling")
    p.add_argument("--lo", type=PROB, default=0.0)
    p.add_argument("--hi", type=PROB, default=1.0)
    p.add_argument("--synthetic-threshold", type=PROB, help="bisect a deterministic process instead")
    p.set_defaults(func=cmd_pc)

    p = sub.add_parser("sweep", help="run a curve / ladder / pair experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--csv", help="also write the table as CSV")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--trials", type=int, help="overrides the config trials")
    p.add_argument("--threads", type=int, default=default_threads())
    p.add_argument("--reproducible", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="compare the walk cluster with the self-avoiding path cluster")
    _common(p, seeded=False, window=False)
    p.add_argument("--window", type=WINDOW, required=True)
    p.add_argument("--p", type=PROB, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--source", type=VERTEX, action="append", help="source vertex (repeatable; default origin)")
    p.add_argument("--guard", type=int, default=30, help="refuse windows with more region vertices")
    p.add_argument("--force", action="store_true", help="run even above the guard")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("block-event", help="frequency of D*+z being reached from D*+x")
    _common(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--x", type=VERTEX, required=True)
    p.add_argument("--z", type=VERTEX, required=True)
    p.add_argument("--p", type=PROB, required=True)
    p.set_defaults(func=cmd_block_event)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "command", None) in ("theta", "pc", "block-event", "oracle"):
            if args.command != "pc" or args.synthetic_threshold is None or args.seed is not None:
                args.seed = resolve_seed(args.seed)
            else:
                args.seed = 0
            if args.command != "oracle" and args.window is None and args.radius is None:
                args.radius = 8
        return args.func(args)
    except NonBracketingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
