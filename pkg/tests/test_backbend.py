import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backbend_perc.backbend import (
    INF,
    BackbendSpec,
    beta_at,
    classify,
    concatenation_preserves,
    dominated,
    floor_at,
    has_monotone_floor,
    is_oriented,
    normalize,
    record_levels,
    validate_path,
)
from backbend_perc.lattice import Region, neighbors

EX35 = "prefix:0,1,2,3;const:0"


def test_beta_at_examples():
    assert beta_at(BackbendSpec.parse("const:0"), 7) == 0
    s = BackbendSpec.parse(EX35)
    assert beta_at(s, 2) == 2 and beta_at(s, 9) == 0
    assert beta_at(BackbendSpec.parse("inf"), 3) == INF


def test_floor_at_examples():
    assert floor_at(BackbendSpec.parse("const:0"), 5) == 5
    assert floor_at(BackbendSpec.parse("inf"), 5) == -math.inf
    assert floor_at(BackbendSpec.parse(EX35), 3) == 0


@pytest.mark.parametrize(
    "text,expected",
    [("const:0", True), ("const:4", True), ("cyclic:0,2", False), (EX35, True), ("inf", True), ("cyclic:1,2", True)],
)
def test_has_monotone_floor(text, expected):
    assert has_monotone_floor(BackbendSpec.parse(text)) is expected


def _pairwise_monotone(spec, horizon=10):
    # independent oracle: beta_l - beta_m <= l - m for all m <= l <= horizon
    vals = [beta_at(spec, h) for h in range(horizon + 1)]
    for m in range(horizon + 1):
        for l in range(m, horizon + 1):
            if vals[l] == INF:
                continue
            if vals[m] == INF:
                return False
            if vals[l] - vals[m] > l - m:
                return False
    return True


@pytest.mark.parametrize("text", [EX35, "const:2", "cyclic:0,2", "cyclic:3,0,1", "prefix:5,0;cyclic:1,2"])
def test_monotone_floor_matches_pairwise_oracle(text):
    spec = BackbendSpec.parse(text)
    assert has_monotone_floor(spec) == _pairwise_monotone(spec)


finite = st.integers(0, 4)
entry = st.one_of(finite, finite, finite, st.just(INF))


@st.composite
def specs(draw, allow_inf=True):
    e = entry if allow_inf else finite
    prefix = tuple(draw(st.lists(e, max_size=4)))
    tail = tuple(draw(st.lists(e, min_size=1, max_size=3)))
    return BackbendSpec(prefix, tail)


@given(specs())
def test_monotone_floor_implies_nondecreasing_floor(spec):
    if has_monotone_floor(spec):
        fl = [floor_at(spec, h) for h in range(40)]
        assert all(a <= b for a, b in zip(fl, fl[1:]))


@given(specs())
def test_parse_roundtrip(spec):
    again = BackbendSpec.parse(spec.to_text())
    assert again.values(30) == spec.values(30)


def test_example_spec_echo():
    assert BackbendSpec.parse(EX35).to_text() == EX35


@pytest.mark.parametrize(
    "text,label",
    [
        ("const:0", "oriented"),
        ("const:2", "b_backbend(2)"),
        ("inf", "unoriented"),
        ("cyclic:1,2", "k_cyclic(2)"),
        ("prefix:0,0,1;cyclic:2,1", "cyclic_limit_from_below(2)"),
        (EX35, "cyclic_limit(1)"),
        ("cyclic:0,inf", "general"),
    ],
)
def test_classify(text, label):
    assert str(classify(BackbendSpec.parse(text))) == label


@given(specs())
def test_classify_stable_under_unrolling(spec):
    unrolled = BackbendSpec(spec.prefix + spec.tail, spec.tail)
    doubled = BackbendSpec(spec.prefix, spec.tail * 2)
    assert classify(unrolled) == classify(spec) == classify(doubled)
    assert normalize(unrolled).values(20) == spec.values(20)


def test_record_levels():
    assert record_levels([(0, 0), (1, 1), (2, 0)]) == [0, 1, 1]
    assert record_levels([(0, 0), (1, 1), (0, 2), (1, 3)]) == [0, 1, 2, 3]
    assert record_levels([(0, 0), (-1, 1), (0, 2), (-1, 3), (0, 4)]) == [0, 1, 2, 3, 4]


def test_validate_path_examples():
    H = Region.half_space()
    zero = BackbendSpec.parse("const:0")
    assert validate_path(zero, [(0, 0), (1, 1), (0, 2)], H).valid
    bad = validate_path(zero, [(0, 0), (1, 1), (2, 0)], H)
    assert not bad.valid and bad.index == 2 and bad.reason == "backbend"
    one = BackbendSpec.parse("const:1")
    assert validate_path(one, [(0, 0), (1, 1), (2, 0), (3, 1), (4, 2)], H).valid


def test_validate_path_reasons():
    s = BackbendSpec.parse("inf")
    assert validate_path(s, [(0, -2)]).reason == "start-level"
    assert validate_path(s, [(0, 0), (1, 1), (0, 0)]).reason == "repeat"
    assert validate_path(s, [(0, 0), (2, 2)]).reason == "not-adjacent"
    assert validate_path(s, [(0, 0), (1, -1)], Region.half_space()).reason == "region"
    with pytest.raises(ValueError):
        validate_path(s, [])


# -- random self-avoiding paths ---------------------------------------------------


def random_saw(rng, d, length, region=None):
    v = (0,) * d
    path, seen = [v], {v}
    for _ in range(length):
        options = [w for w in neighbors(path[-1]) if w not in seen and (region is None or region.contains(w))]
        if not options:
            break
        w = rng.choice(options)
        path.append(w)
        seen.add(w)
    return path


@pytest.mark.parametrize("d", [2, 3])
def test_oriented_iff_strictly_increasing(d):
    rng = random.Random(d)
    zero = BackbendSpec.parse("const:0")
    for _ in range(2000):
        path = random_saw(rng, d, rng.randint(0, 12), Region.half_space())
        rising = all(b[-1] > a[-1] for a, b in zip(path, path[1:]))
        assert validate_path(zero, path, Region.half_space()).valid == rising
        assert validate_path(BackbendSpec.parse("inf"), path, Region.half_space()).valid


@settings(max_examples=60)
@given(specs(), specs(), st.integers(0, 10_000))
def test_domination_implies_acceptance_inclusion(a, b, seed):
    lo = BackbendSpec(
        tuple(min(x, y) for x, y in zip(a.values(a.horizon + b.horizon + 2), b.values(a.horizon + b.horizon + 2))),
        (0,),
    )
    assert dominated(lo, a) or not dominated(lo, a)  # well-defined for any pair
    rng = random.Random(seed)
    for _ in range(50):
        path = random_saw(rng, 2, rng.randint(0, 10), Region.half_space())
        if dominated(a, b) and validate_path(a, path).valid:
            assert validate_path(b, path).valid
        if validate_path(BackbendSpec.parse("const:0"), path).valid:
            assert validate_path(a, path).valid


def test_dominated():
    assert dominated(BackbendSpec.parse("const:0"), BackbendSpec.parse(EX35))
    assert not dominated(BackbendSpec.parse(EX35), BackbendSpec.parse("const:0"))
    assert dominated(BackbendSpec.parse("const:3"), BackbendSpec.parse("inf"))


def test_concatenation_oriented_prefix():
    zero = BackbendSpec.parse("const:0")
    prefix = [(0, 0, 0), (1, 1, 1), (0, 0, 2), (1, 1, 3), (0, 0, 4)]
    suffix = [(0, 0, 4), (1, -1, 5), (2, 0, 6)]
    assert is_oriented(prefix)
    assert concatenation_preserves(zero, prefix, suffix)


def test_concatenation_constant_backbend_randomized():
    rng = random.Random(7)
    two = BackbendSpec.parse("const:2")
    prefix = [(0, 0), (1, 1), (0, 2), (1, 3), (0, 4)]
    checked = 0
    for _ in range(3000):
        tail = random_saw(rng, 2, rng.randint(1, 10))
        suffix = [(a, b + 4) for a, b in tail]
        if validate_path(two, suffix).valid:
            checked += 1
            assert concatenation_preserves(two, prefix, suffix)
    assert checked > 100


def test_concatenation_can_fail_without_monotone_floor():
    # randomized search for a counterexample with the non-monotone tail [0, 5]
    rng = random.Random(11)
    spec = BackbendSpec.parse("cyclic:0,5")
    prefix = [(0, 0), (1, 1), (0, 2), (1, 3), (0, 4)]
    found = False
    for _ in range(20000):
        tail = random_saw(rng, 2, rng.randint(2, 12))
        suffix = [(a, b + 4) for a, b in tail]
        if validate_path(spec, suffix).valid and not concatenation_preserves(spec, prefix, suffix):
            found = True
            break
    assert found
