"""Influence functions: (qualifying count, eligible count) -> Bound.

Every function returned here satisfies the two axioms the semantics relies on:
it is evaluated in constant time, and it is antitone in the qualifying count
under set inclusion.  When there are no eligible neighbours the result is
always ``FULL`` (no information).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Mapping, Sequence, Tuple, Union

from .bounds import FULL, Bound, Number, intersect, is_subset, to_fraction

Param = Union[Fraction, Bound]

ONE = Bound(1, 1)
DEFAULT_THRESHOLD = Fraction(1, 2)
DEFAULT_SOFTTIP = Bound("0.7", "1.0")
DEFAULT_NEGTIP = Bound("0.0", "0.2")


@dataclass(frozen=True)
class InfluenceSpec:
    name: str
    params: Tuple[Param, ...] = ()
    fn: Callable[[int, int], Bound] = field(default=None, compare=False, repr=False)

    def __call__(self, qualifying: int, eligible: int) -> Bound:
        if eligible == 0:
            return FULL
        return self.fn(qualifying, eligible)


def _threshold(value: Number) -> Fraction:
    theta = to_fraction(value)
    if not 0 <= theta <= 1:
        raise ValueError(f"threshold must lie in [0,1], got {theta}")
    return theta


def _meets(x: int, y: int, theta: Fraction) -> bool:
    # x/y >= theta without division
    return x * theta.denominator >= y * theta.numerator


def tip(threshold: Number = DEFAULT_THRESHOLD) -> InfluenceSpec:
    """Majority-style tipping: ``[1,1]`` once x/y reaches the threshold."""
    theta = _threshold(threshold)
    return InfluenceSpec(
        "tip", (theta,), lambda x, y: ONE if _meets(x, y, theta) else FULL
    )


def softtip(threshold: Number = DEFAULT_THRESHOLD, bound: Bound = DEFAULT_SOFTTIP) -> InfluenceSpec:
    theta = _threshold(threshold)
    return InfluenceSpec(
        "softtip", (theta, bound), lambda x, y: bound if _meets(x, y, theta) else FULL
    )


def negtip(bound: Bound = DEFAULT_NEGTIP) -> InfluenceSpec:
    """``bound`` when every eligible neighbour qualifies, else ``FULL``."""
    return InfluenceSpec("negtip", (bound,), lambda x, y: bound if x == y else FULL)


def const(bound: Bound) -> InfluenceSpec:
    return InfluenceSpec("const", (bound,), lambda x, y: bound)


def threshold_influence(name: str, steps: Sequence[Tuple[Number, Bound]]) -> InfluenceSpec:
    """Intersection of the bounds of every step whose threshold x/y meets.

    More qualifying neighbours can only meet more thresholds, so the result
    shrinks as x grows.
    """
    pairs = tuple((_threshold(t), b) for t, b in steps)

    def fn(x: int, y: int) -> Bound:
        out = FULL
        for theta, b in pairs:
            if _meets(x, y, theta):
                out = intersect(out, b)
        return out

    params: list = []
    for theta, b in pairs:
        params.extend((theta, b))
    return InfluenceSpec(name, tuple(params), fn)


def table_influence(
    name: str, rows: Mapping[Tuple[int, int], Bound], default: Bound = FULL
) -> InfluenceSpec:
    """A finite lookup table; pairs not listed map to ``default``.

    Raises ``ValueError`` if the table breaks the antitone axiom.
    """
    table: Dict[Tuple[int, int], Bound] = dict(rows)
    spec = InfluenceSpec(name, (), lambda x, y: table.get((x, y), default))
    max_y = max((y for _, y in table), default=0)
    bad = antitone_violations(spec, max_y + 1)
    if bad:
        raise ValueError(f"influence table {name!r} is not antitone at (x, y) = {bad[0]}")
    return spec


def antitone_violations(spec: InfluenceSpec, max_eligible: int) -> list[Tuple[int, int]]:
    """Pairs (x, y) with ``spec(x+1, y) ⊄ spec(x, y)``, for y up to ``max_eligible``."""
    bad = []
    for y in range(max_eligible + 1):
        prev = spec(0, y)
        for x in range(1, y + 1):
            cur = spec(x, y)
            if not is_subset(cur, prev):
                bad.append((x - 1, y))
            prev = cur
    return bad


def _as_bound(p: Param) -> Bound:
    if not isinstance(p, Bound):
        raise ValueError(f"expected a bound parameter, got {p}")
    return p


def _as_number(p: Param) -> Fraction:
    if isinstance(p, Bound):
        raise ValueError(f"expected a numeric parameter, got bound {p}")
    return to_fraction(p)


def _make_tip(*params: Param) -> InfluenceSpec:
    if len(params) > 1:
        raise ValueError("tip takes at most one parameter (threshold)")
    return tip(*(_as_number(p) for p in params))


def _make_softtip(*params: Param) -> InfluenceSpec:
    if len(params) not in (0, 2):
        raise ValueError("softtip takes no parameters or (threshold, bound)")
    if not params:
        return softtip()
    return softtip(_as_number(params[0]), _as_bound(params[1]))


def _make_negtip(*params: Param) -> InfluenceSpec:
    if len(params) > 1:
        raise ValueError("negtip takes at most one parameter (bound)")
    return negtip(*(_as_bound(p) for p in params))


def _make_const(*params: Param) -> InfluenceSpec:
    if len(params) != 1:
        raise ValueError("const takes exactly one parameter (bound)")
    return const(_as_bound(params[0]))


def _make_steps(*params: Param) -> InfluenceSpec:
    if not params or len(params) % 2:
        raise ValueError("steps takes pairs (threshold, bound, threshold, bound, ...)")
    pairs = [(_as_number(params[k]), _as_bound(params[k + 1])) for k in range(0, len(params), 2)]
    return threshold_influence("steps", pairs)


_REGISTRY: Dict[str, Callable[..., InfluenceSpec]] = {
    "tip": _make_tip,
    "softtip": _make_softtip,
    "negtip": _make_negtip,
    "const": _make_const,
}
BUILTIN_NAMES = tuple(_REGISTRY)
# threshold families, always available but not one of the four builtins
_REGISTRY["steps"] = _make_steps


def register_influence(name: str, factory: Callable[..., InfluenceSpec]) -> None:
    """Make ``name(params...)`` usable in programs.  Builtins cannot be replaced."""
    if name in BUILTIN_NAMES or name == "steps":
        raise ValueError(f"{name!r} is a predefined influence function")
    _REGISTRY[name] = factory


def builtin_influence(name: str, params: Sequence[Param] = ()) -> InfluenceSpec:
    """Look up an influence function by name and instantiate it."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown influence function {name!r}") from None
    return factory(*params)


def is_default(spec: InfluenceSpec) -> bool:
    """True when ``spec`` prints as its bare name (builtin defaults)."""
    defaults = {
        "tip": (DEFAULT_THRESHOLD,),
        "softtip": (DEFAULT_THRESHOLD, DEFAULT_SOFTTIP),
        "negtip": (DEFAULT_NEGTIP,),
    }
    return defaults.get(spec.name) == spec.params or (
        spec.name not in BUILTIN_NAMES and not spec.params
    )


__all__ = [
    "BUILTIN_NAMES",
    "InfluenceSpec",
    "antitone_violations",
    "builtin_influence",
    "const",
    "negtip",
    "register_influence",
    "softtip",
    "table_influence",
    "threshold_influence",
    "tip",
]
