"""Circularly symmetric regions of the complex plane.

Every region is a finite union of intervals in the modulus ``|z|``, each
endpoint carrying an :class:`EdgeStatus`.  ``unknown`` is a genuine third
truth value: membership of such an edge is reported as ``boundary-unknown``
and set operations combine statuses with three-valued logic.

Internally a region is normalised to a sorted tuple of disjoint
:class:`_Interval`; the public variant (disc, annulus, ...) is recovered
from that list, so two descriptions of the same set compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, NamedTuple, Sequence


class EdgeStatus(str, Enum):
    INCLUDED = "included"
    EXCLUDED = "excluded"
    UNKNOWN = "unknown"


INCLUDED = EdgeStatus.INCLUDED
EXCLUDED = EdgeStatus.EXCLUDED
UNKNOWN = EdgeStatus.UNKNOWN

INSIDE = "inside"
OUTSIDE = "outside"
BOUNDARY_UNKNOWN = "boundary-unknown"

EDGE_RTOL = 1e-12

# three-valued truth: 0 = out, 1 = unknown, 2 = in
_RANK = {EXCLUDED: 0, UNKNOWN: 1, INCLUDED: 2}
_STATUS = {0: EXCLUDED, 1: UNKNOWN, 2: INCLUDED}


class _Interval(NamedTuple):
    lo: float
    hi: float
    lo_edge: EdgeStatus
    hi_edge: EdgeStatus

    def truth(self, rho: float) -> int:
        if rho < self.lo or rho > self.hi:
            return 0
        if self.lo == self.hi:
            return min(_RANK[self.lo_edge], _RANK[self.hi_edge])
        if rho == self.lo:
            return _RANK[self.lo_edge]
        if rho == self.hi:
            return _RANK[self.hi_edge]
        return 2


def _truth(intervals: Iterable[_Interval], rho: float) -> int:
    return max((iv.truth(rho) for iv in intervals), default=0)


def _rebuild(points: Sequence[float], truth) -> tuple[_Interval, ...]:
    """Intervals of ``{rho : truth(rho) > 0}`` sampled at breakpoints.

    ``truth`` is evaluated at each breakpoint and at the midpoint of each gap;
    gaps never carry the unknown value because unknown only lives on edges.
    """
    pts = sorted(set(points))
    if not pts:
        return ()
    at = [truth(p) for p in pts]
    gaps = [truth(0.5 * (a + b)) for a, b in zip(pts, pts[1:])] + [0]
    gaps = [2 if g == 2 else 0 for g in gaps]
    out: list[_Interval] = []
    start = None  # (lo, lo_status)
    for i, p in enumerate(pts):
        left_in = i > 0 and gaps[i - 1] == 2
        right_in = gaps[i] == 2
        s = at[i]
        if left_in and start is not None:
            if right_in and s == 2:
                continue
            out.append(_Interval(start[0], p, start[1], _STATUS[s]))
            start = None
        if right_in:
            start = (p, _STATUS[s])
        elif not left_in and s > 0:
            out.append(_Interval(p, p, _STATUS[s], _STATUS[s]))
    return tuple(out)


def _breakpoints(*interval_lists: Iterable[_Interval]) -> list[float]:
    pts: list[float] = []
    for ivs in interval_lists:
        for iv in ivs:
            pts.extend((iv.lo, iv.hi))
    return pts


@dataclass(frozen=True)
class RadialRegion:
    """A radial region; build with the classmethod constructors."""

    variant: str
    a: float = 0.0  # inner radius (annulus) or radius (disc, circle)
    b: float = 0.0  # outer radius (annulus)
    inner_edge: EdgeStatus = INCLUDED
    outer_edge: EdgeStatus = INCLUDED
    members: tuple["RadialRegion", ...] = ()

    # constructors -------------------------------------------------------------

    @classmethod
    def empty(cls) -> "RadialRegion":
        return cls("empty")

    @classmethod
    def origin(cls) -> "RadialRegion":
        return cls("origin")

    @classmethod
    def circle(cls, rho: float) -> "RadialRegion":
        _check_radius(rho)
        if rho == 0:
            return cls.origin()
        return cls("circle", a=float(rho))

    @classmethod
    def disc(cls, rho: float, edge: EdgeStatus | str = INCLUDED) -> "RadialRegion":
        _check_radius(rho)
        return cls.from_intervals((_Interval(0.0, float(rho), INCLUDED, EdgeStatus(edge)),))

    @classmethod
    def annulus(cls, a: float, b: float, inner: EdgeStatus | str = INCLUDED,
                outer: EdgeStatus | str = INCLUDED) -> "RadialRegion":
        _check_radius(a)
        _check_radius(b)
        if a > b:
            raise ValueError(f"annulus needs a <= b, got a={a}, b={b}")
        return cls.from_intervals((_Interval(float(a), float(b), EdgeStatus(inner), EdgeStatus(outer)),))

    @classmethod
    def union(cls, members: Iterable["RadialRegion"]) -> "RadialRegion":
        ivs = [iv for m in members for iv in m.intervals]
        return cls.from_intervals(_rebuild(_breakpoints(ivs), lambda rho: _truth(ivs, rho)))

    @classmethod
    def from_intervals(cls, intervals: Sequence[_Interval]) -> "RadialRegion":
        ivs = _rebuild(_breakpoints(intervals), lambda rho: _truth(intervals, rho))
        if not ivs:
            return cls("empty")
        parts = [_from_interval(iv) for iv in ivs]
        if len(parts) == 1:
            return parts[0]
        return cls("union", members=tuple(parts))

    # internal view -----------------------------------------------------------

    @property
    def intervals(self) -> tuple[_Interval, ...]:
        v = self.variant
        if v == "empty":
            return ()
        if v == "origin":
            return (_Interval(0.0, 0.0, INCLUDED, INCLUDED),)
        if v == "circle":
            return (_Interval(self.a, self.a, INCLUDED, INCLUDED),)
        if v == "disc":
            return (_Interval(0.0, self.a, INCLUDED, self.outer_edge),)
        if v == "annulus":
            return (_Interval(self.a, self.b, self.inner_edge, self.outer_edge),)
        return tuple(iv for m in self.members for iv in m.intervals)

    @property
    def is_empty(self) -> bool:
        return self.variant == "empty"

    @property
    def certainly_nonempty(self) -> bool:
        return any(iv.lo < iv.hi or iv.truth(iv.lo) == 2 for iv in self.intervals)

    @property
    def is_open(self) -> bool:
        """No edge of the region belongs to it (the origin of a disc is interior)."""
        for iv in self.intervals:
            if iv.lo == iv.hi:
                return False
            if iv.hi_edge != EXCLUDED or (iv.lo > 0 and iv.lo_edge != EXCLUDED):
                return False
        return True

    # queries -------------------------------------------------------------------

    def membership(self, lam: complex) -> str:
        rho = abs(complex(lam))
        for iv in self.intervals:
            for edge, status in ((iv.lo, iv.lo_edge), (iv.hi, iv.hi_edge)):
                if edge > 0 and abs(rho - edge) <= EDGE_RTOL * max(1.0, edge):
                    rho = edge
        t = _truth(self.intervals, rho)
        return {2: INSIDE, 1: BOUNDARY_UNKNOWN, 0: OUTSIDE}[t]

    def contains(self, inner: "RadialRegion") -> bool:
        """Conservative containment: inner unknowns count as in, outer unknowns as out."""
        outer_def = [_resolve(iv, EXCLUDED) for iv in self.intervals]
        inner_def = [_resolve(iv, INCLUDED) for iv in inner.intervals]
        pts = _breakpoints(outer_def, inner_def)
        pts_sorted = sorted(set(pts))
        probes = pts_sorted + [0.5 * (x + y) for x, y in zip(pts_sorted, pts_sorted[1:])]
        return all(_truth(outer_def, p) == 2 for p in probes if _truth(inner_def, p) == 2)

    def same_set(self, other: "RadialRegion") -> bool:
        return self.normalized().intervals == other.normalized().intervals

    def normalized(self) -> "RadialRegion":
        return RadialRegion.from_intervals(self.intervals)

    # set algebra ---------------------------------------------------------------

    def _combine(self, other: "RadialRegion", op) -> "RadialRegion":
        A, B = self.intervals, other.intervals
        return RadialRegion.from_intervals(
            _rebuild(_breakpoints(A, B), lambda rho: op(_truth(A, rho), _truth(B, rho)))
        )

    def __or__(self, other: "RadialRegion") -> "RadialRegion":
        return self._combine(other, max)

    def __and__(self, other: "RadialRegion") -> "RadialRegion":
        return self._combine(other, min)

    def __sub__(self, other: "RadialRegion") -> "RadialRegion":
        return self._combine(other, lambda a, b: min(a, 2 - b))

    def interior(self) -> "RadialRegion":
        ivs = []
        for iv in self.intervals:
            if iv.lo == iv.hi:
                continue
            lo_edge = INCLUDED if (iv.lo == 0 and iv.lo_edge == INCLUDED) else EXCLUDED
            ivs.append(_Interval(iv.lo, iv.hi, lo_edge, EXCLUDED))
        return RadialRegion.from_intervals(ivs)

    def closure(self) -> "RadialRegion":
        return RadialRegion.from_intervals(
            [_Interval(iv.lo, iv.hi, INCLUDED, INCLUDED) for iv in self.intervals]
        )

    def bounding_circles(self) -> list[tuple[str, float]]:
        out: list[tuple[str, float]] = []
        for part in (self.members if self.variant == "union" else (self,)):
            if part.variant == "circle":
                out.append(("circle", part.a))
            elif part.variant == "disc" and part.a > 0:
                out.append(("disc-edge", part.a))
            elif part.variant == "annulus":
                if part.a > 0:
                    out.append(("annulus-inner", part.a))
                out.append(("annulus-outer", part.b))
        return out

    # serialization ---------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        v = self.variant
        if v in ("empty", "origin"):
            return {"type": v}
        if v == "circle":
            return {"type": v, "radius": self.a}
        if v == "disc":
            return {"type": v, "radius": self.a, "edge": self.outer_edge.value}
        if v == "annulus":
            return {
                "type": v,
                "inner": self.a,
                "outer": self.b,
                "inner_edge": self.inner_edge.value,
                "outer_edge": self.outer_edge.value,
            }
        return {"type": "union", "members": [m.to_dict() for m in self.members]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RadialRegion":
        t = d["type"]
        if t == "empty":
            return cls.empty()
        if t == "origin":
            return cls.origin()
        if t == "circle":
            return cls.circle(d["radius"])
        if t == "disc":
            return cls.disc(d["radius"], d["edge"])
        if t == "annulus":
            return cls.annulus(d["inner"], d["outer"], d["inner_edge"], d["outer_edge"])
        if t == "union":
            return cls.union(cls.from_dict(m) for m in d["members"])
        raise ValueError(f"unknown region type {t!r}")

    def describe(self) -> str:
        v = self.variant
        if v in ("empty", "origin"):
            return v
        if v == "circle":
            return f"circle(|z|={self.a:.6g})"
        if v == "disc":
            return f"disc(|z|<={self.a:.6g}, edge {self.outer_edge.value})"
        if v == "annulus":
            return (f"annulus({self.a:.6g} <= |z| <= {self.b:.6g}, "
                    f"inner {self.inner_edge.value}, outer {self.outer_edge.value})")
        return " U ".join(m.describe() for m in self.members)


def _check_radius(rho: float) -> None:
    if not (rho >= 0 and math.isfinite(rho)):
        raise ValueError(f"radius must be finite and nonnegative, got {rho!r}")


def _resolve(iv: _Interval, unknown_as: EdgeStatus) -> _Interval:
    fix = lambda e: unknown_as if e == UNKNOWN else e  # noqa: E731
    return _Interval(iv.lo, iv.hi, fix(iv.lo_edge), fix(iv.hi_edge))


def _from_interval(iv: _Interval) -> RadialRegion:
    if iv.lo == iv.hi:
        if iv.lo == 0 and iv.lo_edge == INCLUDED:
            return RadialRegion("origin")
        if iv.lo_edge == INCLUDED:
            return RadialRegion("circle", a=iv.lo)
        # a lone circle (or the origin) of unknown membership
        return RadialRegion("annulus", a=iv.lo, b=iv.lo, inner_edge=UNKNOWN, outer_edge=UNKNOWN)
    if iv.lo == 0 and iv.lo_edge == INCLUDED:
        return RadialRegion("disc", a=iv.hi, outer_edge=iv.hi_edge)
    return RadialRegion("annulus", a=iv.lo, b=iv.hi, inner_edge=iv.lo_edge, outer_edge=iv.hi_edge)


# module-level operations -------------------------------------------------------


def membership(region: RadialRegion, lam: complex) -> str:
    return region.membership(lam)


def contains_region(outer: RadialRegion, inner: RadialRegion) -> bool:
    return outer.contains(inner)


class BoundarySample(NamedTuple):
    circle_role: str
    radius: float
    theta: float
    re: float
    im: float


CSV_COLUMNS = BoundarySample._fields


def boundary_samples(region: RadialRegion, samples_per_circle: int) -> list[BoundarySample]:
    if samples_per_circle < 1:
        raise ValueError("samples_per_circle must be positive")
    out = []
    for role, rho in region.bounding_circles():
        for j in range(samples_per_circle):
            theta = 2 * math.pi * j / samples_per_circle
            out.append(BoundarySample(role, rho, theta, rho * math.cos(theta), rho * math.sin(theta)))
    return out
