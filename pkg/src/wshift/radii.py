"""Asymptotic radii of a weighted shift.

Unilateral::

    r  = lim_n [sup_k beta_{n+k}/beta_k]^(1/n)      r1 = same with inf
    r2 = liminf beta_n^(1/n)                        r3 = limsup beta_n^(1/n)

Bilateral shifts carry a copy for each side; on the negative side the
window ratios are ``beta_j / beta_{j-n}`` with ``j < 0`` and the root test
uses ``(1/beta_{-n})^(1/n)``.

Limits are read off exactly when every tail is constant, periodic or a
builtin; otherwise they are estimated from a finite window and a trace plus
a convergence gap are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import BudgetError, SpecError
from .weights import (
    BUILTIN,
    CONSTANT,
    DEFAULT_WINDOW,
    EXPR,
    PERIODIC,
    TailRadii,
    TailRule,
    WeightSpec,
    ensure_bilateral,
    weight_extreme,
)

MIN_WINDOW = 64
INVERTIBLE_THRESHOLD = 1e-9
# an expression tail whose probed inf drops by this factor when the window
# doubles is treated as decaying to zero
DECAY_RATIO = 0.75

_NAMES = ("r1", "r2", "r3", "r")


def exact_tail_radius(tail: TailRule) -> Optional[TailRadii]:
    """Closed-form radii of a tail, or ``None`` for expression tails.

    A finite prefix changes none of the limits, so the tail alone decides.
    """
    if tail.variant == CONSTANT:
        c = tail.values[0]
        return TailRadii(c, c, c, c)
    if tail.variant == PERIODIC:
        g = math.exp(float(np.mean(np.log(tail.values))))
        return TailRadii(g, g, g, g)
    if tail.variant == BUILTIN:
        return tail.builtin_entry.radii
    return None


def _side_estimates(A: np.ndarray, n: int, k0: int) -> dict[str, float]:
    """Radii estimates at block length ``n`` from cumulative logs ``A``.

    ``A[i]`` is the log of the product of the first ``i`` weights on this
    side.  Window starts run over ``k0..n``.
    """
    blocks = (A[n + k0 : 2 * n + 1] - A[k0 : n + 1]) / n
    roots = A[n // 2 + 1 : n + 1] / np.arange(n // 2 + 1, n + 1)
    return {
        "r": math.exp(blocks.max()),
        "r1": math.exp(blocks.min()),
        "r2": math.exp(roots.min()),
        "r3": math.exp(roots.max()),
    }


def _side_cumulative(spec: WeightSpec, side: str, m: int) -> np.ndarray:
    if side == "pos":
        return spec.log_beta_cache.positive(m)
    return -spec.log_beta_cache.negative(m)


def _trace_points(window: int) -> list[int]:
    return sorted({max(window // d, 2) for d in (8, 4, 2, 1)})


def estimate_side(spec: WeightSpec, side: str, window: int) -> tuple[dict[str, float], list[dict[str, float]], float]:
    """Numerical radii for one side: values at ``window``, trace and gap."""
    A = _side_cumulative(spec, side, 2 * window)
    k0 = 0 if side == "pos" else 1
    trace = []
    for n in _trace_points(window):
        est = _side_estimates(A, n, k0)
        trace.append({"n": n, **est})
    last, prev = trace[-1], trace[-2]
    gap = max(abs(last[k] - prev[k]) for k in _NAMES)
    values = {k: last[k] for k in _NAMES}
    return values, trace, gap


def _clamp_chain(values: dict[str, float], label: str, notes: list[str]) -> dict[str, float]:
    r1, r2, r3, r = (values[k] for k in _NAMES)
    fixed = {"r1": min(r1, r2), "r2": r2, "r3": r3, "r": max(r, r3)}
    if fixed["r1"] < r1 - 1e-12 or fixed["r"] > r + 1e-12:
        notes.append(f"{label}: window estimates broke the chain r1 <= r2 <= r3 <= r and were clamped")
    return fixed


@dataclass(frozen=True)
class RadiiReport:
    kind: str
    method: str
    window: int
    r: Optional[float] = None
    r1: Optional[float] = None
    r2: Optional[float] = None
    r3: Optional[float] = None
    r_plus: Optional[float] = None
    r1_plus: Optional[float] = None
    r2_plus: Optional[float] = None
    r3_plus: Optional[float] = None
    r_minus: Optional[float] = None
    r1_minus: Optional[float] = None
    r2_minus: Optional[float] = None
    r3_minus: Optional[float] = None
    invertible: Optional[bool] = None
    estimate_trace: dict[str, list[dict[str, float]]] = field(default_factory=dict)
    convergence_gap: float = 0.0
    sup_weight: float = 0.0
    sup_exact: bool = True
    # every tail is constant, periodic or builtin, so edge behaviour of the
    # point spectra is decidable (see spectra.spectral_picture)
    structured: bool = False
    numeric: dict[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def bilateral(self) -> bool:
        return self.kind == "bilateral"

    def side(self, which: str) -> TailRadii:
        """Radii of one side: ``"plus"``/``"minus"`` (or ``""`` when unilateral)."""
        if not which:
            return TailRadii(self.r1, self.r2, self.r3, self.r)
        return TailRadii(*(getattr(self, f"{k}_{which}") for k in _NAMES))

    def chain_violations(self, slack: float = 1e-9) -> list[str]:
        out = []
        sides = ["plus", "minus"] if self.bilateral else [""]
        for s in sides:
            vals = self.side(s)
            if any(v is None or not math.isfinite(v) or v < 0 for v in vals):
                out.append(f"radii{'_' + s if s else ''} missing, negative or not finite: {tuple(vals)}")
                continue
            for a, b, na, nb in zip(vals, vals[1:], _NAMES, _NAMES[1:]):
                if a > b + slack:
                    suffix = f"_{s}" if s else ""
                    out.append(f"{na}{suffix}={a:.12g} exceeds {nb}{suffix}={b:.12g}")
        return out

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "kind": self.kind,
            "method": self.method,
            "window": self.window,
            "convergence_gap": self.convergence_gap,
            "sup_weight": self.sup_weight,
            "sup_exact": self.sup_exact,
            "structured": self.structured,
            "estimate_trace": self.estimate_trace,
            "numeric": self.numeric,
            "notes": list(self.notes),
        }
        names = (
            [f"{k}_{s}" for s in ("plus", "minus") for k in _NAMES] if self.bilateral else list(_NAMES)
        )
        for k in names:
            d[k] = getattr(self, k)
        if self.bilateral:
            d["invertible"] = self.invertible
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RadiiReport":
        d = dict(d)
        d["notes"] = tuple(d.get("notes", ()))
        return cls(**d)


def bilateral_invertible(spec: WeightSpec, window: int = DEFAULT_WINDOW,
                         threshold: float = INVERTIBLE_THRESHOLD) -> bool:
    """A bilateral shift is invertible iff its weights are bounded below."""
    ensure_bilateral(spec, "bilateral_invertible")
    inf, exact = weight_extreme(spec, "inf", window)
    if inf <= threshold:
        return False
    if exact:
        return True
    for tail, sign in ((spec.tail_pos, 1), (spec.tail_neg, -1)):
        if tail.variant != EXPR:
            continue
        near = tail.log_weights(*((0, window) if sign > 0 else (-window, 0))).min()
        far = tail.log_weights(*((0, 2 * window) if sign > 0 else (-2 * window, 0))).min()
        if far < near + math.log(DECAY_RATIO):
            return False
    return True


def estimate_radii(spec: WeightSpec, window: int = DEFAULT_WINDOW) -> RadiiReport:
    if window < MIN_WINDOW:
        raise SpecError(f"window must be at least {MIN_WINDOW}, got {window}")
    if 4 * window > (1 << 24):
        raise BudgetError(f"window {window} exceeds the index budget")
    notes: list[str] = []
    sides = [("pos", spec.tail_pos, "plus")]
    if spec.bilateral:
        sides.append(("neg", spec.tail_neg, "minus"))

    values: dict[str, float] = {}
    numeric: dict[str, float] = {}
    traces: dict[str, list] = {}
    gap = 0.0
    all_exact = True
    for side, tail, label in sides:
        est, trace, side_gap = estimate_side(spec, side, window)
        suffix = f"_{label}" if spec.bilateral else ""
        traces[label if spec.bilateral else "pos"] = trace
        for k in _NAMES:
            numeric[k + suffix] = est[k]
        exact = exact_tail_radius(tail)
        if exact is not None:
            chosen = dict(zip(_NAMES, exact))
        else:
            all_exact = False
            gap = max(gap, side_gap)
            chosen = _clamp_chain(est, "radii" + suffix, notes)
            if tail.variant == EXPR:
                notes.append(
                    f"radii{suffix} estimated from a window of {window} indices; "
                    "boundedness of the expression tail is only probed"
                )
        for k in _NAMES:
            values[k + suffix] = chosen[k]

    # the window estimates read weights up to index 2 * window
    sup, sup_exact = weight_extreme(spec, "sup", 2 * window)
    structured = all(t.variant != EXPR for t in spec.tails())
    kwargs: dict[str, Any] = dict(
        kind=spec.kind,
        method="exact" if all_exact else "estimated",
        window=window,
        estimate_trace=traces,
        convergence_gap=gap,
        sup_weight=sup,
        sup_exact=sup_exact,
        structured=structured,
        numeric=numeric,
        notes=tuple(notes),
        **values,
    )
    if spec.bilateral:
        kwargs["invertible"] = bilateral_invertible(spec, window)
    return RadiiReport(**kwargs)


def doubling_diagnostic(spec: WeightSpec, window: int = DEFAULT_WINDOW) -> list[str]:
    """Compare raw estimates at ``window`` and ``2*window``.

    r1 should not rise, and r should not fall, by more than the gap reported
    at ``window``.  Violations are returned as messages.
    """
    out = []
    sides = [("pos", "")] + ([("neg", "_minus")] if spec.bilateral else [])
    for side, suffix in sides:
        a, _, gap = estimate_side(spec, side, window)
        b, _, _ = estimate_side(spec, side, 2 * window)
        if b["r1"] > a["r1"] + gap + 1e-12:
            out.append(f"r1{suffix} rose from {a['r1']:.12g} to {b['r1']:.12g} (gap {gap:.3g})")
        if b["r"] < a["r"] - gap - 1e-12:
            out.append(f"r{suffix} fell from {a['r']:.12g} to {b['r']:.12g} (gap {gap:.3g})")
    return out
