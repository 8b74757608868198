"""Normal / hyponormal / subnormal classification of weighted shifts.

Subnormality is tested through Berger's theorem: a unilateral shift is
subnormal iff ``beta_n^2`` are the moments ``int t^(2n) dmu`` of a
probability measure on ``[0, ||T||]``.  With ``s = t^2`` this is a Hausdorff
moment problem on ``[0, B]``, ``B = ||T||^2``, whose truncation at order K
asks three Hankel matrices to be positive semidefinite::

    H  = (m_{i+j}),  H' = (m_{i+j+1}),  B*H - H'      0 <= i, j <= K

These conditions are necessary at every K and sufficient only in the limit,
so a ``consistent_subnormal`` verdict is always tied to its order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy.linalg import hankel

from .errors import BudgetError, MomentOverflowError
from .weights import (
    BUILTIN,
    CONSTANT,
    DEFAULT_WINDOW,
    PERIODIC,
    WeightSpec,
    ensure_bilateral,
    ensure_unilateral,
    weight_extreme,
)

CONSISTENT = "consistent_subnormal"
NOT_SUBNORMAL = "not_subnormal"
INCONCLUSIVE = "inconclusive"

DEFAULT_TOL = 1e-9
MAX_ORDER = 400
MOMENT_CEILING = 1e300
_LOG_CEILING = math.log(MOMENT_CEILING)
MONOTONE_TOL = 1e-12


# --- normal / hyponormal ----------------------------------------------------------


def _tail_is_constant(tail) -> bool:
    return tail.variant == CONSTANT or (tail.variant == PERIODIC and len(set(tail.values)) == 1)


def classify_normal_hyponormal(spec: WeightSpec, window: int = DEFAULT_WINDOW) -> dict[str, bool]:
    """Normal iff bilateral with constant weights; hyponormal iff weights nondecreasing.

    Structured tails are decided exactly.  Expression tails are checked on
    the probed window only.
    """
    lo = -window if spec.bilateral else 0
    lw = spec.log_weights(lo, window)
    spread = lw.max() - lw.min()
    nondecreasing = bool(np.all(np.diff(lw) >= -MONOTONE_TOL))

    for tail, positive in ((spec.tail_pos, True), (spec.tail_neg, False)):
        if tail is None or _tail_is_constant(tail):
            continue
        if tail.variant == PERIODIC:
            nondecreasing = False
        elif tail.variant == BUILTIN:
            entry = tail.builtin_entry
            # a mirrored increasing tail decreases towards the centre
            if not entry.nondecreasing or not positive:
                nondecreasing = False

    all_constant = all(_tail_is_constant(t) for t in spec.tails() if t.variant != "expr")
    normal = bool(spec.bilateral and spread <= MONOTONE_TOL and all_constant)
    if normal:
        # the probed window also contains both prefixes and the tail values
        nondecreasing = True
    return {"normal": normal, "hyponormal": nondecreasing}


# --- certificates ---------------------------------------------------------------------


@dataclass(frozen=True)
class MomentCertificate:
    kind: str
    order: int
    tolerance: float
    support_bound: float
    support_bound_exact: bool
    moments: tuple[float, ...]
    min_eig_H: float
    min_eig_H1: float
    min_eig_HB: float
    normalized_min_eigs: dict[str, float]
    verdict: str
    witness: Optional[dict[str, Any]] = None
    leading_minors: dict[str, list[float]] = field(default_factory=dict)
    necessary_only: bool = False
    moment_offset: int = 0  # index of moments[0]; negative for bilateral windows
    windows: tuple[dict[str, Any], ...] = ()
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "order": self.order,
            "tolerance": self.tolerance,
            "support_bound": self.support_bound,
            "support_bound_exact": self.support_bound_exact,
            "moments": list(self.moments),
            "moment_offset": self.moment_offset,
            "min_eig_H": self.min_eig_H,
            "min_eig_H1": self.min_eig_H1,
            "min_eig_HB": self.min_eig_HB,
            "normalized_min_eigs": self.normalized_min_eigs,
            "verdict": self.verdict,
            "witness": self.witness,
            "leading_minors": self.leading_minors,
            "necessary_only": self.necessary_only,
            "windows": [dict(w) for w in self.windows],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MomentCertificate":
        d = dict(d)
        d["moments"] = tuple(d["moments"])
        d["windows"] = tuple(d.get("windows", ()))
        d["notes"] = tuple(d.get("notes", ()))
        return cls(**d)


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: tuple[tuple[float, float], ...]  # (t_i, w_i)
    order: int
    moment_error: float
    notes: tuple[str, ...] = ()

    @property
    def locations(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])


def _roundoff(n: int) -> float:
    return 64.0 * n * n * np.finfo(float).eps


def _moments(spec: WeightSpec, lo: int, hi: int) -> np.ndarray:
    """``m_k = beta_k^2`` for ``k = lo..hi`` from log-domain betas."""
    logs = np.array([2.0 * spec.log_beta(k) for k in range(lo, hi + 1)])
    bad = np.nonzero(logs > _LOG_CEILING)[0]
    if bad.size:
        k = lo + int(bad[0])
        raise MomentOverflowError(f"moment m_{k} = beta_{k}^2 exceeds {MOMENT_CEILING:g}")
    return np.exp(logs)


def _diag_scale(M: np.ndarray, diag: Optional[np.ndarray] = None) -> np.ndarray:
    d = np.sqrt(np.abs(np.diag(M) if diag is None else diag))
    floor = float(np.abs(M).max()) or 1.0
    return np.where(d > 0, d, math.sqrt(floor))


def _psd_summary(M: np.ndarray, diag: Optional[np.ndarray] = None) -> tuple[float, float]:
    """Raw minimum eigenvalue and the minimum eigenvalue of ``D^-1 M D^-1``.

    ``D`` holds square roots of the diagonal, so the scaled matrix is
    congruent to ``M`` and has unit diagonal: moments growing like
    ``B^k`` no longer hide a negative corner.  For ``B*H - H'`` the caller
    passes the diagonal of ``B*H + H'`` instead, since the difference can be
    far smaller than either term and its rounding error is set by the terms.
    """
    raw = float(np.linalg.eigvalsh(M)[0])
    d = _diag_scale(M, diag)
    return raw, float(np.linalg.eigvalsh(M / np.outer(d, d))[0])


def _first_bad_minor(M: np.ndarray, tol: float, diag: Optional[np.ndarray] = None) -> int:
    d = _diag_scale(M, diag)
    S = M / np.outer(d, d)
    for k in range(1, M.shape[0] + 1):
        if np.linalg.eigvalsh(S[:k, :k])[0] < -tol:
            return k
    return M.shape[0]


def _leading_dets(M: np.ndarray) -> list[float]:
    return [float(np.linalg.det(M[:k, :k])) for k in range(1, M.shape[0] + 1)]


def _verdict(named: dict[str, np.ndarray], normalized: dict[str, float], tol: float, n: int,
             scales: Optional[dict[str, np.ndarray]] = None):
    scales = scales or {}
    worst = min(normalized, key=normalized.get)
    if normalized[worst] < -tol:
        witness = {
            "matrix": worst,
            "min_eig_normalized": normalized[worst],
            "minor_order": _first_bad_minor(named[worst], tol, scales.get(worst)),
            "failing": {
                name: _first_bad_minor(named[name], tol, scales.get(name))
                for name in named
                if normalized[name] < -tol
            },
        }
        return NOT_SUBNORMAL, witness
    if normalized[worst] < -_roundoff(n):
        return INCONCLUSIVE, None
    return CONSISTENT, None


def _check_order(order: int) -> None:
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    if order > MAX_ORDER:
        raise BudgetError(f"order {order} exceeds the budget of {MAX_ORDER}")


def berger_hausdorff_test(spec: WeightSpec, order: int, tolerance: float = DEFAULT_TOL,
                          window: int = DEFAULT_WINDOW) -> MomentCertificate:
    ensure_unilateral(spec, "berger_hausdorff_test")
    _check_order(order)
    K = order
    m = _moments(spec, 0, 2 * K + 1)
    sup, sup_exact = weight_extreme(spec, "sup", window)
    B = sup * sup
    H = hankel(m[: K + 1], m[K : 2 * K + 1])
    H1 = hankel(m[1 : K + 2], m[K + 1 : 2 * K + 2])
    HB = B * H - H1
    named = {"H": H, "H1": H1, "HB": HB}
    scales = {"HB": B * np.diag(H) + np.diag(H1)}
    raws, normalized = {}, {}
    for name, M in named.items():
        raws[name], normalized[name] = _psd_summary(M, scales.get(name))
    verdict, witness = _verdict(named, normalized, tolerance, K + 1, scales)
    notes = [f"truncated Hausdorff conditions on [0, B] with B = {B:.12g} at order {K} (Berger's theorem)"]
    if not sup_exact:
        notes.append("support bound B comes from a probed sup of an expression tail")
    if verdict == CONSISTENT:
        notes.append(f"consistent with subnormality up to order {K}; not a proof at infinite order")
    return MomentCertificate(
        kind="unilateral",
        order=K,
        tolerance=tolerance,
        support_bound=B,
        support_bound_exact=sup_exact,
        moments=tuple(float(x) for x in m),
        min_eig_H=raws["H"],
        min_eig_H1=raws["H1"],
        min_eig_HB=raws["HB"],
        normalized_min_eigs=normalized,
        verdict=verdict,
        witness=witness,
        leading_minors={name: _leading_dets(M) for name, M in named.items()},
        notes=tuple(notes),
    )


def bilateral_moment_test(spec: WeightSpec, order: int, shifts: int = 2,
                          tolerance: float = DEFAULT_TOL, window: int = DEFAULT_WINDOW) -> MomentCertificate:
    """Necessary conditions for a subnormal bilateral shift.

    If the shift is subnormal, ``m_k = beta_k^2 = int s^k dnu(s)`` for every
    integer ``k`` with ``nu`` supported in ``[0, B]``.  Then each window
    ``(m_{i+j+p})`` is the Gram matrix of ``s^(p/2) s^i`` and must be
    positive semidefinite for every integer ``p``.  Windows with
    ``p = -2*shifts .. 2*shifts + 1`` are checked.
    """
    ensure_bilateral(spec, "bilateral_moment_test")
    _check_order(order)
    if shifts < 0:
        raise ValueError("shifts must be nonnegative")
    K, M = order, shifts
    lo, hi = -2 * M, 2 * K + 2 * M + 1
    m = _moments(spec, lo, hi)
    sup, sup_exact = weight_extreme(spec, "sup", window)
    named: dict[str, np.ndarray] = {}
    windows = []
    for p in range(-2 * M, 2 * M + 2):
        i0 = p - lo
        W = hankel(m[i0 : i0 + K + 1], m[i0 + K : i0 + 2 * K + 1])
        raw, norm = _psd_summary(W)
        name = f"H[p={p}]"
        named[name] = W
        windows.append({"offset": p, "min_eig": raw, "min_eig_normalized": norm})
    normalized = {w_name: w["min_eig_normalized"] for w_name, w in zip(named, windows)}
    verdict, witness = _verdict(named, normalized, tolerance, K + 1)
    even0 = named["H[p=0]"]
    odd0 = named["H[p=1]"]
    notes = [
        f"necessary conditions only: window Hankel matrices (m_(i+j+p)) for p in [{-2 * M}, {2 * M + 1}], "
        f"m_k = beta_k^2 for all integers k (bilateral moment theorem)",
    ]
    if verdict == CONSISTENT:
        notes.append("all windows positive semidefinite; this does not prove subnormality")
    return MomentCertificate(
        kind="bilateral",
        order=K,
        tolerance=tolerance,
        support_bound=sup * sup,
        support_bound_exact=sup_exact,
        moments=tuple(float(x) for x in m),
        moment_offset=lo,
        min_eig_H=_psd_summary(even0)[0],
        min_eig_H1=_psd_summary(odd0)[0],
        min_eig_HB=min(w["min_eig"] for w in windows),
        normalized_min_eigs=normalized,
        verdict=verdict,
        witness=witness,
        leading_minors={"H[p=0]": _leading_dets(even0)},
        necessary_only=True,
        windows=tuple(windows),
        notes=tuple(notes),
    )


# --- atoms -------------------------------------------------------------------------


def jacobi_from_moments(m: np.ndarray, q: int, rtol: float = 1e-13) -> tuple[np.ndarray, np.ndarray, int]:
    """Recurrence coefficients from ordinary moments (Chebyshev algorithm).

    Returns ``(alpha, beta, q_used)``: ``alpha`` has ``q_used`` entries,
    ``beta[0] = m_0`` and ``beta[k]`` (k >= 1) are the squared off-diagonal
    entries.  Stops early when the measure turns out to have fewer than
    ``q`` points of support to working precision.
    """
    m = np.asarray(m, dtype=float)
    if len(m) < 2 * q:
        raise ValueError(f"need {2 * q} moments, have {len(m)}")
    alpha = np.zeros(q)
    beta = np.zeros(q)
    prev = np.zeros(2 * q)
    cur = m[: 2 * q].copy()
    alpha[0] = m[1] / m[0]
    beta[0] = m[0]
    scale = np.abs(m[: 2 * q]).max()
    for k in range(1, q):
        nxt = np.zeros(2 * q)
        for l in range(k, 2 * q - k):
            nxt[l] = cur[l + 1] - alpha[k - 1] * cur[l] - beta[k - 1] * prev[l]
        if not nxt[k] > rtol * scale:
            return alpha[:k], beta[:k], k
        alpha[k] = nxt[k + 1] / nxt[k] - cur[k] / cur[k - 1]
        beta[k] = nxt[k] / cur[k - 1]
        prev, cur = cur, nxt
    return alpha, beta, q


def gauss_rule(alpha: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the Gauss rule of a Jacobi matrix (Golub-Welsch)."""
    from scipy.linalg import eigh_tridiagonal

    nodes, vecs = eigh_tridiagonal(alpha, np.sqrt(beta[1:]))
    return nodes, beta[0] * vecs[0, :] ** 2


def reconstruct_atoms(cert: MomentCertificate, atoms: int) -> AtomicMeasure:
    if cert.verdict != CONSISTENT:
        raise ValueError(f"reconstruct_atoms needs a consistent_subnormal certificate, got {cert.verdict}")
    if cert.kind != "unilateral":
        raise ValueError("reconstruct_atoms needs a unilateral certificate")
    m = np.asarray(cert.moments)
    if atoms < 1 or 2 * atoms > len(m):
        raise ValueError(f"{atoms} atoms need {2 * atoms} moments, certificate has {len(m)}")
    alpha, beta, q = jacobi_from_moments(m, atoms)
    notes = []
    if q < atoms:
        notes.append(f"moment matrix is singular beyond order {q}; returned {q} atoms")
    s, w = gauss_rule(alpha, beta)
    s = np.clip(s, 0.0, None)
    k = np.arange(2 * q)
    rebuilt = (w[None, :] * s[None, :] ** k[:, None]).sum(axis=1)
    err = float(np.max(np.abs(rebuilt - m[: 2 * q]) / np.maximum(np.abs(m[: 2 * q]), 1e-300)))
    order = np.argsort(s)
    t = np.sqrt(s[order])
    return AtomicMeasure(
        atoms=tuple((float(a), float(b)) for a, b in zip(t, w[order])),
        order=q,
        moment_error=err,
        notes=tuple(notes),
    )


def log_convexity_holds(moments: np.ndarray, upto: int, rtol: float = 1e-12) -> bool:
    """``m_n^2 <= m_(n-1) m_(n+1)`` for ``1 <= n <= upto``, i.e. ``beta_n^2 <= beta_(n-1) beta_(n+1)``."""
    m = np.asarray(moments)
    return all(m[n] ** 2 <= m[n - 1] * m[n + 1] * (1 + rtol) for n in range(1, upto + 1))
