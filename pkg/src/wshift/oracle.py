"""Independent numerical checks: banded operator arithmetic and truncation probes.

Vectors are finitely supported and stored as ``{index: coefficient}``
dicts.  With integer coefficients and integer band rules all arithmetic is
exact.

The truncation probe restricts ``T - lam`` to the span of finitely many basis
vectors but keeps the full range, so the restricted matrix is rectangular and
exact on its domain.  Its smallest singular value bounds ``m(T - lam)`` from
above and decreases as the domain grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np

from .bpe import kernel_coefficients, pair_with_kernel, powers_over_beta
from .errors import BudgetError, OutsideDiscError
from .radii import RadiiReport, estimate_radii
from .regions import BOUNDARY_UNKNOWN, INSIDE, OUTSIDE
from .spectra import SpectralPicture
from .weights import DEFAULT_WINDOW, WeightSpec, ensure_unilateral, weight_extreme

Number = complex
Vector = dict[int, Number]
Rule = Callable[[int], Number]

MAX_DIM = 1_000_000
EIG_TOL = 1e-12
TAU_FLOOR = 1e-4
EDGE_BAND = 0.05


# --- banded operators ---------------------------------------------------------------


@dataclass(frozen=True)
class BandedOperator:
    """``result[n + d] += bands[d](n) * x[n]`` over all bands ``d``."""

    bands: Mapping[int, Rule]
    kind: str = "unilateral"
    description: str = ""

    def apply(self, x: Mapping[int, Number]) -> Vector:
        out: Vector = {}
        for n, xn in x.items():
            if xn == 0:
                continue
            if self.kind == "unilateral" and n < 0:
                raise ValueError(f"unilateral operator applied to a vector with index {n}")
            for d, rule in self.bands.items():
                m = n + d
                if self.kind == "unilateral" and m < 0:
                    continue
                c = rule(n)
                if c == 0:
                    continue
                out[m] = out.get(m, 0) + c * xn
        return {k: v for k, v in out.items() if v != 0}

    def __call__(self, x: Mapping[int, Number]) -> Vector:
        return self.apply(x)

    def __add__(self, other: "BandedOperator") -> "BandedOperator":
        _same_kind(self, other)
        bands: dict[int, Rule] = dict(self.bands)
        for d, rule in other.bands.items():
            if d in bands:
                mine = bands[d]
                bands[d] = lambda n, a=mine, b=rule: a(n) + b(n)
            else:
                bands[d] = rule
        return BandedOperator(bands, self.kind, f"({self.description} + {other.description})")

    def scale(self, c: Number) -> "BandedOperator":
        return BandedOperator(
            {d: (lambda n, r=rule: c * r(n)) for d, rule in self.bands.items()},
            self.kind,
            f"{c}*{self.description}",
        )

    def __rmul__(self, c: Number) -> "BandedOperator":
        return self.scale(c)

    def __matmul__(self, other: "BandedOperator") -> "BandedOperator":
        """Composition ``self o other``."""
        _same_kind(self, other)
        uni = self.kind == "unilateral"
        bands: dict[int, list[Rule]] = {}
        for dA, rA in self.bands.items():
            for dB, rB in other.bands.items():
                def rule(n, rA=rA, rB=rB, dB=dB):
                    if uni and n + dB < 0:
                        return 0
                    return rA(n + dB) * rB(n)

                bands.setdefault(dA + dB, []).append(rule)
        merged = {d: (lambda n, rs=rs: sum(r(n) for r in rs)) for d, rs in bands.items()}
        return BandedOperator(merged, self.kind, f"{self.description}{other.description}")

    def adjoint(self) -> "BandedOperator":
        uni = self.kind == "unilateral"

        def make(d: int, rule: Rule) -> Rule:
            def adj(m: int) -> Number:
                src = m - d
                if uni and src < 0:
                    return 0
                return _conj(rule(src))

            return adj

        return BandedOperator({-d: make(d, r) for d, r in self.bands.items()}, self.kind, f"{self.description}*")


def _conj(c: Number) -> Number:
    return c.conjugate() if isinstance(c, complex) else c


def _same_kind(a: BandedOperator, b: BandedOperator) -> None:
    if a.kind != b.kind:
        raise ValueError("cannot combine unilateral and bilateral operators")


def shift_operator(spec: WeightSpec) -> BandedOperator:
    return BandedOperator({1: spec.weight_at}, spec.kind, spec.name or "T")


def unweighted_shift(kind: str = "unilateral") -> BandedOperator:
    return BandedOperator({1: lambda n: 1}, kind, "S")


def identity(kind: str = "unilateral") -> BandedOperator:
    return BandedOperator({0: lambda n: 1}, kind, "I")


def banded_apply(op: BandedOperator, x: Mapping[int, Number]) -> Vector:
    return op.apply(x)


def norm_sq(x: Mapping[int, Number]) -> float:
    return sum(abs(v) ** 2 for v in x.values())


def basis(n: int, c: Number = 1) -> Vector:
    return {n: c}


def combine(*terms: tuple[Number, Mapping[int, Number]]) -> Vector:
    out: Vector = {}
    for c, x in terms:
        for k, v in x.items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v != 0}


def hyponormal_not_subnormal_witness(op: Optional[BandedOperator] = None,
                                     x: Optional[Mapping[int, Number]] = None,
                                     tol: float = 1e-12) -> dict[str, Any]:
    """``||T*^2 x||^2`` against ``||T^2 x||^2`` for ``T = S* + 2S``, ``x = e_0 - 2e_2``.

    A subnormal operator satisfies ``||T*^k x|| <= ||T^k x||``; here the
    adjoint side is larger (89 > 80) although ``T`` is hyponormal.
    """
    S = unweighted_shift()
    T = op if op is not None else S.adjoint() + S.scale(2)
    x = dict(x) if x is not None else {0: 1, 2: -2}
    Ts = T.adjoint()
    t2 = T.apply(T.apply(x))
    a2 = Ts.apply(Ts.apply(x))
    adj_sq, sq = norm_sq(a2), norm_sq(t2)
    return {
        "norm_adjoint_sq": adj_sq,
        "norm_sq": sq,
        "T2x": dict(sorted(t2.items())),
        "Tstar2x": dict(sorted(a2.items())),
        "pass": abs(adj_sq - 89) <= tol and abs(sq - 80) <= tol,
    }


# --- truncation probes -----------------------------------------------------------------


@dataclass(frozen=True)
class TruncationProbe:
    lam: complex
    N: int
    sigma_min: float
    predicted: Optional[str] = None
    verdict: Optional[str] = None
    agrees: Optional[bool] = None
    threshold: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": [self.lam.real, self.lam.imag],
            "N": self.N,
            "sigma_min": self.sigma_min,
            "predicted": self.predicted,
            "verdict": self.verdict,
            "agrees": self.agrees,
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "TruncationProbe":
        return cls(
            lam=complex(*d["lambda"]),
            N=d["N"],
            sigma_min=d["sigma_min"],
            predicted=d.get("predicted"),
            verdict=d.get("verdict"),
            agrees=d.get("agrees"),
            threshold=d.get("threshold"),
        )


def _check_dim(N: int) -> None:
    if N < 8:
        raise ValueError(f"dimension must be at least 8, got {N}")
    if N > MAX_DIM:
        raise BudgetError(f"dimension {N} exceeds the budget of {MAX_DIM}")


def _domain_weights(spec: WeightSpec, N: int) -> np.ndarray:
    """Squared weights of the domain columns: e_0..e_(N-1), or e_(-N)..e_N."""
    if spec.bilateral:
        return np.exp(2 * spec.log_weights(-N, N + 1))
    return np.exp(2 * spec.log_weights(0, N))


def sturm_count(diag: np.ndarray, off_sq: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Eigenvalues below ``x`` of symmetric tridiagonal matrices (batched).

    ``diag`` is ``(batch, n)``, ``off_sq`` holds squared off-diagonals
    ``(batch, n-1)``, ``x`` is ``(batch,)``.
    """
    n = diag.shape[1]
    tiny = np.finfo(float).tiny
    q = diag[:, 0] - x
    q = np.where(q == 0, -tiny, q)
    count = (q < 0).astype(int)
    for i in range(1, n):
        q = diag[:, i] - x - off_sq[:, i - 1] / q
        q = np.where(q == 0, -tiny, q)
        count += q < 0
    return count


def smallest_gram_eig(w2: np.ndarray, abs_lams: np.ndarray, tol: float = EIG_TOL) -> np.ndarray:
    """Smallest eigenvalue of the Gram matrix of ``T - lam`` on the domain, per ``|lam|``.

    The Gram matrix is tridiagonal with diagonal ``|lam|^2 + w_n^2`` and
    off-diagonal entries of modulus ``w_n |lam|``; a diagonal unitary makes it
    real, so Sturm bisection applies directly.
    """
    a2 = np.asarray(abs_lams, dtype=float)[:, None] ** 2
    diag = a2 + w2[None, :]
    off_sq = a2 * w2[None, :-1]
    lo = np.zeros(len(abs_lams))
    hi = diag.min(axis=1)
    floor = 4 * np.finfo(float).eps * diag.max(axis=1)
    for _ in range(200):
        width = hi - lo
        # run to working precision; this is always below ``tol``
        active = (width > floor) | (width > tol)
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        below = sturm_count(diag, off_sq, mid) >= 1
        hi = np.where(active & below, mid, hi)
        lo = np.where(active & ~below, mid, lo)
    return 0.5 * (lo + hi)


def sigma_min_batch(spec: WeightSpec, lams: Sequence[complex], N: int) -> np.ndarray:
    _check_dim(N)
    w2 = _domain_weights(spec, N)
    abs_lams = np.abs(np.asarray(lams, dtype=complex))
    uniq, inv = np.unique(abs_lams, return_inverse=True)
    return np.sqrt(np.maximum(smallest_gram_eig(w2, uniq), 0.0))[inv]


def sigma_min_truncation(spec: WeightSpec, lam: complex, N: int) -> TruncationProbe:
    return TruncationProbe(complex(lam), N, float(sigma_min_batch(spec, [lam], N)[0]))


def truncation_matrix(spec: WeightSpec, lam: complex, N: int) -> np.ndarray:
    """Dense rectangular restriction of ``T - lam`` (for brute-force checks)."""
    _check_dim(N)
    w = np.sqrt(_domain_weights(spec, N))
    cols = len(w)
    A = np.zeros((cols + 1, cols), dtype=complex)
    idx = np.arange(cols)
    A[idx, idx] = -lam
    A[idx + 1, idx] = w
    return A


def _outer_radius(picture: SpectralPicture) -> float:
    radii = [rho for _, rho in picture.spectrum.bounding_circles()]
    return max(radii, default=0.0)


def reference_threshold(spec: WeightSpec, picture: SpectralPicture, N: int) -> float:
    """A tenth of sigma_min at ``|lam| = 2 r`` (outside the spectrum), floored."""
    r = _outer_radius(picture) or 1.0
    ref = float(sigma_min_batch(spec, [2.0 * r], N)[0])
    return max(ref / 10.0, TAU_FLOOR)


def ap_membership_probe(spec: WeightSpec, lam: complex, N: int, picture: SpectralPicture,
                        threshold: Optional[float] = None) -> TruncationProbe:
    tau = threshold if threshold is not None else reference_threshold(spec, picture, N)
    return probe_points(spec, [lam], N, picture, tau)[0]


def probe_points(spec: WeightSpec, lams: Sequence[complex], N: int, picture: SpectralPicture,
                 tau: float) -> list[TruncationProbe]:
    sig = sigma_min_batch(spec, lams, N)
    out = []
    for lam, s in zip(lams, sig):
        predicted = picture.approx_point.membership(lam)
        verdict = INSIDE if s < tau else OUTSIDE
        agrees = True if predicted == BOUNDARY_UNKNOWN else verdict == predicted
        out.append(TruncationProbe(complex(lam), N, float(s), predicted, verdict, agrees, tau))
    return out


@dataclass(frozen=True)
class GridResult:
    probes: tuple[TruncationProbe, ...]
    counted: int
    agreeing: int
    excluded: int
    threshold: float

    @property
    def agreement(self) -> float:
        return self.agreeing / self.counted if self.counted else 1.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "counted": self.counted,
            "agreeing": self.agreeing,
            "excluded": self.excluded,
            "agreement": self.agreement,
            "threshold": self.threshold,
        }


def grid_probe(spec: WeightSpec, picture: SpectralPicture, rings: int, angles: int, N: int,
               threshold: Optional[float] = None) -> GridResult:
    """Probe a polar grid ``|lam| = 2 r (i + 1/2) / rings`` against ``approx_point``.

    Points whose modulus lies within ``0.05 r`` of an edge of the predicted
    regions, or whose membership is boundary-unknown, are probed but not
    counted.
    """
    if rings < 1 or angles < 1:
        raise ValueError("grid needs at least one ring and one angle")
    r = _outer_radius(picture) or 1.0
    tau = threshold if threshold is not None else reference_threshold(spec, picture, N)
    lams = [
        2.0 * r * (i + 0.5) / rings * complex(math.cos(2 * math.pi * j / angles), math.sin(2 * math.pi * j / angles))
        for i in range(rings)
        for j in range(angles)
    ]
    probes = probe_points(spec, lams, N, picture, tau)
    edges = [rho for _, rho in picture.approx_point.bounding_circles()]
    edges += [rho for _, rho in picture.spectrum.bounding_circles()]
    counted = agreeing = excluded = 0
    for p in probes:
        rho = abs(p.lam)
        if p.predicted == BOUNDARY_UNKNOWN or any(abs(rho - e) < EDGE_BAND * r for e in edges):
            excluded += 1
            continue
        counted += 1
        agreeing += bool(p.agrees)
    return GridResult(tuple(probes), counted, agreeing, excluded, tau)


# --- eigenvector and kernel checks ---------------------------------------------------------


def _require_r2(spec: WeightSpec, lam: complex, radii: Optional[RadiiReport], factor: float = 1.0) -> RadiiReport:
    radii = radii or estimate_radii(spec)
    limit = factor * radii.r2
    inside = abs(lam) < limit if factor == 1.0 else abs(lam) <= limit
    if not inside:
        raise OutsideDiscError(f"|lambda| = {abs(lam):.6g} is outside the allowed disc of radius {limit:.6g}")
    return radii


def adjoint_eigenvector(spec: WeightSpec, lam: complex, N: int) -> Vector:
    """``x_N = sum_{n<N} lam^n / beta_n e_n``."""
    vals = powers_over_beta(spec, lam, N)
    return {n: complex(v) for n, v in enumerate(vals) if v != 0}


def adjoint_eigen_residual(spec: WeightSpec, lam: complex, N: int,
                           radii: Optional[RadiiReport] = None) -> float:
    """``||T* x_N - lam x_N|| / ||x_N||``; only the last coordinate survives."""
    ensure_unilateral(spec, "adjoint_eigen_residual")
    _require_r2(spec, lam, radii)
    if N < 1 or N > MAX_DIM:
        raise BudgetError(f"length {N} outside [1, {MAX_DIM}]")
    x = adjoint_eigenvector(spec, lam, N)
    Ts = shift_operator(spec).adjoint()
    r = combine((1, Ts.apply(x)), (-complex(lam), x))
    return math.sqrt(norm_sq(r) / norm_sq(x))


def adjoint_residual_bound(spec: WeightSpec, lam: complex, N: int, window: int = DEFAULT_WINDOW) -> float:
    """``|lam|^N / beta_N * sup w / ||x_N||`` plus a floating-point floor.

    The first term is the dropped tail coefficient and bounds the exact
    residual.  The computed residual also carries the rounding of
    ``w_(n-1) a_n - lam a_(n-1)`` in every coordinate; each ``a_n`` comes
    from ``exp(n log|lam| - log beta_n)`` and inherits a relative error of
    about ``eps * |n log|lam| - log beta_n|``.
    """
    if lam == 0:
        return 0.0
    eps = np.finfo(float).eps
    x = adjoint_eigenvector(spec, lam, N)
    sup, _ = weight_extreme(spec, "sup", window)
    n = np.arange(N + 1)
    exps = n * math.log(abs(lam)) - spec.log_beta_cache.positive(N)
    term = math.exp(exps[N]) * sup / math.sqrt(norm_sq(x))
    floor = 16 * eps * (abs(lam) + sup) * (1.0 + float(np.abs(exps[:N]).max()))
    return term * (1 + 64 * eps) + floor


def polynomial_of_operator(op: BandedOperator, coeffs: Sequence[Number], x: Mapping[int, Number]) -> Vector:
    """``p(T) x`` by Horner's rule, ``p(z) = sum coeffs[k] z^k``."""
    y: Vector = {}
    for c in reversed(list(coeffs)):
        y = combine((1, op.apply(y)), (c, x))
    return y


def reproducing_check(spec: WeightSpec, coeffs: Sequence[Number], lam: complex, N: int,
                      radii: Optional[RadiiReport] = None) -> float:
    """``|<p(T) e_0, k_lam> - p(lam)|``."""
    ensure_unilateral(spec, "reproducing_check")
    radii = _require_r2(spec, lam, radii, factor=0.9)
    if len(coeffs) > N:
        raise BudgetError(f"degree {len(coeffs) - 1} does not fit a truncation of length {N}")
    y = polynomial_of_operator(shift_operator(spec), coeffs, {0: 1})
    kernel = kernel_coefficients(spec, lam, N, radii=radii)
    vec = np.zeros(N, dtype=complex)
    for n, v in y.items():
        vec[n] = v
    pairing = pair_with_kernel(vec, kernel)
    p_lam = sum(complex(c) * complex(lam) ** k for k, c in enumerate(coeffs))
    return abs(pairing - p_lam)
