"""Bounded point evaluations, reproducing kernels and local spectra of unilateral shifts.

For a unilateral shift with cyclic vector ``e_0`` every ``h = sum a_n e_n``
defines ``hhat(z) = sum a_n z^n / beta_n``.  The point evaluation at ``z``
is represented by the kernel vector ``k_z`` with ``<e_n, k_z> = z^n/beta_n``;
because the inner product is conjugate-linear in its second slot the stored
coefficients are ``conj(z)^n / beta_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .errors import BudgetError, OutsideDiscError, SpecError
from .radii import RadiiReport, estimate_radii
from .regions import EXCLUDED, INCLUDED, UNKNOWN, RadialRegion
from .spectra import SpectralPicture
from .weights import (
    BUILTIN,
    CONSTANT,
    DEFAULT_WINDOW,
    MAX_INDEX_BUDGET,
    PERIODIC,
    WeightSpec,
    ensure_unilateral,
)

GAP_TOL = 1e-6
KERNEL_MARGIN = 1e-9


@dataclass(frozen=True)
class BpeReport:
    B: RadialRegion
    Ba: RadialRegion
    gamma_minus_ap: RadialRegion
    williams_gap: bool
    notes: tuple[str, ...] = ()

    @property
    def question1_answer_negative(self) -> bool:
        return self.williams_gap

    def to_dict(self) -> dict[str, Any]:
        return {
            "B": self.B.to_dict(),
            "Ba": self.Ba.to_dict(),
            "gamma_minus_ap": self.gamma_minus_ap.to_dict(),
            "williams_gap": self.williams_gap,
            "question1_answer_negative": self.williams_gap,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "BpeReport":
        return cls(
            B=RadialRegion.from_dict(d["B"]),
            Ba=RadialRegion.from_dict(d["Ba"]),
            gamma_minus_ap=RadialRegion.from_dict(d["gamma_minus_ap"]),
            williams_gap=d["williams_gap"],
            notes=tuple(d.get("notes", ())),
        )


def bpe_regions(radii: RadiiReport, picture: SpectralPicture) -> BpeReport:
    if radii.bilateral or picture.kind != "unilateral":
        raise SpecError("bounded point evaluations are only computed for unilateral shifts")
    r1, r2 = radii.r1, radii.r2
    notes = []
    if r2 == 0:
        B = RadialRegion.origin()
        Ba = RadialRegion.empty()
        notes.append("B = {0} and B_a is empty since r2 = 0")
    else:
        B = RadialRegion.disc(r2, UNKNOWN)
        Ba = RadialRegion.disc(r2, EXCLUDED)
        notes.append(f"B: disc of radius r2 = {r2:.12g} with unknown edge; B = Gamma for cyclic shifts")
        notes.append("B_a: open disc of radius r2 (analytic bounded point evaluation theorem)")
    gamma_minus_ap = picture.compression - picture.approx_point
    notes.append(
        f"Gamma minus sigma_ap: computed as a region difference; equals the open disc of radius r1 = {r1:.12g}"
    )
    gap = (r2 - r1) > GAP_TOL + radii.convergence_gap
    if gap:
        notes.append(
            "r1 < r2: Gamma minus sigma_ap is strictly smaller than B_a, a negative answer to "
            "Williams' question whether B_a(T) = Gamma(T) minus sigma_ap(T)"
        )
    return BpeReport(B=B, Ba=Ba, gamma_minus_ap=gamma_minus_ap, williams_gap=gap, notes=tuple(notes))


# --- kernels ---------------------------------------------------------------------


def powers_over_beta(spec: WeightSpec, lam: complex, n_max: int) -> np.ndarray:
    """``lam^n / beta_n`` for ``n = 0..n_max - 1`` in log domain."""
    lam = complex(lam)
    out = np.zeros(n_max, dtype=complex)
    if n_max == 0:
        return out
    out[0] = 1.0
    if lam == 0:
        return out
    n = np.arange(n_max)
    L = spec.log_beta_cache.positive(n_max - 1)
    mag = np.exp(n * math.log(abs(lam)) - L)
    return mag * np.exp(1j * n * math.atan2(lam.imag, lam.real))


@dataclass(frozen=True)
class KernelVector:
    lam: complex
    N: int
    coefficients: np.ndarray
    tail_bound: float
    notes: tuple[str, ...] = ()


def _inf_weight_beyond(spec: WeightSpec, N: int, window: int) -> tuple[float, bool]:
    tail = spec.tail_pos
    k = len(spec.prefix_pos)
    prefix_rest = spec.prefix_pos[N:] if N < k else ()
    if tail.variant == CONSTANT:
        v, exact = tail.values[0], True
    elif tail.variant == PERIODIC:
        v, exact = min(tail.values), True
    elif tail.variant == BUILTIN and tail.builtin_entry.nondecreasing:
        v, exact = spec.weight_at(max(N, k)), True
    elif tail.variant == BUILTIN:
        v, exact = tail.builtin_entry.inf, True
    else:
        start = max(N, k)
        v, exact = float(np.exp(spec.log_weights(start, start + window).min())), False
    return min([v, *prefix_rest]), exact


def kernel_coefficients(spec: WeightSpec, lam: complex, N: int, radii: Optional[RadiiReport] = None,
                        margin: float = KERNEL_MARGIN, window: int = DEFAULT_WINDOW) -> KernelVector:
    ensure_unilateral(spec, "kernel_coefficients")
    if N < 4:
        raise ValueError("N must be at least 4")
    if N > MAX_INDEX_BUDGET:
        raise BudgetError(f"N = {N} exceeds the index budget")
    radii = radii or estimate_radii(spec, window)
    if not abs(lam) < radii.r2 - margin:
        raise OutsideDiscError(f"|lambda| = {abs(lam):.6g} is not inside the open disc of radius r2 = {radii.r2:.6g}")
    vals = powers_over_beta(spec, lam, N + 1)
    coeffs = np.conj(vals[:N])
    notes = []
    if lam == 0:
        bound = 0.0
    else:
        inf_w, exact = _inf_weight_beyond(spec, N, window)
        ratio = abs(lam) ** 2 / inf_w**2
        first = abs(vals[N]) ** 2
        bound = first / (1.0 - ratio) if ratio < 1 else math.inf
        if not exact:
            notes.append("tail bound uses the inf of probed weights of an expression tail")
        if math.isinf(bound):
            notes.append("|lambda| exceeds the inf of the remaining weights; no geometric majorant")
    return KernelVector(complex(lam), N, coeffs, bound, tuple(notes))


def hhat_eval(spec: WeightSpec, h: Sequence[complex], lam: complex) -> complex:
    """``sum a_n lam^n / beta_n`` over the (finite) support of ``h``."""
    ensure_unilateral(spec, "hhat_eval")
    a = np.asarray(h, dtype=complex)
    if a.size == 0:
        return 0j
    return complex(np.sum(a * powers_over_beta(spec, lam, a.size)))


def pair_with_kernel(h: Sequence[complex], kernel: KernelVector) -> complex:
    """``<h, k_lam> = sum a_n conj(c_n)`` over the first ``kernel.N`` coordinates."""
    a = np.asarray(h, dtype=complex)
    if a.size > kernel.N:
        raise ValueError("vector support exceeds the kernel truncation")
    return complex(np.sum(a * np.conj(kernel.coefficients[: a.size])))


# --- local spectra -----------------------------------------------------------------


@dataclass(frozen=True)
class LocalSpectrumReport:
    vector: str
    lower_bound_region: Optional[RadialRegion]
    full_claim: Optional[RadialRegion]
    provenance: dict[str, str] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "vector": self.vector,
            "lower_bound_region": None if self.lower_bound_region is None else self.lower_bound_region.to_dict(),
            "full_claim": None if self.full_claim is None else self.full_claim.to_dict(),
            "provenance": dict(self.provenance),
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "LocalSpectrumReport":
        region = lambda x: None if x is None else RadialRegion.from_dict(x)  # noqa: E731
        return cls(
            vector=d["vector"],
            lower_bound_region=region(d["lower_bound_region"]),
            full_claim=region(d["full_claim"]),
            provenance=dict(d.get("provenance", {})),
            notes=tuple(d.get("notes", ())),
        )


def _describe_vector(h: Sequence[complex]) -> str:
    terms = []
    for n, a in enumerate(h):
        a = complex(a)
        if a == 0:
            continue
        coef = f"{a.real:g}" if a.imag == 0 else f"({a.real:g}{a.imag:+g}i)"
        terms.append(f"{coef}*e_{n}")
    return " + ".join(terms)


def local_spectrum_report(spec: WeightSpec, h: Sequence[complex], radii: RadiiReport,
                          picture: SpectralPicture, classes: Mapping[str, bool]) -> LocalSpectrumReport:
    if not any(complex(a) != 0 for a in h):
        raise ValueError("local spectrum of the zero vector is empty; pass a nonzero vector")
    provenance: dict[str, str] = {}
    notes: list[str] = []
    lower = None
    if spec.bilateral:
        notes.append(
            "bilateral shift: the analytic bounded point evaluation region is not defined here, "
            "so no lower bound is emitted"
        )
    else:
        lower = RadialRegion.disc(radii.r2, INCLUDED) if radii.r2 > 0 else RadialRegion.empty()
        provenance["lower_bound_region"] = (
            "closure of B_a (open disc of radius r2) lies in the local spectrum of every nonzero vector "
            "for an injective unilateral shift"
        )
    full = None
    if classes.get("hyponormal") and not classes.get("normal"):
        full = picture.spectrum
        provenance["full_claim"] = "non-normal hyponormal weighted shifts have fat local spectra: sigma_T(x) = sigma(T) for x != 0"
    else:
        notes.append("no full claim: the fat local spectrum theorem needs a non-normal hyponormal shift")
    return LocalSpectrumReport(
        vector=_describe_vector(h),
        lower_bound_region=lower,
        full_claim=full,
        provenance=provenance,
        notes=tuple(notes),
    )


__all__ = [
    "BpeReport",
    "KernelVector",
    "LocalSpectrumReport",
    "bpe_regions",
    "hhat_eval",
    "kernel_coefficients",
    "local_spectrum_report",
    "pair_with_kernel",
    "powers_over_beta",
]
