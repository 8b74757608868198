"""Acceptance gate: ten end-to-end criteria with their tolerances and time limits.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

from __future__ import annotations

import cmath
import json
import math
import time
from fractions import Fraction

import numpy as np

from conftest import bilateral, record_acceptance, unilateral
from wshift.bpe import bpe_regions
from wshift.cli import main
from wshift.moments import (
    CONSISTENT,
    NOT_SUBNORMAL,
    berger_hausdorff_test,
    classify_normal_hyponormal,
    reconstruct_atoms,
)
from wshift.oracle import (
    adjoint_eigen_residual,
    adjoint_residual_bound,
    grid_probe,
    hyponormal_not_subnormal_witness,
    reproducing_check,
)
from wshift.radii import estimate_radii
from wshift.regions import RadialRegion
from wshift.spectra import check_picture_consistency, spectral_picture
from wshift.weights import TailRule, weight_extreme


class Gate:
    """Collects the failures of one criterion and enforces its time limit."""

    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit
        self.failures: list[str] = []

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc is not None:
            self.failures.append(f"raised {exc_type.__name__}: {exc}")
        if elapsed >= self.limit:
            self.failures.append(f"took {elapsed:.2f} s, limit {self.limit:g} s")
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures) if self.failures else f"{elapsed:.2f} s"
        record_acceptance(f"{status} criterion {self.number:2d} ({self.title}): {detail}")
        if exc is None:
            assert not self.failures, self.failures
        return False


def test_criterion_01_hyponormal_witness_values(capsys):
    with Gate(1, "S* + 2S witness 89 vs 80", 1.0) as g:
        w = hyponormal_not_subnormal_witness()
        g.check(abs(w["norm_adjoint_sq"] - 89) <= 1e-12, f"||T*^2 x||^2 = {w['norm_adjoint_sq']}")
        g.check(abs(w["norm_sq"] - 80) <= 1e-12, f"||T^2 x||^2 = {w['norm_sq']}")
        # integer band arithmetic keeps the values exact
        g.check(w["norm_adjoint_sq"] == 89 and w["norm_sq"] == 80, "values are not exact integers")
        rc = main(["verify-paper"])
        out = capsys.readouterr().out
        g.check(rc == 0, f"verify-paper exit {rc}")
        g.check(out.splitlines()[0].startswith("PASS"), "witness line is not PASS")


def test_criterion_02_factorial_run_counterexample(tmp_path, capsys):
    out = tmp_path / "williams.json"
    with Gate(2, "factorial-run shift r1 < r2", 5.0) as g:
        rc = main(["counterexample", "--factorial-max", "6", "--out", str(out)])
        g.check(rc == 0, f"exit {rc}")
        doc = json.loads(out.read_text())
        g.check(doc["radii"]["r1"] <= 1e-6, f"r1 = {doc['radii']['r1']}")
        g.check(abs(doc["radii"]["r2"] - 1.0) <= 1e-9, f"r2 = {doc['radii']['r2']}")
        Ba = RadialRegion.from_dict(doc["bpe"]["Ba"])
        gap = RadialRegion.from_dict(doc["bpe"]["gamma_minus_ap"])
        g.check(Ba.same_set(RadialRegion.disc(1.0, "excluded")), f"B_a = {Ba.describe()}")
        g.check(gap.is_empty, f"Gamma minus sigma_ap = {gap.describe()}")
        g.check(all(c["pass"] for c in doc["checks"]), "a recorded check failed")


def test_criterion_03_unitary_bilateral_shift(bilateral_shift):
    with Gate(3, "unitary bilateral shift picture", 1.0) as g:
        pic = spectral_picture(estimate_radii(bilateral_shift))
        circle = RadialRegion.circle(1.0)
        g.check(pic.spectrum.same_set(circle), f"spectrum {pic.spectrum.describe()}")
        g.check(pic.approx_point.same_set(circle), f"approx point {pic.approx_point.describe()}")
        g.check(pic.point.is_empty, f"point {pic.point.describe()}")
        g.check(pic.point_adjoint.is_empty, f"point adjoint {pic.point_adjoint.describe()}")


def test_criterion_04_bergman_positive_case(bergman):
    with Gate(4, "bergman Berger certificate K = 8", 1.0) as g:
        cert = berger_hausdorff_test(bergman, 8)
        g.check(cert.verdict == CONSISTENT, f"verdict {cert.verdict}")
        for name in ("min_eig_H", "min_eig_H1", "min_eig_HB"):
            v = getattr(cert, name)
            g.check(v >= -1e-10, f"{name} = {v}")
        # int_0^1 t^(2k) 2t dt = 1/(k+1), integrated in closed form
        oracle = [Fraction(2, 2 * k + 2) for k in range(len(cert.moments))]
        err = max(abs(m - float(o)) for m, o in zip(cert.moments, oracle))
        g.check(err <= 1e-12, f"moment error {err}")


def _det3(a):
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def test_criterion_05_berger_negative_case():
    spec = unilateral(TailRule.constant(3.0), prefix=[1.0, 2.0, 3.0])
    with Gate(5, "[1,2,3] + constant 3 is hyponormal, not subnormal", 1.0) as g:
        flags = classify_normal_hyponormal(spec)
        g.check(flags["hyponormal"], "not reported hyponormal")
        cert = berger_hausdorff_test(spec, 2)
        g.check(cert.verdict == NOT_SUBNORMAL, f"verdict {cert.verdict}")
        # moments from the weights by exact integer products, then cofactor expansion
        w = [1, 2, 3, 3, 3]
        beta2 = [1]
        for x in w:
            beta2.append(beta2[-1] * x * x)
        oracle = _det3([[beta2[i + j] for j in range(3)] for i in range(3)])
        g.check(oracle == -100, f"oracle determinant {oracle}")
        det = cert.leading_minors["H"][2]
        g.check(abs(det - oracle) <= 1e-9, f"order-3 Hankel determinant {det!r}")
        g.check(cert.witness is not None and cert.witness["failing"].get("H") == 3, f"witness {cert.witness}")


def test_criterion_06_oracle_grid_agreement(shift, bilateral_shift, bergman):
    with Gate(6, "8x16 grid probes at N = 400 agree with sigma_ap", 60.0) as g:
        for spec in (shift, bilateral_shift, bergman):
            pic = spectral_picture(estimate_radii(spec))
            res = grid_probe(spec, pic, 8, 16, 400)
            g.check(res.counted > 0, f"{spec.name}: no counted points")
            g.check(res.agreement >= 0.95, f"{spec.name}: agreement {res.agreement:.3f}")


def test_criterion_07_reproducing_kernel(bergman):
    rng = np.random.default_rng(7)
    radii = estimate_radii(bergman)
    with Gate(7, "reproducing kernel on bergman, 50 pairs", 5.0) as g:
        worst = 0.0
        for _ in range(50):
            deg = int(rng.integers(0, 21))
            coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            lam = 0.9 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            p_lam = np.polynomial.polynomial.polyval(lam, coeffs)
            err = reproducing_check(bergman, coeffs, lam, 64, radii=radii)
            worst = max(worst, err / (1 + abs(p_lam)))
        g.check(worst <= 1e-8, f"worst relative error {worst:.3e}")


def random_structured_spec(rng):
    def tail():
        if rng.uniform() < 0.5:
            return TailRule.constant(float(rng.uniform(0.2, 3.0)))
        return TailRule.periodic([float(v) for v in rng.uniform(0.2, 3.0, size=int(rng.integers(1, 5)))])

    def prefix():
        return [float(v) for v in rng.uniform(0.1, 4.0, size=int(rng.integers(0, 6)))]

    if rng.uniform() < 0.5:
        return unilateral(tail(), prefix())
    return bilateral(tail(), tail(), prefix(), prefix())


def test_criterion_08_property_suites():
    rng = np.random.default_rng(8)
    with Gate(8, "radii chains and picture consistency on 100 specs", 30.0) as g:
        for i in range(100):
            spec = random_structured_spec(rng)
            radii = estimate_radii(spec)
            for v in radii.chain_violations():
                g.check(False, f"spec {i}: {v}")
            sup, _ = weight_extreme(spec, "sup")
            r = max(radii.r_plus, radii.r_minus) if spec.bilateral else radii.r
            g.check(r <= sup * (1 + 1e-12), f"spec {i}: spectral radius {r} above sup weight {sup}")
            pic = spectral_picture(radii)
            for v in check_picture_consistency(pic):
                g.check(False, f"spec {i}: {v}")
            if spec.bilateral:
                g.check(pic.point.is_empty or pic.point_adjoint.is_empty, f"spec {i}: both point spectra nonempty")
            else:
                bpe = bpe_regions(radii, pic)
                g.check(bpe.Ba.contains(bpe.gamma_minus_ap), f"spec {i}: Gamma minus sigma_ap not inside B_a")


def test_criterion_09_adjoint_eigenvectors(bergman):
    rng = np.random.default_rng(9)
    with Gate(9, "adjoint eigenvector residuals on 20 pairs", 5.0) as g:
        for i in range(20):
            spec = bergman if i % 4 == 0 else random_structured_spec(rng)
            while spec.bilateral:
                spec = random_structured_spec(rng)
            radii = estimate_radii(spec)
            lam = 0.8 * radii.r2 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            N = int(rng.integers(8, 80))
            res = adjoint_eigen_residual(spec, lam, N, radii=radii)
            bound = adjoint_residual_bound(spec, lam, N)
            g.check(res <= bound, f"pair {i}: residual {res:.3e} above bound {bound:.3e}")


def atomic_spec(t, w, length):
    """Unilateral spec whose first ``length`` weights come from the moments of ``sum w_i delta_(t_i)``."""
    t, w = np.asarray(t), np.asarray(w)
    m = np.array([np.sum(w * t ** (2 * k)) for k in range(length + 1)])
    weights = np.sqrt(m[1:] / m[:-1])
    return unilateral(TailRule.constant(float(t.max())), [float(x) for x in weights])


def test_criterion_10_moment_round_trip():
    rng = np.random.default_rng(10)
    with Gate(10, "atomic measures through the Berger test and back", 10.0) as g:
        for i in range(20):
            q = int(rng.integers(2, 5))
            while True:
                t = np.sort(rng.uniform(0.2, 1.5, size=q))
                if np.min(np.diff(t)) > 0.15:
                    break
            w = rng.uniform(0.2, 1.0, size=q)
            w /= w.sum()
            spec = atomic_spec(t, w, 24)
            cert = berger_hausdorff_test(spec, 8)
            g.check(cert.verdict == CONSISTENT, f"measure {i}: verdict {cert.verdict}")
            if cert.verdict != CONSISTENT:
                continue
            got = reconstruct_atoms(cert, q)
            err = float(np.max(np.abs(got.locations - t))) if len(got.atoms) == q else math.inf
            g.check(err <= 1e-6, f"measure {i}: location error {err:.3e}")

