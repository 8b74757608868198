"""Registry tying each public operation to the results it implements or checks.

``generate_theorem_index`` renders the registry as a markdown table and
refuses to do so when the registry and the list of public operations
disagree, or when an operation no longer resolves to a callable.
"""

from __future__ import annotations

import importlib

from .errors import RegistryError

# operation name -> "module:attribute"
PUBLIC_OPERATIONS: dict[str, str] = {
    "parse_weight_spec": "wshift.weights:parse_weight_spec",
    "weight_at": "wshift.weights:weight_at",
    "log_beta": "wshift.weights:log_beta",
    "estimate_radii": "wshift.radii:estimate_radii",
    "exact_tail_radius": "wshift.radii:exact_tail_radius",
    "bilateral_invertible": "wshift.radii:bilateral_invertible",
    "membership": "wshift.regions:membership",
    "contains_region": "wshift.regions:contains_region",
    "boundary_samples": "wshift.regions:boundary_samples",
    "spectral_picture": "wshift.spectra:spectral_picture",
    "check_picture_consistency": "wshift.spectra:check_picture_consistency",
    "classify_normal_hyponormal": "wshift.moments:classify_normal_hyponormal",
    "berger_hausdorff_test": "wshift.moments:berger_hausdorff_test",
    "bilateral_moment_test": "wshift.moments:bilateral_moment_test",
    "reconstruct_atoms": "wshift.moments:reconstruct_atoms",
    "bpe_regions": "wshift.bpe:bpe_regions",
    "kernel_coefficients": "wshift.bpe:kernel_coefficients",
    "hhat_eval": "wshift.bpe:hhat_eval",
    "local_spectrum_report": "wshift.bpe:local_spectrum_report",
    "banded_apply": "wshift.oracle:banded_apply",
    "hyponormal_not_subnormal_witness": "wshift.oracle:hyponormal_not_subnormal_witness",
    "sigma_min_truncation": "wshift.oracle:sigma_min_truncation",
    "ap_membership_probe": "wshift.oracle:ap_membership_probe",
    "adjoint_eigen_residual": "wshift.oracle:adjoint_eigen_residual",
    "reproducing_check": "wshift.oracle:reproducing_check",
    "cmd_analyze": "wshift.cli:cmd_analyze",
    "cmd_classify": "wshift.cli:cmd_classify",
    "cmd_oracle": "wshift.cli:cmd_oracle",
    "cmd_counterexample": "wshift.cli:cmd_counterexample",
    "cmd_verify_paper": "wshift.cli:cmd_verify_paper",
    "generate_theorem_index": "wshift.theorems:generate_theorem_index",
}

REGISTRY: dict[str, list[str]] = {
    "parse_weight_spec": ["weighted shift definition (nonzero weights)", "artifact plumbing"],
    "weight_at": ["weighted shift definition: T e_n = w_n e_(n+1)"],
    "log_beta": ["beta sequence: beta_0 = 1, products of weights, reciprocal products for n < 0"],
    "estimate_radii": [
        "r1 as a limit of window infima",
        "unilateral approximate point spectrum theorem",
        "Ridge's theorem (bilateral radii r^+-, r_i^+-)",
        "norm formula ||T^n|| = sup_k w_k ... w_(n+k-1)",
    ],
    "exact_tail_radius": ["artifact plumbing (closed forms for structured tails)"],
    "bilateral_invertible": ["bilateral shift invertible iff weights bounded below"],
    "membership": ["circular symmetry of shift spectra"],
    "contains_region": ["circular symmetry of shift spectra", "artifact plumbing"],
    "boundary_samples": ["artifact plumbing (plot data)"],
    "spectral_picture": [
        "unilateral spectrum theorem",
        "bilateral spectrum theorem",
        "unilateral approximate point spectrum theorem",
        "Ridge's theorem",
        "unilateral point spectrum theorem (sigma_p(T) empty, sigma_p(T*) disc of radius r2)",
        "bilateral point spectrum theorem",
    ],
    "check_picture_consistency": [
        "boundary of the spectrum lies in the approximate point spectrum",
        "sigma_ap contained in r1 <= |z| <= r",
        "at most one of sigma_p(T), sigma_p(T*) is nonempty for bilateral shifts",
    ],
    "classify_normal_hyponormal": [
        "no unilateral shift is normal; bilateral shifts are normal iff weights are constant",
        "hyponormal shifts are those with nondecreasing weights",
    ],
    "berger_hausdorff_test": ["Berger's theorem", "log-convexity beta_n^2 <= beta_(n-1) beta_(n+1)"],
    "bilateral_moment_test": ["bilateral moment characterization of subnormal shifts"],
    "reconstruct_atoms": ["Berger's theorem (representing measure)", "artifact plumbing"],
    "bpe_regions": [
        "B(T) = Gamma(T) for cyclic operators",
        "Gamma(T) is the conjugate of sigma_p(T*)",
        "Gamma(T) minus sigma_ap(T) lies in B_a(T) (Williams)",
        "B_a(S) is the open disc of radius r2",
        "factorial-run counterexample with r1 < r2",
    ],
    "kernel_coefficients": ["B_a(S) is the open disc of radius r2 (kernel vectors)"],
    "hhat_eval": ["B_a(S) is the open disc of radius r2 (hhat(z) = <h, k_z>)"],
    "local_spectrum_report": [
        "closure of B_a lies in every local spectrum",
        "fat local spectra of non-normal hyponormal weighted shifts",
        "local spectra equal the spectrum on a dense set",
    ],
    "banded_apply": ["weighted shift definition", "adjoint formula T* e_n = w_(n-1) e_(n-1), T* e_0 = 0"],
    "hyponormal_not_subnormal_witness": ["hyponormal but not subnormal: S* + 2S"],
    "sigma_min_truncation": ["approximate point spectrum via m(T - lambda) = 0", "unit-vector characterization"],
    "ap_membership_probe": ["sigma_ap contained in r1 <= |z| <= r"],
    "adjoint_eigen_residual": ["eigenvectors of T*: a_n = a_0 lambda^n / beta_n"],
    "reproducing_check": ["Riesz representation of bounded point evaluations"],
    "cmd_analyze": ["artifact plumbing"],
    "cmd_classify": ["artifact plumbing"],
    "cmd_oracle": ["artifact plumbing"],
    "cmd_counterexample": ["factorial-run counterexample with r1 < r2"],
    "cmd_verify_paper": [
        "hyponormal but not subnormal: S* + 2S",
        "unitary bilateral shift",
        "Berger's theorem",
    ],
    "generate_theorem_index": ["artifact plumbing"],
}


def check_registry(registry: dict[str, list[str]] = REGISTRY,
                   operations: dict[str, str] = PUBLIC_OPERATIONS) -> None:
    missing = [op for op in operations if op not in registry]
    if missing:
        raise RegistryError(f"operations missing from the theorem registry: {', '.join(missing)}")
    extra = [op for op in registry if op not in operations]
    if extra:
        raise RegistryError(f"registry entries without a public operation: {', '.join(extra)}")
    for op, target in operations.items():
        module, _, attr = target.partition(":")
        obj = getattr(importlib.import_module(module), attr, None)
        if not callable(obj):
            raise RegistryError(f"public operation {op} does not resolve to a callable ({target})")
        if not registry[op]:
            raise RegistryError(f"registry entry for {op} lists no result")


def generate_theorem_index(registry: dict[str, list[str]] = REGISTRY,
                           operations: dict[str, str] = PUBLIC_OPERATIONS) -> str:
    check_registry(registry, operations)
    lines = [
        "# Operation index",
        "",
        "Generated by `wshift theorem-index`; one row per public operation.",
        "",
        "| operation | location | results |",
        "|---|---|---|",
    ]
    for op, target in operations.items():
        results = "; ".join(registry[op]).replace("|", "\\|")
        lines.append(f"| `{op}` | `{target}` | {results} |")
    return "\n".join(lines) + "\n"
