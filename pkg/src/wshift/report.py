"""Versioned report documents and the analysis pipeline behind the CLI."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .bpe import BpeReport, bpe_regions
from .errors import MomentOverflowError
from .moments import (
    NOT_SUBNORMAL,
    MomentCertificate,
    berger_hausdorff_test,
    bilateral_moment_test,
    classify_normal_hyponormal,
)
from .oracle import TruncationProbe
from .radii import RadiiReport, estimate_radii
from .regions import EXCLUDED, RadialRegion
from .spectra import SpectralPicture, spectral_picture
from .weights import DEFAULT_WINDOW, WeightSpec, spec_from_dict

SCHEMA_VERSION = "1"
DEFAULT_ORDER = 6

WILLIAMS_NEGATIVE = (
    "negative answer to Williams' question whether B_a(T) = Gamma(T) minus sigma_ap(T): "
    "here r1 < r2, so Gamma minus sigma_ap (radius r1) is strictly smaller than B_a (radius r2)"
)
WILLIAMS_EQUAL = (
    "Williams' question whether B_a(T) = Gamma(T) minus sigma_ap(T): both are the open disc "
    "of radius r1 = r2 for this shift"
)
CONWAY_NOTE = (
    "Conway's question whether the interior of B(T) equals B_a(T) for every cyclic operator stays open; "
    "for this shift both are the open disc of radius r2"
)
FAT_NOTE = (
    "open question which hyponormal operators have sigma_T(h) = sigma(T) for all h != 0; "
    "non-normal hyponormal weighted shifts are in that class"
)


@dataclass
class Report:
    weight_spec: dict[str, Any]
    radii: Optional[RadiiReport] = None
    picture: Optional[SpectralPicture] = None
    classes: Optional[dict[str, Any]] = None
    bpe: Optional[BpeReport] = None
    probes: list[TruncationProbe] = field(default_factory=list)
    grid: Optional[dict[str, Any]] = None
    annotations: list[str] = field(default_factory=list)
    checks: list[dict[str, Any]] = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        classes = None
        if self.classes is not None:
            classes = dict(self.classes)
            cert = classes.get("subnormal_certificate")
            if isinstance(cert, MomentCertificate):
                classes["subnormal_certificate"] = cert.to_dict()
        return {
            "schema_version": self.schema_version,
            "weight_spec": self.weight_spec,
            "radii": None if self.radii is None else self.radii.to_dict(),
            "picture": None if self.picture is None else self.picture.to_dict(),
            "classes": classes,
            "bpe": None if self.bpe is None else self.bpe.to_dict(),
            "probes": [p.to_dict() for p in self.probes],
            "grid": self.grid,
            "annotations": list(self.annotations),
            "checks": list(self.checks),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Report":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        classes = d.get("classes")
        if classes is not None:
            classes = dict(classes)
            if classes.get("subnormal_certificate") is not None:
                classes["subnormal_certificate"] = MomentCertificate.from_dict(classes["subnormal_certificate"])
        return cls(
            weight_spec=d["weight_spec"],
            radii=None if d.get("radii") is None else RadiiReport.from_dict(d["radii"]),
            picture=None if d.get("picture") is None else SpectralPicture.from_dict(d["picture"]),
            classes=classes,
            bpe=None if d.get("bpe") is None else BpeReport.from_dict(d["bpe"]),
            probes=[TruncationProbe.from_dict(p) for p in d.get("probes", [])],
            grid=d.get("grid"),
            annotations=list(d.get("annotations", [])),
            checks=list(d.get("checks", [])),
            schema_version=d["schema_version"],
        )

    def dumps(self) -> str:
        return dumps_document(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def spec(self) -> WeightSpec:
        return spec_from_dict(self.weight_spec)


def dumps_document(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def classes_section(spec: WeightSpec, order: int = DEFAULT_ORDER, tolerance: float = 1e-9,
                    shifts: int = 2, window: int = DEFAULT_WINDOW) -> dict[str, Any]:
    """Normal/hyponormal flags plus a moment certificate (overflow propagates)."""
    flags = classify_normal_hyponormal(spec, window)
    if spec.bilateral:
        cert = bilateral_moment_test(spec, order, shifts, tolerance, window)
    else:
        cert = berger_hausdorff_test(spec, order, tolerance, window)
    return {**flags, "subnormal_certificate": cert}


def analyze(spec: WeightSpec, window: int = DEFAULT_WINDOW, order: int = DEFAULT_ORDER) -> Report:
    radii = estimate_radii(spec, window)
    picture = spectral_picture(radii)
    annotations: list[str] = []
    try:
        classes = classes_section(spec, order)
    except MomentOverflowError as exc:
        classes = {**classify_normal_hyponormal(spec), "subnormal_certificate": None}
        annotations.append(f"no moment certificate at order {order}: {exc}")
    bpe = None
    if not spec.bilateral:
        bpe = bpe_regions(radii, picture)
        annotations.append(WILLIAMS_NEGATIVE if bpe.williams_gap else WILLIAMS_EQUAL)
        if bpe.Ba.same_set(bpe.B.interior()):
            annotations.append(CONWAY_NOTE)
    if classes["hyponormal"] and not classes["normal"]:
        annotations.append(FAT_NOTE)
    cert = classes.get("subnormal_certificate")
    if cert is not None and cert.verdict == NOT_SUBNORMAL and classes["hyponormal"]:
        annotations.append("hyponormal but not subnormal: the converse of 'subnormal implies hyponormal' fails here")
    return Report(
        weight_spec=spec.to_dict(),
        radii=radii,
        picture=picture,
        classes=classes,
        bpe=bpe,
        annotations=annotations,
    )


def open_unit_disc() -> RadialRegion:
    return RadialRegion.disc(1.0, EXCLUDED)


def finite(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)
