"""The spectral picture of a weighted shift, assembled from its radii."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

from .errors import InconsistentRadiiError
from .radii import RadiiReport
from .regions import INCLUDED, UNKNOWN, RadialRegion

CHAIN_SLACK = 1e-9


@dataclass(frozen=True)
class SpectralPicture:
    kind: str
    spectrum: RadialRegion
    approx_point: RadialRegion
    point: RadialRegion
    point_adjoint: RadialRegion
    compression: RadialRegion
    invertible: Optional[bool] = None
    notes: tuple[str, ...] = ()

    _REGIONS = ("spectrum", "approx_point", "point", "point_adjoint", "compression")

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {k: getattr(self, k).to_dict() for k in self._REGIONS}
        d["kind"] = self.kind
        d["invertible"] = self.invertible
        d["notes"] = list(self.notes)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SpectralPicture":
        return cls(
            kind=d["kind"],
            invertible=d.get("invertible"),
            notes=tuple(d.get("notes", ())),
            **{k: RadialRegion.from_dict(d[k]) for k in cls._REGIONS},
        )


def _open_annulus(a: float, b: float, decidable_circle: bool) -> RadialRegion:
    """Point-spectrum shape ``a < |z| < b`` with undetermined edges.

    When ``a == b`` only a circle of unknown membership remains; for
    structured tails (constant, periodic, builtin) the eigenvector series
    diverges on that circle, so it is resolved to empty.
    """
    if b < a:
        return RadialRegion.empty()
    if a == b and decidable_circle:
        return RadialRegion.empty()
    return RadialRegion.annulus(a, b, UNKNOWN, UNKNOWN)


def spectral_picture(radii: RadiiReport) -> SpectralPicture:
    violations = radii.chain_violations(CHAIN_SLACK)
    if violations:
        raise InconsistentRadiiError("; ".join(violations))
    notes: list[str] = []
    if not radii.bilateral:
        r1, r2, r3, r = radii.side("")
        spectrum = RadialRegion.disc(r, INCLUDED)
        notes.append(f"spectrum: closed disc of radius r = {r:.12g} (unilateral spectrum theorem)")
        approx = RadialRegion.annulus(r1, r, INCLUDED, INCLUDED)
        notes.append(
            f"approx_point: closed annulus r1 = {r1:.12g} <= |z| <= r = {r:.12g} "
            "(unilateral approximate point spectrum theorem)"
        )
        point = RadialRegion.empty()
        notes.append("point: empty, an injective unilateral shift has no eigenvalues")
        if r2 == 0:
            point_adjoint = RadialRegion.origin()
            notes.append("point_adjoint: {0} since r2 = 0 (adjoint eigenvalue theorem)")
        else:
            point_adjoint = RadialRegion.disc(r2, UNKNOWN)
            notes.append(
                f"point_adjoint: open disc r2 = {r2:.12g} up to its edge, which is left unknown "
                "(adjoint eigenvalue theorem; by circular symmetry one of the two bounds is attained)"
            )
        notes.append("compression: complex conjugate of point_adjoint, the same set for radial regions")
        return SpectralPicture(
            kind=radii.kind,
            spectrum=spectrum,
            approx_point=approx,
            point=point,
            point_adjoint=point_adjoint,
            compression=point_adjoint,
            notes=tuple(notes),
        )

    r1p, r2p, r3p, rp = radii.side("plus")
    r1m, r2m, r3m, rm = radii.side("minus")
    outer = max(rp, rm)
    if radii.invertible:
        inner = min(r1p, r1m)
        spectrum = RadialRegion.annulus(inner, outer, INCLUDED, INCLUDED)
        notes.append(
            f"spectrum: annulus 1/r(T^-1) = {inner:.12g} <= |z| <= r(T) = {outer:.12g}; "
            "1/r(T^-1) read from the smallest window geometric means of both sides (bilateral spectrum theorem)"
        )
    else:
        spectrum = RadialRegion.disc(outer, INCLUDED)
        notes.append(f"spectrum: closed disc of radius r(T) = {outer:.12g}, T not invertible (bilateral spectrum theorem)")
    if rm < r1p:
        approx = RadialRegion.annulus(r1m, rm) | RadialRegion.annulus(r1p, rp)
        notes.append("approx_point: two annuli since r^- < r1^+ (Ridge's theorem)")
    else:
        approx = RadialRegion.annulus(min(r1m, r1p), outer)
        notes.append("approx_point: single annulus [min r1, max r] since r^- >= r1^+ (Ridge's theorem)")
    decidable = radii.structured
    point = _open_annulus(r3p, r2m, decidable)
    point_adjoint = _open_annulus(r3m, r2p, decidable)
    notes.append(
        f"point: r3^+ = {r3p:.12g} < |z| < r2^- = {r2m:.12g} with unknown edges "
        "(bilateral eigenvalue theorem; empty when r2^- < r3^+)"
    )
    notes.append(
        f"point_adjoint: r3^- = {r3m:.12g} < |z| < r2^+ = {r2p:.12g} with unknown edges "
        "(bilateral eigenvalue theorem; at most one of the two point spectra is nonempty)"
    )
    if decidable and (r3p == r2m or r3m == r2p):
        notes.append(
            "a degenerate point-spectrum circle was resolved to empty: for constant, periodic and "
            "builtin tails the eigenvector series diverges on it"
        )
    notes.append("compression: complex conjugate of point_adjoint, the same set for radial regions")
    return SpectralPicture(
        kind=radii.kind,
        spectrum=spectrum,
        approx_point=approx,
        point=point,
        point_adjoint=point_adjoint,
        compression=point_adjoint,
        invertible=radii.invertible,
        notes=tuple(notes),
    )


def check_picture_consistency(picture: SpectralPicture) -> list[str]:
    """Return one message per violated invariant; empty when consistent."""
    out: list[str] = []
    if not picture.spectrum.contains(picture.approx_point):
        out.append(
            "approx_point is not contained in spectrum: "
            f"{picture.approx_point.describe()} vs {picture.spectrum.describe()}"
        )
    for role, rho in picture.spectrum.bounding_circles():
        if not picture.approx_point.contains(RadialRegion.circle(rho)):
            out.append(f"spectrum boundary circle ({role}, radius {rho:.12g}) is not in approx_point")
    if picture.kind == "bilateral":
        if picture.point.certainly_nonempty and picture.point_adjoint.certainly_nonempty:
            out.append(
                "both point spectra are nonempty: "
                f"{picture.point.describe()} and {picture.point_adjoint.describe()}"
            )
    elif not picture.point.is_empty:
        out.append(f"unilateral point spectrum must be empty, got {picture.point.describe()}")
    return out


__all__ = ["SpectralPicture", "spectral_picture", "check_picture_consistency"]
