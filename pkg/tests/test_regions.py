from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wshift.regions import (
    BOUNDARY_UNKNOWN,
    EXCLUDED,
    INCLUDED,
    INSIDE,
    OUTSIDE,
    UNKNOWN,
    RadialRegion,
    boundary_samples,
    contains_region,
    membership,
)


def test_membership_examples():
    ann = RadialRegion.annulus(0.5, 1, INCLUDED, INCLUDED)
    assert membership(ann, 0.7 * cmath.exp(1j * math.pi / 3)) == INSIDE
    assert membership(RadialRegion.disc(1, UNKNOWN), cmath.exp(0.3j)) == BOUNDARY_UNKNOWN
    assert membership(RadialRegion.origin(), 0) == INSIDE
    assert membership(RadialRegion.origin(), 0.1) == OUTSIDE
    assert membership(RadialRegion.disc(1, EXCLUDED), 1) == OUTSIDE
    assert membership(RadialRegion.disc(1, EXCLUDED), 1 - 1e-9) == INSIDE
    assert membership(RadialRegion.empty(), 0) == OUTSIDE


def test_edge_snapping_absorbs_rounding():
    circle = RadialRegion.circle(1.0)
    assert membership(circle, cmath.exp(2j * math.pi / 7)) == INSIDE


def test_containment_examples():
    disc = RadialRegion.disc(1, INCLUDED)
    ann = RadialRegion.annulus(0.5, 1, INCLUDED, INCLUDED)
    assert contains_region(disc, ann)
    assert not contains_region(ann, disc)
    assert not contains_region(RadialRegion.disc(1, UNKNOWN), RadialRegion.circle(1))
    assert contains_region(RadialRegion.disc(1, UNKNOWN), RadialRegion.disc(1, EXCLUDED))
    assert contains_region(ann, RadialRegion.empty())


def test_boundary_samples_examples():
    pts = boundary_samples(RadialRegion.circle(1), 4)
    assert [p.theta for p in pts] == pytest.approx([0, math.pi / 2, math.pi, 3 * math.pi / 2])
    assert [complex(p.re, p.im) for p in pts] == pytest.approx([1, 1j, -1, -1j], abs=1e-15)
    assert boundary_samples(RadialRegion.empty(), 100) == []
    two = boundary_samples(RadialRegion.annulus(0.5, 2), 8)
    assert len(two) == 16
    assert {p.circle_role for p in two} == {"annulus-inner", "annulus-outer"}
    with pytest.raises(ValueError):
        boundary_samples(RadialRegion.circle(1), 0)


def test_normalization():
    assert RadialRegion.annulus(0, 1, INCLUDED, EXCLUDED) == RadialRegion.disc(1, EXCLUDED)
    assert RadialRegion.union([]).is_empty
    assert RadialRegion.annulus(1, 1) == RadialRegion.circle(1)
    merged = RadialRegion.union([RadialRegion.annulus(0.5, 1), RadialRegion.annulus(1, 2, EXCLUDED)])
    assert merged == RadialRegion.annulus(0.5, 2)
    with pytest.raises(ValueError):
        RadialRegion.annulus(2, 1)
    with pytest.raises(ValueError):
        RadialRegion.disc(-1)


def test_set_operations():
    closed = RadialRegion.disc(1)
    circle = RadialRegion.circle(1)
    assert (closed - circle) == RadialRegion.disc(1, EXCLUDED)
    assert (circle - closed).is_empty
    assert (closed & RadialRegion.annulus(0.5, 3)) == RadialRegion.annulus(0.5, 1)
    hole = RadialRegion.disc(2) - RadialRegion.annulus(0.5, 1, EXCLUDED, EXCLUDED)
    assert hole.variant == "union" and hole.membership(0.75) == OUTSIDE and hole.membership(1) == INSIDE


def test_unknown_edges_survive_operations():
    region = RadialRegion.disc(1, UNKNOWN) - RadialRegion.disc(0.5, EXCLUDED)
    assert region == RadialRegion.annulus(0.5, 1, INCLUDED, UNKNOWN)
    lone = RadialRegion.disc(1, UNKNOWN) - RadialRegion.disc(1, EXCLUDED)
    assert lone.membership(1) == BOUNDARY_UNKNOWN and not lone.certainly_nonempty
    assert RadialRegion.from_dict(lone.to_dict()) == lone


def test_interior_closure_and_openness():
    assert RadialRegion.disc(1).interior() == RadialRegion.disc(1, EXCLUDED)
    assert RadialRegion.circle(1).interior().is_empty
    assert RadialRegion.annulus(0.5, 1).interior().is_open
    assert RadialRegion.disc(1, EXCLUDED).is_open
    assert not RadialRegion.disc(1, UNKNOWN).is_open
    assert RadialRegion.disc(1, UNKNOWN).closure() == RadialRegion.disc(1)


# --- properties ----------------------------------------------------------------------

radius = st.sampled_from([0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
edge = st.sampled_from([INCLUDED, EXCLUDED, UNKNOWN])


@st.composite
def pieces(draw):
    kind = draw(st.sampled_from(["empty", "origin", "circle", "disc", "annulus"]))
    if kind == "empty":
        return RadialRegion.empty()
    if kind == "origin":
        return RadialRegion.origin()
    if kind == "circle":
        return RadialRegion.circle(draw(radius))
    if kind == "disc":
        return RadialRegion.disc(draw(radius), draw(edge))
    a, b = sorted([draw(radius), draw(radius)])
    return RadialRegion.annulus(a, b, draw(edge), draw(edge))


@st.composite
def regions(draw):
    return RadialRegion.union(draw(st.lists(pieces(), max_size=3)))


def truth(region, rho):
    return {OUTSIDE: 0, BOUNDARY_UNKNOWN: 1, INSIDE: 2}[region.membership(rho)]


probe_radii = [0.0, 0.1, 0.25, 0.4, 0.5, 0.75, 1.0, 1.2, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5]


@settings(max_examples=200)
@given(regions(), regions())
def test_set_algebra_is_pointwise_three_valued_logic(A, B):
    for rho in probe_radii:
        a, b = truth(A, rho), truth(B, rho)
        assert truth(A | B, rho) == max(a, b)
        assert truth(A & B, rho) == min(a, b)
        assert truth(A - B, rho) == min(a, 2 - b)


@settings(max_examples=200)
@given(regions(), st.floats(0, 4), st.floats(-math.pi, math.pi))
def test_membership_depends_on_modulus_only(A, rho, theta):
    assert A.membership(rho * cmath.exp(1j * theta)) == A.membership(rho)


@settings(max_examples=200)
@given(regions(), regions())
def test_containment_is_sound(A, B):
    if A.contains(B):
        for rho in probe_radii:
            if truth(B, rho) >= 1:
                assert truth(A, rho) == 2


@settings(max_examples=200)
@given(regions())
def test_containment_is_reflexive_for_definite_regions(A):
    assume(all(truth(A, rho) != 1 for rho in probe_radii))
    assert A.contains(A)


@settings(max_examples=200)
@given(regions(), regions(), regions())
def test_containment_is_transitive(A, B, C):
    if A.contains(B) and B.contains(C):
        assert A.contains(C)


@settings(max_examples=200)
@given(regions())
def test_serialization_round_trip(A):
    again = RadialRegion.from_dict(A.to_dict())
    assert again == A and again.to_dict() == A.to_dict()


@settings(max_examples=100)
@given(regions(), st.integers(1, 16))
def test_samples_lie_on_their_circles(A, n):
    for s in boundary_samples(A, n):
        assert abs(abs(complex(s.re, s.im)) - s.radius) <= 1e-12 * max(1.0, s.radius)
