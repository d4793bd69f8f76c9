#!/usr/bin/env python3
"""Picard lattices, intersection numbers and the curve criterion"""
import pytest
from hypothesis import given, settings, strategies as st

from surface import (
    CurveConfig, LatticeMismatchError, PicardLattice, SurfaceError,
    blowup_lattice, check_criterion, connected_components, intersection, proper_transform,
)


def test_blowup_lattice_signature_and_classes():
    S = blowup_lattice(2)
    assert S.labels == ("H", "E1", "E2")
    assert S.signature() == (1, 2, 0)
    H, E1 = S.basis_class("H"), S.basis_class("E1")
    assert intersection(H, H) == 1 and intersection(E1, E1) == -1 and intersection(H, E1) == 0
    assert str(3 * H - E1) == "3*H - E1"
    assert str(S.of((0, 0, 0))) == "0"


def test_signature_of_hyperbolic_plane():
    assert PicardLattice(((0, 1), (1, -2)), ("F", "G")).signature() == (1, 1, 0)
    assert PicardLattice(((0, 0), (0, 1)), ("A", "B")).signature() == (1, 0, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=5))
def test_signature_of_diagonal_forms(diag):
    n = len(diag)
    M = tuple(tuple(diag[i] if i == j else 0 for j in range(n)) for i in range(n))
    lat = PicardLattice(M, tuple(f"B{i}" for i in range(n)))
    pos = sum(d > 0 for d in diag)
    neg = sum(d < 0 for d in diag)
    assert lat.signature() == (pos, neg, n - pos - neg)


def test_lattice_validation():
    with pytest.raises(SurfaceError, match="symmetric"):
        PicardLattice(((0, 1), (2, 0)), ("F", "G"))
    with pytest.raises(SurfaceError, match="square"):
        PicardLattice(((0, 1),), ("F", "G"))
    with pytest.raises(SurfaceError, match="distinct"):
        PicardLattice(((1, 0), (0, 1)), ("F", "F"))
    with pytest.raises(SurfaceError):
        blowup_lattice(1).basis_class("E2")


def test_classes_from_different_lattices_do_not_mix():
    a, b = blowup_lattice(1, "A"), blowup_lattice(1, "B")
    with pytest.raises(LatticeMismatchError):
        a.basis_class("H") + b.basis_class("H")
    with pytest.raises(LatticeMismatchError):
        intersection(a.basis_class("H"), b.basis_class("H"))


def nine_point_config(curves=True, irreducible=True):
    S = blowup_lattice(9, "S")
    Y = proper_transform(S, 3, [1] * 9)
    Q = proper_transform(S, 2, [1] * 5)
    tests = (S.basis_class("H"),) + tuple(S.basis_class(f"E{i}") for i in range(1, 10)) + (Q,)
    return CurveConfig(S, (Y,), (1,), tests if curves else (), effective=True,
                       irreducible=irreducible, name="cfg")


def test_nine_point_cubic_is_superheight_one_and_not_affine():
    rep = check_criterion(nine_point_config())
    assert rep.h_dot_components == [0]
    assert rep.h_dot_curves == [3] + [1] * 9 + [1]
    assert rep.y_squared == 0 and rep.connected
    assert rep.superheight_one
    assert rep.obstruction == "self-intersection-obstruction"
    assert rep.verdict == "non-affine, superheight one"
    assert "relative to supplied test curves" in rep.notes
    assert rep.conclusive


def test_without_irreducibility_only_superheight_is_claimed():
    rep = check_criterion(nine_point_config(irreducible=False))
    assert rep.verdict == "superheight one" and not rep.obstruction


def test_without_test_curves_nothing_is_concluded():
    rep = check_criterion(nine_point_config(curves=False, irreducible=False))
    assert rep.verdict == "no conclusion" and not rep.conclusive
    assert any("no test curves" in n for n in rep.notes)


def test_disconnected_configuration_is_not_affine():
    S = blowup_lattice(1, "S")
    E1, H = S.basis_class("E1"), S.basis_class("H")
    rep = check_criterion(CurveConfig(S, (E1, H), (1, 1), (), True, True, name="cfg"))
    assert connected_components([E1, H]) == [[0], [1]]
    assert rep.obstruction == "connectedness-obstruction"
    assert not rep.components_ok
    assert rep.verdict == "not affine"


def test_line_in_the_plane():
    P = PicardLattice(((1,),), ("L",), "P")
    L = P.basis_class("L")
    rep = check_criterion(CurveConfig(P, (L,), (1,), (L,), True, True, name="line"))
    assert rep.verdict == "superheight one"
    assert rep.to_dict()["Y^2"] == 1


def test_config_validation():
    S = blowup_lattice(1, "S")
    H = S.basis_class("H")
    with pytest.raises(SurfaceError, match="effective"):
        check_criterion(CurveConfig(S, (H,), (1,), (H,), effective=False, name="c"))
    with pytest.raises(SurfaceError, match="positive coefficient"):
        check_criterion(CurveConfig(S, (H,), (0,), (H,), effective=True, name="c"))
    with pytest.raises(SurfaceError, match="coefficients"):
        check_criterion(CurveConfig(S, (H,), (1, 2), (H,), effective=True, name="c"))
    with pytest.raises(SurfaceError, match="no components"):
        check_criterion(CurveConfig(S, (), (), (H,), effective=True, name="c"))
    other = blowup_lattice(1, "T")
    with pytest.raises(LatticeMismatchError):
        check_criterion(CurveConfig(S, (other.basis_class("H"),), (1,), (), effective=True, name="c"))


@st.composite
def lattice_with_classes(draw, count=3):
    n = draw(st.integers(1, 4))
    upper = {(i, j): draw(st.integers(-3, 3)) for i in range(n) for j in range(i, n)}
    M = tuple(tuple(upper[min(i, j), max(i, j)] for j in range(n)) for i in range(n))
    lat = PicardLattice(M, tuple(f"B{i}" for i in range(n)), "L")
    vectors = st.lists(st.integers(-4, 4), min_size=n, max_size=n)
    return lat, [lat.of(draw(vectors)) for _ in range(count)]


@settings(max_examples=60, deadline=None)
@given(lattice_with_classes(), st.integers(-5, 5))
def test_intersection_is_symmetric_and_bilinear(data, k):
    _, (a, b, c) = data
    assert intersection(a, b) == intersection(b, a)
    assert intersection(a + b, c) == intersection(a, c) + intersection(b, c)
    assert intersection(k * a, c) == k * intersection(a, c)
    assert intersection(a - b, c) == intersection(a, c) - intersection(b, c)


multiplicities = st.lists(st.integers(0, 4), max_size=6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), multiplicities, st.integers(0, 6), multiplicities)
def test_proper_transforms_intersect_by_degrees_and_multiplicities(d1, m1, d2, m2):
    S = blowup_lattice(6)
    C1, C2 = proper_transform(S, d1, m1), proper_transform(S, d2, m2)
    assert intersection(C1, C2) == d1 * d2 - sum(a * b for a, b in zip(m1, m2))


def reachable_groups(classes):
    groups, seen = [], set()
    for start in range(len(classes)):
        if start in seen:
            continue
        group, frontier = {start}, [start]
        while frontier:
            i = frontier.pop()
            for j in range(len(classes)):
                if j not in group and intersection(classes[i], classes[j]) > 0:
                    group.add(j)
                    frontier.append(j)
        seen |= group
        groups.append(sorted(group))
    return sorted(groups)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: lattice_with_classes(count=n)))
def test_components_match_graph_reachability(data):
    _, classes = data
    assert connected_components(classes) == reachable_groups(classes)
