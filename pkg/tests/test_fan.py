import random

import pytest
from hypothesis import given, strategies as st

from toricmw.cellular import orientation_change_matrix
from toricmw.fan import (
    builtin,
    canonical_transform,
    chart_matrix,
    exotic_nonpure,
    exotic_nonshellable,
    hirzebruch,
    make_fan,
    orientation_change,
    projective_space,
    random_fan,
    random_surface,
    row_set,
    row_sets,
    star_subdivide,
    surface_data,
    surface_from_rays,
    transition_section,
    validate,
)
from toricmw.mwring import CubicalCell
from toricmw.simplicial import face_label, mask, members, size


def test_validate_hirzebruch():
    for a in range(4):
        report = validate(hirzebruch(a))
        assert report.ok and report.smooth and report.complete and report.pure


def test_validate_failures():
    # the cone on (1,0), (1,2) has index 2
    fan = make_fan(3, [[0, 1], [1, 2]], [[1, 1, 0], [0, 2, 1]])
    report = validate(fan)
    assert not report.smooth
    assert report.failures == ("12",)
    not_surjective = make_fan(2, [[0], [1]], [[2, 0], [0, 2]])
    assert not validate(not_surjective).surjective


def test_exotic_fans_not_complete():
    for fan in (exotic_nonshellable(), exotic_nonpure()):
        report = validate(fan)
        assert report.ok and not report.complete


def test_lambda_shape_checked():
    with pytest.raises(ValueError):
        make_fan(3, [[0, 1]], [[1, 0], [0, 1]])


def test_builtin_lookup():
    assert builtin("projective_space", 2) == projective_space(2)
    with pytest.raises(ValueError):
        builtin("nope")


def test_projective_order():
    assert [face_label(f) for f in projective_space(2).order] == ["12", "13", "23"]


@pytest.mark.parametrize("a", range(4))
def test_hirzebruch_row_sets(a):
    rows = {face_label(w) for w in row_sets(hirzebruch(a)).rows}
    if a % 2:
        assert rows == {"∅", "24", "134", "123"}
    else:
        assert rows == {"∅", "24", "13", "1234"}


@given(st.integers(0, 10_000))
def test_row_sets_are_a_group(seed):
    # kappa -> omega_kappa is additive mod 2
    fan = random_fan(random.Random(seed))
    for k1 in range(1 << fan.n):
        for k2 in range(1 << fan.n):
            assert row_set(fan, k1 ^ k2) == row_set(fan, k1) ^ row_set(fan, k2)


@given(st.integers(0, 10_000))
def test_row_set_meets_each_facet_once(seed):
    fan = random_fan(random.Random(seed))
    if not validate(fan).ok:
        return
    table = row_sets(fan)
    for k, f in enumerate(fan.order):
        if size(f) == fan.n:
            assert len(table.assignment[k]) == 1
            assert f & table.facet_row(k) == fan.restriction.restriction[k]


@given(st.integers(0, 10_000))
def test_chart_cocycle(seed):
    rng = random.Random(seed)
    fan = random_fan(rng)
    if not validate(fan).ok:
        return
    facets = [f for f in fan.order if size(f) == fan.n]
    A, B, C = (rng.choice(facets) for _ in range(3))
    ab, bc, ac = chart_matrix(fan, A, B), chart_matrix(fan, B, C), chart_matrix(fan, A, C)
    for i in members(A):
        composed = {}
        for j, c in ab[i].items():
            for k, d in bc[j].items():
                composed[k] = composed.get(k, 0) + c * d
        assert {k: v for k, v in composed.items() if v} == ac[i]


@given(st.integers(0, 10_000))
def test_canonical_transform_in_kernel(seed):
    rng = random.Random(seed)
    fan = random_fan(rng)
    if not validate(fan).ok:
        return
    # transforms are taken in the completed fan, where every facet spans
    fan = fan.completed()
    faces = sorted(fan.K.faces)
    sigma = rng.choice(faces)
    rest = [v for v in range(fan.m) if not sigma >> v & 1]
    star = rng.sample(rest, rng.randint(0, len(rest)))
    T = canonical_transform(fan, CubicalCell(members(sigma), set(), star))
    f = fan.first_facet(sigma)
    for i in star:
        row = [T.r[i, j] for j in range(fan.m)]
        assert all(sum(row[j] * fan.lam[k, j] for j in range(fan.m)) == 0 for k in range(fan.n))
        # moves coordinate i into the first facet
        assert all(row[j] == 0 for j in range(fan.m) if j != i and not f >> j & 1)


def test_transition_section_identity():
    fan = projective_space(2)
    f = fan.order[0]
    assert transition_section(fan, 0, f, f).entries == {}
    with pytest.raises(ValueError):
        transition_section(fan, mask([2]), f, fan.order[1])


def test_surface_self_intersections():
    assert set(surface_data(projective_space(2)).a.values()) == {1}
    data = surface_data(hirzebruch(3))
    assert sorted(data.a.values()) == [-3, 0, 0, 3]
    blown_up = star_subdivide(projective_space(2), mask([0, 1]))
    assert surface_data(blown_up).a[3] == -1
    assert surface_data(blown_up).complete


def test_partial_surface_has_no_boundary_a():
    fan = make_fan(3, [[0, 1], [1, 2]], [[1, 0, -1], [0, 1, 0]])
    data = surface_data(fan)
    assert not data.complete
    assert list(data.a) == [1]


@pytest.mark.parametrize("a", range(4))
def test_orientation_change_matrix(a):
    fan = hirzebruch(a)
    data = surface_data(fan)
    for ray in range(4):
        facets = [f for f in fan.order if f >> ray & 1]
        got = orientation_change(fan, ray, facets[0], facets[1])
        want = orientation_change_matrix(data.a[ray])
        assert got == want


@given(st.integers(0, 10_000), st.integers(3, 9))
def test_random_surfaces_complete(seed, rays):
    fan = random_surface(random.Random(seed), rays)
    report = validate(fan)
    assert report.ok and report.complete and fan.m == rays
    data = surface_data(fan)
    if rays % 2:
        assert data.a_sigma % 2 == 1


def test_surface_from_rays_order():
    fan = surface_from_rays([[1, 0], [0, 1], [-1, -1]])
    assert validate(fan).complete


def test_completed_adds_virtual_rays():
    fan = exotic_nonpure().completed()
    assert fan.virtual == 1 and fan.m == 5
    assert validate(fan).smooth
