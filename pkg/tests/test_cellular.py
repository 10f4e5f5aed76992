import random

import pytest
from hypothesis import given, strategies as st

from toricmw import cellular as C
from toricmw.fan import (
    exotic_nonpure,
    exotic_nonshellable,
    hirzebruch,
    make_fan,
    projective_space,
    random_fan,
    random_surface,
    validate,
)
from toricmw.mwring import ETA, eta_power
from toricmw.simplicial import build_complex, is_shelling, size


def shellable(fan):
    return fan.K.is_pure and is_shelling(fan.K, fan.order)


def summary(report):
    return sorted((s.kind, s.l, s.q, s.p) for s in report.summands)


def test_affine_line_cells():
    cx = C.moment_angle_complex(build_complex(1, [[0]]))
    assert {(g.degree, g.weight) for g in cx.generators} == {(0, 0), (0, 1), (1, 1)}
    assert len(cx.generators) == 3


@pytest.mark.parametrize("n", range(1, 5))
def test_affine_space_contracts(n):
    cx = C.minimal_complex(C.moment_angle_complex(build_complex(n, [list(range(n))])))
    assert [(g.degree, g.weight) for g in cx.generators] == [(0, 0)]


def test_punctured_plane():
    cx = C.minimal_complex(C.moment_angle_complex(build_complex(2, [[0], [1]])))
    assert sorted((g.degree, g.weight) for g in cx.generators) == [(0, 0), (1, 2)]


@given(st.integers(0, 10_000))
def test_moment_angle_square_zero(seed):
    fan = random_fan(random.Random(seed), max_m=5)
    assert C.moment_angle_complex(fan.K).square_is_zero()


@given(st.integers(0, 10_000))
def test_canonical_square_zero(seed):
    fan = random_fan(random.Random(seed))
    if not validate(fan).ok:
        return
    cx = C.canonical_complex(fan)
    assert cx.square_is_zero()
    # one surviving generator per minimal face, in the restriction complex
    assert len(C.minimal_complex(cx).generators) <= len(cx.generators)


def test_canonical_rejects_invalid_fan():
    with pytest.raises(ValueError):
        C.canonical_complex(make_fan(2, [[0, 1]], [[1, 1], [0, 2]]))


def test_p2_canonical():
    cx = C.minimal_complex(C.canonical_complex(projective_space(2)))
    assert sorted((g.degree, g.weight) for g in cx.generators) == [(0, 0), (1, 1), (2, 2)]
    entries = [c for bd in cx.boundary.values() for c in bd.values() if not c.is_zero()]
    assert len(entries) == 1 and entries[0] in (ETA, -ETA)
    assert summary(C.decompose(cx)) == [("cone", 1, 1, 1), ("free", 0, 0, 0)]


def test_exotic_complexes():
    dec = C.decompose(C.canonical_complex(exotic_nonshellable()))
    assert summary(dec) == [("free", 0, 0, 0), ("free", 0, 1, 1), ("free", 0, 1, 1), ("free", 0, 2, 1)]
    dec = C.decompose(C.canonical_complex(exotic_nonpure()))
    assert summary(dec) == [("free", 0, 0, 0), ("free", 0, 1, 1), ("free", 0, 1, 1), ("free", 0, 2, 1)]


def test_lambda_requires_shelling():
    with pytest.raises(ValueError):
        C.lambda_complex(exotic_nonshellable())


@pytest.mark.parametrize("a", range(4))
def test_hirzebruch_lambda(a):
    cx = C.lambda_complex(hirzebruch(a))
    assert cx.eta_graded and cx.square_is_zero()
    nonzero = [c for bd in cx.boundary.values() for c in bd.values() if not c.is_zero()]
    assert len(nonzero) == (1 if a % 2 else 0)
    if a % 2:
        assert nonzero[0] == ETA
        assert C.chow_witt(C.decompose(cx)) == {0: "GW", 1: "2Z ⊕ GW", 2: "Z"}
    else:
        assert summary(C.decompose(cx)) == [("free", 0, 0, 0), ("free", 0, 1, 1), ("free", 0, 1, 1),
                                           ("free", 0, 2, 2)]


def test_parallel_assembly_matches(monkeypatch):
    fan = hirzebruch(3)
    serial = C.lambda_complex(fan).as_dict()
    monkeypatch.setenv(C.WORKERS_ENV, "2")
    assert C.workers() == 2
    assert C.lambda_complex(fan).as_dict() == serial
    monkeypatch.setenv(C.WORKERS_ENV, "lots")
    assert C.workers() == 1


def test_decompose_refuses_non_eta_graded():
    cx = C.MWChainComplex(
        [C.Generator("a", 0, 0), C.Generator("b", 1, 2)],
        {"b": {"a": eta_power(2)}},
    )
    assert cx.square_is_zero() and not cx.eta_graded
    with pytest.raises(ValueError):
        C.decompose(cx)


def test_cone_of_two_eta():
    cx = C.MWChainComplex([C.Generator("a", 0, 0), C.Generator("b", 1, 1)], {"b": {"a": ETA * 2}})
    dec = C.decompose(cx)
    assert summary(dec) == [("cone", 2, 0, 0)]
    assert dec.summands[0].label() == "K^MW_0 // 2·η [0]"
    motives = C.motive_reports(dec)
    assert motives.eta_inverted == ("Z~(0)[0]//2·η",)
    assert C.homology_sheaves(dec).labels(1) == ["_{2η}K^MW_1"]


def test_projective_homology_labels():
    dec = C.decompose(C.lambda_complex(projective_space(2)))
    h = C.homology_sheaves(dec)
    assert h.labels(0) == ["Z"] and h.labels(1) == ["K^MW_1/η"] and h.labels(2) == ["_{η}K^MW_2"]
    assert [t.alias for t in h.degrees[1]] == ["K^M_1"]
    assert [t.alias for t in h.degrees[2]] == ["2K^M_2"]
    assert C.motive_reports(dec).eta_inverted == ("Z~(0)[0]",)


@given(st.integers(0, 10_000), st.integers(3, 9))
def test_surface_tables(seed, rays):
    fan = random_surface(random.Random(seed), rays)
    report = C.surface_report(fan)
    assert report["chow_witt"] == report["chow_witt_table"]
    motivic = report["motives"]["motivic"]
    assert motivic == ["Z(2)[4]"] + ["Z(1)[2]"] * (rays - 2) + ["Z(0)[0]"]
    assert report["motives"]["rational"] == [t.replace("Z", "Q") for t in motivic]


def test_orientable_surface_homology():
    dec = C.decompose(C.lambda_complex(hirzebruch(2)))
    h = C.homology_sheaves(dec)
    assert h.render(1) == "(K^MW_1)^2" and h.render(2) == "K^MW_2"


def test_surface_report_needs_complete_fan():
    with pytest.raises(ValueError):
        C.surface_report(exotic_nonshellable())


def test_surface_chow_witt_table():
    assert C.surface_chow_witt_table(3, 1) == {0: "GW", 1: "2Z", 2: "Z"}
    assert C.surface_chow_witt_table(5, 2) == {0: "GW", 1: "GW^3", 2: "GW"}
    assert C.surface_chow_witt_table(6, 3) == {0: "GW", 1: "2Z ⊕ GW^3", 2: "Z"}


def test_chow_witt_needs_pure_weights():
    dec = C.decompose(C.canonical_complex(exotic_nonshellable()))
    with pytest.raises(ValueError):
        C.chow_witt(dec)


@pytest.mark.parametrize("n", range(1, 6))
def test_chow_basis_projective(n):
    assert list(C.chow_basis(projective_space(n)).ranks) == [1] * (n + 1)


def test_chow_basis_single_cone():
    fan = make_fan(2, [[0, 1]], [[1, 0], [0, 1]])
    assert list(C.chow_basis(fan).ranks) == [1, 0, 0]


@given(st.integers(0, 10_000))
def test_shellable_pathways_agree(seed):
    fan = random_fan(random.Random(seed))
    if not (validate(fan).ok and shellable(fan)):
        return
    lam = C.decompose(C.lambda_complex(fan))
    can = C.decompose(C.canonical_complex(fan))
    assert summary(lam) == summary(can)
    # one summand per facet, twisted by |r(sigma)|
    motivic = C.motive_reports(lam).motivic
    assert len(motivic) == len(fan.order)
    want = sorted(size(r) for r in fan.restriction.restriction)
    assert sorted(int(t[2:t.index(")")]) for t in motivic) == want
    assert list(C.chow_basis(fan).ranks) == [want.count(q) for q in range(fan.n + 1)]


@given(st.integers(0, 10_000))
def test_eta_to_two_matches_real_toric(seed):
    fan = random_fan(random.Random(seed))
    if not (validate(fan).ok and shellable(fan)):
        return
    dec = C.decompose(C.lambda_complex(fan))
    real = {d: (h.free_rank, h.torsion) for d, h in C.real_toric_data(fan).items() if not h.is_zero()}
    assert real == C.decomposition_torsion(dec)


def test_rational_motive_of_canonical_complex():
    cx = C.canonical_complex(projective_space(3))
    assert C.rational_motive(cx) == ["Q(3)[6]", "Q(2)[4]", "Q(1)[2]", "Q(0)[0]"]


def test_non_eta_graded_witness_is_refused():
    rng = random.Random(3)
    for _ in range(82):
        fan = random_fan(rng)
    cx = C.minimal_complex(C.canonical_complex(fan))
    assert cx.square_is_zero() and not cx.eta_graded
    with pytest.raises(ValueError):
        C.decompose(cx)
