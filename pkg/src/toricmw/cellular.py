"""Cellular A1-chain complexes of toric varieties and their decompositions."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .fan import Fan, canonical_transform, row_sets, surface_data, validate
from .intlin import IntMatrix, homology_at, smith_normal_form
from .mwring import (
    ONE,
    CubicalCell,
    MWConstant,
    action_coefficient,
    bracket_unit,
    eps_power,
    eta_power,
    n_epsilon,
    render,
    zero,
)
from .reduction import SparseComplex, is_unit
from .simplicial import (
    critical_complex,
    face_key,
    face_label,
    is_shelling,
    mask,
    members,
    size,
    subsets,
)

WORKERS_ENV = "TORICMW_WORKERS"


def workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Generator:
    label: str
    degree: int
    weight: int
    facet: Optional[int] = None
    cell: Optional[CubicalCell] = None


@dataclass
class MWChainComplex:
    """Generators (chain degree, K^MW weight) and a sparse MW-valued boundary."""

    generators: list
    boundary: dict  # label -> {label: MWConstant}

    def by_label(self) -> dict:
        return {g.label: g for g in self.generators}

    def degrees(self) -> list:
        return sorted({g.degree for g in self.generators})

    def in_degree(self, d: int) -> list:
        return [g for g in self.generators if g.degree == d]

    def matrix(self, d: int) -> list:
        """Differential from degree d to d-1: rows are targets, columns sources."""
        src, tgt = self.in_degree(d), self.in_degree(d - 1)
        out = []
        for t in tgt:
            row = []
            for s in src:
                c = self.boundary.get(s.label, {}).get(t.label)
                row.append(c if c is not None else zero(t.weight - s.weight))
            out.append(row)
        return out

    def entry(self, source: str, target: str) -> MWConstant:
        gens = self.by_label()
        c = self.boundary.get(source, {}).get(target)
        return c if c is not None else zero(gens[target].weight - gens[source].weight)

    @property
    def eta_graded(self) -> bool:
        gens = self.by_label()
        for s, bd in self.boundary.items():
            for t, c in bd.items():
                if c.is_zero():
                    continue
                if c.degree != -1 or gens[t].weight != gens[s].weight - 1:
                    return False
        return True

    def square_is_zero(self) -> bool:
        return _sparse(self).square_is_zero()

    def as_dict(self) -> dict:
        gens = sorted(self.generators, key=lambda g: (g.degree, g.weight, g.label))
        diff = []
        for g in gens:
            for t, c in sorted(self.boundary.get(g.label, {}).items()):
                if not c.is_zero():
                    diff.append({"source": g.label, "target": t, "coefficient": render(c)})
        return {
            "generators": [{"label": g.label, "degree": g.degree, "weight": g.weight} for g in gens],
            "differential": diff,
            "eta_graded": self.eta_graded,
        }


def _sparse(cx: MWChainComplex) -> SparseComplex:
    sc = SparseComplex()
    for g in cx.generators:
        sc.add(g.label, g.degree, cx.boundary.get(g.label, {}))
    return sc


def _from_sparse(sc: SparseComplex, gens: dict) -> MWChainComplex:
    kept = [g for g in gens.values() if g.label in sc.degree]
    return MWChainComplex(kept, {k: dict(v) for k, v in sc.boundary.items()})


def _cell_key(e: CubicalCell) -> tuple:
    return (len(e.sigma), sorted(e.sigma), sorted(e.tau_star))


def _vertex_label(v: int, real: int) -> str:
    return str(v + 1) if v < real else f"*{v - real + 1}"


def cell_label(e: CubicalCell, real: Optional[int] = None, full: bool = False) -> str:
    real = 10 ** 9 if real is None else real

    def fmt(s):
        return "".join(_vertex_label(v, real) for v in sorted(s)) or "∅"

    if full:
        return f"e[{fmt(e.sigma)}|{fmt(e.tau_one)}|{fmt(e.tau_star)}]"
    return f"e^{fmt(e.sigma)}_{fmt(e.tau_star)}"


def cubical_sign(e: CubicalCell, j: int) -> MWConstant:
    """<-1>^(sigma, j) eps^(tau_star, j)."""
    below = (1 << j) - 1
    return bracket_unit(size(mask(e.sigma) & below)) * eps_power(size(mask(e.tau_star) & below))


def face_j(e: CubicalCell, j: int) -> CubicalCell:
    return CubicalCell(e.sigma - {j}, e.tau_one, e.tau_star | {j})


def moment_angle_complex(K) -> MWChainComplex:
    everything = (1 << K.m) - 1
    gens, cells = {}, []
    for s in sorted(K.faces, key=face_key):
        rest = everything & ~s
        for w in sorted(subsets(rest), key=face_key):
            cells.append(CubicalCell(members(s), members(rest & ~w), members(w)))
    labels = {e: cell_label(e, full=True) for e in cells}
    boundary = {}
    for e in cells:
        bd = {}
        for j in sorted(e.sigma):
            bd[labels[face_j(e, j)]] = cubical_sign(e, j)
        boundary[labels[e]] = bd
        gens[labels[e]] = Generator(labels[e], e.dim, e.dim + e.twist, cell=e)
    return MWChainComplex(list(gens.values()), boundary)


def full_canonical_complex(fan: Fan) -> MWChainComplex:
    """All canonical cells with the transformed cubical differential."""
    F = fan.completed()
    real = (1 << fan.m) - 1
    everything = (1 << F.m) - 1
    cells = []
    for s in F.K.faces:
        if s & ~real:
            continue
        f = F.first_facet(s)
        for w in subsets(f & ~s):
            cells.append(CubicalCell(members(s), members(everything & ~s & ~w), members(w)))
    cells.sort(key=_cell_key)
    label = {e: cell_label(e, fan.m) for e in cells}
    gens, boundary = {}, {}
    for e in cells:
        s = mask(e.sigma)
        bd = {}
        for j in sorted(e.sigma):
            sign = cubical_sign(e, j)
            e2 = face_j(e, j)
            T = canonical_transform(F, e2)
            s2 = mask(e2.sigma)
            for w in subsets(F.first_facet(s2) & ~s2):
                c = action_coefficient(T.r, e2, members(w))
                if c.is_zero():
                    continue
                tgt = CubicalCell(e2.sigma, members(everything & ~s2 & ~w), members(w))
                c = sign * c
                key = label[tgt]
                bd[key] = bd[key] + c if key in bd else c
        boundary[label[e]] = {k: v for k, v in bd.items() if not v.is_zero()}
        gens[label[e]] = Generator(label[e], e.dim, e.dim + e.twist, cell=e)
    return MWChainComplex(list(gens.values()), boundary)


def _eliminate_units(cx: MWChainComplex, protected=frozenset()) -> MWChainComplex:
    """Cancel unit pivots until none remain outside ``protected`` pairs.

    A pair is skipped only when both ends are protected, so passing the
    restriction-complex labels leaves exactly those labels when possible.
    """
    gens = cx.by_label()
    order = {g.label: k for k, g in enumerate(sorted(cx.generators, key=lambda g: (g.degree, g.weight, g.label)))}
    sc = _sparse(cx)
    co = sc.coboundary()
    changed = True
    while changed:
        changed = False
        pairs = []
        for b in sorted(sc.degree, key=order.get):
            for a, c in sc.boundary[b].items():
                if is_unit(c):
                    both = a in protected and b in protected
                    if not both:
                        score = (a in protected) + (b in protected)
                        pairs.append((score, order[b], order[a], a, b))
        for _, _, _, a, b in sorted(pairs):
            if a in sc.degree and b in sc.degree and is_unit(sc.boundary[b].get(a, zero())):
                co = sc.eliminate(a, b, co)
                changed = True
    return _from_sparse(sc, gens)


def canonical_complex(fan: Fan) -> MWChainComplex:
    """Restriction complex: cells e^sigma_omega with omega + sigma inside r(f(sigma)).

    The differential is transferred from the full canonical complex by
    cancelling unit pivots against cells outside the restriction complex.
    """
    report = validate(fan)
    if not report.ok:
        raise ValueError(f"fan fails validation: {report.as_dict()}")
    full = full_canonical_complex(fan)
    F = fan.completed()
    keep = set()
    for g in full.generators:
        s = mask(g.cell.sigma)
        if (s | mask(g.cell.tau_star)) & ~F.r(s) == 0:
            keep.add(g.label)
    return _eliminate_units(full, frozenset(keep))


def minimal_complex(cx: MWChainComplex) -> MWChainComplex:
    return _eliminate_units(cx)


def _critical_for_row(args):
    K, order, omega = args
    return omega, critical_complex(K, order, omega)


def lambda_complex(fan: Fan) -> MWChainComplex:
    """eta times the critical differentials of the K_omega, omega in row(lambda)."""
    if not fan.K.is_pure or not is_shelling(fan.K, fan.order):
        raise ValueError("lambda_complex needs a shelling order; use canonical_complex instead")
    table = row_sets(fan)
    jobs = [(fan.K, fan.order, w) for w in dict.fromkeys(table.rows)]
    if workers() > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers()) as pool:
            results = dict(pool.map(_critical_for_row, jobs))
    else:
        results = dict(map(_critical_for_row, jobs))
    data = fan.restriction
    labels = {}
    for k, f in enumerate(fan.order):
        r = data.restriction[k]
        labels[k] = f"[{face_label(r)}]{face_label(f)}"
    gens, boundary, owner = [], {}, {}
    for omega, cc in results.items():
        for k, face in cc.faces.items():
            if k in owner:
                raise RuntimeError(f"facet {face_label(fan.order[k])} critical for two row sets")
            if face != data.restriction[k]:
                raise RuntimeError("critical face differs from the restriction face")
            owner[k] = omega
            boundary[labels[k]] = {labels[t]: eta_power(1, c) for t, c in cc.boundary.get(k, {}).items() if c}
    if sorted(owner) != list(range(len(fan.order))):
        raise RuntimeError("some facet is not critical for any row set")
    for k, f in enumerate(fan.order):
        q = size(data.restriction[k])
        gens.append(Generator(labels[k], q, q, facet=f))
    return MWChainComplex(gens, boundary)


@dataclass(frozen=True)
class Summand:
    kind: str  # "free" or "cone"
    l: int  # 0 for free
    q: int  # weight of the (lower) generator
    p: int  # chain degree of the (lower) generator
    generators: tuple

    def label(self) -> str:
        if self.kind == "free":
            return f"K^MW_{self.q} [{self.p}]"
        return f"K^MW_{self.q} // {self.l}·η [{self.p}]"


@dataclass(frozen=True)
class DecompositionReport:
    summands: tuple

    def B(self, l: int) -> list:
        return [s for s in self.summands if s.l == l]

    def as_dict(self) -> dict:
        return {
            "summands": [
                {"kind": s.kind, "l": s.l, "q": s.q, "p": s.p, "label": s.label(),
                 "generators": list(s.generators)}
                for s in self.summands
            ]
        }


def _pick(gens: list, vector: list, used: set) -> str:
    best = None
    for g, c in zip(gens, vector):
        if g.label in used:
            continue
        if best is None or abs(c) > best[0]:
            best = (abs(c), g.label)
    used.add(best[1])
    return best[1]


def decompose(cx: MWChainComplex) -> DecompositionReport:
    """Split an eta-graded complex into free summands and cones of l*eta."""
    cx = minimal_complex(cx)
    if not cx.eta_graded:
        raise ValueError("complex is not eta-graded after cancelling unit pivots")
    summands = []
    blocks = sorted({g.weight - g.degree for g in cx.generators})
    for k in blocks:
        gens = {d: sorted([g for g in cx.generators if g.weight - g.degree == k and g.degree == d],
                          key=lambda g: g.label)
                for d in {g.degree for g in cx.generators}}
        degrees = sorted(d for d in gens if gens[d])
        used = set()
        for d in degrees:
            src, tgt = gens.get(d, []), gens.get(d - 1, [])
            if not src or not tgt:
                continue
            M = [[cx.entry(s.label, t.label).a for s in src] for t in tgt]
            snf = smith_normal_form(M)
            Uinv = _inverse_columns(snf.U)
            for idx, l in enumerate(snf.diagonal):
                if l == 0:
                    continue
                top = _pick(src, snf.V.column(idx), used)
                bottom = _pick(tgt, Uinv[idx], used)
                summands.append(Summand("cone", l, tgt[0].weight, d - 1, (bottom, top)))
        for d in degrees:
            for g in gens[d]:
                if g.label not in used:
                    summands.append(Summand("free", 0, g.weight, d, (g.label,)))
    summands.sort(key=lambda s: (s.p, s.q, s.l, s.generators))
    return DecompositionReport(tuple(summands))


def _inverse_columns(U: IntMatrix) -> list:
    from .intlin import unimodular_inverse

    inv = unimodular_inverse(U)
    return [inv.column(j) for j in range(inv.cols)]


def _kmw(q: int) -> str:
    return f"K^MW_{q}"


@dataclass(frozen=True)
class SheafTerm:
    label: str
    alias: str
    multiplicity: int


@dataclass(frozen=True)
class HomologySheafReport:
    degrees: dict  # degree -> tuple of SheafTerm

    def labels(self, d: int) -> list:
        return [t.label for t in self.degrees.get(d, ())]

    def render(self, d: int) -> str:
        terms = self.degrees.get(d, ())
        if not terms:
            return "0"
        parts = []
        for t in terms:
            base = t.label if t.multiplicity == 1 else f"({t.label})^{t.multiplicity}"
            parts.append(base)
        return " ⊕ ".join(parts)

    def as_dict(self) -> dict:
        return {
            str(d): [{"label": t.label, "alias": t.alias, "multiplicity": t.multiplicity} for t in terms]
            for d, terms in sorted(self.degrees.items())
        }


def homology_sheaves(report: DecompositionReport) -> HomologySheafReport:
    counts = {}

    def add(d, label, alias):
        counts.setdefault(d, {})
        key = (label, alias)
        counts[d][key] = counts[d].get(key, 0) + 1

    for s in report.summands:
        if s.kind == "free":
            label = "Z" if s.q == 0 else _kmw(s.q)
            add(s.p, label, label)
            continue
        if s.l == 1:
            add(s.p, f"{_kmw(s.q)}/η", f"K^M_{s.q}")
            add(s.p + 1, f"_{{η}}{_kmw(s.q + 1)}", f"2K^M_{s.q + 1}")
        else:
            add(s.p, f"{_kmw(s.q)}/{s.l}η", f"{_kmw(s.q)}/{s.l}η")
            add(s.p + 1, f"_{{{s.l}η}}{_kmw(s.q + 1)}", f"_{{{s.l}η}}{_kmw(s.q + 1)}")
    degrees = {}
    for d, terms in counts.items():
        degrees[d] = tuple(SheafTerm(lab, alias, n) for (lab, alias), n in sorted(terms.items()))
    return HomologySheafReport(degrees)


def _sum(terms: list) -> str:
    counts = {}
    for t in terms:
        counts[t] = counts.get(t, 0) + 1
    parts = [t if n == 1 else f"({t})^{n}" for t, n in counts.items()]
    return " ⊕ ".join(parts) or "0"


@dataclass(frozen=True)
class MotiveReport:
    motivic: tuple
    mw_motivic: tuple
    eta_inverted: tuple
    rational: tuple

    def as_dict(self) -> dict:
        return {
            "motivic": list(self.motivic),
            "mw_motivic": list(self.mw_motivic),
            "eta_inverted": list(self.eta_inverted),
            "rational": list(self.rational),
            "motivic_sum": _sum(list(self.motivic)),
            "mw_motivic_sum": _sum(list(self.mw_motivic)),
        }


def _tate(q: int, p: int, tilde: bool = False, field_: str = "Z") -> str:
    base = field_ + ("~" if tilde else "")
    return f"{base}({q})[{p}]"


def rational_motive(cx: MWChainComplex) -> list:
    """Q(q)[p] terms after setting eta = [-1] = 0, h = 2 and inverting integers."""
    cx = minimal_complex(cx)
    out = []
    for w in sorted({g.weight for g in cx.generators}):
        gens = {d: sorted([g for g in cx.generators if g.weight == w and g.degree == d], key=lambda g: g.label)
                for d in {g.degree for g in cx.generators}}
        ranks = {}
        for d in gens:
            src, tgt = gens[d], gens.get(d - 1, [])
            if src and tgt:
                M = [[cx.entry(s.label, t.label).reduce(0, 0, 2) if cx.entry(s.label, t.label).degree == 0 else 0
                      for s in src] for t in tgt]
                ranks[d] = smith_normal_form(M).rank
        for d in sorted(gens):
            betti = len(gens[d]) - ranks.get(d, 0) - ranks.get(d + 1, 0)
            out += [_tate(w, w + d, field_="Q")] * betti
    return sorted(out, key=_motive_key)


def _motive_key(label: str) -> tuple:
    q = int(label[label.index("(") + 1:label.index(")")])
    p = int(label[label.index("[") + 1:label.index("]")])
    return (-q, -p, label)


def motive_reports(report: DecompositionReport, cx: Optional[MWChainComplex] = None) -> MotiveReport:
    motivic, mw, inverted = [], [], []
    for s in report.summands:
        if s.kind == "free":
            motivic.append(_tate(s.q, s.q + s.p))
            term = _tate(s.q, s.q + s.p, tilde=True)
            mw.append(term)
            inverted.append(term)
            continue
        motivic.append(_tate(s.q, s.q + s.p))
        motivic.append(_tate(s.q + 1, s.q + s.p + 2))
        term = _tate(s.q, s.q + s.p, tilde=True) + f"//{s.l}·η"
        mw.append(term)
        if s.l != 1:
            inverted.append(term)
    if cx is not None:
        rational = rational_motive(cx)
    else:
        rational = [t.replace("Z", "Q") for t in motivic]
    return MotiveReport(
        tuple(sorted(motivic, key=_motive_key)),
        tuple(sorted(mw, key=lambda t: _motive_key(t.split("//")[0]))),
        tuple(sorted(inverted, key=lambda t: _motive_key(t.split("//")[0]))),
        tuple(sorted(rational, key=_motive_key)),
    )


@dataclass(frozen=True)
class ChowBasis:
    generators: tuple  # (face mask, codim, parent facet mask)
    ranks: tuple

    def as_dict(self) -> dict:
        return {
            "ranks": list(self.ranks),
            "generators": [{"face": face_label(t), "codim": c, "facet": face_label(f)} for t, c, f in self.generators],
        }


def chow_basis(fan: Fan, order=None) -> ChowBasis:
    from .simplicial import restriction_data

    data = restriction_data(fan.K, fan.order if order is None else order)
    gens = []
    for k, f in enumerate(data.sequence):
        for t in data.min_sets[k]:
            gens.append((t, size(t), f))
    ranks = [0] * (fan.n + 1)
    for _, c, _ in gens:
        ranks[c] += 1
    return ChowBasis(tuple(gens), tuple(ranks))


def chow_witt(report: DecompositionReport) -> dict:
    """CH~^q labels, for decompositions whose generators sit in chain degree = weight."""
    groups = {}
    for s in report.summands:
        if s.p != s.q:
            raise ValueError("Chow-Witt table needs weight = chain degree for every generator")
        if s.kind == "free":
            groups.setdefault(s.q, []).append("GW")
        elif s.l == 1:
            groups.setdefault(s.q, []).append("2Z")
            groups.setdefault(s.q + 1, []).append("Z")
        else:
            groups.setdefault(s.q, []).append(f"ker({s.l}η: GW → W)")
            groups.setdefault(s.q + 1, []).append(f"GW/{s.l}η")
    return {q: _group_label(v) for q, v in sorted(groups.items())}


def _group_label(parts: list) -> str:
    counts = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    order = ["2Z", "Z", "GW"]
    keys = sorted(counts, key=lambda p: (order.index(p) if p in order else 3, p))
    return " ⊕ ".join(p if counts[p] == 1 else f"{p}^{counts[p]}" for p in keys)


def surface_chow_witt_table(l: int, a_sigma: int) -> dict:
    """The CH~ table for complete smooth surfaces with l rays."""
    if a_sigma % 2 == 0:
        return {0: "GW", 1: _group_label(["GW"] * (l - 2)), 2: "GW"}
    return {0: "GW", 1: _group_label(["2Z"] + ["GW"] * (l - 3)), 2: "Z"}


def orientation_change_matrix(a: int) -> list:
    """[[<-1>^a, (a)_eps eta], [0, 1]] for a ray with self-intersection a."""
    return [[bracket_unit(a), n_epsilon(a) * eta_power(1)], [zero(1), ONE]]


def surface_report(fan: Fan) -> dict:
    data = surface_data(fan)
    if not data.complete:
        raise ValueError("surface_report needs a complete surface fan")
    l = len(data.rays)
    if l % 2 and data.a_sigma % 2 == 0:
        raise ValueError("odd number of rays with even a_Sigma contradicts the surface relations")
    cx = lambda_complex(fan)
    dec = decompose(cx)
    return {
        "surface": {
            "rays": [r + 1 for r in data.rays],
            "a": {str(k + 1): v for k, v in sorted(data.a.items())},
            "a_sigma": data.a_sigma,
            "orientation_changes": {
                str(k + 1): [[render(c) for c in row] for row in orientation_change_matrix(v)]
                for k, v in sorted(data.a.items())
            },
        },
        "complex": minimal_complex(cx).as_dict(),
        "decomposition": dec.as_dict(),
        "homology": homology_sheaves(dec).as_dict(),
        "chow_witt": {str(q): g for q, g in chow_witt(dec).items()},
        "chow_witt_table": {str(q): g for q, g in surface_chow_witt_table(l, data.a_sigma).items()},
        "motives": motive_reports(dec, cx).as_dict(),
    }


def real_toric_data(fan: Fan) -> dict:
    """Homology of the integer complex with differential 2 * critical differential."""
    cx = lambda_complex(fan)
    out = {}
    for d in cx.degrees():
        src, tgt = cx.in_degree(d), cx.in_degree(d - 1)
        above = cx.in_degree(d + 1)
        d_out = IntMatrix.from_rows([[2 * cx.entry(s.label, t.label).a for s in src] for t in tgt], len(src))
        d_in = IntMatrix.from_rows([[2 * cx.entry(s.label, t.label).a for s in above] for t in src], len(above))
        out[d] = homology_at(d_in, d_out)
    return out


def decomposition_torsion(report: DecompositionReport) -> dict:
    """Predicted (free rank, torsion) per degree after substituting eta -> 2."""
    out = {}
    for s in report.summands:
        free, tors = out.get(s.p, (0, []))
        if s.kind == "free":
            out[s.p] = (free + 1, tors)
        else:
            out[s.p] = (free, tors + [2 * s.l])
    return {d: (f, tuple(sorted(t))) for d, (f, t) in out.items()}
