"""Simplicial complexes, shellings, restriction data and critical complexes.

Faces are bitmasks over the vertex set {0, ..., m-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .intlin import IntMatrix, homology_at
from .reduction import SparseComplex


def mask(vertices: Iterable[int]) -> int:
    out = 0
    for v in vertices:
        out |= 1 << v
    return out


def members(face: int) -> list:
    out, v = [], 0
    while face:
        if face & 1:
            out.append(v)
        face >>= 1
        v += 1
    return out


def size(face: int) -> int:
    return bin(face).count("1")


def subsets(face: int):
    """All subfaces of ``face``, including 0 and ``face`` itself."""
    sub = face
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & face


def face_key(face: int) -> tuple:
    return (size(face), members(face))


def face_label(face: int) -> str:
    """1-based label, e.g. 0b1001 -> '14'."""
    return "".join(str(v + 1) for v in members(face)) or "∅"


@dataclass(frozen=True)
class SimplicialComplex:
    m: int
    facets: tuple

    @cached_property
    def faces(self) -> frozenset:
        out = set()
        for f in self.facets:
            out.update(subsets(f))
        out.add(0)
        return frozenset(out)

    def __contains__(self, face: int) -> bool:
        return any(face & f == face for f in self.facets)

    @property
    def is_pure(self) -> bool:
        return len({size(f) for f in self.facets}) <= 1

    @property
    def dimension(self) -> int:
        return max((size(f) for f in self.facets), default=0) - 1

    def faces_of_size(self, k: int) -> list:
        return sorted((f for f in self.faces if size(f) == k), key=face_key)


def build_complex(m: int, facets: Iterable[Iterable[int]]) -> SimplicialComplex:
    """Normalize a facet list over vertices 0..m-1; isolated vertices become facets."""
    masks = []
    for f in facets:
        f = list(f)
        for v in f:
            if not 0 <= v < m:
                raise ValueError(f"vertex {v} outside 0..{m - 1}")
        masks.append(mask(f))
    covered = 0
    for f in masks:
        covered |= f
    masks += [1 << v for v in range(m) if not covered >> v & 1]
    maximal = []
    for f in masks:
        if f in maximal:
            continue
        if any(f & g == f and f != g for g in masks):
            continue
        maximal.append(f)
    return SimplicialComplex(m, tuple(sorted(maximal, key=face_key)))


def restrict(K: SimplicialComplex, omega: int) -> SimplicialComplex:
    """Full subcomplex on the vertices of ``omega``, re-indexed to 0..|omega|-1."""
    verts = members(omega)
    index = {v: i for i, v in enumerate(verts)}
    traces = {f & omega for f in K.facets}
    return build_complex(len(verts), [[index[v] for v in members(t)] for t in traces])


@dataclass(frozen=True)
class RestrictionData:
    sequence: tuple
    min_sets: tuple
    restriction: tuple

    def first_facet(self, face: int) -> int:
        """Index of the first element of the sequence containing ``face``."""
        for i, s in enumerate(self.sequence):
            if face & s == face:
                return i
        raise ValueError(f"{face_label(face)} is not a face")

    def new_faces(self, i: int) -> list:
        return [t for t in subsets(self.sequence[i]) if self.first_facet(t) == i]

    @property
    def is_regular(self) -> bool:
        return all(len(ms) <= 1 for ms in self.min_sets)

    @property
    def is_pure(self) -> bool:
        return len({size(s) for s in self.sequence}) <= 1


def expanding_data(sequence: Sequence[int]) -> RestrictionData:
    """min and r for any sequence of faces (facets of K, or traces on a subset)."""
    mins, rs = [], []
    for i, s in enumerate(sequence):
        earlier = sequence[:i]
        new = [t for t in subsets(s) if not any(t & p == t for p in earlier)]
        minimal = [t for t in new if not any(u != t and u & t == u for u in new)]
        minimal.sort(key=lambda t: members(t))
        r = 0
        for t in minimal:
            r |= t
        mins.append(tuple(minimal))
        rs.append(r)
    return RestrictionData(tuple(sequence), tuple(mins), tuple(rs))


def restriction_data(K: SimplicialComplex, order: Optional[Sequence[int]] = None) -> RestrictionData:
    order = tuple(K.facets if order is None else order)
    if sorted(order) != sorted(K.facets):
        raise ValueError("order must list every facet exactly once")
    return expanding_data(order)


def _boundary_condition(prev: Sequence[int], facet: int) -> bool:
    if not prev:
        return True
    traces = {p & facet for p in prev}
    maximal = [t for t in traces if not any(t != u and t & u == t for u in traces)]
    return all(size(t) == size(facet) - 1 for t in maximal)


def is_shelling(K: SimplicialComplex, order: Sequence[int]) -> bool:
    if not K.is_pure:
        raise ValueError("shellings are only defined for pure complexes")
    order = list(order)
    return all(_boundary_condition(order[:j], order[j]) for j in range(len(order)))


def find_shelling(K: SimplicialComplex) -> Optional[tuple]:
    if not K.is_pure:
        raise ValueError("shellings are only defined for pure complexes")
    facets = sorted(K.facets, key=face_key)
    dead = set()

    def extend(prefix: list, used: int) -> Optional[list]:
        if len(prefix) == len(facets):
            return prefix
        if used in dead:
            return None
        for k, f in enumerate(facets):
            if used >> k & 1 or not _boundary_condition(prefix, f):
                continue
            found = extend(prefix + [f], used | 1 << k)
            if found:
                return found
        dead.add(used)
        return None

    found = extend([], 0)
    return tuple(found) if found else None


def boundary_sign(face: int, j: int) -> int:
    """(-1)^(face, j) with (face, j) = #{k in face : k < j}."""
    return -1 if size(face & ((1 << j) - 1)) & 1 else 1


def simplicial_boundary(face: int) -> dict:
    return {face & ~(1 << j): boundary_sign(face, j) for j in members(face)}


@dataclass(frozen=True)
class ZChainComplex:
    """Integer chain complex; ``differentials[d]`` maps degree d to degree d-1."""

    generators: tuple
    differentials: tuple

    def homology(self) -> list:
        out = []
        top = len(self.generators)
        for d in range(top):
            d_out = self.differentials[d]
            d_in = self.differentials[d + 1] if d + 1 < top else IntMatrix.zeros(len(self.generators[d]), 0)
            out.append(homology_at(d_in, d_out))
        return out

    def square_is_zero(self) -> bool:
        return all((self.differentials[d - 1] @ self.differentials[d]).is_zero()
                   for d in range(2, len(self.generators)))


def _assemble(gens_by_degree: list, boundary: dict) -> tuple:
    diffs = []
    for d, gens in enumerate(gens_by_degree):
        below = gens_by_degree[d - 1] if d else []
        pos = {g: k for k, g in enumerate(below)}
        rows = [[0] * len(gens) for _ in below]
        for c, g in enumerate(gens):
            for f, v in boundary.get(g, {}).items():
                rows[pos[f]][c] = int(v)
        diffs.append(IntMatrix.from_rows(rows, len(gens)))
    return tuple(tuple(g) for g in gens_by_degree), tuple(diffs)


def chain_complex(K: SimplicialComplex) -> ZChainComplex:
    """Augmented simplicial chain complex, chain degree = |face| with the empty face in degree 0."""
    top = K.dimension + 1
    gens = [K.faces_of_size(k) for k in range(top + 1)]
    bd = {f: simplicial_boundary(f) for f in K.faces}
    return ZChainComplex(*_assemble(gens, bd))


def augmented_homology(K: SimplicialComplex) -> list:
    """Homology by chain degree; entry d is the reduced homology of |K| in degree d-1."""
    return chain_complex(K).homology()


def reduced_homology(K: SimplicialComplex) -> list:
    """Reduced homology of |K|, indexed by topological degree."""
    return augmented_homology(K)[1:]


@dataclass(frozen=True)
class CriticalComplex:
    """Critical generators (sequence indices) with an integer differential."""

    generators: tuple
    faces: dict
    differentials: tuple
    boundary: dict = field(default_factory=dict)

    def homology(self) -> list:
        return ZChainComplex(self.generators, self.differentials).homology()

    def coefficient(self, source: int, target: int) -> int:
        return self.boundary.get(source, {}).get(target, 0)


def critical_complex(K: SimplicialComplex, order: Optional[Sequence[int]] = None,
                     omega: Optional[int] = None) -> CriticalComplex:
    """Morse-reduced chain complex of K_omega along the inherited sequence.

    The sequence is ``order`` traced on ``omega``; generators are labelled by
    their index in the sequence.  Non-critical faces are paired inside each
    interval [r(rho_i), rho_i] and cancelled by Gaussian elimination.
    """
    order = tuple(K.facets if order is None else order)
    if omega is None:
        omega = (1 << K.m) - 1
    seq = [f & omega for f in order]
    data = expanding_data(seq)
    if not data.is_regular:
        raise ValueError("inherited order is not a regular expanding sequence on K_omega")
    cx = SparseComplex()
    owner = {}
    for i, s in enumerate(seq):
        for t in data.new_faces(i):
            owner[t] = i
    for t in sorted(owner, key=face_key):
        cx.add(t, size(t), simplicial_boundary(t))
    co = cx.coboundary()
    for i, s in enumerate(seq):
        if not data.min_sets[i]:
            continue
        low = data.restriction[i]
        free = s & ~low
        if not free:
            continue
        v = free & -free
        # pair t with t + v for t in the interval not containing v
        pairs = [t for t in data.new_faces(i) if not t & v]
        for t in sorted(pairs, key=face_key):
            co = cx.eliminate(t, t | v, co)
    critical = {owner[t]: t for t in cx.degree}
    top = max((size(t) for t in critical.values()), default=0)
    gens = [[] for _ in range(top + 1)]
    for i in sorted(critical):
        gens[size(critical[i])].append(i)
    bd = {owner[t]: {owner[f]: c for f, c in b.items()} for t, b in cx.boundary.items()}
    generators, diffs = _assemble(gens, bd)
    return CriticalComplex(generators, critical, diffs, bd)
