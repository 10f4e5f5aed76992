"""Fans (K, lambda): validation, row sets, canonical transforms, chart changes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Optional, Sequence

from .intlin import IntMatrix, extend_to_basis, is_lattice_basis_part, determinant, solve_integer
from .mwring import CubicalCell, SectionMatrix
from .simplicial import (
    SimplicialComplex,
    build_complex,
    face_label,
    mask,
    members,
    restriction_data,
    size,
)


@dataclass(frozen=True)
class Fan:
    K: SimplicialComplex
    lam: IntMatrix
    order: tuple
    name: str = field(default="", compare=False)
    virtual: int = 0  # trailing vertices added only to complete low-dimensional facets

    def __post_init__(self):
        if self.lam.cols != self.K.m:
            raise ValueError(f"lambda has {self.lam.cols} columns, expected m = {self.K.m}")
        if sorted(self.order) != sorted(self.K.facets):
            raise ValueError("order must list every facet exactly once")

    @property
    def m(self) -> int:
        return self.K.m

    @property
    def n(self) -> int:
        return self.lam.rows

    def ray(self, j: int) -> list:
        return self.lam.column(j)

    def columns(self, face: int) -> IntMatrix:
        verts = members(face)
        return IntMatrix.from_rows([[self.lam[i, j] for j in verts] for i in range(self.n)], len(verts))

    @cached_property
    def restriction(self):
        return restriction_data(self.K, self.order)

    def first_facet(self, face: int) -> int:
        return self.order[self.restriction.first_facet(face)]

    def r(self, face: int) -> int:
        """r(f(face))."""
        return self.restriction.restriction[self.restriction.first_facet(face)]

    @property
    def real_vertices(self) -> int:
        return self.m - self.virtual

    def completed(self) -> "Fan":
        """Same cones, with virtual rays completing every small facet to a lattice basis."""
        if all(size(f) == self.n for f in self.order):
            return self
        cols = [self.ray(j) for j in range(self.m)]
        facets, m = [], self.m
        for f in self.order:
            extra = extend_to_basis(self.columns(f)) if size(f) < self.n else []
            new = members(f) + list(range(m, m + len(extra)))
            cols += extra
            m += len(extra)
            facets.append(new)
        lam = IntMatrix.from_rows([[c[i] for c in cols] for i in range(self.n)], m)
        K = build_complex(m, facets)
        order = tuple(mask(f) for f in facets)
        return Fan(K, lam, order, self.name, self.virtual + m - self.m)


def make_fan(m: int, facets: Sequence[Sequence[int]], lam, order: Optional[Sequence[int]] = None,
             name: str = "") -> Fan:
    """Build a fan from 0-based facets; ``order`` indexes into ``facets``."""
    K = build_complex(m, facets)
    lam = lam if isinstance(lam, IntMatrix) else IntMatrix.from_rows(lam, m)
    given = [mask(f) for f in facets]
    idx = range(len(given)) if order is None else order
    seq = []
    for k in idx:
        f = given[k]
        if f in K.facets and f not in seq:
            seq.append(f)
    seq += [f for f in K.facets if f not in seq]
    return Fan(K, lam, tuple(seq), name)


@dataclass(frozen=True)
class ValidationReport:
    smooth: bool
    failures: tuple
    surjective: bool
    pure: bool
    m_exceeds_n: bool
    complete: bool

    @property
    def ok(self) -> bool:
        return self.smooth and self.surjective

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "smooth": self.smooth,
            "failures": list(self.failures),
            "surjective": self.surjective,
            "pure": self.pure,
            "m_exceeds_n": self.m_exceeds_n,
            "complete": self.complete,
        }


def _is_complete(fan: Fan) -> bool:
    n = fan.n
    if not fan.K.is_pure or any(size(f) != n for f in fan.K.facets):
        return False
    if n == 2:
        try:
            return surface_data(fan).complete
        except ValueError:
            return False
    # every ridge in two facets, on opposite sides
    ridges = {}
    for f in fan.K.facets:
        for v in members(f):
            ridges.setdefault(f & ~(1 << v), []).append(v)
    for ridge, apexes in ridges.items():
        if len(apexes) != 2:
            return False
        base = [fan.ray(j) for j in members(ridge)]
        signs = [determinant([list(r) for r in zip(*(base + [fan.ray(v)]))]) for v in apexes]
        if signs[0] * signs[1] >= 0:
            return False
    return True


def validate(fan: Fan) -> ValidationReport:
    failures = tuple(face_label(f) for f in fan.order if not is_lattice_basis_part(fan.columns(f)))
    surjective = fan.m >= fan.n and is_lattice_basis_part(fan.lam.transpose())
    return ValidationReport(
        smooth=not failures,
        failures=failures,
        surjective=surjective,
        pure=fan.K.is_pure,
        m_exceeds_n=fan.m > fan.n,
        complete=not failures and _is_complete(fan),
    )


@dataclass(frozen=True)
class RowSetTable:
    rows: tuple
    assignment: tuple  # per facet in order: tuple of kappa indices with r(sigma) = sigma & omega

    def facet_row(self, k: int) -> int:
        return self.rows[self.assignment[k][0]]


def row_set(fan: Fan, kappa: int) -> int:
    out = 0
    for j in range(fan.m):
        dot = sum(fan.lam[i, j] for i in range(fan.n) if kappa >> i & 1)
        if dot & 1:
            out |= 1 << j
    return out


def row_sets(fan: Fan) -> RowSetTable:
    rows = tuple(row_set(fan, k) for k in range(1 << fan.n))
    assignment = []
    for k, f in enumerate(fan.order):
        r = fan.restriction.restriction[k]
        hits = tuple(i for i, w in enumerate(rows) if f & w == r)
        if size(f) == fan.n and len(hits) != 1:
            raise RuntimeError(f"facet {face_label(f)} matches {len(hits)} row sets")
        assignment.append(hits)
    return RowSetTable(rows, tuple(assignment))


@dataclass(frozen=True)
class CanonicalTransform:
    cell: CubicalCell
    r: SectionMatrix


def canonical_transform(fan: Fan, e: CubicalCell) -> CanonicalTransform:
    sigma = mask(e.sigma)
    if sigma not in fan.K:
        raise ValueError("sigma_e is not a face")
    f = fan.first_facet(sigma)
    basis = fan.columns(f)
    fverts = members(f)
    entries = {}
    for i in e.tau_star:
        if f >> i & 1:
            continue
        x = solve_integer(basis, fan.ray(i))
        if x is None:
            raise RuntimeError("no integer solution for the canonical transform")
        entries[(i, i)] = -1
        for j, c in zip(fverts, x):
            entries[(i, j)] = c
    r = SectionMatrix(entries)
    for i in e.tau_star:
        total = [sum(r[i, j] * fan.lam[k, j] for j in range(fan.m)) for k in range(fan.n)]
        if any(total):
            raise RuntimeError("canonical transform row is not in ker(lambda)")
    return CanonicalTransform(e, r)


def chart_matrix(fan: Fan, source: int, target: int) -> dict:
    """E[i][j]: coordinates of lambda(v_i), i in source, in the basis lambda(v_j), j in target."""
    basis = fan.columns(target)
    tverts = members(target)
    out = {}
    for i in members(source):
        x = solve_integer(basis, fan.ray(i))
        if x is None:
            raise RuntimeError("target facet is not a lattice basis")
        out[i] = {j: c for j, c in zip(tverts, x) if c}
    return out


def transition_section(fan: Fan, sigma: int, source: int, target: int) -> SectionMatrix:
    """Section moving cells of U_sigma from the source chart to the target chart.

    Rows run over the torus coordinates source - sigma; r' = r + delta equals the
    chart matrix, so composites of chart changes multiply.
    """
    if sigma & source != sigma or sigma & target != sigma:
        raise ValueError("sigma must lie in both facets")
    E = chart_matrix(fan, source, target)
    entries = {}
    for i in members(source & ~sigma):
        for j, c in E[i].items():
            entries[(i, j)] = entries.get((i, j), 0) + c
        entries[(i, i)] = entries.get((i, i), 0) - 1
    return SectionMatrix(entries)


def orientation_change(fan: Fan, ray: int, source: int, target: int) -> list:
    """2x2 matrix comparing the two orientations of the ray cell of a surface.

    Rows/columns are ([e_t], [e_0]), the twisted and untwisted cells.  The
    torus coordinates of the two charts are identified, which removes the eps
    coming from inverting that coordinate.
    """
    from .mwring import EPSILON, action_coefficient, zero, ONE

    g = transition_section(fan, 1 << ray, source, target)
    (u,) = members(source & ~(1 << ray))
    (w,) = members(target & ~(1 << ray))
    others = set(range(fan.m)) - {ray, u}
    e = CubicalCell({ray}, others, {u})
    flip = EPSILON
    return [
        [flip * action_coefficient(g, e, {w}), action_coefficient(g, e, set())],
        [zero(1), ONE],
    ]


@dataclass(frozen=True)
class SurfaceData:
    rays: tuple  # vertex indices in counterclockwise order
    a: dict  # vertex -> self-intersection number
    a_sigma: int
    complete: bool


def _angle(v) -> float:
    return math.atan2(v[1], v[0]) % (2 * math.pi)


def surface_data(fan: Fan) -> SurfaceData:
    """Self-intersection numbers a_i with v_{i-1} + v_{i+1} + a_i v_i = 0."""
    if fan.n != 2:
        raise ValueError("surface data needs n = 2")
    rays = tuple(sorted(range(fan.m), key=lambda j: _angle(fan.ray(j))))
    l = len(rays)
    cones = {f for f in fan.K.facets if size(f) == 2}
    adjacent = []
    for k in range(l):
        u, v = rays[k], rays[(k + 1) % l]
        if l > 1 and (1 << u | 1 << v) in cones:
            det = determinant([[fan.ray(u)[0], fan.ray(v)[0]], [fan.ray(u)[1], fan.ray(v)[1]]])
            if det != 1:
                raise ValueError(f"cone {face_label(1 << u | 1 << v)} is not smooth")
            adjacent.append(True)
        else:
            adjacent.append(False)
    complete = l >= 3 and all(adjacent) and len(cones) == l
    a = {}
    for k in range(l):
        if not (adjacent[k - 1] and adjacent[k]):
            continue
        prev, cur, nxt = (fan.ray(rays[(k + d) % l]) for d in (-1, 0, 1))
        s = [prev[0] + nxt[0], prev[1] + nxt[1]]
        x = solve_integer([[cur[0]], [cur[1]]], s)
        if x is None:
            raise ValueError("neighbouring rays do not satisfy the surface relation")
        a[rays[k]] = -x[0]
    a_sigma = reduce(math.gcd, a.values(), 0)
    return SurfaceData(rays, a, a_sigma, complete)


def projective_space(n: int) -> Fan:
    m = n + 1
    lam = [[int(i == j) for j in range(n)] + [-1] for i in range(n)]
    facets = [[j for j in range(m) if j != k] for k in reversed(range(m))]
    return make_fan(m, facets, lam, name=f"projective_space({n})")


def hirzebruch(a: int) -> Fan:
    lam = [[0, 1, 0, -1], [1, 0, -1, a]]
    facets = [[0, 1], [1, 2], [2, 3], [0, 3]]
    return make_fan(4, facets, lam, name=f"hirzebruch({a})")


def surface_from_rays(rays: Sequence[Sequence[int]], name: str = "") -> Fan:
    """Complete 2D fan on the given rays, cones between angular neighbours."""
    rays = [list(r) for r in rays]
    ccw = sorted(range(len(rays)), key=lambda j: _angle(rays[j]))
    facets = [sorted((ccw[k], ccw[(k + 1) % len(ccw)])) for k in range(len(ccw))]
    lam = [[r[0] for r in rays], [r[1] for r in rays]]
    return make_fan(len(rays), facets, lam, name=name or "surface")


_EXOTIC_LAMBDA = [[0, 1, 0, -1], [1, 0, -1, 0]]


def exotic_nonshellable() -> Fan:
    return make_fan(4, [[0, 1], [2, 3]], _EXOTIC_LAMBDA, name="exotic_nonshellable")


def exotic_nonpure() -> Fan:
    return make_fan(4, [[0, 1], [1, 2], [3]], _EXOTIC_LAMBDA, name="exotic_nonpure")


def star_subdivide(fan: Fan, face: int) -> Fan:
    """Stellar subdivision at ``face``: new ray lambda = sum of the face's rays."""
    if size(face) < 2 or face not in fan.K:
        raise ValueError("can only subdivide a face of size >= 2")
    new = fan.m
    ray = [sum(fan.lam[i, j] for j in members(face)) for i in range(fan.n)]
    facets = []
    for f in fan.order:
        if f & face == face:
            facets += [members(f & ~(1 << i)) + [new] for i in members(face)]
        else:
            facets.append(members(f))
    lam = [[fan.lam[i, j] for j in range(fan.m)] + [ray[i]] for i in range(fan.n)]
    return make_fan(fan.m + 1, facets, lam, name=fan.name)


def random_surface(rng, rays: int) -> Fan:
    """Complete smooth surface with the given number of rays, by repeated star subdivision."""
    if rays < 3:
        raise ValueError("a complete surface needs at least 3 rays")
    if rays == 3:
        seed = [[1, 0], [0, 1], [-1, -1]]
    else:
        a = rng.randint(-3, 3)
        seed = [[0, 1], [1, 0], [0, -1], [-1, a]] if rng.random() < 0.75 or rays == 4 else [[1, 0], [0, 1], [-1, -1]]
    current = [list(v) for v in seed]
    while len(current) < rays:
        fan = surface_from_rays(current)
        ccw = surface_data(fan).rays
        k = rng.randrange(len(ccw))
        u, v = fan.ray(ccw[k]), fan.ray(ccw[(k + 1) % len(ccw)])
        current.append([u[0] + v[0], u[1] + v[1]])
    return surface_from_rays(current, name=f"random_surface({rays})")


def random_fan(rng, max_m: int = 6, max_n: int = 3) -> Fan:
    """Smooth fan with m <= max_m: a subdivided product of projective spaces, possibly with facets dropped."""
    n = rng.randint(1, max_n)
    parts, left = [], n
    while left:
        k = rng.randint(1, left)
        parts.append(k)
        left -= k
    fan = _product([projective_space(k) for k in parts])
    while fan.m < max_m and rng.random() < 0.5:
        faces = [f for f in fan.K.faces if size(f) >= 2]
        if not faces:
            break
        fan = star_subdivide(fan, rng.choice(sorted(faces)))
    if fan.m > max_m:
        return random_fan(rng, max_m, max_n)
    if rng.random() < 0.4 and len(fan.order) > 1:
        keep = [members(f) for f in fan.order if rng.random() < 0.7] or [members(fan.order[0])]
        fan = make_fan(fan.m, keep, fan.lam, name="random_subfan")
    order = list(range(len(fan.order)))
    rng.shuffle(order)
    return make_fan(fan.m, [members(f) for f in fan.order], fan.lam, order=order, name="random_fan")


def _product(fans: list) -> Fan:
    m = sum(f.m for f in fans)
    n = sum(f.n for f in fans)
    lam = [[0] * m for _ in range(n)]
    facets = [[]]
    moff = noff = 0
    for f in fans:
        for i in range(f.n):
            for j in range(f.m):
                lam[noff + i][moff + j] = f.lam[i, j]
        facets = [a + [moff + v for v in members(b)] for a in facets for b in f.order]
        moff += f.m
        noff += f.n
    return make_fan(m, facets, lam, name="product")


BUILTINS = {
    "projective_space": projective_space,
    "hirzebruch": hirzebruch,
    "surface_from_rays": surface_from_rays,
    "exotic_nonshellable": exotic_nonshellable,
    "exotic_nonpure": exotic_nonpure,
}


def builtin(name: str, *params) -> Fan:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin fan {name!r}; choose from {sorted(BUILTINS)}") from None
    return factory(*params)
