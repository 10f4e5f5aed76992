"""Sparse chain complexes and Gaussian elimination of unit pivots.

Coefficients are either ``int`` or ``MWConstant``; both support ``+``, ``*``
and unary minus, which is all the elimination needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def is_zero(c) -> bool:
    return c == 0 if isinstance(c, int) else c.is_zero()


def is_unit(c) -> bool:
    return c in (1, -1) if isinstance(c, int) else c.is_unit()


def inverse(c):
    return c if isinstance(c, int) else c.inverse()


@dataclass
class SparseComplex:
    """Generators per degree and a boundary ``gen -> {face: coeff}``."""

    degree: dict = field(default_factory=dict)
    boundary: dict = field(default_factory=dict)

    def add(self, gen, deg: int, bd: dict | None = None):
        self.degree[gen] = deg
        self.boundary[gen] = {k: v for k, v in (bd or {}).items() if not is_zero(v)}

    def gens(self, deg: int) -> list:
        return [g for g, d in self.degree.items() if d == deg]

    def coboundary(self) -> dict:
        co = {g: set() for g in self.degree}
        for g, bd in self.boundary.items():
            for f in bd:
                co[f].add(g)
        return co

    def eliminate(self, a, b, co: dict | None = None):
        """Cancel the pair a = face, b = cell with unit coefficient <db, a>."""
        u = self.boundary[b].get(a)
        if u is None or not is_unit(u):
            raise ArithmeticError(f"pivot {a!r} <- {b!r} is not a unit")
        uinv = inverse(u)
        db = self.boundary[b]
        if co is None:
            co = self.coboundary()
        for x in list(co[a]):
            if x == b:
                continue
            bx = self.boundary[x]
            c = bx.pop(a)
            factor = -(c * uinv)
            for y, v in db.items():
                if y == a:
                    continue
                nv = bx.get(y)
                nv = factor * v if nv is None else nv + factor * v
                if is_zero(nv):
                    bx.pop(y, None)
                    co[y].discard(x)
                else:
                    bx[y] = nv
                    co[y].add(x)
        for x in co[b]:
            self.boundary[x].pop(b, None)
        for y in db:
            co[y].discard(b)
        for y in self.boundary[a]:
            co[y].discard(a)
        for g in (a, b):
            del self.degree[g]
            del self.boundary[g]
            del co[g]
        return co

    def square_is_zero(self) -> bool:
        for g, bd in self.boundary.items():
            acc = {}
            for f, c in bd.items():
                for y, v in self.boundary[f].items():
                    acc[y] = c * v if y not in acc else acc[y] + c * v
            if any(not is_zero(v) for v in acc.values()):
                return False
        return True
