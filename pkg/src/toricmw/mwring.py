"""Graded Milnor-Witt coefficients and the toric action calculus.

Every coefficient that can arise from a torus section acting on a cubical
cell lives in one of three lattices, according to its degree d:

* d < 0: ``a * eta^(-d)``
* d = 0: ``a + b*h``  (a sub-ring of GW)
* d > 0: ``a * [-1]^d``

so a coefficient is stored as the triple ``(degree, a, b)`` with ``b`` only
meaningful in degree zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .intlin import determinant


def chi(n: int) -> int:
    """Mod-2 character."""
    return n & 1


@dataclass(frozen=True, order=True)
class MWConstant:
    degree: int
    a: int
    b: int = 0

    def __post_init__(self):
        if self.degree != 0 and self.b != 0:
            raise ValueError("h-part only exists in degree 0")

    @property
    def kind(self) -> str:
        if self.is_zero():
            return "zero"
        if self.degree < 0:
            return "eta"
        if self.degree > 0:
            return "bracket"
        return "gw"

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.degree == 0 and (self.a, self.b) in _UNITS

    def inverse(self) -> "MWConstant":
        # 1, -1, eps and <-1> all square to 1
        if not self.is_unit():
            raise ArithmeticError(f"{self} is not a unit")
        return self

    def __add__(self, other: "MWConstant") -> "MWConstant":
        return mw_add(self, other)

    def __sub__(self, other: "MWConstant") -> "MWConstant":
        return mw_add(self, -other)

    def __neg__(self) -> "MWConstant":
        return MWConstant(self.degree, -self.a, -self.b)

    def __mul__(self, other) -> "MWConstant":
        if isinstance(other, int):
            return MWConstant(self.degree, self.a * other, self.b * other)
        return mw_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MWConstant":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def reduce(self, eta: int, bracket: int, h: int) -> int:
        """Evaluate under a ring map sending eta, [-1], h to integers."""
        if self.degree < 0:
            return self.a * eta ** (-self.degree)
        if self.degree > 0:
            return self.a * bracket ** self.degree
        return self.a + self.b * h

    def __str__(self) -> str:
        return render(self)


_UNITS = {(1, 0), (-1, 0), (1, -1), (-1, 1)}


def zero(degree: int = 0) -> MWConstant:
    return MWConstant(degree, 0)


def gw(a: int, b: int = 0) -> MWConstant:
    return MWConstant(0, a, b)


def eta_power(k: int = 1, a: int = 1) -> MWConstant:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return MWConstant(-k, a)


def bracket_power(k: int = 1, a: int = 1) -> MWConstant:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return MWConstant(k, a)


ONE = gw(1)
H = gw(0, 1)
MINUS_ONE_BRACKET = gw(-1, 1)  # <-1> = h - 1
EPSILON = gw(1, -1)  # eps = 1 - h = -<-1>
ETA = eta_power(1)
BRACKET = bracket_power(1)


def mw_add(x: MWConstant, y: MWConstant) -> MWConstant:
    if x.degree != y.degree:
        raise ValueError(f"cannot add degree {x.degree} and degree {y.degree}")
    return MWConstant(x.degree, x.a + y.a, x.b + y.b)


def mw_mul(x: MWConstant, y: MWConstant) -> MWConstant:
    dx, dy = x.degree, y.degree
    degree = dx + dy
    if dx == 0 and dy == 0:
        return gw(x.a * y.a, x.a * y.b + x.b * y.a + 2 * x.b * y.b)
    if dx == 0 or dy == 0:
        # h kills both eta and [-1]
        return MWConstant(degree, x.a * y.a)
    if (dx < 0) == (dy < 0):
        return MWConstant(degree, x.a * y.a)
    k = min(abs(dx), abs(dy))
    c = x.a * y.a
    if degree != 0:
        return MWConstant(degree, c * (-2) ** k)
    # (eta[-1])^k = (-2)^(k-1) (h - 2)
    c *= (-2) ** (k - 1)
    return gw(-2 * c, c)


def mw_sum(values: Iterable[MWConstant], degree: int) -> MWConstant:
    out = zero(degree)
    for v in values:
        out = mw_add(out, v)
    return out


def n_epsilon(n: int) -> MWConstant:
    c = chi(n)
    return gw(c, (n - c) // 2)


def bracket_unit(e: int) -> MWConstant:
    """<-1>^e."""
    return MINUS_ONE_BRACKET if e & 1 else ONE


def eps_power(e: int) -> MWConstant:
    return EPSILON if e & 1 else ONE


def render(x: MWConstant) -> str:
    if x.is_zero():
        return "0"
    if x.degree < 0:
        return f"{x.a}·η^{-x.degree}"
    if x.degree > 0:
        return f"{x.a}·[-1]^{x.degree}"
    if x.b == 0:
        return f"{x.a}"
    if x.a == 0:
        return f"{x.b}·h"
    sign = "+" if x.b > 0 else "-"
    return f"{x.a} {sign} {abs(x.b)}·h"


@dataclass(frozen=True)
class CubicalCell:
    """Cubical cell: sigma = normal directions <x_i>, tau_one = {x_i = 1}, tau_star = {x_i != 0}."""

    sigma: frozenset
    tau_one: frozenset = frozenset()
    tau_star: frozenset = frozenset()

    def __post_init__(self):
        for name in ("sigma", "tau_one", "tau_star"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if (self.sigma & self.tau_one) or (self.sigma & self.tau_star) or (self.tau_one & self.tau_star):
            raise ValueError("cell labels must be pairwise disjoint")

    @property
    def tau(self) -> frozenset:
        return self.tau_one | self.tau_star

    @property
    def twist(self) -> int:
        return len(self.tau_star)

    @property
    def dim(self) -> int:
        return len(self.sigma)

    def label(self) -> str:
        def fmt(s):
            return "".join(str(i + 1) for i in sorted(s)) or "∅"
        return f"e[σ={fmt(self.sigma)}; τ1={fmt(self.tau_one)}; τ*={fmt(self.tau_star)}]"


@dataclass(frozen=True)
class SectionMatrix:
    """Integer matrix r_ij with rows i in tau_star of a cell; missing entries are 0."""

    entries: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: int(v) for k, v in dict(self.entries).items() if v}
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, ij) -> int:
        return self.entries.get(ij, 0)

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items())))

    def prime(self, i: int, j: int) -> int:
        """r'_ij = r_ij + delta_ij."""
        return self.entries.get((i, j), 0) + (1 if i == j else 0)

    @classmethod
    def identity(cls) -> "SectionMatrix":
        return cls({})


def _check_omega(e: CubicalCell, omega) -> frozenset:
    omega = frozenset(omega)
    if not omega <= e.tau:
        raise ValueError("omega must be a subset of tau_e")
    return omega


def _signed_sum(r: SectionMatrix, e: CubicalCell, omega: frozenset) -> int:
    rows = sorted(e.tau_star)
    cols = sorted(omega)
    sigma = sorted(e.sigma)
    # row sums over sigma are shared by every pi
    base = {i: sum(r.prime(i, j) for j in sigma) for i in rows}
    total = 0
    for k in range(len(cols) + 1):
        for pi in itertools.combinations(cols, k):
            term = 1
            for i in rows:
                if not chi(base[i] + sum(r.prime(i, j) for j in pi)):
                    term = 0
                    break
            if term:
                total += (-1) ** (len(cols) - k)
    return total


def action_coefficient(r: SectionMatrix, e: CubicalCell, omega) -> MWConstant:
    """Coefficient of [e_omega] in g_*[e], closed form."""
    omega = _check_omega(e, omega)
    t, w = e.twist, len(omega)
    s = _signed_sum(r, e, omega)
    if t > w:
        return eta_power(t - w, s)
    if t < w:
        k = w - t
        if s % 2 ** k:
            raise ArithmeticError("non-exact division by (-2)^k in action coefficient")
        return bracket_power(k, s // (-2) ** k)
    rows = sorted(e.tau_star)
    cols = sorted(omega)
    det = determinant([[r.prime(i, j) for j in cols] for i in rows])
    if (det - s) % 2:
        raise ArithmeticError("determinant and signed sum differ in parity")
    # (det*h - eta[-1]*s)/2 with eta[-1] = h - 2
    return gw(s, (det - s) // 2)


def action_coefficient_bruteforce(r: SectionMatrix, e: CubicalCell, omega) -> MWConstant:
    """Same coefficient, evaluated as the full sum over maps tau_star -> omega + {inf}."""
    omega = _check_omega(e, omega)
    rows = sorted(e.tau_star)
    cols = sorted(omega)
    t, w = len(rows), len(cols)
    inf = None
    targets = cols + [inf]

    def rp(i, j):
        if j is inf:
            return sum(r.prime(i, k) for k in e.sigma)
        return r.prime(i, j)

    def key(j):
        return float("inf") if j is inf else j

    total = zero(w - t)
    for f in itertools.product(targets, repeat=t):
        image = {j for j in f if j is not inf}
        k = len(image)
        inversions = sum(
            1 for a in range(t) for b in range(a + 1, t) if key(f[a]) > key(f[b])
        )
        term = eps_power(inversions)
        term = term * eta_power(t - k)
        term = term * bracket_power(w - k, (-1) ** (w - k))
        for j in cols:
            if j in image:
                continue
            below = [rows[a] for a in range(t) if f[a] is not inf and f[a] < j]
            if not chi(sum(rp(i, j) for i in below)):
                term = zero(term.degree)
                break
        if term.is_zero():
            continue
        for a, i in enumerate(rows):
            exponent = sum(rp(i, j) for j in targets if key(j) > key(f[a]))
            term = term * bracket_unit(exponent) * n_epsilon(rp(i, f[a]))
        total = total + term
    return total


def sigma_action(r: SectionMatrix, e: CubicalCell) -> dict:
    """Action of a section supported on the sigma columns, for every omega in tau_star."""
    rows = sorted(e.tau_star)
    sums = {i: sum(r[i, j] for j in e.sigma) for i in rows}
    out = {}
    for k in range(len(rows) + 1):
        for omega in itertools.combinations(rows, k):
            omega = frozenset(omega)
            coeff = eta_power(len(rows) - k)
            coeff = coeff * bracket_unit(sum(sums[i] for i in omega))
            for i in rows:
                if i not in omega and not chi(sums[i]):
                    coeff = zero(coeff.degree)
            out[omega] = coeff
    return out


def canonical_projection(e: CubicalCell, first_facet, restriction, r: SectionMatrix) -> MWConstant:
    """Coefficient of eta^t [e_0] in the projection of T_e[e] to the restriction complex.

    ``first_facet`` is f(sigma_e), ``restriction`` is r(f(sigma_e)) and ``r`` the
    canonical transform of e.  Returns a degree -t constant.
    """
    t = e.twist
    first_facet = frozenset(first_facet)
    if e.sigma != frozenset(restriction):
        return zero(-t)
    if t and e.tau_star & first_facet:
        return zero(-t)
    c = 1
    for i in e.tau_star:
        c *= chi(sum(r.prime(i, j) for j in e.sigma))
    return eta_power(t, c)
