"""Embedded golden corpus and coefficient oracle, run by ``toricmw selftest``."""

from __future__ import annotations

import itertools
import random
from typing import Callable, Iterator

from . import cellular, fan as fans
from .mwring import CubicalCell, SectionMatrix, action_coefficient, action_coefficient_bruteforce
from .simplicial import face_label


def _projective_chain(n: int) -> bool:
    cx = cellular.lambda_complex(fans.projective_space(n))
    for d in range(1, n + 1):
        (src,), (tgt,) = cx.in_degree(d), cx.in_degree(d - 1)
        c = cx.entry(src.label, tgt.label)
        want = (0, 0) if d % 2 else (-1, 1)
        if (c.degree, c.a) != want and not (d % 2 and c.is_zero()):
            return False
    return True


def _p2_canonical() -> bool:
    dec = cellular.decompose(cellular.canonical_complex(fans.projective_space(2)))
    kinds = sorted((s.kind, s.l, s.q, s.p) for s in dec.summands)
    return kinds == [("cone", 1, 1, 1), ("free", 0, 0, 0)]


def _hirzebruch_rows(a: int) -> bool:
    rows = {face_label(w) for w in fans.row_sets(fans.hirzebruch(a)).rows}
    want = {"∅", "134", "24", "123"} if a % 2 else {"∅", "13", "24", "1234"}
    return rows == want


def _hirzebruch_chow_witt(a: int) -> bool:
    dec = cellular.decompose(cellular.lambda_complex(fans.hirzebruch(a)))
    want = {0: "GW", 1: "2Z ⊕ GW", 2: "Z"} if a % 2 else {0: "GW", 1: "GW^2", 2: "GW"}
    return cellular.chow_witt(dec) == want


def _exotic(name: str, want: list) -> bool:
    fan = fans.builtin(name)
    dec = cellular.decompose(cellular.canonical_complex(fan))
    got = cellular.motive_reports(dec).mw_motivic
    return sorted(got) == sorted(want) and list(cellular.chow_basis(fan).ranks) == [1, 2, 0]


def golden_cases() -> Iterator[tuple]:
    for n in range(1, 7):
        yield f"projective_space({n}) eta chain", lambda n=n: _projective_chain(n)
    yield "P2 canonical pathway", _p2_canonical
    for a in range(4):
        yield f"hirzebruch({a}) row sets", lambda a=a: _hirzebruch_rows(a)
        yield f"hirzebruch({a}) Chow-Witt", lambda a=a: _hirzebruch_chow_witt(a)
    yield "exotic non-shellable", lambda: _exotic(
        "exotic_nonshellable", ["Z~(2)[3]", "Z~(1)[2]", "Z~(1)[2]", "Z~(0)[0]"])
    yield "exotic non-pure", lambda: _exotic(
        "exotic_nonpure", ["Z~(1)[2]", "Z~(2)[3]", "Z~(1)[2]", "Z~(0)[0]"])


def oracle_cases(count: int, seed: int = 0) -> Iterator[tuple]:
    """Random cells and sections compared against the brute-force sum."""
    rng = random.Random(seed)
    for k in range(count):
        ns, ntau = rng.randint(0, 2), rng.randint(0, 4)
        t = rng.randint(0, min(3, ntau))
        tau = list(range(ns, ns + ntau))
        star = set(rng.sample(tau, t))
        e = CubicalCell(range(ns), set(tau) - star, star)
        cols = sorted(e.sigma | e.tau)
        r = SectionMatrix({(i, j): rng.randint(-2, 2) for i in star for j in cols})
        omega = {j for j in tau if rng.random() < 0.5}

        def check(r=r, e=e, omega=omega):
            return action_coefficient(r, e, omega) == action_coefficient_bruteforce(r, e, omega)

        yield f"oracle #{k}", check


def coefficient_grid(full: int = 625, sample: int = 150, seed: int = 0) -> Iterator[tuple]:
    """(cell, section, omega) over all shapes with t <= 3, |tau| <= 4, |sigma| <= 2.

    Section entries range over [-2, 2]; a shape is enumerated exhaustively when
    it has at most ``full`` sections, otherwise ``sample`` seeded draws are used.
    """
    rng = random.Random(seed)
    for s in range(3):
        for n in range(5):
            sigma, tau = list(range(s)), list(range(s, s + n))
            for t in range(min(3, n) + 1):
                for star in itertools.combinations(tau, t):
                    e = CubicalCell(sigma, set(tau) - set(star), star)
                    for w in range(n + 1):
                        for omega in itertools.combinations(tau, w):
                            slots = [(i, j) for i in star for j in sigma + list(omega)]
                            if 5 ** len(slots) <= full:
                                values = itertools.product(range(-2, 3), repeat=len(slots))
                            else:
                                values = (tuple(rng.randint(-2, 2) for _ in slots) for _ in range(sample))
                            for v in values:
                                yield e, SectionMatrix(dict(zip(slots, v))), frozenset(omega)


def run(corpus: bool = True, oracle: int = 200, out: Callable[[str], None] = print) -> bool:
    cases = list(golden_cases()) if corpus else []
    cases += list(oracle_cases(oracle))
    ok = True
    for name, fn in cases:
        try:
            passed = bool(fn())
        except Exception as exc:  # a crash is a failure, reported with its message
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'} {name}")
    out(f"{sum(1 for _ in cases)} cases, {'all passed' if ok else 'FAILURES'}")
    return ok
