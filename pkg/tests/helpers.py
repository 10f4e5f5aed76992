import itertools
import random

from toricmw.simplicial import build_complex, mask


def _shells(seq) -> bool:
    # boundary condition only; vertex coverage is irrelevant here
    for j in range(1, len(seq)):
        traces = {p & seq[j] for p in seq[:j]}
        top = [t for t in traces if not any(t != u and t & u == t for u in traces)]
        if any(bin(t).count("1") != bin(seq[j]).count("1") - 1 for t in top):
            return False
    return True


def random_shellable(rng: random.Random, m: int, dim: int, steps: int = 12):
    """A pure complex together with a shelling, grown one facet at a time."""
    pool = [mask(c) for c in itertools.combinations(range(m), dim + 1)]
    rng.shuffle(pool)
    order = [pool.pop()]
    for _ in range(steps):
        rng.shuffle(pool)
        for f in pool:
            if _shells(order + [f]):
                order.append(f)
                pool.remove(f)
                break
    # drop unused vertices so no isolated points sneak in
    used = [v for v in range(m) if any(g >> v & 1 for g in order)]
    index = {v: k for k, v in enumerate(used)}
    facets = [[index[v] for v in used if g >> v & 1] for g in order]
    K = build_complex(len(used), facets)
    return K, tuple(mask(f) for f in facets)


def trimmed(groups):
    groups = [(g.free_rank, g.torsion) for g in groups]
    while groups and groups[-1] == (0, ()):
        groups.pop()
    return groups
