"""Seeded random generators for complexes, contractions and perturbations.

Everything takes a `random.Random` so that a seed pins the instance.
"""

import random

from .exactlin import GradedComplex, GradedMap, Q, compose, identity
from .contraction import contraction_from_homology


def rng_from(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def small_rational(rng, allow_zero=True, denominators=(1, 1, 1, 2, 3)):
    while True:
        x = Q(rng.randint(-3, 3), rng.choice(denominators))
        if x or allow_zero:
            return x


def _names(n, prefix="e"):
    return [f"{prefix}{i}" for i in range(n)]


def _disc_layout(rng, rank, deg_range, wt_range):
    """Generators (name, degree, weight) and a weight-homogeneous disc-sum
    differential."""
    gens, diff = [], {}
    i = 0
    while i < rank:
        w = rng.randint(*wt_range) if wt_range else None
        if i + 1 < rank and rng.random() < 0.5:
            n = rng.randint(deg_range[0] + 1, deg_range[1])
            x, y = f"e{i}", f"e{i + 1}"
            gens += [(x, n, w), (y, n - 1, w)]
            diff[x] = {y: small_rational(rng, allow_zero=False)}
            i += 2
        else:
            gens.append((f"e{i}", rng.randint(*deg_range), w))
            i += 1
    return gens, diff


def _triangular_automorphism(rng, A, strict_weight=False, density=0.5,
                             same_weight=False):
    """phi = 1 + u with u degree 0, weight non-increasing, strictly upper
    triangular in the (weight, name) order; returns (phi, phi^{-1})."""
    order = sorted(A.basis, key=lambda k: ((A.weight(k) or 0), k))
    pos = {k: i for i, k in enumerate(order)}
    cols = {}
    for k in A.basis:
        col = {}
        for j in A.basis:
            if j == k or A.degree(j) != A.degree(k) or pos[j] >= pos[k]:
                continue
            if A.weighted:
                if A.weight(j) > A.weight(k):
                    continue
                if strict_weight and A.weight(j) == A.weight(k):
                    continue
                if same_weight and A.weight(j) != A.weight(k):
                    continue
            if rng.random() < density:
                x = small_rational(rng)
                if x:
                    col[j] = x
        if col:
            cols[k] = col
    u = GradedMap(A, A, 0, cols)
    phi = identity(A) + u
    inv = identity(A)
    p = identity(A)
    for _ in range(len(A)):
        p = -compose(u, p)
        if p.is_zero():
            break
        inv = inv + p
    return phi, inv


def random_complex(seed, rank=None, deg_range=(-3, 6), wt_range=None, max_rank=6):
    """Random finite complex; weight homogeneous differential when weighted."""
    rng = rng_from(seed)
    if rank is None:
        rank = rng.randint(1, max_rank)
    gens, diff = _disc_layout(rng, rank, deg_range, wt_range)
    D = GradedComplex.from_generators(gens, diff)
    phi, inv = _triangular_automorphism(rng, D, same_weight=True)
    d = compose(inv, compose(D.d, phi))
    return D.with_differential(d.cols)


def random_filtered_instance(seed, max_rank=6, deg_range=(-3, 6), wt_range=(0, 4),
                             nonzero=False):
    """(A, t): a weighted complex with weight-preserving d and a perturbation
    t that strictly lowers weight, with (d + t)^2 = 0.

    Built as phi^{-1} D phi where D is a sum of discs plus weight-lowering
    terms into cycles, and phi is a weight non-increasing unipotent map; the
    weight-preserving part is d and the rest is t.
    """
    if nonzero and max_rank < 3:
        raise ValueError("a nonzero weight-lowering perturbation needs rank >= 3")
    rng = rng_from(seed)
    while True:
        A, t = _filtered_draw(rng, max_rank, deg_range, wt_range)
        if not nonzero or not t.is_zero():
            return A, t


def _filtered_draw(rng, max_rank, deg_range, wt_range):
    rank = rng.randint(min(3, max_rank), max_rank)
    # a narrow degree window makes equal-degree generators of different
    # weights likely, which is where the interesting perturbations live
    lo = rng.randint(deg_range[0], deg_range[1] - 1)
    window = (lo, min(lo + rng.randint(1, 2), deg_range[1]))
    gens, diff = _disc_layout(rng, rank, window, wt_range)
    cycles = [g for g in gens if g[0] not in diff]
    for x, n, w in gens:
        if x in diff:
            for y, m, v in cycles:
                if m == n - 1 and v < w and rng.random() < 0.8:
                    diff[x][y] = small_rational(rng, allow_zero=False)
    D = GradedComplex.from_generators(gens, diff)
    phi, inv = _triangular_automorphism(rng, D, density=0.6)
    dprime = compose(inv, compose(D.d, phi))
    same, lower = {}, {}
    for k, col in dprime.cols.items():
        for j, c in col.items():
            tgt = same if D.weight(j) == D.weight(k) else lower
            tgt.setdefault(k, {})[j] = c
    A = D.with_differential(same)
    t = GradedMap(A, A, -1, lower)
    return A, t


def random_contraction(seed, max_rank=6, deg_range=(-3, 6), wt_range=None):
    rng = rng_from(seed)
    A = random_complex(rng, rng.randint(1, max_rank), deg_range, wt_range)
    return contraction_from_homology(A)


def random_map(seed, A, B, degree, density=0.5):
    rng = rng_from(seed)
    cols = {}
    for k in A.basis:
        col = {}
        for j in B.basis:
            if B.degree(j) == A.degree(k) + degree and rng.random() < density:
                x = small_rational(rng)
                if x:
                    col[j] = x
        if col:
            cols[k] = col
    return GradedMap(A, B, degree, cols)


def random_general_contraction(seed, rank_B=(1, 3), discs=(1, 2), deg_range=(0, 2),
                               wt_range=None):
    """A contraction whose target B has its own differential.

    A = phi (B + discs) phi^{-1} for a random unipotent phi, with the
    standard contraction of the discs transported along phi.
    """
    from .contraction import Contraction
    rng = rng_from(seed)
    nb = rng.randint(*rank_B)
    gens, diff = _disc_layout(rng, nb, deg_range, wt_range)
    gens = [("b" + g[0][1:],) + tuple(g[1:]) for g in gens]
    diff = {"b" + k[1:]: {"b" + t[1:]: c for t, c in v.items()} for k, v in diff.items()}
    B0 = GradedComplex.from_generators(gens, diff)
    phiB, invB = _triangular_automorphism(rng, B0, same_weight=True)
    B = B0.with_differential(compose(invB, compose(B0.d, phiB)).cols)
    agens = [(k, B.degree(k), B.weight(k)) for k in B.basis]
    adiff = {k: dict(v) for k, v in B.d.cols.items()}
    hcols = {}
    for i in range(rng.randint(*discs)):
        n = rng.randint(deg_range[0] + 1, deg_range[1])
        w = rng.randint(*wt_range) if wt_range else None
        m = small_rational(rng, allow_zero=False)
        x, y = f"c{2 * i}", f"c{2 * i + 1}"
        agens += [(x, n, w), (y, n - 1, w)]
        adiff[x] = {y: m}
        hcols[y] = {x: -1 / m}
    A0 = GradedComplex.from_generators(agens, adiff)
    f0 = GradedMap(A0, B, 0, {k: {k: Q(1)} for k in B.basis})
    g0 = GradedMap(B, A0, 0, {k: {k: Q(1)} for k in B.basis})
    h0 = GradedMap(A0, A0, 1, hcols)
    phi, inv = _triangular_automorphism(rng, A0, same_weight=True)
    A = A0.with_differential(compose(phi, compose(A0.d, inv)).cols)
    f = compose(f0, inv).retarget(source=A)
    g = compose(phi, g0).retarget(target=A)
    h = compose(phi, compose(h0, inv)).retarget(A, A)
    return Contraction(f, g, h)


def random_disc_sum(seed, rank=None, deg_range=(0, 2), wt_range=(1, 3), max_rank=4):
    """A sum of discs and single generators in the standard basis."""
    rng = rng_from(seed)
    if rank is None:
        rank = rng.randint(2, max_rank)
    gens, diff = _disc_layout(rng, rank, deg_range, wt_range)
    return GradedComplex.from_generators(gens, diff)
