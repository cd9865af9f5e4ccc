"""Symmetric sequences and (weight truncated) Schur functors.

O[A] = sum_n O(n) (x)_{S_n} A^{(x)n} is realised on orbit representatives:
the basis key of the class of o (x) a1 .. an is the pair (o, (a1, .., an))
that is least in the sortkey order among its S_n orbit.  Orbits whose
stabiliser acts by -1 are zero.
"""

from itertools import combinations, combinations_with_replacement, permutations, product

from .exactlin import (GradedComplex, GradedMap, Q, compose, compose_perm,
                       identity, invert_perm, koszul_permute, sortkey,
                       tensor_power, _acc, _sign)
from .contraction import Contraction, validate_contraction
from .report import Report
from . import thick as _thick


class SymmetricSequence:
    """O(n) for 0 <= n <= N with a signed-permutation S_n action.

    `basis[n]` lists (name, degree).  `act(sigma, o)` returns (sign, o').
    With symmetric=False the sequence is non-symmetric: no quotient is taken.
    """

    def __init__(self, basis, act=None, name="O", symmetric=True, fast=None):
        self.basis = {n: list(b) for n, b in basis.items()}
        self._act = act
        self.name = name
        self.symmetric = symmetric
        self.fast = fast
        self._deg = {n: dict(b) for n, b in self.basis.items()}

    @property
    def N(self):
        return max(self.basis) if self.basis else 0

    def arity_basis(self, n):
        return self.basis.get(n, [])

    def degree(self, n, o):
        return self._deg[n][o]

    def act(self, sigma, o):
        if self._act is None:
            return 1, o
        return self._act(sigma, o)

    def check_group_law(self, N=None):
        r = Report(f"{self.name} action")
        for n in range(2, (N or self.N) + 1):
            perms = list(permutations(range(n)))
            for o, _ in self.arity_basis(n):
                for s in perms:
                    for t in perms:
                        s1, o1 = self.act(t, o)
                        s2, o2 = self.act(s, o1)
                        s3, o3 = self.act(compose_perm(s, t), o)
                        ok = (o2 == o3 and s1 * s2 == s3)
                        if not ok:
                            r.add(f"n={n}", False, (o, s, t))
                            return r
            r.add(f"n={n}", True)
        return r

    def __repr__(self):
        return f"<SymmetricSequence {self.name}>"


def trivial_sequence(N):
    """S: S(0) = 0, S(n) = Q with trivial action (commutative operad)."""
    return SymmetricSequence({n: [("*", 0)] for n in range(1, N + 1)},
                             name="Com", fast="trivial")


def regular_sequence(N):
    """kS_n with left multiplication (associative operad)."""
    def act(sigma, tau):
        return 1, compose_perm(sigma, tau)
    return SymmetricSequence({n: [(p, 0) for p in permutations(range(n))]
                              for n in range(1, N + 1)}, act, name="As", fast="regular")


def nonsymmetric_sequence(N):
    """One operation in each arity, no symmetric group action."""
    return SymmetricSequence({n: [("*", 0)] for n in range(1, N + 1)},
                             name="nsAs", symmetric=False, fast="ns")


def tensor_product(O, P, N=None):
    """(O (x) P)(n) = sum_{p+q=n} Ind_{S_p x S_q}^{S_n} O(p) (x) P(q).

    Basis elements are (tau, p, o, x) where tau is a (p,q)-shuffle; sigma
    acts by writing sigma tau = tau' (alpha x beta)."""
    N = N if N is not None else O.N + P.N
    basis = {}
    for n in range(N + 1):
        b = []
        for p in range(n + 1):
            q = n - p
            for tau in _shuffles(p, q):
                for o, do in O.arity_basis(p):
                    for x, dx in P.arity_basis(q):
                        b.append(((tau, p, o, x), do + dx))
        if b:
            basis[n] = b

    def act(sigma, elt):
        tau, p, o, x = elt
        n = len(tau)
        st = compose_perm(sigma, tau)
        first = sorted(st[:p])
        second = sorted(st[p:])
        alpha = tuple(first.index(st[i]) for i in range(p))
        beta = tuple(second.index(st[p + j]) for j in range(n - p))
        s1, o2 = O.act(alpha, o) if p > 1 else (1, o)
        s2, x2 = P.act(beta, x) if n - p > 1 else (1, x)
        return s1 * s2, (tuple(first + second), p, o2, x2)

    return SymmetricSequence(basis, act, name=f"({O.name}(x){P.name})")


def _shuffles(p, q):
    """(p,q)-shuffles as tuples tau with tau[:p], tau[p:] increasing."""
    n = p + q
    out = []
    for first in combinations(range(n), p):
        rest = [i for i in range(n) if i not in first]
        out.append(tuple(list(first) + rest))
    return out


# --- Schur functor --------------------------------------------------------

class SchurValue(GradedComplex):
    """O[A] truncated at arity <= N_arity and weight <= N_weight.

    Weight of a class is the sum of the A-weights if A is weighted, and the
    arity otherwise.
    """

    def __init__(self, O, A, N_arity, N_weight=None, label=None):
        self.O, self.A = O, A
        self.N_arity = N_arity
        self.N_weight = N_weight
        self._norm_cache = {}
        degs, wts = {}, {}
        for n in range(0, N_arity + 1):
            for o, a in self._reps(n):
                w = self._weight_of(a)
                if N_weight is not None and w > N_weight:
                    continue
                degs[(o, a)] = O.degree(n, o) + sum(A.degree(k) for k in a)
                wts[(o, a)] = w
        self._keys = degs
        dcols = {}
        for key in degs:
            img = self._apply_tensor(key, A.d, 0)
            if img:
                dcols[key] = img
        super().__init__(degs, dcols, wts,
                         label=label or f"{O.name}[A]", check=False)

    def _weight_of(self, a):
        if self.A.weighted:
            return sum(self.A.weight(k) for k in a)
        return len(a)

    def _reps(self, n):
        O, A = self.O, self.A
        ob = O.arity_basis(n)
        if not ob:
            return []
        if O.fast == "trivial":
            out = []
            for a in combinations_with_replacement(A.basis, n):
                if any(a[i] == a[i + 1] and A.degree(a[i]) % 2 for i in range(n - 1)):
                    continue
                out.append(("*", a))
            return out
        if O.fast == "regular":
            idp = tuple(range(n))
            return [(idp, a) for a in product(A.basis, repeat=n)]
        if O.fast == "ns" or not O.symmetric:
            return [(o, a) for o, _ in ob for a in product(A.basis, repeat=n)]
        seen = set()
        out = []
        for o, _ in ob:
            for a in product(A.basis, repeat=n):
                r = self.normalize(o, a)
                if r is not None and r[1] not in seen:
                    seen.add(r[1])
                    out.append(r[1])
        out.sort(key=sortkey)
        return out

    def normalize(self, o, a):
        """(sign, representative) with o (x) a = sign * representative, or
        None if the class is zero."""
        key = (o, a)
        hit = self._norm_cache.get(key, False)
        if hit is not False:
            return hit
        res = self._normalize(o, a)
        self._norm_cache[key] = res
        return res

    def _normalize(self, o, a):
        O, A = self.O, self.A
        n = len(a)
        degs = [A.degree(k) for k in a]
        if not O.symmetric or n <= 1:
            return 1, (o, a)
        if O.fast == "trivial":
            order = sorted(range(n), key=lambda i: sortkey(a[i]))
            sigma = invert_perm(tuple(order))
            s, new = koszul_permute(sigma, a, degs)
            for i in range(n - 1):
                if new[i] == new[i + 1] and A.degree(new[i]) % 2:
                    return None
            return s, ("*", new)
        if O.fast == "regular":
            inv = invert_perm(o)
            s, new = koszul_permute(inv, a, degs)
            return s, (tuple(range(n)), new)
        orbit = {}
        for sigma in permutations(range(n)):
            s1, o2 = O.act(sigma, o)
            s2, a2 = koszul_permute(sigma, a, degs)
            k = (o2, a2)
            s = s1 * s2
            if k in orbit and orbit[k] != s:
                return None
            orbit[k] = s
        rep = min(orbit, key=sortkey)
        return orbit[rep], rep

    def _apply_tensor(self, key, m, m_degree_sign_o=0):
        """Image of the class `key` under 1 (x) m^{(x)n}-type maps given as a
        GradedMap m on A^{(x)n}; here used with the Leibniz differential."""
        o, a = key
        n = len(a)
        dom = tensor_power(self.A, n)
        if m is self.A.d:
            img = dom.d.cols.get(a, {})
        else:
            img = m.cols.get(a, {})
        out = {}
        so = _sign(self.O.degree(n, o) % 2) if m.degree % 2 else 1
        for t, c in img.items():
            r = self.normalize(o, t)
            if r is not None:
                if r[1] not in self._keys:
                    continue
                _acc(out, r[1], so * r[0] * c)
        return out

    def arity(self, key):
        return len(key[1])

    def embed(self, n, vec, o=None):
        """Class of o (x) vec for vec a vector on A^{(x)n}."""
        if o is None:
            ob = self.O.arity_basis(n)
            if len(ob) != 1 and self.O.fast != "regular":
                raise ValueError("ambiguous operation; pass o")
            o = tuple(range(n)) if self.O.fast == "regular" else ob[0][0]
        out = {}
        for a, c in vec.items():
            r = self.normalize(o, a)
            if r is not None and r[1] in self._keys:
                _acc(out, r[1], r[0] * c)
        return out


def schur_apply(O, A, N_arity, N_weight=None):
    return SchurValue(O, A, N_arity, N_weight)


def schur_on_thick(X, Y, f, check_symmetry=True):
    """O[f]: X = O[A] -> Y = O[B], o (x) a |-> (-1)^{|f||o|} o (x) f_n(a)."""
    if check_symmetry and X.O.symmetric and not f.symmetric:
        rep = _thick.check_symmetric(f, min(f.N, X.N_arity))
        if not rep.passed:
            raise ValueError("O[f] needs a symmetric thick map")
    cols = {}
    for key in X.basis:
        o, a = key
        n = len(a)
        if n > f.N:
            raise ValueError(f"thick map truncated below arity {n}")
        img = f[n].cols.get(a, {})
        so = _sign(f.degree * X.O.degree(n, o))
        out = {}
        for t, c in img.items():
            r = Y.normalize(o, t)
            if r is not None:
                if r[1] not in Y:
                    raise ValueError(f"image {r[1]!r} outside the truncation")
                _acc(out, r[1], so * r[0] * c)
        if out:
            cols[key] = out
    return GradedMap(X, Y, f.degree, cols)


def extended_schur_thick(X, Y, f, levels=2):
    """The thick map on O[A] whose level n acts on the (r1, .., rn) summand
    of O[A]^{(x)n} through f_{r1 + .. + rn}."""
    O, A = X.O, X.A
    w = X.N_weight
    if X.O.symmetric and not f.symmetric:
        rep = _thick.check_symmetric(f, min(f.N, X.N_arity))
        if not rep.passed:
            raise ValueError("the extended Schur functor needs a symmetric thick map")
    out = {}
    for n in range(levels + 1):
        src = tensor_power(X, n, w)
        tgt = tensor_power(Y, n, w)
        cols = {}
        for key in src.basis:
            os = [k[0] for k in key]
            chunks = [k[1] for k in key]
            rs = [len(ch) for ch in chunks]
            R = sum(rs)
            if R > f.N:
                raise ValueError(f"thick map truncated below arity {R}")
            flat = tuple(x for ch in chunks for x in ch)
            odeg = [O.degree(r, o) for r, o in zip(rs, os)]
            adeg = [sum(A.degree(x) for x in ch) for ch in chunks]
            # o1 a1 o2 a2 .. -> o1 o2 .. a1 a2 ..
            s_in = _regroup_sign(odeg, adeg)
            s_f = _sign(f.degree * sum(odeg))
            img = f[R].cols.get(flat, {})
            col = {}
            for t, c in img.items():
                pieces, pos = [], 0
                for r in rs:
                    pieces.append(t[pos:pos + r])
                    pos += r
                bdeg = [sum(Y.A.degree(x) for x in p) for p in pieces]
                s_out = _regroup_sign(odeg, bdeg)
                coef = s_in * s_f * s_out * c
                new = ()
                for o, p in zip(os, pieces):
                    nr = Y.normalize(o, p)
                    if nr is None:
                        coef = 0
                        break
                    coef *= nr[0]
                    new += (nr[1],)
                if coef:
                    if new not in tgt:
                        raise ValueError(f"image {new!r} outside the truncation")
                    _acc(col, new, coef)
            if col:
                cols[key] = col
        out[n] = GradedMap(src, tgt, f.degree, cols)
    res = _thick.ThickMap(X, Y, f.degree, out, w)
    res.symmetric = f.symmetric
    return res


def _regroup_sign(odeg, adeg):
    """Sign of o1 a1 o2 a2 .. on -> o1 .. on a1 .. an."""
    parity = 0
    for i in range(len(odeg)):
        parity += odeg[i] * sum(adeg[:i])
    return _sign(parity)


def _base_levels(X):
    """Arity needed from a thick map on A to act on O[A]^{(x)levels}."""
    return X.N_arity


def thick_tensor_trick(O, c, N_weight, levels=2, N_arity=None, symmetric=True):
    """Thick contraction from O[A] onto O[B] induced by c, with F, G the
    morphisms induced by f, g and H the extended Schur image of the
    symmetrized homotopy (or of the classical one for non-symmetric O)."""
    A, B = c.A, c.B
    if N_arity is None:
        N_arity = N_weight
    X = SchurValue(O, A, N_arity, N_weight)
    Y = SchurValue(O, B, N_arity, N_weight)
    R = levels * N_arity
    if not A.weighted:
        R = min(R, N_weight)
    bw = N_weight if A.weighted else None
    tf = _thick.extend_as_morphism(c.f, R, bw)
    tg = _thick.extend_as_morphism(c.g, R, bw)
    tf.symmetric = tg.symmetric = True
    if symmetric and O.symmetric:
        th = _thick.symmetrize_homotopy(c, R, bw)
    else:
        th = _thick.extend_as_derivation(c.h, identity(A), c.pi, R, bw)
        th.symmetric = False
    F = extended_schur_thick(X, Y, tf, levels)
    G = extended_schur_thick(Y, X, tg, levels)
    H = extended_schur_thick(X, X, th, levels)
    out = _thick.ThickContraction(F, G, H)
    out.X, out.Y = X, Y
    out.base_maps = (tf, tg, th)
    return out


# --- discs ----------------------------------------------------------------

def disc_complex(m, n, weight=None):
    """D(m, n): x in degree n, y in degree n - 1, d(x) = m y."""
    gens = [("x", n, weight), ("y", n - 1, weight)]
    return GradedComplex.from_generators(gens, {"x": [(m, "y")]} if m else {},
                                         label=f"D({m},{n})")


def disc_contraction(m=1, n=2):
    """Contraction of D(m, n) onto 0 (m != 0): h(y) = -x/m."""
    D = disc_complex(m, n)
    Z = GradedComplex({}, {}, label="0")
    f = GradedMap(D, Z, 0, {})
    g = GradedMap(Z, D, 0, {})
    h = GradedMap(D, D, 1, {"y": {"x": Q(-1, m)}})
    return Contraction(f, g, h)


def disc_decomposition_check(N=5):
    """S[D(1,2)] through weight N: weight-k part spanned by x^k, x^{k-1} y with
    d(x^k) = k x^{k-1} y; the induced homotopy sends x^{k-1} y to
    -x^k / k; every summand is contractible."""
    r = Report("S[D(1,2)] decomposition")
    c = disc_contraction(1, 2)
    O = trivial_sequence(N)
    tc = thick_tensor_trick(O, c, N, levels=1)
    X = tc.X
    H = tc.h[1]
    for k in range(1, N + 1):
        xs = ("*", ("x",) * k)
        xy = ("*", ("x",) * (k - 1) + ("y",))
        keys = sorted((key for key in X.basis if X.weight(key) == k), key=sortkey)
        r.add(f"weight {k}: basis x^{k}, x^{k - 1}y", keys == sorted([xs, xy], key=sortkey),
              keys)
        r.add(f"weight {k}: d(x^{k}) = {k} x^{k - 1}y", X.d.cols.get(xs) == {xy: Q(k)},
              X.d.cols.get(xs))
        hx = H.cols.get((xs,), {})
        hy = H.cols.get((xy,), {})
        r.add(f"weight {k}: h(x^{k}) = 0", not hx, hx)
        r.add(f"weight {k}: h(x^{k - 1}y) = -x^{k}/{k}", hy == {(xs,): Q(-1, k)}, hy)
    r.extend(validate_contraction(tc.level(1)), "level 1: ")
    from .exactlin import homology
    Hm, _, _ = homology(X)
    r.add("homology of S[D(1,2)] is 0", len(Hm) == 0, list(Hm.basis))
    return r


def check_classical_recovery(c, N):
    """Level 1 of the non-symmetric As tensor trick, built with the
    (1, gf)-derivation homotopy, against the directly evaluated classical
    formulas, entry by entry in each arity 1 <= n <= N."""
    w = None
    if c.A.weighted:
        w = N * max([c.A.top_weight() or 0, c.B.top_weight() or 0, 0])
    tc = thick_tensor_trick(nonsymmetric_sequence(N), c, w if w is not None else N,
                            levels=1, N_arity=N, symmetric=False)
    X, Y = tc.X, tc.Y
    r = Report("classical tensor trick recovery")
    for n in range(1, N + 1):
        F, G, H = _thick.classical_tensor_formulas(c, n)
        for name, got, want, src in (("F", tc.f[1], F, X), ("G", tc.g[1], G, Y), ("H", tc.h[1], H, X)):
            bad = None
            for key in src.basis:
                if len(key[1]) != n:
                    continue
                # level-1 thick maps act on one-fold tensors (key,)
                lhs = {t[0][1]: v for t, v in got.cols.get((key,), {}).items()}
                rhs = want.cols.get(key[1], {})
                if lhs != rhs:
                    bad = (key[1], lhs, rhs)
                    break
            r.add(f"arity {n} {name}", bad is None, bad)
    return r
