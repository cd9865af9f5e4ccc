"""Free algebras and cofree coalgebras over As, Com and non-symmetric As,
thick maps between them, and the filtered perturbation statements.

Carriers are SchurValue complexes O[A].  A free algebra multiplies by
concatenating the A-words; the cofree coalgebra on the same carrier
comultiplies by deconcatenation (tensor case) or unshuffles (symmetric
case).  Weight truncation is a quotient for products and a subcoalgebra
for coproducts.
"""

from itertools import permutations, product

from .exactlin import (GradedComplex, GradedMap, Q, compose, identity,
                       invert_perm, koszul_permute, permute_tensor,
                       tensor_power, tensor_maps, _acc, _sign)
from .contraction import Contraction, perturb
from .report import Report
from . import schur as _schur
from . import thick as _thick

KINDS = ("associative", "commutative", "nonsymmetric-associative")


def operad_sequence(kind, N):
    if kind == "associative":
        return _schur.regular_sequence(N)
    if kind == "commutative":
        return _schur.trivial_sequence(N)
    if kind == "nonsymmetric-associative":
        return _schur.nonsymmetric_sequence(N)
    raise ValueError(f"unknown operad kind {kind!r}")


def _concat(X, keys):
    """o_id (x) (a_1 .. a_n) for a list of X-keys; (sign, key) or None."""
    flat = tuple(x for k in keys for x in k[1])
    n = len(flat)
    if X.O.fast == "regular":
        o = tuple(range(n))
    else:
        o = "*"
    r = X.normalize(o, flat)
    if r is None or r[1] not in X:
        return None
    return r


class OAlgebra:
    """Free O-algebra on A, truncated at weight N.

    ops[(n, o)] is the structure map X^{(x)n} -> X of the operation o in
    O(n); for the regular sequence mu_sigma = mu_id o sigma^{-1}.
    """

    def __init__(self, kind, A, N, op_arity=3):
        self.kind = kind
        self.O = operad_sequence(kind, max(N, op_arity))
        self.X = _schur.SchurValue(self.O, A, N, N)
        self.A = A
        self.N = N
        self.op_arity = op_arity
        self._ops = {}

    @property
    def carrier(self):
        return self.X

    def operations(self, max_arity=None):
        n_max = self.op_arity if max_arity is None else max_arity
        return [(n, o) for n in range(2, n_max + 1) for o, _ in self.O.arity_basis(n)]

    def op(self, n, o=None):
        X = self.X
        if o is None:
            o = tuple(range(n)) if self.O.fast == "regular" else "*"
        key = (n, o)
        if key in self._ops:
            return self._ops[key]
        src = tensor_power(X, n, X.N_weight)
        if self.O.fast == "regular" and o != tuple(range(n)):
            m = compose(self.op(n), permute_tensor(invert_perm(o), n, X, X.N_weight))
        else:
            cols = {}
            for k in src.basis:
                r = _concat(X, k)
                if r is not None:
                    cols[k] = {r[1]: Q(r[0])}
            m = GradedMap(src, X, 0, cols)
        self._ops[key] = m
        return m

    def mul(self, u, v):
        """Binary product of two vectors."""
        out = {}
        m = self.op(2)
        for a, c in u.items():
            for b, e in v.items():
                for t, x in m.cols.get((a, b), {}).items():
                    _acc(out, t, c * e * x)
        return out

    def generator(self, a):
        """The class of a generator a of A."""
        return {k: Q(1) for k in [self._gen_key(a)]}

    def _gen_key(self, a):
        return ((0,), (a,)) if self.O.fast == "regular" else ("*", (a,))

    def word(self, key):
        """Generators of a basis key, in order, together with the sign
        relating the key to their product (always +1 for these bases)."""
        return list(key[1])

    def morphism_from_generators(self, target, values):
        """Algebra map X -> target.X sending generator a to values[a]."""
        X, Y = self.X, target.X
        cols = {}
        for key in X.basis:
            vec = None
            for a in self.word(key):
                img = values.get(a, target.generator(a) if a in target.A else {})
                vec = dict(img) if vec is None else target.mul(vec, img)
                if not vec:
                    break
            if vec:
                cols[key] = vec
        return GradedMap(X, Y, 0, cols)

    def derivation_from_generators(self, values, degree=-1):
        """Derivation X -> X extending a -> values[a] with Koszul signs."""
        X = self.X
        cols = {}
        for key in X.basis:
            w = self.word(key)
            out = {}
            acc = 0
            for i, a in enumerate(w):
                img = values.get(a)
                if img:
                    s = _sign(degree * acc)
                    left = None
                    for b in w[:i]:
                        left = self.generator(b) if left is None else self.mul(left, self.generator(b))
                    vec = dict(img) if left is None else self.mul(left, img)
                    for b in w[i + 1:]:
                        vec = self.mul(vec, self.generator(b))
                    for t, c in vec.items():
                        _acc(out, t, s * c)
                acc += self.A.degree(a)
            if out:
                cols[key] = out
        return GradedMap(X, X, degree, cols)

    def check_axioms(self, max_arity=3):
        """Associativity, the iterated-product description of higher
        operations, and equivariance, within the truncation."""
        X = self.X
        w = X.N_weight
        r = Report(f"free {self.kind} algebra")
        m2 = self.op(2)
        one = identity(X)
        X3 = tensor_power(X, 3, w)
        X2 = tensor_power(X, 2, w)
        lhs = compose(m2, tensor_maps([m2, one], X3, X2))
        rhs = compose(m2, tensor_maps([one, m2], X3, X2))
        r.add_map_equal("associativity", lhs, rhs)
        for n in range(3, max_arity + 1):
            Xn = tensor_power(X, n, w)
            Xn1 = tensor_power(X, n - 1, w)
            it = compose(self.op(n - 1), tensor_maps([m2] + [one] * (n - 2), Xn, Xn1))
            r.add_map_equal(f"mu_{n} = mu_{n - 1}(mu_2 (x) 1..)", self.op(n), it)
        for n, o in self.operations(max_arity):
            if not self.O.symmetric:
                continue
            for s in permutations(range(n)):
                P = permute_tensor(s, n, X, w)
                sgn, so = self.O.act(s, o)
                lhs = compose(self.op(n, so), P) * sgn
                if lhs != self.op(n, o):
                    r.add(f"equivariance n={n}", False, (o, s))
                    break
            else:
                r.add(f"equivariance n={n} o={o}", True)
        return r


def free_algebra(kind, A, N, op_arity=3):
    return OAlgebra(kind, A, N, op_arity)


def check_oalgebra_thick(f, Aalg, Balg, max_arity=None, derivation=False):
    """f_1 mu_A = (-1)^{|mu||f|} mu_B f_n for every basis operation mu of
    arity 2 <= n <= min(N, levels of f).  All operations have degree 0."""
    n_max = min(f.N, Aalg.op_arity if max_arity is None else max_arity)
    r = Report("thick map of O-algebras")
    f1 = f[1]
    for n, o in Aalg.operations(n_max):
        muA = Aalg.op(n, o)
        muB = Balg.op(n, o)
        lhs = _unwrap_compose(f1, muA)
        rhs = compose(muB, f[n])
        r.add_map_equal(f"op arity {n} {o}", lhs, rhs)
    return r


def _unwrap_compose(f1, mu):
    """f_1 o mu where f_1 acts on 1-tuples and mu lands in the base carrier."""
    cols = {}
    for k, col in mu.cols.items():
        out = {}
        for t, c in col.items():
            for u, x in f1.cols.get((t,), {}).items():
                _acc(out, u[0], c * x)
        if out:
            cols[k] = out
    return GradedMap(mu.source, f1.target.factors[0], mu.degree + f1.degree, cols)


def check_weight_preserving(m, drop=0):
    for k, col in m.cols.items():
        for t in col:
            if m.target.weight(t) > m.source.weight(k) - drop:
                return k
    return None


class OAlgebraContraction:
    def __init__(self, tc, Aalg, Balg):
        self.tc = tc
        self.Aalg, self.Balg = Aalg, Balg

    f = property(lambda self: self.tc.f)
    g = property(lambda self: self.tc.g)
    h = property(lambda self: self.tc.h)

    def validate(self, levels=None):
        tc = self.tc
        L = tc.N if levels is None else levels
        r = tc.validate(L)
        r.extend(_thick.check_morphism(tc.f, L), "F ")
        r.extend(_thick.check_morphism(tc.g, L), "G ")
        r.extend(_thick.check_pseudo_derivation(tc.h, L), "H ")
        r.extend(check_oalgebra_thick(tc.f, self.Aalg, self.Balg, L), "F ")
        r.extend(check_oalgebra_thick(tc.g, self.Balg, self.Aalg, L), "G ")
        r.extend(check_oalgebra_thick(tc.h, self.Aalg, self.Aalg, L), "H ")
        for name, m in (("F", tc.f[1]), ("G", tc.g[1]), ("H", tc.h[1])):
            bad = check_weight_preserving(m)
            r.add(f"{name} preserves the weight filtration", bad is None, bad)
        return r


def oalgebra_tensor_trick(kind, c, N, levels=2, symmetric=True, op_arity=None):
    """Contraction of free O-algebras induced by c, with H the extended
    Schur image of the symmetrized homotopy (or of the classical homotopy
    when symmetric=False, allowed only for non-symmetric As)."""
    op_arity = levels if op_arity is None else op_arity
    Aalg = OAlgebra(kind, c.A, N, op_arity)
    Balg = OAlgebra(kind, c.B, N, op_arity)
    if not symmetric and Aalg.O.symmetric:
        raise ValueError("the classical homotopy is not symmetric; use the non-symmetric operad")
    tc = _schur.thick_tensor_trick(Aalg.O, c, N, levels, N_arity=N, symmetric=symmetric)
    # reuse the algebra carriers so that all maps share complexes
    assert tc.X == Aalg.X and tc.Y == Balg.X
    return OAlgebraContraction(tc, Aalg, Balg)


def random_generator_values(alg, rng, strict=True, density=0.6):
    """For each generator a a random element of the same degree and strictly
    smaller weight (weight-lowering substitution)."""
    from .random_instances import small_rational
    X = alg.X
    vals = {}
    for a in alg.A.basis:
        w = alg.A.weight(a) if alg.A.weighted else 1
        cands = [k for k in X.basis if X.degree(k) == alg.A.degree(a) and X.weight(k) < w]
        vec = {}
        for k in cands:
            if rng.random() < density:
                x = small_rational(rng)
                if x:
                    vec[k] = x
        if vec:
            vals[a] = vec
    return vals


def random_derivation_perturbation(alg, seed, twist=True, need_delta=False,
                                   attempts=50):
    """A weight-lowering derivation t of the free algebra with (d + t)^2 = 0.

    Start from the derivation delta that sends some generator cycles of
    weight > w0 to products of generator cycles of weight <= w0 (so that
    d delta + delta d + delta^2 = 0), then conjugate d + delta by the algebra
    automorphism phi(a) = a + u(a) with u weight-lowering:
    t = phi^{-1} (d + delta) phi - d.
    """
    from .random_instances import rng_from
    rng = rng_from(seed)
    for _ in range(attempts):
        t = _draw_derivation(alg, rng, twist, need_delta)
        if t is not None:
            return t
    raise ValueError("no derivation with a nonzero cycle part on this algebra")


def _draw_derivation(alg, rng, twist, need_delta):
    from .random_instances import small_rational
    X, A = alg.X, alg.A
    wt = (lambda a: A.weight(a)) if A.weighted else (lambda a: 1)
    # generators that are cycles but not boundaries, so that delta(d a) = 0
    hit = {t for col in A.d.cols.values() for t in col}
    cycles = [a for a in A.basis if not A.d.cols.get(a) and a not in hit]
    delta = {}
    if cycles:
        w0 = rng.choice(sorted({wt(a) for a in cycles}))
        low = {a for a in cycles if wt(a) <= w0}
        for a in cycles:
            if wt(a) <= w0:
                continue
            cands = [k for k in X.basis if X.degree(k) == A.degree(a) - 1
                     and X.weight(k) < wt(a) and set(k[1]) <= low]
            vec = {}
            for k in cands:
                if rng.random() < 0.7:
                    x = small_rational(rng)
                    if x:
                        vec[k] = x
            if vec:
                delta[a] = vec
    if need_delta and not delta:
        return None
    D = X.d + alg.derivation_from_generators(delta)
    if not twist:
        return GradedMap(X, X, -1, (D - X.d).cols)
    u = random_generator_values(alg, rng)
    vals = {a: _add(alg.generator(a), u.get(a, {})) for a in A.basis}
    phi = alg.morphism_from_generators(alg, vals)
    one = identity(X)
    nil = phi - one
    inv, p = one, one
    for _ in range(X.N_weight + 1):
        p = -compose(nil, p)
        if p.is_zero():
            break
        inv = inv + p
    t = compose(inv, compose(D, phi)) - X.d
    return GradedMap(X, X, -1, t.cols)


def _add(u, v):
    out = dict(u)
    for k, c in v.items():
        _acc(out, k, c)
    return out


class PerturbedOAlgebra:
    def __init__(self, pt, Aalg, Balg, At_alg, Bt_alg, t):
        self.pt = pt
        self.Aalg, self.Balg = Aalg, Balg
        self.t = t

    def validate(self, levels=None):
        pt = self.pt
        tc = pt.contraction
        L = tc.N if levels is None else levels
        r = pt.validate(L)
        # structure maps are unchanged; only the differentials moved
        r.extend(check_oalgebra_thick(_relabel(tc.f, self.Aalg.X, self.Balg.X),
                                      self.Aalg, self.Balg, L), "f' ")
        r.extend(check_oalgebra_thick(_relabel(tc.g, self.Balg.X, self.Aalg.X),
                                      self.Balg, self.Aalg, L), "g' ")
        r.extend(check_oalgebra_thick(_relabel(tc.h, self.Aalg.X, self.Aalg.X),
                                      self.Aalg, self.Aalg, L), "h' ")
        r.extend(check_oalgebra_thick(pt.t_prime, self.Balg, self.Balg, L), "t' ")
        for name, m in (("f'", tc.f[1]), ("g'", tc.g[1]), ("h'", tc.h[1])):
            bad = check_weight_preserving(m)
            r.add(f"{name} preserves the weight filtration", bad is None, bad)
        bad = check_weight_preserving(pt.t_prime[1], 1)
        r.add("t' lowers weight", bad is None, bad)
        return r


def _relabel(f, X, Y):
    """Same levels viewed between tensor powers of X and Y (same bases)."""
    w = f.max_weight
    levels = {n: m.retarget(tensor_power(X, n, w), tensor_power(Y, n, w))
              for n, m in f.levels.items()}
    return _thick.ThickMap(X, Y, f.degree, levels, w)


def perturb_oalgebra(otc, t, max_terms=None):
    """Filtered perturbation of a contraction of free O-algebras by a
    weight-lowering derivation t of the source algebra."""
    r = Report("perturbation input")
    tt = _thick.extend_as_derivation(t, N=otc.tc.N, max_weight=otc.tc.h.max_weight)
    rep = check_oalgebra_thick(tt, otc.Aalg, otc.Aalg)
    if not rep.passed:
        raise ValueError("t is not a derivation of the O-algebra")
    bad = check_weight_preserving(t, 1)
    if bad is not None:
        raise ValueError(f"t does not lower weight at {bad!r}")
    sq = compose(otc.Aalg.X.d + t, otc.Aalg.X.d + t)
    if not sq.is_zero():
        raise ValueError(f"(d + t)^2 != 0 at {sq.first_nonzero()!r}")
    pt = _thick.perturb_thick(otc.tc, t, max_terms)
    return PerturbedOAlgebra(pt, otc.Aalg, otc.Balg, None, None, t)


# --- coalgebras -----------------------------------------------------------

class CCoalgebra:
    """Cofree conilpotent coalgebra on V truncated at arity N: the tensor
    coalgebra (deconcatenation) or the symmetric coalgebra (unshuffles)."""

    def __init__(self, kind, V, N):
        if kind not in ("tensor", "symmetric", "nonsymmetric-tensor"):
            raise ValueError(f"unknown coalgebra kind {kind!r}")
        self.kind = kind
        seq = {"tensor": _schur.regular_sequence,
               "symmetric": _schur.trivial_sequence,
               "nonsymmetric-tensor": _schur.nonsymmetric_sequence}[kind](N)
        self.V = V
        self.N = N
        self.X = _schur.SchurValue(seq, V, N, N)
        self._delta = {}

    @property
    def carrier(self):
        return self.X

    @property
    def symmetric(self):
        return self.kind == "symmetric"

    def key(self, word):
        """Basis key of the word v1 .. vn (sign, key) or None."""
        n = len(word)
        o = tuple(range(n)) if self.X.O.fast == "regular" else "*"
        return self.X.normalize(o, tuple(word))

    def splittings(self, word, n):
        """Yields (sign, [piece_1, .., piece_n]) for the n-fold coproduct."""
        k = len(word)
        if not self.symmetric:
            for cuts in _compositions(k, n):
                pieces, pos = [], 0
                for c in cuts:
                    pieces.append(word[pos:pos + c])
                    pos += c
                yield 1, pieces
            return
        degs = [self.V.degree(v) for v in word]
        for labels in product(range(n), repeat=k):
            if len(set(labels)) != n:
                continue
            order = sorted(range(k), key=lambda i: (labels[i], i))
            sigma = invert_perm(tuple(order))
            s, new = koszul_permute(sigma, word, degs)
            pieces, pos = [], 0
            for j in range(n):
                c = labels.count(j)
                pieces.append(new[pos:pos + c])
                pos += c
            yield s, pieces

    def delta(self, n):
        """Delta_n: X -> X^{(x)n} into n nonempty pieces."""
        if n in self._delta:
            return self._delta[n]
        X = self.X
        tgt = tensor_power(X, n, X.N_weight)
        cols = {}
        for key in X.basis:
            out = {}
            for s, pieces in self.splittings(key[1], n):
                coef = s
                new = ()
                for p in pieces:
                    r = self.key(p)
                    if r is None:
                        coef = 0
                        break
                    coef *= r[0]
                    new += (r[1],)
                if coef:
                    _acc(out, new, Q(coef))
            if out:
                cols[key] = out
        m = GradedMap(X, tgt, 0, cols)
        self._delta[n] = m
        return m

    def check_axioms(self):
        """Coassociativity of Delta_2 and Delta_3 = (Delta_2 (x) 1) Delta_2,
        and cocommutativity in the symmetric case."""
        X = self.X
        w = X.N_weight
        r = Report(f"cofree {self.kind} coalgebra")
        d2 = self.delta(2)
        one = identity(X)
        X2, X3 = tensor_power(X, 2, w), tensor_power(X, 3, w)
        lhs = compose(tensor_maps([d2, one], X2, X3), d2)
        rhs = compose(tensor_maps([one, d2], X2, X3), d2)
        r.add_map_equal("coassociativity", lhs, rhs)
        r.add_map_equal("Delta_3 = (Delta_2 (x) 1) Delta_2", self.delta(3), lhs)
        if self.symmetric:
            tw = permute_tensor((1, 0), 2, X, w)
            r.add_map_equal("cocommutativity", compose(tw, d2), d2)
        return r

    def corestrict(self, m):
        """The components V^{(x)n} -> V of a map into X, keyed by arity."""
        V = self.V
        comps = {}
        for key, col in m.cols.items():
            n = len(key[1])
            for t, c in col.items():
                if len(t[1]) == 1:
                    comps.setdefault(n, {}).setdefault(key[1], {})[t[1][0]] = c
        out = {}
        for n in range(1, self.N + 1):
            src = tensor_power(V, n)
            cols = {}
            for a, col in comps.get(n, {}).items():
                cols[a] = col
            if self.symmetric:
                # spread from sorted representatives to all orderings
                cols = _spread_symmetric(self, src, cols)
            out[n] = GradedMap(src, V, m.degree, cols)
        return out


def _spread_symmetric(C, src, cols):
    out = {}
    for a in src.basis:
        r = C.key(a)
        if r is None:
            continue
        col = cols.get(r[1][1])
        if col:
            out[a] = {t: r[0] * c for t, c in col.items()}
    return out


def _compositions(k, n):
    """Ordered n-tuples of positive integers summing to k."""
    if n == 1:
        if k >= 1:
            yield (k,)
        return
    for first in range(1, k - n + 2):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest


def cofree_coalgebra(kind, V, N):
    return CCoalgebra(kind, V, N)


def coderivation_from_corestriction(C, components, degree=-1):
    """The unique coderivation X -> X whose corestriction to V is given by
    components[n]: V^{(x)n} -> V (maps on tensor_power(V, n))."""
    X, V = C.X, C.V
    cols = {}
    for key in X.basis:
        word = key[1]
        k = len(word)
        out = {}
        for n, comp in components.items():
            if n > k or comp.is_zero():
                continue
            if not C.symmetric:
                for i in range(k - n + 1):
                    img = comp.cols.get(word[i:i + n])
                    if not img:
                        continue
                    s = _sign(degree * sum(V.degree(v) for v in word[:i]))
                    for t, c in img.items():
                        r = C.key(word[:i] + (t,) + word[i + n:])
                        if r is not None and r[1] in X:
                            _acc(out, r[1], s * r[0] * c)
                continue
            degs = [V.degree(v) for v in word]
            for I in _subsets(k, n):
                J = [i for i in range(k) if i not in I]
                order = list(I) + J
                sigma = invert_perm(tuple(order))
                s, new = koszul_permute(sigma, word, degs)
                img = comp.cols.get(new[:n])
                if not img:
                    continue
                for t, c in img.items():
                    r = C.key((t,) + new[n:])
                    if r is not None and r[1] in X:
                        _acc(out, r[1], s * r[0] * c)
        if out:
            cols[key] = out
    return GradedMap(X, X, degree, cols)


def _subsets(k, n):
    from itertools import combinations
    return combinations(range(k), n)


def check_coalgebra_thick(f, C1, C2, levels=None, degree=None):
    """Delta_n f_1 = f_n Delta_n for 2 <= n <= levels."""
    L = f.N if levels is None else levels
    r = Report("thick map of coalgebras")
    for n in range(2, L + 1):
        lhs = compose(C2.delta(n), f.base())
        rhs = compose(f[n], C1.delta(n).retarget(target=f[n].source))
        r.add_map_equal(f"Delta_{n}", lhs.retarget(target=rhs.target), rhs)
    return r


def check_coderivation(t, C, levels=2):
    """Delta_n t = t_n Delta_n with t_n the Leibniz extension."""
    tt = _thick.extend_as_derivation(t, N=levels, max_weight=C.X.N_weight)
    return check_coalgebra_thick(tt, C, C, levels)


class CoalgebraContraction:
    def __init__(self, tc, C1, C2):
        self.tc = tc
        self.C1, self.C2 = C1, C2

    f = property(lambda self: self.tc.f)
    g = property(lambda self: self.tc.g)
    h = property(lambda self: self.tc.h)

    def validate(self, levels=None):
        tc = self.tc
        L = tc.N if levels is None else levels
        r = tc.validate(L)
        r.extend(_thick.check_morphism(tc.f, L), "F ")
        r.extend(_thick.check_morphism(tc.g, L), "G ")
        r.extend(_thick.check_pseudo_derivation(tc.h, L), "H ")
        r.extend(check_coalgebra_thick(tc.f, self.C1, self.C2, L), "F ")
        r.extend(check_coalgebra_thick(tc.g, self.C2, self.C1, L), "G ")
        r.extend(check_coalgebra_thick(tc.h, self.C1, self.C1, L), "H ")
        for name, m in (("F", tc.f[1]), ("G", tc.g[1]), ("H", tc.h[1])):
            bad = check_weight_preserving(m)
            r.add(f"{name} preserves the weight filtration", bad is None, bad)
        return r


def coalgebra_tensor_trick(kind, c, N, levels=2, symmetric=True):
    """Contraction of cofree coalgebras on c.A and c.B induced by c."""
    C1 = CCoalgebra(kind, c.A, N)
    C2 = CCoalgebra(kind, c.B, N)
    sym = symmetric and C1.X.O.symmetric
    tc = _schur.thick_tensor_trick(C1.X.O, c, N, levels, N_arity=N, symmetric=sym)
    assert tc.X == C1.X and tc.Y == C2.X
    return CoalgebraContraction(tc, C1, C2)


class PerturbedCoalgebra:
    def __init__(self, pt, C1, C2, t):
        self.pt = pt
        self.C1, self.C2 = C1, C2
        self.t = t

    def validate(self, levels=None):
        pt = self.pt
        tc = pt.contraction
        L = tc.N if levels is None else levels
        r = pt.validate(L)
        r.extend(check_coalgebra_thick(_relabel(tc.f, self.C1.X, self.C2.X),
                                       self.C1, self.C2, L), "f' ")
        r.extend(check_coalgebra_thick(_relabel(tc.g, self.C2.X, self.C1.X),
                                       self.C2, self.C1, L), "g' ")
        r.extend(check_coalgebra_thick(_relabel(tc.h, self.C1.X, self.C1.X),
                                       self.C1, self.C1, L), "h' ")
        r.extend(check_coalgebra_thick(pt.t_prime, self.C2, self.C2, L), "t' ")
        bad = check_weight_preserving(pt.t_prime[1], 1)
        r.add("t' lowers weight", bad is None, bad)
        return r


def perturb_coalgebra(ctc, t, max_terms=None):
    """Filtered perturbation of a contraction of cofree coalgebras by a
    weight-lowering coderivation t."""
    bad = check_weight_preserving(t, 1)
    if bad is not None:
        raise ValueError(f"t does not lower weight at {bad!r}")
    rep = check_coderivation(t, ctc.C1, 2)
    if not rep.passed:
        raise ValueError("t is not a coderivation")
    pt = _thick.perturb_thick(ctc.tc, t, max_terms)
    return PerturbedCoalgebra(pt, ctc.C1, ctc.C2, t)


def random_filtered_oalgebra_instance(kind, seed, N=4, levels=3, max_rank=4):
    """(otc, t): the tensor-trick contraction of free O-algebras on a random
    weighted disc sum onto its homology, and a weight-lowering derivation t
    of the source with a nonzero cycle part."""
    from .random_instances import rng_from, random_disc_sum
    from .contraction import contraction_from_homology
    rng = rng_from(seed)
    while True:
        A = random_disc_sum(rng, max_rank=max_rank)
        c = contraction_from_homology(A)
        otc = oalgebra_tensor_trick(kind, c, N, levels=levels)
        try:
            t = random_derivation_perturbation(otc.Aalg, rng, need_delta=True, attempts=5)
        except ValueError:
            continue
        if not t.is_zero():
            return otc, t
