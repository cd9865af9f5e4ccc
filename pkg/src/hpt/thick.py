"""Thick maps: families f_n : A^{(x)n} -> B^{(x)n}, n = 0..N.

Since tensor keys are flat tuples, A^{(x)p} (x) A^{(x)q} and A^{(x)(p+q)}
are literally the same complex, so m*(f)_{p,q} is just f_{p+q}.
"""

from itertools import product

from .exactlin import (GradedMap, Q, boundary_of_map, compose, identity,
                       tensor, tensor_maps, tensor_power, permute_tensor,
                       adjacent_transpositions, all_permutations, invert_perm,
                       q_coefficient, _sign, _acc)
from .contraction import (Contraction, validate_contraction, perturb,
                          default_max_terms)
from .report import Report


class ThickMap:
    """levels[n]: tensor_power(A, n, w) -> tensor_power(B, n, w) for n <= N."""

    def __init__(self, source, target, degree, levels, max_weight=None):
        self.source = source
        self.target = target
        self.degree = degree
        self.max_weight = max_weight
        self.levels = dict(levels)
        if 0 not in self.levels:
            self.levels[0] = _level_zero(degree)
        self.N = max(self.levels)
        for n, m in self.levels.items():
            if m.source != self.dom(n) or m.target != self.cod(n):
                raise ValueError(f"level {n} has the wrong source or target")
        self.symmetric = None

    def dom(self, n):
        return tensor_power(self.source, n, self.max_weight)

    def cod(self, n):
        return tensor_power(self.target, n, self.max_weight)

    def __getitem__(self, n):
        if n > self.N:
            raise IndexError(f"thick map truncated at arity {self.N}")
        return self.levels[n]

    def base(self):
        """Level 1 as a map A -> B on the unwrapped keys."""
        m = self.levels[1]
        return GradedMap(self.source, self.target, self.degree,
                         {k[0]: {t[0]: c for t, c in col.items()}
                          for k, col in m.cols.items()})

    def _combine(self, other, op):
        N = min(self.N, other.N)
        return ThickMap(self.source, self.target, self.degree,
                        {n: op(self[n], other[n]) for n in range(N + 1)},
                        self.max_weight)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self * -1

    def __mul__(self, s):
        return ThickMap(self.source, self.target, self.degree,
                        {n: m * s for n, m in self.levels.items()}, self.max_weight)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose_thick(self, other)

    def __eq__(self, other):
        if not isinstance(other, ThickMap):
            return NotImplemented
        N = min(self.N, other.N)
        return all(self[n] == other[n] for n in range(N + 1))

    __hash__ = None

    def boundary(self):
        return ThickMap(self.source, self.target, self.degree - 1,
                        {n: boundary_of_map(m) for n, m in self.levels.items()},
                        self.max_weight)

    def truncate(self, N):
        return ThickMap(self.source, self.target, self.degree,
                        {n: m for n, m in self.levels.items() if n <= N},
                        self.max_weight)

    def corrupt(self, n, key=None, target=None, delta=1):
        """Copy with one entry of level n changed; for mutation tests."""
        m = self[n]
        src = m.source.basis
        key = key if key is not None else src[len(src) // 2]
        deg = m.source.degree(key) + m.degree
        if target is None:
            cands = [t for t in m.target.basis if m.target.degree(t) == deg]
            if not cands:
                raise ValueError("no target of the right degree to corrupt into")
            target = cands[0]
        cols = {k: dict(v) for k, v in m.cols.items()}
        _acc(cols.setdefault(key, {}), target, Q(delta))
        levels = dict(self.levels)
        levels[n] = GradedMap(m.source, m.target, m.degree, cols)
        return ThickMap(self.source, self.target, self.degree, levels, self.max_weight)

    def __repr__(self):
        return f"<ThickMap degree {self.degree}, levels 0..{self.N}>"


def _level_zero(degree):
    k = tensor()
    return identity(k) if degree == 0 else GradedMap(k, k, degree, {})


def compose_thick(g, f):
    N = min(g.N, f.N)
    return ThickMap(f.source, g.target, f.degree + g.degree,
                    {n: compose(g[n], f[n]) for n in range(N + 1)}, f.max_weight)


def thick_identity(A, N, max_weight=None):
    return ThickMap(A, A, 0, {n: identity(tensor_power(A, n, max_weight))
                              for n in range(N + 1)}, max_weight)


def thick_zero(A, B, degree, N, max_weight=None):
    return ThickMap(A, B, degree,
                    {n: GradedMap(tensor_power(A, n, max_weight),
                                  tensor_power(B, n, max_weight), degree, {})
                     for n in range(N + 1)}, max_weight)


def extend_as_morphism(f, N, max_weight=None):
    """f_n = f^{(x)n}."""
    if f.degree != 0:
        raise ValueError("only degree 0 maps extend as morphisms")
    levels = {}
    for n in range(N + 1):
        src = tensor_power(f.source, n, max_weight)
        levels[n] = tensor_maps([f] * n, source=src,
                                target=tensor_power(f.target, n, max_weight))
    return ThickMap(f.source, f.target, 0, levels, max_weight)


def extend_as_derivation(d, l=None, r=None, N=3, max_weight=None):
    """d_n = sum_{i+1+j=n} l^{(x)i} (x) d (x) r^{(x)j}."""
    l = l if l is not None else identity(d.source)
    r = r if r is not None else identity(d.source)
    if l.degree or r.degree:
        raise ValueError("l and r must have degree 0")
    levels = {}
    for n in range(N + 1):
        src = tensor_power(d.source, n, max_weight)
        tgt = tensor_power(d.target, n, max_weight)
        m = GradedMap(src, tgt, d.degree, {})
        for i in range(n):
            m = m + tensor_maps([l] * i + [d] + [r] * (n - 1 - i), source=src, target=tgt)
        levels[n] = m
    return ThickMap(d.source, d.target, d.degree, levels, max_weight)


def _symmetrized_level(h, pi, n, src):
    """sum_j sum_{eps, eps_j = 0} q(n, |eps|) pi^eps1 (x) .. h .. (x) pi^epsn."""
    A = h.source
    cols = {}
    for key in src.basis:
        out = {}
        acc = 0
        for j in range(n):
            himg = h.cols.get(key[j])
            if himg:
                # states: (prefix, number of pi factors) -> coefficient
                states = {((), 0): Q(_sign(acc))}
                for i in range(n):
                    nxt = {}
                    for (pre, k), c in states.items():
                        if i == j:
                            for t, x in himg.items():
                                _acc(nxt, (pre + (t,), k), c * x)
                            continue
                        _acc(nxt, (pre + (key[i],), k), c)
                        for t, x in pi.cols.get(key[i], {}).items():
                            _acc(nxt, (pre + (t,), k + 1), c * x)
                    states = nxt
                for (tk, k), c in states.items():
                    q = q_coefficient(n, k)
                    if q:
                        _acc(out, tk, c * q)
            acc += A.degree(key[j])
        if out:
            cols[key] = out
    return GradedMap(src, src, 1, cols)


def symmetrize_homotopy(c, N, max_weight=None):
    """The symmetrized tensor trick homotopy, via the closed form
    (q-operator composed with the Leibniz extension of h)."""
    pi = c.pi
    levels = {}
    for n in range(N + 1):
        src = tensor_power(c.A, n, max_weight)
        levels[n] = _symmetrized_level(c.h, pi, n, src)
    out = ThickMap(c.A, c.A, 1, levels, max_weight)
    out.symmetric = True
    return out


def averaged_homotopy(c, N):
    """Oracle: (1/n!) sum_sigma sigma^{-1} h_n sigma with h_n the
    (1, gf)-derivation extension of h."""
    hn = extend_as_derivation(c.h, identity(c.A), c.pi, N)
    levels = {0: hn[0]}
    for n in range(1, N + 1):
        src = hn[n].source
        acc = GradedMap(src, src, 1, {})
        perms = all_permutations(n)
        for s in perms:
            P = permute_tensor(s, n, c.A)
            Pinv = permute_tensor(invert_perm(s), n, c.A)
            acc = acc + compose(Pinv, compose(hn[n], P))
        levels[n] = acc * Q(1, len(perms))
    return ThickMap(c.A, c.A, 1, levels)


def q_operator(c, n, max_weight=None):
    """Q_n = sum_eps q(n, |eps|) pi^eps1 (x) ... (x) pi^epsn."""
    pi = c.pi
    one = identity(c.A)
    src = tensor_power(c.A, n, max_weight)
    out = GradedMap(src, src, 0, {})
    for eps in product((0, 1), repeat=n):
        q = q_coefficient(n, sum(eps))
        if q:
            out = out + tensor_maps([pi if e else one for e in eps], source=src, target=src) * q
    return out


def q_thick(c, N, max_weight=None):
    return ThickMap(c.A, c.A, 0, {n: q_operator(c, n, max_weight) for n in range(N + 1)},
                    max_weight)


def check_decomposition(c, N, oracle=True):
    """hSigma_n = Q_n h^der_n = h^der_n Q_n, and (optionally) both equal to
    the n!-average."""
    r = Report("symmetrized homotopy decomposition")
    hs = symmetrize_homotopy(c, N)
    hder = extend_as_derivation(c.h, N=N)
    avg = averaged_homotopy(c, N) if oracle else None
    for n in range(1, N + 1):
        Qn = q_operator(c, n)
        r.add_map_equal(f"n={n}: hSigma = Q h^der", hs[n], compose(Qn, hder[n]))
        r.add_map_equal(f"n={n}: hSigma = h^der Q", hs[n], compose(hder[n], Qn))
        if oracle:
            r.add_map_equal(f"n={n}: hSigma = average", hs[n], avg[n])
    return r


def check_symmetric(f, N=None, full=False):
    """f_n commutes with the Koszul-signed S_n action.  Adjacent
    transpositions generate S_n, so they suffice unless `full`."""
    N = f.N if N is None else N
    r = Report("symmetry")
    for n in range(2, N + 1):
        perms = all_permutations(n) if full else adjacent_transpositions(n)
        for s in perms:
            PA = _restricted_perm(s, n, f.source, f.max_weight)
            PB = _restricted_perm(s, n, f.target, f.max_weight)
            r.add_map_equal(f"n={n} sigma={s}", compose(f[n], PA), compose(PB, f[n]))
    return r


def _restricted_perm(s, n, A, max_weight):
    return permute_tensor(s, n, A, max_weight)


def _tp(x, y, source, target=None):
    return tensor_maps([x, y], source=source, target=target)


def _ident(X):
    return identity(X)


def check_pseudo_derivation(h, P=None):
    """(h_p (x) 1 - 1 (x) h_q) h_{p+q} = -h_{p+q} (h_p (x) 1 - 1 (x) h_q)
    = h_p (x) h_q for p, q >= 0, 1 <= p + q <= P."""
    P = h.N if P is None else P
    A = h.source
    w = h.max_weight
    r = Report("pseudo-derivation")
    for s in range(1, P + 1):
        X = tensor_power(A, s, w)
        for p in range(s + 1):
            q = s - p
            Ap, Aq = tensor_power(A, p, w), tensor_power(A, q, w)
            D = _tp(h[p], _ident(Aq), X, X) - _tp(_ident(Ap), h[q], X, X)
            rhs = _tp(h[p], h[q], X, X)
            r.add_map_equal(f"(p,q)=({p},{q}) left", compose(D, h[s]), rhs)
            r.add_map_equal(f"(p,q)=({p},{q}) right", -compose(h[s], D), rhs)
    return r


class ThickContraction:
    def __init__(self, tf, tg, th):
        self.f, self.g, self.h = tf, tg, th
        self.N = min(tf.N, tg.N, th.N)

    @property
    def A(self):
        return self.f.source

    @property
    def B(self):
        return self.f.target

    def level(self, n):
        return Contraction(self.f[n], self.g[n], self.h[n])

    def validate(self, N=None):
        N = self.N if N is None else N
        r = Report("thick contraction")
        for n in range(N + 1):
            r.extend(validate_contraction(self.level(n)), f"level {n}: ")
        return r

    def base(self):
        return Contraction(self.f.base(), self.g.base(), self.h.base())


def tensor_trick(c, N, max_weight=None, symmetric=True):
    """Thick contraction extending c: f, g morphisms and h either the
    symmetrized homotopy or the (1, gf)-derivation extension of h."""
    tf = extend_as_morphism(c.f, N, max_weight)
    tg = extend_as_morphism(c.g, N, max_weight)
    if symmetric:
        th = symmetrize_homotopy(c, N, max_weight)
    else:
        th = extend_as_derivation(c.h, identity(c.A), c.pi, N, max_weight)
    return ThickContraction(tf, tg, th)


# (x, y, z) for (x (x) y) m*(z) and for m*(x)(y (x) z)
LEFT_CONDITIONS = [("h", "h", "h"), ("h", "h", "g"), ("f", "h", "h"), ("h", "f", "h"),
                   ("f", "f", "h"), ("f", "h", "g"), ("h", "f", "g")]
RIGHT_CONDITIONS = [("h", "h", "h"), ("f", "h", "h"), ("h", "g", "h"), ("h", "h", "g"),
                    ("h", "g", "g"), ("f", "g", "h"), ("f", "h", "g")]


def check_annihilation_conditions(tc, P=None):
    """All 14 composites (x (x) y) m*(z), m*(x)(y (x) z) with h among
    x, y, z vanish."""
    P = tc.N if P is None else P
    maps = {"f": tc.f, "g": tc.g, "h": tc.h}
    r = Report("annihilation conditions")
    for s in range(P + 1):
        for p in range(s + 1):
            q = s - p
            for x, y, z in LEFT_CONDITIONS:
                Z = maps[z][s]
                m = _tp(maps[x][p], maps[y][q], Z.target)
                r.add_map_zero(f"({x}(x){y})m*({z}) p={p} q={q}", compose(m, Z))
            for x, y, z in RIGHT_CONDITIONS:
                X = maps[x][s]
                m = _tp(maps[y][p], maps[z][q], None, X.source)
                r.add_map_zero(f"m*({x})({y}(x){z}) p={p} q={q}", compose(X, m))
    return r


def check_module_conditions(tc, P=None):
    """(f(x)1)m*(h) = f(x)h, (1(x)f)m*(h) = h(x)f, m*(h)(g(x)1) = g(x)h,
    m*(h)(1(x)g) = h(x)g."""
    P = tc.N if P is None else P
    f, g, h = tc.f, tc.g, tc.h
    A, B = tc.A, tc.B
    w = h.max_weight
    r = Report("module conditions")
    for s in range(P + 1):
        for p in range(s + 1):
            q = s - p
            X = tensor_power(A, s, w)
            one_p, one_q = identity(tensor_power(A, p, w)), identity(tensor_power(A, q, w))
            lhs = compose(_tp(f[p], one_q, X), h[s])
            r.add_map_equal(f"(f(x)1)m*(h) p={p} q={q}", lhs, _tp(f[p], h[q], X, lhs.target))
            lhs = compose(_tp(one_p, f[q], X), h[s])
            r.add_map_equal(f"(1(x)f)m*(h) p={p} q={q}", lhs, _tp(h[p], f[q], X, lhs.target))
            src = tensor(tensor_power(B, p, w), tensor_power(A, q, w), max_weight=w)
            lhs = compose(h[s], _tp(g[p], one_q, src, X))
            r.add_map_equal(f"m*(h)(g(x)1) p={p} q={q}", lhs, _tp(g[p], h[q], src, X))
            src = tensor(tensor_power(A, p, w), tensor_power(B, q, w), max_weight=w)
            lhs = compose(h[s], _tp(one_p, g[q], src, X))
            r.add_map_equal(f"m*(h)(1(x)g) p={p} q={q}", lhs, _tp(h[p], g[q], src, X))
    return r


def check_morphism(f, P=None):
    """m*(f)_{p,q} = f_p (x) f_q."""
    P = f.N if P is None else P
    r = Report("morphism")
    for s in range(P + 1):
        for p in range(s + 1):
            m = f[s]
            r.add_map_equal(f"p={p} q={s - p}", m, _tp(f[p], f[s - p], m.source, m.target))
    return r


def check_derivation(d, l, r_, P=None):
    """m*(d)_{p,q} = d_p (x) r_q + l_p (x) d_q."""
    P = d.N if P is None else P
    rep = Report("derivation")
    for s in range(P + 1):
        for p in range(s + 1):
            q = s - p
            m = d[s]
            rhs = _tp(d[p], r_[q], m.source, m.target) + _tp(l[p], d[q], m.source, m.target)
            rep.add_map_equal(f"p={p} q={q}", m, rhs)
    return rep


def coefficient_identity_check(n_max):
    """sum_{j=0}^r C(r, j) q(n, j + k) = q(n - r, k) for r + k < n <= n_max."""
    from math import comb
    r = Report("coefficient identity")
    for n in range(1, n_max + 1):
        for rr in range(n):
            for k in range(n - rr):
                lhs = sum((comb(rr, j) * q_coefficient(n, j + k) for j in range(rr + 1)), Q(0))
                rhs = q_coefficient(n - rr, k)
                r.add(f"(r,k,n)=({rr},{k},{n})", lhs == rhs, (rr, k, n),
                      f"{lhs} != {rhs}" if lhs != rhs else "")
    return r


class PerturbedThick:
    def __init__(self, contraction, t, t_prime, levels):
        self.contraction = contraction
        self.t = t
        self.t_prime = t_prime
        self.levels = levels

    f = property(lambda self: self.contraction.f)
    g = property(lambda self: self.contraction.g)
    h = property(lambda self: self.contraction.h)

    def validate(self, N=None):
        tc = self.contraction
        r = tc.validate(N)
        r.extend(check_morphism(tc.f, N), "f' ")
        r.extend(check_morphism(tc.g, N), "g' ")
        r.extend(check_pseudo_derivation(tc.h, N), "h' ")
        one_B = thick_identity(tc.B, tc.N, tc.h.max_weight)
        r.extend(check_derivation(self.t_prime, one_B, one_B, N), "t' ")
        return r


def perturb_thick(tc, t, max_terms=None):
    """Levelwise perturbation lemma for a derivation perturbation.

    `t` is a GradedMap on A (or its derivation extension as a ThickMap);
    level n is perturbed by t_n = sum 1 (x) .. t .. (x) 1.  Returns a
    PerturbedThick whose contraction lives on the tensor powers of A^t and
    B^{t'}, and whose t' is the thick map of the levelwise t'_n.
    """
    if isinstance(t, ThickMap):
        t = t.base()
    A, B = tc.A, tc.B
    w = tc.h.max_weight
    N = tc.N
    tt = extend_as_derivation(t, N=N, max_weight=w)
    lvl1 = perturb(tc.base(), t, max_terms)
    At, Bt = lvl1.A, lvl1.B
    fl, gl, hl, tl = {}, {}, {}, {}
    per_level = {}
    for n in range(N + 1):
        X, Y = tensor_power(At, n, w), tensor_power(Bt, n, w)
        mt = max_terms if max_terms is not None else default_max_terms(tc.f[n].source)
        p = perturb(tc.level(n), tt[n], mt, At=X, Bt=Y)
        per_level[n] = p
        fl[n], gl[n], hl[n] = p.f, p.g, p.h
        tl[n] = GradedMap(tensor_power(B, n, w), tensor_power(B, n, w), -1, p.t_prime.cols)
    out = ThickContraction(ThickMap(At, Bt, 0, fl, w), ThickMap(Bt, At, 0, gl, w),
                           ThickMap(At, At, 1, hl, w))
    return PerturbedThick(out, tt, ThickMap(B, B, -1, tl, w), per_level)


def classical_tensor_formulas(c, n):
    """Direct word-by-word evaluation of f^{(x)n}, g^{(x)n} and
    sum_i 1^{(x)i} (x) h (x) (gf)^{(x)(n-1-i)} on n-fold tensors, with the
    Koszul sign of h passing the first i factors."""
    A, B = c.A, c.B
    pi = c.pi
    TA, TB = tensor_power(A, n), tensor_power(B, n)

    def apply_each(maps, word):
        out = {(): Q(1)}
        for m, a in zip(maps, word):
            col = m.cols.get(a, {})
            new = {}
            for k, c0 in out.items():
                for t, e in col.items():
                    new[k + (t,)] = new.get(k + (t,), 0) + c0 * e
            out = new
        return {k: v for k, v in out.items() if v}

    F = {w: apply_each([c.f] * n, w) for w in TA.basis}
    G = {w: apply_each([c.g] * n, w) for w in TB.basis}
    H = {}
    for w in TA.basis:
        col = {}
        for i in range(n):
            s = Q((-1) ** sum(A.degree(a) for a in w[:i]))
            maps = [identity(A)] * i + [c.h] + [pi] * (n - 1 - i)
            for k, v in apply_each(maps, w).items():
                col[k] = col.get(k, 0) + s * v
        H[w] = {k: v for k, v in col.items() if v}
    return (GradedMap(TA, TB, 0, {k: v for k, v in F.items() if v}),
            GradedMap(TB, TA, 0, {k: v for k, v in G.items() if v}),
            GradedMap(TA, TA, 1, {k: v for k, v in H.items() if v}))
