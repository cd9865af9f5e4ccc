"""Contractions (strong deformation retracts) and the perturbation lemma.

Conventions: f: A -> B, g: B -> A of degree 0, h: A -> A of degree +1 with

    fg = 1,  dh + hd = gf - 1,  fh = 0,  hg = 0,  hh = 0.
"""

from .exactlin import (GradedComplex, GradedMap, Q, boundary_of_map,
                       homology_decomposition, identity, compose)
from .report import Report


class NonNilpotent(ArithmeticError):
    """(ht)^max_terms did not vanish, so the perturbation series was not
    certified to terminate."""


def _rebuild(X, dcols, label=None):
    """A complex with the same graded basis as X and differential dcols."""
    degs = {k: X.degree(k) for k in X.basis}
    wts = {k: X.weight(k) for k in X.basis} if X.weighted else None
    return GradedComplex(degs, dcols, wts, label=label, check=False)


class Contraction:
    def __init__(self, f, g, h):
        if f.degree != 0 or g.degree != 0:
            raise ValueError("f and g must have degree 0")
        if h.degree != 1 and not h.is_zero():
            raise ValueError("h must have degree +1")
        if not (f.target == g.source and g.target == f.source
                and h.source == f.source and h.target == f.source):
            raise ValueError("contraction maps do not fit together")
        self.f, self.g, self.h = f, g, h
        if h.is_zero() and h.degree != 1:
            self.h = GradedMap(h.source, h.target, 1, {})

    @property
    def A(self):
        return self.f.source

    @property
    def B(self):
        return self.f.target

    @property
    def pi(self):
        """The idempotent gf on A."""
        return compose(self.g, self.f)

    @classmethod
    def trivial(cls, A):
        one = identity(A)
        return cls(one, one, GradedMap(A, A, 1, {}))

    def validate(self):
        return validate_contraction(self)

    def __repr__(self):
        return f"<Contraction {self.A!r} -> {self.B!r}>"


def validate_contraction(c, title="contraction"):
    """Check each contraction identity, recording the first failing basis
    element of every failed identity."""
    f, g, h = c.f, c.g, c.h
    A, B = c.A, c.B
    r = Report(title)
    r.add_map_zero("df = 0", boundary_of_map(f))
    r.add_map_zero("dg = 0", boundary_of_map(g))
    r.add_map_equal("fg = 1", compose(f, g), identity(B))
    r.add_map_equal("dh = gf - 1", boundary_of_map(h), compose(g, f) - identity(A))
    r.add_map_zero("fh = 0", compose(f, h))
    r.add_map_zero("hg = 0", compose(h, g))
    r.add_map_zero("hh = 0", compose(h, h))
    return r


def repair_side_conditions(f, g, h):
    """Turn a deformation retract (fg = 1, dh = gf - 1) into a contraction:
    h' = (gf - 1) h (gf - 1), then h'' = -h' d h'."""
    A = f.source
    if compose(f, g) != identity(f.target):
        raise ValueError("repair needs fg = 1")
    e = compose(g, f) - identity(A)
    if boundary_of_map(h) != e:
        raise ValueError("repair needs dh = gf - 1")
    h1 = compose(e, compose(h, e))
    h2 = -compose(h1, compose(A.d, h1))
    return Contraction(f, g, GradedMap(A, A, 1, h2.cols))


def contraction_from_homology(A):
    """Contraction of A onto its homology (zero differential)."""
    H, f_cols, g_cols, h_cols = homology_decomposition(A)
    f = GradedMap(A, H, 0, f_cols)
    g = GradedMap(H, A, 0, g_cols)
    h = GradedMap(A, A, 1, h_cols)
    return Contraction(f, g, h)


def cancel_pair(A, x, y):
    """Gaussian elimination of the pair (x, y) with a = <dx, y> != 0: a
    contraction of A onto the span of the remaining basis elements, with
    d_B = d_CC - d_Cx a^{-1} d_yC, f = p_C - d_Cx a^{-1} p_y,
    g = i_C - i_x a^{-1} d_yC and h(y) = -x/a."""
    a = A.d.cols.get(x, {}).get(y)
    if not a:
        raise ValueError(f"<d{x!r}, {y!r}> is zero")
    rest = [k for k in A.basis if k not in (x, y)]
    dCx = {t: c for t, c in A.d.cols.get(x, {}).items() if t != y}
    dyC = {k: A.d.cols.get(k, {}).get(y) for k in rest if A.d.cols.get(k, {}).get(y)}
    dB = {}
    for k in rest:
        col = {t: c for t, c in A.d.cols.get(k, {}).items() if t not in (x, y)}
        if k in dyC:
            for t, c in dCx.items():
                col[t] = col.get(t, 0) - c * dyC[k] / a
        col = {t: c for t, c in col.items() if c}
        if col:
            dB[k] = col
    degs = {k: A.degree(k) for k in rest}
    wts = {k: A.weight(k) for k in rest} if A.weighted else None
    B = GradedComplex(degs, dB, wts, label=(A.label or "A") + "/pair", check=False)
    f = {k: {k: Q(1)} for k in rest}
    f[y] = {t: -c / a for t, c in dCx.items()}
    g = {}
    for k in rest:
        col = {k: Q(1)}
        if k in dyC:
            col[x] = -dyC[k] / a
        g[k] = col
    h = {y: {x: -1 / Q(a)}}
    return Contraction(GradedMap(A, B, 0, {k: v for k, v in f.items() if v}),
                       GradedMap(B, A, 0, g), GradedMap(A, A, 1, h))


def compose_contractions(c1, c2):
    """A => B via c1 followed by B => C via c2: f = f2 f1, g = g1 g2,
    h = h1 + g1 h2 f1."""
    if c1.B != c2.A:
        raise ValueError("contractions do not compose")
    f = compose(c2.f, c1.f)
    g = compose(c1.g, c2.g)
    h = c1.h + compose(c1.g, compose(c2.h, c1.f).retarget(target=c1.B)).retarget(c1.A, c1.A)
    return Contraction(f, g, h)


class Perturbation:
    """A degree -1 map t on `carrier` with (d + t)^2 = 0."""

    def __init__(self, carrier, t, filtration_drop=None):
        if t.source != carrier or t.target != carrier:
            raise ValueError("perturbation must be an endomorphism of the carrier")
        if t.degree != -1 and not t.is_zero():
            raise ValueError("perturbation must have degree -1")
        self.carrier = carrier
        self.t = t if t.degree == -1 else GradedMap(carrier, carrier, -1, {})
        self.filtration_drop = filtration_drop

    def validate(self):
        A, t = self.carrier, self.t
        r = Report("perturbation")
        D = A.d + t
        r.add_map_zero("(d + t)^2 = 0", compose(D, D))
        if self.filtration_drop is not None:
            r.add("lowers weight", t.preserves_weight(self.filtration_drop),
                  _first_weight_violation(t, self.filtration_drop))
        return r

    def perturbed_complex(self, label=None):
        return _rebuild(self.carrier, (self.carrier.d + self.t).cols, label)


def _first_weight_violation(t, drop):
    for k in t.source.basis:
        for u in t.cols.get(k, {}):
            if t.target.weight(u) > t.source.weight(k) - drop:
                return k
    return None


def default_max_terms(A):
    if A.weighted and len(A):
        return A.top_weight() + 1
    return len(A) + 1


def perturbation_series(h, t, max_terms):
    """Sigma = sum_{n >= 0} t (ht)^n, certified by (ht)^max_terms = 0."""
    ht = compose(h, t)
    P = identity(t.source)
    sigma = GradedMap(t.source, t.target, -1, {})
    for _ in range(max_terms):
        if P.is_zero():
            break
        sigma = sigma + compose(t, P)
        P = compose(ht, P)
    if not P.is_zero():
        raise NonNilpotent(f"(ht)^{max_terms} != 0")
    return sigma


class PerturbedContraction:
    def __init__(self, base, t, sigma, contraction, t_prime):
        self.base = base
        self.t = t
        self.sigma = sigma
        self.contraction = contraction
        self.t_prime = t_prime

    f = property(lambda self: self.contraction.f)
    g = property(lambda self: self.contraction.g)
    h = property(lambda self: self.contraction.h)
    A = property(lambda self: self.contraction.A)
    B = property(lambda self: self.contraction.B)

    def validate(self):
        r = validate_contraction(self.contraction, "perturbed contraction")
        B = self.B
        r.add_map_zero("(d + t')^2 = 0", compose(B.d, B.d))
        return r


def perturb(c, t, max_terms=None, At=None, Bt=None):
    """Perturbation lemma.

    Returns a PerturbedContraction whose contraction goes between A^t (the
    same module as A with differential d + t) and B^{t'}.  `At` and `Bt` may
    be supplied to reuse existing complexes with the right differentials,
    e.g. tensor powers of perturbed complexes.
    """
    if isinstance(t, Perturbation):
        t = t.t
    A, B = c.A, c.B
    if t.source != A:
        raise ValueError("perturbation does not act on the source of the contraction")
    if max_terms is None:
        max_terms = default_max_terms(A)
    f, g, h = c.f, c.g, c.h
    sigma = perturbation_series(h, t, max_terms)
    sh = compose(sigma, h)
    f1 = f + compose(f, sh)
    g1 = g + compose(h, compose(sigma, g))
    h1 = h + compose(h, sh)
    t1 = compose(f, compose(sigma, g))
    if At is None:
        At = _rebuild(A, (A.d + t).cols, "A^t")
    if Bt is None:
        Bt = _rebuild(B, (B.d + t1).cols, "B^t'")
    new = Contraction(f1.retarget(At, Bt), g1.retarget(Bt, At), h1.retarget(At, At))
    return PerturbedContraction(c, t, sigma, new, GradedMap(B, B, -1, t1.cols))
