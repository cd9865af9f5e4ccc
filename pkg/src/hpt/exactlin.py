"""Exact graded linear algebra over Q.

A `GradedComplex` is a finite rank free chain complex with a named basis
and a differential of degree -1.  A `GradedMap` is a homogeneous linear map
stored sparsely as columns ``{source key: {target key: coefficient}}``.

Tensor products are realised with flat tuple keys: the basis of
``A (x) A (x) B`` is the set of triples ``(a1, a2, b)``.  A base (non-tensor)
complex contributes one factor, and its keys are wrapped in a 1-tuple when
it appears inside a tensor product, so ``tensor(A) != A`` but
``tensor(tensor(A, A), A) == tensor(A, A, A)`` on the nose.

Koszul convention: ``(f (x) g)(a (x) b) = (-1)**(|g||a|) f(a) (x) g(b)``.
"""

from fractions import Fraction
from itertools import permutations, product
from math import factorial

from . import _linalg

Q = Fraction


class ComplexMismatch(ValueError):
    pass


def sortkey(key):
    """Total order on basis keys: lexicographic on names, recursively."""
    if isinstance(key, str):
        return (0, key)
    if isinstance(key, bool):
        return (1, int(key))
    if isinstance(key, int):
        return (1, key)
    if isinstance(key, tuple):
        return (2, tuple(sortkey(k) for k in key))
    return (3, repr(key))


def _sign(parity):
    return -1 if parity % 2 else 1


# --- sparse vectors -------------------------------------------------------

def vec_add(u, v, scale=1):
    out = dict(u)
    for k, c in v.items():
        x = out.get(k, 0) + scale * c
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


def _acc(target, key, value):
    x = target.get(key, 0) + value
    if x:
        target[key] = x
    else:
        target.pop(key, None)


# --- complexes ------------------------------------------------------------

class GradedComplex:
    """Finite rank free graded Q-module with a degree -1 differential.

    Base complexes are built from explicit generators.  Tensor complexes are
    built by `tensor` / `tensor_power` and know their factors; their
    differential is the usual Koszul-signed Leibniz extension.
    """

    def __init__(self, degrees, differential=None, weights=None, label=None,
                 check=True):
        self._deg = dict(degrees)
        self._wt = dict(weights) if weights is not None else None
        if self._wt is not None and set(self._wt) != set(self._deg):
            raise ValueError("weights must be given for every generator")
        self.factors = None
        self.max_weight = None
        self.label = label
        self.basis = tuple(sorted(self._deg, key=sortkey))
        cols = {}
        for k, img in (differential or {}).items():
            if k not in self._deg:
                raise KeyError(f"differential of unknown generator {k!r}")
            col = {t: Q(c) for t, c in dict(img).items() if c}
            if col:
                cols[k] = col
        self._dcols = cols
        self._dmap = None
        self._fp = None
        self._hash = None
        self._powers = {}
        if check:
            self.check()

    # construction helpers
    @classmethod
    def from_generators(cls, generators, differential=None, label=None):
        """Build from ``[(name, degree[, weight]), ...]`` and a differential
        ``{name: [(coefficient, name), ...]}``."""
        degrees, weights = {}, {}
        for g in generators:
            name, deg = g[0], int(g[1])
            if name in degrees:
                raise ValueError(f"duplicate generator {name!r}")
            degrees[name] = deg
            if len(g) > 2 and g[2] is not None:
                weights[name] = int(g[2])
        if weights and len(weights) != len(degrees):
            raise ValueError("either all generators carry a weight or none does")
        diff = {}
        for name, terms in (differential or {}).items():
            col = {}
            if isinstance(terms, dict):
                terms = [(c, t) for t, c in terms.items()]
            for c, t in terms:
                if t not in degrees:
                    raise KeyError(f"differential of {name!r} mentions unknown {t!r}")
                _acc(col, t, Q(c))
            diff[name] = col
        return cls(degrees, diff, weights or None, label=label)

    def with_differential(self, cols, label=None):
        """Same graded module, new differential."""
        return GradedComplex(self._deg, cols, self._wt, label=label)

    # basic queries
    @property
    def is_tensor(self):
        return self.factors is not None

    @property
    def nfactors(self):
        return 1 if self.factors is None else len(self.factors)

    def __len__(self):
        return len(self.basis)

    def __contains__(self, key):
        return key in self._deg

    def __iter__(self):
        return iter(self.basis)

    def degree(self, key):
        return self._deg[key]

    def weight(self, key):
        return None if self._wt is None else self._wt[key]

    @property
    def weighted(self):
        return self._wt is not None

    def degrees(self):
        return sorted(set(self._deg.values()))

    def basis_in_degree(self, n):
        return [k for k in self.basis if self._deg[k] == n]

    def top_weight(self):
        if not self._wt:
            return None
        return max(self._wt.values())

    @property
    def differential(self):
        if self._dmap is None:
            self._dmap = GradedMap(self, self, -1, self._dcols)
        return self._dmap

    d = differential

    def check(self):
        for k, col in self._dcols.items():
            for t in col:
                if t not in self._deg:
                    raise KeyError(f"d({k!r}) leaves the complex")
                if self._deg[t] != self._deg[k] - 1:
                    raise ValueError(f"d({k!r}) is not of degree -1")
        dd = self.differential @ self.differential
        if not dd.is_zero():
            k = dd.first_nonzero()
            raise ValueError(f"d o d != 0 (first failure at {k!r})")
        return True

    def is_weight_homogeneous(self):
        """True if weighted and d preserves weight exactly."""
        if self._wt is None:
            return False
        return all(self._wt[t] == self._wt[k]
                   for k, col in self._dcols.items() for t in col)

    # equality by structure
    def fingerprint(self):
        if self._fp is None:
            if self.factors is not None:
                self._fp = ("T", tuple(f.fingerprint() for f in self.factors),
                            self.max_weight)
            else:
                gens = tuple((k, self._deg[k], self.weight(k)) for k in self.basis)
                diff = tuple((k, tuple(sorted(self._dcols[k].items(),
                                              key=lambda kv: sortkey(kv[0]))))
                             for k in self.basis if k in self._dcols)
                self._fp = ("B", gens, diff)
        return self._fp

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.fingerprint())
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GradedComplex):
            return NotImplemented
        return hash(self) == hash(other) and self.fingerprint() == other.fingerprint()

    def __repr__(self):
        name = self.label or ("tensor" if self.is_tensor else "complex")
        return f"<{name}: rank {len(self)}, degrees {self.degrees()}>"

    def wrap(self, key):
        """Key as a tuple of factor keys."""
        return key if self.factors is not None else (key,)


class _TensorComplex(GradedComplex):
    def __init__(self, factors, max_weight=None):
        self.factors = tuple(factors)
        self.max_weight = max_weight
        self.label = None
        if max_weight is not None and not all(f.weighted for f in self.factors):
            raise ValueError("weight truncation needs weighted factors")
        weighted = all(f.weighted for f in self.factors)
        deg, wt = {}, ({} if weighted else None)
        keys = []

        def rec(i, prefix, d, w):
            if i == len(self.factors):
                keys.append(prefix)
                deg[prefix] = d
                if wt is not None:
                    wt[prefix] = w
                return
            fac = self.factors[i]
            for k in fac.basis:
                kw = fac.weight(k) if weighted else 0
                if max_weight is not None and w + kw > max_weight:
                    continue
                rec(i + 1, prefix + (k,), d + fac.degree(k), w + kw)

        rec(0, (), 0, 0)
        self._deg = deg
        self._wt = wt
        self.basis = tuple(keys)
        self._dcols = None
        self._dmap = None
        self._fp = None
        self._hash = None
        self._powers = {}

    @property
    def differential(self):
        if self._dmap is None:
            cols = {}
            for key in self.basis:
                col = {}
                acc = 0
                for i, fac in enumerate(self.factors):
                    img = fac._dcols.get(key[i])
                    if img:
                        s = _sign(acc)
                        for t, c in img.items():
                            _acc(col, key[:i] + (t,) + key[i + 1:], s * c)
                    acc += fac.degree(key[i])
                if col:
                    cols[key] = col
            self._dcols = cols
            self._dmap = GradedMap(self, self, -1, cols)
        return self._dmap

    d = differential

    def is_weight_homogeneous(self):
        return self.weighted and all(f.is_weight_homogeneous() for f in self.factors)


_TENSOR_CACHE = {}


def tensor(*complexes, max_weight=None):
    """Tensor product complex with flat tuple keys."""
    factors = []
    for c in complexes:
        factors.extend(c.factors if c.factors is not None else (c,))
    key = (tuple(factors), max_weight)
    hit = _TENSOR_CACHE.get(key)
    if hit is None:
        hit = _TensorComplex(factors, max_weight)
        _TENSOR_CACHE[key] = hit
    return hit


def tensor_power(A, n, max_weight=None):
    """``A^{(x) n}``; n = 0 gives the ground ring with the single key ()."""
    if A.factors is not None:
        raise ValueError("tensor_power expects a base complex")
    return tensor(*([A] * n), max_weight=max_weight)


def ground_ring():
    return tensor()


# --- maps -----------------------------------------------------------------

class GradedMap:
    """Homogeneous linear map, stored as sparse columns."""

    __slots__ = ("source", "target", "degree", "cols")

    def __init__(self, source, target, degree, cols, check=False):
        self.source = source
        self.target = target
        self.degree = int(degree)
        clean = {}
        for k, col in cols.items():
            c2 = {t: (c if type(c) is Q else Q(c)) for t, c in col.items() if c}
            if c2:
                clean[k] = c2
        self.cols = clean
        if check:
            self.check()

    def check(self):
        for k, col in self.cols.items():
            if k not in self.source:
                raise KeyError(f"{k!r} is not a basis element of the source")
            dk = self.source.degree(k) + self.degree
            for t in col:
                if t not in self.target:
                    raise KeyError(f"image of {k!r} leaves the target ({t!r})")
                if self.target.degree(t) != dk:
                    raise ValueError(f"map is not homogeneous at {k!r}")
        return True

    def image(self, key):
        return self.cols.get(key, {})

    def __call__(self, vec):
        if not isinstance(vec, dict):
            vec = {vec: Q(1)}
        out = {}
        for k, c in vec.items():
            for t, x in self.cols.get(k, {}).items():
                _acc(out, t, c * x)
        return out

    def _same_shape(self, other):
        if not (self.source == other.source and self.target == other.target):
            raise ComplexMismatch("maps have different sources or targets")
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("cannot add maps of different degrees")

    def __add__(self, other):
        if other == 0:
            return self
        self._same_shape(other)
        cols = {k: dict(v) for k, v in self.cols.items()}
        for k, col in other.cols.items():
            tgt = cols.setdefault(k, {})
            for t, c in col.items():
                _acc(tgt, t, c)
        deg = self.degree if self.cols else other.degree
        return GradedMap(self.source, self.target, deg, cols)

    __radd__ = __add__

    def __neg__(self):
        return GradedMap(self.source, self.target, self.degree,
                         {k: {t: -c for t, c in col.items()} for k, col in self.cols.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        s = Q(scalar)
        return GradedMap(self.source, self.target, self.degree,
                         {k: {t: s * c for t, c in col.items()} for k, col in self.cols.items()})

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, other)

    def is_zero(self):
        return not self.cols

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, GradedMap):
            return NotImplemented
        if not (self.source == other.source and self.target == other.target):
            return False
        if self.cols != other.cols:
            return False
        return self.degree == other.degree or self.is_zero()

    __hash__ = None

    def first_nonzero(self):
        for k in self.source.basis:
            if k in self.cols:
                return k
        return None

    def first_difference(self, other):
        """First source basis element where the two maps differ."""
        for k in self.source.basis:
            if self.cols.get(k, {}) != other.cols.get(k, {}):
                return k
        return None

    def restrict(self, source):
        """Restriction to a sub-basis (e.g. a weight truncation)."""
        return GradedMap(source, self.target, self.degree,
                         {k: v for k, v in self.cols.items() if k in source})

    def retarget(self, source=None, target=None):
        """Same entries viewed between complexes with the same bases."""
        return GradedMap(self.source if source is None else source,
                         self.target if target is None else target,
                         self.degree, self.cols)

    def preserves_weight(self, strict_drop=0):
        """Every image has weight <= source weight - strict_drop."""
        for k, col in self.cols.items():
            w = self.source.weight(k)
            for t in col:
                if self.target.weight(t) > w - strict_drop:
                    return False
        return True

    def matrix(self, rows=None, cols=None):
        rows = list(self.target.basis if rows is None else rows)
        cols = list(self.source.basis if cols is None else cols)
        ri = {r: i for i, r in enumerate(rows)}
        m = [[Q(0)] * len(cols) for _ in rows]
        for j, k in enumerate(cols):
            for t, c in self.cols.get(k, {}).items():
                m[ri[t]][j] = c
        return m

    def __repr__(self):
        n = sum(len(c) for c in self.cols.values())
        return f"<GradedMap degree {self.degree}, {n} nonzero entries>"


def identity(A):
    return GradedMap(A, A, 0, {k: {k: Q(1)} for k in A.basis})


def zero_map(A, B, degree=0):
    return GradedMap(A, B, degree, {})


def from_matrix(A, B, degree, entries):
    """Build from ``{source key: [(coefficient, target key), ...]}``."""
    cols = {}
    for k, terms in entries.items():
        col = {}
        if isinstance(terms, dict):
            terms = [(c, t) for t, c in terms.items()]
        for c, t in terms:
            _acc(col, t, Q(c))
        cols[k] = col
    return GradedMap(A, B, degree, cols, check=True)


def compose(g, f):
    """``g o f``."""
    if not (f.target is g.source or f.target == g.source):
        raise ComplexMismatch("compose: f.target != g.source")
    gcols = g.cols
    cols = {}
    for k, col in f.cols.items():
        out = {}
        for j, c in col.items():
            img = gcols.get(j)
            if img:
                for t, x in img.items():
                    _acc(out, t, c * x)
        if out:
            cols[k] = out
    return GradedMap(f.source, g.target, f.degree + g.degree, cols)


def boundary_of_map(f):
    """``d_B f - (-1)^{|f|} f d_A``."""
    return compose(f.target.d, f) - _sign(f.degree) * compose(f, f.source.d)


def tensor_maps(maps, source=None, target=None):
    """``maps[0] (x) maps[1] (x) ...`` with Koszul signs.

    `source` may be a weight-truncated version of the full tensor product of
    the map sources; the target defaults to the tensor product of the map
    targets truncated at the same weight.
    """
    maps = list(maps)
    if source is None:
        caps = [m.source.max_weight for m in maps if m.source.max_weight is not None]
        source = tensor(*[m.source for m in maps], max_weight=max(caps) if caps else None)
    if target is None:
        target = tensor(*[m.target for m in maps], max_weight=source.max_weight)
    sizes = [m.source.nfactors for m in maps]
    if sum(sizes) != source.nfactors:
        raise ComplexMismatch("tensor_maps: source has the wrong number of factors")
    if not maps:
        return identity(source)
    cols = {}
    tdeg = target._deg
    for key in source.basis:
        partial = {(): 1}
        pos = 0
        acc = 0
        for m, n in zip(maps, sizes):
            chunk = key[pos:pos + n]
            pos += n
            sk = chunk if m.source.factors is not None else chunk[0]
            img = m.cols.get(sk)
            if not img:
                partial = None
                break
            s = _sign(m.degree * acc)
            wrap = m.target.factors is None
            nxt = {}
            for pk, pc in partial.items():
                for tk, tc in img.items():
                    nxt[pk + ((tk,) if wrap else tk)] = pc * tc * s
            partial = nxt
            acc += m.source.degree(sk)
        if not partial:
            continue
        col = {}
        for tk, c in partial.items():
            if c:
                if tk not in tdeg:
                    raise ComplexMismatch(f"tensor image {tk!r} leaves the target")
                col[tk] = col.get(tk, 0) + c
        col = {t: c for t, c in col.items() if c}
        if col:
            cols[key] = col
    return GradedMap(source, target, sum(m.degree for m in maps), cols)


def tensor_map(f, g, source=None, target=None):
    """``f (x) g``."""
    return tensor_maps([f, g], source=source, target=target)


# --- symmetric group --------------------------------------------------------

def compose_perm(s, t):
    """(s t)(i) = s(t(i)); permutations as tuples of images of 0..n-1."""
    return tuple(s[t[i]] for i in range(len(t)))


def invert_perm(s):
    inv = [0] * len(s)
    for i, si in enumerate(s):
        inv[si] = i
    return tuple(inv)


def koszul_permute(sigma, key, degree):
    """Move factor i of `key` to position sigma[i]; returns (sign, new key)."""
    n = len(sigma)
    out = [None] * n
    for i in range(n):
        out[sigma[i]] = key[i]
    parity = 0
    for i in range(n):
        if degree[i] % 2:
            for j in range(i + 1, n):
                if sigma[i] > sigma[j] and degree[j] % 2:
                    parity += 1
    return _sign(parity), tuple(out)


def permute_tensor(sigma, n, A, max_weight=None):
    """Koszul-signed action of sigma on ``A^{(x) n}``: factor i goes to sigma(i).

    ``permute_tensor(s t) == permute_tensor(s) @ permute_tensor(t)``.
    """
    sigma = tuple(sigma)
    if len(sigma) != n or sorted(sigma) != list(range(n)):
        raise ValueError(f"{sigma!r} is not a permutation of arity {n}")
    P = tensor_power(A, n, max_weight)
    cols = {}
    for key in P.basis:
        degs = [A.degree(k) for k in key]
        s, new = koszul_permute(sigma, key, degs)
        cols[key] = {new: Q(s)}
    return GradedMap(P, P, 0, cols)


def adjacent_transpositions(n):
    for i in range(n - 1):
        s = list(range(n))
        s[i], s[i + 1] = s[i + 1], s[i]
        yield tuple(s)


def all_permutations(n):
    return list(permutations(range(n)))


# --- homology -------------------------------------------------------------

def _blocks(A):
    """Partition of the basis into blocks that d respects: by degree, and by
    weight too when the differential is weight homogeneous."""
    by_weight = A.is_weight_homogeneous()
    blocks = {}
    for k in A.basis:
        w = A.weight(k) if by_weight else None
        blocks.setdefault((A.degree(k), w), []).append(k)
    return blocks, by_weight


def homology_decomposition(A):
    """Split A = H + B + C in every degree (cycle representatives, boundaries,
    a complement of the cycles) and return the data of the standard
    contraction onto homology.

    Returns ``(H, f_cols, g_cols, h_cols)`` where H is a complex with zero
    differential whose generators reuse the names of the basis elements the
    cycle representatives are anchored at.
    """
    blocks, by_weight = _blocks(A)
    dcols = A._dcols if not A.is_tensor else A.d.cols
    # C part: pivot columns of d restricted to each block
    csel, bvecs = {}, {}
    for (n, w), keys in blocks.items():
        tkeys = blocks.get((n - 1, w), [])
        if not tkeys:
            csel[(n, w)] = []
            continue
        ti = {t: i for i, t in enumerate(tkeys)}
        rows = [[Q(0)] * len(keys) for _ in tkeys]
        for j, k in enumerate(keys):
            for t, c in dcols.get(k, {}).items():
                rows[ti[t]][j] = c
        _, piv = _linalg.rref(rows, len(keys))
        csel[(n, w)] = [keys[j] for j in piv]
        for j in piv:
            bvecs.setdefault((n - 1, w), []).append(
                (keys[j], [rows[i][j] for i in range(len(tkeys))]))
    Hgens, Hwts = {}, {}
    f_cols, g_cols, h_cols = {}, {}, {}
    for (n, w), keys in blocks.items():
        idx = {k: i for i, k in enumerate(keys)}
        m = len(keys)
        # cycles
        lower = blocks.get((n - 1, w), [])
        li = {t: i for i, t in enumerate(lower)}
        rows = [[Q(0)] * m for _ in lower]
        for j, k in enumerate(keys):
            for t, c in dcols.get(k, {}).items():
                rows[li[t]][j] = c
        cyc = _linalg.nullspace(rows, m) if lower else [
            (j, [Q(int(i == j)) for i in range(m)]) for j in range(m)]
        bnd = bvecs.get((n, w), [])
        chosen = _linalg.independent_subset([v for _, v in cyc], [v for _, v in bnd])
        hreps = [cyc[i] for i in chosen]
        cpart = csel[(n, w)]
        cols = [v for _, v in hreps] + [v for _, v in bnd] + [
            [Q(int(i == idx[c])) for i in range(m)] for c in cpart]
        if len(cols) != m:
            raise ArithmeticError("homology splitting failed to span")
        P = [[cols[j][i] for j in range(m)] for i in range(m)]
        Pinv = _linalg.inverse(P)
        hnames = [keys[j] for j, _ in hreps]
        for name in hnames:
            Hgens[name] = n
            if by_weight:
                Hwts[name] = w
        nh, nb = len(hreps), len(bnd)
        for j, k in enumerate(keys):
            coords = [Pinv[i][j] for i in range(m)]
            fc = {hnames[i]: coords[i] for i in range(nh) if coords[i]}
            if fc:
                f_cols[k] = fc
            hc = {}
            for i in range(nb):
                beta = coords[nh + i]
                if beta:
                    _acc(hc, bnd[i][0], -beta)
            if hc:
                h_cols[k] = hc
        for (j, v), name in zip(hreps, hnames):
            g_cols[name] = {keys[i]: v[i] for i in range(m) if v[i]}
    H = GradedComplex(Hgens, {}, Hwts if by_weight else None,
                      label="homology", check=False)
    return H, f_cols, g_cols, h_cols


def homology(A):
    """Homology with zero differential, projection f: A -> H, inclusion
    g: H -> A of cycle representatives; f g = 1."""
    H, f_cols, g_cols, _ = homology_decomposition(A)
    return H, GradedMap(A, H, 0, f_cols), GradedMap(H, A, 0, g_cols)


def betti_numbers(A):
    H, _, _ = homology(A)
    out = {}
    for k in H.basis:
        out[H.degree(k)] = out.get(H.degree(k), 0) + 1
    return out


def q_coefficient(n, k):
    """k!(n-1-k)!/n! for k < n, and 0 for k = n."""
    if k >= n:
        return Q(0)
    return Q(factorial(k) * factorial(n - 1 - k), factorial(n))


def iter_product(*ranges):
    return product(*ranges)
