"""Homotopy transfer of A-infinity and L-infinity structures.

An A-infinity structure {m_n} on A is encoded as the coderivation of the
tensor coalgebra on V = sA with components

    b_n(sa_1 .. sa_n) = -(-1)^{sum_i (n-i)|sa_i|} s m_n(a_1, .., a_n),

and an L-infinity structure {l_n} the same way on the symmetric coalgebra.
Here |sa| = |a| + 1 and b_1 = -s d s^{-1} is the suspended differential.
Transfer runs the coalgebra tensor trick (with the symmetrized homotopy),
perturbs by the weight-lowering part of the coderivation and reads the
transferred operations and the infinity-morphisms off by corestriction.
"""

from itertools import combinations, permutations, product

from .exactlin import (GradedComplex, GradedMap, Q, compose, identity,
                       invert_perm, koszul_permute, tensor_maps, tensor_power,
                       homology, _acc, _sign)
from . import _linalg
from .contraction import Contraction, cancel_pair, contraction_from_homology, perturb
from .opalg import CCoalgebra, coderivation_from_corestriction, check_coderivation
from .report import Report
from . import schur as _schur
from .random_instances import rng_from, small_rational, _triangular_automorphism


# --- suspension -----------------------------------------------------------

def suspend(A):
    """sA with keys ('s', a), |sa| = |a| + 1, d(sa) = -s(da); unweighted."""
    degs = {("s", k): A.degree(k) + 1 for k in A.basis}
    d = {("s", k): {("s", t): -c for t, c in col.items()} for k, col in A.d.cols.items()}
    return GradedComplex(degs, d, label="s" + (A.label or "A"), check=False)


def suspend_map(m, VA, VB):
    """(-1)^{|m|} s m s^{-1}."""
    s = _sign(m.degree)
    return GradedMap(VA, VB, m.degree,
                     {("s", k): {("s", t): s * c for t, c in col.items()}
                      for k, col in m.cols.items()})


def suspend_contraction(c):
    VA, VB = suspend(c.A), suspend(c.B)
    return Contraction(suspend_map(c.f, VA, VB), suspend_map(c.g, VB, VA),
                       suspend_map(c.h, VA, VA))


def _unweighted(A):
    if not A.weighted:
        return A
    return GradedComplex({k: A.degree(k) for k in A.basis}, A.d.cols, None,
                         label=A.label, check=False)


def _shift_sign(word, degree):
    """(-1)^{sum_i (n-i)|x_i|} for a word x_1 .. x_n (i counted from 1)."""
    n = len(word)
    return _sign(sum((n - 1 - i) * degree(x) for i, x in enumerate(word)))


# --- structures -----------------------------------------------------------

class _InfStructure:
    kind = None

    def __init__(self, carrier, ops, check=False):
        """ops[n]: GradedMap tensor_power(carrier, n) -> carrier of degree
        n - 2, for n >= 2.  ops[1] is always the differential."""
        self.carrier = carrier
        A = carrier
        self.ops = {}
        for n, m in sorted(ops.items()):
            if n == 1:
                continue
            src = tensor_power(A, n)
            if m.source != src or m.target != A:
                m = GradedMap(src, A, m.degree, m.cols)
            if m.degree != n - 2 and not m.is_zero():
                raise ValueError(f"operation of arity {n} must have degree {n - 2}")
            self.ops[n] = GradedMap(src, A, n - 2, m.cols)
        self.ops[1] = GradedMap(tensor_power(A, 1), A, -1,
                                {(k,): col for k, col in A.d.cols.items()})
        if check:
            rep = verify_structure(self)
            if not rep.passed:
                raise ValueError(f"structure identities fail: {rep.failures()[0].name}")

    @property
    def max_arity(self):
        return max(self.ops)

    def op(self, n):
        if n in self.ops:
            return self.ops[n]
        A = self.carrier
        return GradedMap(tensor_power(A, n), A, n - 2, {})

    def corrupt(self, n, key, target, delta=1):
        m = self.op(n)
        cols = {k: dict(v) for k, v in m.cols.items()}
        _acc(cols.setdefault(key, {}), target, Q(delta))
        ops = dict(self.ops)
        ops[n] = GradedMap(m.source, m.target, m.degree, cols)
        return type(self)(self.carrier, ops)

    def __eq__(self, other):
        if type(self) is not type(other) or self.carrier != other.carrier:
            return False
        N = max(self.max_arity, other.max_arity)
        return all(self.op(n) == other.op(n) for n in range(1, N + 1))

    __hash__ = None

    def table(self, n):
        """{word: {target: coefficient}} for arity n."""
        return {k: dict(v) for k, v in self.op(n).cols.items()}

    def __repr__(self):
        return f"<{type(self).__name__} on rank {len(self.carrier)}, arities <= {self.max_arity}>"


class AInfStructure(_InfStructure):
    kind = "ainf"

    @classmethod
    def from_products(cls, A, products, check=True):
        """DGA: products {(a, b): {c: coefficient}} give m_2."""
        return cls(A, {2: _binary(A, products)}, check=check)


class LInfStructure(_InfStructure):
    kind = "linf"

    @classmethod
    def from_brackets(cls, A, brackets, check=True):
        """DGL: brackets {(a, b): {c: coefficient}} listed for one ordering
        of each pair; the other ordering is filled in by graded
        antisymmetry [b, a] = -(-1)^{|a||b|} [a, b]."""
        full = {}
        for (a, b), col in brackets.items():
            full[(a, b)] = dict(col)
            if a != b:
                s = -_sign(A.degree(a) * A.degree(b))
                full[(b, a)] = {t: s * Q(c) for t, c in col.items()}
        return cls(A, {2: _binary(A, full)}, check=check)

    def mutate(self, n, key, target, delta=1):
        """Change l_n(key) by delta*target and the permuted entries so that
        l_n stays graded antisymmetric."""
        A = self.carrier
        degs = [A.degree(a) for a in key]
        out = {}
        for sigma in permutations(range(n)):
            sg, new = koszul_permute(sigma, key, degs)
            _acc(out, new, sg * _perm_sign(sigma) * Q(delta))
        out = {k: v for k, v in out.items() if v}
        if not out:
            raise ValueError(f"antisymmetry forces l_{n}{key!r} = 0")
        m = self.op(n)
        cols = {k: dict(v) for k, v in m.cols.items()}
        for k, v in out.items():
            _acc(cols.setdefault(k, {}), target, v)
        ops = dict(self.ops)
        ops[n] = GradedMap(m.source, m.target, m.degree, {k: v for k, v in cols.items() if v})
        return LInfStructure(A, ops)


def _binary(A, table):
    cols = {}
    for (a, b), col in table.items():
        cols[(a, b)] = {t: Q(c) for t, c in col.items()}
    m = GradedMap(tensor_power(A, 2), A, 0, cols)
    m.check()
    return m


# --- identities -----------------------------------------------------------

def stasheff_map(structure, n):
    """sum_{r+s+t=n} (-1)^{r+st} m_{r+1+t} (1^r (x) m_s (x) 1^t) on A^{(x)n}."""
    A = structure.carrier
    one = identity(A)
    src = tensor_power(A, n)
    out = GradedMap(src, A, n - 3, {})
    for s in range(1, n + 1):
        for r in range(0, n - s + 1):
            t = n - s - r
            inner = tensor_maps([one] * r + [structure.op(s)] + [one] * t, source=src)
            term = compose(structure.op(r + 1 + t), inner)
            out = out + term * _sign(r + s * t)
    return out


def jacobi_map(structure, n):
    """sum_{i+j=n+1} sum_{sigma in Sh(i,n-i)} chi(sigma) (-1)^{i(j-1)}
    l_j(l_i(a_sigma(1) ..), a_sigma(i+1) ..) on A^{(x)n}."""
    A = structure.carrier
    src = tensor_power(A, n)
    cols = {}
    for key in src.basis:
        degs = [A.degree(a) for a in key]
        out = {}
        for i in range(1, n + 1):
            j = n + 1 - i
            li, lj = structure.op(i), structure.op(j)
            if li.is_zero() or lj.is_zero():
                continue
            for I in combinations(range(n), i):
                J = [x for x in range(n) if x not in I]
                order = tuple(I) + tuple(J)
                sigma = invert_perm(order)
                s, new = koszul_permute(sigma, key, degs)
                chi = s * _perm_sign(order)
                inner = li.cols.get(new[:i])
                if not inner:
                    continue
                base = chi * _sign(i * (j - 1))
                for x, c in inner.items():
                    for y, e in lj.cols.get((x,) + new[i:], {}).items():
                        _acc(out, y, base * c * e)
        if out:
            cols[key] = out
    return GradedMap(src, A, n - 3, cols)


def _perm_sign(p):
    s = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def check_antisymmetry(structure, n):
    """l_n(.., a, b, ..) = -(-1)^{|a||b|} l_n(.., b, a, ..)."""
    A = structure.carrier
    m = structure.op(n)
    src = tensor_power(A, n)
    for key in src.basis:
        degs = [A.degree(a) for a in key]
        for i in range(n - 1):
            sigma = list(range(n))
            sigma[i], sigma[i + 1] = i + 1, i
            s, new = koszul_permute(tuple(sigma), key, degs)
            lhs = m.cols.get(key, {})
            rhs = {t: -s * c for t, c in m.cols.get(new, {}).items()}
            if lhs != rhs:
                return key
    return None


def verify_structure(structure, N=None):
    """Stasheff (A-infinity) or generalized Jacobi (L-infinity) identities in
    every arity up to N, with the first failing word as witness."""
    N = structure.max_arity + 1 if N is None else N
    r = Report(f"{structure.kind} identities")
    for n in range(1, N + 1):
        if structure.kind == "ainf":
            m = stasheff_map(structure, n)
        else:
            m = jacobi_map(structure, n)
            if n >= 2:
                bad = check_antisymmetry(structure, n)
                r.add(f"arity {n} antisymmetry", bad is None, bad)
        r.add_map_zero(f"arity {n} identity", m)
    return r


# --- encode / decode ------------------------------------------------------

def coalgebra_kind(structure, symmetric=True):
    if structure.kind == "linf":
        return "symmetric"
    return "tensor" if symmetric else "nonsymmetric-tensor"


def suspend_operation(m, n, A, V):
    """b_n = -(-1)^{sum (n-i)|sa_i|} s m_n (..) on V^{(x)n}."""
    src = tensor_power(V, n)
    cols = {}
    for k, col in m.cols.items():
        sk = tuple(("s", a) for a in k)
        sg = -_shift_sign(sk, V.degree)
        cols[sk] = {("s", t): sg * c for t, c in col.items()}
    return GradedMap(src, V, -1, cols)


def desuspend_operation(b, n, A, V):
    src = tensor_power(A, n)
    cols = {}
    for sk, col in b.cols.items():
        k = tuple(x[1] for x in sk)
        sg = -_shift_sign(sk, V.degree)
        cols[k] = {t[1]: sg * c for t, c in col.items()}
    return GradedMap(src, A, n - 2, cols)


class Encoded:
    def __init__(self, structure, C, t, components):
        self.structure = structure
        self.C = C
        self.t = t
        self.components = components

    def square(self):
        X = self.C.X
        D = X.d + self.t
        return compose(D, D)


def encode(structure, N, symmetric=True, check=True):
    """Coderivation perturbation t on the cofree coalgebra on sA (arity <= N)
    whose corestriction is b_n for 2 <= n <= N."""
    A = _unweighted(structure.carrier)
    if A is not structure.carrier:
        structure = type(structure)(A, {n: m for n, m in structure.ops.items() if n > 1})
    V = suspend(A)
    C = CCoalgebra(coalgebra_kind(structure, symmetric), V, N)
    comps = {n: suspend_operation(structure.op(n), n, A, V)
             for n in range(2, N + 1) if n in structure.ops}
    t = coderivation_from_corestriction(C, comps)
    enc = Encoded(structure, C, t, comps)
    if check:
        sq = enc.square()
        if not sq.is_zero():
            k = sq.first_nonzero()
            raise ValueError(f"(d + t)^2 != 0 at arity {len(k[1])}")
    return enc


def decode(C, t, carrier, kind):
    """Inverse of encode: corestrict d + t and desuspend."""
    V = C.V
    comps = C.corestrict(t)
    ops = {}
    for n, b in comps.items():
        if n >= 2:
            ops[n] = desuspend_operation(b, n, carrier, V)
    cls = AInfStructure if kind == "ainf" else LInfStructure
    return cls(carrier, ops)


# --- transfer -------------------------------------------------------------

class InfMorphism:
    """Components F_n: A^{(x)n} -> B of degree n - 1, read off a coalgebra
    map F' by F_n(a_1..a_n) = (-1)^{sum (n-i)|sa_i|} s^{-1} F'_n(sa_1..sa_n)."""

    def __init__(self, source, target, components, coalgebra_map=None):
        self.source, self.target = source, target
        self.components = components
        self.coalgebra_map = coalgebra_map

    def __getitem__(self, n):
        return self.components[n]

    @classmethod
    def from_coalgebra_map(cls, C1, C2, F, A, B):
        comps = C2.corestrict(F.retarget(C1.X, C2.X))
        V = C1.V
        out = {}
        for n, m in comps.items():
            src = tensor_power(A, n)
            cols = {}
            for sk, col in m.cols.items():
                k = tuple(x[1] for x in sk)
                sg = _shift_sign(sk, V.degree)
                cols[k] = {t[1]: sg * c for t, c in col.items()}
            out[n] = GradedMap(src, B, n - 1, cols)
        return cls(A, B, out, F)


class TransferJob:
    def __init__(self, contraction, structure, max_arity, symmetric=True):
        if structure.carrier != contraction.A and _unweighted(structure.carrier) != _unweighted(contraction.A):
            raise ValueError("structure does not live on the source of the contraction")
        if max_arity < 2:
            raise ValueError("max arity must be at least 2")
        self.contraction = contraction
        self.structure = structure
        self.max_arity = max_arity
        self.symmetric = symmetric


class TransferResult:
    def __init__(self, job, structure, F, G, H, perturbed, tc, encoded):
        self.job = job
        self.structure = structure
        self.F, self.G = F, G
        self.H = H
        self.perturbed = perturbed
        self.tc = tc
        self.encoded = encoded

    def validate(self, check_coderivation_=True):
        """Identities of the transferred structure, the perturbed coalgebra
        contraction, and the coalgebra-level identity F'G' = 1."""
        N = self.job.max_arity
        r = Report("transfer")
        r.extend(verify_structure(self.structure, N), "B: ")
        r.extend(self.perturbed.validate(), "coalgebra: ")
        C2 = self.tc.C2
        t1 = self.perturbed.t_prime
        if check_coderivation_:
            r.extend(check_coderivation(t1.retarget(C2.X, C2.X), C2, 2), "t' coderivation: ")
        FG = compose(self.perturbed.f, self.perturbed.g)
        r.add_map_equal("F'G' = 1", FG, identity(FG.source))
        return r


class _CoalgebraPair:
    def __init__(self, C1, C2):
        self.C1, self.C2 = C1, C2


def transfer(job_or_structure, contraction=None, max_arity=None, symmetric=True):
    """Transfer along a contraction; returns a TransferResult."""
    if isinstance(job_or_structure, TransferJob):
        job = job_or_structure
    else:
        job = TransferJob(contraction, job_or_structure, max_arity, symmetric)
    c = job.contraction
    N = job.max_arity
    A, B = _unweighted(c.A), _unweighted(c.B)
    c = Contraction(c.f.retarget(A, B), c.g.retarget(B, A), c.h.retarget(A, A))
    enc = encode(job.structure, N, job.symmetric and job.structure.kind == "ainf"
                 or job.structure.kind == "linf")
    C1 = enc.C
    C2 = CCoalgebra(C1.kind, suspend(B), N)
    cV = suspend_contraction(c)
    sym = job.symmetric or job.structure.kind == "linf"
    tc = _schur.thick_tensor_trick(C1.X.O, cV, N, levels=1, N_arity=N, symmetric=sym)
    base = Contraction(tc.f.base(), tc.g.base(), tc.h.base())
    p = perturb(base, enc.t)
    struct_B = decode(C2, p.t_prime.retarget(C2.X, C2.X), B, job.structure.kind)
    F = InfMorphism.from_coalgebra_map(C1, C2, p.f, A, B)
    G = InfMorphism.from_coalgebra_map(C2, C1, p.g, B, A)
    pair = _CoalgebraPair(C1, C2)
    return TransferResult(job, struct_B, F, G, p.h, p, pair, enc)


def minimal_model(structure, N, symmetric=True):
    """Transfer onto homology with zero differential."""
    c = contraction_from_homology(_unweighted(structure.carrier))
    if structure.carrier is not c.A:
        structure = type(structure)(c.A, {n: m for n, m in structure.ops.items() if n > 1})
    return transfer(TransferJob(c, structure, N, symmetric))


def induced_binary(structure, c):
    """f m_2 (g (x) g) on B."""
    B = c.B
    m2 = structure.op(2)
    src = tensor_power(B, 2)
    gg = tensor_maps([c.g, c.g], source=src, target=m2.source)
    return compose(c.f, compose(m2, gg)).retarget(src, B)


def check_homology_inverse(c, F, G):
    """F_1 and G_1 induce mutually inverse maps on homology: F_1 G_1 = 1 on
    B up to boundaries, and G_1 F_1 - 1 maps cycles of A to boundaries."""
    A, B = c.A, c.B
    f1 = _unwrap(F[1], A, B)
    g1 = _unwrap(G[1], B, A)
    r = Report("homology isomorphism")
    HA, _, incA = homology(A)
    HB, _, incB = homology(B)
    r.add("ranks agree", len(HA) == len(HB), (len(HA), len(HB)))
    for z in HB.basis:
        v = g1(incB.cols.get(z, {}))
        w = _sub(f1(v), incB.cols.get(z, {}))
        r.add(f"F G = 1 on class {z!r}", _is_boundary(B, w), z)
    for z in HA.basis:
        v = f1(incA.cols.get(z, {}))
        w = _sub(g1(v), incA.cols.get(z, {}))
        r.add(f"G F = 1 on class {z!r}", _is_boundary(A, w), z)
    return r


def _unwrap(m, A, B):
    return GradedMap(A, B, m.degree, {k[0]: col for k, col in m.cols.items()})


def _sub(u, v):
    out = dict(u)
    for k, c in v.items():
        _acc(out, k, -c)
    return out


def _is_boundary(A, vec):
    if not vec:
        return True
    deg = A.degree(next(iter(vec)))
    keys = A.basis_in_degree(deg)
    idx = {k: i for i, k in enumerate(keys)}
    rows = []
    for k in A.basis_in_degree(deg + 1):
        col = A.d.cols.get(k, {})
        rows.append([col.get(t, Q(0)) for t in keys])
    base = _linalg.rank(rows, len(keys)) if rows else 0
    v = [Q(0)] * len(keys)
    for k, c in vec.items():
        v[idx[k]] = c
    return _linalg.rank(rows + [v], len(keys)) == base


# --- tree formula oracle --------------------------------------------------

def _tree_levels(structure, c, N, signs):
    """P_1 = g, P_n = sum_{k+l=n} s(k,l) m_2 (H_k (x) H_l) with H_1 = g and
    H_k = h P_k; returns {n: f P_n} on B^{(x)n}."""
    A, B = c.A, c.B
    m2 = structure.op(2)
    g1 = GradedMap(tensor_power(B, 1), A, 0, {(k,): col for k, col in c.g.cols.items()})
    P = {1: g1}
    Hk = {1: g1}
    out = {}
    for n in range(2, N + 1):
        src = tensor_power(B, n)
        acc = GradedMap(src, A, n - 2, {})
        for k in range(1, n):
            l = n - k
            term = compose(m2, tensor_maps([Hk[k], Hk[l]], source=src,
                                           target=tensor_power(A, 2)))
            acc = acc + term * signs(k, l)
        P[n] = acc
        Hk[n] = compose(c.h, acc)
        out[n] = compose(c.f, acc)
    return out


def sign_rule(a, b, cc, e):
    return lambda k, l: _sign(a * k + b * l + cc * k * l + e)


def calibrate_tree_signs(structure, c, reference, arities=(2, 3)):
    """All exponent vectors (a, b, c, e) in {0,1}^4 for which the tree sum
    with s(k,l) = (-1)^{ak + bl + ckl + e} matches `reference` (a dict
    arity -> map on B^{(x)n}) at the given arities."""
    good = []
    top = max(arities)
    for vec in product((0, 1), repeat=4):
        lv = _tree_levels(structure, c, top, sign_rule(*vec))
        if all(lv[n] == reference[n].retarget(lv[n].source, lv[n].target) for n in arities):
            good.append(vec)
    return good


STANDARD_RULE = (1, 0, 1, 0)   # s(k, l) = (-1)^{k(l+1)}


def preferred_rule(candidates):
    """Tie-break among rules that match at the calibration arities.  Rules
    differing by (-1)^{(k+1)(l+1)} agree through arity 3, so calibration
    alone leaves a choice; the standard recursion sign (-1)^{k(l+1)} is
    preferred when it survives, otherwise the rule with fewest monomials."""
    if not candidates:
        return None
    if STANDARD_RULE in candidates:
        return STANDARD_RULE
    return min(candidates, key=lambda v: (sum(v), v))


def calibrate_jointly(instances, arities=(2, 3)):
    """Rules matching the transfer on every (structure, contraction,
    reference) triple."""
    good = None
    for s, c, ref in instances:
        g = set(calibrate_tree_signs(s, c, ref, arities))
        good = g if good is None else good & g
    return sorted(good or ())


def tree_formula_oracle(structure, c, N, rule):
    """Transferred operations on B from the tree sum with a fixed sign rule."""
    lv = _tree_levels(structure, c, N, sign_rule(*rule))
    ops = {n: m.retarget(tensor_power(c.B, n), c.B) for n, m in lv.items()}
    return AInfStructure(c.B, ops)


# --- C-infinity check -----------------------------------------------------

def shuffle_vanishing_check(structure, N=None):
    """b_n vanishes on signed shuffle products sh(v_1..v_p ; v_{p+1}..v_n),
    p, q >= 1, computed in the suspended grading."""
    A = _unweighted(structure.carrier)
    V = suspend(A)
    N = structure.max_arity if N is None else N
    r = Report("shuffle vanishing")
    for n in range(2, N + 1):
        b = suspend_operation(structure.op(n), n, A, V)
        bad = None
        for word in product(V.basis, repeat=n):
            degs = [V.degree(x) for x in word]
            for p in range(1, n):
                out = {}
                for I in combinations(range(n), p):
                    J = [x for x in range(n) if x not in I]
                    # word[i] goes to slot (I + J)[i]
                    sigma = tuple(list(I) + J)
                    s, new = koszul_permute(sigma, word, degs)
                    for t, c in b.cols.get(new, {}).items():
                        _acc(out, t, s * c)
                if out:
                    bad = (word, p)
                    break
            if bad:
                break
        r.add(f"arity {n}", bad is None, bad)
    return r


# --- Massey search --------------------------------------------------------

def _dga_from_tables(degs, dtab, mtab):
    names = [f"e{i}" for i in range(len(degs))]
    A = GradedComplex({names[i]: degs[i] for i in range(len(degs))},
                      {names[i]: {names[j]: c for j, c in col.items()} for i, col in dtab.items()},
                      check=False)
    prods = {(names[i], names[j]): {names[k]: c for k, c in col.items()}
             for (i, j), col in mtab.items()}
    return A, prods


def _fast_dga_ok(degs, dtab, mtab):
    """d^2 = 0, Leibniz and associativity on index tables."""
    n = len(degs)

    def dv(v):
        out = {}
        for i, c in v.items():
            for j, e in dtab.get(i, {}).items():
                _acc(out, j, c * e)
        return out

    def mv(u, v):
        out = {}
        for i, c in u.items():
            for j, e in v.items():
                for l, f in mtab.get((i, j), {}).items():
                    _acc(out, l, c * e * f)
        return out

    for i in range(n):
        if dv(dtab.get(i, {})):
            return False
    for i in range(n):
        for j in range(n):
            lhs = dv(mtab.get((i, j), {}))
            rhs = mv(dtab.get(i, {}), {j: Q(1)})
            for l, c in mv({i: Q(1)}, dtab.get(j, {})).items():
                _acc(rhs, l, _sign(degs[i]) * c)
            if lhs != rhs:
                return False
            ij = mtab.get((i, j), {})
            for l in range(n):
                if mv(ij, {l: Q(1)}) != mv({i: Q(1)}, mtab.get((j, l), {})):
                    return False
    return True


def _dga_ok(A, prods):
    if not compose(A.d, A.d).is_zero():
        return False
    s = AInfStructure(A, {2: _binary(A, prods)})
    return stasheff_map(s, 2).is_zero() and stasheff_map(s, 3).is_zero()


def massey_witness(result, c):
    """Triples (x, y, z) of homology classes with x y = y z = 0 and
    m_3(x, y, z) outside the indeterminacy x H + H z; returns the first,
    with the data needed to check it."""
    S = result.structure
    B = S.carrier
    m2, m3 = S.op(2), S.op(3)
    for key in tensor_power(B, 3).basis:
        x, y, z = key
        if m2.cols.get((x, y)) or m2.cols.get((y, z)):
            continue
        val = m3.cols.get(key)
        if not val:
            continue
        deg = B.degree(x) + B.degree(y) + B.degree(z) + 1
        span = []
        for w in B.basis:
            if B.degree(x) + B.degree(w) == deg:
                span.append(m2.cols.get((x, w), {}))
            if B.degree(w) + B.degree(z) == deg:
                span.append(m2.cols.get((w, z), {}))
        keys = B.basis_in_degree(deg)
        rows = [[v.get(k, Q(0)) for k in keys] for v in span if v]
        vrow = [val.get(k, Q(0)) for k in keys]
        base = _linalg.rank(rows, len(keys)) if rows else 0
        if _linalg.rank(rows + [vrow], len(keys)) > base:
            return {"triple": key, "m3": val, "indeterminacy": span}
    return None


def _mul(m2, u, v):
    out = {}
    for a, c in u.items():
        for b, e in v.items():
            for t, f in m2.cols.get((a, b), {}).items():
                _acc(out, t, c * e * f)
    return out


def _bar(A, v):
    """x -> (-1)^{1+|x|} x on a homogeneous vector."""
    if not v:
        return v
    s = _sign(1 + A.degree(next(iter(v))))
    return {k: s * c for k, c in v.items()}


def _preimage(A, vec, deg):
    """Some u of degree deg with du = vec, or None."""
    keys = A.basis_in_degree(deg)
    tkeys = A.basis_in_degree(deg - 1)
    rows = [[A.d.cols.get(k, {}).get(t, Q(0)) for k in keys] for t in tkeys]
    sol = _linalg.solve(rows, len(keys), [vec.get(t, Q(0)) for t in tkeys])
    if sol is None:
        return None
    return {k: c for k, c in zip(keys, sol) if c}


def _cycles(A, deg):
    keys = A.basis_in_degree(deg)
    tkeys = A.basis_in_degree(deg - 1)
    rows = [[A.d.cols.get(k, {}).get(t, Q(0)) for k in keys] for t in tkeys]
    if not rows:
        return [{k: Q(1)} for k in keys]
    return [{k: c for k, c in zip(keys, v) if c} for _, v in _linalg.nullspace(rows, len(keys))]


def massey_direct(structure, x, y, z):
    """Triple Massey product computed in A from a defining system:
    du = x' y, dv = y' z with w' = (-1)^{1+|w|} w, value u' z + x' v.
    x, y, z are cycle vectors.  Returns (value, indeterminacy vectors) or
    None when the product is not defined; the indeterminacy lists c' z and
    x' c over cycles c of the right degrees."""
    A = structure.carrier
    m2 = structure.op(2)
    deg = lambda v: A.degree(next(iter(v)))
    du, dv = _mul(m2, _bar(A, x), y), _mul(m2, _bar(A, y), z)
    ud, vd = deg(x) + deg(y) + 1, deg(y) + deg(z) + 1
    u = _preimage(A, du, ud) if du else {}
    v = _preimage(A, dv, vd) if dv else {}
    if u is None or v is None:
        return None
    val = _mul(m2, _bar(A, u), z) if u else {}
    for k, c in (_mul(m2, _bar(A, x), v) if v else {}).items():
        _acc(val, k, c)
    ind = [_mul(m2, _bar(A, c), z) for c in _cycles(A, ud)]
    ind += [_mul(m2, _bar(A, x), c) for c in _cycles(A, vd)]
    return val, [w for w in ind if w]


def massey_nontrivial(structure, x, y, z):
    """True iff the Massey product is defined and its value is not a
    boundary plus an element of the indeterminacy."""
    r = massey_direct(structure, x, y, z)
    if r is None:
        return False
    val, ind = r
    if not val:
        return False
    A = structure.carrier
    d = A.degree(next(iter(val)))
    keys = A.basis_in_degree(d)
    span = ind + [A.d.cols.get(k, {}) for k in A.basis_in_degree(d + 1)]
    rows = [[w.get(k, Q(0)) for k in keys] for w in span if w]
    base = _linalg.rank(rows, len(keys)) if rows else 0
    return _linalg.rank(rows + [[val.get(k, Q(0)) for k in keys]], len(keys)) > base


def find_massey_instance(max_rank=5, degree_range=(1, 4), coefficients=(-1, 1),
                         max_constants=6):
    """Bounded brute-force search for a DGA with structure constants in
    {-1, 0, 1} whose minimal model has m_3 nonzero modulo the Massey
    indeterminacy.  Enumeration runs by rank, then number of nonzero
    constants, then degree profile, so the first hit is a sparsest one of
    least rank.  Returns (A, products, witness) or None."""
    from itertools import combinations_with_replacement
    lo, hi = degree_range
    for rank in range(3, max_rank + 1):
        for k in range(2, max_constants + 1):
            for degs in combinations_with_replacement(range(lo, hi + 1), rank):
                hit = _massey_profile(degs, k, coefficients)
                if hit is not None:
                    return hit
    return None


def _massey_profile(degs, k, coefficients):
    rank = len(degs)
    dslots = [("d", i, j) for i in range(rank) for j in range(rank) if degs[j] == degs[i] - 1]
    mslots = [("m", i, j, l) for i in range(rank) for j in range(rank) for l in range(rank)
              if degs[i] + degs[j] == degs[l]]
    slots = dslots + mslots
    for chosen in combinations(slots, k):
        nd = sum(1 for x in chosen if x[0] == "d")
        if nd == 0 or nd == k:
            continue
        # a Massey triple needs a product of cycles that is a nonzero boundary
        dtargets = {x[2] for x in chosen if x[0] == "d"}
        if not any(x[0] == "m" and x[3] in dtargets for x in chosen):
            continue
        for vals in product(coefficients, repeat=k):
            dtab, mtab = {}, {}
            for x, v in zip(chosen, vals):
                if x[0] == "d":
                    dtab.setdefault(x[1], {})[x[2]] = Q(v)
                else:
                    mtab.setdefault((x[1], x[2]), {})[x[3]] = Q(v)
            if not _fast_dga_ok(degs, dtab, mtab):
                continue
            A, prods = _dga_from_tables(degs, dtab, mtab)
            c = contraction_from_homology(A)
            if len(c.B) < 2:
                continue
            s = AInfStructure(A, {2: _binary(A, prods)})
            w = massey_witness(transfer(TransferJob(c, s, 3)), c)
            if w is not None:
                return A, prods, w
    return None


# --- random DGAs and DGLs -------------------------------------------------

def _conjugate(structure, phi, inv):
    """Transport a structure along the degree-0 linear isomorphism phi."""
    A = structure.carrier
    d = compose(phi, compose(A.d, inv))
    A2 = GradedComplex({k: A.degree(k) for k in A.basis}, d.cols, check=False)
    ops = {}
    for n, m in structure.ops.items():
        if n == 1:
            continue
        src = tensor_power(A, n)
        pre = tensor_maps([inv] * n, source=src, target=src)
        ops[n] = compose(phi, compose(m, pre)).retarget(tensor_power(A2, n), A2)
    return type(structure)(A2, ops)


def _massey_template(rng, deg_range):
    """Generators and tables of a DGA with a Massey triple: cycles a, b, c,
    ab = x = du, bc = y = dv, uc = alpha z, av = beta z (a = b = c allowed)."""
    lo, hi = deg_range
    coef = lambda: small_rational(rng, allow_zero=False)
    if rng.random() < 0.5:
        da = rng.randint(lo, hi)
        degs = {"a": da, "x": 2 * da, "u": 2 * da + 1, "z": 3 * da + 1}
        lam = coef()
        d = {"u": {"x": lam}}
        al = coef()
        be = coef()
        while abs(be) == abs(al):
            be = coef()
        table = {("a", "a"): {"x": lam}, ("u", "a"): {"z": al}, ("a", "u"): {"z": be}}
    else:
        da, db, dc = (rng.randint(lo, hi) for _ in range(3))
        degs = {"a": da, "b": db, "c": dc, "x": da + db, "y": db + dc,
                "u": da + db + 1, "v": db + dc + 1, "z": da + db + dc + 1}
        lam, mu = coef(), coef()
        d = {"u": {"x": Q(1)}, "v": {"y": Q(1)}}
        table = {("a", "b"): {"x": Q(1)}, ("b", "c"): {"y": Q(1)},
                 ("u", "c"): {"z": lam}, ("a", "v"): {"z": mu}}
    return degs, d, table


def random_dga(seed, extra=(0, 2), deg_range=(0, 2), density=0.5, max_tries=200):
    """Seeded DGA whose minimal model has m_3 != 0: a Massey template with
    random degrees and coefficients, up to `extra` further generators with
    random differential and products (kept only if all DGA axioms hold),
    conjugated by a random degree-0 linear automorphism."""
    rng = rng_from(seed)
    for _ in range(max_tries):
        degs, d, table = _massey_template(rng, deg_range)
        s = _with_extras(rng, degs, d, table, rng.randint(*extra), density, "ainf")
        if s is None or minimal_model(s, 3).structure.op(3).is_zero():
            continue
        phi, inv = _triangular_automorphism(rng, s.carrier, density=0.6)
        return _conjugate(s, phi, inv)
    raise RuntimeError("no DGA found")


def random_dgl(seed, extra=(0, 2), deg_range=(0, 2), density=0.5, max_tries=200):
    """Seeded DGL with l_3 != 0 on its minimal model: the graded commutator
    of a Massey template DGA, with random extra generators and a random
    linear conjugation."""
    rng = rng_from(seed)
    for _ in range(max_tries):
        degs, d, table = _massey_template(rng, deg_range)
        A = GradedComplex(degs, d, check=False)
        br = {}
        for (a, b), col in table.items():
            for c, v in col.items():
                _acc(br.setdefault((a, b), {}), c, v)
                _acc(br.setdefault((b, a), {}), c, -_sign(A.degree(a) * A.degree(b)) * v)
        br = {k: v for k, v in br.items() if v}
        s = _with_extras(rng, degs, d, br, rng.randint(*extra), density, "linf")
        if s is None or minimal_model(s, 3).structure.op(3).is_zero():
            continue
        phi, inv = _triangular_automorphism(rng, s.carrier, density=0.6)
        return _conjugate(s, phi, inv)
    raise RuntimeError("no DGL found")


def _with_extras(rng, degs, d, table, k, density, kind, tries=30):
    """Add k generators with random d and products; None if no valid
    completion is found."""
    cls = AInfStructure if kind == "ainf" else LInfStructure
    for _ in range(tries):
        degs2, d2 = dict(degs), {a: dict(c) for a, c in d.items()}
        t2 = {a: dict(c) for a, c in table.items()}
        lo = min(degs.values())
        hi = max(degs.values())
        for i in range(k):
            degs2[f"w{i}"] = rng.randint(lo, hi + 1)
        names = sorted(degs2)
        new = [f"w{i}" for i in range(k)]
        for a in names:
            for b in names:
                if (a in new or b in new) and degs2[b] == degs2[a] - 1 and rng.random() < density:
                    d2.setdefault(a, {})[b] = small_rational(rng, allow_zero=False)
        for a in names:
            for b in names:
                if a not in new and b not in new:
                    continue
                for c in names:
                    if degs2[a] + degs2[b] == degs2[c] and rng.random() < density / 2:
                        v = small_rational(rng, allow_zero=False)
                        _acc(t2.setdefault((a, b), {}), c, v)
                        if kind == "linf":
                            sg = -_sign(degs2[a] * degs2[b])
                            _acc(t2.setdefault((b, a), {}), c, sg * v)
        A = GradedComplex(degs2, d2, check=False)
        if not compose(A.d, A.d).is_zero():
            continue
        t2 = {a: c for a, c in t2.items() if c}
        if kind == "linf" and any(a == b and not (degs2[a] % 2) and c for (a, b), c in t2.items()):
            continue
        s = cls(A, {2: _binary(A, t2)})
        if verify_structure(s, 3).passed:
            return s
    return None


def _minimal_m3_nonzero(s):
    if len(homology(s.carrier)[0]) == len(s.carrier):
        return False
    return not minimal_model(s, 3).structure.op(3).is_zero()


def _small_templates(rng):
    """Rank-4 DGA templates (degrees, d, products, pair to cancel or None
    for the homology contraction)."""
    coef = lambda: small_rational(rng, allow_zero=False)
    kind = rng.choice(("square", "idempotent", "massey"))
    if kind == "square":
        p = rng.randint(0, 1)
        degs = {"b": p, "y": 2 * p, "x": 2 * p + 1, "w": 4 * p + 2}
        nu = coef()
        return kind, degs, {"x": {"y": nu}}, {("b", "b"): {"y": coef()}, ("x", "x"): {"w": coef()}}, ("x", "y")
    if kind == "idempotent":
        q = rng.randint(0, 2)
        degs = {"e": 0, "x": 1, "y": 0, "z": q}
        table = {("e", "e"): {"e": Q(1)}, ("e", "x"): {"x": Q(1)}, ("x", "e"): {"x": Q(1)},
                 ("e", "y"): {"y": Q(1)}, ("y", "e"): {"y": Q(1)}}
        if rng.random() < 0.5:
            table[("e", "z")] = {"z": Q(1)}
        if rng.random() < 0.5:
            table[("z", "e")] = {"z": Q(1)}
        return kind, degs, {"x": {"y": coef()}}, table, ("x", "y")
    degs, d, table = _massey_template(rng, (0, 2))
    if len(degs) > 4:
        return _small_templates(rng)
    return kind, degs, d, table, None


def random_tree_instance(seed, extra_density=0.3, tries=30):
    """Seeded (structure, contraction) for tree-formula comparisons: a
    rank-4 DGA template with random coefficients, random extra products
    kept only when the DGA axioms still hold, a random linear conjugation,
    and either a pair cancellation or the homology contraction."""
    rng = rng_from(seed)
    kind, degs, d, table, pair = _small_templates(rng)
    A = GradedComplex(degs, d, check=False)
    s = AInfStructure(A, {2: _binary(A, table)})
    names = sorted(degs)
    for _ in range(tries):
        t2 = {k: dict(v) for k, v in table.items()}
        for a in names:
            for b in names:
                for c in names:
                    if degs[a] + degs[b] == degs[c] and (a, b) not in table and rng.random() < extra_density:
                        _acc(t2.setdefault((a, b), {}), c, small_rational(rng, allow_zero=False))
        cand = AInfStructure(A, {2: _binary(A, t2)})
        if verify_structure(cand, 3).passed:
            s = cand
            break
    phi, inv = _triangular_automorphism(rng, A, density=0.6)
    s = _conjugate(s, phi, inv)
    if pair is None:
        c = contraction_from_homology(s.carrier)
    else:
        x = pair[0]
        y = sorted(s.carrier.d.cols[x])[0]
        c = cancel_pair(s.carrier, x, y)
    return s, c
