import random
from fractions import Fraction as Q
from itertools import product

import pytest

from hpt import opalg, thick, transfer as tr
from hpt.contraction import Contraction, contraction_from_homology
from hpt.exactlin import GradedComplex, GradedMap, compose, identity, tensor_power
from hpt.random_instances import random_disc_sum, random_general_contraction


def test_free_com_on_even_generator():
    A = GradedComplex({"x": 2})
    alg = opalg.free_algebra("commutative", A, 5)
    xp = lambda p: {("*", ("x",) * p): Q(1)}
    for p in range(1, 5):
        for q in range(1, 6 - p):
            assert alg.mul(xp(p), xp(q)) == xp(p + q)
    assert alg.check_axioms().passed


def test_free_as_on_odd_generator():
    A = GradedComplex({"y": 1})
    alg = opalg.free_algebra("associative", A, 3)
    y = alg.generator("y")
    yy = alg.mul(y, y)
    assert yy == {((0, 1), ("y", "y")): 1}
    assert alg.mul(y, yy) == alg.mul(yy, y) == {((0, 1, 2), ("y", "y", "y")): 1}
    # the transposed operation picks up the Koszul sign
    swapped = alg.op(2, (1, 0)).image((((0,), ("y",)), ((0,), ("y",))))
    assert swapped == {((0, 1), ("y", "y")): -1}
    assert alg.check_axioms().passed


def test_free_algebra_on_zero():
    alg = opalg.free_algebra("commutative", GradedComplex({}), 3)
    assert all(len(k[1]) == 0 for k in alg.X.basis)


def test_free_algebra_axioms_random():
    for seed in range(3):
        A = random_disc_sum(seed, max_rank=3)
        for kind in opalg.KINDS:
            assert opalg.free_algebra(kind, A, 3).check_axioms().passed


def test_oalgebra_thick_morphism_and_derivation():
    c = random_general_contraction(3, rank_B=(1, 2), discs=(1, 1))
    for kind in ("commutative", "associative"):
        otc = opalg.oalgebra_tensor_trick(kind, c, 3, levels=2)
        Aa, Ba = otc.Aalg, otc.Balg
        # an algebra morphism is the free extension of c.f on generators
        F1 = Aa.morphism_from_generators(Ba, {a: {Ba._gen_key(b): v for b, v in c.f.image(a).items()}
                                              for a in c.A.basis})
        assert F1 == otc.f.base()
        F = thick.extend_as_morphism(F1, 2, Aa.X.N_weight)
        assert opalg.check_oalgebra_thick(F, Aa, Ba).passed
        # the differential of a free algebra is a derivation
        D = thick.extend_as_derivation(Aa.X.d, N=2, max_weight=Aa.X.N_weight)
        assert opalg.check_oalgebra_thick(D, Aa, Aa).passed


def test_oalgebra_thick_detects_corruption():
    c = random_general_contraction(4, rank_B=(1, 2), discs=(1, 1))
    otc = opalg.oalgebra_tensor_trick("associative", c, 3, levels=2)
    m, mu = otc.f[2], otc.Balg.op(2)
    # change f_2 on some pair towards a pair whose product in B is nonzero
    key, tgt = next((k, t) for k in m.source.basis for t in m.target.basis
                    if m.target.degree(t) == m.source.degree(k) and mu.image(t))
    rep = opalg.check_oalgebra_thick(otc.f.corrupt(2, key, tgt), otc.Aalg, otc.Balg)
    assert not rep.passed
    assert rep.failures()[0].witness == key


def test_oalgebra_tensor_tricks_validate():
    for seed in range(3):
        c = random_general_contraction(seed, rank_B=(1, 2), discs=(1, 1))
        for kind in ("commutative", "associative"):
            assert opalg.oalgebra_tensor_trick(kind, c, 3, levels=2).validate(2).passed
    one = opalg.oalgebra_tensor_trick("commutative", Contraction.trivial(random_disc_sum(1)), 3)
    assert one.h[1].is_zero() and one.validate(2).passed


def test_classical_homotopy_needs_nonsymmetric_operad():
    c = random_general_contraction(2)
    with pytest.raises(ValueError):
        opalg.oalgebra_tensor_trick("associative", c, 3, symmetric=False)
    otc = opalg.oalgebra_tensor_trick("nonsymmetric-associative", c, 3, levels=1, symmetric=False)
    _, _, H = thick.classical_tensor_formulas(c, 2)
    got = {k[0][1]: {t[0][1]: v for t, v in col.items()}
           for k, col in otc.h[1].cols.items() if len(k[0][1]) == 2}
    assert got == {k: col for k, col in H.cols.items()}


@pytest.mark.parametrize("kind", ["commutative", "associative"])
def test_filtered_perturbation_of_free_algebras(kind):
    for seed in range(3):
        otc, t = opalg.random_filtered_oalgebra_instance(kind, seed, N=3, levels=2, max_rank=3)
        p = opalg.perturb_oalgebra(otc, t)
        assert p.validate(2).passed
    zero = GradedMap(otc.Aalg.X, otc.Aalg.X, -1, {})
    p0 = opalg.perturb_oalgebra(otc, zero)
    assert p0.pt.t_prime[1].is_zero()
    assert all(p0.pt.f[n].cols == otc.f[n].cols for n in range(3))


def test_perturb_oalgebra_rejects_non_derivations():
    otc, t = opalg.random_filtered_oalgebra_instance("commutative", 0, N=3, levels=2, max_rank=3)
    # zero on generators but not on a product: not a derivation
    X = otc.Aalg.X
    bad = GradedMap(X, X, -1, {("*", ("e1", "e2")): {("*", ("e1",)): Q(1)}}, check=True)
    with pytest.raises(ValueError):
        opalg.perturb_oalgebra(otc, bad)


# --- coalgebras ---------------------------------------------------------------------

def test_cofree_coalgebra_axioms():
    V = GradedComplex({"a": 0, "b": 1})
    for kind in ("tensor", "symmetric", "nonsymmetric-tensor"):
        assert opalg.cofree_coalgebra(kind, V, 4).check_axioms().passed


def test_zero_corestriction_gives_zero_coderivation():
    V = GradedComplex({"a": 0, "b": 1})
    C = opalg.cofree_coalgebra("tensor", V, 3)
    z = {n: GradedMap(tensor_power(V, n), V, -1, {}) for n in (2, 3)}
    assert opalg.coderivation_from_corestriction(C, z).is_zero()


def _rank2_algebra(bits):
    A = GradedComplex({"e": 0, "x": 0})
    names = ("e", "x")
    prods = {}
    for (a, b, t), on in zip(product(names, names, names), bits):
        if on:
            prods.setdefault((a, b), {})[t] = Q(1)
    return tr.AInfStructure.from_products(A, prods, check=False)


def test_tensor_coalgebra_square_zero_iff_associative():
    agree, assoc, nonassoc = True, 0, 0
    for bits in product((0, 1), repeat=8):
        S = _rank2_algebra(bits)
        is_assoc = tr.stasheff_map(S, 3).is_zero()
        sq = tr.encode(S, 4, check=False).square().is_zero()
        agree &= is_assoc == sq
        assoc += is_assoc
        nonassoc += not is_assoc
    assert agree and assoc and nonassoc


def test_symmetric_coalgebra_square_zero_iff_jacobi():
    A = GradedComplex({"a": 0, "b": 0, "c": 0})
    pairs = [("a", "b"), ("a", "c"), ("b", "c")]
    rng = random.Random(0)
    seen = {True: 0, False: 0}
    for _ in range(60):
        br = {}
        for p in pairs:
            col = {t: Q(rng.randint(-1, 1)) for t in A.basis}
            br[p] = {t: v for t, v in col.items() if v}
        L = tr.LInfStructure.from_brackets(A, br, check=False)
        jac = tr.jacobi_map(L, 3).is_zero()
        sq = tr.encode(L, 3, check=False).square().is_zero()
        assert jac == sq
        seen[jac] += 1
    assert seen[True] and seen[False]


def test_coalgebra_tensor_tricks_validate():
    for seed in range(3):
        c = random_general_contraction(seed, rank_B=(1, 2), discs=(1, 1))
        for kind in ("symmetric", "tensor"):
            assert opalg.coalgebra_tensor_trick(kind, c, 3, levels=2).validate(2).passed


def test_perturb_coalgebra_zero_and_rejections():
    c = contraction_from_homology(random_disc_sum(2))
    ctc = opalg.coalgebra_tensor_trick("tensor", c, 3, levels=2)
    X = ctc.C1.X
    p = opalg.perturb_coalgebra(ctc, GradedMap(X, X, -1, {}))
    assert p.validate(2).passed and p.pt.t_prime[1].is_zero()
    # a weight-preserving map is refused
    with pytest.raises(ValueError):
        opalg.perturb_coalgebra(ctc, X.d)
