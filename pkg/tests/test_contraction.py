from fractions import Fraction as Q

import pytest

from hpt.contraction import (Contraction, NonNilpotent, Perturbation, cancel_pair,
                             compose_contractions, contraction_from_homology, perturb,
                             repair_side_conditions, validate_contraction)
from hpt.exactlin import GradedComplex, GradedMap, compose, identity
from hpt.random_instances import (random_complex, random_filtered_instance,
                                  random_general_contraction)
from hpt.schur import disc_complex


def disc_onto_zero(hy):
    D = disc_complex(1, 2)
    Z = GradedComplex({})
    return Contraction(GradedMap(D, Z, 0, {}), GradedMap(Z, D, 0, {}),
                       GradedMap(D, D, 1, {"y": {"x": Q(hy)}}))


def test_identity_contraction_validates():
    A = random_complex(3, rank=4)
    assert Contraction.trivial(A).validate().passed


def test_disc_contraction():
    r = disc_onto_zero(-1).validate()
    assert r.passed, r.failures()
    bad = disc_onto_zero(-2).validate()
    assert bad.get("dh = gf - 1").passed is False
    assert bad.get("dh = gf - 1").witness == "x"


def test_from_homology_cases():
    A = GradedComplex({"a": 0, "b": 1})
    c = contraction_from_homology(A)
    assert c.f == identity(A).retarget(target=c.B) and c.h.is_zero()
    c = contraction_from_homology(disc_complex(1, 2))
    assert len(c.B) == 0 and c.h.image("y") == {"x": -1}
    for seed in range(20):
        assert contraction_from_homology(random_complex(seed, rank=6)).validate().passed


def test_repair_leaves_a_contraction_alone():
    A = GradedComplex.from_generators([("a", 0), ("x", 1), ("y", 0)], {"x": [(1, "y")]})
    c = contraction_from_homology(A)
    r = repair_side_conditions(c.f, c.g, c.h)
    assert r.validate().passed and r.h.cols == c.h.cols


def test_repair_kills_hg():
    # rank 3, zero differential, f = g = 1 and the raw homotopy a -> b:
    # dh + hd = 0 = gf - 1 holds but hg != 0
    A = GradedComplex({"a": 0, "b": 1, "c": 1})
    one = identity(A)
    h0 = GradedMap(A, A, 1, {"a": {"b": Q(1), "c": Q(2)}})
    assert not compose(h0, one).is_zero()
    r = repair_side_conditions(one, one, h0)
    assert compose(r.h, r.g).is_zero() and r.validate().passed


def test_repair_of_mixed_raw_homotopy():
    # A = <a> + D(1,1), B = <a>; h0 = h + (a -> x) needs g(a) = a + y
    A = GradedComplex.from_generators([("a", 0), ("x", 1), ("y", 0)], {"x": [(1, "y")]})
    B = GradedComplex({"a": 0})
    f = GradedMap(A, B, 0, {"a": {"a": Q(1)}})
    g = GradedMap(B, A, 0, {"a": {"a": Q(1), "y": Q(1)}})
    h0 = GradedMap(A, A, 1, {"y": {"x": Q(-1)}, "a": {"x": Q(1)}})
    r = repair_side_conditions(f, g, h0)
    assert r.validate().passed


def test_repair_iso_case():
    B = GradedComplex({"p": 0})
    assert repair_side_conditions(identity(B), identity(B), GradedMap(B, B, 1, {})).h.is_zero()


def test_repair_rejects_non_retracts():
    A = GradedComplex({"a": 0})
    with pytest.raises(ValueError):
        repair_side_conditions(identity(A) * 2, identity(A), GradedMap(A, A, 1, {}))


def test_cancel_pair_and_compose():
    for seed in range(40):
        c = random_general_contraction(seed)
        A = c.A
        pairs = [(x, y) for x, col in A.d.cols.items() for y in col]
        if not pairs:
            continue
        c1 = cancel_pair(A, *pairs[0])
        assert c1.validate().passed
        B = c1.B
        more = [(x, y) for x, col in B.d.cols.items() for y in col]
        if more:
            c2 = cancel_pair(B, *more[0])
            assert compose_contractions(c1, c2).validate().passed
    with pytest.raises(ValueError):
        cancel_pair(disc_complex(1, 2), "y", "x")


# --- perturbation lemma -------------------------------------------------------

def test_zero_perturbation():
    A, _ = random_filtered_instance(1)
    c = contraction_from_homology(A)
    p = perturb(c, GradedMap(A, A, -1, {}))
    assert p.t_prime.is_zero()
    assert p.f.cols == c.f.cols and p.g.cols == c.g.cols and p.h.cols == c.h.cols


def test_identity_contraction_passes_t_through():
    A, t = random_filtered_instance(2, nonzero=True)
    p = perturb(Contraction.trivial(A), t)
    assert p.h.is_zero() and p.t_prime.cols == t.cols
    assert p.f.cols == identity(A).cols


@pytest.mark.parametrize("seed", range(10))
def test_series_matches_hand_expansion(seed):
    A, t = random_filtered_instance(seed, max_rank=4, nonzero=True)
    c = contraction_from_homology(A)
    f, g, h = c.f, c.g, c.h
    ht = compose(h, t)
    # weights 0..4 and ht lowers weight, so (ht)^5 = 0
    powers = [identity(A)]
    for _ in range(5):
        powers.append(compose(ht, powers[-1]))
    assert powers[5].is_zero()
    sigma = sum((compose(t, P) for P in powers[:5]), GradedMap(A, A, -1, {}))
    p = perturb(c, t)
    assert p.sigma.cols == sigma.cols
    assert p.f.cols == (f + compose(f, compose(sigma, h))).cols
    assert p.g.cols == (g + compose(h, compose(sigma, g))).cols
    assert p.h.cols == (h + compose(h, compose(sigma, h))).cols
    assert p.t_prime.cols == compose(f, compose(sigma, g)).cols
    assert p.validate().passed


def test_random_filtered_perturbations_validate():
    for seed in range(30):
        A, t = random_filtered_instance(seed, nonzero=True)
        assert Perturbation(A, t, filtration_drop=1).validate().passed
        assert perturb(contraction_from_homology(A), t).validate().passed


def test_non_nilpotent_raises():
    # dx = y, t(x) = y as well: h t (x) = -x, so (ht)^n never vanishes
    D = disc_complex(1, 1)
    c = contraction_from_homology(D)
    t = GradedMap(D, D, -1, {"x": {"y": Q(1)}})
    with pytest.raises(NonNilpotent):
        perturb(c, t, max_terms=10)


def test_report_witness():
    r = validate_contraction(disc_onto_zero(-2))
    assert not r.passed
    assert {f.name for f in r.failures()} >= {"dh = gf - 1"}


def test_filtered_generator_rejects_infeasible_rank():
    with pytest.raises(ValueError):
        random_filtered_instance(0, max_rank=2, nonzero=True)
