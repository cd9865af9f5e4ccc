"""Seeded property bundles shared by the `check` command and the
acceptance tests.  Each case function returns a Report."""

from .contraction import contraction_from_homology, perturb
from .random_instances import (random_filtered_instance, random_general_contraction)
from .report import Report
from . import thick as _thick
from . import schur as _schur
from . import opalg as _opalg


def contraction_case(seed, max_rank=6):
    """Perturbation lemma on a random filtered contraction: all contraction
    identities for the perturbed diagram and (d + t')^2 = 0."""
    A, t = random_filtered_instance(seed, max_rank=max_rank, nonzero=True)
    c = contraction_from_homology(A)
    p = perturb(c, t)
    r = Report(f"contraction seed={seed}")
    r.extend(c.validate(), "base: ")
    r.extend(p.validate(), "perturbed: ")
    r.rank = len(A)
    return r


def thick_case(seed, N=4):
    """Symmetrized homotopy: closed form against the n!-average, symmetry,
    pseudo-derivation, the 14 annihilation conditions, module conditions
    and the contraction identities at every level."""
    c = random_general_contraction(seed, rank_B=(1, 2), discs=(1, 2))
    tc = _thick.tensor_trick(c, N)
    r = Report(f"thick seed={seed}")
    r.extend(_thick.check_decomposition(c, N), "")
    r.extend(_thick.check_symmetric(tc.h, N), "h symmetric: ")
    r.extend(_thick.check_pseudo_derivation(tc.h, N), "")
    r.extend(_thick.check_annihilation_conditions(tc, N), "")
    r.extend(_thick.check_module_conditions(tc, N), "")
    r.extend(tc.validate(N), "")
    r.rank = len(c.A)
    return r


def schur_case(seed, N=3, levels=2):
    """Thick tensor trick on Com and As for a random contraction."""
    c = random_general_contraction(seed)
    r = Report(f"schur seed={seed}")
    for name, O in (("Com", _schur.trivial_sequence(N)), ("As", _schur.regular_sequence(N))):
        tc = _schur.thick_tensor_trick(O, c, N, levels=levels)
        r.extend(tc.validate(levels), f"{name}: ")
        r.extend(_thick.check_morphism(tc.f, levels), f"{name} F ")
        r.extend(_thick.check_morphism(tc.g, levels), f"{name} G ")
        r.extend(_thick.check_pseudo_derivation(tc.h, levels), f"{name} H ")
    r.rank = len(c.A)
    return r


def schur_fixed():
    """Seed-independent Schur checks: S[D(1,2)] and the coefficient identity."""
    r = Report("schur fixed")
    r.extend(_schur.disc_decomposition_check(5), "")
    r.extend(_thick.coefficient_identity_check(8), "")
    return r


def filtered_oalgebra_case(seed, kind="commutative", N=4, levels=3):
    """Free O-algebra contraction perturbed by a weight-lowering derivation."""
    otc, t = _opalg.random_filtered_oalgebra_instance(kind, seed, N=N, levels=levels)
    p = _opalg.perturb_oalgebra(otc, t)
    r = Report(f"filtered O-algebra seed={seed}")
    r.extend(p.validate(levels), "")
    r.add("t' is nonzero", not p.pt.t_prime[1].is_zero(), None)
    r.rank = len(otc.tc.A)
    return r


def tensor_trick_case(seed, N=4, levels=2):
    """O-algebra and O-coalgebra tensor tricks through weight N."""
    c = random_general_contraction(seed)
    r = Report(f"tensor tricks seed={seed}")
    akind = ("commutative", "associative")[seed % 2]
    ckind = ("symmetric", "tensor")[seed % 2]
    r.extend(_opalg.oalgebra_tensor_trick(akind, c, N, levels=levels).validate(levels),
             f"{akind} algebra: ")
    r.extend(_opalg.coalgebra_tensor_trick(ckind, c, N, levels=levels).validate(levels),
             f"{ckind} coalgebra: ")
    r.rank = len(c.A)
    return r


def opalg_case(seed):
    r = filtered_oalgebra_case(seed)
    r.extend(tensor_trick_case(seed, N=3), "")
    return r


SUITES = {
    "contraction": contraction_case,
    "thick": thick_case,
    "schur": schur_case,
    "opalg": opalg_case,
}


def run_suite(name, seed=0, cases=10):
    """Runs `cases` instances with seeds seed, seed+1, ...; on failure the
    reported witness is the failing case of least rank (ties: least seed)."""
    fn = SUITES[name]
    out = Report(f"suite {name}")
    failures = []
    for i in range(cases):
        s = seed + i
        rep = fn(s)
        out.add(f"seed {s}", rep.passed,
                None if rep.passed else rep.failures()[0].as_dict())
        if not rep.passed:
            failures.append((getattr(rep, "rank", 0), s, rep))
    if name == "schur" and cases > 0:
        out.extend(schur_fixed(), "fixed: ")
    if failures:
        rank, s, rep = min(failures, key=lambda x: (x[0], x[1]))
        out.add("shrunk witness", False, {"seed": s, "rank": rank,
                                          "check": rep.failures()[0].as_dict()})
    return out
