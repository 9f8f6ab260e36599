import numpy as np
import pytest
from fractions import Fraction

import oracles
from ssforms import gf, lift, linalg, ssgraph


def test_candidate_degree_1():
    assert lift.enumerate_candidates(1) == ((-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1))


def test_candidate_degree_2_contents():
    c2 = lift.enumerate_candidates(2)
    assert (-1, 1, 1) in c2        # t^2 + t - 1: roots (-1 +- sqrt5)/2
    assert (-9, 0, 1) not in c2    # root 3 out of range
    assert (-1, 0, 1) not in c2    # reducible
    assert (-8, 0, 1) in c2        # boundary roots +-2*sqrt(2)
    assert len(c2) == 20


def test_candidate_counts_frozen(candidate_lists):
    assert {d: len(v) for d, v in candidate_lists.items()} == {
        1: 5, 2: 20, 3: 80, 4: 665, 5: 6324, 6: 89702,
    }


def test_candidates_pass_independent_sturm(candidate_lists, rng):
    # independent Fraction-based Sturm count on a random sample of each degree
    for d, cands in candidate_lists.items():
        idx = rng.choice(len(cands), size=min(len(cands), 40), replace=False)
        for i in idx:
            poly = list(cands[int(i)])
            if poly == [-8, 0, 1]:
                continue  # boundary roots handled separately
            assert oracles.fraction_sturm_count_in_bound(poly) == d, poly


def test_candidates_irreducible_sample(candidate_lists, rng):
    import sympy

    t = sympy.symbols("t")
    for d in (2, 3, 4):
        cands = candidate_lists[d]
        idx = rng.choice(len(cands), size=20, replace=False)
        for i in idx:
            poly = sum(c * t**k for k, c in enumerate(cands[int(i)]))
            assert sympy.Poly(poly, t).is_irreducible


def test_detect_factors(rng):
    nu = 999983
    # chi = (t+2)(t^2+t-1)^2 (t - 3): detect the candidates with multiplicity
    chi = np.array([1], dtype=np.int64)
    for coeffs, mult in [((2, 1), 1), ((-1, 1, 1), 2), ((-3, 1), 1)]:
        g = np.array(coeffs, dtype=np.int64) % nu
        for _ in range(mult):
            chi = gf.npoly_mul(chi, g, nu)
    found = dict(lift.detect_factors(chi, nu, 6))
    assert found[(2, 1)] == 1
    assert found[(-1, 1, 1)] == 2
    assert (-3, 1) not in found  # t - 3 is not Weil-admissible
    # empty case
    none = lift.detect_factors(np.array([1, 0, 0, 7, 1], dtype=np.int64) % nu, nu, 6)
    assert all((3, 1) != rho for rho, _ in none)


def test_lift_1dim_p11(rng):
    sset, B = ssgraph.build_adjacency(11, 2, rng)
    al = ssgraph.split_atkin_lehner(B, sset)
    rec = linalg.hecke_charpoly(al.minus, linalg.WiedemannParams(), rng)
    v = lift.lift_1dim(al.minus, -2, rec.mu, rec.nu, rng, lift.LiftSearchConfig())
    assert sorted(np.abs(v).tolist()) == [2, 3]
    assert (al.minus.matvec_exact(v) == -2 * v).all()
    g = int(np.gcd.reduce(np.abs(v)))
    assert g == 1


def test_lift_1dim_p37_both_blocks(rng):
    sset, B = ssgraph.build_adjacency(37, 2, rng)
    al = ssgraph.split_atkin_lehner(B, sset)
    seen = {}
    for name, blk in [("minus", al.minus), ("plus", al.plus)]:
        rec = linalg.hecke_charpoly(blk, linalg.WiedemannParams(), rng)
        chi = rec.chi
        if name == "minus":
            chi, r = gf.npoly_divrem(chi, np.array([(-3) % rec.nu, 1]), rec.nu)
            assert not len(r)
        ((rho, mult),) = lift.detect_factors(chi, rec.nu, 6)
        lam = -rho[0]
        v = lift.lift_1dim(blk, lam, rec.mu, rec.nu, rng, lift.LiftSearchConfig())
        assert (blk.matvec_exact(v) == lam * v).all()
        seen[name] = lam
    assert sorted(seen.values()) == [-2, 0]  # opposite blocks


def test_lift_1dim_unit_entry_returns_first(rng):
    # an eigenvector whose most common entry is already 1 lifts at c = 1
    A = np.diag([5, 5, 7]).astype(np.int64)
    A[0, 1] = 0
    M = linalg.SparseSignedMatrix.from_dense(A)
    nu = 999983
    mu = np.array([35 % nu, (-12) % nu, 1], dtype=np.int64)  # (t-5)(t-7)
    v = lift.lift_1dim(M, 7, mu, nu, rng, lift.LiftSearchConfig())
    assert v.tolist() == [0, 0, 1] or v.tolist() == [0, 0, -1]


def test_lift_highdim_p23(rng):
    sset, B = ssgraph.build_adjacency(23, 2, rng)
    al = ssgraph.split_atkin_lehner(B, sset)
    rec = linalg.hecke_charpoly(al.minus, linalg.WiedemannParams(), rng)
    chi, _ = gf.npoly_divrem(rec.chi, np.array([(-3) % rec.nu, 1]), rec.nu)
    ((rho, mult),) = lift.detect_factors(chi, rec.nu, 6)
    assert rho == (-1, 1, 1) and mult == 1

    def t_ell(ell):
        s2, B2 = ssgraph.build_adjacency(23, ell, rng)
        return ssgraph.split_atkin_lehner(B2, s2).minus

    hl = lift.lift_highdim(al.minus, rho, 1, rec.mu, rec.nu, rng,
                           lift.LiftSearchConfig(), t_ell, 23)
    assert hl.sep_ell == 2  # Krylov span is full at ell = 2: early exit
    orbits = lift.separate_orbits(hl, 23, "minus")
    assert len(orbits) == 1 and orbits[0].dim == 2
    for bv in orbits[0].basis:
        w = np.array(bv, dtype=np.int64)
        t2w = al.minus.matvec_exact(w)
        assert (al.minus.matvec_exact(t2w) + t2w - w == 0).all()
        assert int(np.gcd.reduce(np.abs(w[w != 0]))) == 1


def test_factor_divides_mod_nu_but_not_over_z(rng):
    # companion blocks of (t^2 - t - 1)(t^2 - 2); mod nu = 5 the candidate
    # t + 2 divides chi_nu ((-2)^2 - (-2) - 1 = 5) but has no integer lift,
    # and under nu' = 7 it stops dividing
    A = np.array([[0, 1, 0, 0], [1, 1, 0, 0], [0, 0, 0, 1], [0, 0, 2, 0]],
                 dtype=np.int64)
    M = linalg.SparseSignedMatrix.from_dense(A)
    chi5 = oracles.hessenberg_charpoly_mod(A, 5)
    found5 = dict(lift.detect_factors(chi5, 5, 2))
    assert (2, 1) in found5
    mu5 = chi5  # squarefree here
    with pytest.raises(lift.LiftFailure):
        lift.lift_1dim(M, -2, mu5, 5, rng, lift.LiftSearchConfig(max_1dim_lifts=50))
    chi7 = oracles.hessenberg_charpoly_mod(A, 7)
    found7 = dict(lift.detect_factors(chi7, 7, 2))
    assert (2, 1) not in found7  # excluded under the next modulus


def test_separate_orbits_two_dim1_same_a2():
    # synthetic: two one-dimensional orbits sharing a_2, separated by a_ell
    basis = np.array([[1, 0], [0, 1], [1, 1]], dtype=object)
    hl = lift.HighDimLift(basis=basis, s_matrix=[[2, 0], [0, -1]], sep_ell=3,
                          rho=(-1, 1), multiplicity=2)
    orbits = lift.separate_orbits(hl, 9999991 if False else 101, "minus")
    assert sorted(o.field_poly for o in orbits) == [(-2, 1), (1, 1)]
    for o in orbits:
        assert o.dim == 1 and len(o.basis) == 1


def test_separate_orbits_rejects_repeated_chi_s():
    basis = np.array([[1, 0], [0, 1]], dtype=object)
    hl = lift.HighDimLift(basis=basis, s_matrix=[[2, 0], [0, 2]], sep_ell=3,
                          rho=(-1, 1), multiplicity=2)
    with pytest.raises(ArithmeticError):
        lift.separate_orbits(hl, 101, "minus")


def test_factor_real_rooted():
    # (t^2 - 2)(t - 1) and an irreducible cubic
    poly = [2, -2, -1, 1]  # (t-1)(t^2-2)
    factors = sorted(lift.factor_real_rooted(poly))
    assert factors == [[-2, 0, 1], [-1, 1]]
    irr = [-1, -2, 1, 1]  # t^3+t^2-2t-1: cyclic cubic, irreducible
    assert lift.factor_real_rooted(irr) == [irr]
