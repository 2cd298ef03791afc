import random

import numpy as np
import pytest

from torind.dgalgebra import exterior_algebra, homology_algebra
from torind.dgmod import (
    algebra_as_module,
    expand,
    homology_profile,
    residue_module,
    semifree_free,
)
from torind.errors import (
    CutoffTooSmall,
    DepthNonzero,
    DepthZero,
    NotRegularVariable,
    PerfectInput,
    PowerNotZero,
    PreconditionUnverified,
    ReductionUnavailable,
)
from torind.exactla import DEFAULT_PRIME as P
from torind.ringkit import (
    PresentedModule,
    make_ring,
    quotient_module,
    regular_module,
    residue_field,
    submodule_span,
)
from torind.theorem import (
    annihilation_check,
    base_case_pipeline,
    batch_syzygy_independence,
    regular_element_reduction,
    search_independent_families,
    syzygy_construction,
    verify_dg_theorem,
    verify_module_theorem,
    verify_syzygy_bounds,
    verify_syzygy_independence,
)

from samplers import random_algebra, random_finite_module


@pytest.fixture(scope="module")
def lam():
    return exterior_algebra(P, ("e",))


@pytest.fixture(scope="module")
def k_mod(lam):
    return residue_module(lam)


@pytest.fixture(scope="module")
def r_x2y2():
    return make_ring(P, 2, [(2, 0), (0, 2)], var_names=("x", "y"))


@pytest.fixture(scope="module")
def r_xyz():
    return make_ring(P, 3, [(0, 2, 0), (0, 0, 2)], var_names=("x", "y", "z"))


def cyclic_by_vars(ring, var_indices):
    F = regular_module(ring)
    gens = []
    for a in var_indices:
        v = np.zeros(F.dim, dtype=np.int64)
        u = tuple(1 if b == a else 0 for b in range(ring.num_vars))
        v[ring.mono_index(u)] = 1
        gens.append(v)
    W = submodule_span(F, gens)
    mod, _ = quotient_module(F, W)
    return mod


# --- Construction and its verification -----------------------------------------


def test_syzygy_package_k_r0(lam, k_mod):
    pkg = syzygy_construction(k_mod, 0)
    assert pkg.L.rank == 1 and pkg.L.degrees == (0,)
    assert homology_profile(pkg.Ktilde).dims == {0: 1}
    # Syz = (e), concentrated in degree 1
    assert pkg.syz.dim_at(1) == 1 and pkg.syz.total_dim == 1
    assert pkg.checks["exact_degreewise"]
    assert pkg.checks["image_in_radical"]
    assert pkg.checks["truncation_quasi_iso"]
    assert pkg.checks["les_alternation_zero"]


def test_syzygy_package_semifree_input(lam):
    # K = A: already semifree, pi is injective at the cutoff, Syz = 0
    pkg = syzygy_construction(algebra_as_module(lam), 1)
    assert pkg.syz.total_dim == 0


def test_syzygy_cutoff_too_small(lam):
    with pytest.raises(CutoffTooSmall):
        syzygy_construction(algebra_as_module(lam), 0)


def test_syzygy_bounds_k(lam, k_mod):
    pkg = syzygy_construction(k_mod, 0)
    rep = verify_syzygy_bounds(pkg)
    assert rep["passed"]
    prof = homology_profile(pkg.syz)
    assert prof.inf == 1 and prof.sup == 1 and prof.amp == 0


def test_syzygy_bounds_vacuous(lam):
    pkg = syzygy_construction(algebra_as_module(lam), 1)
    rep = verify_syzygy_bounds(pkg)
    assert rep["passed"] and rep["vacuous"]


def test_syzygy_independence_reduces_to_bounds(lam, k_mod):
    pkg = syzygy_construction(k_mod, 0)
    rep = verify_syzygy_independence(pkg, algebra_as_module(lam), 6)
    assert rep["passed"]


def test_syzygy_independence_free_pair(lam, k_mod):
    pkg = syzygy_construction(k_mod, 0)
    Y = expand(semifree_free(lam, [0, 0]))
    rep = verify_syzygy_independence(pkg, Y, 6)
    assert rep["passed"]


def test_syzygy_independence_precondition(lam, k_mod):
    pkg = syzygy_construction(k_mod, 0)
    with pytest.raises(PreconditionUnverified):
        verify_syzygy_independence(pkg, k_mod, 8)


def test_batch_syzygy_single(lam, k_mod):
    rep = batch_syzygy_independence([k_mod], [0], 6)
    assert rep["passed"]


def test_batch_syzygy_pair_free(lam, k_mod):
    A_mod = algebra_as_module(lam)
    rep = batch_syzygy_independence([k_mod, A_mod], [0, 1], 6)
    assert rep["passed"]


def test_annihilation_lambda_e(lam, k_mod):
    # m_A^2 = 0; j = 1: [e] must annihilate H(Syz_0(k)) = k·e
    rep = annihilation_check([k_mod], [0], 2, 6)
    assert rep["passed"] and rep["power"] == 1


def test_annihilation_j_equals_n(lam):
    # perfect inputs have zero syzygies, so H(tensor) = 0 holds trivially
    A_mod = algebra_as_module(lam)
    rep = annihilation_check([A_mod, A_mod], [1, 1], 2, 6)
    assert rep["passed"] and rep["power"] == 0


def test_annihilation_power_not_zero(lam, k_mod):
    with pytest.raises(PowerNotZero):
        annihilation_check([k_mod], [0], 1, 6)


def test_verify_dg_theorem_k(lam, k_mod):
    rep = verify_dg_theorem([k_mod], 8)
    assert rep.verdict
    assert rep.details["n"] == 1 and rep.details["s"] == 1
    assert rep.details["m_power_nonzero"]
    assert rep.details["truncation_recheck"]["independence_over_truncation"]
    assert rep.witnesses[0]["m_A_power_nonzero"]["factors"] == ["e"]


def test_verify_dg_theorem_rejects_perfect(lam):
    with pytest.raises(PerfectInput):
        verify_dg_theorem([algebra_as_module(lam)], 6)


def test_verify_dg_theorem_rejects_dependent_family(lam, k_mod):
    with pytest.raises(PreconditionUnverified):
        verify_dg_theorem([k_mod, k_mod], 8)


def test_dg_theorem_truncation_recheck_nontrivial():
    # algebra with sup(A) = 2 > sup H(A) = 1, so tau actually truncates
    from torind.dgalgebra import square_zero_algebra
    from torind.dgmod import residue_module as rmod

    A = square_zero_algebra(P, [1, 1, 2], diff={(2, 3): 1})
    # H: degree 0 and one class in degree 1
    rep = verify_dg_theorem([rmod(A)], 6)
    assert rep.verdict


# --- module-level pipeline -------------------------------------------------------


def test_base_case_sharp_pair(r_x2y2):
    mods = [cyclic_by_vars(r_x2y2, [0]), cyclic_by_vars(r_x2y2, [1])]
    rep = base_case_pipeline(r_x2y2, mods, 10)
    assert rep.verdict
    assert rep.details["ecodepth"] == 2
    assert rep.details["n"] == 2
    assert rep.details["equality_chain_amp_ecodepth_ampK"]
    for row in rep.details["subsets"]:
        assert row["ok"]


def test_base_case_k_over_x2():
    ring = make_ring(P, 1, [(2,)], var_names=("x",))
    rep = base_case_pipeline(ring, [residue_field(ring)], 8)
    assert rep.verdict
    row = rep.details["subsets"][0]
    assert row["homology"] == [1, 1]  # amp H(K ⊗ k) = 1 <= 1


def test_base_case_vacuous(r_x2y2):
    rep = base_case_pipeline(r_x2y2, [], 5)
    assert rep.verdict and "vacuous: empty family" in rep.flags


def test_base_case_depth_nonzero(r_xyz):
    with pytest.raises(DepthNonzero):
        base_case_pipeline(r_xyz, [], 5)


def test_base_case_precondition(r_x2y2):
    k = residue_field(r_x2y2)
    with pytest.raises(PreconditionUnverified):
        base_case_pipeline(r_x2y2, [k, k], 6)


def test_reduction_step(r_xyz):
    y = r_xyz.variable(1)
    z = r_xyz.variable(2)
    pres = [PresentedModule(r_xyz, 1, [[y]]), PresentedModule(r_xyz, 1, [[z]])]
    rbar, reduced, rep = regular_element_reduction(r_xyz, pres, 0, 10)
    assert rbar.artinian and rbar.num_vars == 2
    assert rep["depth_drops_by_one"] and rep["ecodepth_preserved"]
    assert rep["independence_passed"]
    assert [M.dim for M in reduced] == [2, 2]


def test_reduction_requires_positive_depth(r_x2y2):
    with pytest.raises(DepthZero):
        regular_element_reduction(r_x2y2, [], 0, 5)


def test_reduction_rejects_nonregular_variable(r_xyz):
    y = r_xyz.variable(1)
    with pytest.raises(NotRegularVariable):
        regular_element_reduction(r_xyz, [PresentedModule(r_xyz, 1, [[y]])], 1, 5)


def test_verify_module_theorem_artinian_pair(r_x2y2):
    mods = [cyclic_by_vars(r_x2y2, [0]), cyclic_by_vars(r_x2y2, [1])]
    rep = verify_module_theorem(r_x2y2, mods, 10)
    assert rep.verdict
    assert rep.details["bound_n_le_ecodepth"]
    assert rep.details["ecodepth"] == 2
    assert not rep.details["reduction_stages"]


def test_verify_module_theorem_one_reduction(r_xyz):
    y = r_xyz.variable(1)
    z = r_xyz.variable(2)
    pres = [PresentedModule(r_xyz, 1, [[y]]), PresentedModule(r_xyz, 1, [[z]])]
    rep = verify_module_theorem(r_xyz, pres, 10)
    assert rep.verdict
    assert len(rep.details["reduction_stages"]) == 1
    assert rep.details["ecodepth"] == 2
    stage = rep.details["reduction_stages"][0]
    assert stage["ecodepth_preserved"] and stage["depth_drops_by_one"]


def test_verify_module_theorem_two_reductions():
    # depth 2: k[x,y,z,w]/(z^2, w^2) with the pair (R/(z), R/(w))
    ring = make_ring(P, 4, [(0, 0, 2, 0), (0, 0, 0, 2)],
                     var_names=("x", "y", "z", "w"))
    z = ring.variable(2)
    w = ring.variable(3)
    pres = [PresentedModule(ring, 1, [[z]]), PresentedModule(ring, 1, [[w]])]
    rep = verify_module_theorem(ring, pres, 8)
    assert rep.verdict
    assert len(rep.details["reduction_stages"]) == 2
    assert rep.details["ecodepth"] == 2


def test_reduction_unavailable():
    # k[x,y]/(xy): depth 1 but no variable avoids the generators
    ring = make_ring(P, 2, [(1, 1)], var_names=("x", "y"))
    k_pres = PresentedModule(ring, 1, [[ring.variable(0)], [ring.variable(1)]])
    with pytest.raises(ReductionUnavailable):
        verify_module_theorem(ring, [k_pres], 5)


def test_verify_module_theorem_permutation_invariant(r_x2y2):
    A = cyclic_by_vars(r_x2y2, [0])
    B = cyclic_by_vars(r_x2y2, [1])
    rep_ab = verify_module_theorem(r_x2y2, [A, B], 8)
    rep_ba = verify_module_theorem(r_x2y2, [B, A], 8)
    assert rep_ab.verdict == rep_ba.verdict
    assert rep_ab.details["ecodepth"] == rep_ba.details["ecodepth"]


def test_verify_module_theorem_flags_dependent(r_x2y2):
    k = residue_field(r_x2y2)
    with pytest.raises(PreconditionUnverified) as e:
        verify_module_theorem(r_x2y2, [k, k], 8)
    assert e.value.witness is not None


# --- search ------------------------------------------------------------------------


def test_search_finds_sharp_pair(r_x2y2):
    rep = search_independent_families(r_x2y2, 4, 2, 6, seed=7, candidates=400)
    assert rep["found"], "expected at least one independent pair"
    assert all(f["radical_power_nonzero"] for f in rep["found"])


def test_search_socle_ring_finds_nothing():
    ring = make_ring(P, 2, [(2, 0), (1, 1), (0, 2)], var_names=("x", "y"))
    rep = search_independent_families(ring, 4, 2, 8, seed=11, candidates=300)
    assert rep["found"] == []
    assert rep["radical_power_bound"]["max_standard_degree"] == 1


def test_search_single_target_vacuous(r_x2y2):
    rep = search_independent_families(r_x2y2, 4, 1, 5, seed=3, candidates=5)
    assert rep["found"]
    assert rep["caveat"]


def test_search_deterministic(r_x2y2):
    a = search_independent_families(r_x2y2, 4, 2, 6, seed=7, candidates=100)
    b = search_independent_families(r_x2y2, 4, 2, 6, seed=7, candidates=100)
    assert a == b


# --- randomized package suites ------------------------------------------------------


def test_random_syzygy_packages_hold_invariants():
    rng = random.Random(20260810)
    checked = 0
    while checked < 12:
        A = random_algebra(rng)
        K = random_finite_module(rng, A, max_cells=3)
        prof = homology_profile(K)
        if prof.is_zero:
            continue
        r = prof.sup + rng.randrange(2)
        pkg = syzygy_construction(K, r)
        assert pkg.checks["exact_degreewise"]
        assert pkg.checks["image_in_radical"]
        assert pkg.checks["truncation_quasi_iso"]
        try:
            s = homology_algebra(A).amp
        except Exception:
            continue
        if prof.amp is not None and prof.amp <= s:
            rep = verify_syzygy_bounds(pkg)
            assert rep["passed"]
        checked += 1
