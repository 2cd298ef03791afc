import random

import numpy as np
import pytest

from torind.dgalgebra import exterior_algebra, homology_algebra
from torind.dgmod import (
    FiniteDGModule,
    HomologyModule,
    SemifreeDGModule,
    algebra_as_module,
    check_strong_tor_independence_dg,
    derived_tensor_list,
    derived_tensor_profile,
    expand,
    free_single_degree_check,
    homology_profile,
    minimal_semifree_resolution,
    residue_module,
    semibasis_filtration,
    semifree_free,
    soft_truncate,
    tensor_over_A,
    tensor_semifree,
    truncate_complex,
)
from torind.errors import (
    AlgebraMismatch,
    DegreeMismatch,
    NotSingleDegree,
    ResolutionCancelled,
    TruncationBelowHomology,
    ZeroModule,
)
from torind.exactla import DEFAULT_PRIME as P

from samplers import random_algebra, random_finite_module, random_semifree


@pytest.fixture(scope="module")
def lam():
    return exterior_algebra(P, ("e",))


@pytest.fixture(scope="module")
def k_mod(lam):
    return residue_module(lam)


def gamma_tower(lam, top):
    """Semibasis g_j in degree 2j with d(g_j) = e*g_{j-1}: the minimal
    resolution of k over the exterior algebra on one degree-1 generator."""
    degrees = [2 * j for j in range(top + 1)]
    t = len(degrees)
    diff = np.zeros((t, t, 2), dtype=np.int64)
    for j in range(1, t):
        diff[j - 1, j, 1] = 1
    return SemifreeDGModule(lam, degrees, diff)


def test_expand_algebra(lam):
    X = algebra_as_module(lam)
    assert [X.dim_at(d) for d in (0, 1)] == [1, 1]
    X.validate()


def test_expand_shifted(lam):
    L = semifree_free(lam, [3])
    X = expand(L)
    assert X.dim_at(3) == 1 and X.dim_at(4) == 1 and X.dim_at(2) == 0


def test_expand_two_cell(lam):
    # semibasis in degrees 0 and 2 with d(g1) = e g0: dims (1,1,1,1)
    X = expand(gamma_tower(lam, 1))
    assert [X.dim_at(d) for d in range(4)] == [1, 1, 1, 1]
    X.validate()


def test_degree_mismatch_rejected(lam):
    diff = np.zeros((2, 2, 2), dtype=np.int64)
    diff[0, 1, 1] = 1  # entry of degree 1 where degree 0 is required
    with pytest.raises(DegreeMismatch):
        SemifreeDGModule(lam, [0, 1], diff)


def test_profile_of_algebra(lam):
    prof = homology_profile(algebra_as_module(lam))
    assert prof.dims == {0: 1, 1: 1}
    assert (prof.inf, prof.sup, prof.amp) == (0, 1, 1)


def test_profile_zero_cone(lam):
    from torind.exactla import Matrix

    act = {0: [Matrix.identity(1, P), Matrix.identity(1, P)],
           1: [Matrix.zeros(0, 1, P), Matrix.zeros(0, 1, P)]}
    # d(top) = bottom; e acts as zero in both degrees (targets vanish)
    act[1] = [Matrix.zeros(1, 1, P), Matrix.zeros(0, 1, P)]
    cone = FiniteDGModule(
        lam, 0, (1, 1),
        [Matrix.zeros(0, 1, P), Matrix.identity(1, P)],
        act, validate=False,
    )
    prof = homology_profile(cone)
    assert prof.is_zero
    assert prof.inf is None and prof.sup is None and prof.amp is None


def test_shift_coherence(lam):
    X = expand(gamma_tower(lam, 1))
    for q in (-2, 1, 3):
        assert homology_profile(X.shift(q)) == homology_profile(X).shifted(q)
        X.shift(q).validate()


def test_single_degree_check(lam):
    rep = free_single_degree_check(semifree_free(lam, [2, 2, 2]))
    assert rep["inf_equals_n"] and rep["sup_equals_s_plus_n"] and rep["amp_equals_s"]
    assert rep["rank"] == 3 and rep["degree"] == 2


def test_single_degree_check_rejects_mixed(lam):
    with pytest.raises(NotSingleDegree):
        free_single_degree_check(semifree_free(lam, [0, 1]))


def test_tensor_unit_factor(lam, k_mod):
    L = semifree_free(lam, [0])
    T = tensor_over_A(L, k_mod)
    assert homology_profile(T).dims == {0: 1}
    T.validate()


def test_tensor_single_degree_profile(lam):
    # single-degree L of rank b: profile of Y shifted by n, dims times b
    Y = expand(gamma_tower(lam, 1))
    L = semifree_free(lam, [2, 2])
    T = tensor_over_A(L, Y)
    base = homology_profile(Y)
    got = homology_profile(T)
    assert got.dims == {d + 2: 2 * v for d, v in base.dims.items()}
    T.validate()


def test_tensor_semifree_squares_to_zero(lam):
    F = gamma_tower(lam, 2)
    G = gamma_tower(lam, 2)
    T = tensor_semifree(F, G)
    expand(T).validate()


def test_resolution_of_algebra_is_trivial(lam):
    res = minimal_semifree_resolution(algebra_as_module(lam), 4)
    assert res.complete
    assert res.module.rank == 1
    assert res.cells_by_degree() == {0: 1}


def test_resolution_of_k_divided_powers(lam, k_mod):
    res = minimal_semifree_resolution(k_mod, 6)
    assert res.cells_by_degree() == {0: 1, 2: 1, 4: 1, 6: 1}
    assert not res.complete
    F = res.module
    # d(g_j) = e g_{j-1}
    order = sorted(range(F.rank), key=lambda j: F.degrees[j])
    for a, b in zip(order, order[1:]):
        assert F.diff[a, b, 1] == 1


def test_resolution_ignores_contractible_summand(lam):
    # Y = A ⊕ (contractible cone): minimal resolution is just A
    from torind.exactla import Matrix

    X = algebra_as_module(lam)
    cone_diff = [Matrix.zeros(0, 1, P), Matrix.identity(1, P)]
    act = {0: [Matrix.identity(1, P), Matrix.identity(1, P)],
           1: [Matrix.zeros(1, 1, P), Matrix.zeros(0, 1, P)]}
    act[1] = [Matrix.zeros(1, 1, P), Matrix.zeros(0, 1, P)]
    cone = FiniteDGModule(lam, 0, (1, 1), cone_diff, act, validate=False)
    Y = direct_sum(X, cone)
    res = minimal_semifree_resolution(Y, 3)
    assert res.complete
    assert res.cells_by_degree() == {0: 1}


def direct_sum(X, Y):
    from torind.exactla import Matrix
    import numpy as _np

    A = X.algebra
    lo = min(X.lo, Y.lo)
    hi = max(X.hi, Y.hi)
    dims = [X.dim_at(d) + Y.dim_at(d) for d in range(lo, hi + 1)]

    def block(mx, my):
        out = _np.zeros((mx.rows + my.rows, mx.cols + my.cols), dtype=_np.int64)
        if mx.rows and mx.cols:
            out[: mx.rows, : mx.cols] = mx.a
        if my.rows and my.cols:
            out[mx.rows :, mx.cols :] = my.a
        return Matrix(out, A.p)

    diff = [block(X.diff_at(d), Y.diff_at(d)) for d in range(lo, hi + 1)]
    act = {}
    for g in range(A.dim):
        act[g] = [block(X.act_at(g, d), Y.act_at(g, d)) for d in range(lo, hi + 1)]
    return FiniteDGModule(A, lo, dims, diff, act, validate=True)


def test_resolution_zero_module_raises(lam):
    from torind.exactla import Matrix

    act = {0: [Matrix.identity(1, P), Matrix.identity(1, P)],
           1: [Matrix.zeros(1, 1, P), Matrix.zeros(0, 1, P)]}
    cone = FiniteDGModule(
        lam, 0, (1, 1),
        [Matrix.zeros(0, 1, P), Matrix.identity(1, P)],
        act, validate=False,
    )
    with pytest.raises(ZeroModule):
        minimal_semifree_resolution(cone, 3)


def test_resolution_progress_cancel(lam, k_mod):
    with pytest.raises(ResolutionCancelled):
        minimal_semifree_resolution(k_mod, 6, progress=lambda d: d < 2)


def test_resolution_is_chain_map_and_minimal(lam, k_mod):
    res = minimal_semifree_resolution(k_mod, 5)
    A = lam
    for j in range(res.module.rank):
        for i in range(res.module.rank):
            entry = res.module.diff[i, j]
            assert entry[A.unit] == 0


def test_soft_truncate_identity(lam):
    X = expand(gamma_tower(lam, 1))
    assert soft_truncate(X, X.hi) is X


def test_truncate_resolution_of_k(lam, k_mod):
    # tau_{<=0} of the (full) resolution of k is k itself; the partial
    # resolution carries a spurious top class, so the public soft_truncate
    # refuses it and the unchecked truncation recovers K-tilde = k
    res = minimal_semifree_resolution(k_mod, 4)
    X = expand(res.module)
    with pytest.raises(TruncationBelowHomology):
        soft_truncate(X, 0)
    K = truncate_complex(X, 0)
    assert homology_profile(K).dims == {0: 1}


def test_soft_truncate_below_homology(lam):
    X = expand(semifree_free(lam, [0]))
    with pytest.raises(TruncationBelowHomology):
        soft_truncate(X, 0)


def test_semibasis_filtration(lam, k_mod):
    res = minimal_semifree_resolution(k_mod, 6)
    F = res.module
    assert semibasis_filtration(F, 6).rank == F.rank
    assert semibasis_filtration(F, -1).rank == 0
    F0 = semibasis_filtration(F, 0)
    assert F0.rank == 1 and F0.degrees == (0,)


def test_derived_tensor_unit(lam, k_mod):
    prof = derived_tensor_profile(expand(semifree_free(lam, [0])), k_mod, 6)
    assert prof.dims == {0: 1}
    assert prof.certified_to is None


def test_derived_tensor_kk(lam, k_mod):
    # frozen from the divided-power resolution: one class per semibasis
    # element, in even degrees 0, 2, 4 within the certified window
    prof = derived_tensor_profile(k_mod, k_mod, 6)
    assert prof.certified_to == 5
    assert prof.dims == {0: 1, 2: 1, 4: 1}


def test_derived_tensor_semifree_factor_exact(lam, k_mod):
    L = gamma_tower(lam, 2)
    Z, cert = derived_tensor_list([L, k_mod], 6)
    assert cert is None  # already semifree: no cutoff loss


def test_derived_tensor_symmetry(lam, k_mod):
    X = expand(gamma_tower(lam, 1))
    a = derived_tensor_profile(X, k_mod, 6)
    b = derived_tensor_profile(k_mod, X, 6)
    assert {d: v for d, v in a.dims.items() if d <= 5} == {
        d: v for d, v in b.dims.items() if d <= 5
    }


def test_dg_independence_algebra_passes(lam):
    rep = check_strong_tor_independence_dg([expand(semifree_free(lam, [0]))], 6)
    assert rep.passed and rep.s == 1


def test_dg_independence_k_single(lam, k_mod):
    rep = check_strong_tor_independence_dg([k_mod], 8)
    assert rep.passed  # amp H(k) = 0 <= 1 = s


def test_dg_independence_kk_fails(lam, k_mod):
    rep = check_strong_tor_independence_dg([k_mod, k_mod], 8)
    assert not rep.passed
    assert rep.witness == (0, 1)
    # H(k ⊗^L k) has classes in even degrees through the certified window,
    # so the observed amplitude already exceeds s = 1
    sub = [row for row in rep.subsets if row[0] == (0, 1)][0]
    assert sub[2] >= 6


def test_dg_independence_reorder_invariant(lam, k_mod):
    X = expand(gamma_tower(lam, 1))
    a = check_strong_tor_independence_dg([k_mod, X], 6)
    b = check_strong_tor_independence_dg([X, k_mod], 6)
    assert a.passed == b.passed


def test_homology_module_action(lam, k_mod):
    HA = homology_algebra(lam)
    res = minimal_semifree_resolution(k_mod, 4)
    X = expand(res.module)
    HM = HomologyModule(X, HA)
    assert 0 in HM.dims
    # e * [cycle in degree 0] lands in the class of e*g0, a boundary target
    # of g1, except at the top where it survives; the key contract is that
    # class arithmetic is consistent
    for d in list(HM.dims):
        for z in HM.reps(d):
            HM.act_class(HA.reps[0], 0, d, z)  # unit action defined


def test_homology_module_annihilation(lam, k_mod):
    HA = homology_algebra(lam)
    # Syz-like module: k concentrated in degree 1 = shift of k
    X = k_mod.shift(1)
    HM = HomologyModule(X, HA)
    assert HM.annihilated_by_power(1)  # e * k = 0
    assert not HM.annihilated_by_power(0)  # m^0 contains the unit


def test_algebra_mismatch(lam, k_mod):
    other = exterior_algebra(P, ("f",))
    with pytest.raises(AlgebraMismatch):
        tensor_over_A(semifree_free(other, [0]), k_mod)


# --- randomized invariant suites (seeded, deterministic) ---------------------


def test_random_expansions_satisfy_axioms():
    rng = random.Random(20260810)
    for _ in range(25):
        A = random_algebra(rng)
        L = random_semifree(rng, A, max_cells=4)
        expand(L).validate()


def test_random_truncations_preserve_homology():
    rng = random.Random(97)
    for _ in range(15):
        A = random_algebra(rng)
        X = random_finite_module(rng, A)
        hd = X.homology_dims()
        if not hd:
            continue
        r = max(hd)
        T = soft_truncate(X, r)
        assert T.homology_dims() == hd
