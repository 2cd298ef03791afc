import numpy as np
import pytest

from torind.dgalgebra import (
    DGAlgebra,
    augmentation_power,
    exterior_algebra,
    exterior_times_even,
    homology_algebra,
    homology_dims,
    soft_truncate_algebra,
    square_zero_algebra,
    validate_dg_algebra,
)
from torind.errors import (
    AxiomViolation,
    HomologyZero,
    NotLocal,
    TruncationBelowHomology,
)
from torind.exactla import DEFAULT_PRIME as P


@pytest.fixture(scope="module")
def lam_e():
    return exterior_algebra(P, ("e",))


def test_exterior_is_valid(lam_e):
    assert lam_e.dim == 2
    assert lam_e.degrees == (0, 1)


def test_rejects_noncommutative():
    # b1*b2 = b3 but b2*b1 = 0 in odd degrees breaks graded commutativity
    mult = {(0, j, j): 1 for j in range(4)}
    mult.update({(j, 0, j): 1 for j in range(1, 4)})
    mult[(1, 2, 3)] = 1
    with pytest.raises(AxiomViolation) as e:
        validate_dg_algebra(P, ["1", "a", "b", "c"], [0, 1, 1, 2], 0, mult, {})
    assert e.value.axiom == "graded-commutativity"


def test_rejects_bad_differential():
    # d(b) = a, d(a) = 1 gives d^2(b) = 1 != 0
    mult = {(0, j, j): 1 for j in range(3)}
    mult.update({(j, 0, j): 1 for j in range(1, 3)})
    with pytest.raises(AxiomViolation) as e:
        validate_dg_algebra(
            P, ["1", "a", "b"], [0, 1, 2], 0, mult, {(0, 1): 1, (1, 2): 1}
        )
    assert e.value.axiom in ("differential", "leibniz")


def test_rejects_nonlocal():
    mult = {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 1): 0}
    with pytest.raises(NotLocal):
        validate_dg_algebra(P, ["1", "u"], [0, 0], 0, mult, {})


def test_augmentation_powers(lam_e):
    assert augmentation_power(lam_e, 0).dim == 2
    m1 = augmentation_power(lam_e, 1)
    assert m1.dim == 1 and m1.contains([0, 1])
    assert augmentation_power(lam_e, 2).dim == 0


def test_augmentation_monotone(lam_e):
    prev = augmentation_power(lam_e, 0)
    for n in range(1, 4):
        cur = augmentation_power(lam_e, n)
        assert prev.contains_subspace(cur)
        prev = cur


def test_top_degree_kills_powers():
    A = exterior_algebra(P, ("e", "f"))
    assert augmentation_power(A, A.top + 1).dim == 0


def test_homology_of_exterior(lam_e):
    H = homology_algebra(lam_e)
    assert H.dims == {0: 1, 1: 1}
    assert (H.inf, H.sup, H.amp) == (0, 1, 1)


def test_homology_of_ef_algebra():
    H = homology_algebra(exterior_times_even())
    assert H.dims == {0: 1, 1: 1, 2: 1, 3: 1}
    assert H.s == 3


def test_homology_zero_raises():
    # contractible positive cone: d(b) = a, degrees 1 and 2, H_1 = H_2 = 0,
    # but H_0 = k survives, so extend with d(a') = 1? Leibniz forbids a
    # differential into degree 0 target from degree-1 source only when the
    # source squares; use a two-cell cancelling pair in degrees 1, 2 with an
    # extra degree-1 cycle killed by nothing -- instead take the standard
    # acyclic example d(e) = 1 on the exterior algebra.
    mult = {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1}
    A = validate_dg_algebra(P, ["1", "e"], [0, 1], 0, mult, {(0, 1): 1})
    with pytest.raises(HomologyZero):
        homology_algebra(A)


def test_homology_dim_count(lam_e):
    hd = homology_dims(lam_e)
    total = sum(hd.values())
    assert total == 2


def test_soft_truncate_identity(lam_e):
    assert soft_truncate_algebra(lam_e, 1) is lam_e


def test_soft_truncate_drops_top():
    # degrees 1 and 2 with d(v2) = v1: homology is k only; truncate at 0
    A = square_zero_algebra(P, [1, 2], diff={(1, 2): 1})
    assert homology_dims(A) == {0: 1}
    A0 = soft_truncate_algebra(A, 0)
    assert A0.dim == 1
    assert homology_dims(A0) == {0: 1}


def test_soft_truncate_preserves_dims_mid():
    A = square_zero_algebra(P, [1, 2, 3, 4], diff={(3, 4): 1})
    # H: degree 0, 1, 2 survive; degree 3/4 cancel
    assert homology_dims(A) == {0: 1, 1: 1, 2: 1}
    A2 = soft_truncate_algebra(A, 2)
    assert A2.top == 2
    assert homology_dims(A2) == homology_dims(A)


def test_soft_truncate_below_homology_raises(lam_e):
    with pytest.raises(TruncationBelowHomology):
        soft_truncate_algebra(lam_e, 0)


def test_homology_products():
    A = exterior_times_even()
    H = homology_algebra(A)
    # [e]*[f] = [ef] in H
    i_e = H.rep_degrees.index(1)
    i_f = H.rep_degrees.index(2)
    u = np.zeros(4, dtype=np.int64)
    u[i_e] = 1
    v = np.zeros(4, dtype=np.int64)
    v[i_f] = 1
    w = H.multiply_classes(u, v)
    assert w[H.rep_degrees.index(3)] == 1


def test_max_ideal_powers():
    H = homology_algebra(exterior_times_even())
    assert H.max_ideal_power(0).dim == 4
    assert H.max_ideal_power(1).dim == 3
    assert H.max_ideal_power(2).dim == 1  # spanned by [ef]
    assert H.max_ideal_power(3).dim == 0


def test_soft_truncate_preserves_h_products():
    # {1,e,f,ef} in degrees 0..3 plus a contractible pair in degrees 4,5
    labels = ["1", "e", "f", "ef", "c4", "c5"]
    degrees = [0, 1, 2, 3, 4, 5]
    mult = {}
    for j in range(6):
        mult[(0, j, j)] = 1
        if j:
            mult[(j, 0, j)] = 1
    mult[(1, 2, 3)] = 1
    mult[(2, 1, 3)] = 1
    A = validate_dg_algebra(P, labels, degrees, 0, mult, {(4, 5): 1})
    assert homology_dims(A) == {0: 1, 1: 1, 2: 1, 3: 1}
    A3 = soft_truncate_algebra(A, 3)
    assert A3.top == 3
    HA, HA3 = homology_algebra(A), homology_algebra(A3)
    # the degree-<=3 representatives coincide, so tables must agree
    assert HA.rep_degrees == HA3.rep_degrees
    assert np.array_equal(HA.mult, HA3.mult)


def test_char2_still_enforces_odd_square_zero():
    A = exterior_algebra(2, ("e",))
    assert isinstance(A, DGAlgebra)
    mult = {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 2): 1}
    mult.update({(0, 2, 2): 1, (2, 0, 2): 1})
    with pytest.raises(AxiomViolation) as e:
        validate_dg_algebra(2, ["1", "e", "e2"], [0, 1, 2], 0, mult, {})
    assert e.value.axiom == "odd-square-zero"
