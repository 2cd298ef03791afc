"""Seeded random generators of valid DG algebras and semifree modules.

Sampling raw structure-constant tables essentially never yields a valid
DG algebra, so algebras are drawn from valid-by-construction families:
exterior algebras on degree-1 generators, square-zero extensions with a
differential vanishing on degree 1, and the four-dimensional {1,e,f,ef}
algebra. Semifree differentials are built degree by degree inside the
cycle space, so d^2 = 0 holds by construction.
"""

import numpy as np

from torind.dgalgebra import (
    exterior_algebra,
    exterior_times_even,
    square_zero_algebra,
)
from torind.dgmod import SemifreeDGModule, expand
from torind.exactla import DEFAULT_PRIME


def random_algebra(rng, p=DEFAULT_PRIME, max_dim=8):
    kind = rng.randrange(4)
    if kind == 0:
        g = rng.choice([1, 2]) if max_dim >= 4 else 1
        names = tuple(f"e{i}" for i in range(g))
        return exterior_algebra(p, names)
    if kind == 1:
        return exterior_times_even(p)
    # square-zero extension with a random differential vanishing on degree 1
    npos = rng.randrange(1, max_dim)
    degrees = sorted(rng.choice([1, 2, 3]) for _ in range(npos))
    diff = {}
    for j, dj in enumerate(degrees, start=1):
        if dj < 2:
            continue
        targets = [i for i, di in enumerate(degrees, start=1) if di == dj - 1]
        if targets and rng.randrange(2):
            diff[(rng.choice(targets), j)] = rng.randrange(1, p)
    try:
        return square_zero_algebra(p, degrees, diff)
    except Exception:
        return square_zero_algebra(p, degrees, {})


def random_semifree(rng, A, max_cells=6, min_degree=0, max_spread=3,
                    force_degree=None):
    """A random semifree module with d^2 = 0 built cell by cell."""
    t = rng.randrange(1, max_cells + 1)
    if force_degree is not None:
        degrees = [force_degree] * t
    else:
        degrees = sorted(
            min_degree + rng.randrange(max_spread + 1) for _ in range(t)
        )
    diff = np.zeros((t, t, A.dim), dtype=np.int64)
    for j in range(t):
        if degrees[j] <= min(degrees):
            continue
        partial = SemifreeDGModule(A, degrees[:j], diff[:j, :j], validate=False)
        FX = expand(partial, validate=False) if j else None
        if FX is None or FX.dim_at(degrees[j] - 1) == 0:
            continue
        cyc = FX.cycles_at(degrees[j] - 1)
        if cyc.dim == 0 or rng.randrange(3) == 0:
            continue
        coeffs = [rng.randrange(A.p) for _ in range(cyc.dim)]
        z = np.zeros(FX.dim_at(degrees[j] - 1), dtype=np.int64)
        for c, idx in zip(coeffs, range(cyc.dim)):
            z = (z + c * cyc.basis.column(idx)) % A.p
        lo, bases = _expansion_index(partial)
        k = degrees[j] - 1 - lo
        if not (0 <= k < len(bases)):
            continue
        for pos, (cell, alg) in enumerate(bases[k]):
            diff[cell, j, alg] = z[pos]
    return SemifreeDGModule(A, degrees, diff, validate=True)


def _expansion_index(L):
    from torind.dgmod import expansion_basis

    return expansion_basis(L)


def random_finite_module(rng, A, max_cells=4):
    """A random finite DG module: the expansion of a random semifree one,
    possibly shifted."""
    L = random_semifree(rng, A, max_cells=max_cells)
    X = expand(L, validate=False)
    q = rng.randrange(-1, 2)
    return X.shift(q) if q else X
