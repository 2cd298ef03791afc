"""Semifree and finite DG modules over a validated DGAlgebra.

Sign conventions (pinned once, used everywhere):

* Leibniz for the module differential: d(a x) = d(a) x + (-1)^{|a|} a d(x).
* Koszul rule for tensors: d(x ⊗ y) = d(x) ⊗ y + (-1)^{|x|} x ⊗ d(y).
* Moving a coefficient a past a semibasis element e costs (-1)^{|a||e|},
  i.e. (a e) ⊗ y = (-1)^{|a||e|} e ⊗ (a y).
* Shifts: (Σ^n X)_i = X_{i-n} with differential scaled by (-1)^n, and
  a·(Σx) = (-1)^{|a| n} Σ(a x).

A semifree module is a finite semibasis with degrees plus a matrix of
algebra coefficients; `expand` turns it into an explicit complex with an
action table (a FiniteDGModule), which is where all homology happens.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dgalgebra import DGAlgebra, HomologyAlgebra, homology_dims
from .errors import (
    AlgebraMismatch,
    DegreeMismatch,
    NotSingleDegree,
    ResolutionCancelled,
    TorindError,
    TruncationBelowHomology,
    ZeroModule,
)
from .exactla import Matrix, Subspace, quotient_basis


class HomologyProfile:
    """Per-degree homology dimensions with sup/inf/amp conventions.

    The zero profile reports inf/sup/amp as None, never as sentinel
    integers. `certified_to` is None for exact profiles; otherwise dims
    are only guaranteed for degrees <= certified_to.
    """

    __slots__ = ("dims", "certified_to")

    def __init__(self, dims, certified_to=None):
        self.dims = {int(d): int(v) for d, v in sorted(dims.items()) if v}
        self.certified_to = certified_to

    @property
    def is_zero(self) -> bool:
        return not self.dims

    @property
    def inf(self):
        return min(self.dims) if self.dims else None

    @property
    def sup(self):
        return max(self.dims) if self.dims else None

    @property
    def amp(self):
        return self.sup - self.inf if self.dims else None

    def shifted(self, q) -> "HomologyProfile":
        return HomologyProfile(
            {d + q: v for d, v in self.dims.items()},
            None if self.certified_to is None else self.certified_to + q,
        )

    def __eq__(self, other):
        return isinstance(other, HomologyProfile) and self.dims == other.dims

    def __repr__(self):
        if self.is_zero:
            body = "zero"
        else:
            body = f"dims={self.dims}, inf={self.inf}, sup={self.sup}, amp={self.amp}"
        if self.certified_to is not None:
            body += f", certified_to={self.certified_to}"
        return f"HomologyProfile({body})"

    def to_dict(self):
        return {
            "zero": self.is_zero,
            "dims": {str(d): v for d, v in self.dims.items()},
            "inf": self.inf,
            "sup": self.sup,
            "amp": self.amp,
            "certified_to": self.certified_to,
        }


class FiniteDGModule:
    """An explicit bounded complex of F_p-spaces with a DG A-action.

    dims[k] is the dimension in degree lo + k; diff[k] maps degree
    lo + k -> lo + k - 1; act[i][k] is the action of algebra basis
    element i on degree lo + k.
    """

    __slots__ = ("algebra", "lo", "dims", "_diff", "_act")

    def __init__(self, algebra, lo, dims, diff, act, validate=True):
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        self.lo = int(lo)
        self._diff = diff
        self._act = act
        if validate:
            self.validate()

    # --- degree bookkeeping ---------------------------------------------

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    def degree_range(self):
        return range(self.lo, self.lo + len(self.dims))

    def dim_at(self, d) -> int:
        k = d - self.lo
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def diff_at(self, d) -> Matrix:
        k = d - self.lo
        if 0 <= k < len(self.dims):
            return self._diff[k]
        return Matrix.zeros(self.dim_at(d - 1), self.dim_at(d), self.algebra.p)

    def act_at(self, i, d) -> Matrix:
        k = d - self.lo
        if 0 <= k < len(self.dims):
            return self._act[i][k]
        g = self.algebra.degrees[i]
        return Matrix.zeros(self.dim_at(d + g), self.dim_at(d), self.algebra.p)

    def act_vector(self, coeffs, d) -> Matrix:
        """Action of an arbitrary homogeneous algebra element on degree d."""
        coeffs = np.asarray(coeffs, dtype=np.int64) % self.algebra.p
        g = self.algebra.element_degree(coeffs)
        if g is None:
            raise TorindError("zero coefficient vector has no action matrix")
        out = Matrix.zeros(self.dim_at(d + g), self.dim_at(d), self.algebra.p)
        for i in np.nonzero(coeffs)[0]:
            out = out + self.act_at(int(i), d).scale(int(coeffs[i]))
        return out

    # --- axioms -----------------------------------------------------------

    def validate(self):
        A = self.algebra
        p = A.p
        for d in self.degree_range():
            dd = self.diff_at(d - 1) @ self.diff_at(d)
            if not dd.is_zero():
                raise TorindError(f"d^2 != 0 at degree {d}")
        for d in self.degree_range():
            n = self.dim_at(d)
            if n and self.act_at(A.unit, d) != Matrix.identity(n, p):
                raise TorindError(f"unit does not act as identity at degree {d}")
        for g in range(A.dim):
            for h in range(A.dim):
                for d in self.degree_range():
                    if self.dim_at(d) == 0:
                        continue
                    lhs = self.act_at(g, d + A.degrees[h]) @ self.act_at(h, d)
                    rows = self.dim_at(d + A.degrees[g] + A.degrees[h])
                    rhs = Matrix.zeros(rows, self.dim_at(d), p)
                    for k in np.nonzero(A.mult[g, h])[0]:
                        rhs = rhs + self.act_at(int(k), d).scale(int(A.mult[g, h, k]))
                    if lhs != rhs:
                        raise TorindError(
                            f"action not associative for basis pair ({g}, {h})"
                        )
        for g in range(A.dim):
            gd = A.degrees[g]
            sign = (-1) ** gd
            for d in self.degree_range():
                if self.dim_at(d) == 0:
                    continue
                lhs = self.diff_at(d + gd) @ self.act_at(g, d)
                rhs = self.act_at(g, d - 1) @ self.diff_at(d)
                rhs = rhs.scale(sign)
                for l in np.nonzero(A.diff.a[:, g])[0]:
                    rhs = rhs + self.act_at(int(l), d).scale(int(A.diff.a[l, g]))
                if lhs != rhs:
                    raise TorindError(f"Leibniz fails for basis element {g}")

    # --- homology ---------------------------------------------------------

    def cycles_at(self, d) -> Subspace:
        n = self.dim_at(d)
        if n == 0:
            return Subspace.zero(0, self.algebra.p)
        if self.dim_at(d - 1) == 0:
            return Subspace.full(n, self.algebra.p)
        return self.diff_at(d).kernel_basis()

    def boundaries_at(self, d) -> Subspace:
        if self.dim_at(d) == 0 or self.dim_at(d + 1) == 0:
            return Subspace.zero(self.dim_at(d), self.algebra.p)
        return self.diff_at(d + 1).column_space()

    def homology_dims(self):
        out = {}
        for d in self.degree_range():
            h = self.cycles_at(d).dim - self.boundaries_at(d).dim
            if h:
                out[d] = h
        return out

    def shift(self, q) -> "FiniteDGModule":
        p = self.algebra.p
        sign = (-1) ** q
        diff = [m.scale(sign) for m in self._diff]
        act = {}
        for i, mats in self._act.items():
            asign = (-1) ** (self.algebra.degrees[i] * q)
            act[i] = [m.scale(asign) for m in mats]
        return FiniteDGModule(
            self.algebra, self.lo + q, self.dims, diff, act, validate=False
        )

    def __repr__(self):
        return (
            f"FiniteDGModule(degrees [{self.lo}, {self.hi}], dims={list(self.dims)})"
        )


def finite_zero_module(A: DGAlgebra) -> FiniteDGModule:
    return FiniteDGModule(A, 0, (), [], {i: [] for i in range(A.dim)}, validate=False)


class SemifreeDGModule:
    """A finite semibasis with degrees plus a differential matrix over A.

    diff[i, j] is the A-coefficient vector of the (i, j) entry m_ij, with
    d(e_j) = sum_i m_ij e_i and |m_ij| = deg(e_j) - deg(e_i) - 1; entries
    whose required degree is negative must vanish.
    """

    __slots__ = ("algebra", "degrees", "labels", "diff")

    def __init__(self, algebra, degrees, diff=None, labels=None, validate=True):
        self.algebra = algebra
        self.degrees = tuple(int(d) for d in degrees)
        t = len(self.degrees)
        if labels is None:
            labels = tuple(f"g{j}" for j in range(t))
        self.labels = tuple(labels)
        if diff is None:
            diff = np.zeros((t, t, algebra.dim), dtype=np.int64)
        self.diff = np.mod(np.asarray(diff, dtype=np.int64), algebra.p)
        if self.diff.shape != (t, t, algebra.dim):
            raise TorindError(
                f"diff tensor has shape {self.diff.shape}, expected"
                f" {(t, t, algebra.dim)}"
            )
        if validate:
            self._validate()

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def _validate(self):
        A = self.algebra
        for j in range(self.rank):
            for i in range(self.rank):
                entry = self.diff[i, j]
                if not entry.any():
                    continue
                need = self.degrees[j] - self.degrees[i] - 1
                got = A.element_degree(entry)
                if need < 0 or got != need:
                    raise DegreeMismatch(
                        f"entry ({i}, {j}) has degree {got}, needs {need}"
                    )
        sq = expand(self, validate=False)
        for d in sq.degree_range():
            if not (sq.diff_at(d - 1) @ sq.diff_at(d)).is_zero():
                raise TorindError("semifree differential does not square to zero")

    def single_degree(self):
        degs = set(self.degrees)
        return degs.pop() if len(degs) == 1 else None

    def entry(self, i, j) -> np.ndarray:
        return self.diff[i, j]

    def __repr__(self):
        return (
            f"SemifreeDGModule(rank={self.rank}, degrees={list(self.degrees)},"
            f" over dim-{self.algebra.dim} algebra)"
        )


def semifree_free(A: DGAlgebra, degrees, labels=None) -> SemifreeDGModule:
    """Σ^{d_1} A ⊕ ... ⊕ Σ^{d_t} A: zero differential on the semibasis."""
    return SemifreeDGModule(A, degrees, None, labels, validate=False)


def shift_semifree(L: SemifreeDGModule, q: int) -> SemifreeDGModule:
    sign = (-1) ** q
    return SemifreeDGModule(
        L.algebra,
        [d + q for d in L.degrees],
        np.mod(L.diff * sign, L.algebra.p),
        L.labels,
        validate=False,
    )


def expansion_basis(L: SemifreeDGModule):
    """Per-degree basis of the expansion as (cell, algebra-index) pairs,
    cells ordered first."""
    A = L.algebra
    if L.rank == 0:
        return 0, []
    lo = min(L.degrees)
    hi = max(L.degrees) + A.top
    bases = []
    for d in range(lo, hi + 1):
        basis = []
        for j in range(L.rank):
            for i in range(A.dim):
                if L.degrees[j] + A.degrees[i] == d:
                    basis.append((j, i))
        bases.append(basis)
    return lo, bases


def expand(L: SemifreeDGModule, validate=True) -> FiniteDGModule:
    """The underlying complex of L with basis {b_i e_j} and the Leibniz
    differential d(b_i e_j) = d(b_i) e_j + (-1)^{|b_i|} b_i d(e_j)."""
    A = L.algebra
    p = A.p
    if L.rank == 0:
        return finite_zero_module(A)
    lo, bases = expansion_basis(L)
    index = [{pair: t for t, pair in enumerate(basis)} for basis in bases]
    dims = [len(b) for b in bases]

    diff = []
    for k, basis in enumerate(bases):
        rows = dims[k - 1] if k else 0
        mat = np.zeros((rows, dims[k]), dtype=np.int64)
        if k:
            below = index[k - 1]
            for col, (j, i) in enumerate(basis):
                for l in np.nonzero(A.diff.a[:, i])[0]:
                    mat[below[(j, int(l))], col] += int(A.diff.a[l, i])
                sign = (-1) ** A.degrees[i]
                for l in range(L.rank):
                    entry = L.diff[l, j]
                    if not entry.any():
                        continue
                    prod = A.multiply(A.basis_vector(i), entry)
                    for q in np.nonzero(prod)[0]:
                        mat[below[(l, int(q))], col] += sign * int(prod[q])
        diff.append(Matrix(mat, p))

    act = {}
    for g in range(A.dim):
        gd = A.degrees[g]
        mats = []
        for k, basis in enumerate(bases):
            tk = k + gd
            rows = dims[tk] if 0 <= tk < len(dims) else 0
            mat = np.zeros((rows, dims[k]), dtype=np.int64)
            if rows:
                target = index[tk]
                for col, (j, i) in enumerate(basis):
                    for q in np.nonzero(A.mult[g, i])[0]:
                        mat[target[(j, int(q))], col] += int(A.mult[g, i, q])
            mats.append(Matrix(mat, p))
        act[g] = mats
    return FiniteDGModule(A, lo, dims, diff, act, validate=validate)


def algebra_as_module(A: DGAlgebra) -> FiniteDGModule:
    """A as a DG module over itself."""
    return expand(semifree_free(A, [0]), validate=False)


def residue_module(A: DGAlgebra) -> FiniteDGModule:
    """k = A/A_+ concentrated in degree 0."""
    p = A.p
    act = {}
    for i in range(A.dim):
        if A.degrees[i] == 0:
            act[i] = [Matrix.identity(1, p)]
        else:
            act[i] = [Matrix.zeros(0, 1, p)]
    return FiniteDGModule(A, 0, (1,), [Matrix.zeros(0, 1, p)], act, validate=False)


def homology_profile(X) -> HomologyProfile:
    """Exact per-degree homology of a finite or semifree DG module."""
    if isinstance(X, SemifreeDGModule):
        X = expand(X, validate=False)
    return HomologyProfile(X.homology_dims())


def algebra_amp(A: DGAlgebra) -> int:
    """s = amp(H(A)); raises if H(A) = 0."""
    hd = homology_dims(A)
    if not hd:
        from .errors import HomologyZero

        raise HomologyZero("H(A) = 0")
    return max(hd) - min(hd)


def free_single_degree_check(L: SemifreeDGModule) -> dict:
    """Verify L ≅ Σ^n A^(B) for a single-degree semibasis and report the
    three displayed profile equalities inf = n, sup = s + n, amp = s."""
    n = L.single_degree()
    if n is None:
        raise NotSingleDegree(f"semibasis degrees {sorted(set(L.degrees))}")
    if L.rank == 0:
        raise ZeroModule("empty semibasis")
    if L.diff.any():
        raise TorindError("single-degree semifree module has nonzero differential")
    s = algebra_amp(L.algebra)
    prof = homology_profile(L)
    report = {
        "degree": n,
        "rank": L.rank,
        "isomorphic_to": f"shift({n}) of free module of rank {L.rank}",
        "diff_is_zero": True,
        "inf_equals_n": prof.inf == n,
        "sup_equals_s_plus_n": prof.sup == s + n,
        "amp_equals_s": prof.amp == s,
        "profile": prof.to_dict(),
    }
    if not (report["inf_equals_n"] and report["sup_equals_s_plus_n"]):
        raise TorindError("single-degree profile equalities failed (internal)")
    return report


# --- tensor products ----------------------------------------------------------


def tensor_over_A(L: SemifreeDGModule, Y: FiniteDGModule) -> FiniteDGModule:
    """L ⊗_A Y for semifree L: ⊕_j Σ^{d_j} Y with the twist differential.

    Since L is semifree this computes the derived tensor product.
    """
    A = L.algebra
    if Y.algebra != A:
        raise AlgebraMismatch("factors live over different algebras")
    p = A.p
    if L.rank == 0 or Y.total_dim == 0:
        return finite_zero_module(A)
    lo = min(L.degrees) + Y.lo
    hi = max(L.degrees) + Y.hi
    bases = []
    for d in range(lo, hi + 1):
        basis = []
        for j in range(L.rank):
            yd = d - L.degrees[j]
            for b in range(Y.dim_at(yd)):
                basis.append((j, yd, b))
        bases.append(basis)
    index = [{key: t for t, key in enumerate(basis)} for basis in bases]
    dims = [len(b) for b in bases]

    diff = []
    for k in range(len(bases)):
        rows = dims[k - 1] if k else 0
        mat = np.zeros((rows, dims[k]), dtype=np.int64)
        if k:
            below = index[k - 1]
            for col, (j, yd, b) in enumerate(bases[k]):
                dj = L.degrees[j]
                # (-1)^{d_j} e_j ⊗ dy
                dy = Y.diff_at(yd)
                if dy.rows:
                    sign = (-1) ** dj
                    for rb in np.nonzero(dy.a[:, b])[0]:
                        mat[below[(j, yd - 1, int(rb))], col] += sign * int(
                            dy.a[rb, b]
                        )
                # sum_i (-1)^{|m_ij| deg e_i} e_i ⊗ (m_ij y)
                for i in range(L.rank):
                    entry = L.diff[i, j]
                    if not entry.any():
                        continue
                    mdeg = A.element_degree(entry)
                    sign = (-1) ** (mdeg * L.degrees[i])
                    action = Y.act_vector(entry, yd)
                    if not action.rows:
                        continue
                    tyd = yd + mdeg
                    for rb in np.nonzero(action.a[:, b])[0]:
                        mat[below[(i, tyd, int(rb))], col] += sign * int(
                            action.a[rb, b]
                        )
        diff.append(Matrix(mat, p))

    act = {}
    for g in range(A.dim):
        gd = A.degrees[g]
        mats = []
        for k in range(len(bases)):
            tk = k + gd
            rows = dims[tk] if 0 <= tk < len(dims) else 0
            mat = np.zeros((rows, dims[k]), dtype=np.int64)
            if rows:
                target = index[tk]
                for col, (j, yd, b) in enumerate(bases[k]):
                    sign = (-1) ** (gd * L.degrees[j])
                    ay = Y.act_at(g, yd)
                    for rb in np.nonzero(ay.a[:, b])[0]:
                        mat[target[(j, yd + gd, int(rb))], col] += sign * int(
                            ay.a[rb, b]
                        )
            mats.append(Matrix(mat, p))
        act[g] = mats
    return FiniteDGModule(A, lo, dims, diff, act, validate=False)


def tensor_semifree(F: SemifreeDGModule, G: SemifreeDGModule) -> SemifreeDGModule:
    """F ⊗_A G as a semifree module on semibasis pairs (e_j, f_l)."""
    A = F.algebra
    if G.algebra != A:
        raise AlgebraMismatch("factors live over different algebras")
    p = A.p
    pairs = [(j, l) for j in range(F.rank) for l in range(G.rank)]
    index = {pair: t for t, pair in enumerate(pairs)}
    degrees = [F.degrees[j] + G.degrees[l] for j, l in pairs]
    labels = [f"{F.labels[j]}*{G.labels[l]}" for j, l in pairs]
    t = len(pairs)
    diff = np.zeros((t, t, A.dim), dtype=np.int64)
    for col, (j, l) in enumerate(pairs):
        dj = F.degrees[j]
        for i in range(F.rank):
            entry = F.diff[i, j]
            if entry.any():
                diff[index[(i, l)], col] = (
                    diff[index[(i, l)], col] + entry
                ) % p
        for k in range(G.rank):
            entry = G.diff[k, l]
            if entry.any():
                ndeg = G.degrees[l] - G.degrees[k] - 1
                sign = (-1) ** (dj * (1 + ndeg))
                diff[index[(j, k)], col] = (
                    diff[index[(j, k)], col] + sign * entry
                ) % p
    return SemifreeDGModule(A, degrees, diff, labels, validate=False)


# --- minimal semifree resolutions ---------------------------------------------


@dataclass
class SemifreeResolution:
    """A minimal partial semifree resolution F -> Y.

    Semibasis degrees run up to `cutoff`; H_i(phi) is an isomorphism for
    i < cutoff and surjective at the cutoff; `complete` means phi is a
    full quasi-isomorphism, certifying Y perfect.
    """

    module: SemifreeDGModule
    target: FiniteDGModule
    phi: list  # per cell: vector in Y at the cell's degree
    cutoff: int
    complete: bool

    def cells_by_degree(self):
        out = {}
        for d in self.module.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def phi_matrix(self, d, lo_bases=None):
        """Chain map F_d -> Y_d induced by A-linearity of phi."""
        F = self.module
        Y = self.target
        A = F.algebra
        lo, bases = expansion_basis(F) if lo_bases is None else lo_bases
        k = d - lo
        if not (0 <= k < len(bases)):
            return Matrix.zeros(Y.dim_at(d), 0, A.p)
        cols = []
        for (j, i) in bases[k]:
            yd = F.degrees[j]
            vec = Y.act_at(i, yd).apply(self.phi[j])
            cols.append(vec)
        return Matrix.from_columns(cols, Y.dim_at(d), A.p)


def _homology_data(X: FiniteDGModule, d):
    """(cycles, quotient data of boundaries inside cycles) at degree d."""
    Z = X.cycles_at(d)
    B = X.boundaries_at(d)
    coords = []
    for j in range(B.dim):
        c = Z.coords(B.basis.column(j))
        if c is None:
            raise TorindError("boundary outside cycles (internal)")
        coords.append(c)
    Bz = Subspace.spanned_by(coords, Z.dim, X.algebra.p)
    return Z, quotient_basis(Z.dim, Bz)


def minimal_semifree_resolution(
    Y: FiniteDGModule, r: int, progress=None
) -> SemifreeResolution:
    """Build the minimal semifree resolution of Y through semibasis degree r.

    Degreewise cycle-killing from the bottom of H(Y) upward: at stage d,
    cells are added to kill ker H_{d-1}(phi) and to hit a complement of
    im H_d(phi), with deterministic pivot choices throughout. Minimality
    d(F) ⊆ m_A F holds by construction and is checked.

    `progress` is an optional callable receiving the current degree; a
    falsy return cancels the run.
    """
    A = Y.algebra
    p = A.p
    hY = Y.homology_dims()
    if not hY:
        raise ZeroModule("H(Y) = 0 has the zero module as resolution")
    b = min(hY)
    if r < b:
        raise TorindError(f"cutoff {r} is below inf H(Y) = {b}")

    degrees = []
    labels = []
    columns = []  # diff columns, as (t, A.dim) coefficient arrays
    phi = []

    def current_module():
        t = len(degrees)
        diff = np.zeros((t, t, A.dim), dtype=np.int64)
        for j, col in enumerate(columns):
            if col is not None:
                diff[: col.shape[0], j, :] = col
        return SemifreeDGModule(A, degrees, diff, labels, validate=False)

    for d in range(b, r + 1):
        if progress is not None and not progress(d):
            raise ResolutionCancelled(f"cancelled at degree {d}")
        F = current_module()
        FX = expand(F, validate=False) if F.rank else finite_zero_module(A)
        lo_bases = expansion_basis(F) if F.rank else (0, [])
        res_now = SemifreeResolution(F, Y, list(phi), d - 1, False)

        new_cells = []  # (degree, diff-column coefficients, phi value)

        # (a) kill ker H_{d-1}(phi)
        if FX.dim_at(d - 1):
            Zf, qf = _homology_data(FX, d - 1)
            hf_dim = qf.dim
            if hf_dim:
                Zy, qy = _homology_data(Y, d - 1)
                pm = res_now.phi_matrix(d - 1, lo_bases)
                cols = []
                reps = []
                for t in range(hf_dim):
                    zf = Zf.basis.apply(qf.complement.basis.column(t))
                    reps.append(zf)
                    img = pm.apply(zf)
                    zc = Zy.coords(img)
                    if zc is None:
                        raise TorindError("phi image not a cycle (internal)")
                    cols.append(qy.project(zc))
                Hphi = Matrix.from_columns(cols, qy.dim, p)
                kerH = Hphi.kernel_basis()
                for t in range(kerH.dim):
                    coeffs = kerH.basis.column(t)
                    z = np.zeros(FX.dim_at(d - 1), dtype=np.int64)
                    for idx in range(hf_dim):
                        z = (z + int(coeffs[idx]) * reps[idx]) % p
                    # solve dY y = phi(z)
                    img = pm.apply(z)
                    y = _solve_boundary(Y, d, img)
                    col = _regroup(FX, lo_bases, d - 1, z, len(degrees))
                    new_cells.append((col, y))

        # (b) hit a complement of im H_d(phi) in H_d(Y)
        Zy, qy = _homology_data(Y, d)
        if qy.dim:
            img_classes = []
            if FX.dim_at(d):
                Zf = FX.cycles_at(d)
                pm = res_now.phi_matrix(d, lo_bases)
                for t in range(Zf.dim):
                    img = pm.apply(Zf.basis.column(t))
                    zc = Zy.coords(img)
                    if zc is None:
                        raise TorindError("phi image not a cycle (internal)")
                    img_classes.append(qy.project(zc))
            imH = Subspace.spanned_by(img_classes, qy.dim, p)
            comp = quotient_basis(qy.dim, imH)
            for t in range(comp.dim):
                hclass = comp.complement.basis.column(t)
                y = Zy.basis.apply(qy.section(hclass))
                col = np.zeros((len(degrees), A.dim), dtype=np.int64)
                new_cells.append((col, y))

        for col, y in new_cells:
            degrees.append(d)
            labels.append(f"c{len(degrees) - 1}d{d}")
            columns.append(col)
            phi.append(np.asarray(y, dtype=np.int64) % p)

    F = current_module()
    complete = _is_quasi_iso(F, Y, phi)
    res = SemifreeResolution(F, Y, phi, r, complete)
    _check_resolution(res)
    return res


def _solve_boundary(Y: FiniteDGModule, d, img):
    """y in Y_d with d(y) = img; img must be a boundary."""
    if not np.asarray(img).any():
        return np.zeros(Y.dim_at(d), dtype=np.int64)
    dY = Y.diff_at(d)
    y = dY.solve(img)
    if y is None:
        raise TorindError("kill target is not a boundary (internal)")
    return y


def _regroup(FX, lo_bases, d, vec, ncells):
    """Rewrite an expansion vector in degree d as per-cell A-coefficients."""
    lo, bases = lo_bases
    col = np.zeros((ncells, FX.algebra.dim), dtype=np.int64)
    k = d - lo
    if not (0 <= k < len(bases)):
        if np.asarray(vec).any():
            raise TorindError("vector outside expansion range (internal)")
        return col
    for t, (j, i) in enumerate(bases[k]):
        if vec[t]:
            col[j, i] = vec[t]
    return col


def _is_quasi_iso(F: SemifreeDGModule, Y: FiniteDGModule, phi) -> bool:
    if F.rank == 0:
        return not Y.homology_dims()
    FX = expand(F, validate=False)
    res = SemifreeResolution(F, Y, list(phi), 0, False)
    lo_bases = expansion_basis(F)
    degrees = set(FX.degree_range()) | set(Y.degree_range())
    for d in sorted(degrees):
        hf = FX.cycles_at(d).dim - FX.boundaries_at(d).dim
        hy = Y.cycles_at(d).dim - Y.boundaries_at(d).dim
        if hf != hy:
            return False
        if hf == 0:
            continue
        Zf, qf = _homology_data(FX, d)
        Zy, qy = _homology_data(Y, d)
        pm = res.phi_matrix(d, lo_bases)
        cols = []
        for t in range(qf.dim):
            z = Zf.basis.apply(qf.complement.basis.column(t))
            zc = Zy.coords(pm.apply(z))
            if zc is None:
                return False
            cols.append(qy.project(zc))
        if Matrix.from_columns(cols, qy.dim, Y.algebra.p).rank() != hf:
            return False
    return True


def _check_resolution(res: SemifreeResolution):
    """Minimality and the partial quasi-isomorphism contract."""
    F = res.module
    A = F.algebra
    for j in range(F.rank):
        for i in range(F.rank):
            entry = F.diff[i, j]
            if entry.any() and entry[A.unit]:
                raise TorindError("resolution is not minimal (internal)")
    if F.rank == 0:
        return
    FX = expand(F, validate=False)
    Y = res.target
    lo_bases = expansion_basis(F)
    for d in range(min(min(F.degrees), Y.lo if Y.dims else 0), res.cutoff):
        hf = FX.cycles_at(d).dim - FX.boundaries_at(d).dim
        hy = Y.cycles_at(d).dim - Y.boundaries_at(d).dim
        if hf != hy:
            raise TorindError(
                f"H_{d}(phi) is not an isomorphism below the cutoff (internal)"
            )
    # chain map check
    for d in FX.degree_range():
        pm_d = res.phi_matrix(d, lo_bases)
        pm_dm1 = res.phi_matrix(d - 1, lo_bases)
        if (Y.diff_at(d) @ pm_d) != (pm_dm1 @ FX.diff_at(d)):
            raise TorindError("phi is not a chain map (internal)")


# --- truncation and filtration -------------------------------------------------


def truncate_complex(X: FiniteDGModule, r: int) -> FiniteDGModule:
    """tau_{<=r}(X) with no precondition: degree r becomes X_r/im d_{r+1}."""
    A = X.algebra
    p = A.p
    if not X.dims or r >= X.hi:
        return X
    if r < X.lo:
        return finite_zero_module(A)
    n_r = X.dim_at(r)
    B = X.boundaries_at(r)
    q = quotient_basis(n_r, B)
    dims = [X.dim_at(d) for d in range(X.lo, r)] + [q.dim]
    diff = []
    for k, d in enumerate(range(X.lo, r + 1)):
        if d < r:
            diff.append(X.diff_at(d))
        else:
            diff.append(X.diff_at(d) @ q.complement.basis)
    act = {}
    for g in range(A.dim):
        gd = A.degrees[g]
        mats = []
        for k, d in enumerate(range(X.lo, r + 1)):
            src_dim = dims[k]
            td = d + gd
            if td > r:
                rows = 0
                mats.append(Matrix.zeros(rows, src_dim, p))
                continue
            base = X.act_at(g, d)
            if d == r:
                base = base @ q.complement.basis
            if td == r:
                base = q.project_matrix(base)
            mats.append(base)
        act[g] = mats
    return FiniteDGModule(A, X.lo, dims, diff, act, validate=True)


def soft_truncate(X, r: int) -> FiniteDGModule:
    """tau_{<=r} with the homology-preservation contract: needs
    r >= sup H(X), and the profile equality is re-checked."""
    if isinstance(X, SemifreeDGModule):
        X = expand(X, validate=False)
    before = X.homology_dims()
    if before and r < max(before):
        raise TruncationBelowHomology(f"r = {r} < sup H = {max(before)}")
    out = truncate_complex(X, r)
    if out.homology_dims() != before:
        raise TorindError("soft truncation changed homology (internal)")
    return out


def semibasis_filtration(F: SemifreeDGModule, p_degree: int) -> SemifreeDGModule:
    """F^(p): the semifree submodule on semibasis elements of degree <= p."""
    keep = [j for j in range(F.rank) if F.degrees[j] <= p_degree]
    t = len(keep)
    diff = np.zeros((t, t, F.algebra.dim), dtype=np.int64)
    for cj, j in enumerate(keep):
        for ci, i in enumerate(keep):
            diff[ci, cj] = F.diff[i, j]
    # closure: entries from dropped cells must vanish (they do: degree drop)
    for j in keep:
        for i in range(F.rank):
            if i not in keep and F.diff[i, j].any():
                raise TorindError("filtration is not d-closed (internal)")
    return SemifreeDGModule(
        F.algebra,
        [F.degrees[j] for j in keep],
        diff,
        [F.labels[j] for j in keep],
        validate=False,
    )


# --- derived tensor products ----------------------------------------------------


def _complex_inf(X) -> int:
    if isinstance(X, SemifreeDGModule):
        return min(X.degrees) if X.rank else 0
    for d in X.degree_range():
        if X.dim_at(d):
            return d
    return 0


def derived_tensor_list(factors, D: int):
    """Materialize ⊗^L of the factors, certified for degrees <= certified_to.

    All factors but the last are replaced by minimal semifree resolutions
    (already-semifree factors are used as-is and are exact); the last
    factor enters the tensor product unresolved. Returns
    (FiniteDGModule, certified_to) with certified_to None when exact.
    """
    if not factors:
        raise TorindError("empty tensor product")
    A = factors[0].algebra
    for f in factors:
        if f.algebra != A:
            raise AlgebraMismatch("factors live over different algebras")
    profiles = [homology_profile(f) for f in factors]
    if any(pr.is_zero for pr in profiles):
        return finite_zero_module(A), None

    if len(factors) == 1:
        X = factors[0]
        if isinstance(X, SemifreeDGModule):
            X = expand(X, validate=False)
        return X, None

    infs = []
    for f, pr in zip(factors, profiles):
        if isinstance(f, SemifreeDGModule):
            infs.append(_complex_inf(f))
        else:
            infs.append(pr.inf)
    infs[-1] = _complex_inf(factors[-1])

    semifree_parts = []
    cert = None
    for idx, f in enumerate(factors[:-1]):
        if isinstance(f, SemifreeDGModule):
            semifree_parts.append(f)
            continue
        others = sum(infs[j] for j in range(len(factors)) if j != idx)
        cutoff = max(D - others, profiles[idx].inf)
        res = minimal_semifree_resolution(f, cutoff)
        semifree_parts.append(res.module)
        if not res.complete:
            level = cutoff + others - 1
            cert = level if cert is None else min(cert, level)

    G = semifree_parts[0]
    for H in semifree_parts[1:]:
        G = tensor_semifree(G, H)
    last = factors[-1]
    if isinstance(last, SemifreeDGModule):
        Z = expand(tensor_semifree(G, last), validate=False)
    else:
        Z = tensor_over_A(G, last)
    return Z, cert


def derived_tensor_profile(X, Y, D: int) -> HomologyProfile:
    """Profile of X ⊗^L_A Y, certified for degrees <= D - 1 (exact when
    the resolution completes or X is already semifree)."""
    Z, cert = derived_tensor_list([X, Y], D)
    dims = Z.homology_dims()
    if cert is not None:
        dims = {d: v for d, v in dims.items() if d <= cert}
    return HomologyProfile(dims, cert)


@dataclass
class DGIndependenceReport:
    """Outcome of the DG strong Tor-independence check: every nonempty
    subset's derived tensor product must have amplitude <= s."""

    passed: bool
    s: int
    certified_to: int
    subsets: list  # (subset, profile dict, amp, ok)
    witness: tuple  # first failing subset, or None

    def to_dict(self):
        return {
            "passed": self.passed,
            "s": self.s,
            "certified_to": self.certified_to,
            "subsets": [
                {
                    "subset": list(S),
                    "profile": prof,
                    "amp": amp,
                    "ok": ok,
                }
                for (S, prof, amp, ok) in self.subsets
            ],
            "witness": None if self.witness is None else list(self.witness),
        }


def check_strong_tor_independence_dg(modules, D: int) -> DGIndependenceReport:
    """amp H(⊗^L_{i∈I} K_i) <= s for every nonempty I, at certification
    level D. Includes singletons; the verdict is invariant under
    reordering (tensor factors are processed in subset order)."""
    if not modules:
        raise TorindError("need at least one module")
    A = modules[0].algebra
    for f in modules:
        if f.algebra != A:
            raise AlgebraMismatch("modules live over different algebras")
    s = algebra_amp(A)
    n = len(modules)
    rows = []
    witness = None
    passed = True
    for t in range(1, n + 1):
        for S in itertools.combinations(range(n), t):
            Z, cert = derived_tensor_list([modules[i] for i in S], D)
            dims = Z.homology_dims()
            if cert is not None:
                dims = {d: v for d, v in dims.items() if d <= cert}
            prof = HomologyProfile(dims, cert)
            amp = prof.amp
            ok = prof.is_zero or amp <= s
            rows.append((S, prof.to_dict(), amp, ok))
            if not ok and witness is None:
                witness = S
                passed = False
    return DGIndependenceReport(passed, s, D, rows, witness)


# --- H(A)-module structure on homology -------------------------------------------


class HomologyModule:
    """H(X) as a module over H(A), with representatives per degree."""

    def __init__(self, X: FiniteDGModule, HA: HomologyAlgebra):
        if HA.algebra != X.algebra:
            raise AlgebraMismatch("homology algebra is for a different algebra")
        self.complex = X
        self.HA = HA
        self._cycles = {}
        self._quotients = {}
        self.dims = {}
        for d in X.degree_range():
            Z, q = _homology_data(X, d)
            self._cycles[d] = Z
            self._quotients[d] = q
            if q.dim:
                self.dims[d] = q.dim

    def reps(self, d):
        Z = self._cycles.get(d)
        q = self._quotients.get(d)
        if Z is None or q is None or q.dim == 0:
            return []
        return [Z.basis.apply(q.complement.basis.column(t)) for t in range(q.dim)]

    def class_of(self, v, d):
        Z = self._cycles.get(d)
        q = self._quotients.get(d)
        if Z is None or q is None:
            if np.asarray(v).any():
                raise TorindError("vector in empty degree")
            return np.zeros(0, dtype=np.int64)
        c = Z.coords(v)
        if c is None:
            raise TorindError("not a cycle")
        return q.project(c)

    def act_class(self, a_rep, a_deg, d, z):
        """[a_rep] · [z] for a cycle a_rep in A of degree a_deg and a cycle
        z in X_d, as H-coordinates in degree d + a_deg."""
        X = self.complex
        out = X.act_vector(a_rep, d).apply(z) if X.dim_at(d) else np.zeros(
            X.dim_at(d + a_deg), dtype=np.int64
        )
        return self.class_of(out, d + a_deg)

    def annihilated_by_power(self, q_power: int):
        """True iff m_{H(A)}^{q_power} · H(X) = 0, checked on spanning
        products of maximal-ideal basis classes."""
        if not self.dims:
            return True
        if q_power == 0:
            return False  # m^0 contains 1, which acts as the identity
        HA = self.HA
        max_idx = HA.max_ideal_indices()
        for combo in itertools.product(max_idx, repeat=q_power):
            # product of the chosen classes, as a representative cycle in A
            rep = HA.reps[combo[0]]
            deg = HA.rep_degrees[combo[0]]
            zero = False
            for i in combo[1:]:
                rep = HA.algebra.multiply(rep, HA.reps[i])
                deg += HA.rep_degrees[i]
                if not rep.any():
                    zero = True
                    break
            if zero:
                continue
            # representative may be a boundary (class zero): still fine to
            # act with it; classes of boundaries act as zero on homology,
            # so only a nonzero resulting class is a violation
            for d in sorted(self.dims):
                for z in self.reps(d):
                    if deg + d > self.complex.hi:
                        continue
                    if self.act_class(rep, deg, d, z).any():
                        return False
        return True
