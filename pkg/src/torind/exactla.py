"""Exact dense linear algebra over a prime field F_p.

Every homological computation in the toolkit reduces to ranks, kernels and
complements computed here. All arithmetic is integer arithmetic reduced
mod p (numpy int64 is the container; nothing is ever floating point), and
all pivot choices are deterministic: scanning columns left to right, the
pivot is the unused row of smallest index with a nonzero entry. Identical
inputs therefore yield bit-identical outputs.
"""

from __future__ import annotations

import numpy as np

from .errors import TorindError

DEFAULT_PRIME = 32003


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


class Matrix:
    """An r x c matrix over F_p. Immutable by convention: no method mutates self."""

    __slots__ = ("a", "p")

    def __init__(self, data, p: int):
        a = np.asarray(data, dtype=np.int64)
        if a.ndim != 2:
            raise TorindError(f"matrix data must be 2-dimensional, got shape {a.shape}")
        self.a = np.mod(a, p)
        self.p = p

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "Matrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "Matrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def from_columns(cls, cols, ambient_dim: int, p: int) -> "Matrix":
        """Assemble a matrix whose columns are the given length-`ambient_dim` vectors."""
        if not cols:
            return cls.zeros(ambient_dim, 0, p)
        return cls(np.stack([np.asarray(c, dtype=np.int64) for c in cols], axis=1), p)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def is_zero(self) -> bool:
        return not self.a.any()

    def column(self, j: int) -> np.ndarray:
        return self.a[:, j].copy()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.p == other.p
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self.a.tolist()}, p={self.p})"

    def _check(self, other: "Matrix"):
        if self.p != other.p:
            raise TorindError("mixed characteristics")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.a + other.a, self.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.a - other.a, self.p)

    def __neg__(self) -> "Matrix":
        return Matrix(-self.a, self.p)

    def scale(self, c: int) -> "Matrix":
        return Matrix(self.a * (int(c) % self.p), self.p)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise TorindError(
                f"shape mismatch in product: {self.a.shape} @ {other.a.shape}"
            )
        return Matrix(self.a @ other.a, self.p)

    def apply(self, v) -> np.ndarray:
        """Matrix-vector product, returning a fresh vector mod p."""
        v = np.asarray(v, dtype=np.int64)
        return np.mod(self.a @ v, self.p)

    def transpose(self) -> "Matrix":
        return Matrix(self.a.T, self.p)

    def rref(self):
        """Reduced row echelon form.

        Returns (R, pivots) where pivots is the tuple of pivot column
        indices; the pivot for each column is the unused row of smallest
        index with a nonzero entry there.
        """
        p = self.p
        R = self.a.copy()
        rows, cols = R.shape
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(R[r:, c])[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                R[[r, i]] = R[[i, r]]
            R[r] = (R[r] * _inv_mod(R[r, c], p)) % p
            col = R[:, c].copy()
            col[r] = 0
            mask = col != 0
            if mask.any():
                R[mask] = (R[mask] - np.outer(col[mask], R[r])) % p
            pivots.append(c)
            r += 1
        return Matrix(R, p), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> "Subspace":
        """Deterministic basis of the null space {v : M v = 0}.

        One basis vector per non-pivot column, normalized so its first
        nonzero coordinate is 1; dim = cols - rank.
        """
        R, pivots = self.rref()
        p = self.p
        free = [c for c in range(self.cols) if c not in set(pivots)]
        vecs = []
        for f in free:
            v = np.zeros(self.cols, dtype=np.int64)
            v[f] = 1
            for r, c in enumerate(pivots):
                v[c] = (-R.a[r, f]) % p
            nz = np.nonzero(v)[0]
            v = (v * _inv_mod(v[nz[0]], p)) % p
            vecs.append(v)
        return Subspace(Matrix.from_columns(vecs, self.cols, p))

    def column_space(self) -> "Subspace":
        """Subspace spanned by the columns, with a deterministic basis."""
        R, pivots = self.rref()
        _ = R
        cols = [self.column(j) for j in self.independent_columns()]
        return Subspace(Matrix.from_columns(cols, self.rows, self.p))

    def independent_columns(self):
        """Indices of the pivot columns: a deterministic maximal independent set."""
        return self.rref()[1]

    def solve(self, b):
        """One solution x of M x = b, or None if inconsistent.

        Free variables are set to 0, making the solution deterministic.
        """
        b = np.asarray(b, dtype=np.int64) % self.p
        if b.shape != (self.rows,):
            raise TorindError(f"rhs has shape {b.shape}, expected ({self.rows},)")
        aug = Matrix(np.concatenate([self.a, b.reshape(-1, 1)], axis=1), self.p)
        R, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = np.zeros(self.cols, dtype=np.int64)
        for r, c in enumerate(pivots):
            x[c] = R.a[r, self.cols]
        return x

    def solve_matrix(self, B: "Matrix"):
        """Columnwise solve: X with M X = B, or None if any column is inconsistent."""
        self._check(B)
        cols = []
        for j in range(B.cols):
            x = self.solve(B.column(j))
            if x is None:
                return None
            cols.append(x)
        return Matrix.from_columns(cols, self.cols, self.p)

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise TorindError("inverse of a non-square matrix")
        n = self.rows
        aug = Matrix(
            np.concatenate([self.a, np.eye(n, dtype=np.int64)], axis=1), self.p
        )
        R, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)):
            raise TorindError("matrix is singular")
        return Matrix(R.a[:, n:], self.p)


def hstack(mats) -> Matrix:
    mats = list(mats)
    p = mats[0].p
    return Matrix(np.concatenate([m.a for m in mats], axis=1), p)


def vstack(mats) -> Matrix:
    mats = list(mats)
    p = mats[0].p
    return Matrix(np.concatenate([m.a for m in mats], axis=0), p)


class Subspace:
    """A subspace of F_p^n given by a matrix whose columns are independent."""

    __slots__ = ("basis",)

    def __init__(self, basis: Matrix):
        if basis.cols and basis.rank() != basis.cols:
            raise TorindError("subspace basis has dependent columns")
        self.basis = basis

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(Matrix.zeros(ambient_dim, 0, p))

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(Matrix.identity(ambient_dim, p))

    @classmethod
    def spanned_by(cls, vectors, ambient_dim: int, p: int) -> "Subspace":
        """Span of arbitrary vectors; reduces to a deterministic independent basis."""
        M = Matrix.from_columns(list(vectors), ambient_dim, p)
        return M.column_space()

    @property
    def ambient_dim(self) -> int:
        return self.basis.rows

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def p(self) -> int:
        return self.basis.p

    def coords(self, v):
        """Coordinates of v in the basis, or None if v is outside the subspace."""
        if self.dim == 0:
            v = np.asarray(v, dtype=np.int64) % self.p
            return np.zeros(0, dtype=np.int64) if not v.any() else None
        return self.basis.solve(v)

    def contains(self, v) -> bool:
        return self.coords(v) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(other.basis.column(j)) for j in range(other.dim))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.dim == other.dim
            and self.contains_subspace(other)
        )

    def __hash__(self):
        raise TypeError("Subspace is unhashable")

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


class QuotientData:
    """A deterministic complement C of a subspace S, with projection data.

    ambient = S ⊕ C where C is spanned by coordinate vectors at the
    non-pivot positions of S. `project` maps an ambient vector to its
    C-coordinates (the quotient map), `section` embeds C-coordinates back
    as the chosen representatives.
    """

    __slots__ = ("subspace", "complement", "positions", "_inv")

    def __init__(self, subspace: Subspace, complement: Subspace, positions, inv):
        self.subspace = subspace
        self.complement = complement
        self.positions = positions
        self._inv = inv

    @property
    def dim(self) -> int:
        return self.complement.dim

    def project(self, v) -> np.ndarray:
        """Quotient-map coordinates of v: the complement part of v = s + c."""
        full = self._inv.apply(v)
        return full[self.subspace.dim :]

    def project_matrix(self, M: Matrix) -> Matrix:
        return Matrix((self._inv @ M).a[self.subspace.dim :, :], M.p)

    def section(self, c) -> np.ndarray:
        return self.complement.basis.apply(c)


def quotient_basis(ambient_dim: int, S: Subspace) -> QuotientData:
    """Deterministic complement of S: coordinate vectors at non-pivot positions."""
    if S.ambient_dim != ambient_dim:
        raise TorindError(
            f"subspace ambient dim {S.ambient_dim} does not match {ambient_dim}"
        )
    p = S.p
    if S.dim and S.basis.rank() != S.dim:
        raise TorindError("subspace basis has dependent columns")
    pivot_rows = S.basis.transpose().independent_columns()
    taken = set(pivot_rows)
    positions = tuple(i for i in range(ambient_dim) if i not in taken)
    comp_cols = []
    for i in positions:
        v = np.zeros(ambient_dim, dtype=np.int64)
        v[i] = 1
        comp_cols.append(v)
    complement = Subspace(Matrix.from_columns(comp_cols, ambient_dim, p))
    T = hstack([S.basis, complement.basis])
    inv = T.inverse() if T.cols else Matrix.zeros(0, ambient_dim, p)
    return QuotientData(S, complement, positions, inv)


def intersect(S: Subspace, T: Subspace) -> Subspace:
    """Intersection of two subspaces of the same ambient space."""
    if S.ambient_dim != T.ambient_dim:
        raise TorindError("ambient dimension mismatch")
    if S.dim == 0 or T.dim == 0:
        return Subspace.zero(S.ambient_dim, S.p)
    M = hstack([S.basis, T.basis.scale(-1)])
    ker = M.kernel_basis()
    vecs = [
        S.basis.apply(ker.basis.column(j)[: S.dim]) for j in range(ker.dim)
    ]
    return Subspace.spanned_by(vecs, S.ambient_dim, S.p)
