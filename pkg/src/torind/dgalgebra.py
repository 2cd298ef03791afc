"""Finite-dimensional graded-commutative DG algebras over F_p.

An algebra is a finite table: labeled basis elements with homological
degrees, structure constants for the product, and a differential matrix.
`validate_dg_algebra` checks every axiom exhaustively on basis tuples
(grading, locality A_0 = k·1, unitality, associativity, graded
commutativity with odd squares zero, d^2 = 0, Leibniz), so downstream
code can rely on the tables blindly.

Degree conventions are homological: the differential drops degree by 1,
and all degrees are >= 0.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import (
    AxiomViolation,
    HomologyZero,
    NotLocal,
    TorindError,
    TruncationBelowHomology,
)
from .exactla import (
    DEFAULT_PRIME,
    Matrix,
    Subspace,
    is_prime,
    quotient_basis,
)


class DGAlgebra:
    """A validated DG algebra given by explicit finite tables.

    Immutable after validation; build instances through
    `validate_dg_algebra` or the constructors below.
    """

    __slots__ = (
        "p",
        "labels",
        "degrees",
        "unit",
        "mult",
        "diff",
        "by_degree",
        "top",
    )

    def __init__(self, p, labels, degrees, unit, mult, diff, _validated=False):
        if not _validated:
            raise TorindError("construct DGAlgebra via validate_dg_algebra")
        self.p = p
        self.labels = tuple(labels)
        self.degrees = tuple(int(d) for d in degrees)
        self.unit = int(unit)
        self.mult = mult  # (N, N, N) int64, entries in [0, p)
        self.diff = diff  # Matrix N x N, diff[i, j] = coeff of b_i in d(b_j)
        by_degree = {}
        for i, d in enumerate(self.degrees):
            by_degree.setdefault(d, []).append(i)
        self.by_degree = {d: tuple(ix) for d, ix in sorted(by_degree.items())}
        self.top = max(self.degrees)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def basis_vector(self, i) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def unit_vector(self) -> np.ndarray:
        return self.basis_vector(self.unit)

    def positive_indices(self):
        return tuple(i for i, d in enumerate(self.degrees) if d > 0)

    def multiply(self, u, v) -> np.ndarray:
        """Product of two coefficient vectors."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.mod(np.outer(u, v), self.p)
        return np.mod(np.einsum("ij,ijk->k", w, self.mult), self.p)

    def differentiate(self, v) -> np.ndarray:
        return self.diff.apply(v)

    def element_degree(self, v):
        """Degree of a homogeneous vector, None for 0, error if mixed."""
        v = np.asarray(v, dtype=np.int64) % self.p
        degs = {self.degrees[i] for i in np.nonzero(v)[0]}
        if not degs:
            return None
        if len(degs) > 1:
            raise TorindError(f"inhomogeneous element (degrees {sorted(degs)})")
        return degs.pop()

    def strand(self, d):
        """Indices of the degree-d part (empty tuple if none)."""
        return self.by_degree.get(d, ())

    def strand_dim(self, d) -> int:
        return len(self.strand(d))

    def diff_strand(self, d) -> Matrix:
        """Matrix of d_d : A_d -> A_{d-1} in strand coordinates."""
        rows = self.strand(d - 1)
        cols = self.strand(d)
        out = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for cj, j in enumerate(cols):
            for ri, i in enumerate(rows):
                out[ri, cj] = self.diff.a[i, j]
        return Matrix(out, self.p)

    def into_strand(self, v, d) -> np.ndarray:
        return np.asarray(v, dtype=np.int64)[list(self.strand(d))] % self.p

    def from_strand(self, w, d) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        for k, i in enumerate(self.strand(d)):
            v[i] = w[k]
        return v

    def __eq__(self, other):
        return self is other or (
            isinstance(other, DGAlgebra)
            and self.p == other.p
            and self.labels == other.labels
            and self.degrees == other.degrees
            and self.unit == other.unit
            and np.array_equal(self.mult, other.mult)
            and self.diff == other.diff
        )

    def __hash__(self):
        return hash((self.p, self.labels, self.degrees, self.unit))

    def format_element(self, v) -> str:
        v = np.asarray(v, dtype=np.int64) % self.p
        terms = []
        for i in np.nonzero(v)[0]:
            c = int(v[i])
            terms.append(self.labels[i] if c == 1 else f"{c}*{self.labels[i]}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"DGAlgebra(dim={self.dim}, p={self.p}, top={self.top})"


def _as_mult_array(dim, p, entries):
    c = np.zeros((dim, dim, dim), dtype=np.int64)
    for (i, j, k), v in entries.items():
        c[i, j, k] = v % p
    return c


def validate_dg_algebra(p, labels, degrees, unit, mult, diff) -> DGAlgebra:
    """Validate raw tables and return a DGAlgebra.

    mult: dict {(i, j, k): coeff} or a full (N,N,N) array; diff: dict
    {(i, j): coeff} (coeff of b_i in d(b_j)) or an N x N array. Omitted
    entries are zero.
    """
    if not is_prime(p):
        raise TorindError(f"characteristic {p} is not prime")
    n = len(labels)
    if n == 0 or len(degrees) != n:
        raise TorindError("basis and degree lists are inconsistent")
    degrees = tuple(int(d) for d in degrees)
    if isinstance(mult, dict):
        c = _as_mult_array(n, p, mult)
    else:
        c = np.mod(np.asarray(mult, dtype=np.int64), p)
        if c.shape != (n, n, n):
            raise TorindError(f"mult table has shape {c.shape}, expected {(n, n, n)}")
    if isinstance(diff, dict):
        dm = np.zeros((n, n), dtype=np.int64)
        for (i, j), v in diff.items():
            dm[i, j] = v % p
    else:
        dm = np.mod(np.asarray(diff, dtype=np.int64), p)
        if dm.shape != (n, n):
            raise TorindError(f"diff table has shape {dm.shape}, expected {(n, n)}")

    if any(d < 0 for d in degrees):
        bad = next(i for i, d in enumerate(degrees) if d < 0)
        raise AxiomViolation("positively-graded", labels[bad])
    if degrees[unit] != 0:
        raise NotLocal("unit must sit in degree 0")
    degree0 = [i for i, d in enumerate(degrees) if d == 0]
    if degree0 != [unit]:
        raise NotLocal(
            f"degree-0 part must be spanned by the unit alone, found basis {degree0}"
        )

    # grading of the structure constants and the differential
    for i, j, k in zip(*np.nonzero(c)):
        if degrees[k] != degrees[i] + degrees[j]:
            raise AxiomViolation(
                "multiplication-grading", (labels[i], labels[j], labels[k])
            )
    for i, j in zip(*np.nonzero(dm)):
        if degrees[i] != degrees[j] - 1:
            raise AxiomViolation("differential-grading", (labels[i], labels[j]))

    # unitality
    for j in range(n):
        e_j = np.zeros(n, dtype=np.int64)
        e_j[j] = 1
        if not np.array_equal(c[unit, j], e_j) or not np.array_equal(c[j, unit], e_j):
            raise AxiomViolation("unitality", labels[j])

    # associativity on all basis triples
    left = np.mod(np.einsum("ijk,klm->ijlm", c, c), p)
    right = np.mod(np.einsum("jlk,ikm->ijlm", c, c), p)
    if not np.array_equal(left, right):
        i, j, l, _ = next(zip(*np.nonzero((left - right) % p)))
        raise AxiomViolation("associativity", (labels[i], labels[j], labels[l]))

    # graded commutativity, including odd squares zero
    for i in range(n):
        for j in range(i, n):
            sign = -1 if (degrees[i] * degrees[j]) % 2 else 1
            if not np.array_equal(c[i, j], np.mod(sign * c[j, i], p)):
                raise AxiomViolation("graded-commutativity", (labels[i], labels[j]))
        if degrees[i] % 2 == 1 and c[i, i].any():
            raise AxiomViolation("odd-square-zero", labels[i])

    # d^2 = 0
    if np.mod(dm @ dm, p).any():
        j = next(j for j in range(n) if np.mod(dm @ dm, p)[:, j].any())
        raise AxiomViolation("differential", labels[j])

    # Leibniz on all basis pairs
    lhs = np.mod(np.einsum("ijk,lk->ijl", c, dm), p)
    rhs = np.mod(np.einsum("mi,mjl->ijl", dm, c), p)
    signs = np.array([(-1) ** d for d in degrees], dtype=np.int64)
    rhs = np.mod(rhs + signs[:, None, None] * np.einsum("mj,iml->ijl", dm, c), p)
    if not np.array_equal(lhs, rhs):
        i, j, _ = next(zip(*np.nonzero((lhs - rhs) % p)))
        raise AxiomViolation("leibniz", (labels[i], labels[j]))

    return DGAlgebra(p, labels, degrees, unit, c, Matrix(dm, p), _validated=True)


def augmentation_power(A: DGAlgebra, n: int) -> Subspace:
    """Basis of m_A^n = (A_+)^n as a subspace of A; n = 0 gives all of A."""
    if n < 0:
        raise TorindError("power must be nonnegative")
    if n == 0:
        return Subspace.full(A.dim, A.p)
    pos = [A.basis_vector(i) for i in A.positive_indices()]
    current = Subspace.spanned_by(pos, A.dim, A.p)
    for _ in range(n - 1):
        if current.dim == 0:
            break
        prods = []
        for i in A.positive_indices():
            bi = A.basis_vector(i)
            for j in range(current.dim):
                prods.append(A.multiply(bi, current.basis.column(j)))
        current = Subspace.spanned_by(prods, A.dim, A.p)
    return current


def homology_dims(A: DGAlgebra):
    """Per-degree dims of H(A) as a dict {degree: dim}, zeros omitted."""
    out = {}
    for d in range(A.top + 1):
        nd = A.strand_dim(d)
        if nd == 0:
            continue
        zin = A.diff_strand(d).kernel_basis().dim if d > 0 else nd
        rk_next = A.diff_strand(d + 1).rank() if A.strand_dim(d + 1) else 0
        h = zin - rk_next
        if h:
            out[d] = h
    return out


class HomologyAlgebra:
    """H(A) with cycle representatives, induced products and its maximal ideal.

    Representatives are chosen deterministically (complement of boundaries
    inside cycles, pivot positions first) and the induced product is
    verified to be independent of representatives on the basis.
    """

    def __init__(self, algebra: DGAlgebra):
        A = algebra
        self.algebra = A
        p = A.p
        self._kernels = {}
        self._quotients = {}
        reps = []
        rep_degrees = []
        for d in range(A.top + 1):
            nd = A.strand_dim(d)
            if nd == 0:
                continue
            ker = A.diff_strand(d).kernel_basis() if d > 0 else Subspace.full(nd, p)
            bnd_cols = []
            if A.strand_dim(d + 1):
                dn = A.diff_strand(d + 1)
                for j in dn.independent_columns():
                    bnd_cols.append(dn.column(j))
            bnd_in_ker = []
            for b in bnd_cols:
                coords = ker.coords(b)
                if coords is None:
                    raise TorindError("boundary outside cycle space (internal)")
                bnd_in_ker.append(coords)
            B = Subspace.spanned_by(bnd_in_ker, ker.dim, p)
            q = quotient_basis(ker.dim, B)
            self._kernels[d] = ker
            self._quotients[d] = q
            for k in range(q.dim):
                w = ker.basis.apply(q.complement.basis.column(k))
                reps.append(A.from_strand(w, d))
                rep_degrees.append(d)
        if not reps:
            raise HomologyZero("H(A) = 0: the algebra is acyclic")
        self.reps = reps
        self.rep_degrees = tuple(rep_degrees)
        self.dims = {}
        for d in rep_degrees:
            self.dims[d] = self.dims.get(d, 0) + 1
        self.inf = min(self.dims)
        self.sup = max(self.dims)
        self.amp = self.sup - self.inf
        if self.dims.get(0, 0) != 1:
            raise TorindError("H_0(A) is not the residue field (internal)")
        self._index_by_degree = {}
        for idx, d in enumerate(rep_degrees):
            self._index_by_degree.setdefault(d, []).append(idx)
        self._build_products()

    @property
    def s(self) -> int:
        """amp(H(A)), the bound appearing in every Tor-independence check."""
        return self.amp

    def class_count(self) -> int:
        return len(self.reps)

    def class_of(self, v, d=None):
        """H-coordinates of a cycle given by a global vector v."""
        A = self.algebra
        v = np.asarray(v, dtype=np.int64) % A.p
        out = np.zeros(len(self.reps), dtype=np.int64)
        if not v.any():
            return out
        if d is None:
            d = A.element_degree(v)
        if d not in self._kernels:
            if np.mod(A.differentiate(v), A.p).any():
                raise TorindError("not a cycle")
            return out
        w = A.into_strand(v, d)
        coords = self._kernels[d].coords(w)
        if coords is None:
            raise TorindError("not a cycle")
        hc = self._quotients[d].project(coords)
        for k, idx in enumerate(self._index_by_degree.get(d, ())):
            out[idx] = hc[k]
        return out

    def _build_products(self):
        A = self.algebra
        h = len(self.reps)
        table = np.zeros((h, h, h), dtype=np.int64)
        for i in range(h):
            for j in range(h):
                prod = A.multiply(self.reps[i], self.reps[j])
                d = self.rep_degrees[i] + self.rep_degrees[j]
                if d > A.top or not prod.any():
                    continue
                table[i, j] = self.class_of(prod, d)
        self.mult = table
        # representative independence: boundaries multiply into boundaries
        for d, ker in self._kernels.items():
            q = self._quotients[d]
            for bj in range(q.subspace.dim):
                bnd = A.from_strand(ker.basis.apply(q.subspace.basis.column(bj)), d)
                for i in range(h):
                    prod = A.multiply(self.reps[i], bnd)
                    dd = self.rep_degrees[i] + d
                    if dd > A.top or not prod.any():
                        continue
                    if self.class_of(prod, dd).any():
                        raise TorindError(
                            "induced product depends on representatives (internal)"
                        )

    def multiply_classes(self, u, v):
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.mod(np.outer(u, v), self.algebra.p)
        return np.mod(np.einsum("ij,ijk->k", w, self.mult), self.algebra.p)

    def max_ideal_indices(self):
        """Basis indices of m_{H(A)}, the positive-degree part of H(A)."""
        return tuple(i for i, d in enumerate(self.rep_degrees) if d > 0)

    def max_ideal_power(self, q: int) -> Subspace:
        """m_{H(A)}^q as a subspace of H(A) in class coordinates."""
        h = len(self.reps)
        if q == 0:
            return Subspace.full(h, self.algebra.p)
        gens = []
        for i in self.max_ideal_indices():
            v = np.zeros(h, dtype=np.int64)
            v[i] = 1
            gens.append(v)
        current = Subspace.spanned_by(gens, h, self.algebra.p)
        for _ in range(q - 1):
            if current.dim == 0:
                break
            prods = []
            for i in self.max_ideal_indices():
                ei = np.zeros(h, dtype=np.int64)
                ei[i] = 1
                for j in range(current.dim):
                    prods.append(self.multiply_classes(ei, current.basis.column(j)))
            current = Subspace.spanned_by(prods, h, self.algebra.p)
        return current


def homology_algebra(A: DGAlgebra) -> HomologyAlgebra:
    """H(A) with representatives and induced products; raises HomologyZero."""
    return HomologyAlgebra(A)


def soft_truncate_algebra(A: DGAlgebra, r: int) -> DGAlgebra:
    """tau_{<=r}(A): degrees < r unchanged, degree r modded by boundaries.

    Requires r >= sup(H(A)) so the result is quasi-isomorphic to A; the
    homology dimensions are re-checked after construction.
    """
    if r < 0:
        raise TruncationBelowHomology("truncation degree must be nonnegative")
    hd = homology_dims(A)
    sup_h = max(hd) if hd else None
    if sup_h is not None and r < sup_h:
        raise TruncationBelowHomology(f"r = {r} < sup H(A) = {sup_h}")
    if r >= A.top:
        return A
    p = A.p
    keep = [i for i in range(A.dim) if A.degrees[i] < r]
    strand_r = A.strand(r)
    bnd = []
    if A.strand_dim(r + 1):
        dn = A.diff_strand(r + 1)
        for j in dn.independent_columns():
            bnd.append(dn.column(j))
    B = Subspace.spanned_by(bnd, len(strand_r), p)
    q = quotient_basis(len(strand_r), B)

    new_vectors = [A.basis_vector(i) for i in keep]
    new_labels = [A.labels[i] for i in keep]
    new_degrees = [A.degrees[i] for i in keep]
    for pos in q.positions:
        new_vectors.append(A.basis_vector(strand_r[pos]))
        new_labels.append(A.labels[strand_r[pos]])
        new_degrees.append(r)
    n_new = len(new_vectors)
    unit_candidates = [
        i
        for i in range(n_new)
        if new_degrees[i] == 0 and np.array_equal(new_vectors[i], A.unit_vector())
    ]
    if not unit_candidates:
        raise TorindError("truncation removed the unit (algebra was acyclic)")
    unit_new = unit_candidates[0]

    def project(v):
        out = np.zeros(n_new, dtype=np.int64)
        for k, i in enumerate(keep):
            out[k] = v[i]
        w = A.into_strand(v, r)
        c = q.project(w)
        for k in range(q.dim):
            out[len(keep) + k] = c[k]
        return out

    mult = {}
    for i in range(n_new):
        di = new_degrees[i]
        for j in range(n_new):
            if di + new_degrees[j] > r:
                continue
            prod = project(A.multiply(new_vectors[i], new_vectors[j]))
            for k in np.nonzero(prod)[0]:
                mult[(i, j, int(k))] = int(prod[k])
    diff = {}
    for j in range(n_new):
        dv = project(A.differentiate(new_vectors[j]))
        for i in np.nonzero(dv)[0]:
            diff[(int(i), j)] = int(dv[i])

    out = validate_dg_algebra(p, new_labels, new_degrees, unit_new, mult, diff)
    if homology_dims(out) != hd:
        raise TorindError("soft truncation changed homology (internal)")
    return out


# --- constructors for common algebras ---------------------------------------


def exterior_algebra(p=DEFAULT_PRIME, generators=("e",)) -> DGAlgebra:
    """Exterior algebra on degree-1 generators with zero differential."""
    gens = list(generators)
    g = len(gens)
    subsets = []
    for size in range(g + 1):
        subsets.extend(itertools.combinations(range(g), size))
    index = {S: i for i, S in enumerate(subsets)}
    labels = ["1" if not S else "^".join(gens[a] for a in S) for S in subsets]
    degrees = [len(S) for S in subsets]
    mult = {}
    for S in subsets:
        for T in subsets:
            if set(S) & set(T):
                continue
            merged = tuple(sorted(S + T))
            inv = sum(1 for s in S for t in T if s > t)
            sign = (-1) ** inv
            mult[(index[S], index[T], index[merged])] = sign % p
    return validate_dg_algebra(p, labels, degrees, index[()], mult, {})


def square_zero_algebra(p, degrees, diff=None, labels=None) -> DGAlgebra:
    """k ⊕ V with V in positive degrees, V·V = 0 and a differential on V.

    `degrees` lists the degrees of the non-unit basis elements (all >= 1);
    `diff` maps {(i, j): coeff} in the indexing of the full basis, where
    index 0 is the unit. Leibniz forces the differential to vanish on
    degree 1 (it would land in k·1), which validation enforces.
    """
    degs = [0] + [int(d) for d in degrees]
    if labels is None:
        labels = ["1"] + [f"v{i}" for i in range(1, len(degs))]
    mult = {}
    for j in range(len(degs)):
        mult[(0, j, j)] = 1
        if j:
            mult[(j, 0, j)] = 1
    return validate_dg_algebra(p, labels, degs, 0, mult, diff or {})


def exterior_times_even(p=DEFAULT_PRIME) -> DGAlgebra:
    """Basis {1, e, f, ef} with |e| = 1, |f| = 2, f^2 = 0, zero differential."""
    labels = ["1", "e", "f", "ef"]
    degrees = [0, 1, 2, 3]
    mult = {}
    for j in range(4):
        mult[(0, j, j)] = 1
        if j:
            mult[(j, 0, j)] = 1
    mult[(1, 2, 3)] = 1
    mult[(2, 1, 3)] = 1
    return validate_dg_algebra(p, labels, degrees, 0, mult, {})
