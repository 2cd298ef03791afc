"""Monomial quotient rings R = k[x_1..x_m]/I and their homological algebra.

Normal forms are divisibility checks against the monomial generators, so
no Groebner machinery is needed. Artinian rings (every variable has a
pure power in I) get the full toolkit: module tensor products, minimal
free resolutions, Tor with a built-in balance cross-check, syzygies and
the strong Tor-independence predicate. Non-artinian rings support Koszul
homology and depth/ecodepth, computed on internal-degree strands up to
the Taylor bound deg(lcm(gens)) + m, plus the graded strand helpers the
theorem pipeline needs for regular-element reductions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BalanceMismatch, NonArtinian, TorindError
from .exactla import (
    Matrix,
    Subspace,
    hstack,
    is_prime,
    quotient_basis,
)

Monomial = tuple

# --- monomial helpers --------------------------------------------------------


def mono_deg(u) -> int:
    return sum(u)

def mono_mul(u, v) -> Monomial:
    return tuple(a + b for a, b in zip(u, v))

def mono_divides(u, v) -> bool:
    return all(a <= b for a, b in zip(u, v))

def mono_lcm(u, v) -> Monomial:
    return tuple(max(a, b) for a, b in zip(u, v))


class MonomialQuotientRing:
    """R = k[x_1..x_m]/I with I generated by monomials.

    Generators are minimalized (no generator divides another). The ring
    is artinian iff every variable has a pure power among the generators;
    in that case `k_basis` lists all standard monomials, sorted by
    (degree, exponents).
    """

    __slots__ = (
        "p",
        "num_vars",
        "gens",
        "var_names",
        "artinian",
        "k_basis",
        "_index",
        "mono_parents",
    )

    def __init__(self, p, num_vars, gens, var_names=None):
        if not is_prime(p):
            raise TorindError(f"characteristic {p} is not prime")
        self.p = p
        self.num_vars = num_vars
        gens = [tuple(int(e) for e in g) for g in gens]
        for g in gens:
            if len(g) != num_vars or any(e < 0 for e in g):
                raise TorindError(f"bad exponent vector {g}")
            if mono_deg(g) == 0:
                raise TorindError("ideal contains 1")
        minimal = []
        for g in sorted(set(gens), key=lambda u: (mono_deg(u), u)):
            if not any(mono_divides(h, g) for h in minimal):
                minimal.append(g)
        self.gens = tuple(minimal)
        if var_names is None:
            var_names = tuple(f"x{a+1}" for a in range(num_vars))
        self.var_names = tuple(var_names)
        self.artinian = all(
            any(g[a] > 0 and mono_deg(g) == g[a] for g in self.gens)
            for a in range(num_vars)
        )
        if self.artinian:
            self.k_basis = tuple(self._enumerate_standard(None))
            self._index = {u: i for i, u in enumerate(self.k_basis)}
            # parent pointers: u = x_a * parent(u), for incremental spans
            parents = []
            for i, u in enumerate(self.k_basis):
                if mono_deg(u) == 0:
                    parents.append(None)
                    continue
                a = next(b for b in range(num_vars) if u[b])
                v = tuple(e - (1 if b == a else 0) for b, e in enumerate(u))
                parents.append((a, self._index[v]))
            self.mono_parents = tuple(parents)
        else:
            self.k_basis = None
            self._index = None
            self.mono_parents = None

    def _enumerate_standard(self, up_to):
        """Standard monomials (not divisible by any generator), sorted by
        (degree, exponents); `up_to` bounds the total degree, None = all
        (artinian only)."""
        out = []
        frontier = [tuple([0] * self.num_vars)]
        seen = {frontier[0]}
        d = 0
        while frontier:
            out.extend(sorted(frontier))
            if up_to is not None and d >= up_to:
                break
            nxt = set()
            for u in frontier:
                for a in range(self.num_vars):
                    v = tuple(u[b] + (1 if b == a else 0) for b in range(self.num_vars))
                    if v in seen or v in nxt:
                        continue
                    if any(mono_divides(g, v) for g in self.gens):
                        continue
                    nxt.add(v)
            frontier = sorted(nxt)
            seen.update(nxt)
            d += 1
        return out

    def standard_monomials_up_to(self, d):
        return self._enumerate_standard(d)

    def is_standard(self, u) -> bool:
        return not any(mono_divides(g, u) for g in self.gens)

    def reduce_mono(self, u):
        """Normal form of a monomial: itself, or None if it lies in I."""
        return u if self.is_standard(u) else None

    @property
    def dim_k(self) -> int:
        if not self.artinian:
            raise NonArtinian("ring is infinite-dimensional over k")
        return len(self.k_basis)

    def mono_index(self, u) -> int:
        return self._index[u]

    def top_degree(self) -> int:
        if not self.artinian:
            raise NonArtinian("no top degree for a non-artinian ring")
        return max(mono_deg(u) for u in self.k_basis)

    def taylor_bound(self) -> int:
        """deg(lcm of all generators) + m: bounds the internal degrees of
        the Koszul homology of R."""
        lcm = tuple([0] * self.num_vars)
        for g in self.gens:
            lcm = mono_lcm(lcm, g)
        return mono_deg(lcm) + self.num_vars

    def zero(self) -> "PolyElement":
        return PolyElement(self, {})

    def one(self) -> "PolyElement":
        return PolyElement(self, {tuple([0] * self.num_vars): 1})

    def variable(self, a) -> "PolyElement":
        u = tuple(1 if b == a else 0 for b in range(self.num_vars))
        return PolyElement(self, {u: 1} if self.is_standard(u) else {})

    def element(self, terms) -> "PolyElement":
        return PolyElement(self, terms)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialQuotientRing)
            and self.p == other.p
            and self.num_vars == other.num_vars
            and self.gens == other.gens
        )

    def __hash__(self):
        return hash((self.p, self.num_vars, self.gens))

    def __repr__(self):
        gens = ", ".join(format_monomial(g, self.var_names) for g in self.gens)
        return f"F{self.p}[{', '.join(self.var_names)}]/({gens or '0'})"


def format_monomial(u, names) -> str:
    parts = []
    for a, e in enumerate(u):
        if e == 1:
            parts.append(names[a])
        elif e > 1:
            parts.append(f"{names[a]}^{e}")
    return "*".join(parts) if parts else "1"


class PolyElement:
    """An element of R in normal form: a map {standard monomial: coeff}."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        clean = {}
        for u, c in terms.items():
            c = int(c) % ring.p
            if c and ring.is_standard(u):
                clean[tuple(u)] = c
        self.terms = clean

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> int:
        return self.terms.get(tuple([0] * self.ring.num_vars), 0)

    def is_homogeneous(self):
        degs = {mono_deg(u) for u in self.terms}
        return len(degs) <= 1

    def degree(self):
        """Degree of a homogeneous element, None for 0."""
        degs = {mono_deg(u) for u in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise TorindError("inhomogeneous element")
        return degs.pop()

    def __add__(self, other):
        out = dict(self.terms)
        for u, c in other.terms.items():
            out[u] = (out.get(u, 0) + c) % self.ring.p
        return PolyElement(self.ring, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for u, c in other.terms.items():
            out[u] = (out.get(u, 0) - c) % self.ring.p
        return PolyElement(self.ring, out)

    def __neg__(self):
        return PolyElement(self.ring, {u: -c for u, c in self.terms.items()})

    def scale(self, c):
        return PolyElement(self.ring, {u: v * c for u, v in self.terms.items()})

    def __mul__(self, other):
        out = {}
        for u, c in self.terms.items():
            for v, d in other.terms.items():
                w = mono_mul(u, v)
                if self.ring.is_standard(w):
                    out[w] = (out.get(w, 0) + c * d) % self.ring.p
        return PolyElement(self.ring, out)

    def __eq__(self, other):
        return (
            isinstance(other, PolyElement)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for u in sorted(self.terms, key=lambda u: (mono_deg(u), u)):
            c = self.terms[u]
            s = format_monomial(u, self.ring.var_names)
            parts.append(s if c == 1 else f"{c}*{s}")
        return " + ".join(parts)


def make_ring(p, num_vars, gens, var_names=None) -> MonomialQuotientRing:
    """Validated ring; minimalizes generators, detects artinian-ness."""
    return MonomialQuotientRing(p, num_vars, gens, var_names)


# --- finitely generated modules in action form -------------------------------


class FGModule:
    """A finite-dimensional k-space with commuting variable actions.

    Validation checks pairwise commutativity and that X^alpha = 0 for
    every ideal generator x^alpha, which over an artinian ring also
    forces nilpotency of each action.
    """

    __slots__ = ("ring", "dim", "actions")

    def __init__(self, ring, actions, dim=None, validate=True):
        self.ring = ring
        self.actions = tuple(actions)
        if len(self.actions) != ring.num_vars:
            raise TorindError("one action matrix per variable is required")
        self.dim = self.actions[0].rows if self.actions else int(dim or 0)
        for X in self.actions:
            if X.rows != self.dim or X.cols != self.dim:
                raise TorindError("action matrices must be square of dim(M)")
        if validate:
            self._validate()

    def _validate(self):
        for a in range(len(self.actions)):
            for b in range(a + 1, len(self.actions)):
                if (self.actions[a] @ self.actions[b]) != (
                    self.actions[b] @ self.actions[a]
                ):
                    raise TorindError(f"actions of variables {a} and {b} do not commute")
        for g in self.ring.gens:
            if not self.apply_monomial_matrix(g).is_zero():
                raise TorindError(
                    f"relation {format_monomial(g, self.ring.var_names)} not satisfied"
                )

    @classmethod
    def zero_module(cls, ring):
        return cls(ring, [Matrix.zeros(0, 0, ring.p)] * ring.num_vars, dim=0,
                   validate=False)

    def apply_monomial_matrix(self, u) -> Matrix:
        M = Matrix.identity(self.dim, self.ring.p)
        for a, e in enumerate(u):
            for _ in range(e):
                M = self.actions[a] @ M
        return M

    def apply_poly_matrix(self, f: PolyElement) -> Matrix:
        out = Matrix.zeros(self.dim, self.dim, self.ring.p)
        for u, c in f.terms.items():
            out = out + self.apply_monomial_matrix(u).scale(c)
        return out

    def apply_monomial(self, u, v):
        for a, e in enumerate(u):
            for _ in range(e):
                v = self.actions[a].apply(v)
        return v

    def radical_span(self) -> Subspace:
        """m·M as a subspace of M."""
        if self.dim == 0:
            return Subspace.zero(0, self.ring.p)
        cols = hstack([X for X in self.actions]) if self.actions else None
        return cols.column_space() if cols else Subspace.zero(self.dim, self.ring.p)

    def min_gens(self):
        """Deterministic lifts of a basis of M/mM (coordinate vectors at
        non-pivot positions of m·M)."""
        q = quotient_basis(self.dim, self.radical_span())
        return [q.complement.basis.column(j) for j in range(q.dim)]

    def is_zero(self) -> bool:
        return self.dim == 0

    def __repr__(self):
        return f"FGModule(dim={self.dim} over {self.ring!r})"


def free_module(ring, rank) -> FGModule:
    """R^rank with k-basis (generator t, standard monomial u), indexed
    t*dim_k(R) + index(u)."""
    if not ring.artinian:
        raise NonArtinian("free modules in action form need an artinian ring")
    n = ring.dim_k
    acts = []
    for a in range(ring.num_vars):
        X = np.zeros((n, n), dtype=np.int64)
        for i, u in enumerate(ring.k_basis):
            v = mono_mul(u, tuple(1 if b == a else 0 for b in range(ring.num_vars)))
            if ring.is_standard(v):
                X[ring.mono_index(v), i] = 1
        acts.append(Matrix(X, ring.p))
    big = []
    for a in range(ring.num_vars):
        blocks = np.zeros((rank * n, rank * n), dtype=np.int64)
        for t in range(rank):
            blocks[t * n : (t + 1) * n, t * n : (t + 1) * n] = acts[a].a
        big.append(Matrix(blocks, ring.p))
    return FGModule(ring, big, dim=rank * n, validate=False)


def regular_module(ring) -> FGModule:
    return free_module(ring, 1)


def residue_field(ring) -> FGModule:
    z = Matrix.zeros(1, 1, ring.p)
    return FGModule(ring, [z] * ring.num_vars, dim=1, validate=False)


def free_vector_from_polys(ring, polys):
    """k-coordinates in R^rank of a vector of ring elements."""
    n = ring.dim_k
    out = np.zeros(len(polys) * n, dtype=np.int64)
    for t, f in enumerate(polys):
        for u, c in f.terms.items():
            out[t * n + ring.mono_index(u)] = c
    return out


def polys_from_free_vector(ring, rank, vec):
    """Inverse of `free_vector_from_polys`."""
    n = ring.dim_k
    out = []
    for t in range(rank):
        terms = {}
        for i, u in enumerate(ring.k_basis):
            c = int(vec[t * n + i]) % ring.p
            if c:
                terms[u] = c
        out.append(PolyElement(ring, terms))
    return out


def submodule_span(ambient: FGModule, vectors) -> Subspace:
    """R-span of the given vectors: closure of their k-span under the actions."""
    span = Subspace.spanned_by(list(vectors), ambient.dim, ambient.ring.p)
    while True:
        new = [span.basis.column(j) for j in range(span.dim)]
        for a in range(ambient.ring.num_vars):
            for j in range(span.dim):
                new.append(ambient.actions[a].apply(span.basis.column(j)))
        bigger = Subspace.spanned_by(new, ambient.dim, ambient.ring.p)
        if bigger.dim == span.dim:
            return span
        span = bigger


def quotient_module(ambient: FGModule, sub: Subspace):
    """M/W for an action-stable subspace W; returns (module, projection data)."""
    q = quotient_basis(ambient.dim, sub)
    acts = []
    for X in ambient.actions:
        acts.append(q.project_matrix(X @ q.complement.basis))
    mod = FGModule(ambient.ring, acts, dim=q.dim, validate=False)
    return mod, q


def tensor_modules(M: FGModule, N: FGModule) -> FGModule:
    """M ⊗_R N with the induced actions."""
    if M.ring != N.ring:
        raise TorindError("modules live over different rings")
    if not M.ring.artinian:
        raise NonArtinian("module tensor products need an artinian ring")
    ring = M.ring
    p = ring.p
    dim = M.dim * N.dim
    if dim == 0:
        return FGModule.zero_module(ring)
    eye_m = np.eye(M.dim, dtype=np.int64)
    eye_n = np.eye(N.dim, dtype=np.int64)
    rel_blocks = []
    for a in range(ring.num_vars):
        rel = np.kron(M.actions[a].a, eye_n) - np.kron(eye_m, N.actions[a].a)
        rel_blocks.append(Matrix(rel, p))
    W = hstack(rel_blocks).column_space() if rel_blocks else Subspace.zero(dim, p)
    q = quotient_basis(dim, W)
    acts = []
    for a in range(ring.num_vars):
        X = Matrix(np.kron(M.actions[a].a, eye_n), p)
        acts.append(q.project_matrix(X @ q.complement.basis))
    return FGModule(ring, acts, dim=q.dim, validate=False)


def tensor_many(modules) -> FGModule:
    out = modules[0]
    for M in modules[1:]:
        out = tensor_modules(out, M)
    return out


# --- Koszul complex and ring invariants --------------------------------------


class KoszulComplex:
    """Koszul complex on x_1..x_m over R, with the wedge-basis differential.

    maps[i] is the matrix of the differential K_i -> K_{i-1} with entries
    in R (rows/columns indexed by lexicographic subsets).
    """

    __slots__ = ("ring", "ranks", "maps", "subsets")

    def __init__(self, ring):
        m = ring.num_vars
        self.ring = ring
        self.subsets = [list(itertools.combinations(range(m), i)) for i in range(m + 1)]
        self.ranks = [len(s) for s in self.subsets]
        self.maps = [None]
        for i in range(1, m + 1):
            rows = {S: r for r, S in enumerate(self.subsets[i - 1])}
            mat = [
                [ring.zero() for _ in range(self.ranks[i])]
                for _ in range(self.ranks[i - 1])
            ]
            for c, S in enumerate(self.subsets[i]):
                for pos, a in enumerate(S):
                    T = tuple(b for b in S if b != a)
                    sign = (-1) ** pos
                    mat[rows[T]][c] = mat[rows[T]][c] + ring.variable(a).scale(sign)
            self.maps.append(mat)
        self._check_square_zero()

    def _check_square_zero(self):
        for i in range(2, len(self.maps)):
            prod = poly_matmul(self.ring, self.maps[i - 1], self.maps[i])
            for row in prod:
                for f in row:
                    if not f.is_zero():
                        raise TorindError("Koszul differential does not square to zero")

    @property
    def amplitude(self) -> int:
        return self.ring.num_vars


def poly_matmul(ring, A, B):
    rows, inner, cols = len(A), len(B), len(B[0]) if B else 0
    out = [[ring.zero() for _ in range(cols)] for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = ring.zero()
            for t in range(inner):
                acc = acc + A[i][t] * B[t][j]
            out[i][j] = acc
    return out


def koszul_complex(ring) -> KoszulComplex:
    return KoszulComplex(ring)


def koszul_homology(ring):
    """Per-degree dims of H(K), exact.

    Computed strand by strand in the internal grading; non-artinian rings
    are truncated at the Taylor bound, beyond which the homology of the
    Koszul complex vanishes.
    """
    m = ring.num_vars
    if m == 0:
        return [1]
    if ring.artinian:
        bound = ring.top_degree() + m
    else:
        bound = ring.taylor_bound()
    monos = {d: [] for d in range(bound + 1)}
    for u in ring.standard_monomials_up_to(bound):
        monos[mono_deg(u)].append(u)
    subsets = [list(itertools.combinations(range(m), i)) for i in range(m + 1)]
    sub_index = [{S: r for r, S in enumerate(ss)} for ss in subsets]
    dims = [0] * (m + 1)

    def strand_basis(i, d):
        out = []
        if i > m or d - i < 0 or d - i > bound:
            return out
        for S in subsets[i]:
            for u in monos[d - i]:
                out.append((u, S))
        return out

    def strand_map(i, d, src, dst):
        index = {b: r for r, b in enumerate(dst)}
        out = np.zeros((len(dst), len(src)), dtype=np.int64)
        for c, (u, S) in enumerate(src):
            for pos, a in enumerate(S):
                v = mono_mul(u, tuple(1 if b == a else 0 for b in range(m)))
                if not ring.is_standard(v):
                    continue
                T = tuple(b for b in S if b != a)
                out[index[(v, T)], c] = (-1) ** pos % ring.p
        return Matrix(out, ring.p)

    for d in range(bound + 1):
        bases = [strand_basis(i, d) for i in range(m + 2)]
        for i in range(m + 1):
            if not bases[i]:
                continue
            if i > 0 and bases[i - 1]:
                z = strand_map(i, d, bases[i], bases[i - 1]).kernel_basis().dim
            else:
                z = len(bases[i])
            r_next = 0
            if i + 1 <= m and bases[i + 1]:
                r_next = strand_map(i + 1, d, bases[i + 1], bases[i]).rank()
            dims[i] += z - r_next
    return dims


def depth_and_ecodepth(ring):
    """(depth, ecodepth) from Koszul homology vanishing.

    When depth = 0 the displayed equality chain amp(H(K)) = ecodepth(R) =
    amp(K) is asserted.
    """
    dims = koszul_homology(ring)
    m = ring.num_vars
    if dims[0] != 1:
        raise TorindError("H_0(K) is not the residue field (internal)")
    sup = max(i for i, h in enumerate(dims) if h)
    depth = m - sup
    ecodepth = sup
    if depth == 0:
        amp_h = sup - 0
        if not (amp_h == ecodepth == m):
            raise TorindError("depth-0 equality chain failed (internal)")
    return depth, ecodepth


# --- minimal free resolutions and Tor ----------------------------------------


@dataclass(frozen=True)
class BettiTable:
    """beta_i = dim_k Tor_i(M, k) for 0 <= i <= certified_to."""

    betti: tuple
    certified_to: int

    def __getitem__(self, i):
        return self.betti[i]

    def to_dict(self):
        return {"betti": list(self.betti), "certified_to": self.certified_to}


@dataclass
class Resolution:
    """A minimal free resolution F_0 <- F_1 <- ... up to a cutoff.

    `maps[i]` (i >= 1) is the beta_{i-1} x beta_i matrix over R of
    F_i -> F_{i-1}; every entry lies in m (checked). `terminated` is set
    when some syzygy vanished, certifying finite projective dimension.
    """

    ring: MonomialQuotientRing
    betti: list
    maps: list
    gens0: Matrix
    syzygies: list
    terminated: bool

    def betti_table(self) -> BettiTable:
        return BettiTable(tuple(self.betti), len(self.betti) - 1)

    def is_minimal(self) -> bool:
        for mat in self.maps[1:]:
            for row in mat:
                for f in row:
                    if f.constant_term():
                        return False
        return True


def _resolution_step(S: FGModule):
    """One syzygy step: minimal generators of S, the cover F -> S, and
    ker as an FGModule with its embedding into F."""
    ring = S.ring
    gens = S.min_gens()
    beta = len(gens)
    if beta == 0:
        return 0, None, None, None
    n = ring.dim_k
    phi = np.zeros((S.dim, beta * n), dtype=np.int64)
    for t, g in enumerate(gens):
        block = phi[:, t * n : (t + 1) * n]
        block[:, 0] = np.asarray(g, dtype=np.int64)
        for i in range(1, n):
            a, parent = ring.mono_parents[i]
            block[:, i] = S.actions[a].apply(block[:, parent])
    Phi = Matrix(phi, ring.p)
    ker = Phi.kernel_basis()
    F = free_module(ring, beta)
    acts = []
    for a in range(ring.num_vars):
        img = F.actions[a] @ ker.basis
        coords = ker.basis.solve_matrix(img)
        if coords is None:
            raise TorindError("syzygy not action-stable (internal)")
        acts.append(coords)
    Sy = FGModule(ring, acts, dim=ker.dim, validate=False)
    return beta, Matrix.from_columns(gens, S.dim, ring.p), Sy, ker.basis


def minimal_free_resolution(M: FGModule, D: int) -> Resolution:
    if not M.ring.artinian:
        raise NonArtinian("minimal free resolutions need an artinian ring")
    if D < 0:
        raise TorindError("cutoff must be nonnegative")
    ring = M.ring
    betti = []
    maps = [None]
    syzygies = []
    current = M
    prev_beta = None
    terminated = False
    for i in range(D + 1):
        beta, gen_mat, Sy, embed = _resolution_step(current)
        betti.append(beta)
        if i > 0:
            mat = []
            if beta:
                gcols = [gen_mat.column(j) for j in range(beta)]
                free_vecs = [embed_prev.apply(g) for g in gcols]
                mat = [
                    [None] * beta for _ in range(prev_beta)
                ]
                for j, v in enumerate(free_vecs):
                    polys = polys_from_free_vector(ring, prev_beta, v)
                    for t in range(prev_beta):
                        mat[t][j] = polys[t]
            maps.append(mat)
        else:
            gens0 = gen_mat if gen_mat is not None else Matrix.zeros(M.dim, 0, ring.p)
        if beta == 0:
            terminated = True
            betti.extend([0] * (D - i))
            maps.extend([[] for _ in range(D - i)])
            break
        syzygies.append(Sy)
        current = Sy
        prev_beta = beta
        embed_prev = embed
    res = Resolution(ring, betti, maps, gens0, syzygies, terminated)
    if not res.is_minimal():
        raise TorindError("resolution differential escapes the maximal ideal (internal)")
    return res


def betti_numbers(M: FGModule, D: int):
    return minimal_free_resolution(M, D).betti


def _complex_homology_dims(dims, mats, p):
    """H_i of a complex given by per-index dims and boundary matrices
    mats[i] : C_i -> C_{i-1} (None where either side is 0)."""
    n = len(dims)
    ranks = [0] * (n + 1)
    for i in range(1, n):
        if mats[i] is not None:
            ranks[i] = mats[i].rank()
    return [dims[i] - ranks[i] - ranks[i + 1] for i in range(n)]


def _tensor_complex_with(res: Resolution, N: FGModule, D: int):
    """H_i(F(M) ⊗_R N) for 0 <= i <= D; res must extend to D+1."""
    p = N.ring.p
    dims = [b * N.dim for b in res.betti[: D + 2]]
    mats = [None]
    for i in range(1, D + 2):
        if dims[i] == 0 or dims[i - 1] == 0:
            mats.append(None)
            continue
        rows = res.betti[i - 1]
        cols = res.betti[i]
        block = np.zeros((rows * N.dim, cols * N.dim), dtype=np.int64)
        for t in range(rows):
            for j in range(cols):
                entry = res.maps[i][t][j]
                if entry.is_zero():
                    continue
                block[
                    t * N.dim : (t + 1) * N.dim, j * N.dim : (j + 1) * N.dim
                ] = N.apply_poly_matrix(entry).a
        mats.append(Matrix(block, p))
    return _complex_homology_dims(dims, mats, p)[: D + 1]


def tor_dims(M: FGModule, N: FGModule, D: int, _res_cache=None):
    """dim Tor_i(M, N) for 0 <= i <= D, with the balance cross-check.

    Both H(F(M) ⊗ N) and H(M ⊗ F(N)) are computed; a mismatch raises
    BalanceMismatch (an internal bug trap, not an input error).
    """
    if M.ring != N.ring:
        raise TorindError("modules live over different rings")
    if not M.ring.artinian:
        raise NonArtinian("Tor needs an artinian ring")
    if D < 0:
        raise TorindError("cutoff must be nonnegative")

    def resolve(X):
        if _res_cache is not None:
            key = id(X)
            if key not in _res_cache:
                _res_cache[key] = minimal_free_resolution(X, D + 1)
            return _res_cache[key]
        return minimal_free_resolution(X, D + 1)

    via_m = _tensor_complex_with(resolve(M), N, D)
    via_n = _tensor_complex_with(resolve(N), M, D)
    if via_m != via_n:
        raise BalanceMismatch(f"{via_m} != {via_n}")
    return via_m


@dataclass
class SyzygyEmbedding:
    """First syzygy N' = ker(F_0 -> M) with its embedding into F_0."""

    module: FGModule
    free_rank: int
    embedding: Matrix  # dim F_0 x dim N'
    free: FGModule


def syzygy_module(M: FGModule) -> SyzygyEmbedding:
    if not M.ring.artinian:
        raise NonArtinian("syzygies in action form need an artinian ring")
    beta, _gens, Sy, embed = _resolution_step(M)
    if beta == 0:
        z = FGModule.zero_module(M.ring)
        return SyzygyEmbedding(z, 0, Matrix.zeros(0, 0, M.ring.p),
                               FGModule.zero_module(M.ring))
    return SyzygyEmbedding(Sy, beta, embed, free_module(M.ring, beta))


@dataclass
class IndependenceReport:
    """Outcome of the strong Tor-independence check."""

    passed: bool
    n: int
    certified_to: int
    witness: tuple  # (subset, j, i) of the first failure, or None
    flags: list

    def to_dict(self):
        return {
            "passed": self.passed,
            "n": self.n,
            "certified_to": self.certified_to,
            "witness": (
                None
                if self.witness is None
                else {
                    "subset": list(self.witness[0]),
                    "against": self.witness[1],
                    "tor_degree": self.witness[2],
                }
            ),
            "flags": list(self.flags),
        }


def check_strong_tor_independence(modules, D: int) -> IndependenceReport:
    """Verify Tor_i(⊗_{a∈S} N_a, N_j) = 0 for 1 <= i <= D, every nonempty
    S and every j outside S. Returns the first failing witness if any.

    Modules with certified-finite projective dimension (resolution
    terminating within the cutoff) are flagged: the bound of the main
    theorem is only meaningful for families without free members.
    """
    if not modules:
        raise TorindError("need at least one module")
    ring = modules[0].ring
    if not ring.artinian:
        raise NonArtinian("independence checking needs an artinian ring")
    for N in modules:
        if N.ring != ring:
            raise TorindError("modules live over different rings")
    n = len(modules)
    flags = []
    cache = {}
    for idx, N in enumerate(modules):
        if minimal_free_resolution(N, D).terminated:
            flags.append(f"module {idx} has finite projective dimension within D={D}")
    tensor_cache = {}

    def tensor_of(subset):
        if subset not in tensor_cache:
            tensor_cache[subset] = tensor_many([modules[a] for a in subset])
        return tensor_cache[subset]

    for t in range(1, n):
        for S in itertools.combinations(range(n), t):
            T = tensor_of(S)
            for j in range(n):
                if j in S:
                    continue
                dims = tor_dims(T, modules[j], D, _res_cache=cache)
                for i in range(1, D + 1):
                    if dims[i]:
                        return IndependenceReport(False, n, D, (S, j, i), flags)
    return IndependenceReport(True, n, D, None, flags)


# --- presentation-form modules and graded strand helpers ----------------------


class PresentedModule:
    """M = coker(P : R^c -> R^b) with P given by columns of R-elements.

    The reduction pipeline requires homogeneous columns; action form is
    recovered over artinian rings with `to_action_form`.
    """

    __slots__ = ("ring", "rank", "columns")

    def __init__(self, ring, rank, columns):
        self.ring = ring
        self.rank = rank
        for col in columns:
            if len(col) != rank:
                raise TorindError("presentation column length differs from rank")
        self.columns = [list(col) for col in columns]

    def is_homogeneous(self):
        for col in self.columns:
            degs = {f.degree() for f in col if not f.is_zero()}
            if len(degs) > 1:
                return False
        return True

    def column_degrees(self):
        out = []
        for col in self.columns:
            degs = {f.degree() for f in col if not f.is_zero()}
            if len(degs) > 1:
                raise TorindError("inhomogeneous presentation column")
            out.append(degs.pop() if degs else None)
        return out

    def minimalized(self) -> "PresentedModule":
        """Split off unit entries (degree-0 pivots) by column/row reduction.

        Requires homogeneity, so a unit entry is a scalar; the result
        presents the same module with a minimal generating set.
        """
        ring = self.ring
        p = ring.p
        cols = [list(c) for c in self.columns]
        rows = list(range(self.rank))
        changed = True
        while changed:
            changed = False
            for cj, col in enumerate(cols):
                piv = None
                for ri, t in enumerate(rows):
                    f = col[ri]
                    if not f.is_zero() and f.degree() == 0:
                        piv = ri
                        break
                if piv is None:
                    continue
                c = col[piv].constant_term()
                cinv = pow(c, p - 2, p)
                scaled = [f.scale(cinv) for f in col]
                new_cols = []
                for ck, other in enumerate(cols):
                    if ck == cj:
                        continue
                    factor = other[piv]
                    new_cols.append(
                        [g - factor * s for g, s in zip(other, scaled)]
                    )
                del rows[piv]
                cols = [
                    [col2[r] for r in range(len(col2)) if r != piv]
                    for col2 in new_cols
                ]
                changed = True
                break
        cols = [c for c in cols if any(not f.is_zero() for f in c)]
        out = PresentedModule(self.ring, len(rows), cols)
        return out

    def to_action_form(self) -> FGModule:
        ring = self.ring
        if not ring.artinian:
            raise NonArtinian("action form needs an artinian ring")
        F = free_module(ring, self.rank)
        vecs = [free_vector_from_polys(ring, col) for col in self.columns]
        W = submodule_span(F, vecs) if vecs else Subspace.zero(F.dim, ring.p)
        mod, _ = quotient_module(F, W)
        return mod


def strand_basis_of_free(ring, shifts, d):
    """k-basis of (⊕_t R(-shifts[t]))_d as (t, monomial) pairs."""
    out = []
    for t, s in enumerate(shifts):
        e = d - s
        if e < 0:
            continue
        for u in ring.standard_monomials_up_to(e):
            if mono_deg(u) == e:
                out.append((t, u))
    return out


def graded_vector_coords(ring, shifts, polys, d, basis_index):
    """Coordinates of a homogeneous vector of R-elements in the degree-d
    strand of ⊕_t R(-shifts[t])."""
    out = np.zeros(len(basis_index), dtype=np.int64)
    for t, f in enumerate(polys):
        for u, c in f.terms.items():
            key = (t, u)
            if key not in basis_index:
                raise TorindError("vector is not homogeneous of the expected degree")
            out[basis_index[key]] = c
    return out
