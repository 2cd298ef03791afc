"""Strict JSON document schemas ("torind/1") and report assembly.

Documents are research artifacts: unknown fields are rejected, every
omitted product/differential defaults to zero, and reports carry a
sha256 digest of the canonical input documents so verdicts are
auditable and reproducible.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .dgalgebra import DGAlgebra, validate_dg_algebra
from .dgmod import FiniteDGModule, SemifreeDGModule
from .errors import SchemaError
from .exactla import DEFAULT_PRIME, Matrix, is_prime
from .ringkit import (
    FGModule,
    MonomialQuotientRing,
    PolyElement,
    PresentedModule,
    make_ring,
)

SCHEMA_VERSION = "torind/1"


def _require_keys(doc, where, required, optional=()):
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected an object")
    keys = set(doc)
    missing = set(required) - keys
    if missing:
        raise SchemaError(f"{where}: missing fields {sorted(missing)}")
    unknown = keys - set(required) - set(optional)
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")


def _int(doc, where):
    if isinstance(doc, bool) or not isinstance(doc, int):
        raise SchemaError(f"{where}: expected an integer")
    return doc


def _prime_of(doc, where, default_p):
    p = doc.get("p", default_p)
    p = _int(p, f"{where}.p")
    if not is_prime(p):
        raise SchemaError(f"{where}.p: {p} is not prime")
    return p


# --- rings and modules ---------------------------------------------------------


def parse_ring(doc, default_p=DEFAULT_PRIME) -> MonomialQuotientRing:
    """{schema?, p?, vars, gens: [[exponents]]}; vars is a count or a
    list of names."""
    _require_keys(doc, "ring", ["vars", "gens"], ["p", "schema"])
    if doc.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"ring.schema: expected {SCHEMA_VERSION!r}")
    p = _prime_of(doc, "ring", default_p)
    vars_field = doc["vars"]
    if isinstance(vars_field, int) and not isinstance(vars_field, bool):
        m = vars_field
        names = None
    elif isinstance(vars_field, list) and all(isinstance(v, str) for v in vars_field):
        m = len(vars_field)
        names = tuple(vars_field)
    else:
        raise SchemaError("ring.vars: expected a count or a list of names")
    gens = doc["gens"]
    if not isinstance(gens, list):
        raise SchemaError("ring.gens: expected a list of exponent vectors")
    for g in gens:
        if not isinstance(g, list) or len(g) != m:
            raise SchemaError(f"ring.gens: bad exponent vector {g!r}")
        for e in g:
            if _int(e, "ring.gens entry") < 0:
                raise SchemaError("ring.gens: negative exponent")
    return make_ring(p, m, [tuple(g) for g in gens], names)


def ring_to_doc(ring) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "p": ring.p,
        "vars": list(ring.var_names),
        "gens": [list(g) for g in ring.gens],
    }


def parse_ring_element(doc, ring, where) -> PolyElement:
    """[[coeff, [exponents]], ...] summed in normal form."""
    if not isinstance(doc, list):
        raise SchemaError(f"{where}: expected a list of [coeff, exponents] terms")
    terms = {}
    for item in doc:
        if not (isinstance(item, list) and len(item) == 2):
            raise SchemaError(f"{where}: bad term {item!r}")
        c, u = item
        _int(c, f"{where} coefficient")
        if not (isinstance(u, list) and len(u) == ring.num_vars):
            raise SchemaError(f"{where}: bad exponent vector {u!r}")
        key = tuple(_int(e, f"{where} exponent") for e in u)
        terms[key] = (terms.get(key, 0) + c) % ring.p
    return PolyElement(ring, terms)


def ring_element_to_doc(f: PolyElement):
    out = []
    for u in sorted(f.terms, key=lambda u: (sum(u), u)):
        out.append([int(f.terms[u]), list(u)])
    return out


def parse_module(doc, ring, where="module"):
    """Either {actions: [matrix per variable]} or {presentation: matrix
    of ring elements} (rows of columns? a list of columns)."""
    _require_keys(doc, where, [], ["actions", "presentation", "name"])
    has_actions = "actions" in doc
    has_pres = "presentation" in doc
    if has_actions == has_pres:
        raise SchemaError(f"{where}: exactly one of actions/presentation")
    if has_actions:
        mats = doc["actions"]
        if not isinstance(mats, list) or len(mats) != ring.num_vars:
            raise SchemaError(f"{where}.actions: one matrix per variable")
        dims = set()
        for a, rows in enumerate(mats):
            if not isinstance(rows, list) or any(
                not isinstance(r, list) for r in rows
            ):
                raise SchemaError(f"{where}.actions[{a}]: expected a matrix")
            n = len(rows)
            for r in rows:
                if len(r) != n:
                    raise SchemaError(f"{where}.actions[{a}]: must be square")
                for x in r:
                    _int(x, f"{where}.actions[{a}] entry")
            dims.add(n)
        if len(dims) > 1:
            raise SchemaError(f"{where}.actions: inconsistent dimensions {dims}")
        n = dims.pop() if dims else 0
        if n == 0:
            return FGModule.zero_module(ring)
        actions = [Matrix(rows, ring.p) for rows in mats]
        return FGModule(ring, actions, dim=n, validate=True)
    pres = doc["presentation"]
    if not isinstance(pres, list):
        raise SchemaError(f"{where}.presentation: expected a list of columns")
    columns = []
    rank = None
    for j, col in enumerate(pres):
        if not isinstance(col, list):
            raise SchemaError(f"{where}.presentation[{j}]: expected a column")
        if rank is None:
            rank = len(col)
        elif len(col) != rank:
            raise SchemaError(f"{where}.presentation: ragged columns")
        columns.append(
            [parse_ring_element(e, ring, f"{where}.presentation[{j}]") for e in col]
        )
    if rank is None:
        raise SchemaError(f"{where}.presentation: empty presentation needs a rank")
    return PresentedModule(ring, rank, columns)


def parse_modules(doc, ring):
    _require_keys(doc, "modules", ["modules"], ["schema"])
    if doc.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"modules.schema: expected {SCHEMA_VERSION!r}")
    mods = doc["modules"]
    if not isinstance(mods, list):
        raise SchemaError("modules.modules: expected a list")
    return [parse_module(m, ring, f"modules[{i}]") for i, m in enumerate(mods)]


def module_to_doc(M: FGModule) -> dict:
    return {"actions": [X.a.tolist() for X in M.actions]}


def presented_module_to_doc(P: PresentedModule) -> dict:
    return {
        "presentation": [
            [ring_element_to_doc(f) for f in col] for col in P.columns
        ]
    }


# --- DG algebras and DG modules ---------------------------------------------------


def parse_dgalgebra(doc, default_p=DEFAULT_PRIME) -> DGAlgebra:
    """{p?, basis: [{label, degree}], unit, mult: [[i,j,[[k,c]]]],
    diff: [[j,[[i,d]]]]}; omitted products/differentials are zero."""
    _require_keys(
        doc, "dgalgebra", ["basis", "unit"], ["p", "mult", "diff", "schema", "name"]
    )
    if doc.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"dgalgebra.schema: expected {SCHEMA_VERSION!r}")
    p = _prime_of(doc, "dgalgebra", default_p)
    basis = doc["basis"]
    if not isinstance(basis, list) or not basis:
        raise SchemaError("dgalgebra.basis: expected a nonempty list")
    labels = []
    degrees = []
    for i, b in enumerate(basis):
        _require_keys(b, f"dgalgebra.basis[{i}]", ["label", "degree"])
        if not isinstance(b["label"], str):
            raise SchemaError(f"dgalgebra.basis[{i}].label: expected a string")
        labels.append(b["label"])
        degrees.append(_int(b["degree"], f"dgalgebra.basis[{i}].degree"))
    n = len(labels)
    unit = _int(doc["unit"], "dgalgebra.unit")
    if not (0 <= unit < n):
        raise SchemaError("dgalgebra.unit: index out of range")
    mult = {}
    for row in doc.get("mult", []):
        if not (isinstance(row, list) and len(row) == 3):
            raise SchemaError(f"dgalgebra.mult: bad row {row!r}")
        i, j, terms = row
        for k, c in _pairs(terms, "dgalgebra.mult terms"):
            _check_index(i, n, "dgalgebra.mult")
            _check_index(j, n, "dgalgebra.mult")
            _check_index(k, n, "dgalgebra.mult")
            mult[(i, j, k)] = c
    diff = {}
    for row in doc.get("diff", []):
        if not (isinstance(row, list) and len(row) == 2):
            raise SchemaError(f"dgalgebra.diff: bad row {row!r}")
        j, terms = row
        for i, d in _pairs(terms, "dgalgebra.diff terms"):
            _check_index(i, n, "dgalgebra.diff")
            _check_index(j, n, "dgalgebra.diff")
            diff[(i, j)] = d
    return validate_dg_algebra(p, labels, degrees, unit, mult, diff)


def _pairs(terms, where):
    if not isinstance(terms, list):
        raise SchemaError(f"{where}: expected a list of pairs")
    out = []
    for t in terms:
        if not (isinstance(t, list) and len(t) == 2):
            raise SchemaError(f"{where}: bad pair {t!r}")
        out.append((_int(t[0], where), _int(t[1], where)))
    return out


def _check_index(i, n, where):
    if not (0 <= _int(i, where) < n):
        raise SchemaError(f"{where}: index {i} out of range")


def dgalgebra_to_doc(A: DGAlgebra, name=None) -> dict:
    mult = []
    for i in range(A.dim):
        for j in range(A.dim):
            terms = [
                [int(k), int(A.mult[i, j, k])] for k in np.nonzero(A.mult[i, j])[0]
            ]
            if terms:
                mult.append([i, j, terms])
    diff = []
    for j in range(A.dim):
        col = A.diff.a[:, j]
        terms = [[int(i), int(col[i])] for i in np.nonzero(col)[0]]
        if terms:
            diff.append([j, terms])
    doc = {
        "schema": SCHEMA_VERSION,
        "p": A.p,
        "basis": [
            {"label": l, "degree": d} for l, d in zip(A.labels, A.degrees)
        ],
        "unit": A.unit,
        "mult": mult,
        "diff": diff,
    }
    if name is not None:
        doc["name"] = name
    return doc


def parse_semifree(doc, algebra, where="semifree") -> SemifreeDGModule:
    """{algebra_ref?, semibasis: [{label, degree}], diff: [[j, [[i,
    algebra_element]]]]} with algebra_element = [[basis_index, coeff]]."""
    _require_keys(doc, where, ["semibasis"], ["algebra_ref", "diff", "kind", "name"])
    semibasis = doc["semibasis"]
    if not isinstance(semibasis, list) or not semibasis:
        raise SchemaError(f"{where}.semibasis: expected a nonempty list")
    labels = []
    degrees = []
    for i, b in enumerate(semibasis):
        _require_keys(b, f"{where}.semibasis[{i}]", ["label", "degree"])
        labels.append(b["label"])
        degrees.append(_int(b["degree"], f"{where}.semibasis[{i}].degree"))
    t = len(labels)
    diff = np.zeros((t, t, algebra.dim), dtype=np.int64)
    for row in doc.get("diff", []):
        if not (isinstance(row, list) and len(row) == 2):
            raise SchemaError(f"{where}.diff: bad row {row!r}")
        j, entries = row
        _check_index(j, t, f"{where}.diff")
        if not isinstance(entries, list):
            raise SchemaError(f"{where}.diff[{j}]: expected a list")
        for ent in entries:
            if not (isinstance(ent, list) and len(ent) == 2):
                raise SchemaError(f"{where}.diff[{j}]: bad entry {ent!r}")
            i, elem = ent
            _check_index(i, t, f"{where}.diff")
            for k, c in _pairs(elem, f"{where}.diff[{j}][{i}]"):
                _check_index(k, algebra.dim, f"{where}.diff element")
                diff[i, j, k] = c
    return SemifreeDGModule(algebra, degrees, diff, labels, validate=True)


def semifree_to_doc(L: SemifreeDGModule, algebra_ref=None) -> dict:
    rows = []
    for j in range(L.rank):
        entries = []
        for i in range(L.rank):
            entry = L.diff[i, j]
            if entry.any():
                elem = [[int(k), int(entry[k])] for k in np.nonzero(entry)[0]]
                entries.append([i, elem])
        if entries:
            rows.append([j, entries])
    doc = {
        "kind": "semifree",
        "semibasis": [
            {"label": l, "degree": d} for l, d in zip(L.labels, L.degrees)
        ],
        "diff": rows,
    }
    if algebra_ref is not None:
        doc["algebra_ref"] = algebra_ref
    return doc


def parse_dgmodule(doc, algebra, where="dgmodule") -> FiniteDGModule:
    """Explicit per-degree tables: {lo, dims, diff: [matrix], action:
    [[g, [matrix]]]}; diff[k] maps degree lo+k to lo+k-1."""
    _require_keys(
        doc, where, ["lo", "dims"], ["diff", "action", "algebra_ref", "kind", "name"]
    )
    lo = _int(doc["lo"], f"{where}.lo")
    dims = [_int(d, f"{where}.dims") for d in doc["dims"]]
    nd = len(dims)
    p = algebra.p

    def matrix_at(rows_doc, r, c, where2):
        if rows_doc is None:
            return Matrix.zeros(r, c, p)
        if not isinstance(rows_doc, list) or len(rows_doc) != r:
            raise SchemaError(f"{where2}: expected {r} rows")
        for row in rows_doc:
            if not isinstance(row, list) or len(row) != c:
                raise SchemaError(f"{where2}: expected {c} columns")
        return Matrix(rows_doc, p) if r and c else Matrix.zeros(r, c, p)

    diff_doc = doc.get("diff", [None] * nd)
    if len(diff_doc) != nd:
        raise SchemaError(f"{where}.diff: expected {nd} matrices")
    diff = []
    for k in range(nd):
        rows = dims[k - 1] if k else 0
        diff.append(matrix_at(diff_doc[k], rows, dims[k], f"{where}.diff[{k}]"))
    act = {g: None for g in range(algebra.dim)}
    action_doc = doc.get("action", [])
    for row in action_doc:
        if not (isinstance(row, list) and len(row) == 2):
            raise SchemaError(f"{where}.action: bad row {row!r}")
        g, mats = row
        _check_index(g, algebra.dim, f"{where}.action")
        if not isinstance(mats, list) or len(mats) != nd:
            raise SchemaError(f"{where}.action[{g}]: expected {nd} matrices")
        gd = algebra.degrees[g]
        out = []
        for k in range(nd):
            tk = k + gd
            rows = dims[tk] if 0 <= tk < nd else 0
            out.append(matrix_at(mats[k], rows, dims[k], f"{where}.action[{g}][{k}]"))
        act[g] = out
    for g in range(algebra.dim):
        if act[g] is None:
            gd = algebra.degrees[g]
            if g == algebra.unit:
                act[g] = [
                    Matrix.identity(dims[k], p) if dims[k] else Matrix.zeros(0, 0, p)
                    for k in range(nd)
                ]
            else:
                act[g] = [
                    Matrix.zeros(dims[k + gd] if 0 <= k + gd < nd else 0, dims[k], p)
                    for k in range(nd)
                ]
    return FiniteDGModule(algebra, lo, dims, diff, act, validate=True)


def dgmodule_to_doc(X: FiniteDGModule, algebra_ref=None) -> dict:
    nd = len(X.dims)
    doc = {
        "kind": "dgmodule",
        "lo": X.lo,
        "dims": list(X.dims),
        "diff": [X.diff_at(X.lo + k).a.tolist() for k in range(nd)],
        "action": [
            [g, [X.act_at(g, X.lo + k).a.tolist() for k in range(nd)]]
            for g in range(X.algebra.dim)
        ],
    }
    if algebra_ref is not None:
        doc["algebra_ref"] = algebra_ref
    return doc


def parse_dg_modules(doc, algebra):
    """{modules: [semifree-or-dgmodule docs]}; each entry picks its shape
    via the `kind` field (default semifree)."""
    _require_keys(doc, "dg modules", ["modules"], ["schema"])
    out = []
    for i, m in enumerate(doc["modules"]):
        if not isinstance(m, dict):
            raise SchemaError(f"modules[{i}]: expected an object")
        kind = m.get("kind", "semifree")
        if kind == "semifree":
            out.append(parse_semifree(m, algebra, f"modules[{i}]"))
        elif kind == "dgmodule":
            out.append(parse_dgmodule(m, algebra, f"modules[{i}]"))
        else:
            raise SchemaError(f"modules[{i}].kind: unknown kind {kind!r}")
    return out


# --- digests and reports -----------------------------------------------------------


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def inputs_digest(docs) -> str:
    h = hashlib.sha256()
    for doc in docs:
        h.update(canonical_json(doc).encode())
        h.update(b"\x00")
    return h.hexdigest()
