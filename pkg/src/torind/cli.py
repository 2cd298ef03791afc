"""Batch front end: parse documents, dispatch one computation, emit a report.

Exit codes: 0 = verified/pass, 1 = falsified precondition or failed
assertion (the report carries a witness), 2 = input error. Reports are
deterministic given (inputs, cutoff, seed); wall-clock timings live in
an isolated "timings" block so the rest of the JSON is byte-comparable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import dgmod, schemas, theorem
from .dgalgebra import augmentation_power, homology_dims
from .errors import SchemaError, TorindError
from .exactla import DEFAULT_PRIME, is_prime
from .ringkit import (
    PresentedModule,
    check_strong_tor_independence,
    depth_and_ecodepth,
    koszul_homology,
    minimal_free_resolution,
    tor_dims,
)

DEFAULT_CUTOFF = 10


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    return obj


def _load_doc(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"{path}: no such file")
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}:{e.lineno}:{e.colno}: malformed JSON ({e.msg})")


def _threads_cap():
    raw = os.environ.get("TORIND_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise SchemaError(f"TORIND_THREADS: expected an integer, got {raw!r}")
    if cap < 1:
        raise SchemaError("TORIND_THREADS: must be >= 1")
    return cap  # execution is sequential; a cap of 1 is always honored


def _module_to_action(mod, ring, where):
    if isinstance(mod, PresentedModule):
        return mod.to_action_form()
    return mod


def cmd_ring_info(args, docs):
    ring = schemas.parse_ring(docs[0], args.char)
    dims = koszul_homology(ring)
    depth, ecodepth = depth_and_ecodepth(ring)
    return True, [], [], {
        "ring": repr(ring),
        "artinian": ring.artinian,
        "k_dimension": ring.dim_k if ring.artinian else None,
        "koszul_homology": dims,
        "depth": depth,
        "ecodepth": ecodepth,
    }


def cmd_resolve(args, docs):
    ring = schemas.parse_ring(docs[0], args.char)
    modules = schemas.parse_modules(docs[1], ring)
    out = []
    for i, mod in enumerate(modules):
        M = _module_to_action(mod, ring, f"modules[{i}]")
        res = minimal_free_resolution(M, args.cutoff)
        out.append(
            {
                "module": i,
                "dim": M.dim,
                "betti": res.betti,
                "terminated": res.terminated,
                "minimal": res.is_minimal(),
            }
        )
    return True, [], [], {"resolutions": out, "cutoff": args.cutoff}


def cmd_tor(args, docs):
    ring = schemas.parse_ring(docs[0], args.char)
    modules = schemas.parse_modules(docs[1], ring)
    if len(modules) != 2:
        raise SchemaError("tor: exactly two modules are required")
    M = _module_to_action(modules[0], ring, "modules[0]")
    N = _module_to_action(modules[1], ring, "modules[1]")
    dims = tor_dims(M, N, args.cutoff)
    return True, [], [], {"tor_dims": dims, "cutoff": args.cutoff}


def cmd_independence(args, docs):
    ring = schemas.parse_ring(docs[0], args.char)
    modules = schemas.parse_modules(docs[1], ring)
    action = [
        _module_to_action(m, ring, f"modules[{i}]") for i, m in enumerate(modules)
    ]
    rep = check_strong_tor_independence(action, args.cutoff)
    witnesses = []
    if rep.witness is not None:
        witnesses.append(
            {
                "subset": list(rep.witness[0]),
                "against": rep.witness[1],
                "tor_degree": rep.witness[2],
            }
        )
    return rep.passed, witnesses, list(rep.flags), {"independence": rep.to_dict()}


def cmd_dg_check(args, docs):
    A = schemas.parse_dgalgebra(docs[0], args.char)
    hd = homology_dims(A)
    result = {
        "dim": A.dim,
        "top_degree": A.top,
        "homology_dims": {str(d): v for d, v in sorted(hd.items())},
        "s": (max(hd) - min(hd)) if hd else None,
        "augmentation_powers": [
            augmentation_power(A, q).dim for q in range(A.top + 2)
        ],
    }
    if len(docs) > 1:
        mods = schemas.parse_dg_modules(docs[1], A)
        profiles = []
        for i, K in enumerate(mods):
            prof = dgmod.homology_profile(K)
            profiles.append({"module": i, "profile": prof.to_dict()})
        result["profiles"] = profiles
    return True, [], [], result


def cmd_syzygy(args, docs):
    A = schemas.parse_dgalgebra(docs[0], args.char)
    mods = schemas.parse_dg_modules(docs[1], A)
    if len(mods) != 1:
        raise SchemaError("syzygy: exactly one module is required")
    K = mods[0]
    if isinstance(K, dgmod.SemifreeDGModule):
        K = dgmod.expand(K)
    prof = dgmod.homology_profile(K)
    r = args.syzygy_degree
    if r is None:
        if prof.is_zero:
            raise SchemaError("syzygy: module has zero homology")
        r = prof.sup
    pkg = theorem.syzygy_construction(K, r)
    bounds = theorem.verify_syzygy_bounds(pkg)
    ok = all(pkg.checks.values()) and bounds["passed"]
    return ok, [], [], {
        "r": r,
        "semibasis_degrees": list(pkg.L.degrees),
        "syzygy_dims": {
            str(d): pkg.syz.dim_at(d) for d in pkg.syz.degree_range()
            if pkg.syz.dim_at(d)
        },
        "construction_checks": pkg.checks,
        "bounds": bounds,
    }


def cmd_verify_dg(args, docs):
    A = schemas.parse_dgalgebra(docs[0], args.char)
    mods = schemas.parse_dg_modules(docs[1], A)
    finite = [
        dgmod.expand(K) if isinstance(K, dgmod.SemifreeDGModule) else K
        for K in mods
    ]
    rep = theorem.verify_dg_theorem(finite, args.cutoff)
    return rep.verdict, rep.witnesses, rep.flags, rep.to_dict()


def cmd_verify(args, docs):
    ring = schemas.parse_ring(docs[0], args.char)
    modules = schemas.parse_modules(docs[1], ring)
    depth, _ = depth_and_ecodepth(ring)
    if depth == 0 and ring.artinian:
        modules = [
            _module_to_action(m, ring, f"modules[{i}]")
            for i, m in enumerate(modules)
        ]
    rep = theorem.verify_module_theorem(ring, modules, args.cutoff)
    return rep.verdict, rep.witnesses, rep.flags, rep.to_dict()


def cmd_reduce(args, docs):
    ring = schemas.parse_ring(docs[0], args.char)
    modules = schemas.parse_modules(docs[1], ring)
    presentations = []
    for i, m in enumerate(modules):
        if not isinstance(m, PresentedModule):
            raise SchemaError(
                f"modules[{i}]: reduce needs presentation-form modules"
            )
        presentations.append(m)
    rbar, reduced, rep = theorem.regular_element_reduction(
        ring, presentations, args.variable, args.cutoff
    )
    outputs = {"ring": schemas.ring_to_doc(rbar), "modules": []}
    for M in reduced:
        if isinstance(M, PresentedModule):
            outputs["modules"].append(schemas.presented_module_to_doc(M))
        else:
            outputs["modules"].append(schemas.module_to_doc(M))
    ok = rep["depth_drops_by_one"] and rep["ecodepth_preserved"]
    if rep["independence_passed"] is False:
        ok = False
    return ok, [], rep.get("flags", []), {"reduction": rep, "outputs": outputs}


def cmd_search(args, docs):
    ring = schemas.parse_ring(docs[0], args.char)
    rep = theorem.search_independent_families(
        ring,
        args.dim_bound,
        args.n_target,
        args.cutoff,
        args.seed,
        candidates=args.candidates,
    )
    return True, [], [], {"search": rep}


COMMANDS = {
    "ring-info": (cmd_ring_info, 1, "depth/ecodepth/Koszul homology of a ring"),
    "resolve": (cmd_resolve, 2, "minimal free resolutions and Betti tables"),
    "tor": (cmd_tor, 2, "Tor dimensions of a pair of modules"),
    "independence": (cmd_independence, 2, "strong Tor-independence checker"),
    "dg-check": (cmd_dg_check, (1, 2), "DG algebra axioms and homology profiles"),
    "syzygy": (cmd_syzygy, 2, "DG syzygy construction package"),
    "verify-dg": (cmd_verify_dg, 2, "DG bound: m_A^n != 0 and n <= s"),
    "verify": (cmd_verify, 2, "module bound: n <= ecodepth(R)"),
    "reduce": (cmd_reduce, 2, "one regular-element reduction step"),
    "search": (cmd_search, 1, "seeded search for independent families"),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="torind",
        description="exact Tor-independence and DG syzygy toolkit over F_p",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_fn, nargs, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        if isinstance(nargs, tuple):
            sp.add_argument("inputs", nargs="+", help="input JSON documents")
        else:
            sp.add_argument("inputs", nargs=nargs, help="input JSON documents")
        sp.add_argument("--char", type=int, default=DEFAULT_PRIME,
                        help="field characteristic (prime, default 32003)")
        sp.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF,
                        help="certification cutoff D (default 10)")
        sp.add_argument("--seed", type=int, default=0, help="RNG seed (u64)")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", default=None, help="write the report to a file")
        if name == "reduce":
            sp.add_argument("--variable", type=int, required=True,
                            help="index of the regular variable to kill")
        if name == "syzygy":
            sp.add_argument("--syzygy-degree", type=int, default=None,
                            help="truncation degree r (default sup H(K))")
        if name == "search":
            sp.add_argument("--dim-bound", type=int, required=True)
            sp.add_argument("--n-target", type=int, required=True)
            sp.add_argument("--candidates", type=int, default=10000)
    return parser


def _render_text(report):
    lines = [
        f"torind {report['command']} ({report['schema']})",
        f"p = {report['p']}  cutoff = {report['cutoff']}  seed = {report['seed']}",
        f"inputs = {report['inputs_digest']}",
        f"verdict: {'PASS' if report['verdict'] else 'FAIL'}",
    ]
    for w in report["witnesses"]:
        lines.append(f"witness: {json.dumps(_jsonify(w), sort_keys=True)}")
    for f in report["flags"]:
        lines.append(f"flag: {f}")
    lines.append("result:")
    lines.append(json.dumps(report["result"], indent=2, sort_keys=True))
    lines.append(f"elapsed: {report['timings']['total_s']:.3f}s")
    return "\n".join(lines) + "\n"


def _emit(report, args):
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = _render_text(report)
    if args.out:
        tmp = args.out + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, args.out)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        cap = _threads_cap()
        if args.char is not None and not is_prime(args.char):
            raise SchemaError(f"--char {args.char} is not prime")
        if args.cutoff < 1:
            raise SchemaError("--cutoff must be >= 1")
        if args.seed < 0:
            raise SchemaError("--seed must be a nonnegative integer")
        fn, nargs, _help = COMMANDS[args.command]
        expected = nargs if isinstance(nargs, tuple) else (nargs,)
        if len(args.inputs) not in expected:
            raise SchemaError(
                f"{args.command}: expected {expected} input documents,"
                f" got {len(args.inputs)}"
            )
        docs = [_load_doc(path) for path in args.inputs]
        digest = schemas.inputs_digest(docs)
    except SchemaError as e:
        sys.stderr.write(f"input error: {e}\n")
        return 2

    verdict = False
    witnesses = []
    flags = []
    result = {}
    try:
        verdict, witnesses, flags, result = fn(args, docs)
    except SchemaError as e:
        sys.stderr.write(f"input error: {e}\n")
        return 2
    except TorindError as e:
        witnesses = [f"{type(e).__name__}: {e}"]
        flags = []
        result = {"error": type(e).__name__}
        verdict = False

    report = {
        "schema": schemas.SCHEMA_VERSION,
        "command": args.command,
        "p": args.char,
        "cutoff": args.cutoff,
        "seed": args.seed,
        "threads_cap": cap,
        "inputs_digest": digest,
        "verdict": bool(verdict),
        "witnesses": _jsonify(witnesses),
        "flags": _jsonify(flags),
        "result": _jsonify(result),
        "timings": {"total_s": time.monotonic() - started},
    }
    _emit(report, args)
    return 0 if report["verdict"] else 1


if __name__ == "__main__":
    sys.exit(main())
