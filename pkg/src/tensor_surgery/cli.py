"""Command-line interface.

Four subcommand groups: ``tensor`` (build/flatten graph tensors), ``decomp``
(builders, verification, products, transforms, file import/export),
``surgery`` (the splitting pipelines) and ``bounds`` (formula evaluation and
tables).  All output is deterministic: the same invocation always produces
byte-identical output.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from .bounds import ExponentParams, format_value
from .decomp import (
    Decomposition,
    decomp_product,
    export_decomposition,
    import_decomposition,
    local_rank_profile,
    reflect,
    rotate_legs,
    strassen,
    trivial_decomposition,
    verify,
)
from .exact import SignatureMismatchError, flatten, matrix_rank
from .graphs import SchemaError, cycle, graph_tensor, max_cut, parse_graph_spec
from .surgery import (
    PatchLibrary,
    SurgeryPlan,
    c5_dim4_decomposition,
    default_library,
    odd_cycle_decomposition,
    split_and_insert,
    surgery_map,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2


def thread_cap() -> int:
    """Parallelism cap from TENSOR_SURGERY_THREADS (0 = auto).

    The arithmetic here is exact and schedule-independent; the current
    implementation runs sequentially whatever the cap, but the variable is
    validated so misconfiguration fails loudly.
    """
    raw = os.environ.get("TENSOR_SURGERY_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise SchemaError(f"TENSOR_SURGERY_THREADS must be an integer, got {raw!r}")
    if cap < 0:
        raise SchemaError(f"TENSOR_SURGERY_THREADS must be >= 0, got {cap}")
    return cap


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x != "")
    except ValueError:
        raise SchemaError(f"{what} must be a comma-separated list of integers, got {text!r}")


# ---------------------------------------------------------------------------
# tensor group
# ---------------------------------------------------------------------------


def cmd_tensor_build(args) -> int:
    h = parse_graph_spec(args.graph, args.n)
    t = graph_tensor(h)
    print(f"graph: {args.graph} ({h.num_vertices} vertices, {len(h.edges)} edges)")
    print(f"legs: {len(t.legs)}")
    for i, leg in enumerate(t.legs):
        print(f"  leg {i}: dim {leg.dim}, split {list(leg.split) if leg.split else []}")
    print(f"nonzero entries: {t.nnz}")
    if args.show_entries:
        for idx in sorted(t.entries):
            print(f"  {list(idx)} -> {t.entries[idx]}")
    return EXIT_OK


def cmd_tensor_flatten(args) -> int:
    h = parse_graph_spec(args.graph, args.n)
    if args.side is not None:
        side = _parse_ints(args.side, "--side")
        cut = None
    else:
        cut = max_cut(h)
        side = cut.side0
    t = graph_tensor(h)
    m = flatten(t, side)
    rank = matrix_rank(m)
    if cut is not None:
        print(f"max cut: sides {list(cut.side0)} | {list(cut.side1)}, "
              f"{len(cut.straddling)} straddling edges, value {cut.value}")
    print(f"flattening: {m.rows} x {m.cols}, nnz {len(m.entries)}")
    print(f"rank: {rank}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# decomp group
# ---------------------------------------------------------------------------


def _emit_decomposition(d: Decomposition, out: str | None, cycle_weights=None) -> None:
    if out:
        export_decomposition(d, out, cycle_weights)
        print(f"wrote {len(d.terms)} terms to {out}")
    else:
        print(f"{len(d.terms)} terms over dims {list(d.dims)}")
        print(f"provenance: {d.provenance}")


def cmd_decomp_strassen(args) -> int:
    d = strassen()
    print("7 terms, VERIFIED against T_2(C_3)")
    _emit_decomposition(d, args.out, cycle_weights=(2, 2, 2))
    return EXIT_OK


def cmd_decomp_trivial(args) -> int:
    h = parse_graph_spec(args.graph, args.n)
    d = trivial_decomposition(h)
    _emit_decomposition(d, args.out)
    return EXIT_OK


def cmd_decomp_verify(args) -> int:
    d, _ = import_decomposition(args.file)
    target = graph_tensor(parse_graph_spec(args.graph, args.n))
    report = verify(d, target)
    if report.equal:
        print(f"{report.term_count} terms, VERIFIED against {args.graph}")
        return EXIT_OK
    print(f"{report.term_count} terms, MISMATCH against {args.graph}: "
          f"first discrepant index {list(report.first_discrepant_index)}")
    return EXIT_VERIFY


def cmd_decomp_export(args) -> int:
    d, weights = import_decomposition(args.file)
    export_decomposition(d, args.out, weights)
    print(f"re-exported {len(d.terms)} terms to {args.out}")
    return EXIT_OK


def cmd_decomp_import(args) -> int:
    d, weights = import_decomposition(args.file)
    print(f"{len(d.terms)} terms over dims {list(d.dims)} (schema valid; unverified)")
    if weights:
        print(f"cycle weights header: {list(weights)}")
    if d.provenance:
        print(f"provenance: {d.provenance}")
    return EXIT_OK


def cmd_decomp_product(args) -> int:
    d1, _ = import_decomposition(args.file1)
    d2, _ = import_decomposition(args.file2)
    d = decomp_product(d1, d2)
    _emit_decomposition(d, args.out)
    return EXIT_OK


def cmd_decomp_transform(args) -> int:
    d, weights = import_decomposition(args.file)
    if args.rotate is not None:
        d = rotate_legs(d, args.rotate)
    if args.reflect:
        d = reflect(d)
    _emit_decomposition(d, args.out)
    return EXIT_OK


def cmd_decomp_local_ranks(args) -> int:
    d, _ = import_decomposition(args.file)
    a, b = _parse_ints(args.split, "--split")
    profile = local_rank_profile(d, args.leg, (a, b))
    print(f"local ranks at leg {args.leg} with split ({a}, {b}):")
    for r, n in profile.histogram.items():
        print(f"  rank {r}: {n} terms")
    total = sum(r * n for r, n in profile.histogram.items())
    print(f"sum of local ranks: {total}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# surgery group
# ---------------------------------------------------------------------------


def _library_with_patches(paths) -> PatchLibrary:
    lib = default_library()
    for path in paths or ():
        d, weights = import_decomposition(path)
        if weights is None:
            raise SchemaError(f"{path}: patch files need a 'cycle_weights' header")
        lib.register_graph(weights, d)
        print(f"registered verified patch {list(weights)} with {len(d.terms)} terms")
    return lib


def cmd_surgery_run(args) -> int:
    d, _ = import_decomposition(args.input)
    plan = SurgeryPlan(args.leg, tuple(_parse_ints(args.split, "--split")), _parse_ints(args.path, "--path") if args.path else ())
    lib = _library_with_patches(args.patch)
    if args.seed_check:
        if not args.target:
            raise SchemaError("--seed-check needs --target GRAPH to verify the input against")
        target = graph_tensor(parse_graph_spec(args.target))
        report = verify(d, target)
        if not report.equal:
            print(f"seed check FAILED: first discrepant index {list(report.first_discrepant_index)}")
            return EXIT_VERIFY
        print(f"seed check passed: {report.term_count} terms match {args.target}")
    out = split_and_insert(d, plan, lib)
    if args.verify:
        from .decomp import reconstruct

        image = surgery_map(reconstruct(d), plan)
        report = verify(out, image)
        if not report.equal:
            print(f"{len(out.terms)} terms, MISMATCH against surgery image: "
                  f"first discrepant index {list(report.first_discrepant_index)}")
            return EXIT_VERIFY
        print(f"{len(out.terms)} terms, VERIFIED against the surgery image of the input")
    _emit_decomposition(out, args.out)
    return EXIT_OK


def cmd_surgery_odd_cycle(args) -> int:
    lib = _library_with_patches(args.patch)
    d = odd_cycle_decomposition(args.k, lib)
    if args.verify:
        target = graph_tensor(cycle(args.k))
        report = verify(d, target)
        if not report.equal:
            print(f"{len(d.terms)} terms, MISMATCH against T_2(C_{args.k}): "
                  f"first discrepant index {list(report.first_discrepant_index)}")
            return EXIT_VERIFY
        print(f"{len(d.terms)} terms, VERIFIED against T_2(C_{args.k})")
        profile = local_rank_profile(d, 1, (2, 2))
        print(f"local ranks at leg 1: {profile.histogram}")
    else:
        print(f"{len(d.terms)} terms (2^{args.k} - 1 = {2**args.k - 1})")
    print(f"rank bound: rank(T_2(C_{args.k})) <= {len(d.terms)}")
    if args.out:
        export_decomposition(d, args.out)
        print(f"wrote {len(d.terms)} terms to {args.out}")
    return EXIT_OK


def cmd_surgery_c5_dim4(args) -> int:
    lib = default_library()
    if args.patch442:
        d442, weights = import_decomposition(args.patch442)
        if weights is None:
            raise SchemaError(f"{args.patch442}: patch files need a 'cycle_weights' header")
        lib.register_graph(weights, d442)
        print(f"registered verified patch {list(weights)} with {len(d442.terms)} terms")
    d = c5_dim4_decomposition(lib)
    if args.verify:
        target = graph_tensor(cycle(5, 4))
        report = verify(d, target)
        if not report.equal:
            print(f"{len(d.terms)} terms, MISMATCH against T_4(C_5): "
                  f"first discrepant index {list(report.first_discrepant_index)}")
            return EXIT_VERIFY
        print(f"{len(d.terms)} terms, VERIFIED against T_4(C_5)")
    else:
        print(f"{len(d.terms)} terms")
    for record in bounds_mod.c5_dim4_component_bounds():
        print(f"component-cost bound: {record.quantity}(T_4(C_5)) <= {record.value}  [{record.trace}]")
    if args.out:
        export_decomposition(d, args.out)
        print(f"wrote {len(d.terms)} terms to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds group
# ---------------------------------------------------------------------------


def _params(args) -> ExponentParams:
    return ExponentParams(omega=args.omega, alpha=args.alpha)


def cmd_bounds_table(args) -> int:
    rows = bounds_mod.best_known_table(_params(args), args.kmax)
    if args.format == "csv":
        print("k,lower,upper,upper_source,citation")
        for r in rows:
            print(f"{r.k},{r.lower},{format_value(r.upper)},{r.source},\"{r.citation}\"")
    else:
        print(f"{'k':>3}  {'lower':>6}  {'upper':>11}  source")
        for r in rows:
            print(f"{r.k:>3}  {r.lower:>6}  {format_value(r.upper):>11}  {r.source}")
    return EXIT_OK


def cmd_bounds_flattening(args) -> int:
    h = parse_graph_spec(args.graph, args.n)
    record = bounds_mod.flattening_lower(h, subject=args.graph)
    print(f"rank({args.graph}) >= {record.value}")
    print(f"  {record.trace}")
    if args.check:
        ok = bounds_mod.flattening_cross_check(h)
        print(f"  elimination cross-check: {'rank matches cut value' if ok else 'MISMATCH'}")
        if not ok:
            return EXIT_VERIFY
    return EXIT_OK


def cmd_bounds_dome(args) -> int:
    records = bounds_mod.dome_and_hypergraph_bounds(_params(args), cross_check=not args.no_check)
    for r in records:
        print(f"{r.subject:18s} {r.direction:5s} {r.value_str():>11}  [{r.trace}]")
    return EXIT_OK


def cmd_bounds_cycle_lower(args) -> int:
    for r in bounds_mod.cycle_rank_lower(args.k):
        print(f"{r.quantity:11s} {r.direction} >= {r.value}  [{r.trace}; {r.citation}]")
    return EXIT_OK


def cmd_bounds_covering(args) -> int:
    for r in bounds_mod.covering_distill_c5(_params(args)):
        print(f"{r.subject} {r.direction} {r.value_str()}  [{r.trace}]")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensor-surgery",
        description="Exact graph tensors, rank decompositions, leg surgery, and bound tables.",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    def add_omega_alpha(p):
        p.add_argument("--omega", type=float, default=bounds_mod.DEFAULT_OMEGA,
                       help="matrix multiplication exponent upper bound")
        p.add_argument("--alpha", type=float, default=bounds_mod.DEFAULT_ALPHA,
                       help="dual exponent lower bound")

    tensor = groups.add_parser("tensor", help="build and flatten graph tensors").add_subparsers(
        dest="command", required=True)
    p = tensor.add_parser("build", help="build a graph tensor and print its shape")
    p.add_argument("--graph", required=True, help="builder spec (cycle:5, dome:1,4, ...) or file path")
    p.add_argument("--n", type=int, default=None, help="uniform edge dimension override")
    p.add_argument("--show-entries", action="store_true")
    p.set_defaults(func=cmd_tensor_build)
    p = tensor.add_parser("flatten", help="flatten along a bipartition and compute the exact rank")
    p.add_argument("--graph", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--side", default=None, help="comma-separated leg positions (default: max cut)")
    p.set_defaults(func=cmd_tensor_flatten)

    decomp = groups.add_parser("decomp", help="rank decompositions").add_subparsers(
        dest="command", required=True)
    p = decomp.add_parser("strassen", help="the built-in seven-term 2x2 multiplication decomposition")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decomp_strassen)
    p = decomp.add_parser("trivial", help="defining basis expansion of a graph tensor")
    p.add_argument("--graph", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decomp_trivial)
    p = decomp.add_parser("verify", help="verify a decomposition file against a graph tensor")
    p.add_argument("--file", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_decomp_verify)
    p = decomp.add_parser("export", help="canonically re-export a decomposition file")
    p.add_argument("--file", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decomp_export)
    p = decomp.add_parser("import", help="parse and validate a decomposition file")
    p.add_argument("--file", required=True)
    p.set_defaults(func=cmd_decomp_import)
    p = decomp.add_parser("product", help="leg-pairwise product of two decompositions")
    p.add_argument("--file1", required=True)
    p.add_argument("--file2", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decomp_product)
    p = decomp.add_parser("transform", help="rotate legs and/or reflect a cycle decomposition")
    p.add_argument("--file", required=True)
    p.add_argument("--rotate", type=int, default=None)
    p.add_argument("--reflect", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decomp_transform)
    p = decomp.add_parser("local-ranks", help="per-term rank histogram of one leg under a split")
    p.add_argument("--file", required=True)
    p.add_argument("--leg", type=int, required=True)
    p.add_argument("--split", required=True, help="a,b with a*b = leg dimension")
    p.set_defaults(func=cmd_decomp_local_ranks)

    surgery = groups.add_parser("surgery", help="leg splitting and patch insertion").add_subparsers(
        dest="command", required=True)
    p = surgery.add_parser("run", help="apply a surgery plan to a decomposition file")
    p.add_argument("--input", required=True)
    p.add_argument("--leg", type=int, required=True)
    p.add_argument("--split", required=True, help="a,b")
    p.add_argument("--path", default="", help="comma-separated inserted dimensions (may be empty)")
    p.add_argument("--patch", action="append", default=[],
                   help="decomposition file with a cycle_weights header (repeatable)")
    p.add_argument("--verify", action="store_true",
                   help="verify the output against the surgery image of the input")
    p.add_argument("--seed-check", action="store_true",
                   help="verify the input against --target before operating")
    p.add_argument("--target", default=None, help="graph spec for --seed-check")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_surgery_run)
    p = surgery.add_parser("odd-cycle", help="2^k - 1 term decomposition of the odd k-cycle tensor")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--patch", action="append", default=[])
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_surgery_odd_cycle)
    p = surgery.add_parser("c5-dim4", help="dimension-4 five-cycle decomposition (961 default terms)")
    p.add_argument("--patch442", default=None,
                   help="verified (4,4,2)-cycle decomposition file; 26 terms reaches 937")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_surgery_c5_dim4)

    bounds = groups.add_parser("bounds", help="closed-form bounds and tables").add_subparsers(
        dest="command", required=True)
    p = bounds.add_parser("table", help="best known odd-cycle exponent bounds")
    add_omega_alpha(p)
    p.add_argument("--kmax", type=int, default=13)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_bounds_table)
    p = bounds.add_parser("flattening", help="max-cut flattening lower bound for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--check", action="store_true", help="cross-check by exact elimination")
    p.set_defaults(func=cmd_bounds_flattening)
    p = bounds.add_parser("dome", help="dome / multigraph / linked-dome exponent records")
    add_omega_alpha(p)
    p.add_argument("--no-check", action="store_true", help="skip the flattening cross-checks")
    p.set_defaults(func=cmd_bounds_dome)
    p = bounds.add_parser("cycle-lower", help="rank and border-rank lower bounds for odd cycles")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_bounds_cycle_lower)
    p = bounds.add_parser("covering", help="triangle-covering bound for the five-cycle")
    add_omega_alpha(p)
    p.set_defaults(func=cmd_bounds_covering)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        thread_cap()
        return args.func(args)
    except (SchemaError, SignatureMismatchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
