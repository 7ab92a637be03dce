"""Command-line surface.

Every command is deterministic given its arguments (seeds are always
explicit flags), output files are byte-stable, and stdout carries only
short human-readable summaries.  Exit codes: 0 success / verified,
1 verification or certificate failure, 2 invalid input, 3 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bounds, circuits, matrices
from .errors import (
    BudgetExceededError,
    CountOverflowError,
    NoFreeDeltaError,
    NotKFreeError,
    OrkitError,
    TooLargeError,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_RESOURCE = 3


def _fmt_witness(w) -> str:
    rows = ",".join(str(i) for i in w.rows)
    cols = ",".join(str(j) for j in w.cols)
    return f"witness_rows={rows} witness_cols={cols}"


# -- gen -------------------------------------------------------------------


def _cmd_gen_brown(args) -> int:
    a, delta = matrices.brown_matrix(args.p, args.delta)
    matrices.write_matrix(a, args.out)
    print(f"brown p={args.p} delta={delta} m={a.rows} weight={a.weight()}")
    return EXIT_OK


def _cmd_gen_norm(args) -> int:
    a = matrices.norm_matrix(args.q, args.t)
    matrices.write_matrix(a, args.out)
    print(f"norm q={args.q} t={args.t} m={a.rows} weight={a.weight()}")
    return EXIT_OK


def _cmd_gen_random(args) -> int:
    a = matrices.random_matrix(args.rows, args.cols, args.density, args.seed)
    matrices.write_matrix(a, args.out)
    print(f"random {a.rows}x{a.cols} seed={args.seed} weight={a.weight()}")
    return EXIT_OK


def _cmd_gen_random_kfree(args) -> int:
    a = matrices.random_k_free(args.rows, args.cols, args.density, args.k, args.seed)
    matrices.write_matrix(a, args.out)
    print(
        f"random-kfree {a.rows}x{a.cols} k={args.k} seed={args.seed} "
        f"weight={a.weight()}"
    )
    return EXIT_OK


# -- transform -------------------------------------------------------------


def _cmd_transform(args) -> int:
    a = matrices.read_matrix(args.matrix)
    if args.stats_only:
        stats = matrices.pair_transform(a, stats_only=True)
        print(f"rows={a.rows} cols={a.cols} weight={sum(stats.row_weights)}")
        print(f"sigma={stats.sigma}")
        print(f"two_rectangles={stats.two_rectangles}")
        return EXIT_OK
    if args.out is None:
        print("error: -o/--out is required without --stats-only", file=sys.stderr)
        return EXIT_BAD_INPUT
    b = matrices.pair_transform(a)
    matrices.write_matrix(b, args.out)
    print(f"B {b.rows}x{b.cols} weight={b.weight()}")
    return EXIT_OK


# -- circuit / eval / verify ----------------------------------------------


def _cmd_circuit(args) -> int:
    a = matrices.read_matrix(args.matrix)
    if args.kind == "trivial":
        c = circuits.trivial_circuit(a)
    else:
        c = circuits.depth3_complement_circuit(a)
    circuits.write_circuit(c, args.out)
    if args.dot is not None:
        with open(args.dot, "wb") as fh:
            fh.write(c.to_dot().encode("utf-8"))
    print(f"{args.kind} circuit nodes={c.node_count} edges={c.complexity}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    c = circuits.read_circuit(args.circuit)
    m = c.implemented_matrix()
    matrices.write_matrix(m, args.out)
    print(f"implemented {m.rows}x{m.cols} weight={m.weight()}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    c = circuits.read_circuit(args.circuit)
    a = matrices.read_matrix(args.matrix)
    if len(c.outputs) != a.rows or len(c.inputs) != a.cols:
        print(
            f"error: circuit implements {len(c.outputs)}x{len(c.inputs)}, "
            f"matrix is {a.rows}x{a.cols}",
            file=sys.stderr,
        )
        return EXIT_BAD_INPUT
    if args.samples is None:
        try:
            m = c.implemented_matrix()
        except TooLargeError:
            print(
                "error: matrix too large for full comparison; pass --samples",
                file=sys.stderr,
            )
            return EXIT_RESOURCE
        if m == a:
            print(f"verified: full comparison of {a.rows * a.cols} entries")
            return EXIT_OK
        for i in range(a.rows):
            diff = m.row_bits(i) ^ a.row_bits(i)
            if diff:
                j = (diff & -diff).bit_length() - 1
                print(
                    f"mismatch at (i={i}, j={j}): circuit={m.get(i, j)} "
                    f"matrix={a.get(i, j)}"
                )
                return EXIT_CHECK_FAILED
        raise AssertionError("matrices differ but no differing row found")
    res = circuits.sampled_verify(c, a.get, args.samples, args.seed)
    if res.passed:
        print(f"verified: {res.checked} sampled entries")
        return EXIT_OK
    i, j = res.counterexample
    reached = 1 - a.get(i, j)
    print(f"mismatch at (i={i}, j={j}): circuit={reached} matrix={a.get(i, j)}")
    return EXIT_CHECK_FAILED


# -- analyze / bound -------------------------------------------------------


def _cmd_analyze(args) -> int:
    if args.k is None and not args.lemma1:
        print("error: nothing to do; pass --k and/or --lemma1", file=sys.stderr)
        return EXIT_BAD_INPUT
    a = matrices.read_matrix(args.matrix)
    failed = False
    if args.k is not None:
        res = matrices.is_k_free(
            a, args.k, budget=args.budget, through_row=args.through_row
        )
        if res.free:
            print(f"k={args.k} free=true")
        else:
            print(f"k={args.k} free=false {_fmt_witness(res.witness)}")
            failed = True
    if args.lemma1:
        cert = bounds.lemma1_certificate(a)
        print(
            f"lemma1 n={cert.n} weight={cert.weight} sigma={cert.sigma} "
            f"two_rectangles={cert.two_rectangles}"
        )
        print(f"unconditional sigma bound: {'pass' if cert.unconditional_sigma_ok else 'FAIL'}")
        print(f"unconditional count bound: {'pass' if cert.unconditional_count_ok else 'FAIL'}")
        if cert.precondition_met:
            print("precondition weight >= 2n^(3/2): met")
            print(f"conditional sigma bound: {'pass' if cert.conditional_sigma_ok else 'FAIL'}")
            print(f"conditional count bound: {'pass' if cert.conditional_count_ok else 'FAIL'}")
        else:
            print("precondition weight >= 2n^(3/2): not met (conditional bounds skipped)")
        if not cert.all_ok:
            failed = True
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _cmd_bound_nechiporuk(args) -> int:
    a = matrices.read_matrix(args.matrix)
    try:
        cert = bounds.nechiporuk_lower(
            a, args.K, budget=args.budget, through_row=args.through_row
        )
    except NotKFreeError as e:
        print(f"not {e.k}-free: {_fmt_witness(e.witness)}")
        return EXIT_CHECK_FAILED
    line = f"K={cert.k} weight={cert.weight} bound={cert.bound}"
    if cert.exact_for_2_free:
        line += f" exact_or={cert.exact_or}"
    print(line)
    return EXIT_OK


def _cmd_bound_or2(args) -> int:
    a = matrices.read_matrix(args.matrix)
    res = bounds.exact_or2(a, args.budget)
    print(f"cost={res.cost} optimal={'true' if res.optimal else 'false'}")
    for rows, cols in res.cover.rectangles:
        print(
            f"rect rows={','.join(map(str, rows))} cols={','.join(map(str, cols))}"
        )
    for i, j in res.cover.wires:
        print(f"wire {i},{j}")
    return EXIT_OK


# -- report ----------------------------------------------------------------


def _cmd_report(args) -> int:
    if args.family == "brown":
        params = [int(tok) for tok in args.p.split(",")]
    else:
        params = []
        for tok in args.qt:
            q, t = tok.split(",")
            params.append((int(q), int(t)))
    rows = bounds.theorem_report(
        args.family, params, seed=args.seed, spot_samples=args.samples
    )
    out = Path(args.out)
    with open(out, "wb") as fh:
        fh.write(bounds.report_csv_text(rows).encode("ascii"))
    if args.json is not None:
        with open(args.json, "wb") as fh:
            fh.write(bounds.report_json_text(rows).encode("ascii"))
    if not args.no_figure:
        from .plotting import render_report_figure

        figure = Path(args.figure) if args.figure else out.with_suffix(".png")
        render_report_figure(rows, figure)
    for r in rows:
        print(
            f"{r.family} {r.param}: n={r.n} orUpper={r.or_upper} "
            f"orLower={r.or_lower} ratioLB={format(float(r.ratio_lb), '.6g')} "
            f"checks={'ok' if (r.a_free_verified and r.b_free_ok) else 'FAILED'}"
        )
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orkit",
        description="Rectifier-circuit complexity toolkit: explicit matrix "
        "families, the pair transform, certified bounds, and separation reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a matrix file")
    gsub = gen.add_subparsers(dest="family", required=True)

    g = gsub.add_parser("brown", help="distance graph on F_p^3")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--delta", type=int, default=None)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=_cmd_gen_brown)

    g = gsub.add_parser("norm", help="norm graph on F_{q^t}")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--t", type=int, required=True)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=_cmd_gen_norm)

    g = gsub.add_parser("random", help="IID Bernoulli matrix")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--density", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=_cmd_gen_random)

    g = gsub.add_parser("random-kfree", help="random matrix repaired to k-freeness")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--density", type=float, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=_cmd_gen_random_kfree)

    t = sub.add_parser("transform", help="pair transform A -> B, or its statistics")
    t.add_argument("matrix")
    t.add_argument("-o", "--out", default=None)
    t.add_argument("--stats-only", action="store_true")
    t.set_defaults(func=_cmd_transform)

    c = sub.add_parser("circuit", help="build a circuit from a matrix")
    c.add_argument("kind", choices=["trivial", "depth3"])
    c.add_argument("matrix")
    c.add_argument("-o", "--out", required=True)
    c.add_argument("--dot", default=None, help="also write a Graphviz export")
    c.set_defaults(func=_cmd_circuit)

    e = sub.add_parser("eval", help="materialize the matrix a circuit implements")
    e.add_argument("circuit")
    e.add_argument("-o", "--out", required=True)
    e.set_defaults(func=_cmd_eval)

    v = sub.add_parser("verify", help="compare a circuit against a matrix file")
    v.add_argument("circuit")
    v.add_argument("matrix")
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=_cmd_verify)

    an = sub.add_parser("analyze", help="freeness search and counting certificates")
    an.add_argument("matrix")
    an.add_argument("--k", type=int, default=None)
    an.add_argument("--budget", type=int, default=None)
    an.add_argument("--through-row", type=int, default=None)
    an.add_argument("--lemma1", action="store_true")
    an.set_defaults(func=_cmd_analyze)

    b = sub.add_parser("bound", help="lower bounds and the exact depth-2 solver")
    bsub = b.add_subparsers(dest="kind", required=True)

    bn = bsub.add_parser("nechiporuk", help="OR(A) >= weight/K^2 with verified K-freeness")
    bn.add_argument("matrix")
    bn.add_argument("--K", type=int, required=True)
    bn.add_argument("--budget", type=int, default=None)
    bn.add_argument("--through-row", type=int, default=None)
    bn.set_defaults(func=_cmd_bound_nechiporuk)

    bo = bsub.add_parser("or2", help="exact minimum depth-2 edge count")
    bo.add_argument("matrix")
    bo.add_argument("--budget", type=int, default=None)
    bo.set_defaults(func=_cmd_bound_or2)

    r = sub.add_parser("report", help="separation table (CSV, JSON, figure)")
    rsub = r.add_subparsers(dest="family", required=True)

    rb = rsub.add_parser("brown", help="sweep over primes p")
    rb.add_argument("--p", required=True, help="comma-separated primes, e.g. 3,5,7,11")
    rn = rsub.add_parser("norm", help="sweep over (q,t) pairs")
    rn.add_argument(
        "--qt", nargs="+", required=True, metavar="Q,T",
        help="pairs like 3,2 (repeatable)",
    )
    for rr in (rb, rn):
        rr.add_argument("-o", "--out", required=True, help="CSV output path")
        rr.add_argument("--json", default=None, help="also write the JSON variant")
        rr.add_argument("--figure", default=None, help="figure path (default: CSV path with .png)")
        rr.add_argument("--no-figure", action="store_true")
        rr.add_argument("--seed", type=int, default=0)
        rr.add_argument("--samples", type=int, default=100_000)
        rr.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotKFreeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except NoFreeDeltaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (TooLargeError, BudgetExceededError, CountOverflowError, MemoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (OrkitError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
