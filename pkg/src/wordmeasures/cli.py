"""Command-line front end.

Every subcommand prints human-readable text by default and a JSON document
with ``--json``.  Exit codes: 0 success, 2 parse error, 3 budget exceeded,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import characters, graphs, morphisms, oracle, phi, schreier, wordstats
from .errors import BudgetExceeded, InvariantViolation, ParseError
from .words import ALPHABET, SHORT_ALPHABET, Word, format_word, parse_word

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4


# ---------------------------------------------------------------- argument helpers

def _needed_rank(text: str) -> int:
    letters = {ch.lower() for ch in text if ch.isalpha()} & set(ALPHABET)
    alphabet = SHORT_ALPHABET if letters <= set(SHORT_ALPHABET) else ALPHABET
    return max((alphabet.index(ch) + 1 for ch in letters), default=1)


def read_words(texts: Sequence[str], rank: int | None) -> list[Word]:
    """Parse words sharing one ambient rank (at least 2 unless given)."""
    if rank is None:
        rank = max([2] + [_needed_rank(t) for t in texts])
    return [parse_word(t, rank) for t in texts]


def parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        bad = next(i for i, x in enumerate(text.split(",")) if x.strip() and
                   not x.strip().lstrip("-").isdigit())
        col = sum(len(x) + 1 for x in text.split(",")[:bad])
        raise ParseError(f"{what} must be comma-separated integers", text, col) from None
    if not out:
        raise ParseError(f"{what} is empty", text, 0)
    return out


def parse_range(text: str) -> range:
    """``A..B`` inclusive, or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return range(int(a), int(b) + 1)
        n = int(text)
        return range(n, n + 1)
    except ValueError:
        raise ParseError("expected A..B or an integer", text, 0) from None


def fraction_text(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rational_json(f: phi.RationalFnOfN) -> dict:
    """Low-degree-first integer coefficient arrays plus the text form."""
    return {"num": [int(c) for c in f.num], "den": [int(c) for c in f.den],
            "n_min": f.n_min, "text": str(f)}


def graph_json(g: graphs.MultiCoreGraph) -> dict:
    inv = graphs.graph_invariants(g)
    return {"num_vertices": g.num_vertices, "edges": [list(e) for e in g.edges],
            "euler_characteristic": inv.euler_characteristic,
            "components": inv.num_components}


def emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------- subcommands

def cmd_expect(args) -> int:
    (w,) = read_words([args.word], args.rank)
    f = characters.parse_class_function(args.stat)
    rat = wordstats.class_function_expectation(w, f)
    payload = {"word": format_word(w), "stat": str(f), "rational": rational_json(rat)}
    lines = [f"E[{f}] for w = {format_word(w)}:", f"  {rat}", f"  valid for N >= {rat.n_min}"]
    if args.laurent is not None:
        series = phi.laurent(rat, args.laurent)
        payload["laurent"] = {"leading_exponent": series.leading,
                              "coeffs": [fraction_text(c) for c in series.coeffs]}
        lines.append(f"  Laurent: {series}")
    if args.eval:
        values = {n: wordstats.class_function_value(w, f, n) for n in parse_range(args.eval)}
        payload["values"] = {str(n): fraction_text(v) for n, v in values.items()}
        lines += [f"  N={n}: {fraction_text(v)}" for n, v in values.items()]
    return emit(args, payload, lines) or EXIT_OK


def cmd_pirank(args) -> int:
    (w,) = read_words([args.word], args.rank)
    rep = wordstats.primitivity(w)
    pi = "inf" if rep.pi is None else rep.pi
    payload = {"word": format_word(w), "pi": pi, "crit_count": len(rep.crit),
               "crit": [graph_json(g) for g in rep.crit_graphs]}
    lines = [f"pi = {pi}", f"|Crit| = {len(rep.crit)}"]
    for g in rep.crit_graphs:
        lines.append(f"  critical subgroup graph: {g.num_vertices} vertices, edges {list(g.edges)}")
    return emit(args, payload, lines) or EXIT_OK


def cmd_inner(args) -> int:
    f = characters.parse_class_function(args.f)
    g = characters.parse_class_function(args.g)
    val = characters.stable_inner(f, g)
    return emit(args, {"f": str(f), "g": str(g), "inner": fraction_text(val)},
                [fraction_text(val)]) or EXIT_OK


def cmd_irreducible(args) -> int:
    lam = characters.IntPartition.of(parse_int_list(args.lam, "--lambda"))
    chi = characters.stable_irreducible(lam)
    dim = characters.dimension_poly(lam)
    dim_text = phi.format_poly(dim)
    payload = {"lambda": list(lam.parts), "xi": str(chi.convert("xi")), "a": str(chi),
               "dimension": [fraction_text(c) for c in dim], "dimension_text": dim_text}
    lines = [f"chi_{lam} = {chi.convert('xi')}", f"        = {chi}", f"dim = {dim_text}"]
    return emit(args, payload, lines) or EXIT_OK


def cmd_unif(args) -> int:
    f = characters.parse_class_function(args.stat)
    val = characters.expectation_stable(f)
    return emit(args, {"stat": str(f), "e_unif": fraction_text(val)},
                [fraction_text(val)]) or EXIT_OK


def cmd_oracle(args) -> int:
    (w,) = read_words([args.word], args.rank)
    f = characters.parse_class_function(args.stat)
    if args.mc:
        res = oracle.mc_expectation(w, args.N, args.mc, args.seed, f=f)
        payload = {"mode": "mc", "value": res.value, "stderr": res.stderr,
                   "samples": res.samples, "seed": res.seed, "N": args.N}
        lines = [f"{res.value!r} +- {res.stderr!r} ({res.samples} samples, seed {res.seed})"]
    else:
        res = oracle.exact_expectation(w, args.N, f=f, max_tuples=args.max_tuples)
        payload = {"mode": "exact", "value": fraction_text(res.value), "N": args.N,
                   "tuples": res.samples}
        lines = [fraction_text(res.value)]
    return emit(args, payload, lines) or EXIT_OK


def cmd_conj(args) -> int:
    u, v = read_words([args.u, args.v], args.rank)
    same, ev = wordstats.decide_conjugate(u, v)
    payload = {"conjugate": same, "evidence": ev.to_json()}
    lines = [f"conjugate: {'yes' if same else 'no'}",
             f"  roots {ev.roots[0]}^{ev.exponents[0]} and {ev.roots[1]}^{ev.exponents[1]}",
             f"  connected flat quotients: {ev.connected_flat_quotients}",
             f"  same orientation: {'yes' if ev.same_orientation else 'no'}"]
    return emit(args, payload, lines) or EXIT_OK


def cmd_graph(args) -> int:
    (w,) = read_words([args.word], args.rank)
    alpha = parse_int_list(args.powers, "--powers") if args.powers else (1,)
    g = graphs.powers_graph(w, alpha)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(graphs.to_dot(g))
    payload = graph_json(g)
    lines = [f"vertices: {g.num_vertices}", f"edges: {g.num_edges}",
             f"euler characteristic: {g.euler_characteristic}",
             f"components: {len(g.components())}"]
    return emit(args, payload, lines) or EXIT_OK


def cmd_decomp(args) -> int:
    (w,) = read_words([args.word], args.rank)
    alpha = parse_int_list(args.powers, "--powers") if args.powers else (1,)
    eta = wordstats.word_morphism(w, alpha)
    lat = morphisms.decomposition_lattice(eta, args.max_vertices)
    by_chi: dict[int, int] = {}
    for c in lat.euler:
        by_chi[c] = by_chi.get(c, 0) + 1
    payload = {"word": format_word(w), "powers": list(alpha), "count": len(lat),
               "by_euler_characteristic": {str(k): v for k, v in sorted(by_chi.items())}}
    lines = [f"|Decomp| = {len(lat)}"]
    lines += [f"  chi = {k}: {v}" for k, v in sorted(by_chi.items(), reverse=True)]
    if args.list:
        payload["partitions"] = [list(p) for p in lat.elements]
        lines += [f"  {list(p)}  chi={c}" for p, c in zip(lat.elements, lat.euler)]
    return emit(args, payload, lines) or EXIT_OK


def cmd_schreier(args) -> int:
    ns = parse_int_list(args.N, "--N")
    if args.trials:
        exp = schreier.bound_experiment(args.r, args.s, ns, args.trials, args.seed,
                                        workers=args.workers)
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(exp.to_csv())
        summary = exp.to_json()
        lines = [f"d = {2 * args.r}, s = {args.s}, bound = {summary['bound']:.6f}"]
        for n, row in summary["per_N"].items():
            lines.append(f"  N={n}: {row['trials']} trials, pass rate {row['pass_rate']:.3f}, "
                         f"max mu {row['max_mu']:.6f}")
        lines.append(f"overall pass rate {summary['pass_rate']:.3f}"
                     + ("  [FLAG: below target]" if summary["flagged"] else ""))
        return emit(args, summary, lines) or EXIT_OK
    if len(ns) != 1:
        raise ParseError("give one N unless --trials is set", args.N, 0)
    g = schreier.build_schreier(args.r, args.s, ns[0], seed=args.seed)
    mu, _ = schreier.adjacency_mu(g)
    bound = schreier.bound_value(g.degree, g.s)
    payload = {"r": args.r, "s": args.s, "N": ns[0], "seed": args.seed,
               "vertices": g.num_vertices, "mu": mu, "bound": bound}
    lines = [f"vertices: {g.num_vertices}", f"mu = {mu!r}", f"bound = {bound!r}"]
    if args.trace:
        chk = schreier.trace_identity_check(g, args.trace)
        payload["trace"] = {"t": args.trace, "lhs": chk.lhs, "rhs": chk.rhs, "equal": chk.equal}
        lines.append(f"trace identity t={args.trace}: {chk.lhs} vs {chk.rhs} "
                     f"({'equal' if chk.equal else 'DIFFERENT'})")
        if not chk.equal:
            raise InvariantViolation(f"trace identity failed: {chk.lhs} != {chk.rhs}")
    if args.hashimoto:
        rep = schreier.hashimoto_spectrum(g)
        payload["hashimoto"] = {"nu": rep.nu, "ihara_bass_ok": rep.ihara_bass_ok,
                                "max_mismatch": rep.max_mismatch}
        lines.append(f"nu = {rep.nu!r}, Ihara-Bass {'ok' if rep.ihara_bass_ok else 'FAILED'}")
    if args.spectrum:
        with open(args.spectrum, "w") as fh:
            fh.write(schreier.spectrum_csv(g))
    return emit(args, payload, lines) or EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    worded = argparse.ArgumentParser(add_help=False)
    worded.add_argument("--rank", type=int, default=None,
                        help="ambient free group rank (default: inferred, at least 2)")

    p = argparse.ArgumentParser(prog="wordmeasures",
                                description="Exact statistics of word measures on S_N.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("expect", parents=[common, worded], help="E_w[stat] as a function of N")
    s.add_argument("--word", required=True)
    s.add_argument("--stat", required=True, help='class function, e.g. "xi1*xi2" or "a2"')
    s.add_argument("--laurent", type=int, help="print the Laurent expansion to this order")
    s.add_argument("--eval", help="exact values at N in A..B")
    s.set_defaults(func=cmd_expect)

    s = sub.add_parser("pirank", parents=[common, worded], help="primitivity rank and Crit")
    s.add_argument("--word", required=True)
    s.set_defaults(func=cmd_pirank)

    s = sub.add_parser("inner", parents=[common], help="stable inner product")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.set_defaults(func=cmd_inner)

    s = sub.add_parser("irreducible", parents=[common], help="stable irreducible character")
    s.add_argument("--lambda", dest="lam", required=True, help="parts, e.g. 2,1")
    s.set_defaults(func=cmd_irreducible)

    s = sub.add_parser("unif", parents=[common], help="large-N expectation under uniform measure")
    s.add_argument("--stat", required=True)
    s.set_defaults(func=cmd_unif)

    s = sub.add_parser("oracle", parents=[common, worded], help="brute-force or sampled E_w[stat]")
    s.add_argument("--word", required=True)
    s.add_argument("--stat", default="xi1")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--mc", type=int, default=0, help="sample this many tuples instead")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-tuples", type=int, default=oracle.DEFAULT_MAX_TUPLES)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("conj", parents=[common, worded], help="decide conjugacy of two words")
    s.add_argument("--u", required=True)
    s.add_argument("--v", required=True)
    s.set_defaults(func=cmd_conj)

    s = sub.add_parser("graph", parents=[common, worded], help="core graph of powers of a word")
    s.add_argument("--word", required=True)
    s.add_argument("--powers", help="exponent vector a1,a2,...")
    s.add_argument("--dot", help="write Graphviz output here")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("decomp", parents=[common, worded], help="count decompositions")
    s.add_argument("--word", required=True)
    s.add_argument("--powers", help="exponent vector a1,a2,...")
    s.add_argument("--list", action="store_true")
    s.add_argument("--max-vertices", type=int, default=morphisms.DEFAULT_MAX_VERTICES)
    s.set_defaults(func=cmd_decomp)

    s = sub.add_parser("schreier", parents=[common], help="random Schreier graph spectra")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--N", required=True, help="N, or a comma list with --trials")
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--trace", type=int, default=0, help="check the trace identity at this t")
    s.add_argument("--hashimoto", action="store_true", help="also check Ihara-Bass")
    s.add_argument("--spectrum", help="write the adjacency spectrum CSV here")
    s.add_argument("--csv", help="write per-trial rows here (with --trials)")
    s.set_defaults(func=cmd_schreier)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        text = f"\n  {e.text}\n  {' ' * e.column}^" if e.text and e.column is not None else ""
        print(f"parse error: {e}{text}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT


def main() -> None:
    sys.exit(run())
