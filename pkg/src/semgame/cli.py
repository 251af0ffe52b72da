"""Command-line interface.

Subcommands: ``check`` (compositional judgment pair), ``solve`` (exact
solver when the formula is insertion-free, bounded otherwise),
``render-nl`` (plain-English reading), ``encode`` (model string
encoding), ``play`` (terminal game against the engine), ``serve``
(HTTP session service).

Exit codes: solve encodes its verdict (10 verified, 11 falsified, 20
indeterminate proven, 21 unknown); everywhere 0 is success, 64 a usage
error, 65 a formula/model parse error, 70 an internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .game import (
    GameConfig,
    Role,
    Terminal,
    UnsupportedInGameError,
    apply_move,
    describe_move,
    initial_position,
    legal_moves,
    move_to_dict,
    mover_player,
)
from .semantics import UnsupportedConstructError, evaluate
from .server import DEFAULT_IDLE_TTL, run_server
from .solver import (
    Outcome,
    Verdict,
    best_move_index,
    solve_auto,
    solve_bounded_position,
)
from .structure import ModelFormatError, PartialStructure, encode_model, parse_model
from .syntax import (
    EMPTY_VOCABULARY,
    ParseError,
    index_subformulas,
    parse_formula,
    print_formula,
    render_natural_language,
)

EXIT_OK = 0
EXIT_USAGE = 64
EXIT_PARSE = 65
EXIT_INTERNAL = 70

VERDICT_EXIT = {
    Outcome.VERIFIED: 10,
    Outcome.FALSIFIED: 11,
    Outcome.INDETERMINATE: 20,
    Outcome.UNKNOWN: 21,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semgame", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, model_required=False, with_formula=True):
        p.add_argument("-m", "--model", metavar="FILE", required=model_required,
                       help="model file (omit for the empty structure)")
        if with_formula:
            p.add_argument("-f", "--formula", required=True, help="formula text")
        p.add_argument("--json", action="store_true", help="structured output")

    def add_conventions(p):
        p.add_argument("--delete-miss", choices=["lose", "ignore"], default="lose",
                       help="deleting through an unbound variable: verifier loses (default) or no-op")
        p.add_argument("--claim-unbound", choices=["neither", "lose"], default="neither",
                       help="claim atom without binder: nobody wins (default) or verifier loses")
        p.add_argument("--fresh-status", choices=["undefined", "negative"], default="undefined",
                       help="status of tuples touching a freshly inserted element in partial relations")

    p = sub.add_parser("check", help="compositional plus/minus judgment")
    add_common(p)

    p = sub.add_parser("solve", help="game verdict (exact or budgeted)")
    add_common(p)
    add_conventions(p)
    p.add_argument("--budget", type=int, default=12,
                   help="deepening budget for formulas with element insertion (default 12)")

    p = sub.add_parser("render-nl", help="natural-language reading of a formula")
    add_common(p)

    p = sub.add_parser("encode", help="string encoding of a model")
    add_common(p, model_required=True, with_formula=False)

    p = sub.add_parser("play", help="play the game interactively against the engine")
    add_common(p)
    add_conventions(p)
    p.add_argument("--role", choices=["eloise", "abelard"], default="eloise",
                   help="side the human plays (default eloise)")
    p.add_argument("--budget", type=int, default=8, help="engine thinking budget")

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    p.add_argument("--idle-ttl", type=float, default=DEFAULT_IDLE_TTL,
                   help="seconds before an idle session expires (default 1800)")
    return parser


def _load_inputs(args):
    if getattr(args, "model", None):
        with open(args.model, encoding="utf-8") as fh:
            vocab, structure = parse_model(fh.read())
    else:
        vocab, structure = EMPTY_VOCABULARY, PartialStructure()
    formula = None
    if getattr(args, "formula", None) is not None:
        formula = parse_formula(args.formula, vocab)
    return vocab, structure, formula


def _config(args) -> GameConfig:
    return GameConfig(
        delete_miss=getattr(args, "delete_miss", "lose"),
        claim_unbound=getattr(args, "claim_unbound", "neither"),
        fresh_negative=getattr(args, "fresh_status", "undefined") == "negative",
    )


def _verdict_json(verdict: Verdict, solver: str) -> dict:
    trace = None
    if verdict.trace is not None:
        trace = {
            "terminal": verdict.trace.terminal.value,
            "steps": [{"from": st.pre, "move": move_to_dict(st.move), "to": st.post}
                      for st in verdict.trace.steps],
        }
    return {
        "outcome": verdict.outcome.value,
        "exitCode": VERDICT_EXIT[verdict.outcome],
        "depth": verdict.depth,
        "budgetUsed": verdict.budget_used,
        "solver": solver,
        "trace": trace,
    }


def cmd_check(args) -> int:
    _, structure, formula = _load_inputs(args)
    status = evaluate(structure, {}, formula)
    if args.json:
        print(json.dumps({"plus": status.plus, "minus": status.minus}, sort_keys=True))
    else:
        print(status)
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.budget < 1:
        print("semgame: --budget must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    _, structure, formula = _load_inputs(args)
    verdict, solver = solve_auto(structure, {}, formula, args.budget, _config(args))
    if args.json:
        print(json.dumps(_verdict_json(verdict, solver), sort_keys=True))
    else:
        print(verdict.outcome.value)
    return VERDICT_EXIT[verdict.outcome]


def cmd_render_nl(args) -> int:
    _, _, formula = _load_inputs(args)
    out = render_natural_language(formula)
    if args.json:
        print(json.dumps({"text": out}, sort_keys=True))
    else:
        print(out)
    return EXIT_OK


def cmd_encode(args) -> int:
    _, structure, _ = _load_inputs(args)
    out = encode_model(structure)
    if args.json:
        print(json.dumps({"encoding": out}, sort_keys=True))
    else:
        print(out)
    return EXIT_OK


def _show_position(p, table):
    s = p.structure
    print(f"  domain: {{{', '.join(s.domain)}}}")
    for name in sorted(s.relations):
        rt = s.relations[name]
        pos = " ".join("(" + ",".join(t) + ")" for t in sorted(rt.pos)) or "-"
        line = f"  {name}/{rt.arity} {'total' if rt.total else 'partial'}: + {pos}"
        if not rt.total:
            neg = " ".join("(" + ",".join(t) + ")" for t in sorted(rt.neg)) or "-"
            line += f"   - {neg}"
        print(line)
    if p.assignment:
        print("  assignment: " + ", ".join(f"{v}={e}" for v, e in sorted(p.assignment.items())))
    print(f"  at: {print_formula(table.node(p.node).formula)}")
    print(f"  verifier: {p.verifier.value}")


def cmd_play(args) -> int:
    _, structure, formula = _load_inputs(args)
    config = _config(args)
    table = index_subformulas(formula)
    human = Role(args.role)
    p = initial_position(structure, {}, table)
    print(f"formula: {print_formula(formula)}")
    print(f"you are {human.value}")
    auto_streak = 0
    while True:
        moves = legal_moves(p, table, config)
        if isinstance(moves, Terminal):
            print(f"play over: {moves.winner.value} wins" if moves.winner.value != "neither"
                  else "play over: neither player wins")
            return {"eloise": 10, "abelard": 11, "neither": 20}[moves.winner.value]
        mover = mover_player(moves, p.verifier)
        if mover is None:
            print(f"* forced: {describe_move(moves[0], table, p)}")
            p = apply_move(p, moves[0], table, config)
            auto_streak += 1
            if auto_streak >= 200:
                print("play is cycling without reaching your turn; neither player wins")
                return 20
            continue
        if mover is not human:
            idx, basis = best_move_index(p, table, args.budget, config)
            print(f"* engine ({mover.value}, {basis}): {describe_move(moves[idx], table, p)}")
            p = apply_move(p, moves[idx], table, config)
            auto_streak += 1
            if auto_streak >= 200:
                print("play is cycling without reaching your turn; neither player wins")
                return 20
            continue
        auto_streak = 0
        print()
        _show_position(p, table)
        for i, m in enumerate(moves):
            print(f"    [{i}] {describe_move(m, table, p)}")
        try:
            line = input(f"{human.value}> ").strip()
        except EOFError:
            print("\n(eof) leaving the game")
            return EXIT_OK
        if line in (":q", ":quit"):
            return EXIT_OK
        if line == ":hint":
            verdict = solve_bounded_position(p, table, args.budget, config)
            idx, basis = best_move_index(p, table, args.budget, config)
            print(f"  hint: {verdict.outcome.value} from here; try [{idx}] ({basis})")
            continue
        try:
            idx = int(line)
            if not 0 <= idx < len(moves):
                raise ValueError
        except ValueError:
            print(f"  enter a number 0..{len(moves) - 1}, :hint, or :quit")
            continue
        p = apply_move(p, moves[idx], table, config)
    return EXIT_OK


def cmd_serve(args) -> int:
    print(f"serving on http://{args.host}:{args.port}", file=sys.stderr)
    run_server(args.host, args.port, args.idle_ttl)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "check": cmd_check,
        "solve": cmd_solve,
        "render-nl": cmd_render_nl,
        "encode": cmd_encode,
        "play": cmd_play,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, ModelFormatError, UnsupportedConstructError, UnsupportedInGameError) as e:
        print(f"semgame: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"semgame: {e}", file=sys.stderr)
        return EXIT_PARSE
    except KeyboardInterrupt:
        return EXIT_OK
    except Exception as e:
        print(f"semgame: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
