"""Command-line front end: ``threebox validate|stats|check|game|export``.

Exit status is 0 on success, 1 when a check fails (an invalid model), and
2 for bad input (unreadable or malformed files, unknown labels, bad flags).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import game, io, zoo
from .classicality import classicality_report
from .stats import distribution
from .zoo import NamedModel

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad user input; reported on stderr with exit status 2."""


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _odds(text: str) -> Fraction:
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if x <= 1:
        raise argparse.ArgumentTypeError("odds must exceed 1")
    return x


def _fmt_prob(p) -> str:
    return str(p) if isinstance(p, (Fraction, int)) else f"{p:.10f}".rstrip("0").rstrip(".") or "0"


def _json_prob(p):
    return str(p) if isinstance(p, (Fraction, int)) else float(p)


def parse_strategy(text: str) -> game.BobStrategy:
    """``random_box[:p]``, ``fixed:M``, ``none`` or ``cheat_check[:q]``."""
    name, _, arg = text.partition(":")
    try:
        if name == "random_box":
            return game.BobStrategy.random_box(float(arg) if arg else 0.5)
        if name == "cheat_check":
            return game.BobStrategy.cheat_check(float(arg) if arg else 1.0)
        if name == "fixed" and arg:
            return game.BobStrategy.fixed(arg)
        if name == "none":
            return game.BobStrategy.fixed(None)
    except ValueError as e:
        raise InputError(f"bad strategy {text!r}: {e}") from None
    raise InputError(f"unknown strategy {text!r}; use random_box[:p], fixed:M, none or cheat_check[:q]")


def _load(ref: str) -> NamedModel:
    try:
        return io.load_model(io.resolve_model_path(ref))
    except io.ModelFileError as e:
        raise InputError(str(e)) from None


def _check_prep(nm: NamedModel, prep: str | None) -> str:
    prep = prep or nm.default_preparation
    if prep not in nm.preparations:
        raise InputError(f"unknown preparation {prep!r}; have {', '.join(nm.preparations)}")
    return prep


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_validate(args) -> int:
    nm = _load(args.model)
    problems = io.validate_named(nm)
    if args.json:
        _emit(args, json.dumps({
            "schema_version": SCHEMA_VERSION, "model": nm.name, "valid": not problems, "violations": problems,
        }, indent=1))
    else:
        lines = [f"{nm.name}: {'ok' if not problems else f'{len(problems)} violation(s)'}"]
        lines += [f"  - {p}" for p in problems]
        _emit(args, "\n".join(lines))
    return EXIT_FAILED if problems else EXIT_OK


def cmd_stats(args) -> int:
    nm = _load(args.model)
    prep = _check_prep(nm, args.prep)
    seq = [s.strip() for s in args.seq.split(",") if s.strip()]
    unknown = [s for s in seq if s not in nm.model.measurements and s != nm.model.do_nothing_label]
    if unknown:
        raise InputError(f"unknown measurement label(s) {unknown}; have {', '.join(nm.model.measurements)}")
    dist = distribution(nm.model, seq, nm.preparation(prep))
    rows = sorted(dist.items())
    if args.json:
        _emit(args, json.dumps({
            "schema_version": SCHEMA_VERSION,
            "model": nm.name,
            "preparation": prep,
            "sequence": seq,
            "exact": dist.is_exact,
            "distribution": [{"outcomes": list(k), "probability": _json_prob(p)} for k, p in rows],
        }, indent=1))
    else:
        keys = [",".join(k) or "(no outcomes)" for k, _ in rows]
        width = max(len(k) for k in keys)
        lines = [f"{nm.name} | {prep} | {','.join(seq) or '(empty sequence)'}"]
        lines += [f"{k:<{width}}  {_fmt_prob(p)}" for k, (_, p) in zip(keys, rows)]
        _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_check(args) -> int:
    nm = _load(args.model)
    prep = _check_prep(nm, args.prep)
    problems = io.validate_named(nm)
    if problems:
        print(f"{nm.name} is not a valid model:", *problems, sep="\n  ", file=sys.stderr)
        return EXIT_FAILED
    report = classicality_report(
        nm.model,
        prep,
        box_measurements=nm.box_measurements,
        final=nm.final,
        eigen_preps=nm.eigen_preparations,
        model_name=nm.name,
    )
    if args.json:
        _emit(args, json.dumps({"schema_version": SCHEMA_VERSION, **report.to_dict()}, indent=1))
    else:
        _emit(args, report.render())
    return EXIT_OK


def _game_summary(t: game.GameTranscript, ledger: game.Ledger) -> dict:
    summary = {
        "schema_version": SCHEMA_VERSION,
        "model": t.model,
        "preparation": t.preparation,
        "strategy": t.strategy,
        "seed": t.seed,
        "rounds": len(t),
        "ledger": ledger.to_dict(),
        "immediate_bob_fraction": ledger.immediate_bob / len(t),
        "umpire": None,
    }
    try:
        u = game.umpire_frequencies(t)
    except game.InsufficientRounds:
        return summary
    summary["umpire"] = {
        "flagged": u.flagged,
        "worst_score": u.worst_score,
        "p_post": {",".join(c) or "N": {"rounds": f.rounds, "rate": f.rate} for c, f in u.frequencies.items()},
    }
    return summary


def cmd_game(args) -> int:
    nm = _load(args.model)
    prep = _check_prep(nm, args.prep)
    if args.interactive:
        t = game.play_interactive(nm, args.rounds, args.seed, prep, ask=lambda prompt: input(prompt))
    else:
        t = game.play_rounds(nm, parse_strategy(args.strategy), args.rounds, args.seed, prep, args.workers)
    ledger = game.settle_bets(t, args.odds)
    if args.out:
        text = t.to_csv() if Path(args.out).suffix == ".csv" else t.to_json(indent=None)
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    summary = _game_summary(t, ledger)
    if args.json:
        print(json.dumps(summary, indent=1))
        return EXIT_OK
    rate = ledger.alice_win_rate
    lines = [
        f"{t.model} | {t.preparation} | {t.strategy} | seed {t.seed} | {len(t)} rounds",
        f"bets placed        {ledger.bets_placed}",
        f"alice won          {ledger.alice_wins}" + (f" ({rate:.2%})" if rate is not None else ""),
        f"bob won            {ledger.bob_wins}",
        f"immediate (a/b)    {ledger.immediate_alice}/{ledger.immediate_bob}",
        f"calibration rounds {ledger.calibration_rounds}",
        f"alice net at {ledger.odds}  {float(ledger.alice_net):g}",
    ]
    if summary["umpire"]:
        lines.append(f"umpire             {'FLAGGED' if summary['umpire']['flagged'] else 'no difference detected'}")
    if args.out:
        lines.append(f"transcript written to {args.out}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_export(args) -> int:
    names = list(zoo.CONSTRUCTORS) if args.name == "all" else [args.name]
    unknown = [n for n in names if n not in zoo.CONSTRUCTORS]
    if unknown:
        raise InputError(f"unknown model {unknown[0]!r}; have {', '.join(zoo.CONSTRUCTORS)}, all")
    if args.name == "all":
        out = Path(args.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        for n in names:
            path = io.save_model(zoo.CONSTRUCTORS[n](), out / f"{n}.json")
            print(path)
        return EXIT_OK
    _emit(args, io.dumps(zoo.CONSTRUCTORS[args.name]()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", metavar="PATH", help="write output (game: the transcript, .csv or .json) to PATH")
    common.add_argument("--seed", type=int, default=0, metavar="N", help="random seed (default 0)")

    parser = argparse.ArgumentParser(
        prog="threebox", description="Pre- and post-selection paradox models, classicality checks and the betting game."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    model_help = f"model file, or a fixture name looked up in ${io.FIXTURE_ENV} or the bundled fixtures"

    p = sub.add_parser("validate", parents=[common], help="check a model file's invariants")
    p.add_argument("model", help=model_help)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", parents=[common], help="outcome distribution of a measurement sequence")
    p.add_argument("model", help=model_help)
    p.add_argument("--prep", metavar="NAME")
    p.add_argument("--seq", default="", metavar="M1,MA", help="comma-separated measurement labels")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("check", parents=[common], help="classicality report")
    p.add_argument("model", help=model_help)
    p.add_argument("--prep", metavar="NAME")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("game", parents=[common], help="simulate the betting game")
    p.add_argument("model", help=model_help)
    p.add_argument("--prep", metavar="NAME")
    p.add_argument("--strategy", default="random_box", help="random_box[:p], fixed:M, none, cheat_check[:q]")
    p.add_argument("--rounds", type=_positive_int, default=10000)
    p.add_argument("--odds", type=_odds, default=Fraction(3, 2), help="Alice's payout per Bob win (default 3/2)")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--interactive", action="store_true", help="choose Bob's measurement each round")
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("export", parents=[common], help="write built-in models as model files")
    p.add_argument("name", help=f"one of {', '.join(zoo.CONSTRUCTORS)}, or 'all' (then --out is a directory)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, KeyError) as e:
        msg = e.args[0] if e.args else e
        print(f"threebox: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"threebox: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except EOFError:
        print("threebox: error: input ended before the game finished", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
