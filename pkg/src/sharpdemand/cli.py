"""Command-line interface.

Exit codes: 0 success, 1 usage/parse/budget errors, 2 no competitive
equilibrium exists, 3 a solution failed verification.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys

from . import ce, ef, oracle
from .gadgets import X3CInstance, pad_x3c, reduce_x3c_to_ce_general, reduce_x3c_to_ef
from .io import (dump_json, load_json, market_from_json, market_to_json, outcome_from_json,
                 outcome_to_json, view_from_json)
from .market import BudgetExceeded, InvalidOutcome, Market, ValidationError
from .verify import ce_violation, find_envy

EXIT_OK, EXIT_ERROR, EXIT_NO_EQUILIBRIUM, EXIT_NOT_CERTIFIED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would read as "no equilibrium"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _emit(obj, path=None):
    text = dump_json(obj)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _jsonl(record):
    print(json.dumps(record, default=str), file=sys.stderr)


def cmd_solve_ce(args) -> int:
    market = market_from_json(load_json(args.instance))
    res = ce.solve_ce(market)
    if args.verbose:
        for step in res.candidates.trace:
            _jsonl({"stage1": step.to_json()})
    if not res.exists:
        _emit({"status": "no-equilibrium", "reason": res.reason}, args.output)
        return EXIT_NO_EQUILIBRIUM
    _emit(outcome_to_json(market, res.outcome, "equilibrium", res.revenue), args.output)
    return EXIT_OK


def cmd_solve_ef(args) -> int:
    market = market_from_json(load_json(args.instance))
    if any(d > args.max_demand for d in market.demands):
        raise ValidationError(f"a buyer demands more than --max-demand {args.max_demand}")
    on_record = None
    if args.verbose:
        def on_record(rec):
            _jsonl({
                "winners": sorted(market.buyer_origin[i] for i in rec["winners"]),
                "window": sorted(market.item_origin[j] for j in rec["window"]),
                "revenue": str(rec["revenue"]),
            })
    res = ef.solve_ef(market, args.max_demand, jobs=args.jobs, on_record=on_record)
    _emit(outcome_to_json(market, res.outcome, "envy-free", res.revenue), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    view = view_from_json(load_json(args.instance))
    outcome = outcome_from_json(view, load_json(args.solution))
    if args.mode == "ef":
        bad = find_envy(view, outcome)
    else:
        bad = ce_violation(view, outcome)
    if bad is None:
        _emit({"certified": True, "mode": args.mode})
        return EXIT_OK
    _emit({"certified": False, "mode": args.mode, "witness": bad.to_json(view)})
    return EXIT_NOT_CERTIFIED


def cmd_oracle(args) -> int:
    view = view_from_json(load_json(args.instance))
    if args.mode == "ef":
        res = oracle.brute_ef_max(view)
        _emit(outcome_to_json(view, res.outcome, "envy-free", res.revenue), args.output)
        return EXIT_OK
    res = oracle.brute_ce(view)
    if not res.exists:
        _emit({"status": "no-equilibrium"}, args.output)
        return EXIT_NO_EQUILIBRIUM
    _emit(outcome_to_json(view, res.outcome, "equilibrium", res.revenue), args.output)
    return EXIT_OK


def cmd_gen_gadget(args) -> int:
    inst = X3CInstance.from_json(load_json(args.x3c))
    if args.which == "ef":
        if args.pad:
            inst = pad_x3c(inst)
        gadget = reduce_x3c_to_ef(inst)
        _emit(market_to_json(gadget.market), args.output)
        return EXIT_OK
    gadget = reduce_x3c_to_ce_general(pad_x3c(inst) if args.pad else inst)
    _emit(gadget.to_json(), args.output)
    if args.witness:
        if gadget.witness is None:
            raise ValidationError("the X3C instance has no exact cover, so there is no witness")
        _emit(outcome_to_json(gadget.view, gadget.witness, "equilibrium"), args.witness)
    return EXIT_OK


def cmd_gen_random(args) -> int:
    if args.buyers < 1 or args.items < 1:
        raise ValidationError("--buyers and --items must be at least 1")
    if args.max_demand < 1 or args.max_value < 1:
        raise ValidationError("--max-demand and --max-value must be at least 1")
    rng = random.Random(args.seed)
    buyers = [(rng.randint(1, args.max_value), rng.randint(1, args.max_demand))
              for _ in range(args.buyers)]
    qualities = [rng.randint(1, args.max_value) for _ in range(args.items)]
    _emit(market_to_json(Market.from_lists(buyers, qualities)), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sharpdemand", description="Pricing for sharp multi-unit demand markets.")
    p.add_argument("--verbose", "-v", action="store_true", help="diagnostics on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--output", "-o", help="write JSON here instead of stdout")
        sp.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)

    sp = sub.add_parser("solve-ce", help="revenue-maximizing competitive equilibrium")
    sp.add_argument("instance")
    common(sp)
    sp.set_defaults(func=cmd_solve_ce)

    sp = sub.add_parser("solve-ef", help="revenue-maximizing envy-free pricing")
    sp.add_argument("instance")
    sp.add_argument("--max-demand", type=int, required=True, help="demand bound")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    common(sp)
    sp.set_defaults(func=cmd_solve_ef)

    sp = sub.add_parser("verify", help="certify a solution file")
    sp.add_argument("instance")
    sp.add_argument("solution")
    sp.add_argument("--mode", choices=("ef", "ce"), required=True)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("oracle", help="exhaustive reference solver for tiny instances")
    sp.add_argument("instance")
    sp.add_argument("--mode", choices=("ef", "ce"), required=True)
    common(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("gen-gadget", help="pricing instance from an X3C input")
    sp.add_argument("x3c")
    sp.add_argument("--which", choices=("ef", "ce-general"), required=True)
    sp.add_argument("--pad", action="store_true", help="pad the triple count into [n, 2n-1] first")
    sp.add_argument("--witness", help="for ce-general: write the all-ones equilibrium here")
    common(sp)
    sp.set_defaults(func=cmd_gen_gadget)

    sp = sub.add_parser("gen-random", help="seeded random instance")
    sp.add_argument("--buyers", type=int, required=True)
    sp.add_argument("--items", type=int, required=True)
    sp.add_argument("--max-demand", type=int, required=True)
    sp.add_argument("--max-value", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_gen_random)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, InvalidOutcome, BudgetExceeded, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
