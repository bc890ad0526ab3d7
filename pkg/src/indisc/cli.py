"""Command-line front-end.

    indisc parse     --formula TEXT | --in FILE
    indisc star      --in FILE [--out FILE]
    indisc eval      --formula TEXT --args 3,5 (--budget W | --domain N [--I 2,7])
    indisc generate  --seed S --depth D --count C [--out FILE]
    indisc mine      --family FILE --domain N --size M [--guard G] [--diagonal] [--param-bound B]
    indisc check     --witness FILE
    indisc satclass  --witness FILE --corpus FILE --audit nabla|tarski|cofinal [--budget W]
    indisc definable --theta TEXT --family FILE --domain N
    indisc report    --family FILE --domain N --size M --budget W --cases C

Every command writes JSON (to --out or stdout).  Exit status: 0 success,
1 domain or I/O error (JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .coding import goedel_encode
from .corpus import (
    cases_under_witness, fill_args, generate_corpus, read_cases, write_corpus,
)
from .errors import DomainError
from .evaluator import eval_budgeted, eval_over_expansion
from .grammar import parse_formula, read_corpus, render
from .indiscernibles import IndiscernibleWitness, mine_diagonal, mine_indiscernibles, run_checks
from .satclass import (
    cofinal_stability_audit, definable_class_check, nabla_audit, tarski_audit,
)
from .star import star, star_pnf
from .syntax import arity, exists_depth, is_delta0, normalize_connectives, sorted_free_vars


class UsageError(Exception):
    pass


def _dump(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _ints(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _formulas(args) -> list:
    if getattr(args, "formula", None):
        return [parse_formula(args.formula, args.language)]
    if getattr(args, "input", None):
        return read_corpus(_read(args.input), args.language)
    raise UsageError("give --formula or --in")


# -- commands ----------------------------------------------------------------------


def cmd_parse(args) -> int:
    rows = []
    for f in _formulas(args):
        rows.append({
            "input": render(f),
            "code": str(goedel_encode(f)),
            "arity": arity(f),
            "delta0": is_delta0(f),
            "exists_depth": exists_depth(normalize_connectives(f)),
        })
    _dump(rows, args.out)
    return 0


def cmd_star(args) -> int:
    rows = []
    for f in _formulas(args):
        s = star(normalize_connectives(f))
        p = star_pnf(f)
        rows.append({"input": render(f), "star": render(s.star), "k": s.k,
                     "pnf_star": render(p.star), "pnf_k": p.k})
    _dump(rows, args.out)
    return 0


def cmd_eval(args) -> int:
    f = parse_formula(args.formula, args.language)
    values = _ints(args.args)
    vs = sorted_free_vars(f)
    if len(values) != len(vs):
        raise UsageError(f"formula has {len(vs)} free variables, --args gave {len(values)}")
    env = dict(zip(vs, values))
    row = {"formula": render(f), "args": {str(v): val for v, val in env.items()}}
    if args.domain is not None:
        row["domain"] = args.domain
        row["I"] = list(_ints(args.I))
        row["value"] = eval_over_expansion(f, env, row["I"], args.domain)
    else:
        row["budget"] = args.budget
        row["value"] = eval_budgeted(f, env, args.budget).value
    _dump(row, args.out)
    return 0


def cmd_generate(args) -> int:
    text = write_corpus(generate_corpus(args.seed, args.depth, args.count))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _check_run_config(args) -> None:
    if not args.domain >= args.size >= 2:
        raise UsageError("need --domain >= --size >= 2")


def _mine(args, family):
    if args.diagonal:
        return mine_diagonal(family, args.domain, args.size, args.param_bound, args.guard,
                             r=args.r, pool=args.pool)
    return mine_indiscernibles(family, args.domain, args.size, args.guard, pool=args.pool)


def cmd_mine(args) -> int:
    _check_run_config(args)
    family = read_corpus(_read(args.family))
    w = _mine(args, family)
    _dump(w.to_json(), args.out)
    return 0


def _load_witness(path: str) -> IndiscernibleWitness:
    return IndiscernibleWitness.from_json(json.loads(_read(path)))


def cmd_check(args) -> int:
    w = _load_witness(args.witness)
    fresh = run_checks(w)
    embedded = {(c.scheme, c.index): c.passed for c in w.checks}
    rows = [dict(c.to_json(), embedded=embedded.get((c.scheme, c.index))) for c in fresh]
    _dump({
        "I": list(w.I),
        "N": w.N,
        "checks": rows,
        "all_pass": all(c.passed for c in fresh),
        "matches_embedded": all(r["embedded"] == r["pass"] for r in rows),
    }, args.out)
    return 0


def cmd_satclass(args) -> int:
    w = _load_witness(args.witness)
    cases = fill_args(read_cases(_read(args.corpus)), w, args.seed)
    guard = args.guard
    if args.audit == "nabla":
        report = nabla_audit(cases, w, args.budget, guard, args.variant)
    elif args.audit == "tarski":
        report = tarski_audit(cases, w, guard)
    else:
        report = cofinal_stability_audit(cases, w, args.tail_start, guard)
    report["guard"] = guard or w.guard
    _dump(report, args.out)
    return 0


def cmd_definable(args) -> int:
    theta = parse_formula(args.theta)
    family = read_corpus(_read(args.family))
    _dump(definable_class_check(theta, family, args.domain), args.out)
    return 0


def cmd_report(args) -> int:
    """mine, check and audit in one go; the output is one deterministic report."""
    _check_run_config(args)
    args.diagonal = True
    family = read_corpus(_read(args.family))
    w = _mine(args, family)
    if args.corpus:
        cases = fill_args(read_cases(_read(args.corpus)), w, args.seed)
    else:
        cases = cases_under_witness(family, w, args.cases, args.seed)
    fresh = run_checks(w)
    _dump({
        "version": __version__,
        "witness": w.to_json(),
        "recheck_matches": [c.to_json() for c in fresh] == [c.to_json() for c in w.checks],
        "nabla": nabla_audit(cases, w, args.budget),
        "nabla_pnf": nabla_audit(cases, w, args.budget, variant="pnf"),
        "tarski": tarski_audit(cases, w),
        "cofinal": cofinal_stability_audit(cases, w, min(args.tail_start, len(w.I) - 2)),
    }, args.out)
    return 0


# -- argument parsing -----------------------------------------------------------------


def _nat(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return v


def _pos(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="indisc", description="Indiscernibles and bounded truth toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, lang=True):
        sp.add_argument("--out", help="write JSON here instead of stdout")
        if lang:
            sp.add_argument("--language", choices=("LA", "LA_I"), default="LA")

    sp = sub.add_parser("parse", help="parse formulas and show code, arity, class")
    sp.add_argument("--formula")
    sp.add_argument("--in", dest="input")
    common(sp)
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("star", help="star and prenex-star transforms of a corpus")
    sp.add_argument("--formula")
    sp.add_argument("--in", dest="input")
    common(sp)
    sp.set_defaults(func=cmd_star)

    sp = sub.add_parser("eval", help="evaluate a formula")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--args", default="")
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--budget", type=_nat, default=1000)
    grp.add_argument("--domain", type=_nat)
    sp.add_argument("--I", default="", help="members of I (with --domain)")
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("generate", help="seeded random corpus")
    sp.add_argument("--seed", type=_nat, default=0)
    sp.add_argument("--depth", type=_nat, default=2)
    sp.add_argument("--count", type=_nat, default=10)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_generate)

    def mining(sp):
        sp.add_argument("--family", required=True)
        sp.add_argument("--domain", type=_nat, required=True)
        sp.add_argument("--size", type=_nat, required=True)
        sp.add_argument("--guard", choices=("relaxed", "strict"), default="relaxed")
        sp.add_argument("--param-bound", type=_nat)
        sp.add_argument("--r", type=_pos, default=1)
        sp.add_argument("--pool", type=_pos, help="candidate pool size for thinning")

    sp = sub.add_parser("mine", help="mine an indiscernible witness")
    mining(sp)
    sp.add_argument("--diagonal", action="store_true")
    common(sp, lang=False)
    sp.set_defaults(func=cmd_mine)

    sp = sub.add_parser("check", help="re-run the checks of a witness")
    sp.add_argument("--witness", required=True)
    common(sp, lang=False)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("satclass", help="audits of the induced satisfaction predicate")
    sp.add_argument("--witness", required=True)
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--audit", choices=("nabla", "tarski", "cofinal"), required=True)
    sp.add_argument("--budget", type=_nat, default=1000)
    sp.add_argument("--guard", choices=("relaxed", "strict"))
    sp.add_argument("--variant", choices=("star", "pnf"), default="star")
    sp.add_argument("--tail-start", type=_nat, default=1)
    sp.add_argument("--seed", type=_nat, default=0, help="for cases listed without arguments")
    common(sp, lang=False)
    sp.set_defaults(func=cmd_satclass)

    sp = sub.add_parser("definable", help="indiscernibility of a definable class")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--family", required=True)
    sp.add_argument("--domain", type=_nat, required=True)
    common(sp, lang=False)
    sp.set_defaults(func=cmd_definable)

    sp = sub.add_parser("report", help="mine, check and audit in one run")
    mining(sp)
    sp.add_argument("--budget", type=_nat, default=1000)
    sp.add_argument("--corpus")
    sp.add_argument("--cases", type=_pos, default=100)
    sp.add_argument("--seed", type=_nat, default=0)
    sp.add_argument("--tail-start", type=_nat, default=1)
    common(sp, lang=False)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DomainError as exc:
        sys.stderr.write(json.dumps(exc.to_json()) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io_error", "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
