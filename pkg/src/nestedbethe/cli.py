"""Command line entry point: ``nestedbethe verify`` and ``nestedbethe sweep``.

Exit codes: 0 when every trial passes, 1 when at least one identity
fails, 2 for configuration errors (including an exceeded budget).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from .checks import (
    CHECK_NAMES,
    DEFAULT_BUDGET,
    DEFAULT_TRIALS,
    BudgetExceeded,
    CheckSpec,
    InvalidConfig,
    run_check,
    summarize,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

SWEEP_FIELDS = {
    "check", "n", "m", "xi", "max_sites", "trials", "seed", "lambda", "x", "budget", "inject_fault",
}


def dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _emit(report: dict, out: str | None) -> None:
    text = dump(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_xi(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",")) if text.strip() else ()
    except ValueError as exc:
        raise InvalidConfig(f"bad --xi {text!r}: {exc}") from exc


def _parse_lambda(text: str | None):
    if text is None:
        return None
    return tuple(p.strip() for p in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nestedbethe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run one named check")
    verify.add_argument("--check", required=True, choices=CHECK_NAMES)
    verify.add_argument("--n", type=int, required=True)
    verify.add_argument("--m", type=int)
    verify.add_argument("--xi", default="", help="block sizes, e.g. 1,2,1")
    verify.add_argument("--lambda", dest="lam", help="highest weight as p/q values, comma separated")
    verify.add_argument("--x", help="evaluation point as p/q")
    verify.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out")
    verify.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    verify.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    sweep = sub.add_parser("sweep", help="run the cross product described by a JSON config")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out")
    sweep.add_argument("--fail-fast", action="store_true")
    return parser


def _verify(args) -> int:
    spec = CheckSpec(
        name=args.check,
        n=args.n,
        xi=_parse_xi(args.xi),
        m=args.m,
        trials=args.trials,
        seed=args.seed,
        lam=_parse_lambda(args.lam),
        x=args.x,
        budget=args.budget,
        inject_fault=args.inject_fault,
    )
    report = run_check(spec)
    _emit(report, args.out)
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


# -- sweep configs ------------------------------------------------------------


def _as_list(value):
    return value if isinstance(value, list) else [value]


def shapes_up_to(n: int, max_sites: int) -> list[tuple[int, ...]]:
    """All shapes for ``gl_n`` with at most ``max_sites`` variables, in lexicographic order."""
    return [
        xi for xi in itertools.product(range(max_sites + 1), repeat=n - 1) if sum(xi) <= max_sites
    ]


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(config, dict):
        raise InvalidConfig(f"{path}: top level must be an object")
    checks = config.get("checks", [])
    if not isinstance(checks, list):
        raise InvalidConfig(f"{path}: field 'checks' must be a list")
    for k, entry in enumerate(checks):
        if not isinstance(entry, dict):
            raise InvalidConfig(f"{path}: checks[{k}] must be an object")
        unknown = set(entry) - SWEEP_FIELDS
        if unknown:
            raise InvalidConfig(f"{path}: checks[{k}]: unknown field(s) {sorted(unknown)}")
        if "check" not in entry or "n" not in entry:
            raise InvalidConfig(f"{path}: checks[{k}]: fields 'check' and 'n' are required")
    return config


def expand_config(config: dict) -> list[CheckSpec]:
    """Cross product of list-valued fields of every entry, in file order.

    ``xi`` is ``"all"`` (every shape with at most ``max_sites`` variables,
    default 4), one shape, or a list of shapes; listed shapes are paired
    with each ``n`` of matching length.
    """
    specs = []
    for k, entry in enumerate(config.get("checks", [])):
        where = f"checks[{k}]"
        try:
            names = _as_list(entry["check"])
            ns = _as_list(entry["n"])
            seeds = _as_list(entry.get("seed", 0))
            trials = entry.get("trials", DEFAULT_TRIALS)
            budget = entry.get("budget", DEFAULT_BUDGET)
            lam = entry.get("lambda")
            x = entry.get("x")
            for name, n, seed in itertools.product(names, ns, seeds):
                if not isinstance(n, int):
                    raise InvalidConfig(f"n must be an integer, got {n!r}")
                xi_field = entry.get("xi")
                if xi_field in (None, "all"):
                    xis = shapes_up_to(n, int(entry.get("max_sites", 4)))
                else:
                    # explicit shapes are matched to each n by length
                    listed = [
                        _parse_xi(v) if isinstance(v, str) else tuple(v) for v in _as_list_of_shapes(xi_field)
                    ]
                    xis = [xi for xi in listed if len(xi) == n - 1]
                    if not xis:
                        raise InvalidConfig(f"no listed shape has {n - 1} entries for n={n}")
                m_field = entry.get("m", "all")
                for xi in xis:
                    ms = [None] if m_field in (None, "all") else _as_list(m_field)
                    for m in ms:
                        specs.append(
                            CheckSpec(
                                name=name,
                                n=n,
                                xi=xi,
                                m=m,
                                trials=trials,
                                seed=seed,
                                lam=tuple(str(v) for v in lam) if lam is not None else None,
                                x=str(x) if x is not None else None,
                                budget=budget,
                                inject_fault=bool(entry.get("inject_fault", False)),
                            )
                        )
        except InvalidConfig as exc:
            raise InvalidConfig(f"{where}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(f"{where}: {exc}") from exc
    return specs


def _as_list_of_shapes(value):
    # a single shape may be written as "1,2" or [1, 2]; several as a list of those
    if isinstance(value, str):
        return [value]
    if isinstance(value, list) and value and all(isinstance(v, int) for v in value):
        return [value]
    if isinstance(value, list) and not value:
        return [[]]
    return value


def _skip(spec: CheckSpec) -> bool:
    """Sweep entries quietly drop combinations a check cannot run on."""
    if spec.name == "xi-m-zero":
        cuts = [spec.m] if spec.m is not None else range(1, spec.n)
        return not any(spec.xi[m - 1] == 0 for m in cuts)
    return False


def run_sweep(config: dict, fail_fast: bool = False) -> dict:
    specs = [s for s in expand_config(config) if not _skip(s)]
    trials, runs = [], []
    for spec in specs:
        try:
            report = run_check(spec)
        except InvalidConfig as exc:
            raise InvalidConfig(f"{spec.name} n={spec.n} xi={list(spec.xi)} m={spec.m}: {exc}") from exc
        label = {k: report["config"][k] for k in ("check", "n", "m", "xi", "seed")}
        for t in report["trials"]:
            trials.append(dict(t, **label))
        runs.append(dict(label, **report["summary"]))
        if fail_fast and report["summary"]["failed"]:
            break
    summary = summarize(trials)
    summary["runs"] = runs
    return {"config": config, "trials": trials, "summary": summary}


def _sweep(args) -> int:
    config = load_config(args.config)
    report = run_sweep(config, fail_fast=args.fail_fast or bool(config.get("fail_fast", False)))
    _emit(report, args.out)
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        return _sweep(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
