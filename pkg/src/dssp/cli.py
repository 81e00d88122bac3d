"""Command-line front end.

Exit codes: 0 success, 1 no solution / verification failed / "no",
2 invalid input or arguments, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from pathlib import Path

from . import __version__
from .errors import DiagnosticError, DsspError
from .generate import GenParams, random_system
from .model import NO_SOLUTION, ProtectionPolicy, Solution, SystemModel
from .modelio import (
    export_dot,
    format_report,
    format_trace,
    parse_model,
    parse_solution,
    report_to_doc,
    serialize_model,
    serialize_solution,
    trace_to_doc,
)
from .oracle import is_solvable, oracle_min_level, verify_policy
from .synthesis import drcmc

EXIT_OK, EXIT_NO, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(f"dssp: {msg}", file=sys.stderr)


def _color(text: str, ok: bool) -> str:
    if os.environ.get("DSSP_COLOR", "auto") == "never" or not sys.stdout.isatty():
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None


def _write(path: str | Path, text: str) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from None


def _outdir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create directory {path}: {exc}") from None
    return out


def _load_model(path: str) -> SystemModel:
    return parse_model(_read(path))


def _format_solution(model: SystemModel, solution) -> str:
    if solution is NO_SOLUTION:
        return "NO_SOLUTION\n"
    lines = [f"level {solution.level}"]
    for agent, policy in zip(model.agents, solution.policies):
        entries = "; ".join(f"{q} -> {{{', '.join(sorted(es))}}}" for q, es in policy.assignment.items())
        lines.append(f"{agent.label}: {entries or '(nothing protected)'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args) -> int:
    model = _load_model(args.model)
    solution, trace = drcmc(model, mode="greedy" if args.greedy else "repaired")
    doc = serialize_solution(solution)
    if args.out:
        _write(args.out, doc)
    if args.format == "machine":
        if not args.out:
            sys.stdout.write(doc)
    else:
        sys.stdout.write(_format_solution(model, solution))

    if args.trace is not None:
        text = format_trace(trace) if args.format == "text" else json.dumps(
            trace_to_doc(trace), indent=2, ensure_ascii=False
        ) + "\n"
        if args.trace == "-":
            sys.stderr.write(text)
        else:
            _write(args.trace, text)

    if args.dot:
        out = _outdir(args.dot)
        for agent in model.agents:
            _write(out / f"G{agent.index}_original.dot", export_dot(agent, name=agent.label))
        for pt in trace.pairs:
            for cand in pt.candidates:
                for rd in cand.result.rounds:
                    stem = f"pair{pt.index + 1}_G{cand.agent}_round{rd.index}"
                    _write(out / f"{stem}_plant.dot", export_dot(rd.plant, rd.policy, name=stem))
                    if rd.supervisor is not None:
                        _write(
                            out / f"{stem}_supervisor.dot",
                            export_dot(rd.supervisor, name=f"{stem}_supervisor"),
                        )
    return EXIT_NO if solution is NO_SOLUTION else EXIT_OK


def cmd_verify(args) -> int:
    model = _load_model(args.model)
    solution = parse_solution(_read(args.policy), model.n)
    if solution is NO_SOLUTION:
        policies = [ProtectionPolicy({}, a.index) for a in model.agents]
    else:
        policies = list(solution.policies)
    report = verify_policy(model, policies)
    if args.format == "machine":
        sys.stdout.write(json.dumps(report_to_doc(model, report), indent=2, ensure_ascii=False) + "\n")
    else:
        text = format_report(report)
        last = "PASS" if report.passed else "FAIL"
        sys.stdout.write(text[: -len(last) - 1] + _color(last, report.passed) + "\n")
    return EXIT_OK if report.passed else EXIT_NO


def cmd_solvable(args) -> int:
    ok = is_solvable(_load_model(args.model))
    print(_color("yes" if ok else "no", ok))
    return EXIT_OK if ok else EXIT_NO


def cmd_oracle_k(args) -> int:
    k = oracle_min_level(_load_model(args.model))
    print("none" if k is None else k)
    return EXIT_NO if k is None else EXIT_OK


def _range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)(?:[-:](\d+))?", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected N or LO-HI, got {text!r}")
    lo = int(m.group(1))
    return lo, int(m.group(2) or lo)


def cmd_gen(args) -> int:
    defaults = GenParams()
    params = GenParams(
        seed=args.seed,
        n_agents=args.agents or defaults.n_agents,
        states_per_agent=args.states or defaults.states_per_agent,
        events_per_agent=args.events or defaults.events_per_agent,
        transition_density=defaults.transition_density if args.density is None else args.density,
        m_classes=args.classes or defaults.m_classes,
        n_secret_pairs=args.pairs or defaults.n_secret_pairs,
        secrets_per_agent=args.secrets or defaults.secrets_per_agent,
        r_max=defaults.r_max if args.r_max is None else args.r_max,
        protectable_fraction=defaults.protectable_fraction if args.protectable is None else args.protectable,
        shared_event_fraction=defaults.shared_event_fraction if args.shared is None else args.shared,
    )
    text = serialize_model(random_system(params))
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_render(args) -> int:
    model = _load_model(args.model)
    policies = [None] * model.n
    if args.policy:
        solution = parse_solution(_read(args.policy), model.n)
        if isinstance(solution, Solution):
            policies = list(solution.policies)
    out = _outdir(args.dot)
    for agent, policy in zip(model.agents, policies):
        _write(out / f"G{agent.index}.dot", export_dot(agent, policy, name=agent.label))
    return EXIT_OK


def cmd_validate(args) -> int:
    model = _load_model(args.model)
    print(f"valid: {model.n} agents, {model.m} cost classes, {len(model.requirement)} requirement pairs")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dssp", description="Minimum-cost protection of distributed secrets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesise protection policies")
    p.add_argument("model")
    p.add_argument("--out", help="write the solution document here")
    p.add_argument("--trace", nargs="?", const="-", help="emit the synthesis trace (to PATH, default stderr)")
    p.add_argument("--dot", metavar="DIR", help="write DOT graphs of every intermediate automaton")
    p.add_argument("--format", choices=("text", "machine"), default="machine")
    p.add_argument("--greedy", action="store_true", help="greedy rounds only, without the fixed-level fallback")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check policies against the security requirement")
    p.add_argument("model")
    p.add_argument("policy")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solvable", help="decide solvability (no synthesis)")
    p.add_argument("model")
    p.set_defaults(func=cmd_solvable)

    p = sub.add_parser("oracle-k", help="least achievable cost level (no synthesis)")
    p.add_argument("model")
    p.set_defaults(func=cmd_oracle_k)

    p = sub.add_parser("gen", help="generate a random model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agents", type=_range)
    p.add_argument("--states", type=_range)
    p.add_argument("--events", type=_range)
    p.add_argument("--density", type=float)
    p.add_argument("--classes", type=_range)
    p.add_argument("--pairs", type=_range)
    p.add_argument("--secrets", type=_range, help="secret states per agent")
    p.add_argument("--r-max", type=int)
    p.add_argument("--protectable", type=float, help="fraction of events that are protectable")
    p.add_argument("--shared", type=float, help="fraction of events drawn from other agents")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("render", help="write one DOT graph per agent")
    p.add_argument("model")
    p.add_argument("--dot", metavar="DIR", required=True)
    p.add_argument("--policy", help="overlay a solution document")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("validate", help="parse and validate a model")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _err(str(exc))
        return exc.code
    except DiagnosticError as exc:
        for d in exc.diagnostics:
            _err(str(d))
        return EXIT_INVALID
    except DsspError as exc:
        _err(str(exc))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
