"""Model, solution, report and trace documents; DOT export.

Model files (``.dssp``) are parsed as YAML, so both canonical JSON output and
hand-written fixtures with comments are accepted.  Everything this module
writes is canonical JSON: sorted states and events, agents and requirement
pairs in their original order, UTF-8, trailing newline.
"""

from __future__ import annotations

import json
import math
import re
from typing import Any, Iterable, Mapping, Sequence

import yaml

from .errors import ModelSyntaxError, StructuralError, ValidationError
from .model import (
    NO_SOLUTION,
    RELABEL_MARKER,
    Agent,
    Automaton,
    CostModel,
    GlobalSecret,
    Outcome,
    ProtectionPolicy,
    SecurityRequirement,
    Solution,
    SystemModel,
    Violation,
    validate_system,
)
from .oracle import VerificationReport
from .sct import Supervisor, is_relabelled, original_event, relabel_round
from .synthesis import SynthesisTrace

UNREACHABLE = "unreachable"


def _dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# models


class _Diag(list):
    def add(self, code: str, message: str, location: str = "") -> None:
        self.append(Violation(code, message, location))


def _load(text: str) -> Any:
    if not text.strip():
        raise ModelSyntaxError([Violation("SYNTAX", "empty document", "line 1")])
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ModelSyntaxError([Violation("SYNTAX", problem, where)]) from None


def _names(value: Any, where: str, diag: _Diag) -> list[str]:
    if not isinstance(value, list):
        diag.add("SCHEMA", "expected a list", where)
        return []
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (str, int)):
            diag.add("SCHEMA", f"expected a name, got {v!r}", f"{where}[{i}]")
        else:
            out.append(str(v))
    return out


def _agent(doc: Any, index: int, diag: _Diag) -> Agent | None:
    where = f"agents[{index - 1}]"
    if not isinstance(doc, dict):
        diag.add("SCHEMA", "agent must be a mapping", where)
        return None
    missing = [k for k in ("states", "initial", "transitions") if k not in doc]
    for k in missing:
        diag.add("SCHEMA", f"missing field {k!r}", where)
    unknown = set(doc) - {"name", "states", "initial", "secret_states", "protectable", "transitions"}
    for k in sorted(unknown, key=str):
        diag.add("SCHEMA", f"unknown field {k!r}", where)
    if missing:
        return None
    transitions = []
    raw = doc["transitions"]
    if not isinstance(raw, list):
        diag.add("SCHEMA", "transitions must be a list", f"{where}.transitions")
        raw = []
    for i, tr in enumerate(raw):
        parts = _names(tr, f"{where}.transitions[{i}]", diag)
        if len(parts) != 3:
            diag.add("SCHEMA", "transition must be [from, event, to]", f"{where}.transitions[{i}]")
            continue
        transitions.append(tuple(parts))
    return Agent(
        states=_names(doc["states"], f"{where}.states", diag),
        initial=None if doc["initial"] is None else str(doc["initial"]),
        transitions=transitions,
        protectable=_names(doc.get("protectable", []), f"{where}.protectable", diag),
        secret_states=_names(doc.get("secret_states", []), f"{where}.secret_states", diag),
        index=index,
        name=str(doc.get("name") or f"G{index}"),
    )


def _duplicates(doc: dict) -> list[Violation]:
    # the model keeps duplicate transitions, but duplicate list entries of
    # states / classes would silently collapse into sets
    out = []
    for a, agent in enumerate(doc.get("agents") or []):
        if not isinstance(agent, dict):
            continue
        for key in ("states", "secret_states", "protectable"):
            vals = agent.get(key)
            if isinstance(vals, list):
                seen = set()
                for v in vals:
                    if isinstance(v, (str, int)) and str(v) in seen:
                        out.append(Violation("DUPLICATE_NAME", f"{v!r} listed twice", f"agents[{a}].{key}"))
                    seen.add(str(v))
    for j, cls in enumerate(doc.get("cost_classes") or []):
        if isinstance(cls, list):
            names = [str(e) for e in cls if isinstance(e, (str, int)) and not isinstance(e, bool)]
            for e in sorted({e for e in names if names.count(e) > 1}):
                out.append(
                    Violation("COST_PARTITION_OVERLAP", f"event {e!r} listed twice in class {j + 1}", f"cost_classes[{j}]")
                )
    return out


_PATH_PART = re.compile(r"([^.\[\]]+)|\[(\d+)\]")


def _line_of(root: yaml.Node | None, location: str) -> int | None:
    node = root
    if node is None or not location:
        return None
    for key, idx in _PATH_PART.findall(location):
        if isinstance(node, yaml.MappingNode) and key:
            node = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and idx:
            i = int(idx)
            node = node.value[i] if i < len(node.value) else None
        else:
            node = None
        if node is None:
            return None
    return node.start_mark.line + 1


def _with_lines(text: str, diags: Sequence[Violation]) -> list[Violation]:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return list(diags)
    out = []
    for d in diags:
        line = _line_of(root, d.location)
        out.append(Violation(d.code, d.message, f"{d.location} (line {line})") if line else d)
    return out


def parse_model(text: str) -> SystemModel:
    """Parse and validate a model document.

    Raises :class:`ModelSyntaxError` for malformed documents and
    :class:`ValidationError` when the model violates an invariant.
    """
    doc = _load(text)
    diag = _Diag()
    if not isinstance(doc, dict):
        raise ModelSyntaxError([Violation("SCHEMA", "top level must be a mapping", "line 1")])
    for k in sorted(set(doc) - {"agents", "cost_classes", "secrets"}, key=str):
        diag.add("SCHEMA", f"unknown section {k!r}")
    for k in ("agents", "cost_classes", "secrets"):
        if k not in doc:
            diag.add("SCHEMA", f"missing section {k!r}")
    if diag:
        raise ModelSyntaxError(diag)

    agents_doc = doc["agents"] if isinstance(doc["agents"], list) else []
    if not isinstance(doc["agents"], list):
        diag.add("SCHEMA", "agents must be a list", "agents")
    agents = [_agent(a, i, diag) for i, a in enumerate(agents_doc, start=1)]

    classes = []
    if not isinstance(doc["cost_classes"], list):
        diag.add("SCHEMA", "cost_classes must be a list", "cost_classes")
    else:
        classes = [_names(c, f"cost_classes[{j}]", diag) for j, c in enumerate(doc["cost_classes"])]

    pairs = []
    if not isinstance(doc["secrets"], list):
        diag.add("SCHEMA", "secrets must be a list", "secrets")
    else:
        for p, entry in enumerate(doc["secrets"]):
            where = f"secrets[{p}]"
            if not isinstance(entry, dict) or set(entry) != {"tuple", "protections"}:
                diag.add("SCHEMA", "secret must be {tuple: [...], protections: r}", where)
                continue
            comps = _names(entry["tuple"], f"{where}.tuple", diag)
            r = entry["protections"]
            if isinstance(r, bool) or not isinstance(r, int):
                diag.add("SCHEMA", f"protections must be an integer, got {r!r}", where)
                continue
            pairs.append((GlobalSecret(tuple(comps)), r))
    if diag:
        raise ModelSyntaxError(_with_lines(text, diag))

    model = SystemModel(tuple(agents), CostModel(tuple(classes)), SecurityRequirement(tuple(pairs)))
    violations = _duplicates(doc) + validate_system(model)
    if violations:
        raise ValidationError(_with_lines(text, violations))
    return model


def model_to_doc(model: SystemModel) -> dict:
    return {
        "agents": [
            {
                "name": a.label,
                "states": sorted(a.states),
                "initial": a.initial,
                "secret_states": sorted(a.secret_states),
                "protectable": sorted(a.protectable),
                "transitions": [list(t) for t in a.transitions],
            }
            for a in model.agents
        ],
        "cost_classes": [sorted(c) for c in model.cost_model.classes],
        "secrets": [{"tuple": list(s.components), "protections": r} for s, r in model.requirement],
    }


def serialize_model(model: SystemModel) -> str:
    return _dump(model_to_doc(model))


# ---------------------------------------------------------------------------
# solutions


def _policy_doc(policy: ProtectionPolicy) -> dict[str, list[str]]:
    return {q: sorted(es) for q, es in policy.assignment.items()}


def solution_to_doc(solution: Solution | Outcome) -> dict:
    if solution is NO_SOLUTION:
        return {"status": "NO_SOLUTION"}
    return {
        "status": "SOLUTION",
        "level": solution.level,
        "policies": [
            {"agent": i, "protect": _policy_doc(p)} for i, p in enumerate(solution.policies, start=1)
        ],
    }


def serialize_solution(solution: Solution | Outcome) -> str:
    return _dump(solution_to_doc(solution))


def parse_solution(text: str, n_agents: int) -> Solution | Outcome:
    """Read a policy document.  A blank document means "protect nothing"."""
    if not text.strip():
        return Solution(tuple(ProtectionPolicy({}, i) for i in range(1, n_agents + 1)), 0)
    doc = _load(text)
    if not isinstance(doc, dict):
        raise ModelSyntaxError([Violation("SCHEMA", "top level must be a mapping")])
    if doc.get("status") == "NO_SOLUTION":
        return NO_SOLUTION
    diag = _Diag()
    found: dict[int, ProtectionPolicy] = {}
    for p, entry in enumerate(doc.get("policies") or []):
        where = f"policies[{p}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("agent"), int):
            diag.add("SCHEMA", "policy entry needs an integer 'agent'", where)
            continue
        i = entry["agent"]
        if not 1 <= i <= n_agents or i in found:
            diag.add("SCHEMA", f"agent index {i} is out of range or repeated", where)
            continue
        protect = entry.get("protect") or {}
        if not isinstance(protect, dict):
            diag.add("SCHEMA", "'protect' must map states to event lists", where)
            continue
        found[i] = ProtectionPolicy(
            {str(q): frozenset(_names(es, f"{where}.protect.{q}", diag)) for q, es in protect.items()}, i
        )
    if diag:
        raise ModelSyntaxError(diag)
    level = doc.get("level", 0)
    return Solution(
        tuple(found.get(i, ProtectionPolicy({}, i)) for i in range(1, n_agents + 1)),
        level if isinstance(level, int) else 0,
    )


# ---------------------------------------------------------------------------
# reports and traces


def weight_token(w: int | float) -> int | str:
    return UNREACHABLE if w == math.inf else int(w)


def report_to_doc(model: SystemModel, report: VerificationReport) -> dict:
    return {
        "status": "PASS" if report.passed else "FAIL",
        "policy_level": report.policy_level,
        "pairs": [
            {
                "tuple": list(p.secret),
                "protections": p.r,
                "weights": [weight_token(w) for w in p.weights],
                "satisfied_by": list(p.satisfying),
            }
            for p in report.pairs
        ],
    }


def format_report(report: VerificationReport) -> str:
    lines = []
    for n, p in enumerate(report.pairs, start=1):
        weights = ", ".join(f"G{i}={weight_token(w)}" for i, w in enumerate(p.weights, start=1))
        who = ", ".join(f"G{i}" for i in p.satisfying) or "none"
        status = "ok" if p.ok else "FAIL"
        lines.append(f"pair {n} ({', '.join(p.secret)}) r={p.r}: {status}; weights {weights}; satisfied by {who}")
    lines.append(f"policy level: {report.policy_level}")
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines) + "\n"


def trace_to_doc(trace: SynthesisTrace) -> dict:
    out = []
    for pt in trace.pairs:
        cands = []
        for c in pt.candidates:
            res = c.result
            cands.append(
                {
                    "agent": c.agent,
                    "secret_state": c.component,
                    "result": "null" if res.is_null else "ok",
                    "level": res.level,
                    "round_levels": list(res.round_levels),
                    "pinned_level": res.pinned,
                    "policy": None if res.is_null else _policy_doc(res.policy),
                }
            )
        out.append(
            {
                "pair": pt.index + 1,
                "tuple": list(pt.secret),
                "protections": pt.r,
                "candidates": cands,
                "W": [[i, k] for i, k in pt.w],
                "chosen": pt.chosen,
                "V": list(pt.levels_so_far),
            }
        )
    return {"pairs": out}


def format_trace(trace: SynthesisTrace) -> str:
    lines = []
    for pt in trace.pairs:
        lines.append(f"pair {pt.index + 1} ({', '.join(pt.secret)}) r={pt.r}")
        for c in pt.candidates:
            res = c.result
            if res.is_null:
                lines.append(f"  G{c.agent} {c.component}: null")
            else:
                t = ", ".join(map(str, res.round_levels))
                pinned = " (pinned level)" if res.pinned else ""
                lines.append(f"  G{c.agent} {c.component}: level {res.level}, T = {{{t}}}{pinned}")
        w = ", ".join(f"(G{i}, {k})" for i, k in pt.w)
        lines.append(f"  W = {{{w}}}")
        lines.append(f"  chosen: {'none' if pt.chosen is None else f'G{pt.chosen}'}")
        lines.append(f"  V = [{', '.join(map(str, pt.levels_so_far))}]")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def display_event(event: str) -> str:
    if is_relabelled(event):
        return f"{original_event(event)}′"
    return event


def export_dot(
    automaton: Automaton | Supervisor,
    policy: ProtectionPolicy | None = None,
    relabel_log: Mapping[tuple[str, str, int], str] | None = None,
    *,
    secret_states: Iterable[str] | None = None,
    name: str = "G",
) -> str:
    """Render an agent or supervisor as a DOT digraph.

    Secret states are double circles, protected transitions carry
    ``protected=true`` and relabelled ones ``relabelled=true`` (drawn red).
    """
    if isinstance(automaton, Supervisor):
        secrets = set(getattr(automaton.parent, "secret_states", ()))
        automaton = automaton.as_automaton()
    else:
        secrets = set(getattr(automaton, "secret_states", ()))
    if secret_states is not None:
        secrets = set(secret_states)
    policy = policy or ProtectionPolicy({})
    delta = automaton.delta
    for q, e in policy.pairs():
        if (q, e) not in delta:
            raise StructuralError(f"policy names missing transition {q} -{e}->")
    renamed = {(q, e): fresh for (q, e, _), fresh in (relabel_log or {}).items()}

    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for q in sorted(automaton.states):
        attrs = ["shape=doublecircle", "secret=true"] if q in secrets else ["shape=circle"]
        if q == automaton.initial:
            attrs.append("initial=true")
            attrs.append("penwidth=2")
        lines.append(f"  {_q(q)} [{', '.join(attrs)}];")
    for q, e, t in automaton.transitions:
        shown = renamed.get((q, e), e)
        attrs = [f"label={_q(display_event(shown))}"]
        if is_relabelled(shown):
            attrs += ["relabelled=true", "color=red", "fontcolor=red", f"round={relabel_round(shown)}"]
        if e in policy(q):
            attrs += ["protected=true", "style=bold", "color=blue"]
        lines.append(f"  {_q(q)} -> {_q(t)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "UNREACHABLE",
    "RELABEL_MARKER",
    "parse_model",
    "serialize_model",
    "model_to_doc",
    "serialize_solution",
    "solution_to_doc",
    "parse_solution",
    "report_to_doc",
    "format_report",
    "trace_to_doc",
    "format_trace",
    "export_dot",
    "display_event",
]
