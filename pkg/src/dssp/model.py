"""Domain types for a distributed system of deterministic agents.

An :class:`Agent` is a partial-transition DFA whose events are split into
protectable and unprotectable ones and which stores some local secret
states.  A :class:`SystemModel` bundles the agents together with the cost
classes of the protectable events and the security requirement: an ordered
list of global secrets (one local secret per agent) and the number of
protections each one needs.

All values are immutable after construction.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import LevelOutOfRangeError

#: Prefix of event names produced by relabelling.  Never valid in user input.
RELABEL_MARKER = "~"

_TOKEN = re.compile(r"^[\w.:\-]+$")

Transition = tuple[str, str, str]


def is_valid_token(name: object) -> bool:
    return isinstance(name, str) and bool(_TOKEN.match(name))


@dataclass(frozen=True)
class Automaton:
    """Deterministic automaton with a partial transition function.

    ``initial`` is ``None`` for the empty automaton (e.g. after the initial
    state itself was removed).  Transitions are ``(source, event, target)``
    triples kept in sorted order; duplicates of a ``(source, event)`` pair are
    retained so that :func:`validate_system` can report them.
    """

    states: frozenset[str]
    initial: str | None
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(
            self, "transitions", tuple(sorted(tuple(t) for t in self.transitions))
        )

    @cached_property
    def delta(self) -> dict[tuple[str, str], str]:
        """``(state, event) -> target``; the first triple wins on duplicates."""
        out: dict[tuple[str, str], str] = {}
        for q, e, t in self.transitions:
            out.setdefault((q, e), t)
        return out

    @cached_property
    def alphabet(self) -> frozenset[str]:
        return frozenset(e for _, e, _ in self.transitions)

    @cached_property
    def _successors(self) -> dict[str, list[tuple[str, str]]]:
        out: dict[str, list[tuple[str, str]]] = {}
        for q, e, t in self.transitions:
            out.setdefault(q, []).append((e, t))
        return out

    def outgoing(self, q: str) -> list[tuple[str, str]]:
        """``(event, target)`` pairs leaving ``q``."""
        return self._successors.get(q, [])

    @property
    def is_empty(self) -> bool:
        return self.initial is None or self.initial not in self.states


@dataclass(frozen=True)
class Agent(Automaton):
    """One local component ``G^i`` with its protectable events and secrets."""

    protectable: frozenset[str] = frozenset()
    secret_states: frozenset[str] = frozenset()
    index: int = 1
    name: str = ""

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "protectable", frozenset(self.protectable))
        object.__setattr__(self, "secret_states", frozenset(self.secret_states))

    @cached_property
    def alphabet(self) -> frozenset[str]:
        return frozenset(e for _, e, _ in self.transitions) | self.protectable

    @property
    def unprotectable(self) -> frozenset[str]:
        return self.alphabet - self.protectable

    @property
    def label(self) -> str:
        return self.name or f"G{self.index}"


@dataclass(frozen=True)
class CostModel:
    """Ordered, pairwise disjoint cost classes; class ``j`` is 1-based."""

    classes: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(frozenset(c) for c in self.classes))

    @property
    def m(self) -> int:
        return len(self.classes)

    def prefix_union(self, k: int) -> frozenset[str]:
        if not 1 <= k <= self.m:
            raise LevelOutOfRangeError(f"level {k} outside [1, {self.m}]")
        return frozenset().union(*self.classes[:k])

    @cached_property
    def _level_of(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for j, cls in enumerate(self.classes, start=1):
            for e in cls:
                out.setdefault(e, j)
        return out

    def level_of(self, event: str) -> int | None:
        return self._level_of.get(event)

    @property
    def events(self) -> frozenset[str]:
        return frozenset(self._level_of)


@dataclass(frozen=True)
class GlobalSecret:
    components: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> str:
        return self.components[i]


@dataclass(frozen=True)
class SecurityRequirement:
    pairs: tuple[tuple[GlobalSecret, int], ...]

    def __post_init__(self):
        pairs = tuple(
            (s if isinstance(s, GlobalSecret) else GlobalSecret(s), r) for s, r in self.pairs
        )
        object.__setattr__(self, "pairs", pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class SystemModel:
    agents: tuple[Agent, ...]
    cost_model: CostModel
    requirement: SecurityRequirement

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return self.cost_model.m

    def agent(self, index: int) -> Agent:
        return self.agents[index - 1]


@dataclass(frozen=True)
class ProtectionPolicy:
    """Maps each state to the protectable events protected there.

    Only non-empty entries are stored; missing states map to the empty set.
    The same shape doubles as a control policy (events disabled by a
    supervisor), hence the :data:`ControlPolicy` alias.
    """

    assignment: Mapping[str, frozenset[str]] = field(default_factory=dict)
    agent_index: int = 0

    def __post_init__(self):
        cleaned = {q: frozenset(es) for q, es in self.assignment.items() if es}
        object.__setattr__(self, "assignment", dict(sorted(cleaned.items())))

    def __call__(self, q: str) -> frozenset[str]:
        return self.assignment.get(q, frozenset())

    def __bool__(self) -> bool:
        return bool(self.assignment)

    def pairs(self) -> Iterable[tuple[str, str]]:
        for q, es in self.assignment.items():
            for e in sorted(es):
                yield q, e

    @property
    def events(self) -> frozenset[str]:
        return frozenset().union(*self.assignment.values()) if self.assignment else frozenset()

    def union(self, other: "ProtectionPolicy") -> "ProtectionPolicy":
        merged = {q: set(es) for q, es in self.assignment.items()}
        for q, es in other.assignment.items():
            merged.setdefault(q, set()).update(es)
        return ProtectionPolicy(merged, self.agent_index or other.agent_index)

    def with_index(self, agent_index: int) -> "ProtectionPolicy":
        return ProtectionPolicy(self.assignment, agent_index)


ControlPolicy = ProtectionPolicy


class Outcome(enum.Enum):
    NO_SOLUTION = "NO_SOLUTION"

    def __repr__(self) -> str:
        return self.value


NO_SOLUTION = Outcome.NO_SOLUTION


@dataclass(frozen=True)
class Solution:
    policies: tuple[ProtectionPolicy, ...]
    level: int

    def __post_init__(self):
        object.__setattr__(self, "policies", tuple(self.policies))

    def policy(self, agent_index: int) -> ProtectionPolicy:
        return self.policies[agent_index - 1]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    location: str = ""

    def __str__(self) -> str:
        where = f" at {self.location}" if self.location else ""
        return f"{self.code}{where}: {self.message}"


def _validate_agent(agent: Agent, where: str) -> list[Violation]:
    out: list[Violation] = []
    for q in sorted(agent.states):
        if not is_valid_token(q):
            out.append(Violation("STATE_NAME_INVALID", f"state name {q!r} is not a valid token", where))
    if agent.initial is None or agent.initial not in agent.states:
        out.append(Violation("INITIAL_NOT_STATE", f"initial state {agent.initial!r} is not a state", where))
    seen: dict[tuple[str, str], str] = {}
    for i, (q, e, t) in enumerate(agent.transitions):
        tw = f"{where}.transitions[{i}]"
        for end in (q, t):
            if end not in agent.states:
                out.append(Violation("TRANSITION_ENDPOINT_UNKNOWN", f"{end!r} is not a state", tw))
        if (q, e) in seen:
            out.append(
                Violation(
                    "NONDETERMINISTIC_TRANSITION",
                    f"more than one transition from {q!r} on {e!r}",
                    tw,
                )
            )
        seen.setdefault((q, e), t)
    for e in sorted(agent.alphabet):
        if isinstance(e, str) and e.startswith(RELABEL_MARKER):
            out.append(Violation("EVENT_NAME_RESERVED", f"event {e!r} uses the reserved relabel marker", where))
        elif not is_valid_token(e):
            out.append(Violation("EVENT_NAME_INVALID", f"event name {e!r} is not a valid token", where))
    for q in sorted(agent.secret_states - agent.states):
        out.append(Violation("SECRET_NOT_STATE", f"secret {q!r} is not a state", where))
    return out


def validate_system(model: SystemModel) -> list[Violation]:
    """Return every well-formedness violation of ``model`` (empty when valid)."""
    out: list[Violation] = []
    if not model.agents:
        out.append(Violation("NO_AGENTS", "a system needs at least one agent"))
    for pos, agent in enumerate(model.agents, start=1):
        where = f"agents[{pos - 1}]"
        if agent.index != pos:
            out.append(
                Violation("AGENT_INDEX_GAP", f"agent at position {pos} has index {agent.index}", where)
            )
        out.extend(_validate_agent(agent, where))

    all_protectable = frozenset().union(*(a.protectable for a in model.agents))
    classes = model.cost_model.classes
    if not classes:
        out.append(Violation("COST_CLASSES_EMPTY", "at least one cost class is required", "cost_classes"))
    seen: dict[str, int] = {}
    for j, cls in enumerate(classes, start=1):
        where = f"cost_classes[{j - 1}]"
        if not cls:
            out.append(Violation("COST_CLASS_EMPTY", f"cost class {j} is empty", where))
        for e in sorted(cls):
            if e in seen:
                out.append(
                    Violation(
                        "COST_PARTITION_OVERLAP",
                        f"event {e!r} appears in classes {seen[e]} and {j}",
                        where,
                    )
                )
            else:
                seen[e] = j
            if e not in all_protectable:
                out.append(
                    Violation("COST_CLASS_UNKNOWN_EVENT", f"event {e!r} is not protectable in any agent", where)
                )
    for e in sorted(all_protectable - seen.keys()):
        out.append(
            Violation("COST_PARTITION_INCOMPLETE", f"protectable event {e!r} has no cost class", "cost_classes")
        )

    if not model.requirement.pairs:
        out.append(Violation("REQUIREMENT_EMPTY", "the security requirement has no pairs", "secrets"))
    for p, (secret, r) in enumerate(model.requirement.pairs):
        where = f"secrets[{p}]"
        if not isinstance(r, int) or isinstance(r, bool) or r < 1:
            out.append(Violation("REQUIREMENT_R_INVALID", f"protections must be an integer >= 1, got {r!r}", where))
        if len(secret) != model.n:
            out.append(
                Violation(
                    "SECRET_ARITY_MISMATCH",
                    f"secret has {len(secret)} components but the system has {model.n} agents",
                    where,
                )
            )
            continue
        for i, (q, agent) in enumerate(zip(secret.components, model.agents), start=1):
            if q not in agent.secret_states:
                out.append(
                    Violation(
                        "SECRET_COMPONENT_NOT_SECRET",
                        f"component {i} ({q!r}) is not a secret state of {agent.label}",
                        where,
                    )
                )
    return out


def effective_controllable(agent: Agent, cost_model: CostModel, k: int) -> frozenset[str]:
    """Events a supervisor may disable in ``agent`` at cost level ``k``."""
    return cost_model.prefix_union(k) & agent.protectable
