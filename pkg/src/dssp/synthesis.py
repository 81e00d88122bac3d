"""Minimum-cost protection policy synthesis.

Three nested procedures:

``rcmc``
    one supervisor for one secret state, at the cheapest cost level that
    admits a non-empty supervisor;
``mrcmc``
    ``r`` rounds of ``rcmc``, relabelling the protected transitions as
    unprotectable between rounds so each round protects fresh transitions;
``drcmc``
    for every requirement pair, run ``mrcmc`` on each component and keep the
    cheapest candidate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError, ValidationError
from .model import (
    NO_SOLUTION,
    Agent,
    Automaton,
    ControlPolicy,
    CostModel,
    Outcome,
    ProtectionPolicy,
    Solution,
    SystemModel,
    effective_controllable,
    validate_system,
)
from .sct import Supervisor, derive_control_policy, relabel, spec_remove_secret, supremal_controllable


@dataclass(frozen=True)
class RcmcResult:
    supervisor: Supervisor | None
    level: int

    @property
    def is_null(self) -> bool:
        return self.supervisor is None


@dataclass(frozen=True)
class Round:
    """Intermediate objects of one ``mrcmc`` round, kept for tracing/rendering."""

    index: int
    plant: Automaton
    spec: Automaton
    supervisor: Supervisor | None
    level: int
    policy: ControlPolicy | None
    relabel_log: Mapping[tuple[str, str, int], str] = field(default_factory=dict)


@dataclass(frozen=True)
class MrcmcResult:
    policy: ControlPolicy | None
    level: int
    rounds: tuple[Round, ...] = ()
    pinned: bool = False

    @property
    def is_null(self) -> bool:
        return self.policy is None

    @property
    def round_levels(self) -> tuple[int, ...]:
        return tuple(rd.level for rd in self.rounds if rd.supervisor is not None)


def rcmc(plant: Agent, spec: Automaton, cost_model: CostModel) -> RcmcResult:
    """First level ``k = 1..m`` whose supremal controllable supervisor is non-empty."""
    for k in range(1, cost_model.m + 1):
        sup = supremal_controllable(plant, spec, effective_controllable(plant, cost_model, k))
        if not sup.is_empty:
            return RcmcResult(sup, k)
    return RcmcResult(None, 0)


def _run_rounds(agent: Agent, q_s: str, r: int, cost_model: CostModel, level: int | None) -> MrcmcResult:
    # level=None: each round takes the cheapest level (rcmc); otherwise every
    # round is pinned to ``level``
    current: Agent = agent
    union = ControlPolicy({}, agent.index)
    rounds: list[Round] = []
    for j in range(1, r + 1):
        spec = spec_remove_secret(current, q_s)
        if level is None:
            res = rcmc(current, spec, cost_model)
        else:
            sup = supremal_controllable(current, spec, effective_controllable(current, cost_model, level))
            res = RcmcResult(None, 0) if sup.is_empty else RcmcResult(sup, level)
        if res.is_null:
            rounds.append(Round(j, current, spec, None, 0, None))
            return MrcmcResult(None, 0, tuple(rounds), level is not None)
        policy = derive_control_policy(
            current, res.supervisor, effective_controllable(current, cost_model, res.level)
        ).with_index(agent.index)
        union = union.union(policy)
        log = {}
        nxt = current
        if j < r:
            relabelled = relabel(current, policy, j)
            nxt, log = relabelled.agent, relabelled.relabel_log
        rounds.append(Round(j, current, spec, res.supervisor, res.level, policy, log))
        current = nxt
    return MrcmcResult(union, max(rd.level for rd in rounds), tuple(rounds), level is not None)


def mrcmc(agent: Agent, q_s: str, r: int, cost_model: CostModel, *, mode: str = "repaired") -> MrcmcResult:
    """Policy protecting at least ``r`` transitions on every path to ``q_s``.

    ``mode="greedy"`` runs the greedy procedure only: each round picks its own
    cheapest level, then the protected transitions are relabelled.  Greedy
    rounds can fail (or overshoot the level) when one cheap round protects
    two transitions of the same path: relabelling then hides both from later
    rounds.  ``mode="repaired"`` keeps the greedy answer unless rounds
    pinned to one fixed level ``k`` succeed for a smaller ``k``; pinned
    rounds succeed exactly when every path carries ``r`` events of level at
    most ``k``, so the fallback always finds the least such level.
    """
    if q_s not in agent.secret_states:
        raise DomainError(f"{q_s!r} is not a secret state of {agent.label}")
    if r < 1:
        raise DomainError("r must be >= 1")
    if mode not in ("greedy", "repaired"):
        raise ValueError(f"unknown mode {mode!r}")
    greedy = _run_rounds(agent, q_s, r, cost_model, None)
    if mode == "greedy":
        return greedy
    ceiling = cost_model.m if greedy.is_null else greedy.level - 1
    for k in range(1, ceiling + 1):
        pinned = _run_rounds(agent, q_s, r, cost_model, k)
        if not pinned.is_null:
            return pinned
    return greedy


@dataclass(frozen=True)
class Candidate:
    agent: int
    component: str
    result: MrcmcResult

    @property
    def level(self) -> int:
        return self.result.level


@dataclass(frozen=True)
class PairTrace:
    index: int
    secret: tuple[str, ...]
    r: int
    candidates: tuple[Candidate, ...]
    chosen: int | None
    levels_so_far: tuple[int, ...]

    @property
    def w(self) -> tuple[tuple[int, int], ...]:
        return tuple((c.agent, c.level) for c in self.candidates if not c.result.is_null)


@dataclass(frozen=True)
class SynthesisTrace:
    pairs: tuple[PairTrace, ...]


def _pick(w: list[tuple[int, int]]) -> int:
    # last candidate attaining the running minimum, scanning in agent order
    k_s = max(k for _, k in w)
    j = 1
    for i, k in w:
        if k <= k_s:
            k_s = k
            j = i
    return j


def drcmc(model: SystemModel, *, mode: str = "repaired") -> tuple[Solution | Outcome, SynthesisTrace]:
    """Protection policies with minimum maximal cost level, or ``NO_SOLUTION``.

    ``mode`` is passed to :func:`mrcmc`.
    """
    violations = validate_system(model)
    if violations:
        raise ValidationError(violations)
    policies = [ProtectionPolicy({}, a.index) for a in model.agents]
    levels: list[int] = []
    pairs: list[PairTrace] = []
    cache: dict[tuple[int, str, int], MrcmcResult] = {}
    for p, (secret, r) in enumerate(model.requirement):
        candidates = []
        for agent, q_s in zip(model.agents, secret.components):
            key = (agent.index, q_s, r)
            if key not in cache:
                cache[key] = mrcmc(agent, q_s, r, model.cost_model, mode=mode)
            candidates.append(Candidate(agent.index, q_s, cache[key]))
        w = [(c.agent, c.level) for c in candidates if not c.result.is_null]
        if not w:
            pairs.append(PairTrace(p, secret.components, r, tuple(candidates), None, tuple(levels)))
            return NO_SOLUTION, SynthesisTrace(tuple(pairs))
        j = _pick(w)
        chosen = candidates[j - 1]
        policies[j - 1] = policies[j - 1].union(chosen.result.policy)
        levels.append(chosen.level)
        pairs.append(PairTrace(p, secret.components, r, tuple(candidates), j, tuple(levels)))
    return Solution(tuple(policies), max(levels)), SynthesisTrace(tuple(pairs))
