"""Synthesis-free checks of secure reachability, solvability and minimal level.

Everything here reduces to a 0/1-weighted shortest path from the initial
state to a secret state, so none of it touches the supervisor machinery in
:mod:`dssp.sct` or :mod:`dssp.synthesis`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import DomainError, LevelOutOfRangeError, StructuralError, UnknownStateError
from .model import Agent, Automaton, CostModel, ProtectionPolicy, SystemModel

INFINITE = math.inf

WeightRule = Callable[[str, str], bool]


def min_weight_path(automaton: Automaton, target: str, weighs: WeightRule) -> int | float:
    """Fewest weight-1 transitions on any walk from the initial state to ``target``.

    ``weighs(q, e)`` says whether the transition leaving ``q`` on ``e`` costs 1.
    Returns :data:`INFINITE` when ``target`` is unreachable.
    """
    if target not in automaton.states:
        raise UnknownStateError(f"{target!r} is not a state")
    if automaton.is_empty:
        return INFINITE
    dist = {automaton.initial: 0}
    dq = deque([automaton.initial])
    done: set[str] = set()
    while dq:
        q = dq.popleft()
        if q in done:
            continue
        done.add(q)
        if q == target:
            return dist[q]
        d = dist[q]
        for e, t in automaton.outgoing(q):
            w = 1 if weighs(q, e) else 0
            if d + w < dist.get(t, INFINITE):
                dist[t] = d + w
                if w:
                    dq.append(t)
                else:
                    dq.appendleft(t)
    return dist.get(target, INFINITE)


def min_protection_weight(automaton: Automaton, q_s: str, counted: Iterable[str]) -> int | float:
    counted = frozenset(counted)
    return min_weight_path(automaton, q_s, lambda _q, e: e in counted)


def policy_weight(automaton: Automaton, q_s: str, policy: ProtectionPolicy) -> int | float:
    return min_weight_path(automaton, q_s, lambda q, e: e in policy(q))


def counted_events(agent: Agent, cost_model: CostModel, k: int) -> frozenset[str]:
    # events unprotectable in this agent never count, even if another agent
    # may protect them
    return cost_model.prefix_union(k) & agent.protectable


def is_r_securely_reachable(agent: Agent, q_s: str, r: int, k: int, cost_model: CostModel) -> bool:
    if q_s not in agent.secret_states:
        raise DomainError(f"{q_s!r} is not a secret state of {agent.label}")
    if r < 1:
        raise DomainError("r must be >= 1")
    if not 1 <= k <= cost_model.m:
        raise LevelOutOfRangeError(f"level {k} outside [1, {cost_model.m}]")
    return min_protection_weight(agent, q_s, counted_events(agent, cost_model, k)) >= r


def _least_level(agent: Agent, q_s: str, r: int, cost_model: CostModel) -> int | None:
    for k in range(1, cost_model.m + 1):
        if is_r_securely_reachable(agent, q_s, r, k, cost_model):
            return k
    return None


def pair_min_level(model: SystemModel, secret, r: int) -> int | None:
    levels = [
        lv
        for agent, q_s in zip(model.agents, secret.components)
        if (lv := _least_level(agent, q_s, r, model.cost_model)) is not None
    ]
    return min(levels) if levels else None


def oracle_min_level(model: SystemModel) -> int | None:
    """Least ``k`` at which every requirement pair has some securable component."""
    best = 0
    for secret, r in model.requirement:
        lv = pair_min_level(model, secret, r)
        if lv is None:
            return None
        best = max(best, lv)
    return best


def is_solvable(model: SystemModel) -> bool:
    m = model.m
    return all(
        any(
            is_r_securely_reachable(agent, q_s, r, m, model.cost_model)
            for agent, q_s in zip(model.agents, secret.components)
        )
        for secret, r in model.requirement
    )


@dataclass(frozen=True)
class PairReport:
    secret: tuple[str, ...]
    r: int
    weights: tuple[int | float, ...]

    @property
    def satisfying(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights, start=1) if w >= self.r)

    @property
    def ok(self) -> bool:
        return bool(self.satisfying)


@dataclass(frozen=True)
class VerificationReport:
    pairs: tuple[PairReport, ...]
    policy_level: int

    @property
    def passed(self) -> bool:
        return all(p.ok for p in self.pairs)


def check_policy(agent: Agent, policy: ProtectionPolicy) -> None:
    for q, e in policy.pairs():
        if q not in agent.states:
            raise StructuralError(f"policy for {agent.label} names unknown state {q!r}")
        if e not in agent.protectable:
            raise StructuralError(f"policy for {agent.label} protects unprotectable event {e!r} at {q!r}")
        if (q, e) not in agent.delta:
            raise StructuralError(f"policy for {agent.label} protects missing transition {q} -{e}->")


def verify_policy(model: SystemModel, policies: Sequence[ProtectionPolicy]) -> VerificationReport:
    if len(policies) != model.n:
        raise StructuralError(f"expected {model.n} policies, got {len(policies)}")
    for agent, policy in zip(model.agents, policies):
        if policy.agent_index not in (0, agent.index):
            raise StructuralError(f"policy for agent {policy.agent_index} given in slot {agent.index}")
        check_policy(agent, policy)
    pairs = []
    for secret, r in model.requirement:
        weights = tuple(
            policy_weight(agent, q_s, policy)
            for agent, q_s, policy in zip(model.agents, secret.components, policies)
        )
        pairs.append(PairReport(secret.components, r, weights))
    level = max(
        (model.cost_model.level_of(e) or 0 for p in policies for e in p.events), default=0
    )
    return VerificationReport(tuple(pairs), level)
