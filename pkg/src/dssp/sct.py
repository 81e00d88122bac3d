"""Supervisory-control primitives on single automata.

Protection is modelled as disablement: a supervisor is a subautomaton of
the plant, and the transitions it cuts off are the ones to protect.
"""

from __future__ import annotations

import dataclasses
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import StructuralError, UnknownStateError
from .model import RELABEL_MARKER, Automaton, ControlPolicy, Transition


@dataclass(frozen=True)
class Supervisor:
    parent: Automaton
    kept_states: frozenset[str]
    kept_transitions: tuple[Transition, ...]

    @property
    def is_empty(self) -> bool:
        return not self.kept_states

    @property
    def xi(self) -> dict[tuple[str, str], str]:
        return {(q, e): t for q, e, t in self.kept_transitions}

    def as_automaton(self) -> Automaton:
        initial = None if self.is_empty else self.parent.initial
        return Automaton(self.kept_states, initial, self.kept_transitions)


def fresh_id(event: str, round_: int) -> str:
    return f"{RELABEL_MARKER}{event}{RELABEL_MARKER}{round_}"


def is_relabelled(event: str) -> bool:
    return event.startswith(RELABEL_MARKER)


def original_event(event: str) -> str:
    """Strip the relabel marker and round tag, if any."""
    if not is_relabelled(event):
        return event
    return event[len(RELABEL_MARKER):].rsplit(RELABEL_MARKER, 1)[0]


def relabel_round(event: str) -> int | None:
    if not is_relabelled(event):
        return None
    return int(event.rsplit(RELABEL_MARKER, 1)[1])


@dataclass(frozen=True)
class RelabelledAgent:
    agent: Automaton
    relabel_log: Mapping[tuple[str, str, int], str] = field(default_factory=dict)


def spec_remove_secret(agent: Automaton, q_s: str) -> Automaton:
    """Delete ``q_s`` and every transition into or out of it.

    Removing the initial state yields the empty automaton (``initial=None``).
    """
    if q_s not in agent.states:
        raise UnknownStateError(f"{q_s!r} is not a state")
    return Automaton(
        states=agent.states - {q_s},
        initial=None if agent.initial == q_s else agent.initial,
        transitions=[(q, e, t) for q, e, t in agent.transitions if q != q_s and t != q_s],
    )


def _check_subautomaton(plant: Automaton, spec: Automaton) -> None:
    if not spec.states <= plant.states:
        extra = sorted(spec.states - plant.states)
        raise StructuralError(f"spec states {extra} are not plant states")
    if spec.initial is not None and spec.initial != plant.initial:
        raise StructuralError("spec and plant disagree on the initial state")
    for q, e, t in spec.transitions:
        if plant.delta.get((q, e)) != t:
            raise StructuralError(f"spec transition {q} -{e}-> {t} is not in the plant")


def _empty(plant: Automaton) -> Supervisor:
    return Supervisor(plant, frozenset(), ())


def supremal_controllable(
    plant: Automaton,
    spec: Automaton,
    controllable: Iterable[str],
    *,
    order: Iterable[str] | None = None,
) -> Supervisor:
    """Maximal controllable subautomaton of ``spec`` w.r.t. ``plant``.

    A kept state is bad when some plant transition on an event outside
    ``controllable`` is missing from ``spec`` or leads to a removed state.
    Bad states are removed until a fixpoint is reached, and the survivors
    are trimmed to those reachable from the initial state.  ``order`` only
    fixes the order in which states are first inspected; the fixpoint does
    not depend on it.
    """
    _check_subautomaton(plant, spec)
    if spec.is_empty:
        return _empty(plant)
    controllable = frozenset(controllable)
    spec_delta = spec.delta

    preds: dict[str, list[str]] = defaultdict(list)
    for q, e, t in plant.transitions:
        if e not in controllable:
            preds[t].append(q)

    good = set(spec.states)
    queue: deque[str] = deque()
    seq = [] if order is None else [q for q in order if q in spec.states]
    seq += sorted(spec.states.difference(seq))
    for q in seq:
        if q not in good:
            continue
        for e, t in plant.outgoing(q):
            if e in controllable:
                continue
            if spec_delta.get((q, e)) != t or t not in good:
                good.discard(q)
                queue.append(q)
                break
    # states outside spec are already "removed"
    for t in plant.states - spec.states:
        queue.append(t)
    while queue:
        t = queue.popleft()
        for q in preds.get(t, ()):
            if q in good:
                good.discard(q)
                queue.append(q)

    if spec.initial not in good:
        return _empty(plant)
    kept = {spec.initial}
    stack = [spec.initial]
    succ: dict[str, list[str]] = defaultdict(list)
    for q, e, t in spec.transitions:
        succ[q].append(t)
    while stack:
        q = stack.pop()
        for t in succ.get(q, ()):
            if t in good and t not in kept:
                kept.add(t)
                stack.append(t)
    kept_tr = tuple(tr for tr in spec.transitions if tr[0] in kept and tr[2] in kept)
    return Supervisor(plant, frozenset(kept), kept_tr)


def derive_control_policy(
    plant: Automaton, supervisor: Supervisor, controllable: Iterable[str]
) -> ControlPolicy:
    """Events to disable at each kept state; non-kept states get nothing."""
    if supervisor.parent is not plant and supervisor.parent != plant:
        raise StructuralError("supervisor does not belong to this plant")
    controllable = frozenset(controllable)
    xi = supervisor.xi
    assignment: dict[str, set[str]] = {}
    for q in supervisor.kept_states:
        for e, t in plant.outgoing(q):
            if e in controllable and (q, e) not in xi:
                assignment.setdefault(q, set()).add(e)
    return ControlPolicy(assignment)


def relabel(agent: Automaton, policy: ControlPolicy, round_: int) -> RelabelledAgent:
    """Give every transition named by ``policy`` a fresh unprotectable label.

    Works on any automaton type; an :class:`~dssp.model.Agent` keeps its
    protectable set, so the fresh labels are unprotectable by construction.
    """
    if round_ < 1:
        raise ValueError("round must be >= 1")
    delta = agent.delta
    for q, e in policy.pairs():
        if (q, e) not in delta:
            raise StructuralError(f"policy names missing transition {q} -{e}->")
    log: dict[tuple[str, str, int], str] = {}
    new: list[Transition] = []
    for q, e, t in agent.transitions:
        if e in policy(q):
            fresh = fresh_id(e, round_)
            log[(q, e, round_)] = fresh
            new.append((q, fresh, t))
        else:
            new.append((q, e, t))
    if not log:
        return RelabelledAgent(agent, {})
    return RelabelledAgent(dataclasses.replace(agent, transitions=new), log)


def restore(relabelled: RelabelledAgent) -> Automaton:
    """Invert :func:`relabel` using its log."""
    inverse = {(q, fresh): e for (q, e, _), fresh in relabelled.relabel_log.items()}
    a = relabelled.agent
    return dataclasses.replace(
        a, transitions=[(q, inverse.get((q, e), e), t) for q, e, t in a.transitions]
    )
