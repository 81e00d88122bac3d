"""Exhaustive reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math
import random

from dssp.model import Automaton


def simple_path_min_weight(a: Automaton, target: str, weighs) -> int | float:
    """Minimum weight over every simple path from the initial state to ``target``."""
    if a.is_empty:
        return math.inf
    if a.initial == target:
        return 0
    best = math.inf
    stack = [(a.initial, frozenset([a.initial]), 0)]
    while stack:
        q, seen, w = stack.pop()
        for e, t in a.outgoing(q):
            nw = w + (1 if weighs(q, e) else 0)
            if t == target:
                best = min(best, nw)
            elif t not in seen:
                stack.append((t, seen | {t}, nw))
    return best


def _reachable_within(spec: Automaton, kept: frozenset[str]) -> frozenset[str]:
    seen = {spec.initial}
    stack = [spec.initial]
    while stack:
        q = stack.pop()
        for e, t in spec.outgoing(q):
            if t in kept and t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def controllable_subautomata(plant: Automaton, spec: Automaton, controllable) -> list[frozenset[str]]:
    """Every state set X of ``spec`` that induces a reachable, controllable subautomaton."""
    if spec.is_empty:
        return []
    others = sorted(spec.states - {spec.initial})
    found = []
    for size in range(len(others) + 1):
        for combo in itertools.combinations(others, size):
            kept = frozenset(combo) | {spec.initial}
            if _reachable_within(spec, kept) != kept:
                continue
            ok = all(
                spec.delta.get((q, e)) == t and t in kept
                for q in kept
                for e, t in plant.outgoing(q)
                if e not in controllable
            )
            if ok:
                found.append(kept)
    return found


def supremal_by_enumeration(plant, spec, controllable) -> frozenset[str]:
    found = controllable_subautomata(plant, spec, frozenset(controllable))
    if not found:
        return frozenset()
    best = max(found, key=len)
    assert all(x <= best for x in found), "maximum is not unique"
    return best


def random_automaton(rng: random.Random, max_states: int, n_events: int = 3, density: float = 0.5) -> Automaton:
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    events = [f"x{j}" for j in range(n_events)]
    trans = [(q, e, rng.choice(states)) for q in states for e in events if rng.random() < density]
    return Automaton(states, "s0", trans)


def random_triple(rng: random.Random, max_states: int = 6):
    plant = random_automaton(rng, max_states)
    keep = {q for q in plant.states if rng.random() < 0.8}
    if rng.random() < 0.9:
        keep.add(plant.initial)
    spec_tr = [t for t in plant.transitions if t[0] in keep and t[2] in keep and rng.random() < 0.85]
    spec = Automaton(keep, plant.initial if plant.initial in keep else None, spec_tr)
    controllable = {e for e in plant.alphabet if rng.random() < 0.5}
    return plant, spec, controllable
