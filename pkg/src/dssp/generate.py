"""Seeded random system models for property tests and benchmarks."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .errors import GenerationError
from .model import Agent, CostModel, GlobalSecret, SecurityRequirement, SystemModel, validate_system

IntRange = tuple[int, int]

MAX_ATTEMPTS = 50


def _rng_of(value: int | IntRange) -> IntRange:
    return (value, value) if isinstance(value, int) else tuple(value)


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    n_agents: IntRange = (1, 3)
    states_per_agent: IntRange = (2, 8)
    events_per_agent: IntRange = (1, 6)
    transition_density: float = 0.4
    m_classes: IntRange = (1, 4)
    n_secret_pairs: IntRange = (1, 3)
    secrets_per_agent: IntRange = (1, 2)
    r_max: int = 3
    protectable_fraction: float = 0.6
    shared_event_fraction: float = 0.3

    def __post_init__(self):
        for name in (
            "n_agents",
            "states_per_agent",
            "events_per_agent",
            "m_classes",
            "n_secret_pairs",
            "secrets_per_agent",
        ):
            object.__setattr__(self, name, _rng_of(getattr(self, name)))

    def problems(self) -> list[str]:
        out = []
        for name, low in (
            ("n_agents", 1),
            ("states_per_agent", 1),
            ("events_per_agent", 1),
            ("m_classes", 1),
            ("n_secret_pairs", 1),
            ("secrets_per_agent", 1),
        ):
            lo, hi = getattr(self, name)
            if lo < low or hi < lo:
                out.append(f"{name} must be a non-empty range with minimum >= {low}, got {lo}..{hi}")
        for name in ("transition_density", "protectable_fraction", "shared_event_fraction"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                out.append(f"{name} must lie in (0, 1], got {v}")
        if self.r_max < 1:
            out.append(f"r_max must be >= 1, got {self.r_max}")
        if not 0 <= self.seed < 2**64:
            out.append("seed must be a 64-bit unsigned integer")
        return out


def _depths(initial: str, transitions) -> dict[str, int]:
    succ: dict[str, list[str]] = {}
    for q, _, t in transitions:
        succ.setdefault(q, []).append(t)
    depth = {initial: 0}
    dq = deque([initial])
    while dq:
        q = dq.popleft()
        for t in succ.get(q, ()):
            if t not in depth:
                depth[t] = depth[q] + 1
                dq.append(t)
    return depth


def _agent(rng: random.Random, index: int, p: GenParams, pool: list[str], pool_protectable: dict[str, bool]) -> Agent:
    n_states = rng.randint(*p.states_per_agent)
    n_events = rng.randint(*p.events_per_agent)
    states = [f"q{i}" for i in range(n_states)]

    events: list[str] = []
    for _ in range(n_events):
        unused = [e for e in pool if e not in events]
        if unused and rng.random() < p.shared_event_fraction:
            events.append(rng.choice(unused))
        else:
            events.append(f"e{len(pool)}")
            pool.append(events[-1])
    transitions: dict[tuple[str, str], str] = {}
    attached = [states[0]]
    for q in states[1:]:
        sources = [s for s in attached if any((s, e) not in transitions for e in events)]
        src = rng.choice(sources)
        ev = rng.choice([e for e in events if (src, e) not in transitions])
        transitions[(src, ev)] = q
        attached.append(q)
    slots = [(q, e) for q in states for e in events if (q, e) not in transitions]
    target_count = round(p.transition_density * n_states * n_events)
    rng.shuffle(slots)
    for q, e in slots[: max(0, target_count - len(transitions))]:
        transitions[(q, e)] = rng.choice(states)

    protectable = set()
    for e in events:
        if e in pool_protectable and rng.random() < 0.8:
            if pool_protectable[e]:
                protectable.add(e)
        elif rng.random() < p.protectable_fraction:
            protectable.add(e)
        pool_protectable.setdefault(e, e in protectable)

    triples = [(q, e, t) for (q, e), t in transitions.items()]
    depth = _depths(states[0], triples)
    candidates = states[1:] or states[:1]
    weights = [depth.get(q, 1) for q in candidates]
    lo, hi = p.secrets_per_agent
    n_secret = min(len(candidates), lo if lo == hi else rng.choice([lo] * 2 + list(range(lo + 1, hi + 1))))
    secrets: set[str] = set()
    while len(secrets) < n_secret:
        secrets.add(rng.choices(candidates, weights)[0])
    return Agent(states, states[0], triples, protectable, secrets, index, f"G{index}")


def _attempt(rng: random.Random, p: GenParams) -> SystemModel | None:
    pool: list[str] = []
    pool_protectable: dict[str, bool] = {}
    agents = [_agent(rng, i, p, pool, pool_protectable) for i in range(1, rng.randint(*p.n_agents) + 1)]
    protectable = sorted(set().union(*(a.protectable for a in agents)), key=lambda e: int(e[1:]))
    if not protectable:
        return None
    m = min(rng.randint(*p.m_classes), len(protectable))
    rng.shuffle(protectable)
    classes: list[set[str]] = [{e} for e in protectable[:m]]
    for e in protectable[m:]:
        classes[rng.randrange(m)].add(e)

    secret_lists = [sorted(a.secret_states) for a in agents]
    n_pairs = rng.randint(*p.n_secret_pairs)
    pairs: list[tuple[GlobalSecret, int]] = []
    for _ in range(n_pairs * 4):
        if len(pairs) == n_pairs:
            break
        pair = (GlobalSecret(tuple(rng.choice(s) for s in secret_lists)), rng.randint(1, p.r_max))
        if pair not in pairs:
            pairs.append(pair)
    return SystemModel(tuple(agents), CostModel(tuple(classes)), SecurityRequirement(tuple(pairs)))


def random_system(params: GenParams) -> SystemModel:
    """Valid random model; a pure function of ``params``.

    Every state is reachable: a random spanning arborescence is laid down
    first and extra transitions are added up to ``transition_density``.
    Secrets favour states far from the initial state.
    """
    problems = params.problems()
    if problems:
        raise GenerationError("; ".join(problems))
    rng = random.Random(params.seed)
    for _ in range(MAX_ATTEMPTS):
        model = _attempt(rng, params)
        if model is not None and not validate_system(model):
            return model
    raise GenerationError(f"no valid model after {MAX_ATTEMPTS} attempts (no protectable events?)")
