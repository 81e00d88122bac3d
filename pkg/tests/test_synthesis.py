import dataclasses

import pytest
from hypothesis import given, strategies as st

from dssp.errors import DomainError, ValidationError
from dssp.generate import GenParams, random_system
from dssp.model import NO_SOLUTION, Agent, CostModel, SecurityRequirement, SystemModel
from dssp.oracle import is_solvable, oracle_min_level, verify_policy
from dssp.sct import spec_remove_secret
from dssp.synthesis import _pick, drcmc, mrcmc, rcmc


def pol(result):
    return {q: set(es) for q, es in result.policy.assignment.items()}


# Greedy trap: the cheap first round protects ``a`` twice on q0 a q3 u q2 a q4,
# after which the second round has nothing left to protect on that path.
TRAP = Agent(
    {"q0", "q2", "q3", "q4"},
    "q0",
    [("q0", "a", "q3"), ("q0", "b", "q2"), ("q2", "a", "q4"), ("q3", "c", "q4"), ("q3", "u", "q2")],
    protectable={"a", "b", "c"},
    secret_states={"q4"},
    index=1,
    name="T",
)
TRAP_CLASSES = CostModel([{"a", "b"}, {"c"}])


def test_rcmc_levels(g1, g2, classes):
    assert rcmc(g1, spec_remove_secret(g1, "q2"), classes).level == 2
    assert rcmc(g2, spec_remove_secret(g2, "q2"), classes).level == 1
    res = rcmc(g1, spec_remove_secret(g1, "q0"), classes)
    assert res.is_null and res.level == 0


def test_mrcmc_golden_rounds(g1, g2, classes):
    r1 = mrcmc(g1, "q2", 2, classes)
    assert r1.level == 3 and r1.round_levels == (2, 3)
    assert pol(r1) == {"q0": {"a1"}, "q1": {"a2"}}
    r2 = mrcmc(g2, "q4", 2, classes)
    assert r2.level == 4 and r2.round_levels == (1, 4)
    assert not r2.pinned


def test_mrcmc_round_two_sees_relabelled_plant(g2, classes):
    plant = mrcmc(g2, "q4", 2, classes).rounds[1].plant
    assert plant.delta[("q0", "~b1~1")] == "q1"
    assert plant.delta[("q0", "~b4~1")] == "q3"


def test_mrcmc_unsolvable(g1, classes):
    res = mrcmc(g1, "q2", 3, classes)
    assert res.is_null and res.level == 0


def test_mrcmc_domain(g1, classes):
    with pytest.raises(DomainError):
        mrcmc(g1, "q1", 1, classes)
    with pytest.raises(DomainError):
        mrcmc(g1, "q2", 0, classes)
    with pytest.raises(ValueError):
        mrcmc(g1, "q2", 1, classes, mode="other")


def test_greedy_rounds_can_miss_a_solution():
    greedy = mrcmc(TRAP, "q4", 2, TRAP_CLASSES, mode="greedy")
    assert greedy.is_null
    first = greedy.rounds[0].policy.assignment
    assert first == {"q0": {"a"}, "q2": {"a"}}
    assert greedy.rounds[1].supervisor is None
    fixed = mrcmc(TRAP, "q4", 2, TRAP_CLASSES)
    assert fixed.level == 2 and fixed.pinned
    model = SystemModel((TRAP,), TRAP_CLASSES, SecurityRequirement([(("q4",), 2)]))
    assert oracle_min_level(model) == 2
    solution, _ = drcmc(model)
    assert solution.level == 2
    assert verify_policy(model, solution.policies).passed
    assert drcmc(model, mode="greedy")[0] is NO_SOLUTION


def test_greedy_rounds_can_overshoot_the_level():
    model = random_system(GenParams(seed=4480))
    assert oracle_min_level(model) == 2
    assert drcmc(model, mode="greedy")[0].level == 3
    assert drcmc(model)[0].level == 2


def test_pick_takes_last_minimum():
    assert _pick([(1, 2), (2, 1)]) == 2
    assert _pick([(1, 3), (2, 4)]) == 1
    assert _pick([(1, 2), (2, 2), (3, 5)]) == 2
    assert _pick([(3, 1)]) == 3


def test_drcmc_golden(servers):
    solution, trace = drcmc(servers)
    assert solution.level == 3
    assert solution.policy(1).assignment == {"q0": {"a1"}, "q1": {"a2"}}
    assert solution.policy(2).assignment == {"q0": {"b1", "b4"}}
    assert [p.w for p in trace.pairs] == [((1, 2), (2, 1)), ((1, 3), (2, 4))]
    assert [p.chosen for p in trace.pairs] == [2, 1]
    assert trace.pairs[-1].levels_so_far == (1, 3)


def test_drcmc_no_solution(servers_r3):
    solution, trace = drcmc(servers_r3)
    assert solution is NO_SOLUTION
    assert trace.pairs[0].chosen is None and trace.pairs[0].w == ()


def test_drcmc_rejects_invalid_model(servers):
    broken = dataclasses.replace(servers, requirement=SecurityRequirement([]))
    with pytest.raises(ValidationError):
        drcmc(broken)


def test_drcmc_does_not_mutate_input(servers):
    before = repr(servers)
    drcmc(servers)
    assert repr(servers) == before


@given(st.integers(0, 2**40))
def test_drcmc_agrees_with_oracle(seed):
    model = random_system(GenParams(seed=seed))
    solution, trace = drcmc(model)
    if solution is NO_SOLUTION:
        assert not is_solvable(model)
        return
    assert solution.level == oracle_min_level(model)
    report = verify_policy(model, solution.policies)
    assert report.passed
    assert report.policy_level <= solution.level
    assert len(trace.pairs) == len(model.requirement)


@given(st.integers(0, 2**40))
def test_mrcmc_unions_rounds_and_is_deterministic(seed):
    model = random_system(GenParams(seed=seed))
    agent = model.agents[0]
    q_s = sorted(agent.secret_states)[0]
    a = mrcmc(agent, q_s, 2, model.cost_model)
    assert a == mrcmc(agent, q_s, 2, model.cost_model)
    if not a.is_null:
        assert a.level == max(a.round_levels)
        assert len(a.rounds) == 2
        union = set()
        for rd in a.rounds:
            union |= {(q, e) for q, e in rd.policy.pairs()}
        # round-two policies refer to the relabelled plant, whose protectable
        # transitions are exactly the original ones not yet protected
        assert union == set(a.policy.pairs())
