import pytest
from hypothesis import given, strategies as st

from dssp.errors import GenerationError
from dssp.generate import GenParams, random_system
from dssp.model import validate_system


@given(st.integers(0, 2**64 - 1))
def test_generated_models_are_valid_and_within_bounds(seed):
    model = random_system(GenParams(seed=seed))
    assert validate_system(model) == []
    assert 1 <= model.n <= 3 and 1 <= model.m <= 4
    assert 1 <= len(model.requirement) <= 3
    for a in model.agents:
        assert 2 <= len(a.states) <= 8
        assert len(a.alphabet) <= 6
        assert a.secret_states and a.initial not in a.secret_states
    assert all(1 <= r <= 3 for _, r in model.requirement)


@given(st.integers(0, 2**32))
def test_every_state_is_reachable(seed):
    for a in random_system(GenParams(seed=seed)).agents:
        seen, stack = {a.initial}, [a.initial]
        while stack:
            for _, t in a.outgoing(stack.pop()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        assert seen == a.states


def test_same_seed_same_model():
    p = GenParams(seed=99, n_agents=3, states_per_agent=(5, 8))
    assert random_system(p) == random_system(p)
    assert random_system(p) != random_system(GenParams(seed=100, n_agents=3, states_per_agent=(5, 8)))


def test_fixed_sizes():
    model = random_system(GenParams(seed=7, n_agents=5, states_per_agent=40, m_classes=4, n_secret_pairs=20))
    assert model.n == 5
    assert all(len(a.states) == 40 for a in model.agents)
    assert len(model.requirement) <= 20


@pytest.mark.parametrize(
    "params",
    [
        GenParams(n_agents=0),
        GenParams(states_per_agent=(4, 2)),
        GenParams(transition_density=0),
        GenParams(protectable_fraction=1.5),
        GenParams(r_max=0),
        GenParams(seed=-1),
    ],
)
def test_bad_parameters(params):
    assert params.problems()
    with pytest.raises(GenerationError):
        random_system(params)
