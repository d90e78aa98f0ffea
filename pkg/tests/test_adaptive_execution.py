import pytest

from imlab.submodules.adaptive_execution import FixedSetPolicy, Policy, checked_select, run_adaptive
from imlab.submodules.errors import InvalidSeedSet, PolicyRepeatsSeed, PolicyViolatesBudget
from imlab.submodules.graph_core import Budget
from imlab.submodules.realization import PartialRealization, Realization


class _ConstantPolicy(Policy):
    name = "constant"

    def __init__(self, node, budget):
        super().__init__(budget)
        self.node = node

    def select(self, graph, psi):
        return self.node


class _GreedyForBudget(Policy):
    """Keeps asking for the next free node, ignoring its budget."""
    name = "overspending"

    def select(self, graph, psi):
        return next(node for node in range(graph.n) if node not in psi.domain)


def test_fixed_set_policy_returns_its_set(diamond):
    policy = FixedSetPolicy([2, 0])
    for live in (0, 0b1111, 0b0101):
        selected, psi = run_adaptive(diamond, policy, Realization(live, diamond.num_edges))
        assert selected == [2, 0]
        assert psi.domain == frozenset({0, 2})


def test_feedback_follows_the_hidden_realization(diamond):
    hidden = Realization(0b1001, diamond.num_edges)
    _, psi = run_adaptive(diamond, FixedSetPolicy([0, 1]), hidden)
    assert psi.live == 0b0001


def test_repeated_seed_is_refused(diamond):
    policy = _ConstantPolicy(1, Budget(2))
    with pytest.raises(PolicyRepeatsSeed):
        run_adaptive(diamond, policy, Realization(0, diamond.num_edges))


def test_budget_is_enforced(diamond):
    with pytest.raises(PolicyViolatesBudget):
        run_adaptive(diamond, _GreedyForBudget(Budget(2)), Realization(0, diamond.num_edges))


def test_out_of_range_seed_is_refused(diamond):
    with pytest.raises(InvalidSeedSet):
        checked_select(diamond, _ConstantPolicy(7, Budget(1)), PartialRealization.empty())
