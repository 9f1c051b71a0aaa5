from fractions import Fraction

from hypothesis import given, settings, strategies as st
import pytest

import oracles
from compsynth import random_instances as ri
from compsynth.games import (DisabledAction, Mdp, StochasticGame, StrategyTransducer,
                             almost_sure_parity, apply_strategy, chain_parity_values, dual_game,
                             end_components, fix_player1, fix_player2, max_reach,
                             mdp_almost_sure_parity, mdp_parity_value, memoryless_transducer,
                             parity_value, strongly_connected_components, validate_game)

seeds = st.integers(0, 10**6)
half = Fraction(1, 2)


def coin_game():
    """Player 1 picks a fair coin (win on heads) or a sure loss."""
    owner = {"s": 1, "flip": 2, "win": 2, "lose": 2}
    actions = {"s": {"coin": {"flip": Fraction(1)}, "quit": {"lose": Fraction(1)}},
               "flip": {"-": {"win": half, "lose": half}},
               "win": {"-": {"win": Fraction(1)}}, "lose": {"-": {"lose": Fraction(1)}}}
    priority = {"s": 1, "flip": 1, "win": 0, "lose": 1}
    return StochasticGame(owner, actions, priority)


def retry_game():
    """Retrying a fair coin forever wins almost surely."""
    owner = {"s": 1, "flip": 2, "win": 2, "lose": 2}
    actions = {"s": {"coin": {"flip": Fraction(1)}, "quit": {"lose": Fraction(1)}},
               "flip": {"-": {"win": half, "s": half}},
               "win": {"-": {"win": Fraction(1)}}, "lose": {"-": {"lose": Fraction(1)}}}
    return StochasticGame(owner, actions, {"s": 1, "flip": 1, "win": 0, "lose": 1})


def test_known_values():
    values, sigma, tau = parity_value(coin_game())
    assert values == {"s": half, "flip": half, "win": 1, "lose": 0}
    assert sigma["s"] == "coin"
    win, sigma = almost_sure_parity(retry_game())
    assert win == {"s", "flip", "win"} and sigma["s"] == "coin"


def test_validate_game_reports_problems():
    g = StochasticGame({"a": 3}, {"a": {"x": {"b": Fraction(1, 2)}}}, {})
    report = " | ".join(validate_game(g))
    assert "owner" in report and "priority" in report


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_scc_matches_reference(seed):
    rng = ri.rng_for(seed)
    n = rng.randint(1, 9)
    succ = {v: rng.sample(range(n), rng.randint(0, min(3, n))) for v in range(n)}
    mine = sorted(sorted(c) for c in strongly_connected_components(succ))
    # reference: mutual reachability via the transitive closure
    reach = {v: {v} | set(succ[v]) for v in succ}
    for k in succ:
        for v in succ:
            if k in reach[v]:
                reach[v] |= reach[k]
    ref = sorted({tuple(sorted(u for u in succ if u in reach[v] and v in reach[u]))
                  for v in succ})
    assert mine == [list(c) for c in ref]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_end_components_are_closed_and_strongly_connected(seed):
    rng = ri.rng_for(seed)
    m = ri.random_mdp(rng, rng.randint(1, 7), 3, 3)
    for states, avail in end_components(m.actions):
        assert set(avail) == set(states)
        succ = {s: [t for a in avail[s] for t in m.actions[s][a]] for s in states}
        assert all(avail[s] for s in states)
        assert all(t in states for s in states for t in succ[s])
        assert len(strongly_connected_components(succ)) == 1


@settings(max_examples=80, deadline=None)
@given(seeds, st.sampled_from([1, 2]))
def test_mdp_values_match_enumeration(seed, controller):
    rng = ri.rng_for(seed)
    m = ri.random_mdp(rng, rng.randint(1, 6), 2, 4, controller=controller)
    values, witness = mdp_parity_value(m)
    assert values == oracles.mdp_values(m.actions, m.priority, controller == 1)
    # the witness attains the values
    chain = {s: {witness[s]: m.actions[s][witness[s]]} for s in m.actions}
    assert chain_parity_values(chain, m.priority) == values
    sure, _ = mdp_almost_sure_parity(m)
    assert sure == {s for s, v in values.items() if v == 1}


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_chain_values_match_sympy(seed):
    rng = ri.rng_for(seed)
    m = ri.random_mdp(rng, rng.randint(1, 8), 1, 4)
    trans = {s: next(iter(acts.values())) for s, acts in m.actions.items()}
    assert chain_parity_values(m.actions, m.priority) == oracles.chain_values(trans, m.priority)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_max_reach_satisfies_bellman(seed):
    rng = ri.rng_for(seed)
    m = ri.random_mdp(rng, rng.randint(1, 7), 3, 3)
    target = {s for s in m.actions if rng.random() < 0.3}
    values, policy = max_reach(m.actions, target)
    for s, acts in m.actions.items():
        if s in target:
            assert values[s] == 1
            continue
        best = max(sum(p * values[t] for t, p in d.items()) for d in acts.values())
        assert values[s] == best
        if best > 0:
            d = acts[policy[s]]
            assert sum(p * values[t] for t, p in d.items()) == best


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_deterministic_almost_sure_matches_zielonka(seed):
    rng = ri.rng_for(seed)
    g = ri.random_game(rng, rng.randint(1, 9), 3, 5, stochastic=False)
    win, sigma = almost_sure_parity(g)
    succ = {s: [t for d in g.actions[s].values() for t in d] for s in g.owner}
    assert win == oracles.zielonka(g.owner, succ, g.priority)
    certified, _ = mdp_almost_sure_parity(fix_player1(g, sigma))
    assert win <= certified


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_values_of_dual_game_sum_to_one(seed):
    rng = ri.rng_for(seed)
    g = ri.random_game(rng, rng.randint(1, 5), 2, 3)
    values, sigma, tau = parity_value(g)
    dual, _, _ = parity_value(dual_game(g))
    assert all(dual[s] == 1 - v for s, v in values.items())
    # saddle point: neither fixed strategy can be exploited
    assert mdp_parity_value(fix_player1(g, sigma))[0] == values
    assert mdp_parity_value(fix_player2(g, tau))[0] == values


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_extra_player1_action_never_hurts(seed):
    rng = ri.rng_for(seed)
    g = ri.random_game(rng, rng.randint(2, 5), 2, 3)
    p1 = g.player_states(1)
    if not p1:
        return
    s = rng.choice(p1)
    actions = dict(g.actions)
    actions[s] = dict(actions[s], extra=ri.random_distribution(rng, list(g.owner)))
    richer = StochasticGame(g.owner, actions, g.priority)
    before, _, _ = parity_value(g)
    after, _, _ = parity_value(richer)
    assert all(after[t] >= before[t] for t in g.owner)


def test_memoryless_transducer_agrees_with_dict():
    g = coin_game()
    sigma = {"s": "coin"}
    direct, _ = mdp_parity_value(apply_strategy(g, sigma))
    t = memoryless_transducer(sigma, g.owner)
    product, _ = mdp_parity_value(apply_strategy(g, t, initial="s"))
    assert product[("s", t.start("s"))] == direct["s"]


def test_transducer_memory_reads_every_state():
    # alternate between quitting and flipping: quit on the first visit wins nothing
    g = retry_game()
    t = StrategyTransducer((0, 1), 0, {(m, s): (1 - m if s == "s" else m)
                                       for m in (0, 1) for s in g.owner},
                           {0: "quit", 1: "coin"})
    m = apply_strategy(g, t, initial="s")
    assert t.start("s") == 1
    values, _ = mdp_parity_value(m)
    assert values[("s", 1)] == half


def test_disabled_action_is_reported():
    with pytest.raises(DisabledAction):
        apply_strategy(coin_game(), {"s": "fly"})
    t = StrategyTransducer((0,), 0, {(0, s): 0 for s in coin_game().owner}, {0: "fly"})
    with pytest.raises(DisabledAction):
        apply_strategy(coin_game(), t, initial="s")


def test_minimizing_controller_semantics():
    m = Mdp({"s": {"stay": {"s": Fraction(1)}, "go": {"t": Fraction(1)}},
             "t": {"-": {"t": Fraction(1)}}}, {"s": 0, "t": 1}, controller=2)
    win, spoiler = mdp_almost_sure_parity(m)
    assert win == set() and spoiler["s"] == "go"
    assert mdp_parity_value(m)[0] == {"s": 0, "t": 0}
