from hypothesis import given, settings, strategies as st

import oracles
from compsynth import random_instances as ri
from compsynth.games import fix_player1, fix_player2, mdp_almost_sure_parity
from compsynth.parity import attractor, gadget_solution, zielonka

seeds = st.integers(0, 10**6)


def graph(seed, n_max=10):
    rng = ri.rng_for(seed)
    n = rng.randint(1, n_max)
    owner = {v: rng.choice((1, 2)) for v in range(n)}
    succ = {v: rng.sample(range(n), rng.randint(1, min(3, n))) for v in range(n)}
    priority = {v: rng.randint(0, 5) for v in range(n)}
    return owner, succ, priority


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_zielonka_matches_reference(seed):
    owner, succ, priority = graph(seed)
    win1, win2, s1, s2 = zielonka(owner, succ, priority)
    assert win1 == oracles.zielonka(owner, succ, priority)
    assert win1 | win2 == set(owner) and not win1 & win2
    # positional strategies keep each player inside its region
    for v in win1:
        if owner[v] == 1:
            assert s1[v] in win1 and s1[v] in succ[v]
        else:
            assert all(w in win1 for w in succ[v])


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_attractor_is_closed(seed):
    owner, succ, _ = graph(seed)
    target = {v for v in owner if v % 3 == 0}
    attr, strat = attractor(set(owner), owner, succ, target, 1)
    for v in set(owner) - attr:
        if owner[v] == 1:
            assert not any(w in attr for w in succ[v])
        else:
            assert not all(w in attr for w in succ[v])
    for v, w in strat.items():
        assert w in attr and w in succ[v]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_gadget_is_exact_on_deterministic_games(seed):
    rng = ri.rng_for(seed)
    g = ri.random_game(rng, rng.randint(1, 8), 3, 4, stochastic=False)
    win, sigma, tau = gadget_solution(g)
    assert mdp_almost_sure_parity(fix_player1(g, sigma))[0] == win
    assert mdp_almost_sure_parity(fix_player2(g, tau))[0] == win
