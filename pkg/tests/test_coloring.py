import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import cases, corpus, oracle_models, random_program
from dasc.coloring import (MINUS, PLUS, Coloring, ColoringState, Conflict, Propagator,
                           SearchStats, answer_set_of, atom_state, branch_D, is_admissible,
                           op_P, op_PV_star, op_T_star, op_V, rule_status, solve)
from dasc.oracle import generating_rules, is_answer_set
from dasc.program import parse_program
from dasc.rdg import build_rdg_prime
from dasc.toy import gen_toy

C = Coloring.of
TWO_LOOP = "a :- not b. b :- not a."


def models_of(g, **kw):
    return [answer_set_of(g, c) for c in solve(g, **kw)]


def names(g, x):
    return g.program.format_atoms(x)


# rule_status / atom_state

def test_fact_is_supported_and_unblocked(graph_of):
    s = rule_status(graph_of("a."), C(), 0)
    assert s.supported and s.unblocked and not s.unsupported and not s.blocked


def test_unsupported_when_only_definer_is_minus(graph_of):
    g = graph_of("a :- c. b :- a.")
    s = rule_status(g, C(minus={0}), 1)
    assert s.unsupported and not s.supported


def test_blocked_by_plus_definer(graph_of):
    g = graph_of("a. b :- not a.")
    s = rule_status(g, C(plus={0}), 1)
    assert s.blocked and not s.unblocked


def test_undefined_atoms_are_false_from_the_start(graph_of):
    g = graph_of("b :- a. c :- not a.")
    assert rule_status(g, C(), 0).unsupported
    assert rule_status(g, C(), 1).unblocked


def test_atom_state_counters(graph_of):
    g = graph_of("a :- x. a :- y. a :- z. b :- a. c :- not a. x. y :- not x. z :- not x.")
    a = g.program.atom_id("a")
    st0 = atom_state(g, C(minus={0, 1}), a)
    assert (st0.total_defining, st0.minus_defining, st0.proven_true) == (3, 2, False)
    assert not st0.proven_false
    st1 = atom_state(g, C(minus={0, 1, 2}), a)
    assert st1.proven_false
    assert atom_state(g, C(plus={1}), a).proven_true


def test_status_rejects_conflicting_coloring(graph_of):
    with pytest.raises(ValueError):
        rule_status(graph_of("a."), C(plus={0}, minus={0}), 0)


# P

def test_P_examples(graph_of):
    assert op_P(graph_of("a."), C()) == C(plus={0})
    assert op_P(graph_of(TWO_LOOP), C()) == C()
    assert op_P(graph_of("a. b :- not a."), C(plus={0})) == C(plus={0}, minus={1})


def test_P_conflicts(graph_of):
    assert isinstance(op_P(graph_of("a. :- a."), C(plus={0})), Conflict)
    # a minus rule that is supported and unblocked lands on both sides
    res = op_P(graph_of("a."), C(minus={0}))
    assert isinstance(res, Conflict) and res.rules == {0}


# T*

def test_T_star_examples(graph_of):
    assert op_T_star(graph_of("a. b :- a."), C()) == C(plus={0, 1})
    assert op_T_star(graph_of("a :- a."), C()) == C()
    assert op_T_star(graph_of("a. b :- a."), C(minus={1})) == C(plus={0}, minus={1})


def test_T_star_ignores_negative_bodies(graph_of):
    # support only looks at positive bodies
    assert op_T_star(graph_of("a. b :- a, not a."), C()) == C(plus={0, 1})


# V

def test_V_examples(graph_of):
    assert op_V(graph_of("a :- a."), C()) == C(minus={0})
    assert op_V(graph_of("a."), C(plus={0})) == C(plus={0})
    assert op_V(graph_of("a. b :- c."), C()) == C(minus={1})


def test_V_rejects_unfounded_plus(graph_of):
    res = op_V(graph_of("a :- a."), C(plus={0}))
    assert isinstance(res, Conflict) and res.rules == {0}
    # a loop whose only way in is colored minus is unfounded
    g = graph_of("a :- b. b :- a. a :- not c. c :- not a.")
    assert op_V(g, C(minus={2})) == C(minus={0, 1, 2})


# PV*

def test_PV_star_examples(graph_of):
    g = graph_of("a. b :- a.")
    c = op_PV_star(g, C())
    assert c == C(plus={0, 1}) and c.is_total(2)
    assert names(g, answer_set_of(g, c)) == ["a", "b"]
    assert op_PV_star(graph_of(TWO_LOOP), C()) == C()
    assert isinstance(op_PV_star(graph_of("a. :- a."), C()), Conflict)


def test_PV_star_mixes_both_operators(graph_of):
    # V removes the unfounded loop, after which P blocks nothing and supports d
    g = graph_of("a :- b. b :- a. d :- not a.")
    assert op_PV_star(g, C()) == C(plus={2}, minus={0, 1})


# D

def test_branch_D(graph_of):
    g = graph_of(TWO_LOOP)
    assert branch_D(g, C(), 0, PLUS) == C(plus={0})
    assert branch_D(g, C(), 0, MINUS) == C(minus={0})
    with pytest.raises(ValueError):
        branch_D(g, C(plus={0}), 0, MINUS)
    with pytest.raises(ValueError):
        branch_D(graph_of("b :- a. a :- not c."), C(), 0, PLUS)
    with pytest.raises(ValueError):
        branch_D(graph_of(":- not a."), C(), 0, PLUS)


# admissibility and answer sets

def test_is_admissible_examples(graph_of):
    assert is_admissible(graph_of("a."), C(plus={0}))
    assert not is_admissible(graph_of("a :- a."), C(plus={0}))
    assert is_admissible(graph_of("a :- a."), C(minus={0}))
    assert is_admissible(graph_of(TWO_LOOP), C(plus={0}, minus={1}))
    assert not is_admissible(graph_of(TWO_LOOP), C(minus={0, 1}))
    with pytest.raises(ValueError):
        is_admissible(graph_of(TWO_LOOP), C(plus={0}))


def test_answer_set_of(graph_of):
    g = graph_of("a.")
    assert names(g, answer_set_of(g, C(plus={0}))) == ["a"]
    assert answer_set_of(g, C(minus={0})) == frozenset()


# search

def test_solve_two_loop(graph_of):
    g = graph_of(TWO_LOOP)
    cs = list(solve(g))
    assert cs == [C(plus={0}, minus={1}), C(plus={1}, minus={0})]


def test_solve_without_branching(graph_of):
    stats = SearchStats()
    g = graph_of("a. b :- a.")
    assert [names(g, m) for m in models_of(g, stats=stats)] == [["a", "b"]]
    assert stats.decisions == 0


def test_solve_respects_max_models(graph_of):
    g = graph_of(TWO_LOOP)
    assert len(models_of(g, max_models=1)) == 1
    assert len(models_of(g, max_models=0)) == 2


def test_solve_toy_n2():
    g = build_rdg_prime(parse_program(gen_toy(2)))
    models = models_of(g)
    assert len(models) == 3
    assert all(is_answer_set(g.program, m) for m in models)
    with_sel1 = [m for m in models if "sel(1)" in names(g, m)]
    assert len(with_sel1) == 1
    assert {"sel(1)", "nsel(2)", "dom(1)", "dom(2)", "p(1,1,1,1,1,1)"} <= set(names(g, with_sel1[0]))


def test_trace_lines(graph_of):
    lines = []
    list(solve(graph_of(TWO_LOOP), trace=lines.append))
    assert lines[:3] == ["[0] P +0 -0", "[0] V -0", "[1] D+ r0"]
    assert lines.count("[1] model") == 2


def test_search_counts_two_loop(graph_of):
    stats = SearchStats()
    list(solve(graph_of(TWO_LOOP), stats=stats))
    assert (stats.decisions, stats.backtracks, stats.models) == (2, 2, 2)
    assert stats.decision_log == [(0, PLUS), (0, MINUS)]


@pytest.mark.parametrize("name, program", cases())
def test_solve_matches_oracle(name, program):
    g = build_rdg_prime(program)
    cs = list(solve(g, check_counters=True))
    models = [answer_set_of(g, c) for c in cs]
    assert len(set(models)) == len(models)
    assert set(models) == oracle_models(name)
    for c, m in zip(cs, models):
        assert generating_rules(program, m) == c.plus
        assert is_admissible(g, c)


# incremental counters

@pytest.mark.parametrize("name, program", cases(corpus()[::7]))
def test_assign_unassign_round_trip(name, program):
    g = build_rdg_prime(program)
    rng = random.Random(name)
    st = ColoringState(g)
    fresh = st.recount()
    order = list(range(g.num_rules))
    rng.shuffle(order)
    for r in order:
        st.assign(r, rng.choice((PLUS, MINUS)))
        assert st.counters_consistent()
    for r in reversed(order):
        st.unassign(r)
        assert st.counters_consistent()
    assert st.counters() == fresh


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_propagator_undo_restores_state(seed):
    rng = random.Random(seed)
    g = build_rdg_prime(parse_program(random_program(rng, 8, 14)))
    prop = Propagator(g, check_counters=True)
    prop.start()
    before = (list(prop.color), prop.counters())
    r = prop.branch_candidate()
    if r is None:
        return
    prop.decide(r, rng.choice((PLUS, MINUS)))
    prop.undo_level()
    assert (list(prop.color), prop.counters()) == before
