import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dasc.program import (BOT, GroundProgram, ParseError, Rule, atoms_of, format_rule,
                          parse_program, serialize_program)


def texts(p, ids):
    return sorted(p.atom_text(a) for a in ids)


def test_single_fact():
    p = parse_program("a.")
    assert len(p.rules) == 1
    r = p.rules[0]
    assert p.atom_text(r.head) == "a"
    assert r.body_pos == () and r.body_neg == ()
    assert r.is_fact and not r.is_constraint


def test_rule_with_negation():
    p = parse_program("b :- a, not c.")
    r = p.rules[0]
    assert p.atom_text(r.head) == "b"
    assert texts(p, r.body_pos) == ["a"]
    assert texts(p, r.body_neg) == ["c"]


def test_ground_constraint():
    p = parse_program(":- sel(1), sel(2).")
    r = p.rules[0]
    assert r.head is None and r.is_constraint
    assert texts(p, r.body_pos) == ["sel(1)", "sel(2)"]
    assert r.body_neg == ()


def test_atoms_of():
    p = parse_program("a.")
    assert texts(p, atoms_of(p)) == ["a"]
    p = parse_program("b :- a, not c. :- d.")
    assert texts(p, atoms_of(p)) == ["a", "b", "c", "d"]
    assert BOT not in atoms_of(p)


def test_shared_ids_and_rule_order():
    p = parse_program("q :- p. p. r :- not q, p.")
    assert [r.id for r in p.rules] == [0, 1, 2]
    assert p.rules[0].body_pos == (p.rules[1].head,)
    assert p.atom_id("p") == p.rules[1].head


def test_overlapping_bodies_parse():
    p = parse_program("a :- b, not b.")
    r = p.rules[0]
    assert r.body_pos == r.body_neg


def test_terms_and_comments():
    src = """
    % a comment line
    p(1, x, -2) :- q(a_b), not r'.  % trailing
    """
    p = parse_program(src)
    assert p.atom_text(p.rules[0].head) == "p(1,x,-2)"
    assert texts(p, p.rules[0].body_neg) == ["r'"]


def test_empty_program():
    p = parse_program("  % nothing\n")
    assert p.rules == () and atoms_of(p) == frozenset()


@pytest.mark.parametrize("src, line, col", [
    ("a", 1, 2),
    ("a :- .", 1, 6),
    ("a.\nb :- c,, d.", 2, 8),
    ("A.", 1, 1),
    ("p(1 2).", 1, 5),
    ("a :- not.", 1, 9),
])
def test_syntax_errors_have_positions(src, line, col):
    with pytest.raises(ParseError) as info:
        parse_program(src)
    assert (info.value.line, info.value.column) == (line, col)


@pytest.mark.parametrize("src", ["bot.", "a :- bot.", ":- not bot."])
def test_reserved_falsity_atom(src):
    with pytest.raises(ParseError, match="reserved"):
        parse_program(src)


def test_program_validation():
    with pytest.raises(ValueError):
        GroundProgram((Rule(1, None),), ("bot",))
    with pytest.raises(ValueError):
        GroundProgram((Rule(0, 3),), ("bot", "a"))
    with pytest.raises(ValueError):
        GroundProgram((Rule(0, BOT),), ("bot",))


def test_build_and_format():
    p = GroundProgram.build([("a", [], []), (None, ["a"], ["b"]), ("b", ["a"], [])])
    assert serialize_program(p) == "a.\n:- a, not b.\nb :- a.\n"
    assert format_rule(p, p.rules[1]) == ":- a, not b."


def test_unknown_atom_lookup():
    p = parse_program("a.")
    with pytest.raises(KeyError):
        p.atom_id("b")
    with pytest.raises(KeyError):
        p.atom_id("bot")


def test_format_atoms_sorted():
    p = parse_program("zz. b. a(2). a(10).")
    assert p.format_atoms(atoms_of(p)) == ["a(10)", "a(2)", "b", "zz"]


_atom = st.sampled_from(["a", "b", "c", "p(1)", "p(2)", "q(x,1)"])
_rule = st.tuples(st.one_of(st.none(), _atom), st.lists(_atom, max_size=3),
                  st.lists(_atom, max_size=3)).filter(lambda t: t[0] or t[1] or t[2])


@settings(max_examples=150, deadline=None)
@given(st.lists(_rule, max_size=8))
def test_serialize_round_trip(triples):
    p = GroundProgram.build(triples)
    q = parse_program(serialize_program(p))
    assert serialize_program(q) == serialize_program(p)
    assert len(q.rules) == len(p.rules)
