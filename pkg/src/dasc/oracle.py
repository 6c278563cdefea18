"""Reference stable-model semantics by reduct and least fixpoint.

Everything here is intentionally naive: interpretations are frozensets of
atom ids and answer sets are found by trying every subset of the atoms.
The coloring solver is tested against this module, so it must never
import from the graph or coloring code.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .program import BOT, GroundProgram, Rule, atoms_of

Interpretation = frozenset

DEFAULT_ATOM_BOUND = 20


class AtomBoundExceeded(ValueError):
    pass


def _applicable(rule: Rule, x) -> bool:
    return all(a in x for a in rule.body_pos) and not any(a in x for a in rule.body_neg)


def satisfies(x: Iterable[int], rule: Rule) -> bool:
    """Whether ``x`` satisfies ``rule``; a constraint fails when its body holds."""
    x = frozenset(x)
    if not _applicable(rule, x):
        return True
    return rule.head is not None and rule.head in x


def reduct(program: GroundProgram, x: Iterable[int]) -> GroundProgram:
    x = frozenset(x)
    kept = (Rule(0, r.head, r.body_pos, ()) for r in program.rules
            if not any(a in x for a in r.body_neg))
    return program.with_rules(kept)


def tp(program: GroundProgram, x: frozenset) -> frozenset:
    """One step of the immediate consequence operator; falsity is atom 0."""
    return frozenset(BOT if r.head is None else r.head
                     for r in program.rules if all(a in x for a in r.body_pos))


def tp_iterates(program: GroundProgram) -> Iterator[frozenset]:
    """Yield T^0(empty), T^1(empty), ... up to and including the fixpoint."""
    if any(r.body_neg for r in program.rules):
        raise ValueError("immediate consequence iteration needs a definite program")
    x = frozenset()
    while True:
        yield x
        nxt = tp(program, x)
        if nxt == x:
            return
        x = nxt


def cn(definite: GroundProgram) -> frozenset:
    """Least model of a definite program (constraints may derive atom 0)."""
    for x in tp_iterates(definite):
        pass
    return x


def generating_rules(program: GroundProgram, x: Iterable[int]) -> frozenset[int]:
    x = frozenset(x)
    return frozenset(r.id for r in program.rules if _applicable(r, x))


def _by_reduct(program: GroundProgram, x: frozenset) -> bool:
    return cn(reduct(program, x)) == x and BOT not in x


def _by_generating_rules(program: GroundProgram, x: frozenset) -> bool:
    rx = generating_rules(program, x)
    definite = program.with_rules(Rule(0, r.head, r.body_pos, ())
                                  for r in program.rules if r.id in rx)
    return cn(definite) == x and BOT not in x


def check_answer_set(program: GroundProgram, x: Iterable[int]) -> dict:
    """Both characterizations with their fixpoints, for diagnostics."""
    x = frozenset(x)
    red = cn(reduct(program, x))
    rx = generating_rules(program, x)
    gen = cn(program.with_rules(Rule(0, r.head, r.body_pos, ())
                                for r in program.rules if r.id in rx))
    return {
        "reduct_fixpoint": red,
        "reduct_ok": red == x and BOT not in x,
        "generating_rules": rx,
        "generating_fixpoint": gen,
        "generating_ok": gen == x and BOT not in x,
    }


def is_answer_set(program: GroundProgram, x: Iterable[int]) -> bool:
    x = frozenset(x)
    by_reduct = _by_reduct(program, x)
    by_generating = _by_generating_rules(program, x)
    assert by_reduct == by_generating, f"characterizations disagree on {sorted(x)}"
    return by_reduct


def enumerate_answer_sets(program: GroundProgram,
                          bound: int = DEFAULT_ATOM_BOUND) -> list[frozenset]:
    """All answer sets, in bitmask order over the sorted atom ids."""
    atoms = sorted(atoms_of(program))
    if len(atoms) > bound:
        raise AtomBoundExceeded(f"{len(atoms)} atoms exceed the oracle bound of {bound}")
    found = []
    for mask in range(1 << len(atoms)):
        x = frozenset(a for i, a in enumerate(atoms) if mask >> i & 1)
        if is_answer_set(program, x):
            found.append(x)
    return found
