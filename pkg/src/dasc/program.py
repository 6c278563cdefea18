"""Ground normal logic programs: representation, parsing and printing.

Atoms are interned to dense integer ids. Id 0 is reserved for falsity
(the implicit head of a constraint) and never shows up in a rule: a
constraint simply has ``head = None``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

BOT = 0
BOT_TEXT = "bot"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Rule:
    id: int
    head: int | None
    body_pos: tuple[int, ...] = ()
    body_neg: tuple[int, ...] = ()

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body_pos and not self.body_neg


@dataclass(frozen=True)
class GroundProgram:
    """An immutable list of ground rules plus the atom table.

    ``symbols[i]`` is the text of atom ``i``; ``symbols[0]`` is the
    reserved falsity atom.
    """

    rules: tuple[Rule, ...]
    symbols: tuple[str, ...] = (BOT_TEXT,)

    def __post_init__(self):
        if not self.symbols or self.symbols[0] != BOT_TEXT:
            raise ValueError("symbol table must start with the falsity atom")
        n = len(self.symbols)
        for i, rule in enumerate(self.rules):
            if rule.id != i:
                raise ValueError(f"rule ids must be dense and ordered, got {rule.id} at {i}")
            for a in (() if rule.head is None else (rule.head,)) + rule.body_pos + rule.body_neg:
                if not 0 < a < n:
                    raise ValueError(f"rule {i} references unknown atom {a}")

    @property
    def num_atoms(self) -> int:
        """Number of user atoms in the table (falsity excluded)."""
        return len(self.symbols) - 1

    def atom_text(self, atom: int) -> str:
        return self.symbols[atom]

    def atom_id(self, text: str) -> int:
        try:
            return self._index[text]
        except KeyError:
            raise KeyError(f"unknown atom {text!r}") from None

    @property
    def _index(self) -> dict[str, int]:
        index = self.__dict__.get("_index_cache")
        if index is None:
            index = {s: i for i, s in enumerate(self.symbols) if i != BOT}
            object.__setattr__(self, "_index_cache", index)
        return index

    def format_atoms(self, atoms: Iterable[int]) -> list[str]:
        """Texts of ``atoms`` in lexicographic order."""
        return sorted(self.symbols[a] for a in atoms)

    def with_rules(self, rules: Iterable[Rule]) -> "GroundProgram":
        """A program over the same atom table with ``rules`` renumbered."""
        return GroundProgram(
            tuple(Rule(i, r.head, r.body_pos, r.body_neg) for i, r in enumerate(rules)),
            self.symbols,
        )

    @classmethod
    def build(cls, rules: Sequence[tuple[str | None, Sequence[str], Sequence[str]]]) -> "GroundProgram":
        """Build a program from ``(head, pos, neg)`` text triples."""
        table = _AtomTable()
        out = []
        for i, (head, pos, neg) in enumerate(rules):
            h = None if head is None else table.intern(head)
            out.append(Rule(i, h, _dedupe(table.intern(a) for a in pos),
                            _dedupe(table.intern(a) for a in neg)))
        return cls(tuple(out), table.symbols())


def atoms_of(program: GroundProgram) -> frozenset[int]:
    """Atoms occurring in some head or body; falsity is never included."""
    atoms = set()
    for r in program.rules:
        if r.head is not None:
            atoms.add(r.head)
        atoms.update(r.body_pos)
        atoms.update(r.body_neg)
    atoms.discard(BOT)
    return frozenset(atoms)


def _dedupe(items: Iterable[int]) -> tuple[int, ...]:
    return tuple(dict.fromkeys(items))


class _AtomTable:
    def __init__(self):
        self._ids = {}
        self._texts = [BOT_TEXT]

    def intern(self, text: str) -> int:
        if text == BOT_TEXT:
            raise ValueError(f"{BOT_TEXT!r} is reserved")
        i = self._ids.get(text)
        if i is None:
            i = self._ids[text] = len(self._texts)
            self._texts.append(text)
        return i

    def symbols(self) -> tuple[str, ...]:
        return tuple(self._texts)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<if>:-)
  | (?P<int>-?\d+)
  | (?P<ident>[a-z_][A-Za-z0-9_']*)
  | (?P<punct>[().,])
    """,
    re.VERBOSE,
)


class _Lexer:
    def __init__(self, text: str):
        self.tokens = []
        line, line_start, pos = 1, 0, 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                value = m.group()
                self.tokens.append((kind if kind != "punct" else value, value, line, pos - line_start + 1))
            for nl in re.finditer("\n", m.group()):
                line += 1
                line_start = m.start() + nl.end()
            pos = m.end()
        self.tokens.append(("eof", "", line, pos - line_start + 1))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str):
        tok = self.next()
        if tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {what}, found {found}", tok[2], tok[3])
        return tok


def _parse_atom(lex: _Lexer) -> tuple[str, int, int]:
    tok = lex.next()
    if tok[0] != "ident" or tok[1] == "not":
        found = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ParseError(f"expected atom, found {found}", tok[2], tok[3])
    text = tok[1]
    if lex.peek()[0] == "(":
        lex.next()
        args = []
        while True:
            arg = lex.next()
            if arg[0] not in ("int", "ident"):
                raise ParseError("expected integer or identifier argument", arg[2], arg[3])
            args.append(arg[1])
            sep = lex.next()
            if sep[0] == ")":
                break
            if sep[0] != ",":
                raise ParseError("expected ',' or ')'", sep[2], sep[3])
        text = f"{text}({','.join(args)})"
    if text == BOT_TEXT:
        raise ParseError(f"{BOT_TEXT!r} is a reserved atom", tok[2], tok[3])
    return text, tok[2], tok[3]


def parse_program(text: str) -> GroundProgram:
    """Parse the ``.gasp`` surface syntax.

    >>> p = parse_program("b :- a, not c.")
    >>> p.format_atoms(p.rules[0].body_pos)
    ['a']
    """
    lex = _Lexer(text)
    table = _AtomTable()
    rules = []
    while lex.peek()[0] != "eof":
        head = None
        if lex.peek()[0] != "if":
            head = table.intern(_parse_atom(lex)[0])
        pos, neg = [], []
        if lex.peek()[0] == "if":
            lex.next()
            while True:
                negated = lex.peek()[0] == "ident" and lex.peek()[1] == "not"
                if negated:
                    lex.next()
                atom = table.intern(_parse_atom(lex)[0])
                (neg if negated else pos).append(atom)
                if lex.peek()[0] != ",":
                    break
                lex.next()
        lex.expect(".", "'.'")
        rules.append(Rule(len(rules), head, _dedupe(pos), _dedupe(neg)))
    return GroundProgram(tuple(rules), table.symbols())


def format_rule(program: GroundProgram, rule: Rule) -> str:
    body = [program.symbols[a] for a in rule.body_pos]
    body += ["not " + program.symbols[a] for a in rule.body_neg]
    head = "" if rule.head is None else program.symbols[rule.head]
    if not body:
        return f"{head}."
    return f"{head} :- {', '.join(body)}." if head else f":- {', '.join(body)}."


def serialize_program(program: GroundProgram) -> str:
    return "".join(format_rule(program, r) + "\n" for r in program.rules)
