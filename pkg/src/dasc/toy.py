"""Ground instances of the selection toy benchmark.

The non-ground program::

    dom(1..n).
    sel(X) :- dom(X), not nsel(X).
    nsel(X) :- dom(X), not sel(X).
    :- sel(X), sel(Y), X != Y.
    p(X1,...,X6) :- sel(X1), ..., sel(X6).

Its answer sets select at most one domain element, so there are n + 1.
"""

from __future__ import annotations

from itertools import product


def toy_rule_count(n: int, arity: int = 6) -> int:
    return n + 2 * n + n * (n - 1) + n ** arity


def gen_toy(n: int, arity: int = 6) -> str:
    if n < 1:
        raise ValueError("domain size must be at least 1")
    if arity < 1:
        raise ValueError("arity must be at least 1")
    dom = range(1, n + 1)
    lines = [f"dom({x})." for x in dom]
    for x in dom:
        lines.append(f"sel({x}) :- dom({x}), not nsel({x}).")
        lines.append(f"nsel({x}) :- dom({x}), not sel({x}).")
    lines += [f":- sel({x}), sel({y})." for x in dom for y in dom if x != y]
    for xs in product(dom, repeat=arity):
        body = ", ".join(f"sel({x})" for x in xs)
        lines.append(f"p({','.join(map(str, xs))}) :- {body}.")
    return "\n".join(lines) + "\n"
