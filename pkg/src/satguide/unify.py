"""Robinson unification with occurs check, plus one-way matching.

Substitutions are dicts mapping variable Symbols to Terms. Bindings may
chain (X -> Y, Y -> f(a)); `resolve_term` follows chains while applying.
"""

from __future__ import annotations

from .fol import Clause, Literal, Symbol, Term

Substitution = dict[Symbol, Term]


def walk(t: Term, sub: Substitution) -> Term:
    """Follow variable bindings until a non-variable or unbound variable."""
    while t.is_var and t.sym in sub:
        t = sub[t.sym]
    return t


def occurs(v: Symbol, t: Term, sub: Substitution) -> bool:
    t = walk(t, sub)
    if t.is_var:
        return t.sym == v
    return any(occurs(v, a, sub) for a in t.args)


def unify_terms(t1: Term, t2: Term, sub: Substitution | None = None) -> Substitution | None:
    """Most general unifier extending `sub`, or None."""
    if sub is None:
        sub = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a, sub), walk(b, sub)
        if a.is_var:
            if b.is_var and a.sym == b.sym:
                continue
            if occurs(a.sym, b, sub):
                return None
            sub[a.sym] = b
            continue
        if b.is_var:
            if occurs(b.sym, a, sub):
                return None
            sub[b.sym] = a
            continue
        if a.sym != b.sym:
            return None
        stack.extend(zip(a.args, b.args))
    return sub


def unify_atoms(l1: Literal, l2: Literal, sub: Substitution | None = None) -> Substitution | None:
    """Unify two literals' atoms, ignoring polarity."""
    if l1.pred != l2.pred:
        return None
    if sub is None:
        sub = {}
    for a, b in zip(l1.args, l2.args):
        sub = unify_terms(a, b, sub)
        if sub is None:
            return None
    return sub


def apply_sub(t: Term, sub: Substitution) -> Term:
    t = walk(t, sub)
    if t.is_var:
        return t
    return Term(t.sym, tuple(apply_sub(a, sub) for a in t.args))


def apply_sub_literal(lit: Literal, sub: Substitution) -> Literal:
    return Literal(lit.pred, tuple(apply_sub(a, sub) for a in lit.args), lit.positive)


def apply_sub_literals(lits, sub: Substitution) -> tuple[Literal, ...]:
    return tuple(apply_sub_literal(l, sub) for l in lits)


# -- one-way matching (for subsumption) ---------------------------------------


def match_terms(pattern: Term, target: Term, sub: Substitution | None = None) -> Substitution | None:
    """Extend `sub` so that pattern[sub] == target; target is fixed."""
    if sub is None:
        sub = {}
    stack = [(pattern, target)]
    sub = dict(sub)
    while stack:
        p, t = stack.pop()
        if p.is_var:
            bound = sub.get(p.sym)
            if bound is None:
                sub[p.sym] = t
            elif bound != t:
                return None
            continue
        if t.is_var or p.sym != t.sym:
            return None
        stack.extend(zip(p.args, t.args))
    return sub


def match_literals(pattern: Literal, target: Literal, sub: Substitution | None = None) -> Substitution | None:
    if pattern.pred != target.pred or pattern.positive != target.positive:
        return None
    if sub is None:
        sub = {}
    for p, t in zip(pattern.args, target.args):
        sub = match_terms(p, t, sub)
        if sub is None:
            return None
    return sub


def clause_variables(c: Clause) -> set[Symbol]:
    out = set()

    def term_vars(t: Term):
        if t.is_var:
            out.add(t.sym)
        else:
            for a in t.args:
                term_vars(a)

    for lit in c.literals:
        for a in lit.args:
            term_vars(a)
    return out
