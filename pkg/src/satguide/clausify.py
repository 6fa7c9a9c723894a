"""Clausification: FOF formula trees to clausal normal form.

Pipeline: optional negation, implication/equivalence elimination, negation
normal form, implicit universal closure, standardizing variables apart,
skolemization (deterministic fresh symbols sk1, sk2, ... in clausification
order), distribution of | over &, clause splitting.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fol import (
    FUNCTION,
    ROLE_AXIOM,
    App,
    Clause,
    Literal,
    Symbol,
    Term,
    Var,
)


# -- formula trees -----------------------------------------------------------


@dataclass(frozen=True)
class FAtom:
    lit: Literal


@dataclass(frozen=True)
class FNot:
    f: object


@dataclass(frozen=True)
class FAnd:
    a: object
    b: object


@dataclass(frozen=True)
class FOr:
    a: object
    b: object


@dataclass(frozen=True)
class FImpl:
    a: object
    b: object


@dataclass(frozen=True)
class FIff:
    a: object
    b: object


@dataclass(frozen=True)
class FForall:
    var: str
    body: object


@dataclass(frozen=True)
class FExists:
    var: str
    body: object


@dataclass(frozen=True)
class FTrue:
    pass


@dataclass(frozen=True)
class FFalse:
    pass


class SkolemNamer:
    """Deterministic sk<N> names, fresh with respect to a signature.

    The signature dict is shared with the parser so skolems introduced for
    one unit cannot collide with symbols appearing later in the input.
    """

    def __init__(self, by_name: dict[str, Symbol] | None = None):
        self.by_name = by_name if by_name is not None else {}
        self.counter = 0

    def fresh(self, arity: int) -> Symbol:
        while True:
            self.counter += 1
            name = f"sk{self.counter}"
            if name not in self.by_name:
                break
        sym = Symbol(name, FUNCTION, arity)
        self.by_name[name] = sym
        return sym


# -- transformation passes ----------------------------------------------------


def eliminate_connectives(f):
    """Rewrite => and <=> in terms of ~, &, |."""
    match f:
        case FImpl(a, b):
            return FOr(FNot(eliminate_connectives(a)), eliminate_connectives(b))
        case FIff(a, b):
            ea, eb = eliminate_connectives(a), eliminate_connectives(b)
            return FAnd(FOr(FNot(ea), eb), FOr(FNot(eb), ea))
        case FNot(g):
            return FNot(eliminate_connectives(g))
        case FAnd(a, b):
            return FAnd(eliminate_connectives(a), eliminate_connectives(b))
        case FOr(a, b):
            return FOr(eliminate_connectives(a), eliminate_connectives(b))
        case FForall(v, body):
            return FForall(v, eliminate_connectives(body))
        case FExists(v, body):
            return FExists(v, eliminate_connectives(body))
        case _:
            return f


def to_nnf(f, positive: bool = True):
    """Push negations to the atoms. Input must be connective-free."""
    match f:
        case FAtom(lit):
            return FAtom(lit) if positive else FAtom(lit.negated())
        case FNot(g):
            return to_nnf(g, not positive)
        case FAnd(a, b):
            node = FAnd if positive else FOr
            return node(to_nnf(a, positive), to_nnf(b, positive))
        case FOr(a, b):
            node = FOr if positive else FAnd
            return node(to_nnf(a, positive), to_nnf(b, positive))
        case FForall(v, body):
            node = FForall if positive else FExists
            return node(v, to_nnf(body, positive))
        case FExists(v, body):
            node = FExists if positive else FForall
            return node(v, to_nnf(body, positive))
        case FTrue():
            return FTrue() if positive else FFalse()
        case FFalse():
            return FFalse() if positive else FTrue()
        case _:
            raise TypeError(f"unexpected formula node {f!r}")


def free_variables(f, bound=frozenset()) -> list[str]:
    """Free variable names in order of first occurrence."""
    out: list[str] = []

    def term_vars(t: Term, bound, out):
        if t.is_var:
            if t.sym.name not in bound and t.sym.name not in out:
                out.append(t.sym.name)
        else:
            for a in t.args:
                term_vars(a, bound, out)

    def walk(f, bound):
        match f:
            case FAtom(lit):
                for a in lit.args:
                    term_vars(a, bound, out)
            case FNot(g):
                walk(g, bound)
            case FAnd(a, b) | FOr(a, b):
                walk(a, bound)
                walk(b, bound)
            case FForall(v, body) | FExists(v, body):
                walk(body, bound | {v})
            case _:
                pass

    walk(f, set(bound))
    return out


def _substitute(t: Term, env: dict[str, Term]) -> Term:
    if t.is_var:
        return env.get(t.sym.name, t)
    return Term(t.sym, tuple(_substitute(a, env) for a in t.args))


def skolemize(f, skolems: SkolemNamer):
    """Standardize apart and skolemize an NNF formula; drops quantifiers.

    Universal variables are renamed to fresh X1, X2, ...; each existential
    becomes a skolem function of the universals in scope.
    """
    var_counter = [0]

    def fresh_var() -> Term:
        var_counter[0] += 1
        return Var(f"X{var_counter[0]}")

    def walk(f, env: dict[str, Term], universals: tuple[Term, ...]):
        match f:
            case FAtom(lit):
                args = tuple(_substitute(a, env) for a in lit.args)
                return FAtom(Literal(lit.pred, args, lit.positive))
            case FAnd(a, b):
                return FAnd(walk(a, env, universals), walk(b, env, universals))
            case FOr(a, b):
                return FOr(walk(a, env, universals), walk(b, env, universals))
            case FForall(v, body):
                x = fresh_var()
                return walk(body, {**env, v: x}, universals + (x,))
            case FExists(v, body):
                sk = skolems.fresh(len(universals))
                return walk(body, {**env, v: Term(sk, universals)}, universals)
            case FTrue() | FFalse():
                return f
            case _:
                raise TypeError(f"unexpected node in NNF {f!r}")

    closure = free_variables(f)
    for v in reversed(closure):
        f = FForall(v, f)
    return walk(f, {}, ())


def distribute(f) -> list[list[Literal]]:
    """Quantifier-free NNF to a list of clauses (lists of literals)."""
    match f:
        case FAtom(lit):
            return [[lit]]
        case FTrue():
            return []
        case FFalse():
            return [[]]
        case FAnd(a, b):
            return distribute(a) + distribute(b)
        case FOr(a, b):
            left, right = distribute(a), distribute(b)
            if not left or not right:  # a disjunct is valid
                return []
            return [ca + cb for ca in left for cb in right]
        case _:
            raise TypeError(f"unexpected node after skolemization {f!r}")


def _dedup(lits: list[Literal]) -> list[Literal]:
    seen = set()
    out = []
    for l in lits:
        key = (l.pred, l.args, l.positive)
        if key not in seen:
            seen.add(key)
            out.append(l)
    return out


def clausify(formula, negate: bool = False, skolems: SkolemNamer | None = None) -> list[tuple[Literal, ...]]:
    """Full pipeline; returns literal tuples (the parser wraps them in Clauses)."""
    if skolems is None:
        skolems = SkolemNamer()
    f = FNot(formula) if negate else formula
    f = eliminate_connectives(f)
    f = to_nnf(f)
    f = skolemize(f, skolems)
    return [tuple(_dedup(lits)) for lits in distribute(f)]


def clausify_formula(formula, negate: bool = False, role: str = ROLE_AXIOM) -> list[Clause]:
    """Standalone clausification producing Clause objects with ids from 0."""
    out = []
    for i, lits in enumerate(clausify(formula, negate=negate)):
        out.append(Clause(i, lits, role=role))
    return out
