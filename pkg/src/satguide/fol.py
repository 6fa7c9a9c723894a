"""First-order terms, literals, clauses and problems.

Everything here is plain immutable data. A clause is a disjunction of
literals; a literal is a possibly negated predicate application; terms are
variables or function applications. Equality is an ordinary binary
predicate named "=" (printed infix, no built-in equality reasoning).

The printed form of a clause is canonical: it round-trips through the
parser and its lexed token stream is exactly what the tokenizer emits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

FUNCTION = "function"
PREDICATE = "predicate"
VARIABLE = "variable"

ROLE_AXIOM = "axiom"
ROLE_NEGATED_CONJECTURE = "negated_conjecture"
ROLE_DERIVED = "derived"

EQ = "="


@dataclass(frozen=True, slots=True)
class Symbol:
    name: str
    kind: str  # function | predicate | variable
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("symbol name must be nonempty")
        if self.kind == VARIABLE and self.arity != 0:
            raise ValueError(f"variable {self.name} must have arity 0")

    def __repr__(self):
        return f"{self.name}/{self.arity}:{self.kind[0]}"


def var_symbol(name: str) -> Symbol:
    return Symbol(name, VARIABLE, 0)


@dataclass(frozen=True, slots=True)
class Term:
    """A variable (kind=variable, no args) or a function application."""

    sym: Symbol
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if self.sym.kind == PREDICATE:
            raise ValueError(f"predicate {self.sym.name} used as a term")
        if len(self.args) != self.sym.arity:
            raise ValueError(
                f"{self.sym.name} expects {self.sym.arity} args, got {len(self.args)}"
            )

    @property
    def is_var(self) -> bool:
        return self.sym.kind == VARIABLE

    def __repr__(self):
        return term_str(self)


def Var(name: str) -> Term:
    return Term(var_symbol(name))


def App(sym: Symbol, *args: Term) -> Term:
    return Term(sym, tuple(args))


@dataclass(frozen=True, slots=True)
class Literal:
    pred: Symbol
    args: tuple[Term, ...]
    positive: bool = True

    def __post_init__(self):
        if self.pred.kind != PREDICATE:
            raise ValueError(f"{self.pred.name} is not a predicate")
        if len(self.args) != self.pred.arity:
            raise ValueError(
                f"{self.pred.name} expects {self.pred.arity} args, got {len(self.args)}"
            )

    def negated(self) -> Literal:
        return Literal(self.pred, self.args, not self.positive)

    @property
    def atom(self) -> tuple:
        return (self.pred, self.args)

    def __repr__(self):
        return literal_str(self)


@dataclass(eq=False)
class Clause:
    """A disjunction of literals with search bookkeeping.

    Identity is by `id` (clauses are never structurally compared through
    __eq__; redundancy checks go through explicit variant/subsumption
    tests). `age` is the creation ordinal used by FIFO selection; input
    clauses get age == id. `goal_descendant` marks clauses derived (possibly
    transitively) from the negated conjecture, which the SOS-flavored
    selection tiers prefer.
    """

    id: int
    literals: tuple[Literal, ...]
    role: str = ROLE_AXIOM
    age: int = -1
    parents: tuple[int, ...] = ()
    rule: str = "input"
    origin: str | None = None  # name of the input formula this came from
    goal_descendant: bool = False

    def __post_init__(self):
        if self.age < 0:
            self.age = self.id
        if self.role == ROLE_DERIVED and not self.parents:
            raise ValueError("derived clause needs parents")
        if self.role != ROLE_DERIVED and self.parents:
            raise ValueError("input clause cannot have parents")
        if self.role == ROLE_NEGATED_CONJECTURE:
            self.goal_descendant = True

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def __repr__(self):
        return f"Clause[{self.id}]({clause_str(self)})"


@dataclass
class Problem:
    name: str
    axioms: list[Clause]
    negated_conjecture: list[Clause]
    signature: set[Symbol] = field(default_factory=set)

    def __post_init__(self):
        if not self.signature:
            self.signature = collect_signature(self.clauses())

    def clauses(self) -> list[Clause]:
        return self.axioms + self.negated_conjecture

    def conjecture_symbols(self) -> set[Symbol]:
        """Function and predicate symbols occurring in the negated conjecture."""
        syms = collect_signature(self.negated_conjecture)
        return {s for s in syms if s.kind != VARIABLE}


# ---------------------------------------------------------------------------
# traversal helpers


def term_symbols(t: Term):
    yield t.sym
    for a in t.args:
        yield from term_symbols(a)


def clause_symbols(c: Clause):
    for lit in c.literals:
        yield lit.pred
        for a in lit.args:
            yield from term_symbols(a)


def collect_signature(clauses) -> set[Symbol]:
    sig = set()
    for c in clauses:
        sig.update(clause_symbols(c))
    return sig


def clause_vars(c: Clause) -> list[Symbol]:
    """Variables in order of first occurrence, left to right."""
    seen = []
    have = set()
    for s in clause_symbols(c):
        if s.kind == VARIABLE and s not in have:
            have.add(s)
            seen.append(s)
    return seen


def symbol_counts(c: Clause) -> tuple[int, int]:
    """(function/predicate occurrences, variable occurrences)."""
    fp = v = 0
    for s in clause_symbols(c):
        if s.kind == VARIABLE:
            v += 1
        else:
            fp += 1
    return fp, v


# ---------------------------------------------------------------------------
# canonical printing

FALSE_TOKEN = "$false"


def term_tokens(t: Term) -> list[str]:
    if not t.args:
        return [t.sym.name]
    toks = [t.sym.name, "("]
    for i, a in enumerate(t.args):
        if i:
            toks.append(",")
        toks.extend(term_tokens(a))
    toks.append(")")
    return toks


def literal_tokens(lit: Literal) -> list[str]:
    if lit.pred.name == EQ:
        op = "=" if lit.positive else "!="
        return term_tokens(lit.args[0]) + [op] + term_tokens(lit.args[1])
    toks = [] if lit.positive else ["~"]
    toks.append(lit.pred.name)
    if lit.args:
        toks.append("(")
        for i, a in enumerate(lit.args):
            if i:
                toks.append(",")
            toks.extend(term_tokens(a))
        toks.append(")")
    return toks


def clause_tokens(c: Clause) -> list[str]:
    """The clause's printed symbol stream (names, ~, |, parens, commas)."""
    if c.is_empty:
        return [FALSE_TOKEN]
    toks: list[str] = []
    for i, lit in enumerate(c.literals):
        if i:
            toks.append("|")
        toks.extend(literal_tokens(lit))
    return toks


def term_str(t: Term) -> str:
    if not t.args:
        return t.sym.name
    return f"{t.sym.name}({','.join(term_str(a) for a in t.args)})"


def literal_str(lit: Literal) -> str:
    if lit.pred.name == EQ:
        op = "=" if lit.positive else "!="
        return f"{term_str(lit.args[0])} {op} {term_str(lit.args[1])}"
    sign = "" if lit.positive else "~"
    if not lit.args:
        return f"{sign}{lit.pred.name}"
    return f"{sign}{lit.pred.name}({','.join(term_str(a) for a in lit.args)})"


def clause_str(c: Clause) -> str:
    if c.is_empty:
        return FALSE_TOKEN
    return " | ".join(literal_str(lit) for lit in c.literals)


def problem_str(p: Problem) -> str:
    """TPTP text for a problem (cnf form only)."""
    lines = []
    for c in p.axioms:
        name = c.origin or f"c{c.id}"
        lines.append(f"cnf({name}, axiom, ({clause_str(c)})).")
    for c in p.negated_conjecture:
        name = c.origin or f"c{c.id}"
        lines.append(f"cnf({name}, negated_conjecture, ({clause_str(c)})).")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# variable normalization


def normalize_variables(c: Clause) -> Clause:
    """Rename variables to V1, V2, ... in order of first occurrence.

    Idempotent; structure is otherwise untouched. Keeps the token
    vocabulary bounded regardless of source variable names.
    """
    mapping = {v: Var(f"V{i + 1}") for i, v in enumerate(clause_vars(c))}
    if all(v.name == t.sym.name for v, t in mapping.items()):
        return c

    def rename(t: Term) -> Term:
        if t.is_var:
            return mapping[t.sym]
        return Term(t.sym, tuple(rename(a) for a in t.args))

    lits = tuple(
        Literal(l.pred, tuple(rename(a) for a in l.args), l.positive)
        for l in c.literals
    )
    return replace(c, literals=lits)


def rename_clause_apart(c: Clause, suffix: str) -> Clause:
    """Rename every variable by appending `suffix` (standardize apart)."""

    def rename(t: Term) -> Term:
        if t.is_var:
            return Var(t.sym.name + suffix)
        return Term(t.sym, tuple(rename(a) for a in t.args))

    lits = tuple(
        Literal(l.pred, tuple(rename(a) for a in l.args), l.positive)
        for l in c.literals
    )
    return replace(c, literals=lits)


def canonical_key(c: Clause) -> str:
    """A printable key equal for clauses that are syntactic variants.

    Literals are sorted under a variable-blind projection, then variables
    are renamed by first occurrence in that order. Used for duplicate
    detection; near-misses (variants that sort differently under the
    projection) are safe, they just dedup less.
    """
    blind = sorted(range(len(c.literals)), key=lambda i: _blind_str(c.literals[i]))
    reordered = replace(c, literals=tuple(c.literals[i] for i in blind))
    return clause_str(normalize_variables(reordered))


def _blind_str(lit: Literal) -> str:
    toks = literal_tokens(lit)
    return " ".join("_" if t and t[0].isupper() else t for t in toks)
