"""TPTP-subset parser: cnf/fof annotated formulas.

Supported roles: axiom, hypothesis, definition, lemma, theorem (all read
as axioms), conjecture (negated then clausified), negated_conjecture.
Equality appears infix (`s = t`, `s != t`) and becomes the ordinary
binary predicate "=". `include('file').` is resolved one level deep.

Errors carry line/column. A symbol reused with a different arity or kind
is an error anywhere in the input.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import clausify as cl
from .fol import (
    EQ,
    FUNCTION,
    PREDICATE,
    ROLE_AXIOM,
    ROLE_NEGATED_CONJECTURE,
    Clause,
    Literal,
    Problem,
    Symbol,
    Term,
    Var,
)

AXIOM_LIKE_ROLES = {"axiom", "hypothesis", "definition", "lemma", "theorem", "plain"}
KNOWN_ROLES = AXIOM_LIKE_ROLES | {"conjecture", "negated_conjecture"}


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # name | var | defined | punct | end
    text: str
    line: int
    col: int


_PUNCT2 = ("<=>", "<~>", "=>", "!=")
_PUNCT1 = "()[],.:|&~!?="


def lex(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":  # line comment
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ParseError("unterminated comment", line, col)
            skipped = text[i : end + 2]
            line += skipped.count("\n")
            col = 1 if "\n" in skipped else col + len(skipped)
            i = end + 2
            continue
        start_line, start_col = line, col
        matched2 = next((p for p in _PUNCT2 if text.startswith(p, i)), None)
        if matched2:
            toks.append(Token("punct", matched2, start_line, start_col))
            i += len(matched2)
            col += len(matched2)
            continue
        if ch == "$":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("defined", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "'":
            j = text.find("'", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted name", line, col)
            toks.append(Token("name", text[i + 1 : j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isalpha() or ch == "_" or ch.isdigit():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if word[0].isupper() else "name"
            toks.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT1:
            toks.append(Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("end", "", line, col))
    return toks


class _SignatureBuilder:
    """Tracks (name -> kind, arity) and rejects conflicting reuse."""

    def __init__(self):
        self.by_name: dict[str, Symbol] = {}

    def get(self, name: str, kind: str, arity: int, tok: Token) -> Symbol:
        prev = self.by_name.get(name)
        if prev is None:
            sym = Symbol(name, kind, arity)
            self.by_name[name] = sym
            return sym
        if prev.kind != kind or prev.arity != arity:
            raise ParseError(
                f"symbol {name!r} reused as {kind}/{arity}, "
                f"previously {prev.kind}/{prev.arity}",
                tok.line,
                tok.col,
            )
        return prev


class _Parser:
    def __init__(self, tokens: list[Token], sig: _SignatureBuilder):
        self.toks = tokens
        self.pos = 0
        self.sig = sig

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- annotated formulas ------------------------------------------------

    def parse_units(self) -> list[tuple[str, str, str, object]]:
        """Returns (lang, name, role, payload) tuples; payload is a literal
        tuple list for cnf and a formula tree for fof."""
        units = []
        while self.peek().kind != "end":
            t = self.peek()
            if t.text == "include":
                units.append(self.parse_include())
                continue
            if t.text not in ("cnf", "fof"):
                self.fail(f"expected cnf/fof/include, found {t.text!r}")
            lang = self.next().text
            self.expect("(")
            name_tok = self.next()
            if name_tok.kind not in ("name", "var") and not name_tok.text:
                raise ParseError("expected unit name", name_tok.line, name_tok.col)
            self.expect(",")
            role_tok = self.next()
            role = role_tok.text
            if role not in KNOWN_ROLES:
                raise ParseError(f"unknown role {role!r}", role_tok.line, role_tok.col)
            self.expect(",")
            if lang == "cnf":
                payload: object = self.parse_cnf_formula()
            else:
                payload = self.parse_fof_formula()
            self.expect(")")
            self.expect(".")
            units.append((lang, name_tok.text, role, payload))
        return units

    def parse_include(self):
        self.expect("include")
        self.expect("(")
        t = self.next()
        if t.kind != "name":
            raise ParseError("expected file name", t.line, t.col)
        self.expect(")")
        self.expect(".")
        return ("include", t.text, "", None)

    # -- cnf ---------------------------------------------------------------

    def parse_cnf_formula(self) -> list[Literal]:
        # TPTP cnf_formula: a disjunction, optionally in one pair of parens.
        wrapped = self.peek().text == "("
        if wrapped:
            self.next()
        lits = []
        if self.peek().text == "$false":
            self.next()
        else:
            lits.append(self.parse_literal())
            while self.peek().text == "|":
                self.next()
                lits.append(self.parse_literal())
        if wrapped:
            self.expect(")")
        return lits

    def parse_literal(self) -> Literal:
        positive = True
        while self.peek().text == "~":
            self.next()
            positive = not positive
        return self._finish_atom(positive)

    def _finish_atom(self, positive: bool) -> Literal:
        t = self.peek()
        if t.kind in ("name", "var") or t.kind == "defined":
            term = self.parse_term(allow_predicate=True)
        else:
            self.fail(f"expected atom, found {t.text!r}")
        nxt = self.peek()
        if nxt.text in ("=", "!="):
            self.next()
            rhs = self.parse_term()
            lhs = self._as_term(term, t)
            eq = self.sig.get(EQ, PREDICATE, 2, nxt)
            pos = positive if nxt.text == "=" else not positive
            return Literal(eq, (lhs, self._as_term(rhs, t)), pos)
        return self._as_predicate(term, t, positive)

    def _as_term(self, parsed, tok: Token) -> Term:
        if isinstance(parsed, Term):
            return parsed
        name, args, t = parsed
        sym = self.sig.get(name, FUNCTION, len(args), t)
        return Term(sym, tuple(args))

    def _as_predicate(self, parsed, tok: Token, positive: bool) -> Literal:
        if isinstance(parsed, Term):
            if parsed.is_var:
                raise ParseError("variable used as atom", tok.line, tok.col)
            raise ParseError(
                f"symbol {parsed.sym.name!r} reused as predicate, "
                f"previously {parsed.sym.kind}/{parsed.sym.arity}",
                tok.line,
                tok.col,
            )
        name, args, t = parsed
        sym = self.sig.get(name, PREDICATE, len(args), t)
        return Literal(sym, tuple(args), positive)

    def parse_term(self, allow_predicate: bool = False):
        """Returns a Term for variables and committed functions, or an
        undecided (name, args, token) triple the caller resolves to a
        function or predicate symbol."""
        t = self.next()
        if t.kind == "var":
            return Var(t.text)
        if t.kind not in ("name", "defined"):
            raise ParseError(f"expected term, found {t.text!r}", t.line, t.col)
        name = t.text
        args: list[Term] = []
        if self.peek().text == "(":
            self.next()
            args.append(self._sub_term())
            while self.peek().text == ",":
                self.next()
                args.append(self._sub_term())
            self.expect(")")
        if allow_predicate:
            return (name, args, t)
        sym = self.sig.get(name, FUNCTION, len(args), t)
        return Term(sym, tuple(args))

    def _sub_term(self) -> Term:
        parsed = self.parse_term(allow_predicate=False)
        return parsed

    # -- fof ---------------------------------------------------------------
    # precedence (loosest to tightest): <=> <~>, =>, |, &, unary

    def parse_fof_formula(self):
        f = self.parse_fof_impl()
        while self.peek().text in ("<=>", "<~>"):
            op = self.next().text
            rhs = self.parse_fof_impl()
            f = cl.FIff(f, rhs) if op == "<=>" else cl.FNot(cl.FIff(f, rhs))
        return f

    def parse_fof_impl(self):
        f = self.parse_fof_or()
        if self.peek().text == "=>":
            self.next()
            rhs = self.parse_fof_impl()
            return cl.FImpl(f, rhs)
        return f

    def parse_fof_or(self):
        f = self.parse_fof_and()
        while self.peek().text == "|":
            self.next()
            f = cl.FOr(f, self.parse_fof_and())
        return f

    def parse_fof_and(self):
        f = self.parse_fof_unary()
        while self.peek().text == "&":
            self.next()
            f = cl.FAnd(f, self.parse_fof_unary())
        return f

    def parse_fof_unary(self):
        t = self.peek()
        if t.text == "~":
            self.next()
            return cl.FNot(self.parse_fof_unary())
        if t.text in ("!", "?"):
            self.next()
            self.expect("[")
            names = [self._quantified_var()]
            while self.peek().text == ",":
                self.next()
                names.append(self._quantified_var())
            self.expect("]")
            self.expect(":")
            body = self.parse_fof_unary()
            for name in reversed(names):
                body = cl.FForall(name, body) if t.text == "!" else cl.FExists(name, body)
            return body
        if t.text == "(":
            self.next()
            f = self.parse_fof_formula()
            self.expect(")")
            return f
        if t.text == "$true":
            self.next()
            return cl.FTrue()
        if t.text == "$false":
            self.next()
            return cl.FFalse()
        return cl.FAtom(self._finish_atom(True))

    def _quantified_var(self) -> str:
        t = self.next()
        if t.kind != "var":
            raise ParseError(f"expected variable, found {t.text!r}", t.line, t.col)
        return t.text


def parse_tptp(text: str, name: str = "problem", include_dir: str | None = None) -> Problem:
    """Parse TPTP text into a Problem (everything clausified).

    CNF units become clauses directly. FOF units run through the
    clausifier; a `conjecture` unit is negated first (multiple conjecture
    units are conjoined before negation). Clause ids are assigned in input
    order, axioms first, negated-conjecture clauses after.
    """
    sig = _SignatureBuilder()
    parser = _Parser(lex(text), sig)
    units = parser.parse_units()

    expanded = []
    for unit in units:
        if unit[0] == "include":
            if include_dir is None:
                raise ParseError(f"include({unit[1]!r}) with no include dir", 1, 1)
            path = os.path.join(include_dir, unit[1])
            with open(path) as fh:
                sub = _Parser(lex(fh.read()), sig).parse_units()
            for s in sub:
                if s[0] == "include":
                    raise ParseError("nested include not supported", 1, 1)
                expanded.append(s)
        else:
            expanded.append(unit)

    skolems = cl.SkolemNamer(sig.by_name)
    axioms: list[tuple[str, list[Literal]]] = []
    neg_conj: list[tuple[str, list[Literal]]] = []
    conjectures = []  # (name, formula) conjoined and negated at the end
    for lang, uname, role, payload in expanded:
        if lang == "cnf":
            lits = payload
            if role in AXIOM_LIKE_ROLES:
                axioms.append((uname, lits))
            elif role == "negated_conjecture":
                neg_conj.append((uname, lits))
            else:  # conjecture in cnf: negate each literal? not well-defined
                raise ParseError(
                    "cnf units cannot carry role 'conjecture'; "
                    "use negated_conjecture",
                    1,
                    1,
                )
        else:
            if role == "conjecture":
                conjectures.append((uname, payload))
                continue
            negate = False
            clause_lits = cl.clausify(payload, negate=negate, skolems=skolems)
            target = neg_conj if role == "negated_conjecture" else axioms
            for lits in clause_lits:
                target.append((uname, lits))

    if conjectures:
        formula = conjectures[0][1]
        for _, f in conjectures[1:]:
            formula = cl.FAnd(formula, f)
        for lits in cl.clausify(formula, negate=True, skolems=skolems):
            neg_conj.append((conjectures[0][0], lits))

    clauses_ax = []
    clauses_nc = []
    next_id = 0
    for uname, lits in axioms:
        clauses_ax.append(
            Clause(next_id, tuple(lits), role=ROLE_AXIOM, origin=uname)
        )
        next_id += 1
    for uname, lits in neg_conj:
        clauses_nc.append(
            Clause(
                next_id,
                tuple(lits),
                role=ROLE_NEGATED_CONJECTURE,
                origin=uname,
                goal_descendant=True,
            )
        )
        next_id += 1
    return Problem(name, clauses_ax, clauses_nc)


def parse_clause_text(text: str, sig: _SignatureBuilder | None = None) -> tuple[Literal, ...]:
    """Parse a bare printed clause like `p(X) | ~q(a)` or `$false`."""
    parser = _Parser(lex(text), sig or _SignatureBuilder())
    lits = parser.parse_cnf_formula()
    end = parser.peek()
    if end.kind != "end":
        raise ParseError(f"trailing input {end.text!r}", end.line, end.col)
    return tuple(lits)
