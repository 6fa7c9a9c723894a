"""Independent test oracles.

`bfs_saturate` decides small problems by exhaustive level-by-level
saturation: every level generates all resolvents of known clauses against
the newest level plus all factors, with only exact-variant
deduplication. No selection heuristic, no subsumption, no deletion;
suitable for the function-free mini corpus where the clause space stays
finite up to renaming.
"""

from __future__ import annotations

from satguide.fol import Clause, Problem, canonical_key
from satguide.rules import factor, resolve
from satguide.saturation import SAT, UNSAT


def bfs_saturate(problem: Problem, max_level: int = 30,
                 max_clauses: int = 100_000) -> str:
    clauses: list[Clause] = []
    known: set[str] = set()

    def add_clause(c: Clause) -> bool:
        key = canonical_key(c)
        if key in known:
            return False
        known.add(key)
        clauses.append(c)
        return True

    for c in problem.clauses():
        add_clause(Clause(len(clauses), c.literals, role=c.role, origin=c.origin))
    if any(c.is_empty for c in clauses):
        return UNSAT

    nid = len(clauses)
    frontier = list(clauses)
    for _ in range(max_level):
        fresh: list[Clause] = []

        def emit(lits) -> bool:
            nonlocal nid
            c = Clause(nid, tuple(lits), role="derived", parents=(0,), rule="res")
            nid += 1
            if add_clause(c):
                fresh.append(c)
                return c.is_empty
            return False

        snapshot = list(clauses)
        for b in frontier:
            for a in snapshot:
                for lits in resolve(a, b):
                    if emit(lits):
                        return UNSAT
            for lits in factor(b):
                if emit(lits):
                    return UNSAT
        if not fresh:
            return SAT
        if len(clauses) > max_clauses:
            raise RuntimeError("oracle blew its clause budget")
        frontier = fresh
    raise RuntimeError("oracle did not converge within the level budget")
