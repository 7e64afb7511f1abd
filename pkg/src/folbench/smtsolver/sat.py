"""Propositional core: recursive DPLL and a Tseitin encoder."""

from __future__ import annotations


class BudgetHit(Exception):
    pass


def dpll(clauses: list[tuple[int, ...]], budget: int) -> dict[int, bool] | None:
    """Satisfying assignment for CNF clauses over 1-based variables, or None.

    Plain unit propagation plus chronological branching; the budget counts
    search nodes and raises BudgetHit when exhausted.
    """
    assignment: dict[int, bool] = {}
    budget_box = [budget]

    def solve(clause_list: list[tuple[int, ...]]) -> bool:
        budget_box[0] -= 1
        if budget_box[0] < 0:
            raise BudgetHit
        while True:
            unit = None
            for clause in clause_list:
                unassigned = []
                satisfied = False
                for lit in clause:
                    val = assignment.get(abs(lit))
                    if val is None:
                        unassigned.append(lit)
                    elif (lit > 0) == val:
                        satisfied = True
                        break
                if satisfied:
                    continue
                if not unassigned:
                    return False
                if len(unassigned) == 1:
                    unit = unassigned[0]
                    break
            if unit is None:
                break
            assignment[abs(unit)] = unit > 0
        remaining = []
        for clause in clause_list:
            lits = []
            satisfied = False
            for lit in clause:
                val = assignment.get(abs(lit))
                if val is None:
                    lits.append(lit)
                elif (lit > 0) == val:
                    satisfied = True
                    break
            if satisfied:
                continue
            if not lits:
                return False
            remaining.append(tuple(lits))
        if not remaining:
            return True
        var = abs(remaining[0][0])
        for value in (True, False):
            saved = dict(assignment)
            assignment[var] = value
            if solve(remaining):
                return True
            assignment.clear()
            assignment.update(saved)
        return False

    return assignment if solve(clauses) else None


class Tseitin:
    """CNF encoder for propositional trees built from nested tuples:
    ('var', key) | ('not', node) | ('and', (nodes...)) | ('or', (nodes...)).
    Identical subtrees share one definition variable."""

    def __init__(self) -> None:
        self.nvars = 0
        self.clauses: list[tuple[int, ...]] = []
        self.atom_var: dict[tuple, int] = {}
        self.memo: dict[tuple, int] = {}

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def encode(self, node) -> int:
        if node in self.memo:
            return self.memo[node]
        kind = node[0]
        if kind == "var":
            if node[1] not in self.atom_var:
                self.atom_var[node[1]] = self.fresh()
            lit = self.atom_var[node[1]]
        elif kind == "not":
            lit = -self.encode(node[1])
        else:
            parts = [self.encode(child) for child in node[1]]
            g = self.fresh()
            if kind == "and":
                for p in parts:
                    self.clauses.append((-g, p))
                self.clauses.append((g, *(-p for p in parts)))
            else:
                for p in parts:
                    self.clauses.append((g, -p))
                self.clauses.append((-g, *parts))
            lit = g
        self.memo[node] = lit
        return lit
