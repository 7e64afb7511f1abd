"""A small SMT-LIB2 solver for uninterpreted first-order sentences.

The solver answers sat/unsat/unknown for scripts in the fragment produced by
folbench.equiv.emit_smtlib: one uninterpreted sort, Bool-valued predicate
functions, constants and functions over that sort, quantifiers, and the usual
connectives.  Satisfiability is established by SAT-based finite-model search
(quantifier grounding, Tseitin encoding, DPLL); unsatisfiability by Herbrand
grounding of the Skolemized clause form, with a resolution prover as a second
engine.  Every procedure is budgeted; exhausted budgets yield "unknown",
never a wrong answer.

Run it as a subprocess: ``python -m folbench.smtsolver`` reads a script from
stdin and prints the verdict (plus, with --model, a witness structure).
"""

from .main import solve_script

__all__ = ["solve_script"]
