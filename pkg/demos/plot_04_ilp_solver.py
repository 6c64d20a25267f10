"""
The selection ILP and the branch-and-bound solver
=================================================

Phrase selection is a 0/1 program. The bundled solver is a bounded simplex
inside branch and bound; for small instances it is checked against full
enumeration.
"""

import numpy as np

from phrasefusion.ilp import serialize_problem, validate_solution
from phrasefusion.solver import solve_brute, solve_ilp
from phrasefusion.synthetic import random_phrase_problem

rng = np.random.default_rng(1)
problem = random_phrase_problem(rng, max_vars=14)
print(serialize_problem(problem)[:600])

sol, stats = solve_ilp(problem)
print("branch and bound:", sol.status, sol.objective_value, f"({stats.nodes_explored} nodes)")
print("enumeration:     ", solve_brute(problem).objective_value)
print("feasible:", validate_solution(problem, sol.assignment)[0])
print("selected NPs:", sol.selected("a"), " VPs:", sol.selected("b"))
