"""Deformed Gibbs principle on a random 3x3 example.

For a Hermitian ``L`` the value ``log_q tr exp_q L`` is the optimum of
``tr X^(2-q) L - tr X^(2-q) log_q X`` over density matrices.  We evaluate the
closed form, check the Gibbs state attains it, and let the numerical oracle
find the optimum independently.

Run with ``python demos/deformed_gibbs.py``.
"""
import numpy as np

from qtrace import functionals as fx
from qtrace import linalg as la
from qtrace.deformed import exp_q_matrix, log_q_matrix
from qtrace.optimize import OptimizerSettings, VariationalProblem, direction_for, numeric_optimum
from qtrace.variational import gibbs_primal_objective

rng = la.make_rng(7)
P = la.random_with_spectrum(rng, 3, 0.2, 2.0)

print(f"{'q':>6} {'closed form':>14} {'at Gibbs state':>15} {'oracle':>14} {'direction':>9}")
for q in (0.5, 1.0, 1.5, 2.5):
    # L = log_q P always lies in the domain of exp_q
    L = log_q_matrix(P, q)
    value = fx.log_q_trace_exp_q(L, q)
    E = exp_q_matrix(L, q)
    gibbs = E / la.trace(E)
    at_state = fx.gibbs_objective(gibbs, L, q)
    problem = VariationalProblem(lambda X: gibbs_primal_objective(X, L, None, q),
                                 direction_for(q), "density_simplex", gibbs, value, "gibbs", q)
    oracle, _ = numeric_optimum(problem, OptimizerSettings(restarts=3))
    print(f"{q:6.2f} {value:14.10f} {at_state:15.10f} {oracle:14.10f} {direction_for(q):>9}")

# at q = 1 the value is the free energy log tr e^L
L = la.random_hermitian(rng, 3)
print("\nq = 1:", fx.log_q_trace_exp_q(L, 1.0), "vs log tr e^L =",
      np.log(la.trace(la.expm_h(L))))
