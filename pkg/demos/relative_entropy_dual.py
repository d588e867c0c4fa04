"""Tsallis relative entropy as an optimum over Hermitian ``L``.

For ``q`` in ``[1, 2]``

    D_{2-q}(X|A) = max_L { tr X + tr X^(2-q) L - tr exp_q(L + log_q A) },

attained at ``L0 = log_q X - log_q A``.  We compare the entropy, the
objective at ``L0`` and the numerical optimum for a pair of random states,
then run the verifier that also samples random admissible ``L``.

Run with ``python demos/relative_entropy_dual.py``.
"""
from qtrace import functionals as fx
from qtrace import linalg as la
from qtrace import variational as var
from qtrace.deformed import log_q_matrix
from qtrace.optimize import OptimizerSettings, VariationalProblem, numeric_optimum

rng = la.make_rng(11)
X = la.random_density(rng, 3)
A = la.random_density(rng, 3)

for q in (1.0, 1.25, 1.5, 2.0):
    d = fx.tsallis_relative_entropy(X, A, 2 - q)
    M = log_q_matrix(A, q)
    L0 = log_q_matrix(X, q) - M
    at_l0 = var.relative_dual_objective(L0, X, M, q)
    problem = VariationalProblem(lambda L: var.relative_dual_objective(L, X, M, q), "max",
                                 "admissible_L", L0, d, "relative", q, offset=M)
    oracle, _ = numeric_optimum(problem, OptimizerSettings(restarts=3))
    print(f"q={q:4.2f}  D_{2 - q:.2f} = {d:.10f}  G(L0) = {at_l0:.10f}  oracle = {oracle:.10f}")

rec = var.verify_theorem31(X, A, la.random_contraction(rng, 3, 3), 2.5, trials=300)
print("\ncontraction, q = 2.5 (min direction):", rec.to_dict())
