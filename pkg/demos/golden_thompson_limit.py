"""Deformed Golden-Thompson gaps approaching the classical one.

For negative definite ``A``, ``B`` and ``0 <= q < 1``

    tr exp_q(A + B) <= tr exp_q(A)^(2-q) ((q-1) A + exp_q B).

As ``q -> 1`` the gap tends to the classical ``tr e^(A+B) - tr e^A e^B``.
Arbitrary Hermitian pairs are first shifted to be negative definite, which
rescales the classical gap by a positive factor.

Run with ``python demos/golden_thompson_limit.py``.
"""
from qtrace import inequalities as ineq
from qtrace import linalg as la

rng = la.make_rng(3)
A = la.random_hermitian(rng, 3)
B = la.random_hermitian(rng, 3)
As, a = ineq.shift_negative(A)
Bs, b = ineq.shift_negative(B)

classical = ineq.golden_thompson_classical(As, Bs)
print(f"classical gap of the shifted pair: {classical:.8f}")
print(f"{'q':>10} {'deformed gap':>14} {'difference':>12}")
for q in (0.0, 0.5, 0.9, 0.99, 0.999, 0.9999):
    gap = ineq.golden_thompson_deformed(As, Bs, q)
    print(f"{q:10.4f} {gap:14.8f} {abs(gap - classical):12.2e}")

report = ineq.golden_thompson_shift_check(A, B)
print(f"\nunshifted classical gap {report.classical_gap:.8f}, "
      f"shift relation error {report.shift_rel_err:.1e}")
