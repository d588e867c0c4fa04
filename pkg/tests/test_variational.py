import math

import numpy as np
import pytest

from qtrace import linalg as la
from qtrace import variational as var
from qtrace.deformed import exp_q_scalar, log_q_matrix, log_q_scalar
from qtrace.errors import DomainError, SignConstraintViolated
from qtrace.functionals import tsallis_relative_entropy
from qtrace.optimize import OptimizerSettings, VariationalProblem, projected_gradient_norm

from conftest import spec_matrix

ORACLE = OptimizerSettings()
Q_ALL = (0, 0.5, 0.999, 1, 1.001, 1.5, 2, 2.5, 3, 3.5)


def assert_clean(rec, trials=None):
    assert rec.passed, rec.details
    assert rec.worst_violation <= 1e-9
    if trials is not None:
        assert rec.trials >= trials


# --- objectives --------------------------------------------------------------------------

def test_lemma21_objective_examples():
    Y = np.diag([1.0, 2.0])
    assert var.lemma21_objective(Y, Y, 1.5) == pytest.approx(3, rel=1e-15)
    assert var.lemma21_objective(np.eye(2), Y, 1.5) == pytest.approx(
        2 + 2 * (math.sqrt(2) - 1), rel=1e-14)
    assert var.lemma21_objective(np.eye(2), Y, 3) == pytest.approx(3.5, rel=1e-15)


# --- Lemma-type representation -----------------------------------------------------------

def test_lemma21_identity():
    rec = var.verify_lemma21(np.eye(2), 0.5, trials=100, settings=ORACLE)
    assert_clean(rec, 100)
    assert rec.closed_form == pytest.approx(2)
    assert rec.numeric_opt == pytest.approx(2, rel=1e-4)


def test_lemma21_seed12_min_direction():
    Y = spec_matrix("positive_definite", 3, 12)
    rec = var.verify_lemma21(Y, 2.5, trials=500)
    assert_clean(rec, 500)
    assert rec.details["direction"] == "min"
    assert rec.closed_form == pytest.approx(1.9886333381747288, rel=1e-13)


def test_lemma21_seed13_oracle():
    Y = spec_matrix("positive_definite", 2, 13)
    rec = var.verify_lemma21(Y, 1.5, trials=100, settings=ORACLE)
    assert_clean(rec)
    assert abs(rec.numeric_opt - 2.9114920582060628) <= 1e-4 * 2.9114920582060628


# --- Theorem-type representation over X ---------------------------------------------------

@pytest.mark.parametrize("q", [0.5, 1.5, 2.5])
def test_theorem22_identity_A(q):
    H = spec_matrix("contraction", 3, 2)
    rec = var.verify_theorem22(np.eye(3), H, q, trials=50)
    assert_clean(rec)
    assert rec.closed_form == pytest.approx(3, rel=1e-14)


def test_theorem22_exp_log_identity():
    rec = var.verify_theorem22(np.diag([1.0, 4.0]), np.eye(2), 2, trials=50, settings=ORACLE)
    assert_clean(rec)
    assert rec.closed_form == pytest.approx(5, rel=1e-14)
    assert rec.numeric_opt == pytest.approx(5, rel=1e-4)


def test_theorem22_seed14_15():
    A = spec_matrix("positive_definite", 3, 14)
    H = spec_matrix("contraction", 3, 15)
    rec = var.verify_theorem22(A, H, 0.5, trials=500, settings=ORACLE)
    assert_clean(rec, 500)
    assert rec.closed_form == pytest.approx(3.1012557897506816, rel=1e-13)
    assert abs(rec.numeric_opt - rec.closed_form) <= 1e-4 * (1 + rec.closed_form)


def test_prop25_zero_L_reduces():
    A = spec_matrix("positive_definite", 3, 14)
    H = spec_matrix("contraction", 3, 15)
    for q in (0.5, 1.5, 2.5):
        a = var.verify_prop25(A, H, np.zeros((3, 3)), q, trials=20)
        b = var.verify_theorem22(A, H, q, trials=20)
        assert a.passed and a.closed_form == pytest.approx(b.closed_form, rel=1e-14)


def test_prop25_diagonal_example():
    rec = var.verify_prop25(np.eye(2), np.eye(2), np.diag([0.5, -0.2]), 1.5, trials=100)
    assert_clean(rec)
    assert rec.closed_form == pytest.approx(2.3725, rel=1e-14)


def test_prop25_seed16_negative_L():
    A = spec_matrix("positive_definite", 2, 16)
    rec = var.verify_prop25(A, np.eye(2), -np.eye(2), 0.5, trials=300, settings=ORACLE)
    assert_clean(rec, 300)
    assert rec.details["direction"] == "max"
    assert rec.closed_form == pytest.approx(0.85018168275691073, rel=1e-13)


def test_prop25_outside_domain_is_skip():
    rec = var.verify_prop25(np.eye(2), np.eye(2), -3 * np.eye(2), 2, trials=10)
    assert rec.passed and rec.fully_skipped


# --- relative representation over L ---------------------------------------------------------

def test_theorem31_equal_arguments():
    A = spec_matrix("positive_definite", 3, 3)
    for q in (0.5, 1.5, 2.5):
        rec = var.verify_theorem31(A, A, np.eye(3), q, trials=50)
        assert_clean(rec)
        assert rec.closed_form == pytest.approx(0, abs=1e-13)


def test_theorem31_tsallis_example():
    X, A = np.diag([0.5, 0.5]), np.diag([0.25, 0.75])
    rec = var.verify_theorem31(X, A, np.eye(2), 1.5, trials=200, settings=ORACLE)
    assert_clean(rec)
    assert rec.theorem == "cor32"
    assert rec.closed_form == pytest.approx(0.068148347421, abs=1e-12)
    assert rec.numeric_opt == pytest.approx(rec.closed_form, abs=1e-4 * 1.07)


def test_theorem31_seeds_17_18_19():
    X = spec_matrix("positive_definite", 3, 17)
    A = spec_matrix("positive_definite", 3, 18)
    H = spec_matrix("contraction", 3, 19)
    rec = var.verify_theorem31(X, A, H, 2.5, trials=500, settings=ORACLE)
    assert_clean(rec, 500)
    assert rec.details["direction"] == "min"
    assert rec.closed_form == pytest.approx(1.8951395855984699, rel=1e-13)
    assert abs(rec.numeric_opt - rec.closed_form) <= 1e-4 * (1 + rec.closed_form)


def test_classical_relative_entropy_representation():
    X = spec_matrix("positive_definite", 3, 50)
    A = spec_matrix("positive_definite", 3, 51)
    rec = var.verify_theorem31(X, A, np.eye(3), 1, trials=500, settings=ORACLE)
    assert_clean(rec, 500)
    lX, lA = la.logm_pd(X), la.logm_pd(A)
    umegaki = la.trace_product(X, lX - lA)
    assert rec.closed_form == pytest.approx(umegaki, rel=1e-12)
    # G(L) = tr X + tr XL - tr exp(L + log A), evaluated independently at L = log X - log A
    L0 = lX - lA
    G = la.trace(X) + la.trace_product(X, L0) - la.trace(la.expm_h(L0 + lA))
    assert G == pytest.approx(umegaki, rel=1e-12)
    assert abs(rec.numeric_opt - umegaki) <= 1e-4 * (1 + abs(umegaki))
    assert umegaki == pytest.approx(tsallis_relative_entropy(X, A, 1.0), rel=1e-12)


# --- Gibbs-type representations ------------------------------------------------------------

def test_theorem42_zero_L():
    rec = var.verify_theorem42(np.zeros((2, 2)), 1.5, trials=100, settings=ORACLE)
    assert_clean(rec)
    assert rec.closed_form == pytest.approx(2 * (math.sqrt(2) - 1), rel=1e-14)
    assert rec.numeric_opt == pytest.approx(0.828427, abs=1e-4)
    rec = var.verify_theorem42(np.zeros((2, 2)), 1, trials=100)
    assert_clean(rec)
    assert rec.closed_form == pytest.approx(math.log(2), rel=1e-15)


def test_theorem42_seed20():
    L = spec_matrix("hermitian", 3, 20)
    L = L - (np.linalg.eigvalsh(L)[-1] - 1.0) * np.eye(3)
    rec = var.verify_theorem42(L, 0.5, trials=500, settings=ORACLE)
    assert_clean(rec, 500)
    assert rec.closed_form == pytest.approx(1.0898272576610116, rel=1e-13)
    assert rec.details["oracle_dual"][3]


def test_theorem42_rejects_out_of_domain():
    with pytest.raises(DomainError):
        var.verify_theorem42(np.diag([-2.0, 0.0]), 2, trials=5)


def test_theorem43_trivial():
    for q in (0.5, 1.5, 2.5):
        rec = var.verify_theorem43(np.eye(3), np.eye(3), np.zeros((3, 3)), q, trials=50)
        assert_clean(rec)
        assert rec.closed_form == pytest.approx(log_q_scalar(3, q), rel=1e-14)


def test_theorem43_matches_theorem42_by_substitution():
    Y = spec_matrix("positive_definite", 2, 21)
    L = spec_matrix("positive_definite", 2, 121)
    a = var.verify_theorem43(Y, np.eye(2), L, 1.5, trials=100)
    b = var.verify_theorem42(L + log_q_matrix(Y, 1.5), 1.5, trials=100)
    assert a.passed and b.passed
    assert a.closed_form == pytest.approx(b.closed_form, rel=1e-13)


def test_theorem43_seed22():
    Y = spec_matrix("positive_definite", 2, 22)
    rec = var.verify_theorem43(Y, np.eye(2), -0.3 * np.eye(2), 0.5, trials=300,
                               settings=ORACLE)
    assert_clean(rec, 300)
    assert rec.closed_form == pytest.approx(0.0044066617820077294, rel=1e-11)


def test_theorem43_isometry():
    rng = la.make_rng(44)
    H = la.random_isometry(rng, 3, 2)
    Y = la.random_with_spectrum(rng, 3, 0.1, 2.0)
    L = la.random_with_spectrum(rng, 2, 0.0, 1.0)
    assert_clean(var.verify_theorem43(Y, H, L, 1.5, trials=200))
    assert_clean(var.verify_theorem43(Y, H, -L, 0.5, trials=200))


def test_sign_constraint():
    with pytest.raises(SignConstraintViolated):
        var.check_sign_constraint(np.diag([0.1, -0.5]), 0.5)
    with pytest.raises(SignConstraintViolated):
        var.check_sign_constraint(np.diag([0.1, -0.5]), 1.5)
    var.check_sign_constraint(np.diag([0.1, -0.5]), 1)
    with pytest.raises(SignConstraintViolated):
        var.verify_theorem43(np.eye(2), np.eye(2), np.eye(2), 0.5, trials=5)
    with pytest.raises(DomainError):
        var.verify_theorem43(np.eye(2), 0.5 * np.eye(2), np.zeros((2, 2)), 1.5, trials=5)


# --- suite cells: equality and direction across q ---------------------------------------------

@pytest.mark.parametrize("name", sorted(var.CELLS))
@pytest.mark.parametrize("q", Q_ALL)
def test_cells_pass(name, q):
    if name == "cor32" and not 1 <= q <= 2:
        pytest.skip("outside the range of the identity")
    rec = var.run_cell(name, 3, q, instances=8, trials=40, seed=7)
    assert rec.passed, rec.details
    assert rec.details["eq_max_err"] <= 1e-10 * 3 * (1 + abs(rec.closed_form or 0)) + 1e-300


@pytest.mark.parametrize("name", sorted(var.CELLS))
@pytest.mark.parametrize("q", [0.5, 1, 1.5, 2.5])
def test_cells_oracle(name, q):
    if name == "cor32" and not 1 <= q <= 2:
        pytest.skip("outside the range of the identity")
    rec = var.run_cell(name, 2, q, instances=2, trials=10, seed=3, settings=ORACLE)
    assert rec.passed, rec.details
    assert abs(rec.numeric_opt - rec.closed_form) <= 1e-4 * (1 + abs(rec.closed_form))


# --- first-order optimality -----------------------------------------------------------------

@pytest.mark.parametrize("q", [0.5, 1, 1.5, 2.5])
def test_first_order_relative_dual(q):
    X = spec_matrix("positive_definite", 3, 60)
    A = spec_matrix("positive_definite", 3, 61)
    H = spec_matrix("contraction", 3, 62)
    M = la.as_hermitian(la.dagger(H) @ log_q_matrix(A, q) @ H)
    L0 = log_q_matrix(X, q) - M
    problem = VariationalProblem(lambda L: var.relative_dual_objective(L, X, M, q),
                                 "max" if q <= 2 else "min", "admissible_L", L0, 0.0,
                                 "thm31", q, offset=M)
    assert projected_gradient_norm(problem) <= 1e-6


@pytest.mark.parametrize("q", [0.5, 1, 1.5, 2.5])
def test_first_order_gibbs(q):
    P = spec_matrix("positive_definite", 3, 63)
    L = log_q_matrix(P, q)
    Xstar = P / la.trace(P)
    primal = VariationalProblem(lambda X: var.gibbs_primal_objective(X, L, None, q),
                                "max" if q <= 2 else "min", "density_simplex", Xstar, 0.0,
                                "thm42", q)
    assert projected_gradient_norm(primal) <= 1e-6
    X = spec_matrix("density", 3, 64)
    dual = VariationalProblem(lambda M: var.gibbs_dual_objective(M, X, None, q),
                              "max" if q <= 2 else "min", "admissible_L",
                              log_q_matrix(X, q), 0.0, "thm42-dual", q)
    assert projected_gradient_norm(dual) <= 1e-6


# --- scalar Legendre-Fenchel -----------------------------------------------------------------

def test_scalar_lf_examples():
    v, lam = var.scalar_legendre_fenchel(0, 1.5, return_argopt=True)
    assert v == pytest.approx(1, rel=1e-8) and lam == pytest.approx(1, rel=1e-4)
    # at q = 2 the objective is 1 + s for every lam, so only the value is determined
    assert var.scalar_legendre_fenchel(3, 2) == pytest.approx(4, rel=1e-8)
    assert np.ptp(var.scalar_lf_objective(np.geomspace(1e-3, 1e3, 7), 3, 2)) <= 1e-12
    v, lam = var.scalar_legendre_fenchel(3, 1.5, return_argopt=True)
    assert v == pytest.approx(6.25, rel=1e-8) and lam == pytest.approx(6.25, rel=1e-4)
    assert var.scalar_legendre_fenchel(-1, 0.5) == pytest.approx(1 / 2.25, rel=1e-8)
    with pytest.raises(DomainError):
        var.scalar_legendre_fenchel(-2, 2)


@pytest.mark.parametrize("q", [0, 0.5, 1, 1.5, 2, 2.5, 3])
def test_scalar_lf_recovers_exp_q(q):
    for lam in np.geomspace(1e-3, 1e3, 13):
        s = log_q_scalar(lam, q)
        target = exp_q_scalar(s, q)
        assert abs(var.scalar_legendre_fenchel(s, q) - target) <= 1e-8 * (1 + target)
