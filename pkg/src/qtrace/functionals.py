"""Scalar trace functionals built from the deformed logarithm and exponential."""
import numpy as np

from . import linalg as la
from .deformed import (_exp_q_m, check_exp_q_domain, exp_q_matrix, is_classical,
                       log_q, qvalue)
from .errors import DomainError, NotADensityMatrix

DENSITY_TOL = 1e-10
ISOMETRY_SUM_TOL = 1e-10
P_ONE_TOL = 1e-8


def as_density(X, tol=DENSITY_TOL):
    """Validate ``X`` as positive definite with unit trace (no renormalization)."""
    X = la.as_positive_definite(X)
    t = la.trace(X)
    if abs(t - 1) > tol:
        raise NotADensityMatrix(f"trace is {t!r}, expected 1 within {tol:g}")
    return X


def _pow_log(X, q):
    """``(X**(2-q), log_q X)`` from one eigendecomposition; batched, unvalidated."""
    w, U = la._eigh(X)
    lw = np.log(w)
    Ud = la.dagger(U)
    P = (U * np.exp((2 - q) * lw)[..., None, :]) @ Ud
    Lq = (U * log_q(w, q)[..., None, :]) @ Ud
    return P, Lq


def relative_term(X, M, q):
    """``tr X^(2-q) (log_q X - M)`` for stacks of ``X`` and (broadcast) ``M``."""
    P, Lq = _pow_log(X, q)
    if M is None:
        return la.trace_product(P, Lq)
    return la.trace_product(P, Lq - M)


def _check_same_dim(X, Y):
    if X.shape != Y.shape:
        raise DomainError(f"dimension mismatch: {X.shape} vs {Y.shape}")


def tsallis_relative_entropy(X, Y, p):
    """Tsallis relative entropy ``D_p(X|Y) = tr(X - X^p Y^(1-p)) / (1-p)``.

    For ``p`` within ``1e-8`` of 1 the Umegaki form ``tr X (log X - log Y)``
    is used.  Internally the computation runs through ``q = 2 - p``.

    Examples
    --------
    >>> X = np.diag([0.5, 0.5]); Y = np.diag([0.25, 0.75])
    >>> round(tsallis_relative_entropy(X, Y, 0.5), 6)
    0.068148
    """
    p = float(p)
    if not 0 <= p <= 1 + P_ONE_TOL:
        raise DomainError(f"D_p is defined for p in [0, 1], got {p}")
    X = la.as_positive_definite(X)
    Y = la.as_positive_definite(Y)
    _check_same_dim(X, Y)
    q = 2 - p
    if is_classical(q):
        return la.trace_product(X, la.logm_pd(X) - la.logm_pd(Y))
    Xp = la.fn(X, lambda w: np.exp(p * np.log(w)))
    Yp = la.fn(Y, lambda w: np.exp((1 - p) * np.log(w)))
    return (la.trace(X) - la.trace_product(Xp, Yp)) / (1 - p)


def _sandwich(H, M):
    """``H* M H``."""
    return la.dagger(H) @ M @ H


def relative_functional(X, A, H=None, q=1.0):
    """``tr X^(2-q) (log_q X - H* log_q(A) H)`` for a contraction ``H``.

    ``H`` has shape ``(dim A, dim X)`` and defaults to the identity.
    """
    q = qvalue(q)
    X = la.as_positive_definite(X)
    A = la.as_positive_definite(A)
    if H is None:
        _check_same_dim(X, A)
        M = la.fn(A, lambda w: log_q(w, q))
    else:
        H = la.as_contraction(H)
        if H.shape != (A.shape[-1], X.shape[-1]):
            raise DomainError(
                f"H must be {A.shape[-1]}x{X.shape[-1]}, got {H.shape}")
        M = _sandwich(H, la.fn(A, lambda w: log_q(w, q)))
    return relative_term(X, M, q)


def check_partition_of_identity(H_list, tol=ISOMETRY_SUM_TOL):
    """Validate ``sum_i H_i* H_i = I``."""
    total = sum(la.dagger(H) @ H for H in H_list)
    err = np.max(np.abs(total - np.eye(total.shape[-1])))
    if err > tol:
        raise DomainError(f"sum of H_i* H_i deviates from identity by {err:.3e}")


def phi_argument(A_list, H_list, q):
    """``sum_i H_i* log_q(A_i) H_i`` (validated)."""
    A_list = [la.as_positive_definite(A) for A in A_list]
    if H_list is None:
        if len(A_list) != 1:
            raise DomainError("H_list may be omitted only for a single matrix")
        H_list = [np.eye(A_list[0].shape[-1])]
    if len(H_list) != len(A_list):
        raise DomainError(f"{len(A_list)} matrices but {len(H_list)} H's")
    H_list = [la.as_contraction(H) for H in H_list]
    check_partition_of_identity(H_list)
    M = sum(_sandwich(H, la.fn(A, lambda w: log_q(w, q))) for A, H in zip(A_list, H_list))
    return la.as_hermitian(M)


def phi_multi(A_list, H_list=None, q=1.0):
    """``tr exp_q(sum_i H_i* log_q(A_i) H_i)`` with ``sum_i H_i* H_i = I``."""
    q = qvalue(q)
    M = phi_argument(A_list, H_list, q)
    report = check_exp_q_domain(M, q)
    if not report.ok:
        raise DomainError(
            f"phi argument leaves the exp_q domain: spectrum [{report.min_eig:.6g}, "
            f"{report.max_eig:.6g}], bound {report.bound}")
    return la.trace(exp_q_matrix(M, q))


def tsallis_entropy_functional(X, q):
    """``tr X^(2-q) log_q X``; at ``q = 1`` this is ``-S(X)``."""
    X = la.as_positive_definite(X)
    return relative_term(X, None, qvalue(q))


def gibbs_objective(X, L, q):
    """``tr X^(2-q) L - tr X^(2-q) log_q X`` over density matrices ``X``."""
    q = qvalue(q)
    X = as_density(X)
    L = la.as_hermitian(L)
    _check_same_dim(X, L)
    P, Lq = _pow_log(X, q)
    return la.trace_product(P, L - Lq)


def log_q_trace_exp_q(L, q):
    """``log_q tr exp_q L`` (the value of the deformed Gibbs principle)."""
    q = qvalue(q)
    t = la.trace(exp_q_matrix(L, q))
    return float(log_q(t, q))


# batched, unvalidated

def _tr_exp_q(L, q):
    return la.trace(_exp_q_m(L, q))
