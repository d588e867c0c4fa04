"""Deformed (Tsallis) logarithm and exponential, scalar and matrix.

For ``q != 1``::

    log_q x = (x**(q-1) - 1) / (q-1),          x > 0
    exp_q x = (1 + (q-1) x)**(1/(q-1)),        x > -1/(q-1) if q > 1
                                                x < -1/(q-1) if q < 1

and both reduce to ``log``/``exp`` at ``q = 1``.  Evaluation goes through
``expm1``/``log1p`` so the formulas stay accurate as ``q`` approaches 1.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg as la
from .errors import DomainError

Q_ONE_TOL = 1e-8
DOMAIN_MARGIN = 1e-9

REGIMES = ("q<1", "q=1", "1<q<=2", "2<q<=3", "q>3")


def regime_of(q):
    q = float(q)
    if abs(q - 1) <= Q_ONE_TOL:
        return "q=1"
    if q < 1:
        return "q<1"
    if q <= 2:
        return "1<q<=2"
    if q <= 3:
        return "2<q<=3"
    return "q>3"


@dataclass(frozen=True)
class DeformationParameter:
    q: float

    def __post_init__(self):
        if not np.isfinite(self.q):
            raise DomainError(f"deformation parameter must be finite, got {self.q}")

    @property
    def regime(self):
        return regime_of(self.q)

    @property
    def is_classical(self):
        return self.regime == "q=1"

    def __float__(self):
        return float(self.q)


def qvalue(q):
    """Plain float from a float or :class:`DeformationParameter`."""
    return float(q.q if isinstance(q, DeformationParameter) else q)


def is_classical(q):
    return abs(qvalue(q) - 1) <= Q_ONE_TOL


def exp_q_bound(q):
    """The finite end ``-1/(q-1)`` of the domain of ``exp_q`` (``None`` at q=1)."""
    q = qvalue(q)
    return None if is_classical(q) else -1.0 / (q - 1)


@dataclass(frozen=True)
class ExpQDomain:
    q: float
    bound: float = None
    side: str = "all"

    @classmethod
    def of(cls, q):
        q = qvalue(q)
        if is_classical(q):
            return cls(q, None, "all")
        # q < 1: values must stay below the bound; q > 1: above it.
        return cls(q, -1.0 / (q - 1), "above" if q < 1 else "below")

    def distance(self, x):
        """Signed distance to the boundary; positive inside the domain."""
        x = np.asarray(x, dtype=float)
        if self.side == "all":
            return np.full(x.shape, np.inf)
        return (self.bound - x) if self.side == "above" else (x - self.bound)


def log_q(x, q):
    """Elementwise deformed logarithm; raises :class:`DomainError` for ``x <= 0``."""
    q = qvalue(q)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError(f"log_q needs x > 0, got min {np.min(x):.6g}")
    lx = np.log(x)
    if is_classical(q):
        return lx
    return np.expm1((q - 1) * lx) / (q - 1)


def log_q_prime(x, q):
    """Derivative ``x**(q-2)`` of ``log_q``."""
    q = qvalue(q)
    x = np.asarray(x, dtype=float)
    return np.exp((q - 2) * np.log(x))


def exp_q(x, q, margin=DOMAIN_MARGIN):
    """Elementwise deformed exponential.

    ``x`` must lie inside the domain by more than ``margin``; otherwise a
    :class:`DomainError` reports the offending value and the bound ``-1/(q-1)``.
    """
    q = qvalue(q)
    x = np.asarray(x, dtype=float)
    if is_classical(q):
        return np.exp(x)
    dom = ExpQDomain.of(q)
    dist = dom.distance(x)
    if np.any(~(dist > margin)):
        bad = x.flat[int(np.argmin(dist))]
        rel = "<" if dom.side == "above" else ">"
        raise DomainError(
            f"exp_q (q={q:g}) needs x {rel} -1/(q-1) = {dom.bound:.12g}; got {bad:.12g}")
    return np.exp(np.log1p((q - 1) * x) / (q - 1))


def exp_q_prime(x, q):
    """Derivative ``exp_q(x)**(2-q)`` of ``exp_q``."""
    q = qvalue(q)
    return np.exp((2 - q) * np.log(exp_q(x, q)))


def log_q_scalar(x, q):
    if not np.isscalar(x) and np.ndim(x) != 0:
        raise DomainError("log_q_scalar takes a scalar")
    return float(log_q(x, q))


def exp_q_scalar(x, q):
    if not np.isscalar(x) and np.ndim(x) != 0:
        raise DomainError("exp_q_scalar takes a scalar")
    return float(exp_q(x, q))


def log_q_matrix(A, q):
    """``log_q`` of a positive definite matrix, via its spectrum."""
    A = la.as_positive_definite(A)
    return la.fn(A, lambda w: log_q(w, q))


def exp_q_matrix(L, q, margin=DOMAIN_MARGIN):
    """``exp_q`` of a Hermitian matrix whose spectrum lies inside the domain."""
    L = la.as_hermitian(L)
    return la.fn(L, lambda w: exp_q(w, q, margin))


class DomainReport(NamedTuple):
    ok: bool
    min_eig: float
    max_eig: float
    bound: float  # None when q = 1
    margin: float  # distance of the spectrum to the bound (inf at q = 1)


def check_exp_q_domain(L, q, margin=DOMAIN_MARGIN):
    """Whether the spectrum of ``L`` lies strictly inside the domain of ``exp_q``."""
    w = np.linalg.eigvalsh(la.as_hermitian(L))
    dom = ExpQDomain.of(q)
    dist = float(np.min(dom.distance(w)))
    return DomainReport(bool(dist > margin), float(w[0]), float(w[-1]), dom.bound, dist)


def in_domain(w, q, margin=DOMAIN_MARGIN):
    """Vectorized domain test on eigenvalue arrays ``(..., n)`` -> ``(...)`` bools."""
    return np.all(ExpQDomain.of(q).distance(w) > margin, axis=-1)


# unvalidated matrix helpers for batched inner loops

def _log_q_m(A, q):
    return la.fn(A, lambda w: log_q(w, q))


def _exp_q_m(L, q):
    return la.fn(L, lambda w: exp_q(w, q))


def _pow_m(A, t):
    return la.fn(A, lambda w: np.exp(t * np.log(w)))
