"""Independent numerical oracle for the variational representations.

The free matrix variable is written through an unconstrained Hermitian
``S`` so every iterate is feasible:

* ``pd_cone``:          ``X = exp(S)``
* ``density_simplex``:  ``X = exp(S) / tr exp(S)``
* ``admissible_L``:     ``L = log_q(exp(S)) - offset``, i.e. ``L + offset`` ranges
  over the whole open domain of ``exp_q``.  For ``q > 1`` this is
  ``shift + exp((q-1) S) / (q-1)`` with ``shift = -offset - 1/(q-1)``, and the
  mirror image for ``q < 1``.

The search itself is a quasi-Newton (BFGS) ascent/descent with central
finite-difference gradients and Armijo backtracking, restarted from several
seeded random points.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import linalg as la
from .deformed import ExpQDomain, is_classical, qvalue
from .errors import DidNotConverge, DomainError, QTraceError

log = logging.getLogger(__name__)

STAGNATION_REL = 1e-14
STAGNATION_STEPS = 5

FEASIBLE_SETS = ("pd_cone", "density_simplex", "admissible_L")


def direction_for(q):
    """``'max'`` for ``q <= 2``, ``'min'`` for ``q > 2``."""
    return "max" if qvalue(q) <= 2 else "min"


@dataclass(frozen=True)
class OptimizerSettings:
    max_iters: int = 2000
    step_init: float = 0.1
    fd_step: float = 1e-5
    restarts: int = 5
    tol_grad: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        for name in ("max_iters", "step_init", "fd_step", "restarts", "tol_grad"):
            if not getattr(self, name) > 0:
                raise ValueError(f"OptimizerSettings.{name} must be positive")


@dataclass
class VariationalProblem:
    """A max/min problem with a known closed-form optimizer.

    ``offset`` is only used by ``admissible_L`` problems: the constraint is
    that ``L + offset`` lies in the domain of ``exp_q``.
    """
    objective: Callable[[np.ndarray], float]
    direction: str
    feasible_set: str
    closed_form_optimizer: np.ndarray
    closed_form_value: float
    theorem_tag: str
    q: float = 1.0
    offset: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.feasible_set not in FEASIBLE_SETS:
            raise ValueError(f"unknown feasible set {self.feasible_set!r}")
        if self.direction != direction_for(self.q):
            raise ValueError(
                f"direction {self.direction!r} does not match q={self.q} "
                f"(expected {direction_for(self.q)!r})")
        if not self.contains(self.closed_form_optimizer):
            raise DomainError(f"{self.theorem_tag}: closed-form optimizer is infeasible")

    @property
    def n(self):
        return self.closed_form_optimizer.shape[-1]

    def contains(self, Z):
        Z = la.as_hermitian(Z)
        if self.feasible_set == "admissible_L":
            w = np.linalg.eigvalsh(Z + (0 if self.offset is None else self.offset))
            return bool(np.all(ExpQDomain.of(self.q).distance(w) > 0))
        w = np.linalg.eigvalsh(Z)
        if w[0] <= 0:
            return False
        if self.feasible_set == "density_simplex":
            return abs(np.sum(w) - 1) <= 1e-10
        return True

    def embed(self, S):
        """Map an unconstrained Hermitian ``S`` into the feasible set."""
        w, U = la._eigh(S)
        Ud = la.dagger(U)
        if self.feasible_set == "pd_cone":
            return (U * np.exp(w)) @ Ud
        if self.feasible_set == "density_simplex":
            e = np.exp(w - w.max())
            return (U * (e / e.sum())) @ Ud
        q = self.q
        if is_classical(q):
            lw = w
        else:
            lw = np.expm1((q - 1) * w) / (q - 1)
        L = (U * lw) @ Ud
        return L if self.offset is None else L - self.offset


def _unpack(v, n):
    S = np.zeros((n, n), dtype=complex)
    S[np.diag_indices(n)] = v[:n]
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    off = (v[n:n + m] + 1j * v[n + m:]) / np.sqrt(2)
    S[iu] = off
    S[(iu[1], iu[0])] = np.conj(off)
    return S


def _pack(S):
    n = S.shape[-1]
    iu = np.triu_indices(n, 1)
    off = S[iu] * np.sqrt(2)
    return np.concatenate([np.real(np.diag(S)), np.real(off), np.imag(off)])


def fd_gradient(f, x, h, fx=None):
    """Central differences, one-sided where a neighbour leaves the feasible set.

    When both neighbours are infeasible the step is halved (at most 30 times);
    a coordinate with no feasible neighbour gets a zero component.
    """
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        for _ in range(31):
            up, down = f(x + e), f(x - e)
            if np.isfinite(up) and np.isfinite(down):
                g[i] = (up - down) / (2 * e[i])
                break
            if np.isfinite(up) or np.isfinite(down):
                fx = f(x) if fx is None else fx
                g[i] = (up - fx) / e[i] if np.isfinite(up) else (fx - down) / e[i]
                break
            e[i] /= 2
    return g


def _bfgs_minimize(f, x0, settings):
    """Returns ``(x, fx, grad_norm, hit_cap)``."""
    h = settings.fd_step
    dim = len(x0)
    x = x0.copy()
    fx = f(x)
    g = fd_gradient(f, x, h, fx)
    Hinv = settings.step_init * np.eye(dim)
    fresh = True
    stagnant = 0
    for _ in range(settings.max_iters):
        gn = float(np.linalg.norm(g))
        if gn <= settings.tol_grad:
            return x, fx, gn, False
        d = -Hinv @ g
        slope = g @ d
        if not slope < 0:
            Hinv = settings.step_init * np.eye(dim)
            d = -Hinv @ g
            slope = g @ d
            fresh = True
        t = 1.0
        while True:
            xn = x + t * d
            fn = f(xn)
            if np.isfinite(fn) and fn <= fx + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-14:
                break
        if t < 1e-14:
            if fresh:
                # at the finite-difference noise floor
                return x, fx, gn, False
            Hinv = settings.step_init * np.eye(dim)
            fresh = True
            continue
        gnew = fd_gradient(f, xn, h, fn)
        s = xn - x
        y = gnew - g
        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            V = np.eye(dim) - rho * np.outer(s, y)
            Hinv = V @ Hinv @ V.T + rho * np.outer(s, s)
            fresh = False
        # progress below roundoff for several steps: finite-difference noise floor
        stagnant = stagnant + 1 if fx - fn <= STAGNATION_REL * (1 + abs(fx)) else 0
        x, fx, g = xn, fn, gnew
        if stagnant >= STAGNATION_STEPS:
            return x, fx, float(np.linalg.norm(g)), False
    return x, fx, float(np.linalg.norm(g)), True


def numeric_optimum(problem: VariationalProblem, settings: OptimizerSettings = None):
    """Best value and argument of ``problem`` found by restarted BFGS.

    Returns
    -------
    (float, ndarray)
        Optimal objective value and the optimizing matrix (``X`` or ``L``).

    Raises
    ------
    DidNotConverge
        If every restart exhausts ``max_iters`` with the gradient norm still
        above ``tol_grad``.
    """
    settings = settings or OptimizerSettings()
    n = problem.n
    sign = -1.0 if problem.direction == "max" else 1.0

    def f(v):
        try:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                val = problem.objective(problem.embed(_unpack(v, n)))
        except (QTraceError, FloatingPointError, np.linalg.LinAlgError):
            return np.inf
        val = sign * float(val)
        return val if np.isfinite(val) else np.inf

    best = None
    capped = 0
    for r in range(settings.restarts):
        rng = la.trial_rng(settings.seed, r)
        S0 = la.random_hermitian(rng, n, scale=0.5)
        x, fx, gn, hit_cap = _bfgs_minimize(f, _pack(S0), settings)
        capped += hit_cap
        log.debug("%s restart %d: value %.12g, |grad| %.2e, cap=%s",
                  problem.theorem_tag, r, sign * fx, gn, hit_cap)
        if best is None or fx < best[0]:
            best = (fx, x)
    if capped == settings.restarts:
        raise DidNotConverge(
            f"{problem.theorem_tag}: gradient above {settings.tol_grad:g} after "
            f"{settings.max_iters} iterations in all {settings.restarts} restarts")
    fx, x = best
    return sign * fx, problem.embed(_unpack(x, n))


def projected_gradient_norm(problem: VariationalProblem, h=1e-5):
    """Finite-difference gradient norm at the closed-form optimizer.

    Differentiates through the same parametrization as the optimizer, so the
    gradient automatically lies in the tangent space of the feasible set.
    """
    Z = la.as_hermitian(problem.closed_form_optimizer)
    if problem.feasible_set == "pd_cone":
        S = la.logm_pd(Z)
    elif problem.feasible_set == "density_simplex":
        S = la.logm_pd(Z)
    else:
        P = Z + (0 if problem.offset is None else problem.offset)
        q = problem.q
        if is_classical(q):
            S = P
        else:
            S = la.fn(P, lambda w: np.log1p((q - 1) * w) / (q - 1))
    n = Z.shape[-1]
    g = fd_gradient(lambda v: problem.objective(problem.embed(_unpack(v, n))), _pack(S), h)
    return float(np.linalg.norm(g))
