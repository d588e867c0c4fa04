"""Verifiers for the variational representations of deformed trace functions.

Every verifier follows the same recipe:

1. evaluate the objective at the closed-form optimizer and compare with the
   closed-form value;
2. sample random feasible points and confirm the objective never beats the
   closed-form value in the wrong direction (max for ``q <= 2``, min for
   ``q > 2``);
3. optionally, when ``settings`` is given, run :func:`numeric_optimum`
   from random starts and compare its optimum with the closed-form value.

Single-instance verifiers (``verify_*``) and the batched suite cells share
the same code: instance data carries a leading batch axis throughout.
"""
import numpy as np

from . import linalg as la
from .deformed import (_exp_q_m, _log_q_m, _pow_m, exp_q, in_domain, is_classical,
                       log_q, qvalue)
from .errors import DomainError, SignConstraintViolated
from .functionals import (_pow_log, as_density, relative_term,
                          tsallis_relative_entropy)
from .optimize import (OptimizerSettings, VariationalProblem, direction_for,
                       numeric_optimum)
from .records import Tolerances, VerificationRecord

CHUNK = 64
PD_BOX = (0.1, 3.0)
POINT_BOX = (0.05, 5.0)


# --- objectives ----------------------------------------------------------------

def affine_entropy_objective(X, L, M, q):
    """``tr X + tr X^(2-q) L - tr X^(2-q) (log_q X - M)``; ``L``/``M`` may be None."""
    P, Lq = _pow_log(X, q)
    inner = -Lq
    if L is not None:
        inner = inner + L
    if M is not None:
        inner = inner + M
    return la.trace(X) + la.trace_product(P, inner)


def lemma21_objective(X, Y, q):
    """``tr X - tr X^(2-q) (log_q X - log_q Y)``."""
    q = qvalue(q)
    X = la.as_positive_definite(X)
    Y = la.as_positive_definite(Y)
    if X.shape != Y.shape:
        raise DomainError(f"dimension mismatch {X.shape} vs {Y.shape}")
    return float(affine_entropy_objective(X, None, _log_q_m(Y, q), q))


def relative_dual_objective(L, X, M, q):
    """``G(L) = tr X + tr X^(2-q) L - tr exp_q(L + M)``."""
    P = _pow_m(X, 2 - q)
    return _relative_dual(L, la.trace(X), P, M, q)


def _relative_dual(L, trX, P, M, q):
    arg = L if M is None else L + M
    return trX + la.trace_product(P, L) - _tr_exp_q(arg, q)


def _tr_exp_q(arg, q):
    """``tr exp_q(arg)`` from eigenvalues only."""
    return np.sum(exp_q(np.linalg.eigvalsh(arg), q), axis=-1)


def gibbs_primal_objective(X, L, M, q):
    """``tr X^(2-q) L - tr X^(2-q) (log_q X - M)`` over density matrices."""
    P, Lq = _pow_log(X, q)
    inner = L - Lq
    if M is not None:
        inner = inner + M
    return la.trace_product(P, inner)


def gibbs_dual_objective(L, X, M, q):
    """``tr X^(2-q) L - log_q tr exp_q(L + M)``."""
    return _gibbs_dual(L, _pow_m(X, 2 - q), M, q)


def _gibbs_dual(L, P, M, q):
    arg = L if M is None else L + M
    return la.trace_product(P, L) - log_q(_tr_exp_q(arg, q), q)


# --- random feasible points -------------------------------------------------------

def _unit_hermitian(rng, n, k):
    G = la.random_hermitian(rng, n, size=k)
    return G / np.linalg.norm(G, axis=(-2, -1))[..., None, None]


def _pd_points(rng, center, k):
    """Half global random PD matrices, half ``exp(log center + t G)``.

    Points are returned as eigen-pairs ``(w, U)`` so objectives need no
    further decomposition.
    """
    n = center.shape[-1]
    half = k // 2
    wg, Ug = la.random_spectral(rng, n, *POINT_BOX, size=half)
    G = _unit_hermitian(rng, n, k - half)
    t = 10.0 ** rng.uniform(-4, 0, k - half)
    wl, Ul = la._eigh(la.logm_pd(center) + t[:, None, None] * G)
    return np.concatenate([wg, np.exp(wl)]), np.concatenate([Ug, Ul])


def _density_points(rng, center, k):
    w, U = _pd_points(rng, center, k)
    return w / np.sum(w, axis=-1, keepdims=True), U


def _spectral_objective(w, U, K, q, with_trace):
    """``[tr X] + tr X^(2-q) (K - log_q X)`` for ``X = U diag(w) U*``; ``K`` broadcasts."""
    val = -np.sum(np.exp((2 - q) * np.log(w)) * log_q(w, q), axis=-1)
    if K is not None:
        # diagonal of U* K U
        d = np.real(np.sum(np.conj(U) * (K @ U), axis=-2))
        val = val + np.sum(np.exp((2 - q) * np.log(w)) * d, axis=-1)
    return val + np.sum(w, axis=-1) if with_trace else val


def _stack_points(draws):
    return np.stack([w for w, _ in draws]), np.stack([U for _, U in draws])


def _add(*terms):
    terms = [t for t in terms if t is not None]
    return sum(terms) if terms else None


def _admissible_points(rng, center, M, q, k):
    """Random ``L`` with ``L + M`` inside the domain of ``exp_q``.

    Global points are ``log_q(P) - M`` for random PD ``P``; local points are
    ``center + t G`` with ``t`` halved until the domain check passes.
    Returns the points and the number of local draws that never became
    feasible.
    """
    n = center.shape[-1]
    Mz = 0 if M is None else M
    half = k // 2
    P = la.random_with_spectrum(rng, n, *POINT_BOX, size=half)
    glob = _log_q_m(P, q) - Mz
    G = _unit_hermitian(rng, n, k - half)
    t = 10.0 ** rng.uniform(-4, 0.5, k - half)
    loc = center + t[:, None, None] * G
    ok = in_domain(np.linalg.eigvalsh(loc + Mz), q)
    for _ in range(60):
        if ok.all():
            break
        bad = ~ok
        t[bad] *= 0.5
        loc[bad] = center + t[bad, None, None] * G[bad]
        ok[bad] = in_domain(np.linalg.eigvalsh(loc[bad] + Mz), q)
    return np.concatenate([glob, loc[ok]]), int(np.sum(~ok))


def _signed_points(rng, n, q, k, M):
    """Random ``L`` obeying the sign constraint of the isometric representation."""
    if is_classical(q):
        L = la.random_hermitian(rng, n, size=k, scale=0.5)
    else:
        L = la.random_with_spectrum(rng, n, 0.0, 1.0, size=k)
        L = -L if q < 1 else L
    ok = in_domain(np.linalg.eigvalsh(L + M), q)
    return L[ok], int(np.sum(~ok))


# --- bookkeeping ----------------------------------------------------------------

class _Tally:
    def __init__(self, tol, direction):
        self.tol = tol
        self.direction = direction
        self.eq_err = 0.0
        self.eq_excess = -np.inf
        self.worst = -np.inf
        self.points = 0
        self.skipped = 0
        self.opt = {}
        self.extra = {}

    def equality(self, got, expected, n):
        got = np.atleast_1d(got)
        expected = np.atleast_1d(expected)
        err = np.abs(got - expected)
        tol = self.tol.eq_tol_scale * n * (1 + np.abs(expected))
        if err.size:
            self.eq_err = max(self.eq_err, float(np.max(err)))
            self.eq_excess = max(self.eq_excess, float(np.max(err - tol)))

    def sample(self, values, bound, direction=None):
        direction = direction or self.direction
        viol = values - bound if direction == "max" else bound - values
        if viol.size:
            self.worst = max(self.worst, float(np.max(viol)))
        self.points += int(viol.size)

    def oracle(self, label, numeric, closed):
        err = abs(numeric - closed)
        self.opt[label] = (float(numeric), float(closed), float(err),
                           err <= self.tol.opt_tol(closed))

    @property
    def passed(self):
        return (self.eq_excess <= 0 and self.worst <= self.tol.dir_slack
                and all(ok for *_, ok in self.opt.values()))

    def record(self, theorem, q, n, seed, closed_form, numeric_label=None):
        numeric = self.opt[numeric_label][0] if numeric_label in self.opt else None
        details = {"eq_max_err": self.eq_err, "direction": self.direction}
        details.update({f"oracle_{k}": v for k, v in self.opt.items()})
        details.update(self.extra)
        return VerificationRecord(theorem, q, n, seed, closed_form, numeric,
                                  self.worst, self.points, self.skipped,
                                  bool(self.passed), details)


def _chunks(count):
    for start in range(0, count, CHUNK):
        yield slice(start, min(start + CHUNK, count))


def _take(arr, idx):
    return None if arr is None else arr[idx]


def _settings_for(settings, seed):
    if settings is None:
        return None
    return OptimizerSettings(settings.max_iters, settings.step_init, settings.fd_step,
                             settings.restarts, settings.tol_grad, seed)


# --- families ---------------------------------------------------------------------

def _affine_family(tally, q, L, M, Xstar, value, rngs, trials):
    """Unconstrained (PD cone) representations: Lemma-type objectives."""
    n = Xstar.shape[-1]
    tally.equality(affine_entropy_objective(Xstar, L, M, q), value, n)
    K = _add(L, M)
    for sl in _chunks(len(rngs)):
        idx = range(sl.start, sl.stop)
        w, U = _stack_points([_pd_points(rngs[i], Xstar[i], trials) for i in idx])
        vals = _spectral_objective(w, U, None if K is None else K[sl, None], q, True)
        tally.sample(vals, value[sl, None])


def _affine_oracle(tally, tag, q, L, M, Xstar, value, settings):
    L0, M0 = _take(L, 0), _take(M, 0)
    problem = VariationalProblem(
        lambda X: affine_entropy_objective(X, L0, M0, q), direction_for(q), "pd_cone",
        Xstar[0], float(value[0]), tag, q)
    val, _ = numeric_optimum(problem, settings)
    tally.oracle("primal", val, value[0])


def _relative_dual_family(tally, q, X, M, rngs, trials, extra_points=None):
    """Representations maximizing/minimizing over admissible ``L``."""
    n = X.shape[-1]
    Lq = _log_q_m(X, q)
    L0 = Lq if M is None else Lq - M
    value = relative_term(X, M, q)
    P = _pow_m(X, 2 - q)
    trX = la.trace(X)
    tally.equality(_relative_dual(L0, trX, P, M, q), value, n)
    for i, rng in enumerate(rngs):
        Mi = _take(M, i)
        pts, bad = _admissible_points(rng, L0[i], Mi, q, trials)
        tally.skipped += bad
        vals = _relative_dual(pts, trX[i], P[i], Mi, q)
        tally.sample(vals, value[i])
    return L0, value


def _gibbs_primal_family(tally, q, L, M, rngs, trials):
    n = L.shape[-1]
    arg = L if M is None else L + M
    E = _exp_q_m(arg, q)
    trE = la.trace(E)
    Xstar = E / trE[:, None, None]
    value = log_q(trE, q)
    tally.equality(gibbs_primal_objective(Xstar, L, M, q), value, n)
    K = _add(L, M)
    for sl in _chunks(len(rngs)):
        idx = range(sl.start, sl.stop)
        w, U = _stack_points([_density_points(rngs[i], Xstar[i], trials) for i in idx])
        vals = _spectral_objective(w, U, K[sl, None], q, False)
        tally.sample(vals, value[sl, None])
    return Xstar, value


def _gibbs_dual_family(tally, q, X, M, rngs, trials, signed=False):
    n = X.shape[-1]
    Lq = _log_q_m(X, q)
    Lstar = Lq if M is None else Lq - M
    value = relative_term(X, M, q)
    P = _pow_m(X, 2 - q)
    tally.equality(_gibbs_dual(Lstar, P, M, q), value, n)
    for i, rng in enumerate(rngs):
        Mi = _take(M, i)
        pts, bad = _admissible_points(rng, Lstar[i], Mi, q, trials)
        tally.skipped += bad
        if signed:
            spts, sbad = _signed_points(rng, n, q, trials, Mi)
            pts = np.concatenate([pts, spts])
            tally.skipped += sbad
        vals = _gibbs_dual(pts, P[i], Mi, q)
        tally.sample(vals, value[i])
    return Lstar, value


def _dual_oracle(tally, label, tag, q, X0, M0, Lstar0, value0, settings, kind):
    if kind == "relative":
        P, trX = _pow_m(X0, 2 - q), la.trace(X0)
        obj = lambda L: _relative_dual(L, trX, P, M0, q)  # noqa: E731
    else:
        P = _pow_m(X0, 2 - q)
        obj = lambda L: _gibbs_dual(L, P, M0, q)  # noqa: E731
    problem = VariationalProblem(obj, direction_for(q), "admissible_L", Lstar0,
                                 float(value0), tag, q, offset=M0)
    val, _ = numeric_optimum(problem, settings)
    tally.oracle(label, val, value0)


def _gibbs_primal_oracle(tally, tag, q, L0, M0, Xstar0, value0, settings):
    problem = VariationalProblem(
        lambda X: gibbs_primal_objective(X, L0, M0, q), direction_for(q),
        "density_simplex", Xstar0, float(value0), tag, q)
    val, _ = numeric_optimum(problem, settings)
    tally.oracle("primal", val, value0)


def _sandwich_log(A, H, q):
    """``H* log_q(A) H`` on stacks."""
    return la.dagger(H) @ _log_q_m(A, q) @ H


def _require_domain(arg, q, what):
    w = np.linalg.eigvalsh(arg)
    ok = in_domain(w, q)
    if not np.all(ok):
        raise DomainError(f"{what} leaves the exp_q domain for q={q:g}")


# --- batched verifiers -----------------------------------------------------------

def _lemma21(data, q, rngs, trials, settings, seed, tol):
    Y = data["Y"]
    n = Y.shape[-1]
    tally = _Tally(tol, direction_for(q))
    M = _log_q_m(Y, q)
    value = la.trace(Y)
    _affine_family(tally, q, None, M, Y, value, rngs, trials)
    if settings is not None:
        _affine_oracle(tally, "lemma21", q, None, M, Y, value, settings)
    return tally.record("lemma21", q, n, seed, value[0], "primal")


def _thm22(data, q, rngs, trials, settings, seed, tol):
    A, H = data["A"], data["H"]
    M = la.as_hermitian(_sandwich_log(A, H, q))
    _require_domain(M, q, "H* log_q(A) H")
    n = M.shape[-1]
    tally = _Tally(tol, direction_for(q))
    Xstar = _exp_q_m(M, q)
    value = la.trace(Xstar)
    _affine_family(tally, q, None, M, Xstar, value, rngs, trials)
    if settings is not None:
        _affine_oracle(tally, "thm22", q, None, M, Xstar, value, settings)
    return tally.record("thm22", q, n, seed, value[0], "primal")


def _prop25(data, q, rngs, trials, settings, seed, tol):
    A, H, L = data["A"], data["H"], data["L"]
    M = la.as_hermitian(_sandwich_log(A, H, q))
    n = M.shape[-1]
    tally = _Tally(tol, direction_for(q))
    keep = in_domain(np.linalg.eigvalsh(L + M), q)
    tally.skipped += int(np.sum(~keep))
    if not keep.any():
        rec = tally.record("prop25", q, n, seed, None)
        rec.details["reason"] = "L + H* log_q(A) H outside the exp_q domain"
        return rec
    A, H, L, M = A[keep], H[keep], L[keep], M[keep]
    rngs = [r for r, k in zip(rngs, keep) if k]
    Xstar = _exp_q_m(L + M, q)
    value = la.trace(Xstar)
    _affine_family(tally, q, L, M, Xstar, value, rngs, trials)
    if settings is not None:
        _affine_oracle(tally, "prop25", q, L, M, Xstar, value, settings)
    return tally.record("prop25", q, n, seed, value[0], "primal")


def _thm31(data, q, rngs, trials, settings, seed, tol, tag="thm31"):
    X, A, H = data["X"], data["A"], data["H"]
    M = la.as_hermitian(_sandwich_log(A, H, q))
    n = X.shape[-1]
    tally = _Tally(tol, direction_for(q))
    L0, value = _relative_dual_family(tally, q, X, M, rngs, trials)
    if tag == "cor32":
        # the H = I value must also be the Tsallis relative entropy D_{2-q}(X|A)
        d = np.array([tsallis_relative_entropy(X[i], A[i], 2 - q) for i in range(len(X))])
        tally.equality(d, value, n)
    if settings is not None:
        _dual_oracle(tally, "primal", tag, q, X[0], M[0], L0[0], value[0], settings, "relative")
    return tally.record(tag, q, n, seed, value[0], "primal")


def _cor32(data, q, rngs, trials, settings, seed, tol):
    return _thm31(data, q, rngs, trials, settings, seed, tol, tag="cor32")


def _thm42(data, q, rngs, trials, settings, seed, tol):
    L, X = data["L"], data["X"]
    _require_domain(L, q, "L")
    n = L.shape[-1]
    tally = _Tally(tol, direction_for(q))
    Xstar, value = _gibbs_primal_family(tally, q, L, None, rngs, trials)
    dual = _Tally(tol, direction_for(q))
    Lstar, dvalue = _gibbs_dual_family(dual, q, X, None, rngs, trials)
    if settings is not None:
        _gibbs_primal_oracle(tally, "thm42", q, L[0], None, Xstar[0], value[0], settings)
        _dual_oracle(tally, "dual", "thm42-dual", q, X[0], None, Lstar[0], dvalue[0],
                     settings, "gibbs")
    _merge_dual(tally, dual)
    return tally.record("thm42", q, n, seed, value[0], "primal")


def _thm43(data, q, rngs, trials, settings, seed, tol):
    Y, H, L, X = data["Y"], data["H"], data["L"], data["X"]
    M = la.as_hermitian(_sandwich_log(Y, H, q))
    n = X.shape[-1]
    tally = _Tally(tol, direction_for(q))
    Xstar, value = _gibbs_primal_family(tally, q, L, M, rngs, trials)
    dual = _Tally(tol, direction_for(q))
    Lstar, dvalue = _gibbs_dual_family(dual, q, X, M, rngs, trials, signed=True)
    if settings is not None:
        _gibbs_primal_oracle(tally, "thm43", q, L[0], M[0], Xstar[0], value[0], settings)
        _dual_oracle(tally, "dual", "thm43-dual", q, X[0], M[0], Lstar[0], dvalue[0],
                     settings, "gibbs")
    _merge_dual(tally, dual)
    return tally.record("thm43", q, n, seed, value[0], "primal")


def _merge_dual(tally, dual):
    tally.extra["dual_eq_max_err"] = dual.eq_err
    tally.extra["dual_worst_violation"] = dual.worst
    tally.eq_err = max(tally.eq_err, dual.eq_err)
    tally.eq_excess = max(tally.eq_excess, dual.eq_excess)
    tally.worst = max(tally.worst, dual.worst)
    tally.points += dual.points
    tally.skipped += dual.skipped


# --- instance samplers for suite cells ------------------------------------------

def _sample_lemma21(rng, n, q):
    return {"Y": la.random_with_spectrum(rng, n, *PD_BOX)}


def _sample_thm22(rng, n, q):
    return {"A": la.random_with_spectrum(rng, n, *PD_BOX),
            "H": la.random_contraction(rng, n, n)}


def _sample_prop25(rng, n, q):
    d = _sample_thm22(rng, n, q)
    M = _sandwich_log(d["A"], d["H"], q)
    # L + M = log_q(P) sweeps the whole admissible set
    P = la.random_with_spectrum(rng, n, *PD_BOX)
    d["L"] = la.as_hermitian(_log_q_m(P, q) - M)
    return d


def _sample_thm31(rng, n, q):
    d = _sample_thm22(rng, n, q)
    d["X"] = la.random_with_spectrum(rng, n, *PD_BOX)
    return d


def _sample_cor32(rng, n, q):
    return {"X": la.random_with_spectrum(rng, n, *PD_BOX),
            "A": la.random_with_spectrum(rng, n, *PD_BOX),
            "H": np.eye(n, dtype=complex)}


def _sample_thm42(rng, n, q):
    P = la.random_with_spectrum(rng, n, *PD_BOX)
    return {"L": la.as_hermitian(_log_q_m(P, q)), "X": la.random_density(rng, n)}


def _sample_thm43(rng, n, q):
    m = n + 1
    if is_classical(q):
        L = la.random_hermitian(rng, n, scale=0.5)
    else:
        L = la.random_with_spectrum(rng, n, 0.0, 1.0)
        L = -L if q < 1 else L
    return {"Y": la.random_with_spectrum(rng, m, *PD_BOX),
            "H": la.random_isometry(rng, m, n),
            "L": L,
            "X": la.random_density(rng, n)}


CELLS = {
    "lemma21": (_sample_lemma21, _lemma21),
    "thm22": (_sample_thm22, _thm22),
    "prop25": (_sample_prop25, _prop25),
    "thm31": (_sample_thm31, _thm31),
    "cor32": (_sample_cor32, _cor32),
    "thm42": (_sample_thm42, _thm42),
    "thm43": (_sample_thm43, _thm43),
}


def run_cell(name, n, q, instances, trials, seed, tol=None, settings=None):
    """Verify ``instances`` random instances of representation ``name``.

    Instance ``i`` and its trial points are drawn from the generator seeded
    with ``seed XOR i``; the numeric oracle runs on instance 0 only.
    """
    sampler, verifier = CELLS[name]
    q = qvalue(q)
    tol = tol or Tolerances()
    rngs = [la.trial_rng(seed, i) for i in range(instances)]
    rows = [sampler(rng, n, q) for rng in rngs]
    data = {k: np.stack([r[k] for r in rows]) for k in rows[0]}
    return verifier(data, q, rngs, trials, _settings_for(settings, seed), seed, tol)


def _single(verifier, data, q, trials, settings, seed, tol):
    data = {k: np.asarray(v, dtype=complex)[None] for k, v in data.items()}
    return verifier(data, qvalue(q), [la.trial_rng(seed, 0)], trials,
                    _settings_for(settings, seed), seed, tol or Tolerances())


# --- public single-instance verifiers ------------------------------------------------

def verify_lemma21(Y, q, trials=500, settings=None, seed=0, tol=None):
    """Check ``tr Y = max/min_X {tr X - tr X^(2-q)(log_q X - log_q Y)}``."""
    Y = la.as_positive_definite(Y)
    return _single(_lemma21, {"Y": Y}, q, trials, settings, seed, tol)


def verify_theorem22(A, H, q, trials=500, settings=None, seed=0, tol=None):
    """Check ``tr exp_q(H* log_q(A) H)`` against its variational form over ``X > 0``."""
    A = la.as_positive_definite(A)
    H = la.as_contraction(H)
    return _single(_thm22, {"A": A, "H": H}, q, trials, settings, seed, tol)


def verify_prop25(A, H, L, q, trials=500, settings=None, seed=0, tol=None):
    """Check ``tr exp_q(L + H* log_q(A) H)``; inadmissible ``L`` is recorded as a skip."""
    A = la.as_positive_definite(A)
    H = la.as_contraction(H)
    L = la.as_hermitian(L)
    return _single(_prop25, {"A": A, "H": H, "L": L}, q, trials, settings, seed, tol)


def verify_theorem31(X, A, H, q, trials=500, settings=None, seed=0, tol=None):
    """Check the representation of ``tr X^(2-q)(log_q X - H* log_q(A) H)`` over ``L``.

    With ``H = I`` and ``q`` in ``[1, 2]`` the value is additionally compared
    with the Tsallis relative entropy ``D_{2-q}(X|A)``.
    """
    X = la.as_positive_definite(X)
    A = la.as_positive_definite(A)
    H = la.as_contraction(H)
    qv = qvalue(q)
    identity = H.shape == X.shape and np.allclose(H, np.eye(X.shape[-1]), atol=1e-14)
    verifier = _cor32 if identity and 1 <= qv <= 2 else _thm31
    return _single(verifier, {"X": X, "A": A, "H": H}, q, trials, settings, seed, tol)


def verify_theorem42(L, q, trials=500, settings=None, seed=0, tol=None, X=None):
    """Check the deformed Gibbs principle and its dual.

    The dual is tested at the density matrix ``X``; by default a random
    density drawn from ``seed``.
    """
    L = la.as_hermitian(L)
    if X is None:
        X = la.random_density(la.make_rng(seed), L.shape[-1])
    X = as_density(X)
    return _single(_thm42, {"L": L, "X": X}, q, trials, settings, seed, tol)


def check_sign_constraint(L, q):
    """``L <= 0`` for ``q < 1``, ``L >= 0`` for ``q > 1``, anything at ``q = 1``."""
    q = qvalue(q)
    if is_classical(q):
        return
    w = np.linalg.eigvalsh(la.as_hermitian(L))
    slack = 1e-12 * (1 + np.max(np.abs(w)))
    if q < 1 and w[-1] > slack:
        raise SignConstraintViolated(f"q={q:g} < 1 needs L <= 0; max eigenvalue {w[-1]:.3e}")
    if q > 1 and w[0] < -slack:
        raise SignConstraintViolated(f"q={q:g} > 1 needs L >= 0; min eigenvalue {w[0]:.3e}")


def verify_theorem43(Y, H, L, q, trials=500, settings=None, seed=0, tol=None, X=None):
    """Check the Gibbs-type representations with ``L + H* log_q(Y) H``, ``H* H = I``."""
    Y = la.as_positive_definite(Y)
    H = np.asarray(H, dtype=complex)
    if not la.is_isometry(H):
        raise DomainError("H must satisfy H* H = I to 1e-10")
    L = la.as_hermitian(L)
    check_sign_constraint(L, q)
    if X is None:
        X = la.random_density(la.make_rng(seed), L.shape[-1])
    X = as_density(X)
    return _single(_thm43, {"Y": Y, "H": H, "L": L, "X": X}, q, trials, settings, seed, tol)


# --- scalar Legendre-Fenchel duality -------------------------------------------------

_GOLDEN = (np.sqrt(5) - 1) / 2


def scalar_lf_objective(lam, s, q):
    """``lam - lam^(2-q) (log_q lam - s)``."""
    lam = np.asarray(lam, dtype=float)
    return lam - np.exp((2 - q) * np.log(lam)) * (log_q(lam, q) - s)


def scalar_legendre_fenchel(s, q, grid_size=10_000, return_argopt=False):
    """Recover ``exp_q s`` as the max (``q <= 2``) or min (``q > 2``) over ``lam > 0``.

    A logarithmic grid on ``[1e-6, 1e6]`` locates the optimum, then golden
    section in ``log lam`` refines it.
    """
    q = qvalue(q)
    exp_q(s, q)  # domain check
    sign = 1.0 if direction_for(q) == "max" else -1.0
    t = np.linspace(np.log(1e-6), np.log(1e6), int(grid_size))

    def g(u):
        return sign * scalar_lf_objective(np.exp(u), s, q)

    vals = g(t)
    k = int(np.argmax(vals))
    a, b = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(200):
        if b - a < 1e-15 * max(1.0, abs(a)):
            break
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
    u = 0.5 * (a + b)
    best = max((vals[k], t[k]), (g(u), u))
    value = float(sign * best[0])
    return (value, float(np.exp(best[1]))) if return_argopt else value
