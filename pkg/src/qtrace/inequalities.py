"""Trace inequalities for deformed exponentials and midpoint curvature sampling.

Each inequality is exposed as a *signed gap* ``LHS - RHS`` for a single
input, plus a batched suite cell that samples random admissible inputs and
returns a :class:`~qtrace.records.VerificationRecord`.  The sign convention
of each gap is documented on the function; ``worst_violation`` in a record
is always the largest amount by which a sample went the wrong way.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg as la
from .deformed import (_exp_q_m, _log_q_m, _pow_m, exp_q, in_domain, is_classical,
                       log_q, log_q_prime, qvalue)
from .errors import DomainError, InvalidSpec
from .functionals import check_partition_of_identity, phi_argument
from .records import Tolerances, VerificationRecord

SPEC_BOX = (0.1, 3.0)
NEG_BOX = (-3.0, -0.05)
PAIR_BOX = (0.05, 5.0)
PB_REDRAWS = 60
EXACT_TOL = 1e-12
GT_COMMUTING_TOL = 1e-10
TANGENCY_TOL = 1e-8
HOMOGENEITY_TOL = 1e-9
GT_LIMIT_Q = 1 - 1e-4
GT_LIMIT_TOL = 1e-2


def _stack(rngs, draw):
    return np.stack([draw(rng) for rng in rngs])


def _violation(gap, sense):
    """Wrong-way amount of ``gap`` for a contract ``gap <= 0`` or ``gap >= 0``."""
    return gap if sense == "<=" else -gap


# --- tracial Young --------------------------------------------------------------

def young_sense(p):
    """``'<='`` for ``p`` in ``[0, 1]`` (Young), ``'>='`` outside (reverse Young)."""
    return "<=" if 0 <= p <= 1 else ">="


def _young_gap(X, Y, p):
    lhs = la.trace_product(_pow_m(X, p), _pow_m(Y, 1 - p))
    return lhs - (p * la.trace(X) + (1 - p) * la.trace(Y))


def tracial_young(X, Y, p):
    """``tr X^p Y^(1-p) - (p tr X + (1-p) tr Y)``.

    Non-positive for ``p`` in ``[0, 1]`` and non-negative otherwise.

    Examples
    --------
    >>> tracial_young(np.eye(1), 4 * np.eye(1), 0.5)
    -0.5
    >>> tracial_young(np.eye(1), 4 * np.eye(1), 2.0)
    2.25
    """
    X = la.as_positive_definite(X)
    Y = la.as_positive_definite(Y)
    if X.shape != Y.shape:
        raise DomainError(f"dimension mismatch {X.shape} vs {Y.shape}")
    return float(_young_gap(X, Y, float(p)))


# --- Peierls-Bogolyubov ---------------------------------------------------------

def pb_case(q):
    """Which case of the deformed Peierls-Bogolyubov inequality applies.

    ``q = 2`` belongs to both (ii) and (iii); there the gap is identically
    zero, and it is filed under (ii).
    """
    q = qvalue(q)
    if is_classical(q):
        return "classical"
    if q < 1:
        return "i"
    return "ii" if q <= 2 else "iii"


def pb_sense(q):
    return "<=" if pb_case(q) == "iii" else ">="


def _pb_gap(A, B, q):
    EA = _exp_q_m(A, q)
    t = la.trace(EA)
    t2 = la.trace(_exp_q_m(A + B, q))
    lhs = log_q(t2, q) - log_q(t, q)
    rhs = np.exp((q - 2) * np.log(t)) * la.trace_product(_pow_m(EA, 2 - q), B)
    return lhs - rhs


def peierls_bogolyubov(A, B, q):
    """``[log_q tr exp_q(A+B) - log_q tr exp_q A] - (tr exp_q A)^(q-2) tr (exp_q A)^(2-q) B``.

    Non-negative for ``q < 1`` and ``1 <= q <= 2``, non-positive for ``q >= 2``.
    Returns ``None`` when ``A`` or ``A + B`` leaves the domain of ``exp_q``
    (the inequality makes no claim there).

    Examples
    --------
    >>> round(peierls_bogolyubov(np.zeros((2, 2)), np.diag([0.5, -0.5]), 1.5), 7)
    0.0870488
    """
    q = qvalue(q)
    A = la.as_hermitian(A)
    B = la.as_hermitian(B)
    if A.shape != B.shape:
        raise DomainError(f"dimension mismatch {A.shape} vs {B.shape}")
    ok = in_domain(np.linalg.eigvalsh(np.stack([A, A + B])), q)
    if not ok.all():
        return None
    return float(_pb_gap(A, B, q))


# --- Golden-Thompson ------------------------------------------------------------

def _gt_deformed_gap(A, B, q):
    EA = _exp_q_m(A, q)
    lhs = la.trace(_exp_q_m(A + B, q))
    rhs = la.trace_product(_pow_m(EA, 2 - q), (q - 1) * A + _exp_q_m(B, q))
    return lhs - rhs


def golden_thompson_deformed(A, B, q):
    """``tr exp_q(A+B) - tr exp_q(A)^(2-q) ((q-1) A + exp_q B)`` for ``0 <= q < 1``.

    ``A`` and ``B`` must be negative definite; the gap is non-positive.

    Examples
    --------
    >>> round(golden_thompson_deformed(-np.eye(1), -np.eye(1), 0.5), 6)
    -0.029835
    """
    q = qvalue(q)
    if not 0 <= q < 1 or is_classical(q):
        raise DomainError(f"deformed Golden-Thompson needs 0 <= q < 1, got {q}")
    A = la.as_negative_definite(A)
    B = la.as_negative_definite(B)
    if A.shape != B.shape:
        raise DomainError(f"dimension mismatch {A.shape} vs {B.shape}")
    return float(_gt_deformed_gap(A, B, q))


def _gt_classical_gap(A, B):
    return la.trace(la.expm_h(A + B)) - la.trace_product(la.expm_h(A), la.expm_h(B))


def golden_thompson_classical(A, B):
    """``tr exp(A+B) - tr exp(A) exp(B)``; non-positive for Hermitian ``A``, ``B``.

    Examples
    --------
    >>> A = np.array([[0., 1.], [1., 0.]]); B = np.diag([1., -1.])
    >>> golden_thompson_classical(A, B) < 0
    True
    """
    A = la.as_hermitian(A)
    B = la.as_hermitian(B)
    if A.shape != B.shape:
        raise DomainError(f"dimension mismatch {A.shape} vs {B.shape}")
    return float(_gt_classical_gap(A, B))


def shift_negative(A):
    """``A - (lambda_max(A) + 1) I`` and the shift used; the result is negative definite."""
    A = la.as_hermitian(A)
    c = np.linalg.eigvalsh(A)[..., -1] + 1.0
    n = A.shape[-1]
    return A - np.asarray(c)[..., None, None] * np.eye(n), c


@dataclass
class GTShiftReport:
    classical_gap: float
    shifted_gap: float
    shift_rel_err: float     # |e^(a+b) * shifted - original| / (1 + |original|)
    deformed_gap: float      # deformed gap of the shifted pair at q_limit
    limit_diff: float        # |deformed_gap - shifted_gap|
    q_limit: float


def golden_thompson_shift_check(A, B, q_limit=GT_LIMIT_Q):
    """Connect the deformed and classical Golden-Thompson gaps.

    Both matrices are shifted to be negative definite.  The classical gap of
    the shifted pair is ``exp(-(a+b))`` times the original gap, so its sign is
    unchanged; the deformed gap at ``q_limit`` (just below 1) should be close
    to the classical gap of the shifted pair.
    """
    A = la.as_hermitian(A)
    B = la.as_hermitian(B)
    As, a = shift_negative(A)
    Bs, b = shift_negative(B)
    g = float(_gt_classical_gap(A, B))
    gs = float(_gt_classical_gap(As, Bs))
    rel = abs(np.exp(a + b) * gs - g) / (1 + abs(g))
    gd = float(_gt_deformed_gap(As, Bs, q_limit))
    return GTShiftReport(g, gs, float(rel), gd, abs(gd - gs), q_limit)


# --- derivative bound for the multivariate phi -----------------------------------------

def _c52_parts(A, B, H, q):
    """Batched pieces with ``A``, ``B``, ``H`` of shape ``(..., k, n, n)``."""
    Hd = la.dagger(H)
    M = np.sum(Hd @ _log_q_m(A, q) @ H, axis=-3)
    MB = np.sum(Hd @ _log_q_m(B, q) @ H, axis=-3)
    E = _exp_q_m(M, q)
    D = la.frechet_derivative(A, B, lambda w: log_q(w, q), lambda w: log_q_prime(w, q))
    rhs = la.trace_product(_pow_m(E, 2 - q), np.sum(Hd @ D @ H, axis=-3))
    return la.trace(_exp_q_m(MB, q)), rhs


def corollary52_bound(B_list, A_list, H_list, q):
    """``phi(B_1..B_k) - tr exp_q(M)^(2-q) sum_j H_j* (d log_q(A_j)[B_j]) H_j``.

    Here ``M = sum_i H_i* log_q(A_i) H_i`` and ``phi(B) = tr exp_q(sum_i H_i* log_q(B_i) H_i)``.
    Requires ``sum_i H_i* H_i = I`` and ``0 <= q < 1``; the gap is non-positive
    and vanishes at ``B = A``.
    """
    q = qvalue(q)
    if not 0 <= q < 1 or is_classical(q):
        raise DomainError(f"the derivative bound needs 0 <= q < 1, got {q}")
    if not len(A_list) == len(B_list) == len(H_list):
        raise DomainError("A_list, B_list and H_list must have the same length")
    phi_argument(A_list, H_list, q)  # validates A, H and the partition of identity
    B = np.stack([la.as_positive_definite(b) for b in B_list])
    A = np.stack([la.as_positive_definite(a) for a in A_list])
    H = np.stack([np.asarray(h, dtype=complex) for h in H_list])
    if A.shape != B.shape:
        raise DomainError(f"shape mismatch {A.shape} vs {B.shape}")
    phi_b, rhs = _c52_parts(A, B, H, q)
    return float(phi_b - rhs)


def random_partition(rng, k, n, size=()):
    """``k`` blocks ``H_i`` of size ``n x n`` with ``sum H_i* H_i = I``."""
    V = la.random_isometry(rng, k * n, n, size)
    return np.stack(np.split(V, k, axis=-2), axis=-3)


# --- midpoint curvature --------------------------------------------------------------

def _is_one(q):
    return is_classical(q)


# map_id -> (q-range test, curvature for a given q, description)
CURVATURE_TABLE = {
    "cor23_i": (lambda q: 0 <= q < 1 and not _is_one(q), lambda q: "concave",
                "tr exp_q(H* log_q(A) H), 0 <= q < 1"),
    "cor23_ii": (lambda q: _is_one(q) or 1 <= q <= 2, lambda q: "concave",
                 "tr exp_q(H* log_q(A) H), 1 <= q <= 2"),
    "cor23_iii": (lambda q: 2 < q <= 3, lambda q: "convex",
                  "tr exp_q(H* log_q(A) H), 2 < q <= 3"),
    "cor26_plusL": (lambda q: _is_one(q) or 1 <= q <= 3,
                    lambda q: "concave" if q <= 2 else "convex",
                    "tr exp_q(L + H* log_q(A) H), L > 0, 1 <= q <= 3"),
    "cor26_minusL": (lambda q: 0 <= q < 1 and not _is_one(q), lambda q: "concave",
                     "tr exp_q(-L + H* log_q(A) H), L > 0, 0 <= q < 1"),
    "cor27": (_is_one, lambda q: "concave", "tr exp(L + H* log(A) H), L Hermitian"),
    "prop28": (lambda q: 2 <= q <= 3, lambda q: "convex",
               "tr exp_q(L + H* log_r(A) H), L > 0, 2 <= q <= r <= 3"),
    "cor51": (lambda q: 0 <= q < 1 and not _is_one(q), lambda q: "concave",
              "tr exp_q(sum_i H_i* log_q(A_i) H_i), sum H_i* H_i = I, 0 <= q < 1"),
}
CURVATURE_MAPS = tuple(CURVATURE_TABLE)


@dataclass(eq=False)
class CurvatureCase:
    """A map with a curvature claim, together with its fixed data.

    ``H`` is a contraction of shape ``(m, n)`` (``A`` is ``m x m``); for
    ``cor51`` it is instead a stack ``(k, n, n)`` with ``sum H_i* H_i = I``.
    ``L`` is required by the ``cor26_*``, ``cor27`` and ``prop28`` maps and ``r``
    by ``prop28``.
    """
    map_id: str
    q: float
    H: np.ndarray
    L: Optional[np.ndarray] = None
    r: Optional[float] = None
    expected: Optional[str] = None

    def __post_init__(self):
        if self.map_id not in CURVATURE_TABLE:
            raise InvalidSpec(f"unknown curvature map {self.map_id!r}")
        self.q = qvalue(self.q)
        allowed, curvature, _ = CURVATURE_TABLE[self.map_id]
        if not allowed(self.q):
            raise InvalidSpec(f"{self.map_id} makes no curvature claim at q={self.q:g}")
        expected = curvature(self.q)
        if self.expected is not None and self.expected != expected:
            raise InvalidSpec(f"{self.map_id} at q={self.q:g} is {expected}, not {self.expected}")
        self.expected = expected
        self.H = np.asarray(self.H, dtype=complex)
        if self.map_id == "cor51":
            if self.H.ndim != 3:
                raise InvalidSpec("cor51 needs H as a stack of k matrices")
            check_partition_of_identity(list(self.H))
        else:
            la.as_contraction(self.H)
        if self.map_id.startswith(("cor26", "prop28")):
            if self.L is None:
                raise InvalidSpec(f"{self.map_id} needs L")
            self.L = la.as_positive_definite(self.L)
        elif self.map_id == "cor27":
            if self.L is None:
                raise InvalidSpec("cor27 needs L")
            self.L = la.as_hermitian(self.L)
        if self.map_id == "prop28":
            if self.r is None or not self.q <= self.r <= 3:
                raise InvalidSpec(f"prop28 needs q <= r <= 3, got r={self.r}")
        if self.L is not None and self.L.shape[-1] != self.n:
            raise InvalidSpec(f"L must be {self.n}x{self.n}")

    @property
    def n(self):
        """Dimension of the output space."""
        return self.H.shape[-1]

    @property
    def arg_shape(self):
        if self.map_id == "cor51":
            k, m, _ = self.H.shape
            return (k, m, m)
        m = self.H.shape[0]
        return (m, m)

    def argument(self, A):
        """The Hermitian matrix fed to ``exp_q``, batched over leading axes of ``A``."""
        H = self.H
        if self.map_id == "cor51":
            return np.sum(la.dagger(H) @ _log_q_m(A, self.q) @ H, axis=-3)
        r = self.r if self.map_id == "prop28" else self.q
        M = la.dagger(H) @ _log_q_m(A, r) @ H
        if self.map_id == "cor26_minusL":
            return M - self.L
        if self.L is not None:
            return M + self.L
        return M

    def value(self, A):
        return la.trace(_exp_q_m(self.argument(A), self.q))


def curvature_map(case: CurvatureCase, A):
    """Evaluate the case's map at ``A`` (a tuple stack ``(k, n, n)`` for ``cor51``)."""
    A = np.asarray(A, dtype=complex)
    if A.shape[-len(case.arg_shape):] != case.arg_shape:
        raise DomainError(f"argument must have shape {case.arg_shape}, got {A.shape}")
    la.as_positive_definite(A.reshape((-1,) + A.shape[-2:]))
    return case.value(A)


def midpoint_gap(case: CurvatureCase, P, Q):
    """``f((P+Q)/2) - (f(P) + f(Q))/2``; non-negative for concave maps."""
    vals = curvature_map(case, np.stack([P, Q, 0.5 * (np.asarray(P) + np.asarray(Q))]))
    return float(vals[2] - 0.5 * (vals[0] + vals[1]))


def _draw_pd(rng, shape):
    """PD matrices of shape ``shape = (..., m, m)``."""
    return la.random_with_spectrum(rng, shape[-1], *PAIR_BOX, size=shape[:-2])


def midpoint_curvature_check(case: CurvatureCase, trials=500, seed=0, tol=None):
    """Sample ``trials`` random pairs and test midpoint concavity/convexity.

    Pair ``i`` is drawn from the generator seeded with ``seed XOR (i + 1)``.
    Pairs whose midpoint argument leaves the domain of ``exp_q`` are counted
    as skips.  For ``cor51`` the positive homogeneity ``phi(tA) = t phi(A)`` is
    also checked at relative ``1e-9``.
    """
    tol = tol or Tolerances()
    rngs = [la.trial_rng(seed, i + 1) for i in range(int(trials))]
    shape = case.arg_shape
    P = _stack(rngs, lambda rng: _draw_pd(rng, shape))
    Q = _stack(rngs, lambda rng: _draw_pd(rng, shape))
    mid = 0.5 * (P + Q)
    args = [case.argument(X) for X in (P, Q, mid)]
    ok = np.all([in_domain(np.linalg.eigvalsh(a), case.q) for a in args], axis=0)
    vals = [la.trace(_exp_q_m(a[ok], case.q)) for a in args]
    g = vals[2] - 0.5 * (vals[0] + vals[1])
    viol = -g if case.expected == "concave" else g
    worst = float(np.max(viol)) if viol.size else -np.inf
    passed = worst <= tol.dir_slack
    details = {"expected": case.expected,
               "min_gap": float(np.min(g)) if g.size else None,
               "max_gap": float(np.max(g)) if g.size else None}
    if case.r is not None:
        details["r"] = float(case.r)
    if case.map_id == "cor51" and g.size:
        t = np.array([10.0 ** rng.uniform(-1, 1) for rng in rngs])[ok]
        base = vals[0]
        scaled = la.trace(_exp_q_m(case.argument(t[:, None, None, None] * P[ok]), case.q))
        rel = float(np.max(np.abs(scaled - t * base) / (t * np.abs(base))))
        details["homogeneity_rel_err"] = rel
        passed = passed and rel <= HOMOGENEITY_TOL
    return VerificationRecord(case.map_id, case.q, case.n, seed, None, None, worst,
                              int(np.sum(ok)), int(np.sum(~ok)), bool(passed), details)


def curvature_cases_for(q):
    """Map ids that carry a curvature claim at ``q``."""
    q = qvalue(q)
    return [m for m, (allowed, _, _) in CURVATURE_TABLE.items() if allowed(q)]


def random_curvature_case(map_id, q, n, rng):
    """A random valid :class:`CurvatureCase` of dimension ``n``."""
    q = qvalue(q)
    L = r = None
    if map_id == "cor51":
        H = random_partition(rng, 2, n)
    else:
        H = la.random_contraction(rng, n, n)
    if map_id.startswith(("cor26", "prop28")):
        L = la.random_with_spectrum(rng, n, 0.1, 2.0)
    elif map_id == "cor27":
        L = la.random_hermitian(rng, n)
    if map_id == "prop28":
        r = float(rng.uniform(q, 3.0))
    return CurvatureCase(map_id, q, H, L, r)


# --- suite cells ---------------------------------------------------------------------

class _Cell:
    """Accumulates signed violations and exactness errors for one record."""

    def __init__(self, tol):
        self.tol = tol
        self.worst = -np.inf
        self.points = 0
        self.skipped = 0
        self.exact_ok = True
        self.details = {}

    def sample(self, gap, sense):
        gap = np.asarray(gap, dtype=float)
        if gap.size:
            self.worst = max(self.worst, float(np.max(_violation(gap, sense))))
        self.points += int(gap.size)

    def exact(self, label, err, bound):
        err = float(np.max(np.abs(err))) if np.size(err) else 0.0
        self.details[label] = err
        self.exact_ok = self.exact_ok and err <= bound

    def record(self, theorem, q, n, seed):
        passed = self.exact_ok and self.worst <= self.tol.dir_slack
        return VerificationRecord(theorem, q, n, seed, None, None, self.worst,
                                  self.points, self.skipped, bool(passed), self.details)


def _rngs(seed, trials):
    return [la.trial_rng(seed, i) for i in range(int(trials))]


def young_cell(n, q, trials, seed, tol=None):
    """Tracial Young at ``p = 2 - q`` (the exponent behind the affine-entropy lemma)."""
    cell = _Cell(tol or Tolerances())
    p = 2 - qvalue(q)
    rngs = _rngs(seed, trials)
    X = _stack(rngs, lambda rng: la.random_with_spectrum(rng, n, *PAIR_BOX))
    Y = _stack(rngs, lambda rng: la.random_with_spectrum(rng, n, *PAIR_BOX))
    cell.sample(_young_gap(X, Y, p), young_sense(p))
    cell.exact("equality_max_err", _young_gap(X, X, p) / (1 + la.trace(X)), 1e-10)
    cell.details["p"] = p
    return cell.record("young", q, n, seed)


def _pb_pairs(rng, n, q):
    """An admissible ``(A, B)`` pair: global half from ``log_q`` of PD matrices, local half nearby.

    A local ``B`` that pushes ``A + B`` out of the domain is redrawn at half
    the scale, so every pair is admissible.
    """
    if is_classical(q):
        A = la.random_hermitian(rng, n)
        B = la.random_hermitian(rng, n) * 10.0 ** rng.uniform(-3, 0)
        return A, B
    A = _log_q_m(la.random_with_spectrum(rng, n, *PAIR_BOX), q)
    if rng.uniform() < 0.5:
        return A, _log_q_m(la.random_with_spectrum(rng, n, *PAIR_BOX), q) - A
    scale = 10.0 ** rng.uniform(-3, 0)
    for _ in range(PB_REDRAWS):
        B = la.random_hermitian(rng, n) * scale
        if np.all(in_domain(np.linalg.eigvalsh(A + B), q)):
            break
        scale /= 2
    return A, B


def peierls_bogolyubov_cell(n, q, trials, seed, tol=None):
    q = qvalue(q)
    cell = _Cell(tol or Tolerances())
    pairs = [_pb_pairs(rng, n, q) for rng in _rngs(seed, trials)]
    A = np.stack([a for a, _ in pairs])
    B = np.stack([b for _, b in pairs])
    ok = in_domain(np.linalg.eigvalsh(A), q) & in_domain(np.linalg.eigvalsh(A + B), q)
    cell.skipped += int(np.sum(~ok))
    cell.sample(_pb_gap(A[ok], B[ok], q), pb_sense(q))
    cell.exact("zero_perturbation_max_err", _pb_gap(A, np.zeros_like(A), q), EXACT_TOL)
    cell.details["case"] = pb_case(q)
    return cell.record("peierls_bogolyubov", q, n, seed)


def _neg_pair(rng, n):
    if rng.uniform() < 0.25:
        U = la.random_unitary(rng, n)
        a, b = rng.uniform(*NEG_BOX, (2, n))
        return (U * a) @ la.dagger(U), (U * b) @ la.dagger(U)
    return (la.random_with_spectrum(rng, n, *NEG_BOX),
            la.random_with_spectrum(rng, n, *NEG_BOX))


def golden_thompson_cell(n, q, trials, seed, tol=None):
    """Deformed inequality for ``0 <= q < 1``, classical inequality at ``q = 1``."""
    q = qvalue(q)
    cell = _Cell(tol or Tolerances())
    rngs = _rngs(seed, trials)
    if is_classical(q):
        A = _stack(rngs, lambda rng: la.random_hermitian(rng, n))
        B = _stack(rngs, lambda rng: la.random_hermitian(rng, n))
        cell.sample(_gt_classical_gap(A, B), "<=")
        U = _stack(rngs, lambda rng: la.random_unitary(rng, n))
        a = np.stack([rng.uniform(-2, 2, (2, n)) for rng in rngs])
        Ac = (U * a[:, 0, None, :]) @ la.dagger(U)
        Bc = (U * a[:, 1, None, :]) @ la.dagger(U)
        scale = 1 + la.trace(la.expm_h(Ac + Bc))
        cell.exact("commuting_max_err", _gt_classical_gap(Ac, Bc) / scale, GT_COMMUTING_TOL)
        As, sa = shift_negative(A)
        Bs, sb = shift_negative(B)
        shifted = _gt_classical_gap(As, Bs)
        orig = _gt_classical_gap(A, B)
        cell.exact("shift_rel_err", (np.exp(sa + sb) * shifted - orig) / (1 + np.abs(orig)),
                   1e-10)
        if n <= 3:
            k = min(len(A), 50)
            diff = _gt_deformed_gap(As[:k], Bs[:k], GT_LIMIT_Q) - shifted[:k]
            cell.exact("limit_gap_diff", diff, GT_LIMIT_TOL)
        return cell.record("golden_thompson", q, n, seed)
    pairs = [_neg_pair(rng, n) for rng in rngs]
    A = np.stack([a for a, _ in pairs])
    B = np.stack([b for _, b in pairs])
    cell.sample(_gt_deformed_gap(A, B, q), "<=")
    return cell.record("golden_thompson", q, n, seed)


def _c52_instance(rng, n, k):
    A = la.random_with_spectrum(rng, n, *SPEC_BOX, size=k)
    B = la.random_with_spectrum(rng, n, *SPEC_BOX, size=k)
    return A, B, random_partition(rng, k, n)


def cor52_cell(n, q, trials, seed, tol=None):
    """Derivative bound with ``k = 1`` for even and ``k = 2`` for odd trial indices."""
    q = qvalue(q)
    cell = _Cell(tol or Tolerances())
    rngs = _rngs(seed, trials)
    for k in (1, 2):
        sub = rngs[k - 1::2]
        if not sub:
            continue
        inst = [_c52_instance(rng, n, k) for rng in sub]
        A, B, H = (np.stack(x) for x in zip(*inst))
        phi_b, rhs = _c52_parts(A, B, H, q)
        cell.sample(phi_b - rhs, "<=")
        phi_a, rhs_a = _c52_parts(A, A, H, q)
        cell.exact(f"tangency_max_err_k{k}", phi_a - rhs_a, TANGENCY_TOL)
    return cell.record("cor52", q, n, seed)


def curvature_cell(n, q, trials, seed, tol=None):
    """One record per curvature claim that applies at ``q``."""
    q = qvalue(q)
    records = []
    for map_id in curvature_cases_for(q):
        case = random_curvature_case(map_id, q, n, la.make_rng(seed))
        records.append(midpoint_curvature_check(case, trials, seed, tol))
    return records


def scalar_lf_cell(q, trials, seed, tol=None):
    """Scalar Legendre-Fenchel duality at ``trials`` random points ``s``.

    ``s = log_q(lambda)`` with ``lambda`` log-uniform on ``[1e-4, 1e4]`` so the
    optimizer stays inside the search grid.
    """
    from .variational import scalar_legendre_fenchel

    q = qvalue(q)
    cell = _Cell(tol or Tolerances())
    lam = np.array([10.0 ** rng.uniform(-4, 4) for rng in _rngs(seed, trials)])
    s = log_q(lam, q)
    s = s[in_domain(s[:, None], q)]
    cell.skipped += len(lam) - len(s)
    target = exp_q(s, q)
    got = np.array([scalar_legendre_fenchel(si, q) for si in s])
    cell.exact("lf_max_err", (got - target) / (1 + np.abs(target)), 1e-8)
    cell.points += len(s)
    return cell.record("scalar_lf", q, 1, seed)
