"""Dense Hermitian linear algebra.

Matrices are plain complex ``numpy`` arrays.  Every routine accepts a single
``(n, n)`` matrix or a stack ``(..., n, n)`` and broadcasts over the leading
axes, which is what lets the verifiers evaluate thousands of trial points in
one call.
"""
import json
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (ConvergenceFailure, DomainError, InvalidSpec,
                     NonHermitianInput, NonRealTrace, NotNegativeDefinite,
                     ParseError)

HERM_REL_TOL = 1e-12
HERM_ABS_FLOOR = 1e-14
PD_FLOOR = 1e-10
DD_TOL = 1e-7
ISOMETRY_TOL = 1e-10
CONTRACTION_SLACK = 1e-12
TRACE_IMAG_TOL = 1e-10


def dagger(M):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(M, -1, -2))


def _hermiticity_excess(M):
    scale = np.max(np.abs(M), axis=(-2, -1))
    tol = np.maximum(HERM_REL_TOL * scale, HERM_ABS_FLOOR)
    dev = np.max(np.abs(M - dagger(M)), axis=(-2, -1))
    return dev - tol, dev


def as_hermitian(M):
    """Validate ``M`` as Hermitian and return its symmetrized copy ``(M + M*)/2``.

    Raises
    ------
    NonHermitianInput
        If the largest entrywise deviation ``|M_ij - conj(M_ji)|`` exceeds
        ``1e-12 * max|M_ij|`` (with an absolute floor of ``1e-14``).
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2] or M.shape[-1] < 1:
        raise NonHermitianInput(f"expected square matrix, got shape {M.shape}")
    excess, dev = _hermiticity_excess(M)
    if np.any(excess > 0):
        raise NonHermitianInput(
            f"matrix is not Hermitian: max deviation {np.max(dev):.3e}")
    return 0.5 * (M + dagger(M))


def as_positive_definite(A, floor=PD_FLOOR):
    """Validate ``A`` as Hermitian with smallest eigenvalue above ``floor``.

    Inputs below the floor are rejected rather than clamped.
    """
    A = as_hermitian(A)
    lo = np.min(np.linalg.eigvalsh(A))
    if not lo > floor:
        raise DomainError(
            f"matrix is not positive definite: min eigenvalue {lo:.3e} <= {floor:g}")
    return A


def as_negative_definite(A, floor=PD_FLOOR):
    A = as_hermitian(A)
    hi = np.max(np.linalg.eigvalsh(A))
    if not hi < -floor:
        raise NotNegativeDefinite(
            f"matrix is not negative definite: max eigenvalue {hi:.3e} >= {-floor:g}")
    return A


def operator_norm(H):
    return np.linalg.norm(H, ord=2, axis=(-2, -1))


def as_contraction(H):
    """Validate ``H`` (any shape ``(m, n)``) as a contraction, ``||H|| <= 1``."""
    H = np.asarray(H, dtype=complex)
    if H.ndim < 2:
        raise DomainError(f"contraction must be a matrix, got shape {H.shape}")
    norm = np.max(operator_norm(H))
    if norm > 1 + CONTRACTION_SLACK:
        raise DomainError(f"not a contraction: operator norm {norm:.12g} > 1")
    return H


def is_isometry(H, tol=ISOMETRY_TOL):
    """True when ``H* H = I`` entrywise to ``tol``."""
    H = np.asarray(H, dtype=complex)
    gram = dagger(H) @ H
    return bool(np.max(np.abs(gram - np.eye(H.shape[-1]))) <= tol)


def trace(M):
    """Real trace of a Hermitian-valued expression.

    The imaginary part is asserted to be roundoff: ``|Im tr| <= 1e-10 (1 + |Re tr|)``.
    """
    t = np.trace(M, axis1=-2, axis2=-1)
    return _real_trace(t)


def trace_product(P, Q):
    """``tr(P Q)`` without forming the product."""
    t = np.einsum("...ij,...ji->...", P, Q)
    return _real_trace(t)


def _real_trace(t):
    re = np.real(t)
    if np.any(np.abs(np.imag(t)) > TRACE_IMAG_TOL * (1 + np.abs(re))):
        raise NonRealTrace(f"trace has imaginary part {np.max(np.abs(np.imag(t))):.3e}")
    return re if np.ndim(re) else float(re)


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray   # ascending, shape (..., n)
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors

    def reconstruct(self, f=None):
        w = self.eigenvalues if f is None else f(self.eigenvalues)
        U = self.eigenvectors
        return (U * w[..., None, :]) @ dagger(U)


def _eigh(A):
    try:
        w, U = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return SpectralDecomposition(w, U)


def eigh(A):
    """Spectral decomposition of a Hermitian matrix (or stack)."""
    return _eigh(as_hermitian(A))


def spectral_map(A, f: Callable):
    """Apply the scalar function ``f`` to ``A`` through its eigenvalues."""
    return eigh(A).reconstruct(f)


def fn(A, f):
    """``spectral_map`` without input validation, for inner loops."""
    return _eigh(A).reconstruct(f)


def matrix_power(A, t):
    """``A**t`` for positive definite ``A`` and real ``t``."""
    A = as_positive_definite(A)
    return _eigh(A).reconstruct(lambda w: np.exp(t * np.log(w)))


def expm_h(S):
    """Matrix exponential of a Hermitian matrix."""
    return _eigh(S).reconstruct(np.exp)


def logm_pd(A):
    return _eigh(A).reconstruct(np.log)


def divided_differences(w, f, f_prime, dd_tol=DD_TOL):
    """First divided-difference matrix ``(f(w_i) - f(w_j)) / (w_i - w_j)``.

    Pairs closer than ``dd_tol`` use ``f'`` at the midpoint.
    """
    wi = w[..., :, None]
    wj = w[..., None, :]
    diff = wi - wj
    close = np.abs(diff) <= dd_tol
    fw = f(w)
    num = fw[..., :, None] - fw[..., None, :]
    safe = np.where(close, 1.0, diff)
    mid = 0.5 * (wi + wj)
    return np.where(close, f_prime(mid), num / safe)


def frechet_derivative(A, B, f, f_prime, dd_tol=DD_TOL):
    """Directional derivative ``d/dt f(A + tB)`` at ``t = 0`` (Daleckii-Krein).

    Computed as ``U [Phi o (U* B U)] U*`` where ``Phi`` holds the divided
    differences of ``f`` on the spectrum of ``A``.
    """
    A = as_hermitian(A)
    B = as_hermitian(B)
    if A.shape != B.shape:
        raise DomainError(f"shape mismatch {A.shape} vs {B.shape}")
    w, U = _eigh(A)
    phi = divided_differences(w, f, f_prime, dd_tol)
    inner = dagger(U) @ B @ U
    return U @ (phi * inner) @ dagger(U)


# --- random ensembles --------------------------------------------------------

KINDS = ("hermitian", "positive_definite", "density", "contraction",
         "isometry", "negative_definite")


def make_rng(seed):
    """Counter-based (Philox) generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def trial_rng(seed, index):
    """Per-trial generator, seeded with ``seed XOR index``."""
    return make_rng(int(seed) ^ int(index))


def _shape(size):
    return tuple(int(k) for k in np.atleast_1d(size)) if np.size(size) else ()


def _ginibre(rng, rows, cols, size=()):
    shape = _shape(size) + (rows, cols)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng, n, size=()):
    """Haar unitary via QR of a complex Gaussian matrix with phase fix."""
    Q, R = np.linalg.qr(_ginibre(rng, n, n, size))
    d = np.diagonal(R, axis1=-2, axis2=-1)
    return Q * (d / np.abs(d))[..., None, :]


def random_hermitian(rng, n, size=(), scale=1.0):
    G = _ginibre(rng, n, n, size)
    return scale * 0.5 * (G + dagger(G))


def random_spectral(rng, n, lo, hi, size=()):
    """Eigen-pair ``(w, U)`` of a random matrix: Haar ``U``, ``w`` uniform on ``[lo, hi]``."""
    U = random_unitary(rng, n, size)
    w = rng.uniform(lo, hi, _shape(size) + (n,))
    return w, U


def random_with_spectrum(rng, n, lo, hi, size=()):
    """``U diag(w) U*`` with Haar ``U`` and ``w`` uniform on ``[lo, hi]``."""
    w, U = random_spectral(rng, n, lo, hi, size)
    M = (U * w[..., None, :]) @ dagger(U)
    return 0.5 * (M + dagger(M))


def random_density(rng, n, lo=0.1, hi=2.0, size=()):
    P = random_with_spectrum(rng, n, lo, hi, size)
    return P / np.asarray(trace(P))[..., None, None]


def random_contraction(rng, rows, cols, size=()):
    G = _ginibre(rng, rows, cols, size)
    s = operator_norm(G)
    return G / (np.asarray(s) * (1 + 1e-6))[..., None, None]


def random_isometry(rng, rows, cols, size=()):
    """``rows x cols`` matrix with orthonormal columns (``H* H = I``)."""
    if cols > rows:
        raise InvalidSpec(f"isometry needs rows >= cols, got {rows}x{cols}")
    return random_unitary(rng, rows, size)[..., :, :cols]


@dataclass(frozen=True)
class RandomEnsembleSpec:
    """Recipe for a reproducible random matrix.

    ``n`` is the dimension (rows for contraction/isometry); ``m`` the number
    of columns for contraction/isometry, defaulting to ``n``.
    """
    kind: str
    n: int
    eig_lo: float = 0.1
    eig_hi: float = 2.0
    seed: int = 0
    m: int = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1 or (self.m is not None and self.m < 1):
            raise InvalidSpec("dimensions must be positive")
        if not self.eig_lo < self.eig_hi:
            raise InvalidSpec("eig_lo must be < eig_hi")
        if self.kind in ("positive_definite", "density") and self.eig_lo <= 0:
            raise InvalidSpec("positive definite ensembles need eig_lo > 0")
        if self.kind == "negative_definite" and self.eig_hi >= 0:
            raise InvalidSpec("negative definite ensemble needs eig_hi < 0")
        if self.kind == "isometry" and (self.m or self.n) > self.n:
            raise InvalidSpec("isometry needs n >= m")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")


def random_matrix(spec: RandomEnsembleSpec):
    """Draw one matrix from ``spec``; identical specs give identical entries."""
    rng = make_rng(spec.seed)
    n, m = spec.n, spec.m or spec.n
    if spec.kind == "hermitian":
        return random_hermitian(rng, n)
    if spec.kind in ("positive_definite", "negative_definite"):
        return random_with_spectrum(rng, n, spec.eig_lo, spec.eig_hi)
    if spec.kind == "density":
        return random_density(rng, n, spec.eig_lo, spec.eig_hi)
    if spec.kind == "contraction":
        return random_contraction(rng, n, m)
    return random_isometry(rng, n, m)


# --- matrix JSON ---------------------------------------------------------------

def matrix_from_json(obj):
    """Parse ``{"n": int, "re": [[...]], "im": [[...]]}`` (``im`` optional).

    ``n`` is the row count; rectangular matrices (contractions) are allowed.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        n = int(obj["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix JSON: {exc}") from exc
    if re.ndim != 2 or re.shape != im.shape or re.shape[0] != n:
        raise ParseError(f"matrix JSON shape mismatch: n={n}, re{re.shape}, im{im.shape}")
    return re + 1j * im


def matrix_to_json(M):
    M = np.asarray(M)
    return {"n": int(M.shape[0]), "re": np.real(M).tolist(), "im": np.imag(M).tolist()}


def load_matrix(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return matrix_from_json(obj)


def save_matrix(path, M):
    with open(path, "w") as fh:
        json.dump(matrix_to_json(M), fh)
