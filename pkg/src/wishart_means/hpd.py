"""Hermitian/HPD matrix value types and eigendecomposition-based matrix functions.

Two guarantees hold everywhere in this module: stored matrices are exactly
Hermitian (inputs are symmetrized as ``(A + A^H)/2`` after a tolerance check),
and every positive-definiteness claim is verified against a scale-relative
eigenvalue floor. All matrix functions (log, exp, square root) are computed
through the Hermitian eigendecomposition, which is uniform and accurate for
the small dimensions this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenSolverError, NotPositiveDefiniteError, SingularTransformError

__all__ = [
    "HermitianMatrix",
    "HpdMatrix",
    "EigenDecomposition",
    "hermitian_eigen",
    "matrix_log",
    "matrix_exp",
    "matrix_sqrt",
    "matrix_inv_sqrt",
    "congruence",
    "random_hpd",
    "symmetrize",
]

# Relative deviation from conjugate symmetry accepted before exact symmetrization.
HERMITIAN_RTOL = 1e-10
# Smallest eigenvalue must exceed this fraction of the largest to count as HPD.
PD_FLOOR_RTOL = 1e-12
# Unitarity / reconstruction gates for eigendecompositions.
UNITARY_TOL = 1e-10
RECONSTRUCT_RTOL = 1e-10
# Condition-number guard for congruence transforms.
SINGULAR_RTOL = 1e-12


def _conj_t(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def symmetrize(a) -> np.ndarray:
    """Hermitian part ``(A + A^H) / 2`` of a (stack of) square matrix."""
    a = np.asarray(a)
    return (a + _conj_t(a)) / 2.0


def _eigh(a: np.ndarray):
    """``np.linalg.eigh`` with a diagnostic error on solver failure."""
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(
            f"Hermitian eigensolver failed on input of shape {a.shape} "
            f"(fro norm {np.linalg.norm(a):.3e}, "
            f"max |entry| {np.max(np.abs(a)):.3e})"
        ) from exc


def _check_pd(lam: np.ndarray, what: str = "matrix") -> None:
    """Raise unless all eigenvalue slices are strictly positive.

    ``lam`` has shape ``(..., p)`` in ascending order; the floor is
    ``PD_FLOOR_RTOL`` times the largest eigenvalue of the same slice.
    """
    largest = lam[..., -1]
    smallest = lam[..., 0]
    bad = (largest <= 0.0) | (smallest <= PD_FLOOR_RTOL * largest)
    if np.any(bad):
        raise NotPositiveDefiniteError(
            f"{what} is not positive definite: smallest eigenvalue "
            f"{float(np.min(smallest)):.6e} at or below the floor "
            f"{PD_FLOOR_RTOL:g} x largest ({float(np.max(largest)):.6e})"
        )


# ---------------------------------------------------------------------------
# Array kernels (stack-aware, trusted Hermitian input). The p == 1 branches
# avoid the eigensolver entirely; for a 1x1 Hermitian matrix the entry is its
# own spectrum.
# ---------------------------------------------------------------------------


def _apply_spectral(a: np.ndarray, fn) -> np.ndarray:
    lam, u = _eigh(a)
    return symmetrize((u * fn(lam)[..., None, :]) @ _conj_t(u))


def _logm(a: np.ndarray) -> np.ndarray:
    if a.shape[-1] == 1:
        v = a.real
        if np.any(v <= 0.0):
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite: entry {float(np.min(v)):.6e}"
            )
        return np.log(v).astype(np.complex128)
    lam, u = _eigh(a)
    _check_pd(lam)
    return symmetrize((u * np.log(lam)[..., None, :]) @ _conj_t(u))


def _expm(a: np.ndarray) -> np.ndarray:
    if a.shape[-1] == 1:
        out = np.exp(a.real).astype(np.complex128)
    else:
        lam, u = _eigh(a)
        with np.errstate(over="ignore"):
            elam = np.exp(lam)
        if not np.all(np.isfinite(elam)):
            raise OverflowError(
                f"matrix exponential overflowed (largest eigenvalue "
                f"{float(np.max(lam)):.4g})"
            )
        out = symmetrize((u * elam[..., None, :]) @ _conj_t(u))
    if not np.all(np.isfinite(out)):
        raise OverflowError("matrix exponential overflowed")
    return out


def _sqrtm(a: np.ndarray) -> np.ndarray:
    if a.shape[-1] == 1:
        v = a.real
        if np.any(v <= 0.0):
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite: entry {float(np.min(v)):.6e}"
            )
        return np.sqrt(v).astype(np.complex128)
    lam, u = _eigh(a)
    _check_pd(lam)
    return symmetrize((u * np.sqrt(lam)[..., None, :]) @ _conj_t(u))


def _sqrtm_invsqrtm(a: np.ndarray):
    """Hermitian square root and its inverse from a single decomposition."""
    if a.shape[-1] == 1:
        v = a.real
        if np.any(v <= 0.0):
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite: entry {float(np.min(v)):.6e}"
            )
        s = np.sqrt(v).astype(np.complex128)
        return s, 1.0 / s
    lam, u = _eigh(a)
    _check_pd(lam)
    root = np.sqrt(lam)
    uh = _conj_t(u)
    return (
        symmetrize((u * root[..., None, :]) @ uh),
        symmetrize((u * (1.0 / root)[..., None, :]) @ uh),
    )


def _invsqrtm(a: np.ndarray) -> np.ndarray:
    return _sqrtm_invsqrtm(a)[1]


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


class HermitianMatrix:
    """Immutable ``p x p`` complex matrix equal to its conjugate transpose.

    Raw input deviating from conjugate symmetry by more than ``tol`` (relative
    Frobenius, with an absolute floor of ``tol`` for matrices of norm below
    one) is rejected; accepted input is stored exactly symmetrized.
    """

    __slots__ = ("_a",)

    def __init__(self, data, *, tol: float = HERMITIAN_RTOL):
        a = np.array(data, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        deviation = np.linalg.norm(a - a.conj().T)
        if deviation > tol * max(np.linalg.norm(a), 1.0):
            raise ValueError(
                f"matrix is not Hermitian: |A - A^H| = {deviation:.3e} "
                f"exceeds tolerance {tol:g} (relative)"
            )
        h = (a + a.conj().T) / 2.0
        h.setflags(write=False)
        self._a = h

    @property
    def array(self) -> np.ndarray:
        """Read-only ``complex128`` ndarray view of the entries."""
        return self._a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self._a, dtype=dtype)
        if dtype is None:
            return self._a
        return self._a.astype(dtype, copy=False)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class HpdMatrix(HermitianMatrix):
    """Hermitian matrix whose eigenvalues are all strictly positive.

    Positive definiteness is checked at construction: the smallest eigenvalue
    must exceed ``PD_FLOOR_RTOL`` times the largest.
    """

    __slots__ = ()

    def __init__(self, data, *, tol: float = HERMITIAN_RTOL):
        super().__init__(data, tol=tol)
        lam = np.linalg.eigvalsh(self._a)
        _check_pd(lam)

    @classmethod
    def identity(cls, p: int) -> "HpdMatrix":
        return cls(np.eye(p))


def _as_hermitian_array(h) -> np.ndarray:
    if isinstance(h, HermitianMatrix):
        return h.array
    return HermitianMatrix(h).array


def _as_hpd_array(p) -> np.ndarray:
    if isinstance(p, HpdMatrix):
        return p.array
    return HpdMatrix(p).array


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Spectral factorization ``U diag(eigenvalues) U^H``.

    Eigenvalues are real and sorted in descending order; each column of ``U``
    carries the canonical phase (first entry of modulus above 1e-12 rotated to
    the positive real axis).
    """

    u: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.complex128)
        lam = np.asarray(self.eigenvalues, dtype=np.float64)
        p = u.shape[0]
        if u.ndim != 2 or u.shape != (p, p) or lam.shape != (p,):
            raise ValueError("inconsistent eigendecomposition shapes")
        if np.any(np.diff(lam) > 0):
            raise ValueError("eigenvalues must be sorted in descending order")
        if np.linalg.norm(u @ u.conj().T - np.eye(p)) > UNITARY_TOL * p:
            raise ValueError("eigenvector matrix is not unitary within tolerance")
        u.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def reconstruct(self) -> np.ndarray:
        return symmetrize((self.u * self.eigenvalues[None, :]) @ self.u.conj().T)


def _canonical_phase(u: np.ndarray) -> np.ndarray:
    u = u.copy()
    for j in range(u.shape[1]):
        col = u[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            pivot = col[nz[0]]
            u[:, j] = col * (np.conj(pivot) / abs(pivot))
    return u


def hermitian_eigen(h) -> EigenDecomposition:
    """Canonical spectral decomposition of a Hermitian matrix.

    Parameters
    ----------
    h : HermitianMatrix or array_like
        Matrix to decompose. Raw arrays are validated and symmetrized first.

    Returns
    -------
    EigenDecomposition
        Descending real eigenvalues and phase-canonicalized unitary ``U`` with
        ``U diag(eigenvalues) U^H`` reconstructing the input.
    """
    a = _as_hermitian_array(h)
    lam, u = _eigh(a)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    u = _canonical_phase(u[:, order])
    recon = (u * lam[None, :]) @ u.conj().T
    err = np.linalg.norm(recon - a)
    if err > RECONSTRUCT_RTOL * max(np.linalg.norm(a), 1.0):
        raise EigenSolverError(
            f"eigendecomposition failed to reconstruct its input: "
            f"residual {err:.3e}, input fro norm {np.linalg.norm(a):.3e}"
        )
    return EigenDecomposition(u=u, eigenvalues=lam)


# ---------------------------------------------------------------------------
# Matrix functions (typed API)
# ---------------------------------------------------------------------------


def matrix_log(p) -> HermitianMatrix:
    """Matrix logarithm ``U diag(log lam) U^H`` of an HPD matrix."""
    return HermitianMatrix(_logm(_as_hpd_array(p)))


def matrix_exp(h) -> HpdMatrix:
    """Matrix exponential of a Hermitian matrix; inverse of :func:`matrix_log`."""
    return HpdMatrix(_expm(_as_hermitian_array(h)))


def matrix_sqrt(p) -> HpdMatrix:
    """Hermitian square root ``S`` with ``S @ S = P``."""
    return HpdMatrix(_sqrtm(_as_hpd_array(p)))


def matrix_inv_sqrt(p) -> HpdMatrix:
    """Inverse of the Hermitian square root."""
    return HpdMatrix(_invsqrtm(_as_hpd_array(p)))


def congruence(l, p) -> HpdMatrix:
    """Congruence transform ``L P L^H`` of an HPD matrix.

    Raises
    ------
    SingularTransformError
        If ``L`` is singular or its condition number exceeds the guard
        ``1 / SINGULAR_RTOL``.
    """
    lmat = np.asarray(l, dtype=np.complex128)
    a = _as_hpd_array(p)
    if lmat.ndim != 2 or lmat.shape != a.shape:
        raise ValueError(
            f"transform shape {lmat.shape} does not match matrix shape {a.shape}"
        )
    sv = np.linalg.svd(lmat, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= SINGULAR_RTOL * sv[0]:
        raise SingularTransformError(
            f"transform is numerically singular: singular values span "
            f"[{sv[-1]:.3e}, {sv[0]:.3e}]"
        )
    return HpdMatrix(lmat @ a @ lmat.conj().T)


def random_hpd(p: int, seed, *, eig_range=(0.5, 2.0)) -> HpdMatrix:
    """Seeded random HPD matrix ``U diag(lam) U^H``.

    ``U`` is a Haar-ish unitary from the QR of a complex Gaussian matrix and
    ``lam`` is log-uniform over ``eig_range``, keeping the result
    well-conditioned. Deterministic for a given ``seed`` (anything accepted by
    ``np.random.default_rng``).
    """
    lo, hi = eig_range
    if not 0.0 < lo <= hi:
        raise ValueError(f"invalid eigenvalue range {eig_range}")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((p, p, 2))
    z = (w[..., 0] + 1j * w[..., 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (np.conj(d) / np.abs(d))[None, :]
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), p))
    return HpdMatrix((q * lam[None, :]) @ q.conj().T)
