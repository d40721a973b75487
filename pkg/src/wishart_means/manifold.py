"""Affine-invariant Riemannian structure on the HPD manifold.

The metric at a point ``P`` is the scaled Frobenius inner product
``<A, B>_P = tr(P^-1 A P^-1 B)``, invariant under congruence
``P -> L P L^H`` by any invertible ``L``. Geodesic distance, exponential map
and logarithmic map all reduce to Hermitian eigendecompositions of whitened
matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hpd import (
    HermitianMatrix,
    HpdMatrix,
    _as_hermitian_array,
    _as_hpd_array,
    _check_pd,
    _eigh,
    _expm,
    _invsqrtm,
    _logm,
    _sqrtm_invsqrtm,
    symmetrize,
)

__all__ = [
    "TangentVector",
    "inner_product",
    "tangent_norm",
    "geodesic_distance",
    "exp_map",
    "log_map",
]


def _check_dims(*arrays):
    dims = {a.shape[-1] for a in arrays}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector: a Hermitian direction attached to a base point."""

    base_point: HpdMatrix
    direction: HermitianMatrix

    def __post_init__(self):
        if not isinstance(self.base_point, HpdMatrix):
            object.__setattr__(self, "base_point", HpdMatrix(self.base_point))
        if not isinstance(self.direction, HermitianMatrix):
            object.__setattr__(self, "direction", HermitianMatrix(self.direction))
        if self.base_point.dim != self.direction.dim:
            raise ValueError(
                f"base point dim {self.base_point.dim} != direction dim "
                f"{self.direction.dim}"
            )

    def norm(self) -> float:
        return tangent_norm(self.base_point, self.direction)


def inner_product(at, a, b) -> float:
    """Metric inner product ``tr(P^-1 A P^-1 B)`` at the base point ``at``."""
    p = _as_hpd_array(at)
    aa = _as_hermitian_array(a)
    bb = _as_hermitian_array(b)
    _check_dims(p, aa, bb)
    x = np.linalg.solve(p, aa)
    y = np.linalg.solve(p, bb)
    return float(np.einsum("ij,ji->", x, y).real)


def tangent_norm(at, a) -> float:
    """Metric norm ``<A, A>_P^(1/2) = ||P^-1/2 A P^-1/2||_F``."""
    p = _as_hpd_array(at)
    aa = _as_hermitian_array(a)
    _check_dims(p, aa)
    w = _invsqrtm(p)
    return float(np.linalg.norm(symmetrize(w @ aa @ w)))


def geodesic_distance(p1, p2) -> float:
    """Length of the geodesic between two HPD matrices.

    Equals ``||log(P1^-1/2 P2 P1^-1/2)||_F``, i.e. the root sum of squared
    logs of the generalized eigenvalues of the pair.
    """
    a1 = _as_hpd_array(p1)
    a2 = _as_hpd_array(p2)
    _check_dims(a1, a2)
    w = _invsqrtm(a1)
    m = symmetrize(w @ a2 @ w)
    if m.shape[-1] == 1:
        lam = m.real.reshape(-1)
    else:
        lam, _ = _eigh(m)
    _check_pd(lam, "whitened matrix")
    return float(np.sqrt(np.sum(np.log(lam) ** 2)))


def _exp_map(p: np.ndarray, u: np.ndarray) -> np.ndarray:
    ps, pis = _sqrtm_invsqrtm(p)
    return symmetrize(ps @ _expm(symmetrize(pis @ u @ pis)) @ ps)


def _log_map(p: np.ndarray, s: np.ndarray) -> np.ndarray:
    ps, pis = _sqrtm_invsqrtm(p)
    return symmetrize(ps @ _logm(symmetrize(pis @ s @ pis)) @ ps)


def exp_map(at, direction) -> HpdMatrix:
    """Map a tangent vector at ``at`` to the manifold.

    Returns ``P^1/2 exp(P^-1/2 U P^-1/2) P^1/2``; inverse of :func:`log_map`.
    """
    p = _as_hpd_array(at)
    u = _as_hermitian_array(direction)
    _check_dims(p, u)
    return HpdMatrix(_exp_map(p, u))


def log_map(at, point) -> HermitianMatrix:
    """Map a manifold point into the tangent space at ``at``.

    Returns ``P^1/2 log(P^-1/2 S P^-1/2) P^1/2``; at the identity this is the
    plain matrix logarithm of ``S``.
    """
    p = _as_hpd_array(at)
    s = _as_hpd_array(point)
    _check_dims(p, s)
    return HermitianMatrix(_log_map(p, s))
