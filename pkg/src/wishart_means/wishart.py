"""Seeded sampling of circular complex Gaussians and complex Wishart estimates.

The covariance estimate of ``dof`` independent zero-mean circular complex
Gaussian vectors with covariance ``sigma`` is ``S = (1/dof) sum_k X_k X_k^H``;
``dof * S`` then follows the complex Wishart law with ``dof`` complex degrees
of freedom and mean ``dof * sigma``. Sampling goes through Gaussian outer
products directly, and every stream is addressed by an explicit
:class:`SeedSpec` so batches are bit-reproducible across runs and across
worker counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InsufficientDofError
from .hpd import HpdMatrix, _sqrtm, symmetrize

__all__ = [
    "SeedSpec",
    "WishartModel",
    "sample_complex_gaussian",
    "sample_covariance",
    "sample_batch",
]

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """Address of one reproducible random stream.

    ``(master_seed, stream_id)`` keys a counter-based Philox generator, so
    identical specs yield bit-identical streams regardless of execution order
    or thread schedule. Replication ``r`` of a Monte Carlo run uses
    ``spec.stream(r)``.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def stream(self, offset: int) -> "SeedSpec":
        """The spec ``offset`` streams ahead (stream_id arithmetic mod 2^64)."""
        return SeedSpec(self.master_seed, (self.stream_id + int(offset)) % _U64)


@dataclass(frozen=True, eq=False)
class WishartModel:
    """Sampling law ``(p, dof, sigma)`` for complex Wishart covariance estimates.

    ``dof >= p`` is required so samples are positive definite with
    probability one.
    """

    p: int
    dof: int
    sigma: HpdMatrix

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 1:
            raise ValueError(f"dimension p must be a positive integer, got {self.p!r}")
        if not isinstance(self.dof, (int, np.integer)):
            raise ValueError(f"dof must be an integer, got {self.dof!r}")
        if self.dof < self.p:
            raise InsufficientDofError(
                f"dof = {self.dof} below dimension p = {self.p}: samples would be singular"
            )
        if not isinstance(self.sigma, HpdMatrix):
            object.__setattr__(self, "sigma", HpdMatrix(self.sigma))
        if self.sigma.dim != self.p:
            raise ValueError(f"sigma has dim {self.sigma.dim}, expected {self.p}")

    @classmethod
    def identity(cls, p: int, dof: int) -> "WishartModel":
        return cls(p=p, dof=dof, sigma=HpdMatrix.identity(p))

    @cached_property
    def sigma_sqrt(self) -> np.ndarray:
        """Hermitian square root of sigma, computed once per model."""
        return _sqrtm(self.sigma.array)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    # Real and imaginary parts iid N(0, 1/2), so E{Z Z^H} = I per vector.
    w = rng.standard_normal(tuple(shape) + (2,))
    return (w[..., 0] + 1j * w[..., 1]) / np.sqrt(2.0)


def sample_complex_gaussian(p: int, rng: np.random.Generator, size: int | None = None):
    """Standard circular complex Gaussian vector(s) of dimension ``p``.

    Returns shape ``(p,)`` for ``size=None``, else ``(size, p)``. Components
    have independent real and imaginary parts of variance 1/2 each, so the
    covariance is the identity and ``E{Z Z^T} = 0``.
    """
    if size is None:
        return _complex_gaussian(rng, (p,))
    return _complex_gaussian(rng, (size, p))


def _sample_cov_arrays(
    sigma_sqrt: np.ndarray, dof: int, rng: np.random.Generator, n: int
) -> np.ndarray:
    """``n`` covariance estimates as an ``(n, p, p)`` array (one rng call)."""
    p = sigma_sqrt.shape[0]
    z = _complex_gaussian(rng, (n, p, dof))
    x = sigma_sqrt @ z
    return symmetrize(x @ np.conj(np.swapaxes(x, -1, -2))) / dof


def sample_covariance(model: WishartModel, rng: np.random.Generator) -> HpdMatrix:
    """One covariance estimate ``S`` drawn from ``model`` using ``rng``."""
    return HpdMatrix(_sample_cov_arrays(model.sigma_sqrt, model.dof, rng, 1)[0])


def sample_batch(model: WishartModel, n: int, seed: SeedSpec) -> list[HpdMatrix]:
    """``n`` independent covariance estimates from the stream ``seed``.

    Deterministic: the same ``seed`` always produces the same batch, and a
    batch of one equals :func:`sample_covariance` on ``seed.generator()``.
    """
    if n < 1:
        raise ValueError(f"batch size must be at least 1, got {n}")
    arrays = _sample_cov_arrays(model.sigma_sqrt, model.dof, seed.generator(), n)
    return [HpdMatrix(a) for a in arrays]
