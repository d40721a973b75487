"""Seeded generators shared across the test suite."""

import numpy as np


def complex_gaussian(rng, shape):
    w = rng.standard_normal(tuple(shape) + (2,))
    return (w[..., 0] + 1j * w[..., 1]) / np.sqrt(2.0)


def random_hermitian(rng, p, scale=1.0):
    z = complex_gaussian(rng, (p, p))
    return scale * (z + z.conj().T) / 2.0


def random_unitary(rng, p):
    q, r = np.linalg.qr(complex_gaussian(rng, (p, p)))
    d = np.diagonal(r)
    return q * (np.conj(d) / np.abs(d))[None, :]


def random_hpd_array(rng, p, spread=1.0):
    """HPD array with log-eigenvalues uniform in [-spread, spread]."""
    u = random_unitary(rng, p)
    lam = np.exp(rng.uniform(-spread, spread, p))
    return (u * lam[None, :]) @ u.conj().T


def random_invertible(rng, p):
    """Well-conditioned complex matrix (singular values in [0.5, 2])."""
    u = random_unitary(rng, p)
    v = random_unitary(rng, p)
    sv = np.exp(rng.uniform(np.log(0.5), np.log(2.0), p))
    return (u * sv[None, :]) @ v
