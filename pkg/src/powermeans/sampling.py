"""Random matrices for property checks.

Every trial draws from ``trial_rng(seed, index)`` so results do not depend on
the order in which trials are run.
"""

import numpy as np

PD_SHIFT = 1e-3


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def complex_gaussian(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pd(rng, dim, shift=PD_SHIFT):
    """``G G* + shift I`` with complex Gaussian ``G``."""
    g = complex_gaussian(rng, dim, dim)
    return g @ g.conj().T + shift * np.eye(dim)


def random_unitary(rng, dim):
    q, r = np.linalg.qr(complex_gaussian(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_projection(rng, dim, rank):
    """Orthogonal projection onto a random ``rank``-dimensional subspace."""
    if rank == 0:
        return np.zeros((dim, dim), dtype=complex)
    q = random_unitary(rng, dim)[:, :rank]
    return q @ q.conj().T


def random_singular_psd(rng, dim, rank=None):
    """A PD sample with a random subspace projected out; rank in ``1..dim-1`` unless given."""
    if rank is None:
        rank = int(rng.integers(1, dim)) if dim > 1 else 0
    p = random_projection(rng, dim, rank)
    a = p @ random_pd(rng, dim) @ p
    return 0.5 * (a + a.conj().T)


def random_psd(rng, dim, singular_fraction=0.5):
    if dim > 1 and rng.random() < singular_fraction:
        return random_singular_psd(rng, dim)
    return random_pd(rng, dim)


def random_invertible(rng, dim, max_cond=10.0):
    """
    ``U diag(s) V*`` with Haar unitaries and ``s`` log-uniform in ``[1, max_cond]``.

    Power-congruences raise the condition number of ``T`` to the power
    ``2/|p|``, so the default keeps it small.
    """
    s = np.exp(rng.uniform(0.0, np.log(max_cond), dim))
    return (random_unitary(rng, dim) * s) @ random_unitary(rng, dim).conj().T


def random_pd_conditioned(rng, dim, max_cond=10.0):
    """PD matrix with eigenvalues log-uniform in ``[1, max_cond]``."""
    u = random_unitary(rng, dim)
    s = np.exp(rng.uniform(0.0, np.log(max_cond), dim))
    return (u * s) @ u.conj().T


def random_commuting_pair(rng, dim, singular=False):
    """Two matrices diagonal in a common random unitary basis."""
    u = random_unitary(rng, dim)
    a = np.exp(rng.uniform(-2, 2, dim))
    b = np.exp(rng.uniform(-2, 2, dim))
    if singular and dim > 1:
        a[rng.integers(dim)] = 0.0
        b[rng.integers(dim)] = 0.0
    return (u * a) @ u.conj().T, (u * b) @ u.conj().T


def random_unit_vector(rng, dim):
    v = complex_gaussian(rng, dim)
    return v / np.linalg.norm(v)
