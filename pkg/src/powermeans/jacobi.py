"""Cyclic Jacobi eigensolver for small Hermitian matrices.

Slower than LAPACK but deterministic and dependency-free beyond numpy; used
as an independent check on ``numpy.linalg.eigh``.
"""

import numpy as np

OFF_DIAGONAL_THRESHOLD = 1e-13


def _off_norm(a):
    return np.linalg.norm(a - np.diag(np.diag(a)))


def jacobi_eigh(a, threshold=OFF_DIAGONAL_THRESHOLD, max_sweeps=100):
    """
    Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : ndarray of shape (n, n)
        Hermitian matrix (real or complex).
    threshold : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``threshold * ||a||_F``.
    max_sweeps : int
        Hard cap on the number of cyclic sweeps.

    Returns
    -------
    w : ndarray of shape (n,)
        Eigenvalues in ascending order.
    v : ndarray of shape (n, n)
        Unitary matrix whose columns are the eigenvectors.
    """
    real_input = np.isrealobj(np.asarray(a))
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v.real if real_input else v

    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # columns p, q of the rotation
                rot = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot

    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    v = v[:, order]
    return w[order], v.real if real_input else v
