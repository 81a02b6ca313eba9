"""
Complex linear-algebra kernel.

Givens-type rotations in a coordinate plane, the spectral norm, a cyclic
(non-blind) Jacobi eigensolver for Hermitian matrices and null-space
extraction built on top of it.

All indices are zero based.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "ConvergenceError",
    "RotationParams",
    "rotation_matrix",
    "rotation_column",
    "spectral_norm",
    "jacobi_angles",
    "hermitian_eig_oracle",
    "null_space",
    "is_hermitian",
]

HERMITIAN_TOL = 1e-10
MAX_SWEEPS = 100


class ConvergenceError(RuntimeError):
    """Raised when an iterative routine fails to converge."""


def _wrap(angle, period):
    """Wrap `angle` into [-period/2, period/2)."""
    half = period / 2.0
    return (angle + half) % period - half


@dataclass(frozen=True)
class RotationParams:
    """
    Parameters of a plane rotation.

    Parameters
    ----------
    l, m : int
        Plane indices with ``0 <= l < m``.
    theta : float
        Rotation angle, wrapped into [-pi/2, pi/2).
    phi : float
        Phase angle, wrapped into [-pi, pi).

    Notes
    -----
    Wrapping `theta` by pi flips the sign of the 2x2 block. The rotated
    columns change only by a unit-modulus factor, so every quantity this
    package derives from them (interference powers, subspaces) is
    unaffected.
    """

    l: int
    m: int
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not (0 <= self.l < self.m):
            raise ValueError(f"need 0 <= l < m, got l={self.l}, m={self.m}")
        theta = float(self.theta)
        if not -math.pi / 2 <= theta <= math.pi / 2:
            theta = _wrap(theta, math.pi)
        phi = float(self.phi)
        if not -math.pi <= phi <= math.pi:
            phi = _wrap(phi, 2 * math.pi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    def check_dimension(self, n):
        if self.m >= n:
            raise ValueError(
                f"rotation plane ({self.l}, {self.m}) does not fit in "
                f"dimension {n}")


def rotation_matrix(n, p):
    """
    Return the n x n plane rotation described by `p`.

    The matrix equals the identity except

    * ``R[l, l] = R[m, m] = cos(theta)``
    * ``R[l, m] = exp(-1j*phi) * sin(theta)``
    * ``R[m, l] = -exp(+1j*phi) * sin(theta)``

    which makes it exactly unitary for every (theta, phi).

    Parameters
    ----------
    n : int
        Ambient dimension.
    p : RotationParams
        Plane and angles.

    Returns
    -------
    np.ndarray
        Complex array of shape (n, n).

    Examples
    --------
    >>> R = rotation_matrix(2, RotationParams(0, 1, np.pi / 2, 0.0))
    >>> np.round(R.real, 12) + 0.0
    array([[ 0.,  1.],
           [-1.,  0.]])
    """
    n = int(n)
    if n < 2:
        raise ValueError("rotation needs dimension >= 2")
    p.check_dimension(n)
    c = math.cos(p.theta)
    s = math.sin(p.theta)
    R = np.eye(n, dtype=complex)
    R[p.l, p.l] = c
    R[p.m, p.m] = c
    R[p.l, p.m] = np.exp(-1j * p.phi) * s
    R[p.m, p.l] = -np.exp(1j * p.phi) * s
    return R


def rotation_column(n, l, m, theta, phi):
    """
    Column `l` of the plane rotation, i.e. ``rotation_matrix(...) @ e_l``.

    This is the unit probe direction explored by a learning stage: it
    mixes coordinate `l` with coordinate `m` and nothing else.
    """
    r = np.zeros(n, dtype=complex)
    r[l] = math.cos(theta)
    r[m] = -np.exp(1j * phi) * math.sin(theta)
    return r


def spectral_norm(A):
    """Largest singular value of `A`."""
    A = np.atleast_2d(np.asarray(A))
    if A.size == 0:
        raise ValueError("spectral norm of an empty matrix is undefined")
    if A.shape[0] == 1 or A.shape[1] == 1:
        # rank one: the 2-norm of the single row/column
        return float(np.linalg.norm(A.ravel()))
    return float(np.linalg.norm(A, 2))


def is_hermitian(G, tol=HERMITIAN_TOL):
    G = np.asarray(G)
    return G.ndim == 2 and G.shape[0] == G.shape[1] and \
        np.max(np.abs(G - G.conj().T), initial=0.0) <= tol


def jacobi_angles(a_ll, a_mm, a_lm):
    """
    Angles of the rotation that zeros the (l, m) entry of a Hermitian
    2x2 block.

    With ``R = rotation_matrix(2, RotationParams(0, 1, theta, phi))`` the
    off-diagonal entry of ``R @ A @ R^H`` vanishes, where
    ``A = [[a_ll, a_lm], [conj(a_lm), a_mm]]``.

    Parameters
    ----------
    a_ll, a_mm : complex
        Diagonal entries; must be real up to 1e-10.
    a_lm : complex
        Upper off-diagonal entry.

    Returns
    -------
    theta, phi : float
        ``phi = -arg(a_lm)`` and ``tan(2 theta) = 2|a_lm| / (a_ll - a_mm)``
        with ``|theta| <= pi/4`` (``theta = pi/4`` on a tie). The minus
        sign follows from the phase convention of `rotation_matrix`.
    """
    a_ll = complex(a_ll)
    a_mm = complex(a_mm)
    if abs(a_ll.imag) > HERMITIAN_TOL or abs(a_mm.imag) > HERMITIAN_TOL:
        raise ValueError("diagonal entries of a Hermitian matrix must be real")
    b = complex(a_lm)
    mag = abs(b)
    if mag == 0.0:
        return 0.0, 0.0
    phi = -math.atan2(b.imag, b.real)
    diff = a_ll.real - a_mm.real
    if diff == 0.0:
        theta = math.pi / 4
    else:
        theta = 0.5 * math.atan(2.0 * mag / diff)
    return theta, phi


def _rotate_inplace(A, V, l, m, theta, phi):
    """A <- R A R^H and V <- V R^H, touching only rows/cols l and m."""
    c = math.cos(theta)
    s = math.sin(theta)
    e = np.exp(1j * phi)
    # R^H restricted to the plane: [[c, -conj(e) s], [e s, c]]
    col_l = A[:, l].copy()
    col_m = A[:, m].copy()
    A[:, l] = c * col_l + e * s * col_m
    A[:, m] = -np.conj(e) * s * col_l + c * col_m
    row_l = A[l, :].copy()
    row_m = A[m, :].copy()
    A[l, :] = c * row_l + np.conj(e) * s * row_m
    A[m, :] = -e * s * row_l + c * row_m
    vl = V[:, l].copy()
    vm = V[:, m].copy()
    V[:, l] = c * vl + e * s * vm
    V[:, m] = -np.conj(e) * s * vl + c * vm


def _max_offdiag(A):
    off = np.abs(A - np.diag(np.diag(A)))
    return float(off.max(initial=0.0))


def hermitian_eig_oracle(G, tol=1e-12):
    """
    Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    This is the non-blind reference: it reads every entry of `G`. Pairs
    are visited row by row, (0, 1), (0, 2), ..., (n-2, n-1), and sweeps
    repeat until the largest off-diagonal magnitude drops below `tol`.

    Parameters
    ----------
    G : array_like
        Hermitian matrix (within 1e-10).
    tol : float
        Absolute off-diagonal tolerance.

    Returns
    -------
    eigenvalues : np.ndarray
        Real eigenvalues in ascending order.
    V : np.ndarray
        Unitary matrix whose columns are the matching eigenvectors.

    Raises
    ------
    ValueError
        If `G` is not Hermitian or `tol` is not positive.
    ConvergenceError
        If 100 sweeps do not reach `tol`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    G = np.array(G, dtype=complex)
    if not is_hermitian(G):
        raise ValueError("input matrix is not Hermitian")
    n = G.shape[0]
    A = 0.5 * (G + G.conj().T)
    V = np.eye(n, dtype=complex)
    for _ in range(MAX_SWEEPS + 1):
        if _max_offdiag(A) < tol:
            break
        for l in range(n - 1):
            for m in range(l + 1, n):
                if abs(A[l, m]) == 0.0:
                    continue
                theta, phi = jacobi_angles(A[l, l].real, A[m, m].real, A[l, m])
                _rotate_inplace(A, V, l, m, theta, phi)
                # keep the annihilated pair exact and the diagonal real
                A[l, m] = A[m, l] = 0.0
                A[l, l] = A[l, l].real
                A[m, m] = A[m, m].real
    else:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(A).real
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def null_space(H, tol=1e-6):
    """
    Orthonormal basis of the kernel of `H`.

    Directions whose singular value is at most ``tol * sigma_max`` are
    kept, so a rank-deficient `H` yields a wider basis.

    Parameters
    ----------
    H : array_like
        Matrix of shape (rows, cols).
    tol : float
        Relative singular-value threshold.

    Returns
    -------
    np.ndarray
        Array of shape (cols, k) with orthonormal columns.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    G = H.conj().T @ H
    G = 0.5 * (G + G.conj().T)
    scale = float(np.max(np.abs(G), initial=0.0))
    if scale == 0.0:
        return np.eye(H.shape[1], dtype=complex)
    lam, V = hermitian_eig_oracle(G, tol=1e-15 * scale)
    sigma = np.sqrt(np.clip(lam, 0.0, None))
    keep = sigma <= tol * sigma.max()
    return V[:, keep]
