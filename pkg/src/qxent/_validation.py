"""Input validation helpers shared by the public modules."""

import numpy as np

from .exceptions import DimensionMismatch, NotHermitian


def check_square(A, name="matrix"):
    """Return ``A`` as a 2-D complex array, raising if it is not square."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    return A.astype(np.complex128, copy=False)


def check_hermitian(A, tol=1e-9, name="matrix"):
    A = check_square(A, name)
    err = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if err > tol:
        raise NotHermitian(f"{name} is not Hermitian: max |A - A^H| = {err:.3g}")
    return A


def check_same_shape(A, B):
    if A.shape != B.shape:
        raise DimensionMismatch(f"shape mismatch: {A.shape} vs {B.shape}")


def hermitize(A):
    return 0.5 * (A + A.conj().T)


def check_random_state(rng):
    """Turn ``None``, an int seed or a Generator into a ``np.random.Generator``."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
