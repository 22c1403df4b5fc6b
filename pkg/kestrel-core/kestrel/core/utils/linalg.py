from typing import Sequence, Union

import numpy as np
from kestrel.core.errors import ContractViolationError, NumericError

ArrayLike = Union[Sequence[float], Sequence[Sequence[float]], np.ndarray, float]

PSD_TOLERANCE = 1e-9


def as_vector(value: ArrayLike, name: str = "vector") -> np.ndarray:
    """Copy `value` into a read-only finite float64 1-D array."""
    arr = np.array(value, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"`{name}` contains non-finite values.")
    arr.setflags(write=False)
    return arr


def as_matrix(value: ArrayLike, name: str = "matrix") -> np.ndarray:
    """Copy `value` into a read-only finite float64 2-D array."""
    arr = np.array(value, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ContractViolationError(
            f"`{name}` must be 2-D, got shape {arr.shape}.",
        )
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"`{name}` contains non-finite values.")
    arr.setflags(write=False)
    return arr


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Return (M + Mᵀ) / 2."""
    return 0.5 * (matrix + matrix.T)


def clamp_psd(matrix: np.ndarray, name: str = "covariance") -> np.ndarray:
    """
    Accept a symmetric matrix whose eigenvalues are all >= -1e-9 and clamp
    the negative ones to zero.

    The input is returned unchanged when it is already numerically PSD.
    """
    n = matrix.shape[0]
    if n == 0:
        return matrix
    try:
        np.linalg.cholesky(matrix + PSD_TOLERANCE * np.eye(n))
        return matrix
    except np.linalg.LinAlgError:
        pass

    eigvals, eigvecs = np.linalg.eigh(matrix)
    if eigvals.min() < -PSD_TOLERANCE:
        raise NumericError(
            f"`{name}` is not positive semi-definite "
            f"(smallest eigenvalue {eigvals.min():.3e}).",
        )
    clamped = (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T
    return symmetrize(clamped)
