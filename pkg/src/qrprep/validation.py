"""Argument checks shared by the estimator front end."""

from __future__ import annotations

import numpy as np

from .qcore import DensityMatrix, DimensionError


def check_density_matrix(rho, dim: int | None = None, tol: float = 1e-8, psd_tol: float = 1e-6) -> np.ndarray:
    """Return ``rho`` as a validated complex array (Hermitian, unit trace, PSD within tolerance)."""
    arr = np.asarray(rho.data if isinstance(rho, DensityMatrix) else rho, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("state contains NaN or infinite entries")
    DensityMatrix(arr, tol=tol, psd_tol=psd_tol)
    return arr


def check_reservoir_state(rho) -> tuple[np.ndarray, int]:
    """A state on ``2**n`` occupations; returns it with the node count ``n``."""
    arr = check_density_matrix(rho, psd_tol=np.inf)
    n = arr.shape[0].bit_length() - 1
    if n < 1 or arr.shape[0] != 2 ** n:
        raise DimensionError(f"reservoir states live on 2**n levels, got {arr.shape[0]}")
    return arr, n


def check_positive(name: str, value, allow_zero: bool = False) -> float:
    v = float(value)
    if not np.isfinite(v) or v < 0 or (v == 0 and not allow_zero):
        raise ValueError(f"{name} must be {'nonnegative' if allow_zero else 'positive'}, got {value!r}")
    return v


def check_angles(values, mode_count: int) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    if v.size != mode_count ** 2:
        raise ValueError(f"{mode_count} modes need {mode_count ** 2} angles, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("angles must be finite")
    return v
