"""Fidelity, negativity and relative entropy of discord."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .qcore import (EIG_FLOOR, DimensionError, SubsystemSplit, _as_split, check_hermitian,
                    hermitian_function, hermitize, partial_transpose, von_neumann_entropy)

DISCORD_GRID = (64, 128)
ZOOM_ROUNDS = 6

_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def fidelity(rho, sigma) -> float:
    """Square fidelity ``(tr sqrt(sqrt(sigma) rho sqrt(sigma)))**2``.

    ``sigma`` may be a ket, in which case this is ``<psi|rho|psi>``.
    """
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if sigma.ndim == 1:
        if sigma.size != rho.shape[0]:
            raise DimensionError("ket and state dimensions differ")
        return float(np.clip(np.real(np.vdot(sigma, rho @ sigma)), 0.0, 1.0))
    if sigma.shape != rho.shape:
        raise DimensionError(f"shapes {rho.shape} and {sigma.shape} differ")
    # singular values of sqrt(rho) sqrt(sigma) avoid the square root of a
    # rounding-level eigenvalue spectrum
    prod = _floored_sqrt(rho) @ _floored_sqrt(sigma)
    s = np.linalg.svd(prod, compute_uv=False)
    return float(np.clip(s.sum() ** 2, 0.0, 1.0))


def _floored_sqrt(a: np.ndarray) -> np.ndarray:
    return hermitian_function(a, lambda w: np.sqrt(np.where(w > EIG_FLOOR, w, 0.0)), tol=1e-8)


def negativity(rho, split, target: int = 1) -> float:
    """``(||rho^T_target||_1 - 1) / 2``, clamped to zero below 1e-12."""
    split = _as_split(split)
    if len(split.dims) < 2:
        raise DimensionError("negativity needs a bipartition")
    pt = partial_transpose(rho, split, target)
    w = np.linalg.eigvalsh(hermitize(pt))
    val = 0.5 * (np.abs(w).sum() - 1.0)
    return float(val) if val > 1e-12 else 0.0


@dataclass(frozen=True)
class MeasurementBasis:
    """Qubit basis ``{|n+>, |n->}`` along the Bloch direction ``(theta, phi)``."""

    theta: float
    phi: float

    @property
    def direction(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        ns = np.einsum("k,kij->ij", self.direction, _PAULI)
        eye = np.eye(2)
        return 0.5 * (eye + ns), 0.5 * (eye - ns)


def _qubit_side(split: SubsystemSplit, measured_side: int) -> int:
    if len(split.dims) != 2 or measured_side not in (0, 1):
        raise DimensionError("discord needs a bipartition and a side index 0 or 1")
    if split.dims[measured_side] != 2:
        raise DimensionError("the measured side must be a qubit")
    return split.dims[1 - measured_side]


def measured_state(rho, split, basis: MeasurementBasis, measured_side: int = 1) -> np.ndarray:
    """``sum_j (I x P_j) rho (I x P_j)``: rho dephased in ``basis`` on the measured qubit."""
    rho = np.asarray(rho)
    split = _as_split(split)
    split.check(rho)
    dx = _qubit_side(split, measured_side)
    out = np.zeros_like(rho, dtype=complex)
    for p in basis.projectors:
        op = np.kron(np.eye(dx), p) if measured_side == 1 else np.kron(p, np.eye(dx))
        out += op @ rho @ op
    return out


def _conditional_blocks(rho: np.ndarray, dx: int, measured_side: int):
    """``tr_Y[(I x sigma_k) rho]`` for k = 0 (identity), x, y, z."""
    t = rho.reshape(dx, 2, dx, 2) if measured_side == 1 else rho.reshape(2, dx, 2, dx)
    ops = np.concatenate([np.eye(2, dtype=complex)[None], _PAULI])  # (4, 2, 2)
    if measured_side == 1:
        # tr_Y[(I x s) rho]_{ab} = sum_{uv} s_{vu} rho_{a u, b v}
        return np.einsum("kvu,aubv->kab", ops, t)
    return np.einsum("kvu,uavb->kab", ops, t)


def measured_entropy(rho, split, thetas, phis, measured_side: int = 1) -> np.ndarray:
    """Entropy in bits of the dephased state for each Bloch direction (vectorized).

    The dephased state is block diagonal with blocks
    ``(R_0 +/- n.R) / 2``, ``R_k = tr_Y[(I x sigma_k) rho]``, so its entropy
    is read off the eigenvalues of two ``dx x dx`` matrices per direction.
    """
    rho = np.asarray(rho)
    split = _as_split(split)
    dx = _qubit_side(split, measured_side)
    return _blocks_entropy(_conditional_blocks(rho, dx, measured_side), thetas, phis)


def _blocks_entropy(r: np.ndarray, thetas, phis) -> np.ndarray:
    thetas, phis = np.broadcast_arrays(np.asarray(thetas, float), np.asarray(phis, float))
    st = np.sin(thetas)
    n = np.stack([st * np.cos(phis), st * np.sin(phis), np.cos(thetas)], axis=-1)
    if r.shape[-1] == 2:
        # closed-form 2x2 eigenvalues from the Hermitian entries
        a = r[:, 0, 0].real
        d = r[:, 1, 1].real
        b = r[:, 0, 1]
        na, nd, nb = n @ a[1:], n @ d[1:], n @ b[1:]
        w = []
        for sgn in (1.0, -1.0):
            aa, dd, bb = 0.5 * (a[0] + sgn * na), 0.5 * (d[0] + sgn * nd), 0.5 * (b[0] + sgn * nb)
            half = 0.5 * (aa + dd)
            disc = np.sqrt(0.25 * (aa - dd) ** 2 + np.abs(bb) ** 2)
            w += [half + disc, half - disc]
        w = np.stack(w, axis=-1)
        safe = np.where(w > EIG_FLOOR, w, 1.0)
        return -np.sum(np.where(w > EIG_FLOOR, w * np.log2(safe), 0.0), axis=-1)
    nr = np.einsum("...k,kab->...ab", n, r[1:])
    blocks = np.stack([0.5 * (r[0] + nr), 0.5 * (r[0] - nr)], axis=-3)
    w = np.linalg.eigvalsh(0.5 * (blocks + np.conj(np.swapaxes(blocks, -1, -2))))
    safe = np.where(w > EIG_FLOOR, w, 1.0)
    return -np.sum(np.where(w > EIG_FLOOR, w * np.log2(safe), 0.0), axis=(-1, -2))


def _h2(w: float) -> float:
    return -w * math.log2(w) if w > EIG_FLOOR else 0.0


def _scalar_measured_entropy(rho, split, measured_side):
    """Scalar version of :func:`measured_entropy` for the simplex refinement."""
    dx = _qubit_side(split, measured_side)
    if dx != 2:
        return lambda x: float(measured_entropy(rho, split, x[0], x[1], measured_side))
    r = _conditional_blocks(rho, dx, measured_side)
    # R_k = [[a_k, b_k], [conj(b_k), d_k]]; a_k, d_k real for Hermitian rho
    a = [float(r[k, 0, 0].real) for k in range(4)]
    d = [float(r[k, 1, 1].real) for k in range(4)]
    b = [complex(r[k, 0, 1]) for k in range(4)]

    def f(x):
        st = math.sin(x[0])
        n = (st * math.cos(x[1]), st * math.sin(x[1]), math.cos(x[0]))
        na = n[0] * a[1] + n[1] * a[2] + n[2] * a[3]
        nd = n[0] * d[1] + n[1] * d[2] + n[2] * d[3]
        nb = n[0] * b[1] + n[1] * b[2] + n[2] * b[3]
        total = 0.0
        for sgn in (1.0, -1.0):
            aa = 0.5 * (a[0] + sgn * na)
            dd = 0.5 * (d[0] + sgn * nd)
            bb = 0.5 * (b[0] + sgn * nb)
            half = 0.5 * (aa + dd)
            disc = math.sqrt(max(0.25 * (aa - dd) ** 2 + abs(bb) ** 2, 0.0))
            total += _h2(half + disc) + _h2(half - disc)
        return total

    return f


def discord_details(rho, split, measured_side: int = 1, grid=DISCORD_GRID, refine: bool = True):
    """Relative entropy of discord and the minimizing basis.

    Minimises ``S(measured_state) - S(rho)`` over Bloch directions: a
    ``grid[0] x grid[1]`` sweep of (theta, phi), then a local refinement
    from the best grid point. ``refine`` is ``True``/``'simplex'``
    (Nelder-Mead), ``'zoom'`` (a few shrinking local grids, cheaper and
    used inside training loops) or ``False``.
    """
    rho = np.asarray(rho)
    split = _as_split(split)
    split.check(rho)
    check_hermitian(rho, 1e-8)
    s_rho = von_neumann_entropy(rho, tol=1e-8)
    nt, nphi = grid
    th = (np.arange(nt) + 0.5) * math.pi / nt
    ph = np.arange(nphi) * 2 * math.pi / nphi
    tgrid, pgrid = np.meshgrid(th, ph, indexing="ij")
    r = _conditional_blocks(rho, _qubit_side(split, measured_side), measured_side)
    vals = _blocks_entropy(r, tgrid, pgrid)
    k = int(np.argmin(vals))  # first index wins ties
    best_t, best_p, best = float(tgrid.flat[k]), float(pgrid.flat[k]), float(vals.flat[k])
    if refine == "zoom":
        dt, dp = math.pi / nt, 2 * math.pi / nphi
        offsets = np.linspace(-1.0, 1.0, 5)
        for _ in range(ZOOM_ROUNDS):
            tz, pz = np.meshgrid(best_t + dt * offsets, best_p + dp * offsets, indexing="ij")
            zv = _blocks_entropy(r, tz, pz)
            k = int(np.argmin(zv))
            if zv.flat[k] < best:
                best_t, best_p, best = float(tz.flat[k]), float(pz.flat[k]), float(zv.flat[k])
            dt, dp = dt / 3, dp / 3
    elif refine:
        f = _scalar_measured_entropy(rho, split, measured_side)
        res = minimize(f, [best_t, best_p], method="Nelder-Mead",
                       options={"xatol": 1e-7, "fatol": 1e-12, "maxiter": 400})
        if res.fun < best:
            best_t, best_p, best = float(res.x[0]), float(res.x[1]), float(res.fun)
    d = best - s_rho
    return max(d, 0.0) if d > -1e-9 else d, MeasurementBasis(best_t % (2 * math.pi), best_p % (2 * math.pi))


def discord(rho, split, measured_side: int = 1, grid=DISCORD_GRID, refine: bool = True) -> float:
    """Relative entropy of discord ``D_{X|Y}`` in bits; ``measured_side`` names Y."""
    return discord_details(rho, split, measured_side, grid, refine)[0]
