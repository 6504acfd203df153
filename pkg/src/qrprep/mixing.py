"""Trainable linear mixing of emitted modes and vacuum post-selection.

The output modes are ``C_k = sum_j m_kj B_j`` for a unitary ``M``. The
induced Fock-space map ``V`` has entries ``V[p, q] = <beta_p|gamma_q>``
where ``beta_p`` runs over emitted-mode Fock states and ``gamma_q`` over
output-mode Fock states, so the output density matrix is ``V^dagger rho V``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qcore import (BOSONIC, FERMIONIC, DensityMatrix, DimensionError, FockBasis,
                    enumerate_basis, hermitize)

PROB_FLOOR = 1e-12


def mode_pairs(n: int) -> list[tuple[int, int]]:
    """Two-mode block order: (0,1), (0,2), ..., (n-2, n-1)."""
    return list(itertools.combinations(range(n), 2))


@dataclass(frozen=True, eq=False)
class MixingAngles:
    """Flat parameter vector: block rotations, block phases, then output phases.

    ``random_angles`` samples rotations in [0, pi/2] and phases in
    [-pi, pi); mutated vectors may drift outside those ranges, which is
    harmless because the matrix is periodic in every entry.
    """

    mode_count: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.size != self.mode_count ** 2:
            raise ValueError(f"{self.mode_count} modes need {self.mode_count ** 2} angles, got {vals.size}")
        object.__setattr__(self, "values", vals)

    @property
    def n_blocks(self) -> int:
        return self.mode_count * (self.mode_count - 1) // 2

    @property
    def thetas(self) -> np.ndarray:
        return self.values[: self.n_blocks]

    @property
    def phis(self) -> np.ndarray:
        return self.values[self.n_blocks: 2 * self.n_blocks]

    @property
    def output_phases(self) -> np.ndarray:
        return self.values[2 * self.n_blocks:]

    def shifted(self, delta) -> "MixingAngles":
        return MixingAngles(self.mode_count, self.values + np.asarray(delta, dtype=float))

    @classmethod
    def zeros(cls, n: int) -> "MixingAngles":
        return cls(n, np.zeros(n * n))


def two_mode_block(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, s * e], [-s * e.conjugate(), c]])


def unitary_from_angles(angles: MixingAngles) -> np.ndarray:
    """``M = D(phases) T_last ... T_first`` with each ``T`` a two-mode block."""
    n = angles.mode_count
    m = np.eye(n, dtype=complex)
    for (i, j), th, ph in zip(mode_pairs(n), angles.thetas, angles.phis):
        c, s = math.cos(th), math.sin(th)
        e = complex(math.cos(ph), math.sin(ph))
        ri, rj = m[i].copy(), m[j]
        m[i] = c * ri + s * e * rj
        m[j] = -s * e.conjugate() * ri + c * rj
    return np.exp(1j * angles.output_phases)[:, None] * m


def random_angles(n: int, rng: np.random.Generator) -> MixingAngles:
    if n < 1:
        raise ValueError("need at least one mode")
    k = n * (n - 1) // 2
    thetas = rng.uniform(0.0, math.pi / 2, k)
    phis = rng.uniform(-math.pi, math.pi, k)
    phases = rng.uniform(-math.pi, math.pi, n)
    return MixingAngles(n, np.concatenate([thetas, phis, phases]))


def block_diagonal(*blocks: np.ndarray) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        d = b.shape[0]
        out[k:k + d, k:k + d] = b
        k += d
    return out


# --- Fock-space transform -------------------------------------------------

@lru_cache(maxsize=None)
def _ladder_tables(basis: FockBasis, hardcore_rows: bool = False):
    """Per-sector recursion tables for :func:`fock_transform`.

    For each basis state q with n > 0 excitations, ``parent[q]`` is q with
    one excitation removed from its lowest occupied mode ``first[q]`` and
    ``norm[q]`` turns ``C_first^dagger |parent>`` into the normalized ket.
    ``create[j]`` is ``B_j^dagger`` from sector n-1 to sector n, restricted
    to the row states kept (all, or only 0/1 occupations).
    """
    occ = basis.occupations
    totals = occ.sum(axis=1)
    fermi = basis.statistics == FERMIONIC
    keep_row = occ.max(axis=1, initial=0) <= 1 if hardcore_rows else np.ones(basis.dim, bool)
    sectors = [np.flatnonzero(totals == n) for n in range(basis.max_total + 1)]
    row_sectors = [idx[keep_row[idx]] for idx in sectors]
    local = np.empty(basis.dim, dtype=int)
    row_local = np.full(basis.dim, -1)
    for idx, ridx in zip(sectors, row_sectors):
        local[idx] = np.arange(idx.size)
        row_local[ridx] = np.arange(ridx.size)
    plan = []
    for n in range(1, basis.max_total + 1):
        cols, prev_rows, rows = sectors[n], row_sectors[n - 1], row_sectors[n]
        if cols.size == 0:
            break
        parent = np.empty(cols.size, dtype=int)
        first = np.empty(cols.size, dtype=int)
        norm = np.empty(cols.size)
        for a, q in enumerate(cols):
            k = int(np.flatnonzero(occ[q])[0])
            par = occ[q].copy()
            par[k] -= 1
            parent[a] = local[basis.index(par)]
            first[a] = k
            norm[a] = 1.0 / math.sqrt(occ[q][k])
        create = np.zeros((basis.mode_count, rows.size, prev_rows.size))
        for b, p in enumerate(prev_rows):
            for j in range(basis.mode_count):
                new = occ[p].copy()
                new[j] += 1
                if tuple(new) not in basis or row_local[basis.index(new)] < 0:
                    continue
                amp = (-1.0) ** int(occ[p][:j].sum()) if fermi else math.sqrt(new[j])
                create[j, row_local[basis.index(new)], b] = amp
        plan.append((rows, cols, parent, first, norm, create))
    return sectors, row_sectors, plan


def _ladder(m: np.ndarray, basis: FockBasis, hardcore_rows: bool):
    sectors, row_sectors, plan = _ladder_tables(basis, hardcore_rows)
    mc = m.conj()
    blocks = [(row_sectors[0], sectors[0], np.ones((1, 1), dtype=complex))]
    prev = blocks[0][2]
    for rows, cols, parent, first, norm, create in plan:
        # column a: norm_a * sum_j conj(m[first_a, j]) * B_j^dagger @ prev[:, parent_a]
        lifted = np.einsum("jrb,ba->jra", create, prev[:, parent])
        prev = np.einsum("ja,jra->ra", mc[first].T, lifted) * norm
        blocks.append((rows, cols, prev))
    return blocks


def fock_transform(m: np.ndarray, basis: FockBasis, method: str = "ladder") -> np.ndarray:
    """Fock-space matrix ``V[p, q] = <beta_p | gamma_q>`` induced by ``M``.

    ``method='ladder'`` builds each output ket by applying
    ``C_k^dagger = sum_j conj(m_kj) B_j^dagger`` to a ket one excitation
    lower. ``method='expansion'`` evaluates every entry as a permanent
    (bosons) or determinant (fermions) of the conjugated coefficient
    submatrix; it is slow and kept as a cross-check.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (basis.mode_count, basis.mode_count):
        raise DimensionError(f"{m.shape} mixer for a {basis.mode_count}-mode basis")
    if method == "expansion":
        return _fock_transform_expansion(m, basis)
    if method != "ladder":
        raise ValueError(f"unknown method {method!r}")
    v = np.zeros((basis.dim, basis.dim), dtype=complex)
    for rows, cols, block in _ladder(m, basis, False):
        v[np.ix_(rows, cols)] = block
    return v


def reservoir_transform(m: np.ndarray, statistics: str) -> tuple[np.ndarray, FockBasis]:
    """Rows of ``V`` for the 0/1-occupation states a reservoir can emit.

    Row ``s`` follows the reservoir (fermionic) basis order, so
    ``R^dagger rho_tau R`` is the output state without forming the full
    bosonic embedding.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    basis = output_basis(n, statistics)
    idx = _embedding_index(n, statistics)
    pos = np.empty(basis.dim, dtype=int)
    pos[idx] = np.arange(idx.size)
    r = np.zeros((idx.size, basis.dim), dtype=complex)
    for rows, cols, block in _ladder(m, basis, statistics == BOSONIC):
        r[np.ix_(pos[rows], cols)] = block
    return r, basis


def permanent(a: np.ndarray) -> complex:
    """Permanent by direct expansion over permutations."""
    a = np.asarray(a)
    n = a.shape[0]
    if n == 0:
        return 1.0
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i, j in enumerate(perm):
            prod *= a[i, j]
        total += prod
    return total


def _repeated(occ) -> list[int]:
    return [k for k, c in enumerate(occ) for _ in range(c)]


def _fock_transform_expansion(m: np.ndarray, basis: FockBasis) -> np.ndarray:
    mc = m.conj()
    v = np.zeros((basis.dim, basis.dim), dtype=complex)
    bosonic = basis.statistics == BOSONIC
    for q, gam in enumerate(basis.states):
        rows = _repeated(gam)
        for p, beta in enumerate(basis.states):
            if sum(beta) != sum(gam):
                continue
            cols = _repeated(beta)
            sub = mc[np.ix_(rows, cols)]
            if bosonic:
                norm = math.sqrt(math.prod(math.factorial(x) for x in gam)
                                 * math.prod(math.factorial(x) for x in beta))
                v[p, q] = permanent(sub) / norm
            else:
                v[p, q] = np.linalg.det(sub) if rows else 1.0
    return v


# --- reservoir to output ----------------------------------------------------

def output_basis(node_count: int, statistics: str) -> FockBasis:
    if statistics == BOSONIC:
        return enumerate_basis(node_count, BOSONIC, node_count)
    return enumerate_basis(node_count, FERMIONIC)


@lru_cache(maxsize=None)
def _embedding_index(node_count: int, statistics: str) -> np.ndarray:
    src = enumerate_basis(node_count, FERMIONIC)
    dst = output_basis(node_count, statistics)
    return np.array([dst.index(s) for s in src.states])


def embed_reservoir_state(rho_tau, statistics: str) -> tuple[np.ndarray, FockBasis]:
    """Place a reservoir state (0/1 occupations) into the output-mode basis."""
    rho_tau = np.asarray(rho_tau, dtype=complex)
    n = int(round(math.log2(rho_tau.shape[0])))
    if rho_tau.shape != (2 ** n, 2 ** n):
        raise DimensionError(f"reservoir state of shape {rho_tau.shape}")
    basis = output_basis(n, statistics)
    if statistics == FERMIONIC:
        return rho_tau.copy(), basis
    idx = _embedding_index(n, statistics)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    out[np.ix_(idx, idx)] = rho_tau
    return out, basis


def apply_mixing(rho_tau, m: np.ndarray, statistics: str) -> DensityMatrix:
    rho_tau = np.asarray(rho_tau, dtype=complex)
    m = np.asarray(m, dtype=complex)
    if rho_tau.shape != (2 ** m.shape[0],) * 2:
        raise DimensionError(f"reservoir state of shape {rho_tau.shape} for a {m.shape[0]}-mode mixer")
    r, basis = reservoir_transform(m, statistics)
    return DensityMatrix(hermitize(r.conj().T @ rho_tau @ r), basis, tol=1e-8, psd_tol=1e-6)


@dataclass(frozen=True)
class PostSelection:
    """Modes projected onto vacuum (``measured``) and modes kept (``principal``)."""

    principal: tuple[int, ...]
    measured: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "principal", tuple(self.principal))
        object.__setattr__(self, "measured", tuple(self.measured))

    def check(self, mode_count: int) -> None:
        both = sorted(self.principal + self.measured)
        if both != list(range(mode_count)):
            raise ValueError(f"{self} does not partition {mode_count} modes")

    @classmethod
    def keep_first(cls, k: int, mode_count: int) -> "PostSelection":
        return cls(tuple(range(k)), tuple(range(k, mode_count)))


@lru_cache(maxsize=None)
def _vacuum_selection(basis: FockBasis, sel: PostSelection):
    sel.check(basis.mode_count)
    occ = basis.occupations
    ok = np.flatnonzero(occ[:, list(sel.measured)].sum(axis=1) == 0) if sel.measured else np.arange(basis.dim)
    max_total = basis.max_total
    if basis.statistics == BOSONIC:
        reduced = enumerate_basis(len(sel.principal), BOSONIC, max_total)
    else:
        reduced = enumerate_basis(len(sel.principal), FERMIONIC)
    target = np.array([reduced.index(tuple(occ[i, list(sel.principal)])) for i in ok])
    return ok, target, reduced


def postselect_vacuum(rho_out, basis: FockBasis, sel: PostSelection):
    """Project the measured modes onto vacuum.

    Returns ``(state, probability)``; ``state`` is ``None`` when the
    probability falls below ``PROB_FLOOR``. Fermionic sign conventions are
    unaffected because the measured modes are empty on the kept subspace.
    """
    rho = np.asarray(rho_out)
    ok, target, reduced = _vacuum_selection(basis, sel)
    block = rho[np.ix_(ok, ok)]
    prob = float(np.clip(np.trace(block).real, 0.0, 1.0))
    if prob < PROB_FLOOR:
        return None, prob
    out = np.zeros((reduced.dim, reduced.dim), dtype=complex)
    out[np.ix_(target, target)] = block / prob
    return DensityMatrix(hermitize(out), reduced, tol=1e-8, psd_tol=1e-6), prob


def postselect_array(rho_out: np.ndarray, basis: FockBasis, sel: PostSelection):
    """Unvalidated variant of :func:`postselect_vacuum` for inner loops."""
    ok, target, reduced = _vacuum_selection(basis, sel)
    block = rho_out[np.ix_(ok, ok)]
    prob = float(np.trace(block).real)
    if prob < PROB_FLOOR:
        return None, max(prob, 0.0)
    out = np.zeros((reduced.dim, reduced.dim), dtype=complex)
    out[np.ix_(target, target)] = block / prob
    return out, min(prob, 1.0)


@lru_cache(maxsize=None)
def _trace_tables(basis: FockBasis, keep: tuple[int, ...]):
    n = basis.mode_count
    dropped = [k for k in range(n) if k not in keep]
    if basis.statistics == FERMIONIC and dropped and min(dropped) < max(keep):
        raise ValueError("fermionic modes can only be traced out from the end of the mode list")
    occ = basis.occupations
    if basis.statistics == BOSONIC:
        reduced = enumerate_basis(len(keep), BOSONIC, basis.max_total)
    else:
        reduced = enumerate_basis(len(keep), FERMIONIC)
    env = {}
    for i in range(basis.dim):
        env.setdefault(tuple(occ[i, dropped]), []).append(i)
    groups = []
    for rows in env.values():
        rows = np.array(rows)
        groups.append((rows, np.array([reduced.index(tuple(occ[i, list(keep)])) for i in rows])))
    return groups, reduced


def trace_out_modes(rho_out, basis: FockBasis, keep) -> tuple[np.ndarray, FockBasis]:
    """Reduced state of the modes in ``keep``."""
    rho = np.asarray(rho_out)
    groups, reduced = _trace_tables(basis, tuple(keep))
    out = np.zeros((reduced.dim, reduced.dim), dtype=complex)
    for rows, target in groups:
        out[np.ix_(target, target)] += rho[np.ix_(rows, rows)]
    return out, reduced


@lru_cache(maxsize=None)
def _product_index(basis: FockBasis):
    local = basis.max_total + 1 if basis.statistics == BOSONIC else 2
    dims = (local,) * basis.mode_count
    idx = np.array([np.ravel_multi_index(s, dims) for s in basis.states])
    return idx, dims


def to_product_space(rho, basis: FockBasis) -> tuple[np.ndarray, tuple[int, ...]]:
    """Embed a state into the mode-by-mode tensor space, one factor per mode."""
    rho = np.asarray(rho)
    idx, dims = _product_index(basis)
    d = int(np.prod(dims))
    out = np.zeros((d, d), dtype=complex)
    out[np.ix_(idx, idx)] = rho
    return out, dims
