"""Random driven two-level network evolved under a coarse-grained noisy Lindblad map.

Units: hbar = 1 and the pump strength sets the energy scale. Every node is
a hard-core two-level register; ``a_j`` is the local lowering operator on
the fermionic (0/1) Fock basis of :mod:`qrprep.qcore`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache

import numpy as np

from .qcore import FERMIONIC, DensityMatrix, enumerate_basis, hermitize, trace_norm

COHERENT = "coherent"
INCOHERENT = "incoherent"
UNIFORM = "uniform"
HALF_NORMAL = "half-normal"

STEADY_TOL = 1e-9
STEADY_TIME_FACTOR = 200.0
STEP_LIMIT = 0.1


class ConvergenceError(RuntimeError):
    """Raised when the reservoir does not settle within the time budget."""


@dataclass(frozen=True)
class CouplingGraph:
    """Nodes filled row-major into a 2 x ceil(N/2) grid, nearest-neighbour edges."""

    node_count: int

    @property
    def columns(self) -> int:
        return max(1, math.ceil(self.node_count / 2))

    @property
    def positions(self) -> list[tuple[int, int]]:
        c = self.columns
        return [(j // c, j % c) for j in range(self.node_count)]

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        where = {p: j for j, p in enumerate(self.positions)}
        out = []
        for j, (r, c) in enumerate(self.positions):
            for nb in ((r, c + 1), (r + 1, c)):
                if nb in where:
                    out.append((j, where[nb]))
        return tuple(sorted(out))


@dataclass(frozen=True, eq=False)
class PumpConfig:
    kind: str
    amplitudes: np.ndarray
    strength: float = 1.0

    def __post_init__(self):
        if self.kind not in (COHERENT, INCOHERENT):
            raise ValueError(f"unknown pump kind {self.kind!r}")
        amps = np.asarray(self.amplitudes, dtype=complex if self.kind == COHERENT else float)
        if self.kind == INCOHERENT and np.any(amps < 0):
            raise ValueError("incoherent pump rates must be nonnegative")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def incoherent(cls, node_count: int, strength: float = 1.0, nodes=None) -> "PumpConfig":
        amps = np.zeros(node_count)
        amps[list(range(node_count)) if nodes is None else list(nodes)] = strength
        return cls(INCOHERENT, amps, strength)

    @classmethod
    def coherent(cls, node_count: int, amplitude: complex, nodes=None,
                 strength: float | None = None) -> "PumpConfig":
        """Drive ``amplitude`` on ``nodes``; ``strength`` (default ``|amplitude|``) sets the energy unit."""
        amps = np.zeros(node_count, dtype=complex)
        amps[list(range(node_count)) if nodes is None else list(nodes)] = amplitude
        return cls(COHERENT, amps, float(abs(amplitude) if strength is None else strength))

    @property
    def coherent_amplitudes(self) -> np.ndarray:
        n = self.amplitudes.size
        return self.amplitudes if self.kind == COHERENT else np.zeros(n, dtype=complex)

    @property
    def incoherent_rates(self) -> np.ndarray:
        n = self.amplitudes.size
        return self.amplitudes if self.kind == INCOHERENT else np.zeros(n)


@dataclass(frozen=True, eq=False)
class ReservoirParams:
    node_count: int
    energies: np.ndarray
    couplings: np.ndarray  # aligned with graph.edges
    decay: np.ndarray
    dephasing: np.ndarray
    depolarizing: np.ndarray
    scale: float
    pump: PumpConfig
    dt: float
    distribution: str = UNIFORM
    graph: CouplingGraph = field(default=None)

    def __post_init__(self):
        if self.graph is None:
            object.__setattr__(self, "graph", CouplingGraph(self.node_count))
        if len(self.couplings) != len(self.graph.edges):
            raise ValueError("one coupling per lattice edge is required")
        for name in ("decay", "dephasing", "depolarizing"):
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise ValueError(f"{name} rates must be nonnegative")

    def with_noise(self, noise: str) -> "ReservoirParams":
        """``'decay'`` drops the dephasing and depolarizing rates; ``'all'`` keeps them."""
        if noise == "all":
            return self
        if noise != "decay":
            raise ValueError(f"unknown noise mode {noise!r}")
        z = np.zeros(self.node_count)
        return replace(self, dephasing=z, depolarizing=z.copy())

    @property
    def rates(self) -> np.ndarray:
        return np.concatenate([self.decay, self.dephasing, self.depolarizing,
                               self.pump.incoherent_rates])

    @property
    def fastest_scale(self) -> float:
        vals = np.concatenate([self.rates, np.abs(self.energies), np.abs(self.couplings),
                               np.abs(self.pump.coherent_amplitudes)])
        return float(vals.max(initial=0.0))

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        return build_hamiltonian(self)

    @cached_property
    def _dissipators(self):
        lower = lowering_operators(self.node_count)
        out = []
        for j, a in enumerate(lower):
            for rate, op in ((self.decay[j], a), (self.pump.incoherent_rates[j], a.T.copy())):
                if rate > 0:
                    out.append((float(rate), op, op.conj().T @ op))
        return out


def sample_params(node_count: int, scale: float, pump: PumpConfig, rng: np.random.Generator,
                  distribution: str = UNIFORM, noise: str = "all",
                  dt: float | None = None) -> ReservoirParams:
    """Draw every energy, coupling and noise rate as ``eta * scale`` with independent ``eta``.

    Draw order is fixed (energies, couplings, decay, dephasing,
    depolarizing) so a given stream always yields the same network, and
    ``noise='decay'`` only zeroes the extra channels after drawing them.
    """
    if node_count < 1:
        raise ValueError("node_count must be positive")
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    graph = CouplingGraph(node_count)
    sizes = (node_count, len(graph.edges), node_count, node_count, node_count)

    def draw(k):
        if distribution == UNIFORM:
            return rng.uniform(0.0, 1.0, k) * scale
        if distribution in (HALF_NORMAL, "halfnormal"):
            return np.abs(rng.standard_normal(k)) * scale
        raise ValueError(f"unknown distribution {distribution!r}")

    energies, couplings, decay, dephasing, depolarizing = (draw(k) for k in sizes)
    if dt is None:
        dt = 0.01 / max(scale, pump.strength, 1e-300) if max(scale, pump.strength) > 0 else 0.01
    params = ReservoirParams(node_count, energies, couplings, decay, dephasing, depolarizing,
                             float(scale), pump, float(dt), distribution, graph)
    return params.with_noise(noise)


@lru_cache(maxsize=None)
def lowering_operators(node_count: int) -> tuple[np.ndarray, ...]:
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])
    eye = np.eye(2)
    ops = []
    for j in range(node_count):
        factors = [sm if k == j else eye for k in range(node_count)]
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        op.setflags(write=False)
        ops.append(op)
    return tuple(ops)


def build_hamiltonian(params: ReservoirParams) -> np.ndarray:
    lower = lowering_operators(params.node_count)
    dim = 2 ** params.node_count
    h = np.zeros((dim, dim), dtype=complex)
    for j, a in enumerate(lower):
        h += params.energies[j] * (a.T @ a)
    for (j, k), kap in zip(params.graph.edges, params.couplings):
        hop = lower[j].T @ lower[k]
        h += kap * (hop + hop.T)
    for j, pc in enumerate(params.pump.coherent_amplitudes):
        if pc != 0:
            h += pc * lower[j].T + np.conj(pc) * lower[j]
    return hermitize(h)


def _check_dim(rho: np.ndarray, params: ReservoirParams) -> None:
    if rho.shape != (2 ** params.node_count,) * 2:
        raise ValueError(f"state of shape {rho.shape} does not fit {params.node_count} nodes")


def lindblad_generator(rho, params: ReservoirParams) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    _check_dim(rho, params)
    h = params.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for rate, op, opdop in params._dissipators:
        out += rate * (op @ rho @ op.conj().T - 0.5 * (opdop @ rho + rho @ opdop))
    return out


@lru_cache(maxsize=None)
def _bit_tables(node_count: int):
    idx = np.arange(2 ** node_count)
    bits = [(idx >> (node_count - 1 - j)) & 1 for j in range(node_count)]
    z = [1 - 2 * b for b in bits]  # sigma_z eigenvalue: +1 on |0>, -1 on |1>
    zz = [np.outer(s, s) for s in z]
    flip = [idx ^ (1 << (node_count - 1 - j)) for j in range(node_count)]
    return zz, flip


def _channel_dt(params: ReservoirParams, dt: float | None) -> float:
    return params.dt if dt is None else float(dt)


def apply_dephasing(rho, params: ReservoirParams, dt: float | None = None) -> np.ndarray:
    """Per-node channel ``(1-p) rho + p Z rho Z`` with ``p = rate*dt/2``, node 1 first."""
    rho = np.asarray(rho, dtype=complex)
    _check_dim(rho, params)
    dt = _channel_dt(params, dt)
    zz, _ = _bit_tables(params.node_count)
    for j, rate in enumerate(params.dephasing):
        p = rate * dt / 2
        if p == 0:
            continue
        if not 0 <= p <= 1:
            raise ValueError(f"dephasing coefficient {p} outside [0, 1]")
        rho = (1 - p) * rho + p * (zz[j] * rho)
    return rho


def apply_depolarizing(rho, params: ReservoirParams, dt: float | None = None) -> np.ndarray:
    """Per-node channel ``(1-q) rho + q/3 (X rho X + Y rho Y + Z rho Z)`` with ``q = rate*dt``."""
    rho = np.asarray(rho, dtype=complex)
    _check_dim(rho, params)
    dt = _channel_dt(params, dt)
    zz, flip = _bit_tables(params.node_count)
    for j, rate in enumerate(params.depolarizing):
        q = rate * dt
        if q == 0:
            continue
        if not 0 <= q <= 0.75:
            raise ValueError(f"depolarizing coefficient {q} outside [0, 3/4]")
        f = flip[j]
        x_side = rho[np.ix_(f, f)]
        # Y = i X Z, so Y rho Y = X (Z rho Z) X
        pauli_sum = x_side + zz[j] * x_side + zz[j] * rho
        rho = (1 - q) * rho + (q / 3) * pauli_sum
    return rho


def step(rho, params: ReservoirParams, dt: float | None = None) -> np.ndarray:
    """One coarse-grained step: depolarize(dephase(rho + dt * L[rho]))."""
    rho = np.asarray(rho, dtype=complex)
    dt = _channel_dt(params, dt)
    if dt * params.fastest_scale > STEP_LIMIT + 1e-12:
        raise ValueError(f"dt={dt} too large for rates up to {params.fastest_scale}")
    out = rho + dt * lindblad_generator(rho, params)
    out = apply_dephasing(out, params, dt)
    out = apply_depolarizing(out, params, dt)
    return hermitize(out)


def ground_state(node_count: int) -> np.ndarray:
    rho = np.zeros((2 ** node_count,) * 2, dtype=complex)
    rho[0, 0] = 1.0
    return rho


def evolve(rho0, params: ReservoirParams, tau: float) -> DensityMatrix:
    """Repeat :func:`step` up to time ``tau``; the last step is shortened to land on ``tau``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    rho = np.array(rho0, dtype=complex)
    n_full = int(math.floor(tau / params.dt + 1e-9))
    for _ in range(n_full):
        rho = step(rho, params)
    rest = tau - n_full * params.dt
    if rest > 1e-12 * max(1.0, tau):
        rho = step(rho, params, rest)
    # The Euler increment leaks O(dt * tau * |H|^2) weight onto negative
    # eigenvalues under strong coherent drive, so positivity is not enforced.
    return DensityMatrix(rho, enumerate_basis(params.node_count, FERMIONIC), tol=1e-8,
                         psd_tol=math.inf)


def _linear_step_matrix(params: ReservoirParams) -> np.ndarray:
    # Build from Hermitian basis elements so the hermitizing step stays exact.
    d = 2 ** params.node_count
    n = d * d
    herm_basis = np.zeros((n, d, d), dtype=complex)
    k = 0
    for i in range(d):
        herm_basis[k, i, i] = 1.0
        k += 1
    for i in range(d):
        for j in range(i + 1, d):
            herm_basis[k, i, j] = herm_basis[k, j, i] = 1.0
            k += 1
            herm_basis[k, i, j], herm_basis[k, j, i] = -1j, 1j
            k += 1
    images = np.stack([np.asarray(step(b, params)).ravel() for b in herm_basis], axis=1)
    coords = herm_basis.reshape(n, n).T  # columns: flattened Hermitian basis elements
    return images @ np.linalg.inv(coords)


def steady_state(params: ReservoirParams, rho0=None, tol: float = STEADY_TOL,
                 t_max: float | None = None, method: str = "doubling") -> DensityMatrix:
    """Fixed point of :func:`step`, reached when one more step moves the state by < ``tol``.

    ``method='iterate'`` applies the step one at a time. ``'doubling'``
    squares the one-step map so that after k squarings the state has been
    advanced by exactly 2**k steps; the stopping rule is the same.
    """
    positive = params.rates[params.rates > 0]
    if positive.size == 0:
        raise ValueError("steady state needs at least one nonzero dissipative rate")
    if t_max is None:
        t_max = STEADY_TIME_FACTOR / positive.min()
    max_steps = int(math.ceil(t_max / params.dt))
    rho = ground_state(params.node_count) if rho0 is None else np.array(rho0, dtype=complex)
    basis = enumerate_basis(params.node_count, FERMIONIC)

    if method == "iterate":
        for _ in range(max_steps):
            nxt = step(rho, params)
            if trace_norm(nxt - rho) < tol:
                return DensityMatrix(nxt, basis, tol=1e-8)
            rho = nxt
        raise ConvergenceError(f"no steady state within t_max={t_max:.4g}")
    if method != "doubling":
        raise ValueError(f"unknown method {method!r}")

    t = _linear_step_matrix(params)
    power = t.copy()
    taken = 1
    vec = t @ rho.ravel()
    while True:
        cur = hermitize(vec.reshape(rho.shape))
        nxt = step(cur, params)
        if trace_norm(nxt - cur) < tol:
            cur = nxt / np.trace(nxt).real
            return DensityMatrix(cur, basis, tol=1e-8)
        if taken >= max_steps:
            raise ConvergenceError(f"no steady state within t_max={t_max:.4g}")
        vec = power @ vec
        taken *= 2
        power = power @ power
