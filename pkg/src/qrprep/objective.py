"""Scalar figures of merit of the mixed output, as functions of the mixing angles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .metrics import discord, negativity
from .mixing import (MixingAngles, PostSelection, fock_transform, postselect_array,
                     reservoir_transform, to_product_space, trace_out_modes, unitary_from_angles)
from .qcore import BOSONIC, FockBasis, PureState, enumerate_basis, hermitize

FIDELITY = "fidelity_to_target"
NEGATIVITY = "negativity"
DISCORD = "discord"
DISCORD_NO_ENTANGLEMENT = "discord_no_entanglement"
KINDS = (FIDELITY, NEGATIVITY, DISCORD, DISCORD_NO_ENTANGLEMENT)

TRAIN_DISCORD_GRID = (8, 16)


@dataclass
class Evaluation:
    value: float
    probability: float
    state: np.ndarray | None
    basis: FockBasis | None
    fidelity: float | None = None
    negativity: float | None = None
    discord: float | None = None
    feasible: bool = True


@dataclass(frozen=True, eq=False)
class Objective:
    """What to maximise on the principal output modes.

    ``measured`` modes are post-selected on vacuum, ``traced`` modes are
    discarded; the remaining ``principal`` modes carry the figure of merit.
    With ``free_phases`` the fidelity is taken against the best member of
    the family ``sum_k a_k exp(i phi_k) |k>`` over the target's support,
    which is how maximally entangled states are defined.
    For ``discord_no_entanglement`` the value is ``D - penalty * E`` while
    ``E <= entanglement_tol`` and ``-penalty * E`` otherwise, so any
    feasible candidate outranks every infeasible one.
    """

    kind: str
    statistics: str
    principal: tuple[int, ...]
    measured: tuple[int, ...] = ()
    traced: tuple[int, ...] = ()
    target: PureState | None = None
    penalty: float = 1e3
    entanglement_tol: float = 1e-6
    discord_grid: tuple[int, int] = TRAIN_DISCORD_GRID
    free_phases: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.kind == FIDELITY and self.target is None:
            raise ValueError("a fidelity objective needs a target state")
        for name in ("principal", "measured", "traced"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def mode_count(self) -> int:
        return len(self.principal) + len(self.measured) + len(self.traced)

    def bind(self, rho_in, basis: FockBasis | None = None,
             mixer: Callable[[np.ndarray], np.ndarray] | None = None) -> "BoundObjective":
        """Fix the input state.

        Without ``basis`` the input is a reservoir state on 0/1 occupations;
        with it, ``rho_in`` is already expressed on that output-mode basis.
        ``mixer`` maps a flat parameter vector to the mode unitary.
        """
        return BoundObjective(self, np.asarray(rho_in, dtype=complex), basis, mixer)


class BoundObjective:
    def __init__(self, objective: Objective, rho_in: np.ndarray, basis: FockBasis | None, mixer):
        self.objective = objective
        self.rho_in = rho_in
        self.input_basis = basis
        n = objective.mode_count
        self.mixer = mixer or (lambda values: unitary_from_angles(MixingAngles(n, values)))
        self.selection = PostSelection(objective.principal + objective.traced, objective.measured)
        self.n_evals = 0
        self._target_cache = {}

    def output_state(self, values) -> tuple[np.ndarray, FockBasis]:
        m = self.mixer(np.asarray(values, dtype=float))
        if self.input_basis is None:
            r, basis = reservoir_transform(m, self.objective.statistics)
        else:
            basis = self.input_basis
            r = fock_transform(m, basis)
        return r.conj().T @ self.rho_in @ r, basis

    def principal_state(self, values):
        """Post-selected, reduced principal state, its basis, and the success probability."""
        obj = self.objective
        rho, basis = self.output_state(values)
        prob = 1.0
        if obj.measured:
            self.selection.check(basis.mode_count)
            rho, prob = postselect_array(rho, basis, self.selection)
            if rho is None:
                return None, None, prob
            basis = _reduced_basis(basis, len(self.selection.principal))
        if obj.traced:
            keep = tuple(range(len(obj.principal)))
            rho, basis = trace_out_modes(rho, basis, keep)
        return hermitize(rho), basis, prob

    def evaluate(self, values, exact: bool = False) -> Evaluation:
        """Full evaluation.

        ``exact`` switches to the fine discord search used for reporting
        and also fills in the negativity of discord objectives.
        """
        obj = self.objective
        self.n_evals += 1
        rho, basis, prob = self.principal_state(values)
        if rho is None:
            return Evaluation(0.0 if obj.kind != DISCORD_NO_ENTANGLEMENT else -obj.penalty,
                              prob, None, None, feasible=False)
        ev = Evaluation(math.nan, prob, rho, basis)
        if obj.kind == FIDELITY:
            amps = self._target_on(basis)
            if obj.free_phases:
                ev.fidelity = phase_free_fidelity(rho, amps)
            else:
                ev.fidelity = float(np.clip(np.real(np.vdot(amps, rho @ amps)), 0.0, 1.0))
            ev.value = ev.fidelity
            return ev
        prod, dims = to_product_space(rho, basis)
        split = (int(np.prod(dims[:1])), int(np.prod(dims[1:])))
        if obj.kind == NEGATIVITY:
            ev.negativity = negativity(prod, split)
            ev.value = ev.negativity
            return ev
        grid = (64, 128) if exact else obj.discord_grid
        ev.discord = discord(prod, split, 1, grid=grid, refine=True if exact else "zoom")
        if obj.kind == DISCORD:
            ev.value = ev.discord
            if exact:
                ev.negativity = negativity(prod, split)
            return ev
        ev.negativity = negativity(prod, split)
        ev.feasible = ev.negativity <= obj.entanglement_tol
        ev.value = ev.discord - obj.penalty * ev.negativity if ev.feasible else -obj.penalty * ev.negativity
        return ev

    def _target_on(self, basis: FockBasis) -> np.ndarray:
        """Target amplitudes re-indexed onto ``basis`` (e.g. a larger truncation)."""
        tgt = self.objective.target
        if tgt.basis is None or tgt.basis == basis:
            return tgt.amplitudes
        key = (basis.statistics, basis.states)
        if key not in self._target_cache:
            if tgt.basis.mode_count != basis.mode_count:
                raise ValueError("target and principal modes differ in number")
            v = np.zeros(basis.dim, dtype=complex)
            for occ, a in zip(tgt.basis.states, tgt.amplitudes):
                if a != 0:
                    if occ not in basis:
                        raise ValueError(f"target occupation {occ} is outside the output basis")
                    v[basis.index(occ)] = a
            self._target_cache[key] = v
        return self._target_cache[key]

    def __call__(self, values) -> float:
        return self.evaluate(values).value


def phase_free_fidelity(rho, amplitudes, sweeps: int = 50) -> float:
    """``max_phi <psi_phi|rho|psi_phi>`` with ``psi_phi = sum_k a_k e^{i phi_k} |k>``.

    Coordinate ascent on the phases: each phase is set to the argument of
    its coupling to the rest, which never lowers the value. Started from
    the phases of the leading eigenvector of the support block.
    """
    amps = np.asarray(amplitudes, dtype=complex)
    idx = np.flatnonzero(np.abs(amps) > 1e-14)
    a = np.abs(amps[idx])
    b = np.asarray(rho)[np.ix_(idx, idx)] * np.outer(a, a)  # <k|rho|l> |a_k a_l|
    z = np.linalg.eigh(hermitize(b))[1][:, -1]
    z = np.where(np.abs(z) > 1e-14, z / np.maximum(np.abs(z), 1e-300), 1.0)
    val = np.real(np.vdot(z, b @ z))
    for _ in range(sweeps):
        for k in range(len(idx)):
            c = b[k] @ z - b[k, k] * z[k]
            if abs(c) > 1e-15:
                z[k] = c / abs(c)
        new = np.real(np.vdot(z, b @ z))
        if new - val < 1e-13:
            val = max(val, new)
            break
        val = new
    return float(np.clip(val, 0.0, 1.0))


def _reduced_basis(basis: FockBasis, modes: int) -> FockBasis:
    if basis.statistics == BOSONIC:
        return enumerate_basis(modes, BOSONIC, basis.max_total)
    return enumerate_basis(modes, basis.statistics)
