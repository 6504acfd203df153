"""Figure-level experiment drivers.

Each (gamma_over_p, realization) pair is an independent task with its own
random streams, so results do not depend on ``jobs`` or on task order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from ..mixing import MixingAngles, block_diagonal, random_angles, unitary_from_angles
from ..objective import (DISCORD, DISCORD_NO_ENTANGLEMENT, FIDELITY, NEGATIVITY, Objective)
from ..qcore import BOSONIC, enumerate_basis
from ..reservoir import ConvergenceError, evolve, ground_state, sample_params, steady_state
from ..trainer import train
from .catalog import (CATALOG, CONCENTRATION, DISCORD_HISTOGRAM, NEGATIVITY_SWEEP, STATE_PREPARATION,
                      STEADY, ExperimentSpec, Pipeline)
from .records import NONCONVERGED, OK, POSTSELECTION_FAILED, RunRecord, sort_records
from .streams import realization_streams
from .targets import target_state


def reservoir_state(pipe: Pipeline, gamma_over_p: float, noise: str, distribution: str,
                    rng: np.random.Generator) -> np.ndarray:
    """Sample a network (P = 1, Gamma = gamma_over_p) and evolve it per the pipeline's protocol."""
    params = sample_params(pipe.nodes, gamma_over_p, pipe.pump_config(1.0), rng, distribution, noise)
    if pipe.duration == STEADY:
        return steady_state(params).data
    return evolve(ground_state(pipe.nodes), params, float(pipe.duration)).data


def _record(name, k, g, seed, t0, value, prob, steps, status=OK, **extras):
    return RunRecord(name, k, g, float(value), float(prob), int(steps), seed,
                     time.perf_counter() - t0, status, extras)


def _failed(name, k, g, seed, t0, err):
    return _record(name, k, g, seed, t0, math.nan, math.nan, 0, NONCONVERGED, error=str(err))


def _train_and_report(obj, rho, space, spec, trainer_rng):
    bound = obj.bind(rho)
    hist = train(bound, space, spec.trainer, trainer_rng)
    return bound, hist, bound.evaluate(hist.best_angles, exact=True)


def _state_task(spec: ExperimentSpec, g: float, k: int, pipeline: str | None = None,
                kind: str = FIDELITY) -> RunRecord:
    name = pipeline or spec.experiment
    pipe = CATALOG[name]
    label = spec.experiment if pipeline is None else f"{spec.experiment}:{pipeline}"
    params_rng, trainer_rng, seed = realization_streams(spec.seed, label, k)
    t0 = time.perf_counter()
    try:
        rho = reservoir_state(pipe, g, spec.noise, spec.distribution, params_rng)
    except ConvergenceError as err:
        return _failed(label, k, g, seed, t0, err)
    target = target_state(*pipe.target) if kind == FIDELITY else None
    obj = Objective(kind, pipe.statistics, pipe.principal, pipe.measured, (), target,
                    free_phases=pipe.free_phases)
    _, hist, ev = _train_and_report(obj, rho, pipe.nodes, spec, trainer_rng)
    status = OK if ev.state is not None else POSTSELECTION_FAILED
    return _record(label, k, g, seed, t0, ev.value, ev.probability, hist.genetic_steps, status,
                   best_angles=hist.best_angles)


def _discord_task(spec: ExperimentSpec, g: float, k: int) -> RunRecord:
    pipe = spec.pipeline
    params_rng, trainer_rng, seed = realization_streams(spec.seed, spec.experiment, k)
    t0 = time.perf_counter()
    try:
        rho = reservoir_state(pipe, g, spec.noise, spec.distribution, params_rng)
    except ConvergenceError as err:
        return _failed(spec.experiment, k, g, seed, t0, err)
    kind = DISCORD_NO_ENTANGLEMENT if spec.constrained else DISCORD
    obj = Objective(kind, pipe.statistics, pipe.principal, penalty=spec.trainer.penalty)
    _, hist, ev = _train_and_report(obj, rho, pipe.nodes, spec, trainer_rng)
    return _record(spec.experiment, k, g, seed, t0, ev.discord, ev.probability, hist.genetic_steps,
                   negativity=ev.negativity, feasible=bool(ev.feasible), constrained=spec.constrained)


def two_copies(rho_pair: np.ndarray, pair_basis) -> tuple[np.ndarray, object]:
    """``rho (x) rho`` on four modes ordered (A1, A2, B1, B2).

    Copy ``c`` contributes its first mode as ``A_c`` and its second as ``B_c``.
    """
    basis = enumerate_basis(4, BOSONIC, 2 * pair_basis.max_total)
    idx = np.array([basis.index((s[0], t[0], s[1], t[1]))
                    for s in pair_basis.states for t in pair_basis.states])
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    out[np.ix_(idx, idx)] = np.kron(rho_pair, rho_pair)
    return out, basis


def local_mixer(values) -> np.ndarray:
    """``M_A (+) M_B`` acting on (A1, A2) and (B1, B2)."""
    values = np.asarray(values, dtype=float)
    return block_diagonal(unitary_from_angles(MixingAngles(2, values[:4])),
                          unitary_from_angles(MixingAngles(2, values[4:])))


def _local_sampler(rng):
    return np.concatenate([random_angles(2, rng).values, random_angles(2, rng).values])


def _concentration_task(spec: ExperimentSpec, g: float, k: int) -> RunRecord:
    pipe = spec.pipeline
    params_rng, trainer_rng, seed = realization_streams(spec.seed, spec.experiment, k)
    t0 = time.perf_counter()
    try:
        rho = reservoir_state(pipe, g, spec.noise, spec.distribution, params_rng)
    except ConvergenceError as err:
        return _failed(spec.experiment, k, g, seed, t0, err)
    pair_obj = Objective(NEGATIVITY, BOSONIC, (0, 1))
    pair, pair_hist, pair_ev = _train_and_report(pair_obj, rho, 2, spec, trainer_rng)
    rho4, basis4 = two_copies(pair_ev.state, pair_ev.basis)
    conc = Objective(NEGATIVITY, BOSONIC, (0, 2), (1, 3)).bind(rho4, basis4, mixer=local_mixer)
    hist = train(conc, _local_sampler, spec.trainer, trainer_rng)
    ev = conc.evaluate(hist.best_angles)
    status = OK if ev.state is not None else POSTSELECTION_FAILED
    return _record(spec.experiment, k, g, seed, t0, ev.value, ev.probability, hist.genetic_steps,
                   status, input_negativity=pair_ev.value, pair_steps=pair_hist.genetic_steps)


def _tasks(spec: ExperimentSpec):
    fam = spec.pipeline.family
    if fam == STATE_PREPARATION:
        return [partial(_state_task, spec, g, k) for g in spec.gamma_over_p for k in range(spec.realizations)]
    if fam == DISCORD_HISTOGRAM:
        return [partial(_discord_task, spec, g, k) for g in spec.gamma_over_p for k in range(spec.realizations)]
    if fam == CONCENTRATION:
        return [partial(_concentration_task, spec, g, k)
                for g in spec.gamma_over_p for k in range(spec.realizations)]
    if fam == NEGATIVITY_SWEEP:
        return [partial(_state_task, spec, g, k, name, NEGATIVITY)
                for name in spec.sweep for g in spec.gamma_over_p for k in range(spec.realizations)]
    raise ValueError(f"no driver for family {fam!r}")


def _call(task):
    return task()


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> list[RunRecord]:
    """All records of ``spec``, ordered by (experiment label, gamma_over_p, realization)."""
    tasks = _tasks(spec)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_call, tasks))
    else:
        records = [t() for t in tasks]
    labels = {}
    for r in records:
        labels.setdefault(r.experiment, []).append(r)
    return [r for lab in labels for r in sort_records(labels[lab])]


def _require(spec: ExperimentSpec, family: str):
    if spec.pipeline.family != family:
        raise ValueError(f"{spec.experiment} is not a {family} experiment")


def run_state_preparation(spec: ExperimentSpec, jobs: int = 1) -> list[RunRecord]:
    _require(spec, STATE_PREPARATION)
    return run_experiment(spec, jobs)


def run_discord_histogram(spec: ExperimentSpec, jobs: int = 1) -> list[RunRecord]:
    _require(spec, DISCORD_HISTOGRAM)
    return run_experiment(spec, jobs)


def run_concentration(spec: ExperimentSpec, jobs: int = 1) -> list[RunRecord]:
    _require(spec, CONCENTRATION)
    return run_experiment(spec, jobs)


def run_negativity_sweep(spec: ExperimentSpec, jobs: int = 1) -> list[RunRecord]:
    _require(spec, NEGATIVITY_SWEEP)
    return run_experiment(spec, jobs)
