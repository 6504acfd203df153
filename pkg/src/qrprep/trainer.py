"""Hybrid random-then-genetic search over mixing angles.

The rough stage keeps the best of ``random_steps`` independent draws. The
smooth stage perturbs the current angles ``S`` times by ``delta * theta_i``
and moves to the mean of the two best perturbations. The best individual
ever evaluated is kept and returned, so the best-so-far curve never drops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mixing import random_angles

Sampler = Callable[[np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class TrainerConfig:
    random_steps: int = 500
    genetic_steps: int = 500
    population: int = 10
    mutation: float = 0.01
    plateau_window: int = 50
    plateau_threshold: float = 1e-6
    penalty: float = 1e3

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if self.mutation < 0:
            raise ValueError("mutation strength must be nonnegative")
        if self.random_steps < 1 or self.genetic_steps < 0 or self.plateau_window < 1:
            raise ValueError("step counts must be positive")


@dataclass
class TrainHistory:
    best: list[float] = field(default_factory=list)  # best-so-far after every evaluation step
    current: list[float] = field(default_factory=list)  # value of the averaged chain per genetic step
    best_angles: np.ndarray | None = None
    best_value: float = -math.inf
    random_steps: int = 0
    genetic_steps: int = 0

    def __len__(self):
        return len(self.best)


def angle_sampler(mode_count: int) -> Sampler:
    return lambda rng: random_angles(mode_count, rng).values


def _as_sampler(space) -> Sampler:
    return angle_sampler(space) if isinstance(space, (int, np.integer)) else space


def random_search(objective, steps: int, space, rng: np.random.Generator,
                  history: TrainHistory | None = None):
    """Best of ``steps`` random draws; ``space`` is a mode count or a sampler."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    sampler = _as_sampler(space)
    best_x, best_v = None, -math.inf
    for _ in range(steps):
        x = sampler(rng)
        v = float(objective(x))
        if v > best_v:
            best_x, best_v = x, v
        if history is not None:
            history.best.append(best_v)
    return best_x, best_v


def genetic_step(current: np.ndarray, objective, population: int, mutation: float,
                 rng: np.random.Generator):
    """One mutation/selection round.

    Returns ``(new_angles, new_value, individuals, values)`` where the last
    two are the perturbed population, for elitist bookkeeping.
    """
    if population < 2:
        raise ValueError("population must be at least 2")
    current = np.asarray(current, dtype=float)
    thetas = rng.uniform(-math.pi, math.pi, (population, current.size))
    individuals = current + mutation * thetas
    values = np.array([float(objective(x)) for x in individuals])
    # stable sort on -value: ties resolved towards the lower index
    v, w = np.argsort(-values, kind="stable")[:2]
    new = current + mutation * 0.5 * (thetas[v] + thetas[w])
    return new, float(objective(new)), individuals, values


def train(objective, space, config: TrainerConfig, rng: np.random.Generator) -> TrainHistory:
    """Random search followed by elitist genetic refinement.

    Stops after ``config.genetic_steps`` rounds or once the best value has
    improved by less than ``plateau_threshold`` over ``plateau_window``
    rounds (a threshold of 0 disables the plateau test).
    """
    hist = TrainHistory()
    x, v = random_search(objective, config.random_steps, space, rng, hist)
    hist.random_steps = config.random_steps
    best_x, best_v = x, v
    for step in range(config.genetic_steps):
        x, v, pop, vals = genetic_step(x, objective, config.population, config.mutation, rng)
        k = int(np.argmax(vals))
        for cand, cv in ((pop[k], vals[k]), (x, v)):
            if cv > best_v:
                best_x, best_v = cand.copy(), float(cv)
        hist.best.append(best_v)
        hist.current.append(v)
        hist.genetic_steps = step + 1
        w = config.plateau_window
        if config.plateau_threshold > 0 and step + 1 >= w:
            before = hist.best[-w - 1]
            if best_v - before < config.plateau_threshold:
                break
    hist.best_angles = None if best_x is None else np.array(best_x)
    hist.best_value = best_v
    return hist
