"""Experiment identifiers and their fixed pipeline settings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..qcore import BOSONIC, FERMIONIC
from ..reservoir import HALF_NORMAL, UNIFORM, PumpConfig
from ..trainer import TrainerConfig

STATE_PREPARATION = "state_preparation"
DISCORD_HISTOGRAM = "discord_histogram"
CONCENTRATION = "concentration"
NEGATIVITY_SWEEP = "negativity_sweep"

STEADY = "steady"
NOISE_MODES = {"decay": "decay", "decay_only": "decay", "all": "all", "all_noise": "all"}
DISTRIBUTIONS = {UNIFORM: UNIFORM, "halfnormal": HALF_NORMAL, HALF_NORMAL: HALF_NORMAL}
DEFAULT_GRID = tuple(float(x) for x in np.logspace(-2, 0, 7))


@dataclass(frozen=True)
class Pipeline:
    """Reservoir, mixing and readout layout of one experiment."""

    family: str
    nodes: int
    statistics: str
    pump: str  # 'all', 'first', 'coherent'
    duration: object  # STEADY or a time in units of 1/P
    target: tuple[str, int] | None = None
    measured: tuple[int, ...] = ()
    figure: str = ""
    realizations: int = 10
    free_phases: bool = False

    @property
    def principal(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.nodes) if k not in self.measured)

    def pump_config(self, strength: float = 1.0) -> PumpConfig:
        if self.pump == "all":
            return PumpConfig.incoherent(self.nodes, strength)
        if self.pump == "first":
            return PumpConfig.incoherent(self.nodes, strength, [0])
        if self.pump == "coherent":
            return PumpConfig.coherent(self.nodes, 0.5j * strength, strength=strength)
        raise ValueError(f"unknown pump protocol {self.pump!r}")


def _me(d):
    return Pipeline(STATE_PREPARATION, d - 1, BOSONIC, "all", STEADY, ("me", d),
                    tuple(range(2, d - 1)), "Fig. 2", 10, free_phases=True)


def _noon(n):
    return Pipeline(STATE_PREPARATION, n, BOSONIC, "all", STEADY, ("noon", n),
                    tuple(range(2, n)), "Fig. 3", 10)


def _qubits(kind, n, pump, duration, figure):
    return Pipeline(STATE_PREPARATION, n, FERMIONIC, pump, duration, (kind, n), (), figure, 20)


CATALOG: dict[str, Pipeline] = {
    "me3": _me(3), "me4": _me(4), "me5": _me(5),
    "noon2": _noon(2), "noon3": _noon(3), "noon4": _noon(4),
    "w2": _qubits("w", 2, "first", STEADY, "Fig. 4"),
    "w3": _qubits("w", 3, "first", STEADY, "Fig. 4"),
    "w4": _qubits("w", 4, "first", STEADY, "Fig. 4"),
    "cl2": _qubits("cl", 2, "coherent", math.pi / 2, "Fig. 5"),
    "cl3": _qubits("cl", 3, "coherent", math.pi / 2, "Fig. 5"),
    "cl4": _qubits("cl", 4, "coherent", math.pi / 2, "Fig. 5"),
    "ghz3": _qubits("ghz", 3, "coherent", math.pi / 2, "Fig. 5 (GHZ remark)"),
    "discord_hist": Pipeline(DISCORD_HISTOGRAM, 2, FERMIONIC, "all", math.pi, None, (),
                             "Fig. 6", 200),
    "concentrate1": Pipeline(CONCENTRATION, 2, BOSONIC, "first", STEADY, None, (), "Fig. 8a", 10),
    "concentrate2": Pipeline(CONCENTRATION, 2, BOSONIC, "all", STEADY, None, (), "Fig. 8b", 10),
    "negativity_sweep": Pipeline(NEGATIVITY_SWEEP, 0, BOSONIC, "all", STEADY, None, (), "Fig. 9", 10),
}

SWEEP_PIPELINES = ("me3", "me4", "me5")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one batch of records.

    ``constrained`` selects the no-entanglement discord objective and is
    ignored elsewhere. ``sweep`` picks the maximally entangled pipeline(s)
    used by ``negativity_sweep``.
    """

    experiment: str
    gamma_over_p: tuple[float, ...] = DEFAULT_GRID
    noise: str = "decay"
    realizations: int | None = None
    seed: int = 0
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    distribution: str = UNIFORM
    constrained: bool = False
    sweep: tuple[str, ...] = SWEEP_PIPELINES

    def __post_init__(self):
        if self.experiment not in CATALOG:
            raise ValueError(f"unknown experiment {self.experiment!r}; see `qrprep list`")
        g = tuple(float(x) for x in np.atleast_1d(self.gamma_over_p))
        if not g or any(not (x > 0 and math.isfinite(x)) for x in g):
            raise ValueError("gamma_over_p values must be positive and finite")
        object.__setattr__(self, "gamma_over_p", g)
        if self.noise not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.noise!r}")
        object.__setattr__(self, "noise", NOISE_MODES[self.noise])
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        object.__setattr__(self, "distribution", DISTRIBUTIONS[self.distribution])
        if self.realizations is None:
            object.__setattr__(self, "realizations", CATALOG[self.experiment].realizations)
        if int(self.realizations) < 1:
            raise ValueError("realizations must be at least 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        bad = [s for s in self.sweep if s not in SWEEP_PIPELINES]
        if bad:
            raise ValueError(f"negativity sweep pipelines must be among {SWEEP_PIPELINES}, got {bad}")
        object.__setattr__(self, "sweep", tuple(self.sweep))

    @property
    def pipeline(self) -> Pipeline:
        return CATALOG[self.experiment]

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "gamma_over_p": list(self.gamma_over_p),
            "noise": self.noise,
            "realizations": int(self.realizations),
            "seed": int(self.seed),
            "trainer": {k: getattr(self.trainer, k) for k in self.trainer.__dataclass_fields__},
            "distribution": self.distribution,
            "constrained": self.constrained,
            "sweep": list(self.sweep),
        }
