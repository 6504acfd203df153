"""scikit-learn style front end.

:class:`ReservoirEmitter` samples a network and produces its emitted
state; :class:`MixingOptimizer` learns mixing angles for a given input
state (``fit``), then maps states through the learned mixer
(``transform``) and scores them (``score``).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .mixing import MixingAngles, unitary_from_angles
from .objective import FIDELITY, Objective
from .qcore import FERMIONIC, PureState
from .reservoir import PumpConfig, evolve, ground_state, sample_params, steady_state
from .trainer import TrainerConfig, train
from .validation import check_angles, check_positive, check_reservoir_state


def _generator(random_state) -> np.random.Generator:
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(check_random_state(random_state).randint(0, 2 ** 32 - 1))


class ReservoirEmitter(BaseEstimator):
    """Random driven network; ``duration=None`` means the steady state.

    ``pump`` is ``'incoherent'`` (all nodes at rate 1, or only ``pumped``),
    or ``'coherent'`` (amplitude ``i/2`` on every node).
    """

    def __init__(self, node_count=2, gamma_over_p=0.01, pump="incoherent", pumped=None,
                 duration=None, noise="decay", distribution="uniform", random_state=None):
        self.node_count = node_count
        self.gamma_over_p = gamma_over_p
        self.pump = pump
        self.pumped = pumped
        self.duration = duration
        self.noise = noise
        self.distribution = distribution
        self.random_state = random_state

    def _pump(self) -> PumpConfig:
        if self.pump == "incoherent":
            return PumpConfig.incoherent(self.node_count, 1.0, self.pumped)
        if self.pump == "coherent":
            return PumpConfig.coherent(self.node_count, 0.5j, self.pumped, strength=1.0)
        raise ValueError(f"unknown pump {self.pump!r}")

    def fit(self, X=None, y=None):
        check_positive("gamma_over_p", self.gamma_over_p)
        self.params_ = sample_params(int(self.node_count), float(self.gamma_over_p), self._pump(),
                                     _generator(self.random_state), self.distribution, self.noise)
        if self.duration is None:
            self.state_ = steady_state(self.params_).data
        else:
            tau = check_positive("duration", self.duration, allow_zero=True)
            self.state_ = evolve(ground_state(self.node_count), self.params_, tau).data
        return self

    def transform(self, X=None):
        """The emitted state (``X`` is ignored)."""
        check_is_fitted(self, "state_")
        return self.state_.copy()

    def fit_transform(self, X=None, y=None):
        return self.fit(X, y).transform()


class MixingOptimizer(BaseEstimator):
    """Train a linear mixer on one reservoir state.

    ``fit(rho)`` runs the random-then-genetic search on ``rho``;
    afterwards ``angles_``, ``unitary_``, ``history_`` and ``best_score_``
    are set. ``transform(rho)`` returns the conditional principal state
    and ``score(rho)`` the objective value for any state of the same size.
    """

    def __init__(self, objective=FIDELITY, target=None, statistics=FERMIONIC, principal=None,
                 measured=(), traced=(), free_phases=False, random_steps=500, genetic_steps=500,
                 population=10, mutation=0.01, random_state=None):
        self.objective = objective
        self.target = target
        self.statistics = statistics
        self.principal = principal
        self.measured = measured
        self.traced = traced
        self.free_phases = free_phases
        self.random_steps = random_steps
        self.genetic_steps = genetic_steps
        self.population = population
        self.mutation = mutation
        self.random_state = random_state

    def _objective(self, n: int) -> Objective:
        measured, traced = tuple(self.measured), tuple(self.traced)
        principal = self.principal
        if principal is None:
            principal = tuple(k for k in range(n) if k not in measured + traced)
        target = self.target
        if target is not None and not isinstance(target, PureState):
            target = PureState(target)
        return Objective(self.objective, self.statistics, tuple(principal), measured, traced,
                         target, free_phases=self.free_phases)

    def fit(self, X, y=None):
        rho, n = check_reservoir_state(X)
        cfg = TrainerConfig(self.random_steps, self.genetic_steps, self.population, self.mutation)
        obj = self._objective(n)
        if obj.mode_count != n:
            raise ValueError(f"mode partition covers {obj.mode_count} modes, state has {n}")
        bound = obj.bind(rho)
        self.history_ = train(bound, n, cfg, _generator(self.random_state))
        self.n_modes_ = n
        self.angles_ = self.history_.best_angles
        self.unitary_ = unitary_from_angles(MixingAngles(n, self.angles_))
        self.best_score_ = self.history_.best_value
        self.objective_ = obj
        return self

    def _bound(self, X):
        check_is_fitted(self, "angles_")
        rho, n = check_reservoir_state(X)
        if n != self.n_modes_:
            raise ValueError(f"fitted on {self.n_modes_} modes, got a {n}-node state")
        return self.objective_.bind(rho)

    def transform(self, X):
        rho, _, _ = self._bound(X).principal_state(check_angles(self.angles_, self.n_modes_))
        return rho

    def score(self, X, y=None) -> float:
        return float(self._bound(X).evaluate(self.angles_, exact=True).value)

    def postselection_probability(self, X) -> float:
        return float(self._bound(X).principal_state(self.angles_)[2])
