"""Quantum-reservoir resource-state preparation with a trained linear-mixing layer."""

from .estimators import MixingOptimizer, ReservoirEmitter
from .metrics import discord, fidelity, negativity
from .mixing import MixingAngles, apply_mixing, fock_transform, postselect_vacuum, unitary_from_angles
from .objective import Objective
from .qcore import BOSONIC, FERMIONIC, DensityMatrix, FockBasis, PureState, enumerate_basis
from .reservoir import PumpConfig, ReservoirParams, evolve, sample_params, steady_state
from .trainer import TrainerConfig, train

__version__ = "0.1.0"

__all__ = ["BOSONIC", "FERMIONIC", "DensityMatrix", "FockBasis", "MixingAngles", "MixingOptimizer", "Objective",
           "PumpConfig", "PureState", "ReservoirEmitter", "ReservoirParams", "TrainerConfig", "apply_mixing", "discord",
           "enumerate_basis", "evolve", "fidelity", "fock_transform", "negativity",
           "postselect_vacuum", "sample_params", "steady_state", "train", "unitary_from_angles"]
