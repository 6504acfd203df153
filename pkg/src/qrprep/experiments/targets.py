"""Ideal resource states used as fidelity targets."""

from __future__ import annotations

import math

import numpy as np

from ..qcore import BOSONIC, FERMIONIC, PureState, enumerate_basis, tensor_product

_ZERO = np.array([1.0, 0.0])
_ONE = np.array([0.0, 1.0])
_PLUS = (_ZERO + _ONE) / math.sqrt(2)
_MINUS = (_ZERO - _ONE) / math.sqrt(2)
_QUBIT = {"0": _ZERO, "1": _ONE, "+": _PLUS, "-": _MINUS}

# each entry: (amplitude, product label)
_CLUSTER = {
    2: [(1, "0-"), (1, "1+")],
    3: [(1, "+0+"), (1, "-1-")],
    4: [(1, "+0+0"), (1, "+0-1"), (1, "-1-0"), (1, "-1+1")],
}


def _product(label: str) -> np.ndarray:
    return tensor_product(*[_QUBIT[c] for c in label]).astype(complex)


def target_state(kind: str, n: int) -> PureState:
    """Target ket for ``kind`` in {'me', 'noon', 'w', 'cl', 'ghz'}.

    ``me`` and ``noon`` live on two bosonic modes (``me`` of local
    dimension ``n`` uses the number-conserving representative
    ``sum_k |k, n-1-k> / sqrt(n)``); the multiqubit kinds use fermionic
    0/1 modes, one per qubit.
    """
    kind = kind.lower()
    if kind == "me":
        if n < 2:
            raise ValueError("maximally entangled states need n >= 2")
        basis = enumerate_basis(2, BOSONIC, n - 1)
        return PureState.from_terms({(k, n - 1 - k): 1.0 for k in range(n)}, basis)
    if kind == "noon":
        if n < 1:
            raise ValueError("NOON states need n >= 1")
        basis = enumerate_basis(2, BOSONIC, n)
        return PureState.from_terms({(n, 0): 1.0, (0, n): 1.0}, basis)
    basis = enumerate_basis(n, FERMIONIC) if n >= 1 else None
    if kind == "w":
        if n < 2:
            raise ValueError("W states need n >= 2")
        return PureState.from_terms({tuple(int(i == j) for i in range(n)): 1.0 for j in range(n)}, basis)
    if kind == "cl":
        if n not in _CLUSTER:
            raise ValueError(f"cluster states are tabulated for 2-4 qubits, not {n}")
        v = sum(a * _product(lbl) for a, lbl in _CLUSTER[n])
        return PureState(v / np.linalg.norm(v), basis)
    if kind == "ghz":
        if n < 2:
            raise ValueError("GHZ states need n >= 2")
        return PureState.from_terms({(0,) * n: 1.0, (1,) * n: 1.0}, basis)
    raise ValueError(f"unsupported target {kind!r}")
