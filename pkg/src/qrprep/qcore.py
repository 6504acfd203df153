"""Dense linear algebra and state primitives on enumerated Fock bases."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
EIG_FLOOR = 1e-12

FERMIONIC = "fermionic"
BOSONIC = "bosonic"


class DimensionError(ValueError):
    """Operator shape inconsistent with the requested subsystem structure."""


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Ordered occupation-number basis.

    Fermionic bases hold every 0/1 tuple in binary order, mode 0 being the
    most significant digit, so they coincide with the qubit tensor basis.
    Bosonic bases hold every tuple with total occupation up to
    ``max_total``, grouped by ascending total and sorted lexicographically
    inside each group.
    """

    mode_count: int
    statistics: str
    max_total: int
    states: tuple[tuple[int, ...], ...]
    _index: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self._index.update({s: i for i, s in enumerate(self.states)})

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, occupation: Sequence[int]) -> int:
        return self._index[tuple(occupation)]

    def __contains__(self, occupation) -> bool:
        return tuple(occupation) in self._index

    @property
    def occupations(self) -> np.ndarray:
        return np.array(self.states, dtype=int).reshape(self.dim, self.mode_count)

    @property
    def totals(self) -> np.ndarray:
        return self.occupations.sum(axis=1)

    def sector(self, n: int) -> np.ndarray:
        """Indices of basis states holding exactly ``n`` excitations."""
        return np.flatnonzero(self.totals == n)

    def ket(self, occupation: Sequence[int]) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(occupation)] = 1.0
        return v

    def __eq__(self, other):
        if not isinstance(other, FockBasis):
            return NotImplemented
        return (self.statistics, self.states) == (other.statistics, other.states)

    def __hash__(self):
        return hash((self.statistics, self.states))


@lru_cache(maxsize=None)
def enumerate_basis(mode_count: int, statistics: str = FERMIONIC,
                    max_total_excitations: int | None = None) -> FockBasis:
    if mode_count < 1:
        raise ValueError("a Fock basis needs at least one mode")
    if statistics == FERMIONIC:
        states = tuple(itertools.product((0, 1), repeat=mode_count))
        return FockBasis(mode_count, FERMIONIC, mode_count, states)
    if statistics != BOSONIC:
        raise ValueError(f"unknown statistics {statistics!r}")
    if max_total_excitations is None or max_total_excitations < 0:
        raise ValueError("bosonic bases need a nonnegative max_total_excitations")
    states = []
    for n in range(max_total_excitations + 1):
        sector = [s for s in itertools.product(range(n + 1), repeat=mode_count) if sum(s) == n]
        states.extend(sorted(sector))
    return FockBasis(mode_count, BOSONIC, max_total_excitations, tuple(states))


@dataclass(frozen=True)
class SubsystemSplit:
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise DimensionError(f"invalid subsystem dims {self.dims}")

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def check(self, op: np.ndarray) -> None:
        if op.shape != (self.total, self.total):
            raise DimensionError(f"operator of shape {op.shape} does not match dims {self.dims}")


def _as_split(split) -> SubsystemSplit:
    return split if isinstance(split, SubsystemSplit) else SubsystemSplit(tuple(split))


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3g})")


class DensityMatrix:
    """Validated density operator, optionally tagged with its Fock basis.

    The linear-algebra helpers in this module take plain arrays; this class
    is the checked container passed between pipeline stages.
    """

    __array_priority__ = 10

    def __init__(self, data, basis: FockBasis | None = None, *, validate: bool = True,
                 tol: float = HERMITIAN_TOL, psd_tol: float = PSD_TOL):
        data = np.array(data, dtype=complex)
        if basis is not None and data.shape != (basis.dim, basis.dim):
            raise DimensionError(f"state of shape {data.shape} does not fit basis of dim {basis.dim}")
        self.data = data
        self.basis = basis
        self.data.setflags(write=False)
        if validate:
            self.validate(tol, psd_tol)

    def validate(self, tol: float = HERMITIAN_TOL, psd_tol: float = PSD_TOL) -> None:
        check_hermitian(self.data, tol)
        tr = np.trace(self.data).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1")
        lo = np.linalg.eigvalsh(hermitize(self.data)).min()
        if lo < -psd_tol:
            raise ValueError(f"negative eigenvalue {lo:.3g}")

    @classmethod
    def from_ket(cls, psi, basis: FockBasis | None = None) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), basis)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data.conj().T, self.data)))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        where = f", basis={self.basis.statistics}[{self.basis.mode_count}]" if self.basis else ""
        return f"DensityMatrix(dim={self.dim}{where})"


class PureState:
    """Unit-norm ket on a Fock basis."""

    def __init__(self, amplitudes, basis: FockBasis | None = None):
        amps = np.array(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"ket norm {norm!r} differs from 1")
        if basis is not None and amps.size != basis.dim:
            raise DimensionError("ket length does not match basis")
        self.amplitudes = amps
        self.basis = basis

    @classmethod
    def from_terms(cls, terms: dict, basis: FockBasis) -> "PureState":
        """Build a normalized ket from ``{occupation: amplitude}``."""
        v = np.zeros(basis.dim, dtype=complex)
        for occ, amp in terms.items():
            v[basis.index(occ)] += amp
        return cls(v / np.linalg.norm(v), basis)

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.basis)

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product; the leftmost factor varies slowest."""
    if not ops:
        raise ValueError("tensor_product needs at least one factor")
    return reduce(np.kron, [np.asarray(o) for o in ops])


def _keep_list(keep, n: int) -> list[int]:
    keep = [keep] if np.isscalar(keep) else list(keep)
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise DimensionError(f"invalid subsystem selection {keep}")
    return sorted(keep)


def partial_trace(rho, split, keep) -> np.ndarray:
    """Reduced operator on the subsystems listed in ``keep`` (kept in ascending order)."""
    rho = np.asarray(rho)
    split = _as_split(split)
    split.check(rho)
    n = len(split.dims)
    keep = _keep_list(keep, n)
    traced = [i for i in range(n) if i not in keep]
    t = rho.reshape(split.dims + split.dims)
    # trace highest axes first so remaining axis numbers stay valid
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    d = int(np.prod([split.dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def partial_transpose(rho, split, target) -> np.ndarray:
    rho = np.asarray(rho)
    split = _as_split(split)
    split.check(rho)
    n = len(split.dims)
    targets = _keep_list(target, n)
    perm = list(range(2 * n))
    for k in targets:
        perm[k], perm[n + k] = n + k, k
    return rho.reshape(split.dims + split.dims).transpose(perm).reshape(rho.shape)


def eigh_hermitian(a, tol: float = HERMITIAN_TOL):
    a = np.asarray(a)
    check_hermitian(a, tol)
    return np.linalg.eigh(hermitize(a))


def von_neumann_entropy(rho, tol: float = HERMITIAN_TOL) -> float:
    """Entropy in bits."""
    rho = np.asarray(rho)
    check_hermitian(rho, tol)
    return entropy_from_eigenvalues(np.linalg.eigvalsh(hermitize(rho)))


def entropy_from_eigenvalues(w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > EIG_FLOOR]
    return float(-np.sum(w * np.log2(w)))


def hermitian_function(a, f="sqrt", tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Apply ``f`` ('sqrt', 'log' or a callable) to the eigenvalues of a Hermitian matrix.

    Negative eigenvalues above ``-PSD_TOL`` are clamped to zero for ``sqrt``;
    ``log`` floors eigenvalues at ``EIG_FLOOR`` and uses the natural base.
    """
    w, v = eigh_hermitian(a, tol)
    if f == "sqrt":
        if w.min(initial=0.0) < -PSD_TOL:
            raise ValueError(f"sqrt of a matrix with eigenvalue {w.min():.3g}")
        fw = np.sqrt(np.clip(w, 0.0, None))
    elif f == "log":
        fw = np.log(np.maximum(w, EIG_FLOOR))
    elif callable(f):
        fw = f(w)
    else:
        raise ValueError(f"unsupported matrix function {f!r}")
    return (v * fw) @ v.conj().T


def trace_norm(a) -> float:
    a = np.asarray(a)
    if np.allclose(a, a.conj().T, atol=HERMITIAN_TOL):
        return float(np.abs(np.linalg.eigvalsh(hermitize(a))).sum())
    return float(np.linalg.svd(a, compute_uv=False).sum())


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def ket_to_dm(psi: Iterable[complex]) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())
