"""Finite-dimensional quantum state algebra.

States are normalized complex amplitude tensors over an ordered list of
labelled subsystems (spins, occupation modes, detector registers).  All
operations return new states; nothing here mutates shared data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

from .errors import ConfigurationError, ImpossibleBranchError

EPS_NORM = 1e-9
EPS_OP = 1e-12     # unitarity / hermiticity / projector checks
EPS_PROB = 1e-12   # impossible-branch threshold


class SubsystemKind(Enum):
    SPIN = "spin"
    MODE = "mode"
    REGISTER = "register"


@dataclass(frozen=True)
class SubsystemSpec:
    """One tensor factor.  Spins and occupation modes are two-dimensional;
    registers hold detector pointer states (index 0 = ready)."""

    label: str
    dim: int
    kind: SubsystemKind

    def __post_init__(self):
        if self.kind in (SubsystemKind.SPIN, SubsystemKind.MODE) and self.dim != 2:
            raise ConfigurationError(
                f"{self.kind.value} subsystem {self.label!r} must have dim 2"
            )
        if self.kind is SubsystemKind.REGISTER and self.dim < 2:
            raise ConfigurationError(
                f"register {self.label!r} must have dim >= 2, got {self.dim}"
            )


@dataclass(frozen=True)
class StateVector:
    subsystems: tuple[SubsystemSpec, ...]
    amplitudes: np.ndarray  # flat complex vector of length prod(dims)

    def __post_init__(self):
        labels = [s.label for s in self.subsystems]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"duplicate subsystem labels in {labels}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        expected = math.prod(self.dims)
        if amps.size != expected:
            raise ConfigurationError(
                f"amplitude length {amps.size} != product of dims {expected}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.subsystems)

    def axis_of(self, label: str) -> int:
        for i, s in enumerate(self.subsystems):
            if s.label == label:
                return i
        raise ConfigurationError(f"unknown subsystem label {label!r}")

    def spec_of(self, label: str) -> SubsystemSpec:
        return self.subsystems[self.axis_of(label)]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amps: np.ndarray) -> "StateVector":
        return StateVector(self.subsystems, amps)


def basis_state(subsystems: tuple[SubsystemSpec, ...], indices: dict[str, int] | None = None) -> StateVector:
    """Product basis state; unlisted subsystems sit at index 0."""
    indices = indices or {}
    dims = tuple(s.dim for s in subsystems)
    idx = tuple(indices.get(s.label, 0) for s in subsystems)
    amps = np.zeros(dims, dtype=complex)
    amps[idx] = 1.0
    return StateVector(tuple(subsystems), amps.reshape(-1))


def tensor(*states: StateVector) -> StateVector:
    """Kronecker product in subsystem order; labels must be disjoint."""
    subsystems: tuple[SubsystemSpec, ...] = ()
    for st in states:
        overlap_labels = set(s.label for s in subsystems) & set(st.labels)
        if overlap_labels:
            raise ConfigurationError(f"duplicate labels in tensor: {sorted(overlap_labels)}")
        subsystems += st.subsystems
    amps = reduce(np.kron, (st.amplitudes for st in states))
    return StateVector(subsystems, amps)


def phase_canonical(state: StateVector) -> StateVector:
    """Fix global phase: largest-magnitude amplitude real and positive
    (ties broken by lowest index).  Makes state equality testable."""
    amps = state.amplitudes
    k = int(np.argmax(np.abs(amps)))
    mag = abs(amps[k])
    if mag == 0.0:
        return state
    return state.with_amplitudes(amps * (mag / amps[k]))


def _apply_matrix(state: StateVector, matrix: np.ndarray, labels: tuple[str, ...]) -> StateVector:
    """Apply a matrix acting on the listed subsystems, identity elsewhere."""
    axes = [state.axis_of(l) for l in labels]
    dims = state.dims
    tdims = tuple(dims[a] for a in axes)
    block = math.prod(tdims)
    if matrix.shape != (block, block):
        raise ConfigurationError(
            f"operator shape {matrix.shape} does not match target dims {tdims}"
        )
    psi = state.amplitudes.reshape(dims)
    psi = np.moveaxis(psi, axes, range(len(axes)))
    rest = psi.shape[len(axes):]
    psi = matrix @ psi.reshape(block, -1)
    psi = np.moveaxis(psi.reshape(tdims + rest), range(len(axes)), axes)
    return state.with_amplitudes(psi.reshape(-1))


def apply_unitary(state: StateVector, matrix: np.ndarray, labels: tuple[str, ...]) -> StateVector:
    matrix = np.asarray(matrix, dtype=complex)
    n = matrix.shape[0]
    if matrix.shape != (n, n) or np.abs(matrix @ matrix.conj().T - np.eye(n)).max() > EPS_OP:
        raise ConfigurationError(f"matrix on {labels} is not unitary within {EPS_OP}")
    return _apply_matrix(state, matrix, tuple(labels))


def evolve_hamiltonian(state: StateVector, hamiltonian: np.ndarray, labels: tuple[str, ...], dt: float) -> StateVector:
    """Apply exp(-i H dt) via Hermitian eigendecomposition (dims are tiny)."""
    h = np.asarray(hamiltonian, dtype=complex)
    if np.abs(h - h.conj().T).max() > EPS_OP:
        raise ConfigurationError(f"matrix on {labels} is not Hermitian within {EPS_OP}")
    if dt < 0:
        raise ConfigurationError(f"time step must be nonnegative, got {dt}")
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * w * dt)) @ v.conj().T
    return _apply_matrix(state, u, tuple(labels))


# --- spin axes -------------------------------------------------------------

@dataclass(frozen=True)
class Axis:
    """A measurement axis, stored as polar/azimuthal angles of the unit
    vector (Bloch parametrization)."""

    theta: float
    phi: float = 0.0

    @classmethod
    def from_xyz(cls, v) -> "Axis":
        v = np.asarray(v, dtype=float)
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ConfigurationError(f"axis must be a unit 3-vector, got {v}")
        return cls(theta=math.atan2(math.hypot(v[0], v[1]), v[2]),
                   phi=math.atan2(v[1], v[0]))

    @property
    def xyz(self) -> tuple[float, float, float]:
        st = math.sin(self.theta)
        return (st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta))


X_AXIS = Axis(theta=math.pi / 2, phi=0.0)
Y_AXIS = Axis(theta=math.pi / 2, phi=math.pi / 2)
Z_AXIS = Axis(theta=0.0, phi=0.0)


def axis_eigenstate(axis: Axis, sign: int) -> np.ndarray:
    """The +-1/2 eigenvector of r.L in the standard Bloch convention:
    + -> (cos(t/2), e^{i phi} sin(t/2)), - -> (-e^{-i phi} sin(t/2), cos(t/2))."""
    if sign not in (+1, -1):
        raise ConfigurationError(f"sign must be +1 or -1, got {sign}")
    half = axis.theta / 2.0
    if sign > 0:
        return np.array([math.cos(half), np.exp(1j * axis.phi) * math.sin(half)])
    return np.array([-np.exp(-1j * axis.phi) * math.sin(half), math.cos(half)])


def spin_projector(axis: Axis, sign: int) -> np.ndarray:
    v = axis_eigenstate(axis, sign)
    return np.outer(v, v.conj())


def overlap(bra: np.ndarray, ket: np.ndarray) -> complex:
    return complex(np.vdot(bra, ket))


# --- measurement -----------------------------------------------------------

@dataclass(frozen=True)
class OutcomeSet:
    """A complete set of mutually orthogonal projectors on the joint space
    of the target subsystems, one per outcome label."""

    targets: tuple[str, ...]
    outcomes: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        labels = [l for l, _ in self.outcomes]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"duplicate outcome labels {labels}")
        projs = [np.asarray(p, dtype=complex) for _, p in self.outcomes]
        d = projs[0].shape[0]
        for (label, _), p in zip(self.outcomes, projs):
            if p.shape != (d, d):
                raise ConfigurationError(f"projector {label!r} has shape {p.shape}")
            if np.abs(p - p.conj().T).max() > EPS_OP:
                raise ConfigurationError(f"projector {label!r} is not Hermitian")
            if np.abs(p @ p - p).max() > EPS_OP:
                raise ConfigurationError(f"projector {label!r} is not idempotent")
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                if np.abs(projs[i] @ projs[j]).max() > EPS_OP:
                    raise ConfigurationError(
                        f"projectors {labels[i]!r} and {labels[j]!r} are not orthogonal"
                    )
        if np.abs(sum(projs) - np.eye(d)).max() > EPS_OP:
            raise ConfigurationError("projectors do not sum to the identity")
        frozen = tuple((l, _frozen(p)) for (l, _), p in zip(self.outcomes, projs))
        object.__setattr__(self, "outcomes", frozen)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.outcomes)

    def projector(self, label: str) -> np.ndarray:
        for l, p in self.outcomes:
            if l == label:
                return p
        raise ConfigurationError(f"unknown outcome label {label!r}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def spin_outcome_set(target: str, axis: Axis) -> OutcomeSet:
    return OutcomeSet(
        targets=(target,),
        outcomes=(("+", spin_projector(axis, +1)), ("-", spin_projector(axis, -1))),
    )


def born_probability(state: StateVector, outcome_set: OutcomeSet, label: str) -> float:
    p = outcome_set.projector(label)
    projected = _apply_matrix(state, p, outcome_set.targets)
    prob = float(np.vdot(state.amplitudes, projected.amplitudes).real)
    if prob < -EPS_OP or prob > 1.0 + EPS_OP:
        raise ConfigurationError(f"Born probability {prob} outside [0, 1]")
    return min(max(prob, 0.0), 1.0)


def project_and_normalize(state: StateVector, outcome_set: OutcomeSet, label: str) -> StateVector:
    projected = _apply_matrix(state, outcome_set.projector(label), outcome_set.targets)
    nrm = float(np.linalg.norm(projected.amplitudes))
    if nrm * nrm <= EPS_PROB:
        raise ImpossibleBranchError(
            f"outcome {label!r} on {outcome_set.targets} has zero probability"
        )
    return phase_canonical(projected.with_amplitudes(projected.amplitudes / nrm))


def charge_expectation(state: StateVector, charged_modes: tuple[str, ...]) -> float:
    """Total expected occupation over the designated charged modes
    (weight 1 each)."""
    probs = np.abs(state.amplitudes.reshape(state.dims)) ** 2
    total = 0.0
    for label in charged_modes:
        axis = state.axis_of(label)
        other = tuple(i for i in range(len(state.dims)) if i != axis)
        marginal = probs.sum(axis=other)
        total += float(np.dot(marginal, np.arange(len(marginal))))
    return total


def schmidt_rank(state: StateVector, labels: tuple[str, ...], tol: float = 1e-9) -> int:
    """Schmidt rank across the (labels | rest) cut."""
    axes = [state.axis_of(l) for l in labels]
    dims = state.dims
    psi = np.moveaxis(state.amplitudes.reshape(dims), axes, range(len(axes)))
    block = math.prod(dims[a] for a in axes)
    svals = np.linalg.svd(psi.reshape(block, -1), compute_uv=False)
    return int(np.sum(svals > tol))


def states_close(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    """Equality up to global phase (after canonicalization)."""
    if a.labels != b.labels or a.dims != b.dims:
        return False
    pa = phase_canonical(a).amplitudes
    pb = phase_canonical(b).amplitudes
    return bool(np.abs(pa - pb).max() <= tol)
