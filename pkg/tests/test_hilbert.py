import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psvsim import hilbert
from psvsim.errors import ConfigurationError, ImpossibleBranchError
from psvsim.hilbert import (
    Axis,
    OutcomeSet,
    StateVector,
    SubsystemKind,
    SubsystemSpec,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    apply_unitary,
    axis_eigenstate,
    basis_state,
    born_probability,
    charge_expectation,
    evolve_hamiltonian,
    phase_canonical,
    project_and_normalize,
    schmidt_rank,
    spin_outcome_set,
    spin_projector,
    states_close,
    tensor,
)

angle = st.floats(0.0, math.pi, allow_nan=False)
phase = st.floats(-math.pi, math.pi, allow_nan=False)

SPIN = SubsystemSpec("s", 2, SubsystemKind.SPIN)
SPIN2 = SubsystemSpec("t", 2, SubsystemKind.SPIN)
REG = SubsystemSpec("R", 3, SubsystemKind.REGISTER)


def random_state(subsystems, seed):
    rng = np.random.default_rng(seed)
    n = math.prod(s.dim for s in subsystems)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return StateVector(tuple(subsystems), v / np.linalg.norm(v))


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_subsystem_validation():
    with pytest.raises(ConfigurationError):
        SubsystemSpec("x", 3, SubsystemKind.SPIN)
    with pytest.raises(ConfigurationError):
        SubsystemSpec("x", 3, SubsystemKind.MODE)
    with pytest.raises(ConfigurationError):
        SubsystemSpec("x", 1, SubsystemKind.REGISTER)
    SubsystemSpec("x", 7, SubsystemKind.REGISTER)


def test_state_vector_validation():
    with pytest.raises(ConfigurationError):
        StateVector((SPIN,), np.zeros(3))
    with pytest.raises(ConfigurationError):
        StateVector((SPIN, SPIN), np.zeros(4))  # duplicate labels


def test_state_vector_is_immutable():
    st_ = basis_state((SPIN, REG))
    with pytest.raises(ValueError):
        st_.amplitudes[0] = 5.0


def test_basis_state_and_tensor():
    st_ = basis_state((SPIN, REG), {"R": 2})
    assert st_.amplitudes[2] == 1.0
    assert st_.norm == 1.0
    joint = tensor(basis_state((SPIN,), {"s": 1}), basis_state((REG,)))
    assert joint.labels == ("s", "R")
    assert joint.amplitudes[3] == 1.0
    with pytest.raises(ConfigurationError):
        tensor(basis_state((SPIN,)), basis_state((SPIN,)))


def test_phase_canonical():
    st_ = StateVector((SPIN,), np.array([0.6j, -0.8]))
    canon = phase_canonical(st_)
    k = int(np.argmax(np.abs(canon.amplitudes)))
    assert canon.amplitudes[k].imag == pytest.approx(0.0, abs=1e-15)
    assert canon.amplitudes[k].real > 0
    assert states_close(phase_canonical(canon), canon, tol=1e-15)
    # zero vector passes through untouched
    z = StateVector((SPIN,), np.zeros(2))
    assert phase_canonical(z) is z


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_unitary_preserves_norm(seed):
    st_ = random_state((SPIN, SPIN2, REG), seed)
    u = random_unitary(4, seed + 1)
    out = apply_unitary(st_, u, ("s", "t"))
    assert out.norm == pytest.approx(1.0, abs=1e-12)


def test_apply_unitary_rejects_nonunitary():
    st_ = basis_state((SPIN,))
    with pytest.raises(ConfigurationError):
        apply_unitary(st_, np.array([[1.0, 0.0], [0.0, 2.0]]), ("s",))
    with pytest.raises(ConfigurationError):
        apply_unitary(st_, np.eye(4), ("s",))


def test_apply_unitary_targets_correct_subsystem():
    st_ = basis_state((SPIN, SPIN2))
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    out = apply_unitary(st_, flip, ("t",))
    assert out.amplitudes[1] == 1.0  # index (s=0, t=1)


def test_evolve_hamiltonian():
    st_ = basis_state((SPIN,))
    sz = np.diag([1.0, -1.0]).astype(complex)
    out = evolve_hamiltonian(st_, sz, ("s",), dt=math.pi / 2)
    # exp(-i sz pi/2)|0> = -i|0>; norms and phase behavior
    assert abs(out.amplitudes[0] + 1j) < 1e-12
    with pytest.raises(ConfigurationError):
        evolve_hamiltonian(st_, np.array([[0, 1j], [1j, 0]]), ("s",), 1.0)
    with pytest.raises(ConfigurationError):
        evolve_hamiltonian(st_, sz, ("s",), -1.0)


def test_axis_constants():
    assert np.allclose(Axis.from_xyz((0, 0, 1)).xyz, Z_AXIS.xyz)
    assert np.allclose(X_AXIS.xyz, (1, 0, 0), atol=1e-15)
    assert np.allclose(Y_AXIS.xyz, (0, 1, 0), atol=1e-15)
    with pytest.raises(ConfigurationError):
        Axis.from_xyz((1, 1, 0))


@given(angle, phase)
def test_axis_eigenstates_orthonormal(theta, phi):
    ax = Axis(theta, phi)
    plus, minus = axis_eigenstate(ax, +1), axis_eigenstate(ax, -1)
    assert abs(np.vdot(plus, plus) - 1) < 1e-12
    assert abs(np.vdot(minus, minus) - 1) < 1e-12
    assert abs(np.vdot(plus, minus)) < 1e-12


@given(angle, angle)
def test_coplanar_overlap_law(t1, t2):
    p1 = axis_eigenstate(Axis(t1), +1)
    p2 = axis_eigenstate(Axis(t2), +1)
    assert abs(np.vdot(p1, p2)) ** 2 == pytest.approx(
        math.cos((t1 - t2) / 2) ** 2, abs=1e-12
    )


def test_spin_projector_completeness():
    ax = Axis(1.1, 0.3)
    p = spin_projector(ax, +1) + spin_projector(ax, -1)
    assert np.abs(p - np.eye(2)).max() < 1e-12


def test_outcome_set_validation():
    good = spin_outcome_set("s", X_AXIS)
    assert good.labels == ("+", "-")
    half = np.eye(2) * 0.5
    with pytest.raises(ConfigurationError):  # not idempotent
        OutcomeSet(("s",), (("a", half), ("b", np.eye(2) - half)))
    p0 = np.diag([1.0, 0.0])
    with pytest.raises(ConfigurationError):  # incomplete
        OutcomeSet(("s",), (("a", p0),))
    with pytest.raises(ConfigurationError):  # not orthogonal
        OutcomeSet(("s",), (("a", p0), ("b", np.eye(2))))
    with pytest.raises(ConfigurationError):  # not Hermitian
        OutcomeSet(("s",), (("a", np.array([[1, 1], [0, 0]])),
                            ("b", np.array([[0, -1], [0, 1]]))))
    with pytest.raises(ConfigurationError):
        good.projector("nope")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), angle, phase)
def test_born_probabilities_sum_to_one(seed, theta, phi):
    st_ = random_state((SPIN, SPIN2), seed)
    outcomes = spin_outcome_set("s", Axis(theta, phi))
    total = sum(born_probability(st_, outcomes, l) for l in outcomes.labels)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_project_and_normalize():
    st_ = random_state((SPIN, SPIN2), 5)
    outcomes = spin_outcome_set("s", Z_AXIS)
    out = project_and_normalize(st_, outcomes, "+")
    assert out.norm == pytest.approx(1.0, abs=1e-12)
    # projecting again is a no-op up to phase
    assert states_close(project_and_normalize(out, outcomes, "+"), out, tol=1e-12)
    with pytest.raises(ImpossibleBranchError):
        project_and_normalize(out, outcomes, "-")


def test_charge_expectation():
    mode = SubsystemSpec("m1", 2, SubsystemKind.MODE)
    mode2 = SubsystemSpec("m2", 2, SubsystemKind.MODE)
    occupied = basis_state((mode, mode2), {"m1": 1})
    assert charge_expectation(occupied, ("m1", "m2")) == pytest.approx(1.0)
    both = basis_state((mode, mode2), {"m1": 1, "m2": 1})
    assert charge_expectation(both, ("m1", "m2")) == pytest.approx(2.0)
    split = StateVector((mode, mode2),
                        np.array([0, 1, 1, 0]) / math.sqrt(2))
    assert charge_expectation(split, ("m1", "m2")) == pytest.approx(1.0)


def test_schmidt_rank():
    prod = basis_state((SPIN, SPIN2), {"s": 1})
    assert schmidt_rank(prod, ("s",)) == 1
    bell = StateVector((SPIN, SPIN2), np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert schmidt_rank(bell, ("s",)) == 2


def test_states_close():
    a = basis_state((SPIN,))
    b = a.with_amplitudes(a.amplitudes * np.exp(0.7j))
    assert states_close(a, b)
    assert not states_close(a, basis_state((SPIN,), {"s": 1}))
    assert not states_close(a, basis_state((SPIN2,)))
