"""Reduction-order evolution engine.

A scenario is evolved surface by surface: each detector, taken in a chosen
reduction order, adjoins its backward light cone to the current surface,
any interaction unitary that newly entered the surface's past is applied,
and the detector projects the state and shifts its pointer register.
Spacelike-separated detectors may reduce in any order; joint outcome
distributions are order independent because all their projectors act on
disjoint subsystems.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from . import geometry, hilbert
from .errors import ConfigurationError, ImpossibleBranchError
from .geometry import Event, Lcsh, LimitSide, Separation, SurfaceSide
from .hilbert import OutcomeSet, StateVector, SubsystemKind

#: A measurement is classified as a non-reduction when some outcome is
#: certain to within this tolerance (scenarios are exact; this absorbs
#: roundoff only).
EPS_CERT = 1e-9

MAX_DETECTORS_FOR_ENUMERATION = 8
MAX_BRANCHES = 10**6


@dataclass(frozen=True)
class InteractionEvent:
    """A unitary anchored at a spacetime point, e.g. an AA copy gate."""

    name: str
    at: Event
    targets: tuple[str, ...]
    unitary: np.ndarray
    gate: dict | None = None  # structured description for serialization

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        n = u.shape[0]
        if u.shape != (n, n) or np.abs(u @ u.conj().T - np.eye(n)).max() > hilbert.EPS_OP:
            raise ConfigurationError(f"interaction {self.name!r} is not unitary")
        u = np.array(u)
        u.flags.writeable = False
        object.__setattr__(self, "unitary", u)


@dataclass(frozen=True)
class DetectorEvent:
    """A local detector: an outcome set on the measured subsystems plus a
    pointer register.  ``pointers`` maps each outcome position to the
    register basis index recording it; index 0 is the ready state, reused
    by null ("nothing happened") outcomes.  Absorbing detectors digest the
    measured subsystems, resetting them to their 0 basis state."""

    label: str
    at: Event
    outcomes: OutcomeSet
    register: str
    absorbing: bool = False
    pointers: tuple[int, ...] = ()

    def __post_init__(self):
        if self.register in self.outcomes.targets:
            raise ConfigurationError(
                f"detector {self.label!r} register must be distinct from its targets"
            )
        if not self.pointers:
            object.__setattr__(
                self, "pointers", tuple(range(1, len(self.outcomes.outcomes) + 1))
            )
        if len(self.pointers) != len(self.outcomes.outcomes):
            raise ConfigurationError(
                f"detector {self.label!r} has {len(self.pointers)} pointers for "
                f"{len(self.outcomes.outcomes)} outcomes"
            )

    def pointer_for(self, outcome: str) -> int:
        return self.pointers[self.outcomes.labels.index(outcome)]


@dataclass(frozen=True)
class Scenario:
    dim: int
    c: float
    subsystems: tuple[hilbert.SubsystemSpec, ...]
    initial_state: StateVector
    initial_t0: float  # -inf allowed
    interactions: tuple[InteractionEvent, ...]
    detectors: tuple[DetectorEvent, ...]
    charged_modes: tuple[str, ...] = ()
    worldlines: tuple[tuple[str, tuple[Event, ...]], ...] = ()  # diagram rendering only

    def initial_surface(self) -> Lcsh:
        return Lcsh(t0=self.initial_t0, apexes=(), c=self.c)

    def detector(self, label: str) -> DetectorEvent:
        for d in self.detectors:
            if d.label == label:
                return d
        raise ConfigurationError(f"unknown detector {label!r}")

    @property
    def detector_labels(self) -> tuple[str, ...]:
        return tuple(d.label for d in self.detectors)

    @property
    def events(self) -> tuple[Event, ...]:
        return tuple(ev.at for ev in self.interactions) + tuple(d.at for d in self.detectors)

    def support_region(self, pad: float = 1.0) -> tuple[tuple[float, float], ...]:
        """Spatial bounding box of all anchored events, padded."""
        pts = [e.x for e in self.events]
        pts += [p.x for _, line in self.worldlines for p in line]
        arr = np.array(pts) if pts else np.zeros((1, self.dim))
        return tuple((arr[:, k].min() - pad, arr[:, k].max() + pad) for k in range(self.dim))


def validate_scenario(s: Scenario) -> None:
    labels = {sub.label for sub in s.subsystems}
    if s.initial_state.labels != tuple(sub.label for sub in s.subsystems):
        raise ConfigurationError("initial state subsystems do not match scenario subsystems")
    surface = s.initial_surface()
    for ev in s.events:
        if ev.dim != s.dim:
            raise ConfigurationError(f"event {ev} has dimension {ev.dim}, expected {s.dim}")
        if geometry.event_side_of_surface(ev, surface) is not SurfaceSide.FUTURE:
            raise ConfigurationError(f"event {ev} is not in the future of the initial surface")
    for ev in s.interactions:
        for t in ev.targets:
            if t not in labels:
                raise ConfigurationError(f"interaction {ev.name!r} targets unknown subsystem {t!r}")
    seen = set()
    for d in s.detectors:
        if d.label in seen:
            raise ConfigurationError(f"duplicate detector label {d.label!r}")
        seen.add(d.label)
        for t in d.outcomes.targets + (d.register,):
            if t not in labels:
                raise ConfigurationError(f"detector {d.label!r} references unknown subsystem {t!r}")
        reg = s.initial_state.spec_of(d.register)
        if reg.kind is not SubsystemKind.REGISTER:
            raise ConfigurationError(f"detector {d.label!r} register {d.register!r} is not a register")
        if max(d.pointers) >= reg.dim:
            raise ConfigurationError(
                f"detector {d.label!r} pointer {max(d.pointers)} exceeds register dim {reg.dim}"
            )
    for m in s.charged_modes:
        if s.initial_state.spec_of(m).kind is not SubsystemKind.MODE:
            raise ConfigurationError(f"charged subsystem {m!r} is not an occupation mode")
    if abs(s.initial_state.norm - 1.0) > hilbert.EPS_NORM:
        raise ConfigurationError(f"initial state norm {s.initial_state.norm} != 1")


# --- reduction orders ------------------------------------------------------

def validate_reduction_order(s: Scenario, order: tuple[str, ...]) -> list[tuple[str, str]]:
    """Violating detector pairs; empty list means the order is valid.

    Timelike pairs must reduce in time order.  Spacelike and lightlike
    pairs are unconstrained (delta-limit convention: lightlike counts as
    spacelike for ordering purposes).
    """
    if sorted(order) != sorted(s.detector_labels):
        raise ConfigurationError(
            f"order {order} is not a permutation of detectors {s.detector_labels}"
        )
    position = {label: i for i, label in enumerate(order)}
    violations = []
    for a, b in itertools.combinations(s.detector_labels, 2):
        da, db = s.detector(a), s.detector(b)
        if geometry.classify(da.at, db.at, s.c).kind is Separation.TIMELIKE:
            if (position[a] < position[b]) != (da.at.t < db.at.t):
                violations.append((a, b))
    return violations


def enumerate_valid_orders(s: Scenario) -> list[tuple[str, ...]]:
    n = len(s.detectors)
    if n > MAX_DETECTORS_FOR_ENUMERATION:
        raise ConfigurationError(
            f"refusing to enumerate orders for {n} detectors "
            f"(limit {MAX_DETECTORS_FOR_ENUMERATION})"
        )
    return [p for p in itertools.permutations(s.detector_labels)
            if not validate_reduction_order(s, p)]


# --- stepping --------------------------------------------------------------

def _register_shift(dim: int, pointer: int) -> np.ndarray:
    """Permutation swapping register basis states 0 and ``pointer``."""
    u = np.eye(dim, dtype=complex)
    if pointer != 0:
        u[[0, pointer]] = u[[pointer, 0]]
    return u


def _absorption_config(det: DetectorEvent, outcome: str, dims: tuple[int, ...]) -> tuple[int, ...]:
    """Basis configuration fixed by a rank-1 diagonal outcome projector."""
    p = det.outcomes.projector(outcome)
    diag = np.diag(p).real
    if np.abs(p - np.diag(diag)).max() > hilbert.EPS_OP or abs(diag.sum() - 1.0) > hilbert.EPS_OP:
        raise ConfigurationError(
            f"absorbing detector {det.label!r} requires rank-1 basis projectors "
            f"(outcome {outcome!r} is not one)"
        )
    flat = int(np.argmax(diag))
    return tuple(np.unravel_index(flat, dims))


def apply_detector(state: StateVector, det: DetectorEvent, outcome: str) -> StateVector:
    """Projection + pointer shift (+ absorption).  Shared with the
    Hellwig-Kraus comparator so both prescriptions use one primitive."""
    state = hilbert.project_and_normalize(state, det.outcomes, outcome)
    reg_dim = state.spec_of(det.register).dim
    pointer = det.pointer_for(outcome)
    if pointer != 0:
        state = hilbert.apply_unitary(state, _register_shift(reg_dim, pointer), (det.register,))
    if det.absorbing:
        tdims = tuple(state.spec_of(t).dim for t in det.outcomes.targets)
        config = _absorption_config(det, outcome, tdims)
        if any(config):
            # The projector fixed the measured configuration, so swapping it
            # with the empty configuration is an isometry on this branch.
            block = math.prod(tdims)
            u = np.eye(block, dtype=complex)
            i = int(np.ravel_multi_index(config, tdims))
            u[[0, i]] = u[[i, 0]]
            state = hilbert.apply_unitary(state, u, det.outcomes.targets)
    return state


@dataclass(frozen=True)
class StepRecord:
    detector: str
    outcome: str
    probability: float
    reduction: bool
    surface_before: Lcsh
    surface_after: Lcsh
    state_before: StateVector  # on S_k-, after due interactions
    state_after: StateVector   # on S_k+
    interactions_applied: tuple[str, ...]


def _due_interactions(pending: list[InteractionEvent], surface: Lcsh) -> tuple[list[InteractionEvent], list[InteractionEvent]]:
    """Interactions now in the past of (or exactly on) the surface.

    Events exactly on a reduction surface are applied before the reduction
    (they belong to the minus side).  Timelike pairs apply in time order;
    spacelike pairs commute, so a stable time sort is sufficient.
    """
    due, remaining = [], []
    for ev in pending:
        if geometry.event_side_of_surface(ev.at, surface) is SurfaceSide.FUTURE:
            remaining.append(ev)
        else:
            due.append(ev)
    due.sort(key=lambda ev: (ev.at.t, ev.name))
    return due, remaining


def step(
    s: Scenario,
    surface: Lcsh,
    state: StateVector,
    detector: str,
    outcome: str | None = None,
    rng: np.random.Generator | None = None,
    pending: list[InteractionEvent] | None = None,
) -> tuple[StepRecord, list[InteractionEvent]]:
    """Advance the surface over one detector's backward light cone and
    perform its measurement.

    ``outcome`` fixes the branch; with ``outcome=None`` an ``rng`` must be
    given and the branch is sampled from the Born probabilities.
    """
    det = s.detector(detector)
    pending = list(s.interactions) if pending is None else list(pending)
    new_surface = geometry.adjoin_apex(surface, det.at)
    due, remaining = _due_interactions(pending, new_surface)
    for ev in due:
        state = hilbert.apply_unitary(state, ev.unitary, ev.targets)
    state_before = hilbert.phase_canonical(state)

    probs = {l: hilbert.born_probability(state_before, det.outcomes, l)
             for l in det.outcomes.labels}
    reduction = not any(p >= 1.0 - EPS_CERT for p in probs.values())
    if outcome is None:
        if rng is None:
            raise ConfigurationError("sampled step requires an rng")
        labels = det.outcomes.labels
        cum = np.cumsum([probs[l] for l in labels])
        outcome = labels[int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))]
    prob = probs.get(outcome)
    if prob is None:
        raise ConfigurationError(f"unknown outcome {outcome!r} for detector {detector!r}")
    state_after = apply_detector(state_before, det, outcome)

    record = StepRecord(
        detector=detector,
        outcome=outcome,
        probability=prob,
        reduction=reduction,
        surface_before=surface,
        surface_after=replace(new_surface, side=LimitSide.PLUS),
        state_before=state_before,
        state_after=state_after,
        interactions_applied=tuple(ev.name for ev in due),
    )
    return record, remaining


@dataclass(frozen=True)
class RunRecord:
    scenario: Scenario
    order: tuple[str, ...]
    steps: tuple[StepRecord, ...]
    final_state: StateVector  # at t = +inf (all remaining interactions applied)
    total_probability: float

    def outcomes(self) -> tuple[str, ...]:
        """Outcome labels in scenario detector declaration order."""
        by_det = {st.detector: st.outcome for st in self.steps}
        return tuple(by_det[l] for l in self.scenario.detector_labels)


def _require_valid(s: Scenario, order: tuple[str, ...]) -> None:
    violations = validate_reduction_order(s, order)
    if violations:
        raise ConfigurationError(
            f"reduction order {order} violates time order for timelike pairs {violations}"
        )


def run(
    s: Scenario,
    order: tuple[str, ...],
    outcomes: tuple[str, ...] | None = None,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> RunRecord:
    """Fold ``step`` over a reduction order, then apply any remaining
    interactions (trivial Hamiltonian after the last event) to t = +inf."""
    _require_valid(s, order)
    if outcomes is not None and len(outcomes) != len(order):
        raise ConfigurationError("need one fixed outcome per detector in the order")
    if outcomes is None and rng is None:
        rng = np.random.default_rng(seed if seed is not None else 0)

    surface = s.initial_surface()
    state = s.initial_state
    pending = list(s.interactions)
    steps: list[StepRecord] = []
    for k, label in enumerate(order):
        fixed = outcomes[k] if outcomes is not None else None
        record, pending = step(s, surface, state, label, outcome=fixed, rng=rng, pending=pending)
        steps.append(record)
        surface, state = record.surface_after, record.state_after
    for ev in sorted(pending, key=lambda ev: (ev.at.t, ev.name)):
        state = hilbert.apply_unitary(state, ev.unitary, ev.targets)
    total = math.prod(st.probability for st in steps) if steps else 1.0
    return RunRecord(s, tuple(order), tuple(steps), hilbert.phase_canonical(state), total)


# --- exact enumeration and sampling ----------------------------------------

@dataclass(frozen=True)
class JointDistribution:
    """Exact probability map over outcome tuples, keyed in scenario
    detector declaration order."""

    detectors: tuple[str, ...]
    probabilities: dict[tuple[str, ...], float]

    def probability(self, key: tuple[str, ...]) -> float:
        return self.probabilities.get(tuple(key), 0.0)

    def max_deviation(self, other: "JointDistribution") -> float:
        keys = set(self.probabilities) | set(other.probabilities)
        return max((abs(self.probability(k) - other.probability(k)) for k in keys), default=0.0)


def joint_distribution(s: Scenario, order: tuple[str, ...]) -> JointDistribution:
    """Depth-first enumeration over outcome tuples, pruning zero branches."""
    _require_valid(s, order)
    branch_bound = math.prod(len(s.detector(l).outcomes.outcomes) for l in order)
    if branch_bound > MAX_BRANCHES:
        raise ConfigurationError(f"{branch_bound} outcome branches exceed limit {MAX_BRANCHES}")
    probs: dict[tuple[str, ...], float] = {}
    declared = s.detector_labels

    def descend(surface, state, pending, k, acc_prob, chosen):
        if k == len(order):
            by_det = dict(zip(order, chosen))
            probs[tuple(by_det[l] for l in declared)] = acc_prob
            return
        det = s.detector(order[k])
        for label in det.outcomes.labels:
            try:
                record, remaining = step(s, surface, state, order[k],
                                         outcome=label, pending=pending)
            except ImpossibleBranchError:
                continue
            if record.probability <= hilbert.EPS_PROB:
                continue
            descend(record.surface_after, record.state_after, remaining,
                    k + 1, acc_prob * record.probability, chosen + (label,))

    descend(s.initial_surface(), s.initial_state, list(s.interactions), 0, 1.0, ())
    return JointDistribution(declared, probs)


@dataclass(frozen=True)
class EmpiricalDistribution:
    detectors: tuple[str, ...]
    counts: dict[tuple[str, ...], int]
    n: int

    def frequency(self, key: tuple[str, ...]) -> float:
        return self.counts.get(tuple(key), 0) / self.n


class _BranchCache:
    """Lazily memoized branch tree so that sampling many runs is cheap.

    Each node caches the per-outcome probabilities and post-step states of
    one detector given an outcome prefix, computed once through ``step``;
    a sampled run is then a walk down the tree.  Statistically identical
    to independent full runs.
    """

    def __init__(self, s: Scenario, order: tuple[str, ...]):
        self.s = s
        self.order = order
        self.nodes: dict[tuple[str, ...], tuple] = {}
        self.roots = (s.initial_surface(), s.initial_state, list(s.interactions))

    def node(self, prefix: tuple[str, ...]):
        cached = self.nodes.get(prefix)
        if cached is not None:
            return cached
        if not prefix:
            surface, state, pending = self.roots
        else:
            _, children = self.node(prefix[:-1])
            surface, state, pending = children[prefix[-1]]
        det = self.s.detector(self.order[len(prefix)])
        children = {}
        weights = []
        for label in det.outcomes.labels:
            try:
                record, remaining = step(self.s, surface, state, det.label,
                                         outcome=label, pending=pending)
            except ImpossibleBranchError:
                weights.append(0.0)
                continue
            weights.append(record.probability)
            if len(prefix) + 1 < len(self.order):
                children[label] = (record.surface_after, record.state_after, remaining)
        entry = ((det.outcomes.labels, np.cumsum(weights)), children)
        self.nodes[prefix] = entry
        return entry


def sample(s: Scenario, order: tuple[str, ...], n: int, seed: int = 0) -> EmpiricalDistribution:
    """n independent sampled runs.  Run i draws from the stream seeded by
    (seed, i), so parallel and serial execution give identical results."""
    _require_valid(s, order)
    if n < 1:
        raise ConfigurationError(f"sample count must be >= 1, got {n}")
    cache = _BranchCache(s, tuple(order))
    counts: Counter[tuple[str, ...]] = Counter()
    declared = s.detector_labels
    for i in range(n):
        rng = np.random.default_rng((seed, i))
        us = rng.random(len(order))
        prefix: tuple[str, ...] = ()
        for k in range(len(order)):
            (labels, cum), _ = cache.node(prefix)
            j = int(np.searchsorted(cum, us[k] * cum[-1], side="right"))
            prefix = prefix + (labels[min(j, len(labels) - 1)],)
        by_det = dict(zip(order, prefix))
        counts[tuple(by_det[l] for l in declared)] += 1
    return EmpiricalDistribution(declared, dict(counts), n)


# --- transport to query surfaces -------------------------------------------

@dataclass(frozen=True)
class UndefinedState:
    """Marker for query surfaces on which no state vector exists because
    they cross a reduction surface."""

    reason: str


def state_on_hyperplane(
    record: RunRecord,
    query: Lcsh | float,
    points_per_axis: int = 64,
) -> StateVector | UndefinedState:
    """Transport the recorded history onto a query surface.

    Defined iff the query crosses no reduction surface of the record over
    the scenario's support region.  Local pieces (interaction unitaries,
    non-reduction measurements) apply whenever their anchoring event is in
    the query's past.
    """
    s = record.scenario
    if not isinstance(query, Lcsh):
        query = Lcsh(t0=float(query), apexes=(), c=s.c)
    region = s.support_region()
    xs = geometry.probe_points((query,) + tuple(st.surface_after for st in record.steps),
                               region, points_per_axis)
    tq = geometry.surface_times(query, xs)

    future_of: dict[str, bool] = {}
    for st in record.steps:
        if not st.reduction:
            continue
        tr = geometry.surface_times(st.surface_after, xs)
        above = bool(np.all(tq >= tr - geometry.EPS_GEOM))
        below = bool(np.all(tq <= tr + geometry.EPS_GEOM))
        if not (above or below):
            return UndefinedState(
                f"query surface crosses reduction surface of detector {st.detector!r}"
            )
        future_of[st.detector] = above and not below

    def past_of_query(ev: Event) -> bool:
        return geometry.event_side_of_surface(ev, query) is not SurfaceSide.FUTURE

    state = s.initial_state
    applied = {ev.name: ev for ev in s.interactions}
    for st in record.steps:
        for name in st.interactions_applied:
            ev = applied.pop(name)
            if past_of_query(ev.at):
                state = hilbert.apply_unitary(state, ev.unitary, ev.targets)
        det = s.detector(st.detector)
        if st.reduction:
            if future_of[st.detector]:
                state = apply_detector(state, det, st.outcome)
        elif past_of_query(det.at):
            state = apply_detector(state, det, st.outcome)
    for ev in sorted(applied.values(), key=lambda ev: (ev.at.t, ev.name)):
        if past_of_query(ev.at):
            state = hilbert.apply_unitary(state, ev.unitary, ev.targets)
    return hilbert.phase_canonical(state)
