"""Minkowski causal structure.

Events are points (t, x) with a scenario-wide speed of light c.  Surfaces
are upper envelopes of backward light cones over a flat initial surface
(possibly the formal limit t0 = -inf); they are evaluated lazily through
``surface_time`` rather than meshed, so all envelope algebra is exact up
to float roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ConfigurationError, OrderingViolationError

#: Tolerance for on-surface / tie-breaking decisions, in scenario units.
#: Scenario coordinates are exact small rationals; this only absorbs roundoff.
EPS_GEOM = 1e-9

MINUS_INFINITY = -math.inf


class Separation(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


class SurfaceSide(Enum):
    PAST = "past"
    ON = "on"
    FUTURE = "future"


class LimitSide(Enum):
    """The t+/t- limit convention: bookkeeping metadata, not geometry."""

    MINUS = "minus"
    PLUS = "plus"
    EXACT = "exact"


@dataclass(frozen=True)
class Event:
    """A spacetime point (t, x) in d spatial dimensions, d in {1, 2, 3}."""

    t: float
    x: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if not 1 <= len(self.x) <= 3:
            raise ConfigurationError(
                f"spatial dimension must be 1, 2 or 3, got {len(self.x)}"
            )

    @property
    def dim(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class Interval:
    """Causal classification of an event pair plus the signed interval
    (x0-x1)^2 in units of c^2 * time^2."""

    kind: Separation
    value: float


def _check_pair(e0: Event, e1: Event) -> None:
    if e0.dim != e1.dim:
        raise ConfigurationError(
            f"events have mismatched spatial dimensions {e0.dim} != {e1.dim}"
        )


def interval(e0: Event, e1: Event, c: float = 1.0) -> float:
    """Signed interval c^2 (t0-t1)^2 - |x0-x1|^2."""
    _check_pair(e0, e1)
    dx2 = sum((a - b) ** 2 for a, b in zip(e0.x, e1.x))
    return c * c * (e0.t - e1.t) ** 2 - dx2


def classify(e0: Event, e1: Event, c: float = 1.0) -> Interval:
    """Classify a pair as spacelike / timelike / lightlike.

    Lightlike means interval == 0 exactly; callers wanting the delta-limit
    convention (lightlike counts as spacelike) consult the enum explicitly.
    """
    value = interval(e0, e1, c)
    if value == 0.0:
        kind = Separation.LIGHTLIKE
    elif value < 0.0:
        kind = Separation.SPACELIKE
    else:
        kind = Separation.TIMELIKE
    return Interval(kind, value)


def blc_time(apex: Event, x: tuple[float, ...], c: float = 1.0) -> float:
    """Time at which the backward light cone of ``apex`` passes over x."""
    if len(x) != apex.dim:
        raise ConfigurationError(
            f"query point dimension {len(x)} != apex dimension {apex.dim}"
        )
    r = math.sqrt(sum((a - b) ** 2 for a, b in zip(apex.x, x)))
    return apex.t - r / c


@dataclass(frozen=True)
class Lcsh:
    """A light-cone spacelike hypersurface: the upper envelope of the
    backward light cones of ``apexes`` over the flat surface t = t0.

    t0 = -inf gives the pure cone envelope.  ``side`` records the t+/t-
    limit tag threaded through the engine (pre- vs post-reduction state on
    the same geometric surface).
    """

    t0: float = MINUS_INFINITY
    apexes: tuple[Event, ...] = ()
    c: float = 1.0
    side: LimitSide = LimitSide.EXACT

    def __post_init__(self):
        if self.c <= 0:
            raise ConfigurationError(f"speed of light must be positive, got {self.c}")
        dims = {a.dim for a in self.apexes}
        if len(dims) > 1:
            raise ConfigurationError(f"apexes have mixed dimensions {sorted(dims)}")

    @property
    def dim(self) -> int | None:
        return self.apexes[0].dim if self.apexes else None


def surface_time(s: Lcsh, x: tuple[float, ...]) -> float:
    """Pointwise height of the envelope at spatial point x (may be -inf)."""
    t = s.t0
    for apex in s.apexes:
        t = max(t, blc_time(apex, x, s.c))
    return t


def surface_times(s: Lcsh, xs: np.ndarray) -> np.ndarray:
    """Vectorized ``surface_time`` over an (n, d) array of spatial points."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    t = np.full(xs.shape[0], s.t0)
    for apex in s.apexes:
        r = np.linalg.norm(xs - np.asarray(apex.x), axis=1)
        t = np.maximum(t, apex.t - r / s.c)
    return t


def adjoin_apex(s: Lcsh, apex: Event) -> Lcsh:
    """Adjoin a backward light cone; pointwise max keeps this idempotent
    and insertion-order independent."""
    if s.dim is not None and apex.dim != s.dim:
        raise ConfigurationError(
            f"apex dimension {apex.dim} != surface dimension {s.dim}"
        )
    below = surface_time(s, apex.x) - apex.t
    if below > EPS_GEOM:
        raise OrderingViolationError(
            f"apex at t={apex.t}, x={apex.x} lies {below:g} below the surface; "
            "the detector would act on an already-reduced region"
        )
    return replace(s, apexes=s.apexes + (apex,))


def event_side_of_surface(e: Event, s: Lcsh, eps: float = EPS_GEOM) -> SurfaceSide:
    """Which side of the surface an event lies on, with On within ``eps``."""
    t = surface_time(s, e.x)
    if abs(e.t - t) <= eps:
        return SurfaceSide.ON
    return SurfaceSide.PAST if e.t < t else SurfaceSide.FUTURE


def probe_points(
    surfaces: tuple[Lcsh, ...],
    region: tuple[tuple[float, float], ...] | None = None,
    points_per_axis: int = 64,
) -> np.ndarray:
    """Probe grid for surface comparisons: a regular grid over ``region``
    (default: bounding box of all apex positions, padded) plus all apex
    spatial projections."""
    apexes = [a for s in surfaces for a in s.apexes]
    dim = apexes[0].dim if apexes else 1
    if region is None:
        if apexes:
            pts = np.array([a.x for a in apexes])
            tspan = max(a.t for a in apexes) - min(a.t for a in apexes)
            pad = 1.0 + tspan * max(s.c for s in surfaces)
            region = tuple(
                (pts[:, k].min() - pad, pts[:, k].max() + pad) for k in range(dim)
            )
        else:
            region = ((-1.0, 1.0),) * dim
    axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in region]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    if apexes:
        grid = np.concatenate([grid, np.array([a.x for a in apexes])])
    return grid


def is_future_of(
    s1: Lcsh,
    s0: Lcsh,
    region: tuple[tuple[float, float], ...] | None = None,
    points_per_axis: int = 64,
) -> bool:
    """True iff s1 >= s0 at every probed point, strictly somewhere."""
    xs = probe_points((s0, s1), region, points_per_axis)
    t1 = surface_times(s1, xs)
    t0 = surface_times(s0, xs)
    if not np.all(t1 >= t0 - EPS_GEOM):
        return False
    return bool(np.any(t1 > t0 + EPS_GEOM))


def achronality_violation(
    s: Lcsh,
    rng: np.random.Generator,
    n_pairs: int = 10_000,
    region: tuple[tuple[float, float], ...] | None = None,
) -> float:
    """Max interval over random point pairs sampled on the surface.

    Points where the surface is still at t0 = -inf are excluded: the
    formal limit surface is flat there and trivially achronal.
    """
    dim = s.dim or 1
    if region is None:
        xs_all = probe_points((s,), None, 8)
        region = tuple(
            (xs_all[:, k].min(), xs_all[:, k].max()) for k in range(dim)
        )
    lo = np.array([r[0] for r in region])
    hi = np.array([r[1] for r in region])
    xs = lo + rng.random((2 * n_pairs, dim)) * (hi - lo)
    ts = surface_times(s, xs)
    finite = np.isfinite(ts)
    xs, ts = xs[finite], ts[finite]
    half = len(xs) // 2
    if half == 0:
        return -math.inf
    a, b = slice(0, half), slice(half, 2 * half)
    dx2 = np.sum((xs[a] - xs[b]) ** 2, axis=1)
    vals = s.c**2 * (ts[a] - ts[b]) ** 2 - dx2
    return float(vals.max())
