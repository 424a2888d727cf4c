"""Time evolution of quantum-memory error and stored-entanglement fidelity.

A node's state is a point ``eta = (eps, 1 - F)`` in the plane. Memory error
grows and fidelity decays with storage time under one of two drift laws:

* ``linear``: ``eps(t) = eps0 + r*t`` and ``F(t) = F0 - r*t``, clamped to [0, 1]
* ``exponential``: ``eps(t) = 1 - (1 - eps0)*exp(-t/T)`` and
  ``F(t) = floor + (F0 - floor)*exp(-t/T)``

The floor defaults to 0.25, the Bell-state fidelity of the maximally mixed
two-qubit state. Time is measured in abstract ticks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

DRIFT_KINDS = ("linear", "exponential")
MAXIMALLY_MIXED_FIDELITY = 0.25


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def _check_unit(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _check_dt(dt):
    if not dt >= 0:
        raise ValueError(f"storage interval must be non-negative, got {dt}")


@dataclass(frozen=True)
class DriftModel:
    kind: str = "linear"
    rate: float = 0.0
    decay_time: float = 1.0
    fidelity_floor: float = MAXIMALLY_MIXED_FIDELITY

    def __post_init__(self):
        if self.kind not in DRIFT_KINDS:
            raise ValueError(f"unknown drift model {self.kind!r}; expected one of {DRIFT_KINDS}")
        if not self.rate >= 0:
            raise ValueError(f"drift rate must be non-negative, got {self.rate}")
        if not self.decay_time > 0:
            raise ValueError(f"decay time must be positive, got {self.decay_time}")
        _check_unit("fidelity_floor", self.fidelity_floor)


@dataclass(frozen=True)
class NodeMemoryState:
    zeta0: float
    f0: float
    t0: float = 0.0
    model: DriftModel = DriftModel()

    def __post_init__(self):
        _check_unit("zeta0", self.zeta0)
        _check_unit("f0", self.f0)


@dataclass(frozen=True)
class StateVector:
    eps: float
    one_minus_f: float


@dataclass(frozen=True)
class ChangeVector:
    d_eps: float
    d_one_minus_f: float


@dataclass(frozen=True)
class Thresholds:
    """Feasibility bounds for a node pair.

    An edge is usable only if the memory-error gap is at most ``eps_crit``,
    the fidelity gap at most ``1 - f_delta``, the plane distance at most
    ``d_max`` and both fidelities at least ``f_crit``.
    """

    d_max: float
    eps_crit: float = 1.0
    f_crit: float = 0.98
    f_delta: float = 0.0
    p_max: float = 1.0

    def __post_init__(self):
        if not self.d_max > 0:
            raise ValueError(f"d_max must be positive, got {self.d_max}")
        for name in ("eps_crit", "f_crit", "f_delta"):
            _check_unit(name, getattr(self, name))
        if not 0.0 < self.p_max <= 1.0:
            raise ValueError(f"p_max must lie in (0, 1], got {self.p_max}")


def evolve_error(state: NodeMemoryState, dt: float) -> float:
    _check_dt(dt)
    if dt == 0:
        return state.zeta0
    m = state.model
    if m.kind == "linear":
        return _clamp(state.zeta0 + m.rate * dt)
    return 1.0 - (1.0 - state.zeta0) * math.exp(-dt / m.decay_time)


def evolve_fidelity(state: NodeMemoryState, dt: float) -> float:
    _check_dt(dt)
    if dt == 0:
        return state.f0
    m = state.model
    if m.kind == "linear":
        return _clamp(state.f0 - m.rate * dt)
    return m.fidelity_floor + (state.f0 - m.fidelity_floor) * math.exp(-dt / m.decay_time)


def eta_at(state: NodeMemoryState, dt: float) -> StateVector:
    return StateVector(evolve_error(state, dt), 1.0 - evolve_fidelity(state, dt))


def change_vector(state: NodeMemoryState, dt: float) -> ChangeVector:
    """Displacement of the state vector over ``[t0, t0 + dt]``."""
    start, end = eta_at(state, 0.0), eta_at(state, dt)
    return ChangeVector(end.eps - start.eps, end.one_minus_f - start.one_minus_f)


def pair_distance(a: StateVector, b: StateVector) -> float:
    return math.hypot(a.eps - b.eps, a.one_minus_f - b.one_minus_f)


def pair_error(zeta_i: float, zeta_j: float) -> float:
    return abs(zeta_i - zeta_j)


def fidelity_difference(f_i: float, f_j: float) -> float:
    return abs((1.0 - f_i) - (1.0 - f_j))


def usability(omega_i: ChangeVector, omega_j: ChangeVector, d_max: float) -> float:
    """Usability of the stored entanglement between two nodes.

    1 when both nodes drifted identically, falling linearly to 0 once the
    drift mismatch reaches ``d_max``.
    """
    if not d_max > 0:
        raise ValueError(f"d_max must be positive, got {d_max}")
    gap = math.hypot(omega_i.d_eps - omega_j.d_eps, omega_i.d_one_minus_f - omega_j.d_one_minus_f)
    if gap >= d_max:
        return 0.0
    return 1.0 - gap / d_max


def success_probability(d: float, th: Thresholds) -> float:
    """Affine map from plane distance to success probability.

    Strictly positive on ``[0, d_max]`` (``p_max / 2`` at the boundary) and
    zero beyond it.
    """
    if not d >= 0:
        raise ValueError(f"distance must be non-negative, got {d}")
    if d > th.d_max:
        return 0.0
    return th.p_max * (1.0 - d / (2.0 * th.d_max))


def path_usability(omegas: Sequence[float]) -> float:
    result = 1.0
    for w in omegas:
        result *= w
    return result


@dataclass(frozen=True)
class PairAssessment:
    p: float
    omega: float
    feasible: bool
    distance: float


def assess_pair(a: NodeMemoryState, b: NodeMemoryState, dt: float, th: Thresholds) -> PairAssessment:
    """Success probability and usability of the pair ``(a, b)`` after ``dt``.

    Infeasible pairs get ``p = 0``; ``omega`` is reported either way.
    """
    ea, eb = eta_at(a, dt), eta_at(b, dt)
    fa, fb = 1.0 - ea.one_minus_f, 1.0 - eb.one_minus_f
    d = pair_distance(ea, eb)
    feasible = (
        pair_error(ea.eps, eb.eps) <= th.eps_crit
        and fidelity_difference(fa, fb) <= 1.0 - th.f_delta
        and d <= th.d_max
        and min(fa, fb) >= th.f_crit
    )
    omega = usability(change_vector(a, dt), change_vector(b, dt), th.d_max)
    p = success_probability(d, th) if feasible else 0.0
    return PairAssessment(p, omega, feasible, d)
