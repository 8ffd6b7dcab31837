"""Population dynamics of the bot-vs-defense-unit combat.

Defense units and active bots interact like a predator-prey system: defense
units grow while they have bots to justify them, bots grow by overwhelming
defense units. The module provides the vector field, its fixed points, the
conserved orbit quantity and its maximum, a fixed-step RK4 integrator, and
the sustained bot population an attacker needs against a given defense level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class StepSizeError(RuntimeError):
    """Raised when the integrator would drive a population to zero or below."""


@dataclass(frozen=True)
class CombatParams:
    """Rate constants of the interaction; all strictly positive.

    alpha1: defense growth rate, alpha2: defense attrition per bot,
    alpha3: bot decay rate, alpha4: bot growth per defense unit engaged.
    """

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float

    def __post_init__(self) -> None:
        for name in ("alpha1", "alpha2", "alpha3", "alpha4"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class PopulationState:
    """Populations at one instant: n_d defense units, n_b bots, time t."""

    n_d: float
    n_b: float
    t: float = 0.0

    def __post_init__(self) -> None:
        if self.n_d < 0 or self.n_b < 0:
            raise ValueError("populations must be nonnegative")
        if self.t < 0:
            raise ValueError("time must be nonnegative")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly spaced sequence of states produced by `integrate`."""

    states: tuple[PopulationState, ...]
    dt: float


def derivatives(state: PopulationState, params: CombatParams) -> tuple[float, float]:
    """Instantaneous growth rates (dN_d/dt, dN_b/dt)."""
    n_d, n_b = state.n_d, state.n_b
    d_nd = params.alpha1 * n_d - params.alpha2 * n_d * n_b
    d_nb = params.alpha4 * n_d * n_b - params.alpha3 * n_b
    return d_nd, d_nb


def equilibria(params: CombatParams) -> list[PopulationState]:
    """The two fixed points: mutual extinction and the sustained-combat level."""
    return [
        PopulationState(0.0, 0.0),
        PopulationState(params.alpha3 / params.alpha4, params.alpha1 / params.alpha2),
    ]


def constant_of_motion(state: PopulationState, params: CombatParams) -> float:
    """Conserved quantity R along any orbit; defined for positive populations.

    R = N_b^a1 * exp(-a2*N_b) * N_d^a3 * exp(-a4*N_d). Evaluated in log space
    to stay finite for large populations.
    """
    if state.n_d <= 0 or state.n_b <= 0:
        raise ValueError("constant of motion requires strictly positive populations")
    log_r = (
        params.alpha1 * math.log(state.n_b)
        - params.alpha2 * state.n_b
        + params.alpha3 * math.log(state.n_d)
        - params.alpha4 * state.n_d
    )
    return math.exp(log_r)


def r_max(params: CombatParams) -> float:
    """Maximum of the conserved quantity, attained at the interior equilibrium."""
    a1, a2, a3, a4 = params.alpha1, params.alpha2, params.alpha3, params.alpha4
    return (a1 / (a2 * math.e)) ** a1 * (a3 / (a4 * math.e)) ** a3


def _rk4_step(
    n_d: float, n_b: float, params: CombatParams, dt: float
) -> tuple[float, float]:
    def f(d: float, b: float) -> tuple[float, float]:
        return (
            params.alpha1 * d - params.alpha2 * d * b,
            params.alpha4 * d * b - params.alpha3 * b,
        )

    k1 = f(n_d, n_b)
    s2 = (n_d + 0.5 * dt * k1[0], n_b + 0.5 * dt * k1[1])
    k2 = f(*s2)
    s3 = (n_d + 0.5 * dt * k2[0], n_b + 0.5 * dt * k2[1])
    k3 = f(*s3)
    s4 = (n_d + dt * k3[0], n_b + dt * k3[1])
    k4 = f(*s4)
    for d, b in (s2, s3, s4):
        if d <= 0 or b <= 0:
            raise StepSizeError("intermediate population went nonpositive; shrink dt")
    new_d = n_d + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    new_b = n_b + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    if new_d <= 0 or new_b <= 0:
        raise StepSizeError("population went nonpositive; shrink dt")
    return new_d, new_b


def integrate(
    initial: PopulationState, params: CombatParams, dt: float, steps: int
) -> Trajectory:
    """Classical fixed-step RK4 solution starting at `initial`.

    Fails fast with StepSizeError if dt is too large to keep both populations
    strictly positive; the caller should retry with a smaller step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps <= 0:
        raise ValueError("steps must be positive")
    if initial.n_d <= 0 or initial.n_b <= 0:
        raise ValueError("initial populations must be strictly positive")
    states = [initial]
    n_d, n_b = initial.n_d, initial.n_b
    for k in range(1, steps + 1):
        n_d, n_b = _rk4_step(n_d, n_b, params, dt)
        states.append(PopulationState(n_d, n_b, initial.t + k * dt))
    return Trajectory(tuple(states), dt)


def required_bots(n_d: float, params: CombatParams) -> float:
    """Sustained bot population needed against n_d engaged defense units.

    Linear in n_d with slope a1*a4/(a2*a3), the sustained-combat population
    ratio; doubling the defense units doubles the bots the attacker must keep
    active (and pay for).
    """
    if n_d <= 0:
        raise ValueError("n_d must be strictly positive")
    ratio = (params.alpha1 * params.alpha4) / (params.alpha2 * params.alpha3)
    return n_d * ratio
