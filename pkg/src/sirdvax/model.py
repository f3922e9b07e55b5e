"""Normalized SIRD dynamics under a rate- and supply-limited vaccination policy.

All quantities are population fractions (the model is invariant under the
population size), and time is measured in units of the mean infectious period,
so the recovery and death probabilities per unit time sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError

#: Allowed complementarity gap between the recovery and death rates.
ALPHA_BETA_TOL = 1e-12

#: Allowed excursion of a compartment outside [0, 1] (floating-point drift).
SIMPLEX_TOL = 1e-9

#: Allowed deviation of the compartment sum from 1.
SIMPLEX_SUM_TOL = 1e-6


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


@dataclass(frozen=True)
class EpidemicParams:
    """Biological and contact constants of the SIRD dynamics.

    ``alpha`` and ``beta`` are the per-unit-time probabilities of recovery and
    of death (or severe illness) for an infected individual and must be
    complementary.  After validation ``beta`` is stored as ``1 - alpha`` so the
    identity holds exactly in floating point; the admitted input gap is
    ``ALPHA_BETA_TOL``.

    ``r`` is the contact intensity (contacts per unit time) and ``eps`` the
    probability of infection on contact with an infected individual.
    """

    alpha: float
    beta: float
    r: float
    eps: float

    def __post_init__(self) -> None:
        _require(self.alpha >= 0.0, f"alpha must be nonnegative, got {self.alpha}")
        _require(self.beta >= 0.0, f"beta must be nonnegative, got {self.beta}")
        _require(
            abs(self.alpha + self.beta - 1.0) <= ALPHA_BETA_TOL,
            f"alpha + beta must equal 1 within {ALPHA_BETA_TOL}, "
            f"got {self.alpha + self.beta}",
        )
        _require(self.r > 0.0, f"r must be positive, got {self.r}")
        _require(0.0 < self.eps < 1.0, f"eps must lie in (0, 1), got {self.eps}")
        object.__setattr__(self, "beta", 1.0 - self.alpha)

    @property
    def transmission_rate(self) -> float:
        """Slope of the infection intensity in the infected fraction.

        Equals -r*ln(1 - eps).  With the removal rate normalized to one this
        is also the basic reproduction number of the unvaccinated model.
        """
        return -self.r * math.log1p(-self.eps)


@dataclass(frozen=True)
class CostParams:
    """Unit costs: one vaccine dose (a), one mild case (b), one severe case (c)."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            value = getattr(self, name)
            _require(value >= 0.0, f"{name} must be nonnegative, got {value}")


@dataclass(frozen=True)
class VaccinationPolicy:
    """Resource parameters and duration of the vaccination program.

    k    maximum absolute vaccination rate of the medical system
         (population fraction per unit time);
    l    probability that a healthy person agrees to be vaccinated;
    m    available vaccine stock (population fraction); ``math.inf`` means
         no supply constraint;
    tau  program duration (time units).
    """

    k: float
    l: float
    m: float
    tau: float

    def __post_init__(self) -> None:
        _require(self.k >= 0.0, f"k must be nonnegative, got {self.k}")
        _require(0.0 <= self.l <= 1.0, f"l must lie in [0, 1], got {self.l}")
        _require(self.m >= 0.0, f"m must be nonnegative, got {self.m}")
        _require(self.tau >= 0.0, f"tau must be nonnegative, got {self.tau}")

    @property
    def supply_limited(self) -> bool:
        return math.isfinite(self.m)


@dataclass(frozen=True)
class SirdState:
    """Compartment fractions: susceptible, infected, immune, dead."""

    s: float
    i: float
    rho: float
    d: float

    def __post_init__(self) -> None:
        for name in ("s", "i", "rho", "d"):
            value = getattr(self, name)
            _require(
                -SIMPLEX_TOL <= value <= 1.0 + SIMPLEX_TOL,
                f"{name} must lie in [0, 1] (tolerance {SIMPLEX_TOL}), got {value}",
            )
        total = self.s + self.i + self.rho + self.d
        _require(
            abs(total - 1.0) <= SIMPLEX_SUM_TOL,
            f"compartments must sum to 1 within {SIMPLEX_SUM_TOL}, got {total}",
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.s, self.i, self.rho, self.d)


@dataclass(frozen=True)
class AugmentedState:
    """A SIRD state plus accumulated cost J and accumulated vaccine usage V."""

    state: SirdState
    J: float
    V: float

    def __post_init__(self) -> None:
        _require(self.J >= 0.0, f"accumulated cost J must be nonnegative, got {self.J}")
        _require(self.V >= 0.0, f"accumulated usage V must be nonnegative, got {self.V}")

    def as_vector(self) -> tuple[float, float, float, float, float, float]:
        s, i, rho, d = self.state.as_tuple()
        return (s, i, rho, d, self.J, self.V)


@dataclass(frozen=True)
class Scenario:
    """Epidemic constants, unit costs, initial state, and planning horizon."""

    epidemic: EpidemicParams
    cost: CostParams
    initial: SirdState
    T: float

    def __post_init__(self) -> None:
        _require(self.T > 0.0, f"planning horizon T must be positive, got {self.T}")
        _require(self.initial.i >= 0.0, "initial infected fraction must be nonnegative")

    def augmented_initial(self) -> AugmentedState:
        return AugmentedState(state=self.initial, J=0.0, V=0.0)


def infection_intensity(i: float, params: EpidemicParams) -> float:
    """Probability per unit time for one susceptible to become infected.

    Linear in the infected fraction: ``transmission_rate * i``.

    Raises DomainError outside 0 <= i <= 1; a caller handing in an
    out-of-range fraction has a corrupted state, not a modeling choice.
    """
    if i < 0.0 or i > 1.0:
        raise DomainError(f"infected fraction must lie in [0, 1], got {i}")
    return params.transmission_rate * i


def exact_infection_probability(i: float, dt: float, params: EpidemicParams) -> float:
    """Exact contact-model probability of infection over a finite interval.

    Returns ``1 - (1 - eps)^(r*dt*i)``.  This is the quantity the linear
    intensity approximates; it is used to validate that approximation and
    never inside the dynamics.
    """
    if dt < 0.0:
        raise DomainError(f"interval length must be nonnegative, got {dt}")
    if i < 0.0 or i > 1.0:
        raise DomainError(f"infected fraction must lie in [0, 1], got {i}")
    # 1 - e^x with x = r*dt*i*ln(1-eps) <= 0, computed without cancellation
    return -math.expm1(params.r * dt * i * math.log1p(-params.eps))


def vaccination_rate(
    t: float, s: float, policy: VaccinationPolicy, exhausted: bool = False
) -> float:
    """Vaccination rate at time t: min{k, l*s} while the program runs, else 0.

    ``exhausted`` reports that the vaccine stock has run out; the event is
    detected by the integrator, keeping this function pure and total.
    The program is live on the closed interval t <= tau.
    """
    if exhausted or t > policy.tau:
        return 0.0
    return min(policy.k, policy.l * s)


def treatment_cost_rate(epidemic: EpidemicParams, cost: CostParams) -> float:
    """Expected treatment cost per infected person per unit time.

    Mild and severe outcomes are weighted by their rates: alpha*b + beta*c.
    Operations that consume it accept an override for studying alternative
    weightings.
    """
    return epidemic.alpha * cost.b + epidemic.beta * cost.c


def _rhs_values(
    s: float,
    i: float,
    v: float,
    epidemic: EpidemicParams,
    cost_a: float,
    treatment_coeff: float,
) -> tuple[float, float, float, float, float, float]:
    """Core derivative algebra on already-clamped compartment values."""
    infections = s * (epidemic.transmission_rate * i)
    return (
        -infections - v,
        infections - i,
        epidemic.alpha * i + v,
        epidemic.beta * i,
        cost_a * v + treatment_coeff * i,
        v,
    )


def augmented_rhs(
    t: float,
    y: AugmentedState,
    scenario: Scenario,
    policy: VaccinationPolicy,
    exhausted: bool = False,
    treatment_coeff: float | None = None,
) -> tuple[float, float, float, float, float, float]:
    """Time derivative of (s, i, rho, d, J, V).

    The four compartment derivatives sum to zero by construction.  Compartment
    values are clamped to [0, 1] before evaluation; excursions beyond the
    drift tolerance raise DomainError.
    """
    s, i, rho, d = y.state.as_tuple()
    for name, value in (("s", s), ("i", i), ("rho", rho), ("d", d)):
        if value < -SIMPLEX_TOL or value > 1.0 + SIMPLEX_TOL:
            raise DomainError(
                f"compartment {name} outside [0, 1] beyond tolerance: {value}"
            )
    s = min(max(s, 0.0), 1.0)
    i = min(max(i, 0.0), 1.0)
    if treatment_coeff is None:
        treatment_coeff = treatment_cost_rate(scenario.epidemic, scenario.cost)
    v = vaccination_rate(t, s, policy, exhausted)
    return _rhs_values(s, i, v, scenario.epidemic, scenario.cost.a, treatment_coeff)
