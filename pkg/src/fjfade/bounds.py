"""Two-sided convergence-rate bounds for doubly stochastic weights.

For a doubly stochastic W with second singular value sigma_max in (0, 1)
and a vanishing schedule, the worst-case ratio |x_t - x_ss 1| / |x_0 - x_ss 1|
is sandwiched between

  lower(t) = Lambda_0^{t-1} sigma^t
           + sum_{k<t} Lambda_{k+1}^{t-1} lambda_k sigma^{t-1-k}

  upper(t) = Lambda_0^{t-1} (sigma^t + 1 - Lambda_t^inf)
           + sum_{k<t} Lambda_{k+1}^{t-1} lambda_k (sigma^{t-1-k} + 1 - Lambda_t^inf)
           + sum_{k>=t} Lambda_{k+1}^inf lambda_k

and their difference (the gap) does not depend on sigma_max. The truncated
tail of upper() always includes its certified remainder, so the reported
value never undershoots the true bound. Note that upper(t) vanishes as t
grows only for summable schedules; for the hyperbolic schedule it tends
to 1 while lower(t) still decays like 1/t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .errors import (
    AsymmetricWeights,
    ConsensusInitialCondition,
    InvalidParameter,
    NonVanishingSchedule,
)
from .network import SpectralData
from .schedules import (
    DEFAULT_TRUNCATION,
    CompetitionSchedule,
    TruncationPolicy,
    infinite_products,
    schedule_values,
    suffix_products,
)


def _check_sigma(sigma_max: float) -> float:
    sigma_max = float(sigma_max)
    if not 0.0 < sigma_max < 1.0:
        raise InvalidParameter(f"sigma_max must lie in (0, 1), got {sigma_max}")
    return sigma_max


def _check_t(t: int) -> int:
    if t < 1:
        raise InvalidParameter(f"bounds are defined for t >= 1, got {t}")
    return int(t)


def _check_vanishing(schedule: CompetitionSchedule) -> None:
    if not schedule.vanishing:
        raise NonVanishingSchedule("rate bounds require lambda_t -> 0")


def lower_bound(sigma_max: float, schedule: CompetitionSchedule, t: int) -> float:
    """Worst-case ratio lower bound; a finite sum, no truncation involved."""
    sigma_max = _check_sigma(sigma_max)
    t = _check_t(t)
    _check_vanishing(schedule)
    r = suffix_products(schedule, t - 1)
    lam = schedule_values(schedule, 0, t)
    pows = sigma_max ** np.arange(t, -1, -1)
    return float(r[0] * pows[0] + np.sum(r[1:] * lam * pows[1:]))


def lower_bound_series(sigma_max: float, schedule: CompetitionSchedule, horizon: int) -> np.ndarray:
    """lower_bound for every t in 0..horizon via the scalar recurrence.

    The lower bound is realized by the trajectory aligned with the second
    singular direction, so it satisfies the same one-step recursion
    m_{t+1} = sigma (1 - lambda_t) m_t + lambda_t with m_0 = 1.
    """
    sigma_max = _check_sigma(sigma_max)
    _check_vanishing(schedule)
    if horizon < 0:
        raise InvalidParameter(f"horizon must be >= 0, got {horizon}")
    lam = schedule_values(schedule, 0, max(horizon, 1))
    out = np.empty(horizon + 1)
    out[0] = 1.0
    m = 1.0
    for t in range(horizon):
        m = sigma_max * (1.0 - lam[t]) * m + lam[t]
        out[t + 1] = m
    return out


def upper_bound(
    sigma_max: float,
    schedule: CompetitionSchedule,
    t: int,
    trunc: TruncationPolicy = DEFAULT_TRUNCATION,
) -> float:
    """Worst-case ratio upper bound, including the certified tail remainder."""
    sigma_max = _check_sigma(sigma_max)
    t = _check_t(t)
    _check_vanishing(schedule)
    table = infinite_products(schedule, trunc)
    r = suffix_products(schedule, t - 1)
    lam = schedule_values(schedule, 0, t)
    pows = sigma_max ** np.arange(t, -1, -1)
    linf_t = table.lam_to_inf(t)
    aut = r[0] * (pows[0] + 1.0 - linf_t)
    inp = np.sum(r[1:] * lam * (pows[1:] + 1.0 - linf_t))
    return float(aut + inp + table.tail_sum(t))


def gap(
    schedule: CompetitionSchedule,
    t: int,
    trunc: TruncationPolicy = DEFAULT_TRUNCATION,
) -> float:
    """upper_bound - lower_bound, evaluated directly; independent of sigma_max.

    gap(t) = Lambda_0^{t-1} - Lambda_0^inf
           + sum_{k<t} (Lambda_{k+1}^{t-1} - Lambda_{k+1}^inf) lambda_k
           + sum_{k>=t} Lambda_{k+1}^inf lambda_k
    """
    t = _check_t(t)
    _check_vanishing(schedule)
    table = infinite_products(schedule, trunc)
    r = suffix_products(schedule, t - 1)
    lam = schedule_values(schedule, 0, t)
    linfs = table.lam_to_inf_array(np.arange(1, t + 1))
    finite = (r[0] - table.lam_to_inf(0)) + np.sum((r[1:] - linfs) * lam)
    return float(finite + table.tail_sum(t))


def empirical_ratio(traj: Trajectory) -> np.ndarray:
    """d(t) / d(0) for a simulated trajectory."""
    d0 = traj.distances[0]
    if d0 < 1e-14:
        raise ConsensusInitialCondition("x0 is numerically a consensus; the ratio is undefined")
    return traj.distances / d0


def worst_case_initial_condition(spectral: SpectralData, x_ss_target: float) -> np.ndarray:
    """x0 = x_ss_target 1 + v2, the initial condition attaining the lower bound.

    Requires symmetric weights so v2 is an eigenvector; with a nonnegative
    second eigenvalue (e.g. lazy Metropolis) the simulated ratio from this
    x0 reproduces lower_bound(t) exactly.
    """
    if not spectral.symmetric:
        raise AsymmetricWeights("the worst-case construction needs symmetric weights")
    return x_ss_target + spectral.v2


@dataclass(frozen=True, eq=False)
class RateEnvelope:
    """Upper/lower bound series over a grid of steps, plus their gap."""

    sigma_max: float
    schedule: CompetitionSchedule
    ts: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    gap: np.ndarray
    trunc_report: dict

    def __post_init__(self):
        if (self.lower > self.upper + 1e-12).any():
            raise InvalidParameter("lower bound exceeds upper bound")
        if self.schedule.summable and len(self.ts) > 1:
            if self.upper[-1] > self.upper[0] + 1e-12:
                raise InvalidParameter("upper bound failed to decay for a summable schedule")


def rate_envelope(
    sigma_max: float,
    schedule: CompetitionSchedule,
    ts,
    trunc: TruncationPolicy = DEFAULT_TRUNCATION,
) -> RateEnvelope:
    """Evaluate both bounds and the gap on an increasing grid of steps >= 1."""
    sigma_max = _check_sigma(sigma_max)
    _check_vanishing(schedule)
    ts = np.asarray(ts, dtype=int)
    if ts.size == 0 or ts.min() < 1:
        raise InvalidParameter("ts must be a nonempty grid of steps >= 1")
    if (np.diff(ts) <= 0).any():
        raise InvalidParameter("ts must be strictly increasing")
    upper = np.array([upper_bound(sigma_max, schedule, int(t), trunc) for t in ts])
    lower = np.array([lower_bound(sigma_max, schedule, int(t)) for t in ts])
    gaps = np.array([gap(schedule, int(t), trunc) for t in ts])
    report = infinite_products(schedule, trunc).describe()
    return RateEnvelope(
        sigma_max=sigma_max,
        schedule=schedule,
        ts=ts,
        upper=upper,
        lower=lower,
        gap=gaps,
        trunc_report=report,
    )
