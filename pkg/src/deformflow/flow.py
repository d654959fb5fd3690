"""Relaxation flows of the deformation factor over a grid of speed ratios.

Three first-order regimes and one second-order regime share a common
integrator:

* ``subcritical-linear`` / ``supercritical-linear``:
  dC/dtau = -alpha beta^2 (C - target), where the target is pi below the
  critical ratio and pi + K/(beta c)^2 at or above it.  Samples exactly at
  the critical ratio use the subcritical target (deterministic tie-break;
  the audit table notes that the two targets disagree there unless K = 0).
* ``conformal-nonlinear``: dC/dtau = -2 k / C, which drives C to 0 in the
  finite time tau* = C(0)^2 / (4 k).
* ``second-order``: d^2C/dtau^2 + alpha beta^2 (C - pi) = 0, an undamped
  oscillation; the first-order flows are its overdamped limit.

Grid samples are decoupled, so the integrator advances each one
independently with classical rk4 (fixed step) or step-doubling rk4
(adaptive).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .deform import c_supercritical_limit, critical_beta

__all__ = [
    "SUBCRITICAL_LINEAR",
    "SUPERCRITICAL_LINEAR",
    "CONFORMAL_NONLINEAR",
    "SECOND_ORDER",
    "REGIMES",
    "LINEAR_REGIMES",
    "METHODS",
    "FlowDomainError",
    "FlowConfig",
    "VelocityGrid",
    "FlowState",
    "Trajectory",
    "relaxation_target",
    "rhs",
    "analytic_linear",
    "analytic_conformal",
    "integrate",
    "linearized_alpha",
    "relaxation_time",
    "second_order_solution",
]

SUBCRITICAL_LINEAR = "subcritical-linear"
SUPERCRITICAL_LINEAR = "supercritical-linear"
CONFORMAL_NONLINEAR = "conformal-nonlinear"
SECOND_ORDER = "second-order"
REGIMES = (SUBCRITICAL_LINEAR, SUPERCRITICAL_LINEAR, CONFORMAL_NONLINEAR, SECOND_ORDER)
LINEAR_REGIMES = (SUBCRITICAL_LINEAR, SUPERCRITICAL_LINEAR)

RK4 = "rk4"
ADAPTIVE_RK = "adaptive-rk"
METHODS = (RK4, ADAPTIVE_RK)

# Relative slack used when comparing accumulated times against boundaries.
_TIME_RTOL = 1e-12


class FlowDomainError(ArithmeticError):
    """The conformal flow left its domain: C reaches 0 at finite tau*."""

    def __init__(self, message: str, beta: float | None = None, tau_star: float | None = None):
        super().__init__(message)
        self.beta = beta
        self.tau_star = tau_star


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class FlowConfig:
    """Parameters shared by every flow run.

    ``dt = None`` asks the integrator for its default step,
    min(1e-3, 0.01 / kappa_max) with kappa_max the fastest linear rate on
    the grid (the conformal regime substitutes its initial rate scale).
    """

    regime: str = SUBCRITICAL_LINEAR
    alpha: float = 1.0
    c: float = 1.0
    K: float = 0.0
    k_curv: float = 1.0
    dt: float | None = None
    method: str = RK4
    tol: float = 1e-10

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}; expected one of {REGIMES}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not (_require_finite("alpha", self.alpha) > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if not (_require_finite("c", self.c) > 0.0):
            raise ValueError(f"c must be positive, got {self.c!r}")
        if not (_require_finite("K", self.K) >= 0.0):
            raise ValueError(f"K must be >= 0, got {self.K!r}")
        if not (_require_finite("k_curv", self.k_curv) > 0.0):
            raise ValueError(f"k_curv must be positive, got {self.k_curv!r}")
        if self.dt is not None and not (_require_finite("dt", self.dt) > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (_require_finite("tol", self.tol) > 0.0):
            raise ValueError(f"tol must be positive, got {self.tol!r}")


@dataclass(frozen=True)
class VelocityGrid:
    """Strictly increasing speed-ratio samples in [0, 1]."""

    samples: tuple[float, ...]

    def __post_init__(self) -> None:
        samples = tuple(float(b) for b in self.samples)
        object.__setattr__(self, "samples", samples)
        if len(samples) < 2:
            raise ValueError(f"grid needs at least 2 samples, got {len(samples)}")
        for b in samples:
            if not 0.0 <= b <= 1.0:
                raise ValueError(f"grid samples must lie in [0, 1], got {b!r}")
        for lo, hi in zip(samples, samples[1:]):
            if not hi > lo:
                raise ValueError("grid samples must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def beta_max(self) -> float:
        return self.samples[-1]

    @classmethod
    def uniform(cls, beta_max: float, n: int, beta_min: float = 0.0) -> "VelocityGrid":
        """Evenly spaced grid over [beta_min, beta_max] with exact endpoints."""
        if n < 2:
            raise ValueError(f"grid needs at least 2 samples, got {n}")
        if not 0.0 <= beta_min < beta_max <= 1.0:
            raise ValueError(
                f"need 0 <= beta_min < beta_max <= 1, got [{beta_min!r}, {beta_max!r}]"
            )
        step = (beta_max - beta_min) / (n - 1)
        samples = [beta_min + i * step for i in range(n)]
        samples[0] = beta_min
        samples[-1] = beta_max
        return cls(tuple(samples))


@dataclass(frozen=True)
class FlowState:
    """One snapshot: the profile of C over the grid at time tau."""

    tau: float
    profile: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tau) and self.tau >= 0.0):
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")
        profile = tuple(float(v) for v in self.profile)
        object.__setattr__(self, "profile", profile)
        if not profile:
            raise ValueError("profile must not be empty")
        for v in profile:
            if not math.isfinite(v):
                raise ValueError(f"profile values must be finite, got {v!r}")


@dataclass(frozen=True)
class Trajectory:
    """Ordered snapshots of one flow run on a fixed grid."""

    grid: VelocityGrid
    config: FlowConfig
    states: tuple[FlowState, ...]

    def __post_init__(self) -> None:
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        if not states:
            raise ValueError("trajectory needs at least one state")
        n = self.grid.n
        for st in states:
            if len(st.profile) != n:
                raise ValueError(
                    f"state at tau = {st.tau!r} has {len(st.profile)} values for a grid of {n}"
                )
        for a, b in zip(states, states[1:]):
            if not b.tau > a.tau:
                raise ValueError("snapshot times must be strictly increasing")

    @property
    def taus(self) -> tuple[float, ...]:
        return tuple(st.tau for st in self.states)


def relaxation_target(beta: float, cfg: FlowConfig) -> float:
    """Fixed point of the linear flow at one sample.

    pi below (and exactly at) the critical ratio, pi + K/(beta c)^2 above.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    if beta <= critical_beta():
        return math.pi
    return c_supercritical_limit(beta, cfg.K, cfg.c)


def rhs(C: float, beta: float, cfg: FlowConfig) -> float:
    """Instantaneous dC/dtau for the configured first-order regime."""
    _require_finite("C", C)
    if cfg.regime in LINEAR_REGIMES:
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
        return -cfg.alpha * beta * beta * (C - relaxation_target(beta, cfg))
    if cfg.regime == CONFORMAL_NONLINEAR:
        if C <= 0.0:
            raise FlowDomainError(
                f"conformal derivative undefined at C <= 0 (C = {C!r})", beta=beta
            )
        return -2.0 * cfg.k_curv / C
    raise ValueError(
        "second-order regime evolves the pair (C, dC/dtau); "
        "use integrate or second_order_solution"
    )


def analytic_linear(beta: float, tau: float, C_init: float, cfg: FlowConfig) -> float:
    """Closed-form linear relaxation target + (C_init - target) exp(-kappa tau)."""
    if cfg.regime not in LINEAR_REGIMES:
        raise ValueError(f"analytic_linear requires a linear regime, got {cfg.regime!r}")
    if not (_require_finite("tau", tau) >= 0.0):
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    _require_finite("C_init", C_init)
    target = relaxation_target(beta, cfg)
    kappa = cfg.alpha * beta * beta
    return target + (C_init - target) * math.exp(-kappa * tau)


def analytic_conformal(tau: float, C_init: float, cfg: FlowConfig) -> float:
    """Closed-form conformal decay sqrt(C_init^2 - 4 k tau).

    Defined for tau < tau* = C_init^2 / (4 k); at or beyond tau* the flow
    has exhausted its domain and a FlowDomainError is raised.
    """
    if cfg.regime != CONFORMAL_NONLINEAR:
        raise ValueError(f"analytic_conformal requires the conformal regime, got {cfg.regime!r}")
    if not (_require_finite("tau", tau) >= 0.0):
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    if not (_require_finite("C_init", C_init) > 0.0):
        raise ValueError(f"conformal flow requires C_init > 0, got {C_init!r}")
    k = cfg.k_curv
    tau_star = C_init * C_init / (4.0 * k)
    if tau >= tau_star:
        raise FlowDomainError(
            f"conformal flow exhausts its domain at tau* = {tau_star!r} "
            f"(requested tau = {tau!r})",
            tau_star=tau_star,
        )
    return math.sqrt(C_init * C_init - 4.0 * k * tau)


def linearized_alpha(k_curv: float) -> float:
    """Sensitivity 2 k / pi^2 of the conformal derivative at C = pi.

    The conformal flow has no fixed point at pi, but nearby trajectories
    separate at this rate, which plays the role of the linear coefficient
    alpha for small departures from pi.
    """
    if not (_require_finite("k_curv", k_curv) > 0.0):
        raise ValueError(f"k_curv must be positive, got {k_curv!r}")
    return 2.0 * k_curv / (math.pi * math.pi)


def relaxation_time(beta: float, alpha: float) -> float:
    """Linear-flow e-folding time 1 / (alpha beta^2); diverges as beta -> 0."""
    if not (_require_finite("alpha", alpha) > 0.0):
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"relaxation time requires 0 < beta <= 1, got {beta!r}")
    return 1.0 / (alpha * beta * beta)


def second_order_solution(beta: float, alpha: float, deltaC0: float, tau: float) -> float:
    """Undamped oscillation pi + deltaC0 cos(omega tau), omega = beta sqrt(alpha).

    Starts from C = pi + deltaC0 with zero initial rate.
    """
    if not (_require_finite("alpha", alpha) > 0.0):
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    if not (_require_finite("tau", tau) >= 0.0):
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    _require_finite("deltaC0", deltaC0)
    omega = beta * math.sqrt(alpha)
    return math.pi + deltaC0 * math.cos(omega * tau)


# ---------------------------------------------------------------------------
# integrator internals


def _snapshot_times(tau_end: float, snapshot_every: float) -> list[float]:
    times = [0.0]
    j = 1
    while True:
        t = j * snapshot_every
        if t >= tau_end * (1.0 - _TIME_RTOL):
            break
        times.append(t)
        j += 1
    times.append(tau_end)
    return times


def _split_segment(delta: float, dt: float) -> tuple[int, float]:
    """Number of full dt steps across delta plus the remainder step."""
    n = int(math.floor(delta / dt + 1e-9))
    rem = delta - n * dt
    if rem <= 1e-9 * dt:
        rem = 0.0
    return n, rem


def _rk4_linear_segment(y: float, kappa: float, target: float, h: float, n: int) -> float:
    # Hot loop: stages are inlined, the derivative is -kappa (y - target).
    z = -kappa
    hh = 0.5 * h
    h6 = h / 6.0
    for _ in range(n):
        d1 = z * (y - target)
        d2 = z * (y + hh * d1 - target)
        d3 = z * (y + hh * d2 - target)
        d4 = z * (y + h * d3 - target)
        y += h6 * (d1 + 2.0 * (d2 + d3) + d4)
    return y


def _rk4_conformal_segment(
    y: float, k2: float, h: float, n: int, beta: float, tau_star: float
) -> float:
    def fail() -> FlowDomainError:
        return FlowDomainError(
            f"conformal flow exhausts its domain at tau* = {tau_star!r} (beta = {beta!r})",
            beta=beta,
            tau_star=tau_star,
        )

    hh = 0.5 * h
    h6 = h / 6.0
    for _ in range(n):
        if y <= 0.0:
            raise fail()
        d1 = -k2 / y
        s = y + hh * d1
        if s <= 0.0:
            raise fail()
        d2 = -k2 / s
        s = y + hh * d2
        if s <= 0.0:
            raise fail()
        d3 = -k2 / s
        s = y + h * d3
        if s <= 0.0:
            raise fail()
        d4 = -k2 / s
        y += h6 * (d1 + 2.0 * (d2 + d3) + d4)
    if y <= 0.0:
        raise fail()
    return y


def _rk4_pair_segment(
    y: float, w: float, kappa: float, h: float, n: int
) -> tuple[float, float]:
    pi = math.pi
    hh = 0.5 * h
    h6 = h / 6.0
    for _ in range(n):
        a1 = w
        b1 = -kappa * (y - pi)
        a2 = w + hh * b1
        b2 = -kappa * (y + hh * a1 - pi)
        a3 = w + hh * b2
        b3 = -kappa * (y + hh * a2 - pi)
        a4 = w + h * b3
        b4 = -kappa * (y + h * a3 - pi)
        y += h6 * (a1 + 2.0 * (a2 + a3) + a4)
        w += h6 * (b1 + 2.0 * (b2 + b3) + b4)
    return y, w


def _adaptive_scalar(deriv, y: float, delta: float, h0: float, tol: float) -> float:
    """Step-doubling rk4 over one segment with mixed abs/rel control."""

    def step(v: float, h: float) -> float:
        d1 = deriv(v)
        d2 = deriv(v + 0.5 * h * d1)
        d3 = deriv(v + 0.5 * h * d2)
        d4 = deriv(v + h * d3)
        return v + h / 6.0 * (d1 + 2.0 * (d2 + d3) + d4)

    t = 0.0
    h = min(h0, delta)
    h_floor = 1e-14 * max(delta, 1.0)
    while t < delta * (1.0 - _TIME_RTOL):
        h = min(h, delta - t)
        big = step(y, h)
        half = step(step(y, 0.5 * h), 0.5 * h)
        err = abs(half - big) / 15.0
        scale = tol * (1.0 + abs(half))
        if err <= scale or h <= h_floor:
            y = half
            t += h
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * (scale / err) ** 0.2)
            h *= max(grow, 0.2)
        else:
            h *= max(0.2, 0.9 * (scale / err) ** 0.2)
    return y


def _adaptive_pair(
    kappa: float, y: float, w: float, delta: float, h0: float, tol: float
) -> tuple[float, float]:
    pi = math.pi

    def step(v: float, u: float, h: float) -> tuple[float, float]:
        a1 = u
        b1 = -kappa * (v - pi)
        a2 = u + 0.5 * h * b1
        b2 = -kappa * (v + 0.5 * h * a1 - pi)
        a3 = u + 0.5 * h * b2
        b3 = -kappa * (v + 0.5 * h * a2 - pi)
        a4 = u + h * b3
        b4 = -kappa * (v + h * a3 - pi)
        return v + h / 6.0 * (a1 + 2.0 * (a2 + a3) + a4), u + h / 6.0 * (
            b1 + 2.0 * (b2 + b3) + b4
        )

    t = 0.0
    h = min(h0, delta)
    h_floor = 1e-14 * max(delta, 1.0)
    while t < delta * (1.0 - _TIME_RTOL):
        h = min(h, delta - t)
        by, bw = step(y, w, h)
        my, mw = step(y, w, 0.5 * h)
        hy, hw = step(my, mw, 0.5 * h)
        err = max(abs(hy - by), abs(hw - bw)) / 15.0
        scale = tol * (1.0 + max(abs(hy), abs(hw)))
        if err <= scale or h <= h_floor:
            y, w = hy, hw
            t += h
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * (scale / err) ** 0.2)
            h *= max(grow, 0.2)
        else:
            h *= max(0.2, 0.9 * (scale / err) ** 0.2)
    return y, w


def _default_dt(grid: VelocityGrid, initial: tuple[float, ...], cfg: FlowConfig) -> float:
    if cfg.regime == CONFORMAL_NONLINEAR:
        c_min = min(initial)
        kappa_max = 2.0 * cfg.k_curv / (c_min * c_min)
    else:
        kappa_max = cfg.alpha * grid.beta_max * grid.beta_max
    if kappa_max <= 0.0:
        return 1e-3
    return min(1e-3, 0.01 / kappa_max)


def integrate(
    grid: VelocityGrid,
    initial,
    cfg: FlowConfig,
    tau_end: float,
    snapshot_every: float | None = None,
) -> Trajectory:
    """Advance every grid sample from its initial value to tau_end.

    Returns snapshots at the multiples of snapshot_every inside
    [0, tau_end] plus the final time; when snapshot_every is omitted only
    the initial and final states are kept.  Samples are decoupled and
    advanced independently, so the result is identical to integrating
    each sample on its own grid.
    """
    init = tuple(float(v) for v in initial)
    if len(init) != grid.n:
        raise ValueError(f"initial profile has {len(init)} values for a grid of {grid.n}")
    for v in init:
        _require_finite("initial value", v)
    if not (_require_finite("tau_end", tau_end) > 0.0):
        raise ValueError(f"tau_end must be positive, got {tau_end!r}")
    if snapshot_every is None:
        times = [0.0, float(tau_end)]
    else:
        if not (_require_finite("snapshot_every", snapshot_every) > 0.0):
            raise ValueError(f"snapshot_every must be positive, got {snapshot_every!r}")
        times = _snapshot_times(tau_end, snapshot_every)
    dt = cfg.dt if cfg.dt is not None else _default_dt(grid, init, cfg)
    adaptive = cfg.method == ADAPTIVE_RK
    n_snaps = len(times)
    columns: list[list[float]] = []

    if cfg.regime == CONFORMAL_NONLINEAR:
        k = cfg.k_curv
        for v in init:
            if v <= 0.0:
                raise ValueError(f"conformal flow requires a positive initial profile, got {v!r}")
        stars = [v * v / (4.0 * k) for v in init]
        i_min = min(range(len(stars)), key=stars.__getitem__)
        if tau_end >= stars[i_min] * (1.0 - _TIME_RTOL):
            raise FlowDomainError(
                f"conformal flow exhausts its domain at tau* = {stars[i_min]!r} "
                f"(beta = {grid.samples[i_min]!r}); requested tau_end = {tau_end!r}",
                beta=grid.samples[i_min],
                tau_star=stars[i_min],
            )

    for i, beta in enumerate(grid.samples):
        y = init[i]
        col = [y]
        if cfg.regime in LINEAR_REGIMES:
            kappa = cfg.alpha * beta * beta
            target = relaxation_target(beta, cfg)
            for t0, t1 in zip(times, times[1:]):
                delta = t1 - t0
                if adaptive:
                    y = _adaptive_scalar(
                        lambda v, _k=kappa, _t=target: -_k * (v - _t), y, delta, dt, cfg.tol
                    )
                else:
                    n_full, rem = _split_segment(delta, dt)
                    y = _rk4_linear_segment(y, kappa, target, dt, n_full)
                    if rem > 0.0:
                        y = _rk4_linear_segment(y, kappa, target, rem, 1)
                col.append(y)
        elif cfg.regime == CONFORMAL_NONLINEAR:
            k2 = 2.0 * cfg.k_curv
            star = y * y / (4.0 * cfg.k_curv)

            def deriv(v: float, _b=beta, _s=star) -> float:
                if v <= 0.0:
                    raise FlowDomainError(
                        f"conformal flow exhausts its domain at tau* = {_s!r} (beta = {_b!r})",
                        beta=_b,
                        tau_star=_s,
                    )
                return -k2 / v

            for t0, t1 in zip(times, times[1:]):
                delta = t1 - t0
                if adaptive:
                    y = _adaptive_scalar(deriv, y, delta, dt, cfg.tol)
                    if y <= 0.0:
                        raise FlowDomainError(
                            f"conformal flow exhausts its domain at tau* = {star!r} "
                            f"(beta = {beta!r})",
                            beta=beta,
                            tau_star=star,
                        )
                else:
                    n_full, rem = _split_segment(delta, dt)
                    y = _rk4_conformal_segment(y, k2, dt, n_full, beta, star)
                    if rem > 0.0:
                        y = _rk4_conformal_segment(y, k2, rem, 1, beta, star)
                col.append(y)
        else:  # second-order: evolve (C, dC/dtau) with zero initial rate
            kappa = cfg.alpha * beta * beta
            w = 0.0
            for t0, t1 in zip(times, times[1:]):
                delta = t1 - t0
                if adaptive:
                    y, w = _adaptive_pair(kappa, y, w, delta, dt, cfg.tol)
                else:
                    n_full, rem = _split_segment(delta, dt)
                    y, w = _rk4_pair_segment(y, w, kappa, dt, n_full)
                    if rem > 0.0:
                        y, w = _rk4_pair_segment(y, w, kappa, rem, 1)
                col.append(y)
        columns.append(col)

    states = tuple(
        FlowState(tau=times[j], profile=tuple(columns[i][j] for i in range(grid.n)))
        for j in range(n_snaps)
    )
    return Trajectory(grid=grid, config=cfg, states=states)
