"""Time evolution of the interface.

Velocities U and T, the nonlinear right side for (theta_tilde,
theta_hat0, y0), a stiff IMEX step (exact integrating factor on the
Fourier-diagonal dissipation, Heun on the rest), the exact linearized
propagator for validation, and per-step diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from .geometry import (
    InterfaceGeometry,
    ShapeState,
    build_geometry,
    closure_residual,
    compute_area,
    length_from_area,
    make_state,
    solve_closure,
)
from .operators import KernelContext, apply_G, kernel_context
from .spectral import (
    PeriodicField,
    WeightProfile,
    cumulative_integral,
    dealias,
    derivative,
    grid,
    hilbert,
    multiply,
    project_qn,
    sobolev_norm,
    weighted_norm,
)
from .vortex import PhysicalParams, VortexSheet, solve_gamma

__all__ = [
    "VelocityFields",
    "LinearSymbol",
    "DiagnosticsRecord",
    "RhsEval",
    "EvolveConfig",
    "EvolveResult",
    "velocities",
    "rhs",
    "step",
    "linear_propagator",
    "evolve",
    "initial_state",
    "oddness_defect",
]


@dataclass(frozen=True)
class VelocityFields:
    """Normal and tangent interface velocities."""

    U: PeriodicField
    T: PeriodicField
    U_mean: float


@dataclass(frozen=True)
class RhsEval:
    """One evaluation of the nonlinear right side, with its intermediates."""

    theta_tilde_t: PeriodicField
    theta_hat0_t: float
    y0_t: float
    x0_t: float
    geometry: InterfaceGeometry
    sheet: VortexSheet
    vel: VelocityFields


def velocities(
    state: ShapeState, sheet: VortexSheet, ctx: KernelContext, params: PhysicalParams
) -> VelocityFields:
    """U from the layer representation; T from the equal-arclength rule.

    U = (pi/L) H[gamma] + (pi/L) Re(G[z] gamma) + (u0+1) cos(alpha+theta);
    T is the zero-mean-slope antiderivative of (1 + theta_alpha) U, so
    T(0) = 0 and T is periodic by construction.
    """
    gamma = sheet.gamma
    theta = state.theta()
    alpha = grid(state.n)
    pl = np.pi / state.L
    u_vals = pl * hilbert(gamma).real_values
    u_vals = u_vals + pl * np.real(apply_G(ctx, gamma).values)
    u_vals = u_vals + (params.u0 + 1.0) * np.cos(alpha + theta.real_values)
    U = dealias(PeriodicField.from_values(u_vals))
    one_plus = PeriodicField.from_values(1.0 + derivative(theta).real_values)
    T = cumulative_integral(multiply(one_plus, U)).periodic
    return VelocityFields(U, T, float(np.real(U.coeff(0))))


def rhs(state: ShapeState, params: PhysicalParams) -> RhsEval:
    """Full nonlinear right side of the evolution system at this state."""
    geom = build_geometry(state)
    ctx = kernel_context(geom, params.beta)
    sheet = solve_gamma(state, ctx, params)
    vel = velocities(state, sheet, ctx, params)
    theta = state.theta()
    one_plus = PeriodicField.from_values(1.0 + derivative(theta).real_values)
    coupling = multiply(vel.T, one_plus)
    ttilde_t = (2.0 * np.pi / state.L) * project_qn(derivative(vel.U) + coupling, 1)
    that0_t = (2.0 * np.pi / state.L) * float(np.real(coupling.coeff(0)))
    theta0 = float(theta.real_values[0])
    u_at_0 = float(vel.U.real_values[0])
    y0_t = -u_at_0 * np.sin(theta0)
    x0_t = -u_at_0 * np.cos(theta0)
    return RhsEval(ttilde_t, that0_t, y0_t, x0_t, geom, sheet, vel)


# -- linear theory -----------------------------------------------------------


class LinearSymbol:
    """Mode symbols of the linearization about the unit circle.

    Diagonal decay d(k) = k(k^2-1)/2 and upward coupling
    m(k) = (1+a_mu)(k^2-1)(k+1)/(k(k+2)) for |k| >= 2.
    """

    def __init__(self, sigma: float, a_mu: float):
        self.sigma = sigma
        self.a_mu = a_mu

    @staticmethod
    def d(k):
        k = np.asarray(k, dtype=float)
        return 0.5 * k * (k**2 - 1.0)

    def m(self, k):
        k = np.asarray(k, dtype=float)
        return (1.0 + self.a_mu) * (k**2 - 1.0) * (k + 1.0) / (k * (k + 2.0))

    def apply(self, f: PeriodicField) -> PeriodicField:
        """A f: mode k >= 2 gets -sigma d(k) fhat(k) + m(k) fhat(k+1)."""
        n = f.n
        out = np.zeros(n, dtype=complex)
        kmax = n // 2 - 1
        ks = np.arange(2, kmax + 1)
        up = np.zeros(ks.size, dtype=complex)
        up[:-1] = f.coeffs[ks[:-1] + 1]
        out[ks] = -self.sigma * self.d(ks) * f.coeffs[ks] + self.m(ks) * up
        down = np.zeros(ks.size, dtype=complex)
        down[:-1] = f.coeffs[-(ks[:-1] + 1) % n]
        out[-ks % n] = -self.sigma * self.d(ks) * f.coeffs[-ks % n] + self.m(ks) * down
        return PeriodicField(out)

    def matrix(self, kmax: int) -> np.ndarray:
        """Upper-bidiagonal coupling matrix on modes k = 2 .. kmax."""
        ks = np.arange(2, kmax + 1)
        mat = np.diag(-self.sigma * self.d(ks))
        if ks.size > 1:
            mat += np.diag(self.m(ks[:-1]), k=1)
        return mat

    def propagator(self, f: PeriodicField, t: float) -> PeriodicField:
        """e^{tA} f via the exponentiated truncated coupling matrix."""
        n = f.n
        kmax = n // 2 - 1
        ks = np.arange(2, kmax + 1)
        prop = expm(t * self.matrix(kmax))
        out = np.zeros(n, dtype=complex)
        out[ks] = prop @ f.coeffs[ks]
        out[-ks % n] = prop @ f.coeffs[-ks % n]
        return PeriodicField(out)


def linear_propagator(theta0: PeriodicField, t: float, sigma: float, a_mu: float) -> PeriodicField:
    return LinearSymbol(sigma, a_mu).propagator(theta0, t)


# -- time stepping -----------------------------------------------------------


def _remainder(state: ShapeState, params: PhysicalParams, lam_coeffs: np.ndarray) -> tuple:
    ev = rhs(state, params)
    rem = PeriodicField(ev.theta_tilde_t.coeffs - lam_coeffs * state.theta_tilde.coeffs)
    return rem, ev


def step(state: ShapeState, dt: float, params: PhysicalParams) -> tuple[ShapeState, RhsEval]:
    """One IMEX step: integrating factor on the stiff diagonal, Heun outside.

    L is frozen during the step and re-pinned from the area constraint
    afterwards; theta_hat(+-1) is re-solved from closure, never stepped.
    Returns the new state and the right-side evaluation at the step start.
    """
    n = state.n
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n).astype(int))
    lam = np.where(k >= 2, -params.sigma * (2.0 * np.pi / state.L) ** 3 * LinearSymbol.d(k), 0.0)
    efac = np.exp(dt * lam)

    rem0, ev0 = _remainder(state, params, lam)
    pred_coeffs = efac * (state.theta_tilde.coeffs + dt * rem0.coeffs)
    pred_tilde = PeriodicField(pred_coeffs)
    hat1_pred = solve_closure(pred_tilde, guess=state.theta_hat1)
    pred = replace(
        state,
        theta_tilde=pred_tilde,
        theta_hat1=hat1_pred,
        theta_hat0=state.theta_hat0 + dt * ev0.theta_hat0_t,
        y0=state.y0 + dt * ev0.y0_t,
        x0=state.x0 + dt * ev0.x0_t,
    )
    rem1, ev1 = _remainder(pred, params, lam)
    new_coeffs = efac * (state.theta_tilde.coeffs + 0.5 * dt * rem0.coeffs) + 0.5 * dt * rem1.coeffs
    new_tilde = PeriodicField(new_coeffs)
    hat1 = solve_closure(new_tilde, guess=hat1_pred)
    corrected = replace(
        state,
        theta_tilde=new_tilde,
        theta_hat1=hat1,
        theta_hat0=state.theta_hat0 + 0.5 * dt * (ev0.theta_hat0_t + ev1.theta_hat0_t),
        y0=state.y0 + 0.5 * dt * (ev0.y0_t + ev1.y0_t),
        x0=state.x0 + 0.5 * dt * (ev0.x0_t + ev1.x0_t),
    )
    new_L = length_from_area(corrected, state.V_target)
    return replace(corrected, L=new_L), ev0


# -- trajectory driver -------------------------------------------------------


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-record scalars; one JSONL line each."""

    t: float
    L: float
    V: float
    norm_r: float
    weighted_norm: float
    closure_res: float
    q1_min: float
    U_mean: float
    theta_hat0: float
    y0: float
    gamma_res: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "t": self.t,
                "L": self.L,
                "V": self.V,
                "norm_r": self.norm_r,
                "weighted_norm": self.weighted_norm,
                "closure_res": self.closure_res,
                "q1_min": self.q1_min,
                "U_mean": self.U_mean,
                "theta_hat0": self.theta_hat0,
                "y0": self.y0,
                "gamma_res": self.gamma_res,
            }
        )


@dataclass(frozen=True)
class EvolveConfig:
    params: PhysicalParams
    n_modes: int
    dt: float
    t_end: float
    initial_modes: dict[int, complex]
    record_interval: int = 10
    norm_order: float = 2.0
    v_target: float | None = None
    symmetric: bool = False


@dataclass
class EvolveResult:
    records: list[DiagnosticsRecord]
    state: ShapeState
    max_u_integral: float
    steps: int


def initial_state(config: EvolveConfig) -> ShapeState:
    """State at t = 0: project the given modes, solve closure, pin the area.

    Modes with k >= 2 seed theta_tilde, k = 0 seeds theta_hat0, and k = 1
    entries are discarded (closure determines the first harmonic).  With no
    target area, the initial perimeter is 2 pi and the area follows.
    """
    n = config.n_modes
    theta_hat0 = 0.0
    tilde = {}
    for k, value in config.initial_modes.items():
        if k == 0:
            theta_hat0 = float(np.real(value))
        elif abs(k) >= 2:
            tilde[abs(k)] = value if k > 0 else np.conj(value)
    theta_tilde = PeriodicField.from_real_modes(n, tilde)
    if config.symmetric:
        if np.max(np.abs(np.real(theta_tilde.coeffs))) > 1e-14 or theta_hat0 != 0.0:
            raise ValueError("symmetric run needs odd initial data (imaginary modes, no mean)")
    if config.v_target is None:
        return make_state(theta_tilde, L=2.0 * np.pi, theta_hat0=theta_hat0, odd=config.symmetric)
    return make_state(
        theta_tilde, V_target=config.v_target, theta_hat0=theta_hat0, odd=config.symmetric
    )


def _record(state: ShapeState, t: float, ev: RhsEval, norm_order: float, weights: WeightProfile):
    return DiagnosticsRecord(
        t=t,
        L=state.L,
        V=compute_area(state, ev.geometry),
        norm_r=sobolev_norm(state.theta_tilde, norm_order),
        weighted_norm=weighted_norm(state.theta_tilde, weights, norm_order),
        closure_res=closure_residual(state.theta_tilde, state.theta_hat1),
        q1_min=ev.geometry.q1_min,
        U_mean=ev.vel.U_mean,
        theta_hat0=state.theta_hat0,
        y0=state.y0,
        gamma_res=ev.sheet.residual,
    )


def oddness_defect(f: PeriodicField) -> float:
    """max over the grid of |f(alpha) + f(-alpha)|."""
    v = f.real_values
    return float(np.max(np.abs(v + np.roll(v[::-1], 1))))


def evolve(config: EvolveConfig, on_record=None) -> EvolveResult:
    """March from t = 0 to t_end, recording every record_interval steps.

    on_record, when given, is called as on_record(record, state, ev) at
    every record time; any geometry or solver failure aborts with the
    step index attached.
    """
    state = initial_state(config)
    weights = WeightProfile(config.params.sigma)
    n_steps = int(round(config.t_end / config.dt))
    records: list[DiagnosticsRecord] = []
    max_u = 0.0

    def emit(t: float, ev: RhsEval):
        rec = _record(state, t, ev, config.norm_order, weights)
        records.append(rec)
        if on_record is not None:
            on_record(rec, state, ev)

    emit(0.0, rhs(state, config.params))
    for i in range(n_steps):
        try:
            state, ev0 = step(state, config.dt, config.params)
        except Exception as exc:
            exc.args = (f"step {i + 1} (t={i * config.dt:.6g}): {exc}",)
            raise
        max_u = max(max_u, abs(2.0 * np.pi * ev0.vel.U_mean))
        if (i + 1) % config.record_interval == 0 or i + 1 == n_steps:
            emit((i + 1) * config.dt, rhs(state, config.params))
    return EvolveResult(records, state, max_u, n_steps)
