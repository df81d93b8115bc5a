"""Steady translating bubble for beta >= 0.

The residual is the projected normal velocity of a candidate steady
shape; the fixed-point map inverts the triangular linearization at the
circle and updates the far-field speed u0 from the first-harmonic
balance.  Continuation in beta from the circle keeps every solve inside
the contraction regime, and the small-beta series provides an external
reference for mu2 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .geometry import ShapeState, build_geometry, compute_area, make_state
from .operators import apply_G, kernel_context
from .spectral import (
    PeriodicField,
    derivative,
    grid,
    hilbert,
    project_qn,
    sobolev_norm,
)
from .vortex import PhysicalParams, VortexSheet, solve_gamma

__all__ = [
    "SteadySolution",
    "apply_A",
    "invert_A",
    "frechet_at_circle",
    "steady_residual",
    "steady_iterate",
    "solve_steady",
    "asymptotic_reference",
    "odd_part",
]

RESIDUAL_TOL = 1e-10
UPDATE_TOL = 1e-13


@dataclass(frozen=True)
class SteadySolution:
    """Steady shape (odd), far-field speed, and sheet strength at L = 2 pi."""

    theta_tilde: PeriodicField
    theta_hat1: complex
    u0: float
    sheet: VortexSheet
    beta: float
    residual_norm: float
    iterations: int
    contraction_ratio: float

    def state(self, V_target: float | None = None) -> ShapeState:
        v = self.area() if V_target is None else V_target
        return ShapeState(self.theta_tilde, self.theta_hat1, 0.0, 2.0 * np.pi, 0.0, v)

    def area(self) -> float:
        probe = ShapeState(self.theta_tilde, self.theta_hat1, 0.0, 2.0 * np.pi, 0.0, 1.0)
        return compute_area(probe)

    def theta(self) -> PeriodicField:
        coeffs = self.theta_tilde.coeffs.copy()
        coeffs[1] += self.theta_hat1
        coeffs[-1] += np.conj(self.theta_hat1)
        return PeriodicField(coeffs)


# -- triangular linear operator ----------------------------------------------


def _mode_range(n: int) -> np.ndarray:
    return np.arange(2, n // 2)


def apply_A(u: PeriodicField, sigma: float, a_mu: float) -> PeriodicField:
    """(A u)^(k) = (sigma/2) k^2 uhat(k) - (1+a_mu)(k+1)/(k+2) uhat(k+1), k >= 2."""
    n = u.n
    ks = _mode_range(n)
    out = np.zeros(n, dtype=complex)
    up = np.zeros(ks.size, dtype=complex)
    up[:-1] = u.coeffs[ks[:-1] + 1]
    coupling = (1.0 + a_mu) * (ks + 1.0) / (ks + 2.0)
    out[ks] = 0.5 * sigma * ks**2 * u.coeffs[ks] - coupling * up
    down = np.zeros(ks.size, dtype=complex)
    down[:-1] = u.coeffs[-(ks[:-1] + 1) % n]
    out[-ks % n] = 0.5 * sigma * ks**2 * u.coeffs[-ks % n] - coupling * down
    return PeriodicField(out)


def invert_A(f: PeriodicField, sigma: float, a_mu: float) -> PeriodicField:
    """Backward substitution down the triangular mode coupling."""
    n = f.n
    ks = _mode_range(n)
    out = np.zeros(n, dtype=complex)
    upper = 0.0 + 0.0j
    lower = 0.0 + 0.0j
    for k in ks[::-1]:
        c = (1.0 + a_mu) * (k + 1.0) / (k + 2.0)
        upper = (f.coeffs[k] + c * upper) / (0.5 * sigma * k**2)
        lower = (f.coeffs[-k % n] + c * lower) / (0.5 * sigma * k**2)
        out[k] = upper
        out[-k % n] = lower
    return PeriodicField(out)


def frechet_at_circle(h: PeriodicField, sigma: float, a_mu: float) -> PeriodicField:
    """Shape derivative of the steady residual at the circle.

    (sigma/2) H[h_aa] - i (1+a_mu) sum_{k>=1} (k+1)/(k+2) hhat(k+1) e^{ik alpha} + c.c.
    """
    n = h.n
    out = hilbert(derivative(h, 2)).coeffs * (0.5 * sigma)
    ks = np.arange(1, n // 2 - 1)
    shift = -1j * (1.0 + a_mu) * (ks + 1.0) / (ks + 2.0)
    out[ks] += shift * h.coeffs[ks + 1]
    out[-ks % n] += np.conj(shift) * h.coeffs[-(ks + 1) % n]
    return PeriodicField(out)


def odd_part(f: PeriodicField) -> PeriodicField:
    """(f(alpha) - f(-alpha)) / 2 in coefficient space."""
    n = f.n
    mirrored = f.coeffs[(-np.arange(n)) % n]
    return PeriodicField(0.5 * (f.coeffs - mirrored))


# -- residual and fixed-point map ---------------------------------------------


def _steady_state(theta_tilde: PeriodicField, guess: complex) -> ShapeState:
    return make_state(theta_tilde, L=2.0 * np.pi, odd=True, guess=guess)


def steady_residual(
    theta_tilde: PeriodicField,
    u0: float,
    beta: float,
    params: PhysicalParams,
    guess: complex = 0.0 + 0.0j,
):
    """Projected normal velocity of the candidate steady shape.

    Returns (residual field, sheet, state); the residual is even and
    mean-free for odd input.
    """
    run = params.with_u0(u0) if params.u0 != u0 else params
    state = _steady_state(theta_tilde, guess)
    geom = build_geometry(state)
    ctx = kernel_context(geom, beta)
    sheet = solve_gamma(state, ctx, run)
    theta_vals = state.theta().real_values
    alpha = grid(state.n)
    vals = 0.5 * hilbert(sheet.gamma).real_values
    vals = vals + 0.5 * np.real(apply_G(ctx, sheet.gamma).values)
    vals = vals + (u0 + 1.0) * np.cos(alpha + theta_vals)
    residual = project_qn(PeriodicField.from_values(vals), 0)
    return residual, sheet, state


def _iterate_core(residual: PeriodicField, theta_tilde, u0, params: PhysicalParams):
    """Shared assembly of f = -U + frechet(theta) + (mu1/(mu1+mu2)) u0 cos."""
    n = theta_tilde.n
    cos_field = PeriodicField.from_modes(n, {1: 0.5, -1: 0.5})
    f = (
        -residual
        + frechet_at_circle(theta_tilde, params.sigma, params.a_mu)
        + (params.mu1 / (params.mu1 + params.mu2)) * u0 * cos_field
    )
    return f


def steady_iterate(
    theta_tilde: PeriodicField,
    u0: float,
    beta: float,
    params: PhysicalParams,
    guess: complex = 0.0 + 0.0j,
):
    """One application of the contraction map for (theta_tilde, u0).

    The new shape inverts the circle linearization on the high modes of
    f; the new u0 balances the first harmonic, with the g(2) correction
    keeping the mode-1 equation consistent as mu2 -> 0.  The shape update
    is projected onto its odd part.
    """
    residual, sheet, state = steady_residual(theta_tilde, u0, beta, params, guess)
    f = _iterate_core(residual, theta_tilde, u0, params)
    g = invert_A(hilbert(project_qn(f, 1)), params.sigma, params.a_mu)
    new_tilde = odd_part(g)
    ratio = (params.mu1 + params.mu2) / params.mu1
    coupling = ratio * (4.0 / 3.0) * (1.0 + params.a_mu)
    new_u0 = 2.0 * float(np.real(f.coeff(1))) + coupling * float(np.real(1j * new_tilde.coeff(2)))
    return new_tilde, new_u0, residual, sheet, state


def _newton_update(residual: PeriodicField, params: PhysicalParams):
    """Quasi-Newton step with the circle Jacobian: J (dtheta, du0) = -residual."""
    d_tilde = odd_part(-1.0 * invert_A(hilbert(project_qn(residual, 1)), params.sigma, params.a_mu))
    ratio = (params.mu1 + params.mu2) / params.mu1
    du0 = -2.0 * ratio * float(np.real(residual.coeff(1)))
    du0 += ratio * (4.0 / 3.0) * (1.0 + params.a_mu) * float(np.real(1j * d_tilde.coeff(2)))
    return d_tilde, du0


def solve_steady(
    beta: float,
    params: PhysicalParams,
    n: int = 128,
    continuation_steps: int = 8,
    tol: float = RESIDUAL_TOL,
    max_iter: int = 80,
    newton: bool = False,
) -> SteadySolution:
    """Steady bubble at the given beta via continuation from the circle."""
    theta_tilde = PeriodicField.zeros(n)
    u0 = 0.0
    guess = 0.0 + 0.0j
    if beta == 0.0:
        betas = [0.0]
    else:
        betas = list(np.linspace(0.0, beta, continuation_steps + 1)[1:])
    last_ratio = 0.0
    total_iters = 0
    for b in betas:
        prev_dist = None
        for _ in range(max_iter):
            if newton:
                residual, sheet, state = steady_residual(theta_tilde, u0, b, params, guess)
                d_tilde, du0 = _newton_update(residual, params)
                new_tilde = theta_tilde + d_tilde
                new_u0 = u0 + du0
            else:
                new_tilde, new_u0, residual, sheet, state = steady_iterate(
                    theta_tilde, u0, b, params, guess
                )
            dist = sobolev_norm(new_tilde - theta_tilde, 0.0) + abs(new_u0 - u0)
            if prev_dist is not None and prev_dist > 0:
                last_ratio = dist / prev_dist
            prev_dist = dist
            guess = state.theta_hat1
            theta_tilde, u0 = new_tilde, new_u0
            total_iters += 1
            res_norm = sobolev_norm(residual, 0.0)
            if dist < UPDATE_TOL and res_norm <= tol:
                break
        else:
            raise SolverError(
                f"steady solve at beta={b:g} stalled; residual {res_norm:.3g}, "
                f"update {dist:.3g}"
            )
    residual, sheet, state = steady_residual(theta_tilde, u0, beta, params, guess)
    res_norm = sobolev_norm(residual, 0.0)
    if res_norm > tol:
        raise SolverError(f"steady residual {res_norm:.3g} above tol {tol:g}")
    return SteadySolution(
        theta_tilde, state.theta_hat1, u0, sheet, beta, res_norm, total_iters, last_ratio
    )


# -- small-beta reference series ----------------------------------------------


def asymptotic_reference(beta: float, sigma: float, n: int = 128):
    """Truncated small-beta series for the mu2 = 0 steady bubble.

    Returns (theta field, u0, gamma field); remainders are O(beta^6).
    """
    b2, b4 = beta**2, beta**4
    theta = PeriodicField.from_real_modes(
        n,
        {
            3: b4 / (54.0 * sigma) / (2.0j),
            2: b4 / (72.0 * sigma**2) / (2.0j),
        },
    )
    u0 = -b2 / 6.0 + b4 * (7.0 / 180.0 + 1.0 / (216.0 * sigma**2))
    gamma = PeriodicField.from_real_modes(
        n,
        {
            1: (2.0 - b2 / 6.0 + b4 * (1.0 / 72.0 + 7.0 / (216.0 * sigma**2))) / (2.0j),
            2: -b4 / (54.0 * sigma) / (2.0j),
            3: b4 * (-19.0 / 120.0 + 1.0 / (72.0 * sigma**2)) / (2.0j),
            4: b4 / (54.0 * sigma) / (2.0j),
        },
    )
    return theta, u0, gamma
