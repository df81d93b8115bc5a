"""Second-kind solve for the vortex-sheet strength gamma.

(I + a_mu F[z]) gamma = (2 pi / L) sigma theta_aa
                        + (L / pi)(1 + mu2 u0 / (mu1 + mu2)) sin(alpha + theta)

solved by restarted GMRES on the matrix-free operator, with a damped
fixed-point fallback.  The steady problem is the same equation with
L = 2 pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import SolverError
from .geometry import ShapeState
from .operators import KernelContext, apply_F
from .spectral import PeriodicField, derivative, grid, sobolev_norm

__all__ = ["PhysicalParams", "VortexSheet", "gamma_rhs", "solve_gamma", "solve_second_kind"]

GAMMA_TOL = 1e-12
GAMMA_MAX_ITER = 200


@dataclass(frozen=True)
class PhysicalParams:
    """Surface tension, channel scale, viscosities, and far-field speed."""

    sigma: float
    beta: float = 0.0
    mu1: float = 1.0
    mu2: float = 0.0
    u0: float = 0.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.mu1 < 0 or self.mu2 < 0 or self.mu1 + self.mu2 <= 0:
            raise ValueError("viscosities must be >= 0 with mu1 + mu2 > 0")

    @property
    def a_mu(self) -> float:
        return (self.mu1 - self.mu2) / (self.mu1 + self.mu2)

    def with_u0(self, u0: float) -> "PhysicalParams":
        return PhysicalParams(self.sigma, self.beta, self.mu1, self.mu2, u0)


@dataclass(frozen=True)
class VortexSheet:
    gamma: PeriodicField
    residual: float
    iterations: int

    @property
    def mean(self) -> float:
        return float(np.real(self.gamma.coeff(0)))


def gamma_rhs(state: ShapeState, params: PhysicalParams) -> PeriodicField:
    """Right side of the sheet-strength equation, using the full theta."""
    theta = state.theta()
    theta_aa = derivative(theta, 2).real_values
    alpha = grid(state.n)
    forcing = 1.0 + params.mu2 * params.u0 / (params.mu1 + params.mu2)
    vals = (2.0 * np.pi / state.L) * params.sigma * theta_aa
    vals = vals + (state.L / np.pi) * forcing * np.sin(alpha + theta.real_values)
    return PeriodicField.from_values(vals)


def solve_second_kind(
    ctx: KernelContext,
    a_mu: float,
    rhs: PeriodicField,
    tol: float = GAMMA_TOL,
    max_iter: int = GAMMA_MAX_ITER,
) -> VortexSheet:
    """Solve (I + a_mu F[z]) gamma = rhs for real gamma."""
    n = ctx.n
    b = rhs.real_values
    rhs_norm = sobolev_norm(rhs, 0.0)
    if rhs_norm == 0.0:
        return VortexSheet(PeriodicField.zeros(n), 0.0, 0)
    if a_mu == 0.0:
        return VortexSheet(PeriodicField.from_values(b), 0.0, 1)

    def op(v: np.ndarray) -> np.ndarray:
        f = PeriodicField.from_values(v)
        return v + a_mu * apply_F(ctx, f).real_values

    count = {"mv": 0}

    def counted(v):
        count["mv"] += 1
        return op(v)

    lin = LinearOperator((n, n), matvec=counted, dtype=float)
    sol, info = gmres(lin, b, x0=b, rtol=0.1 * tol, atol=0.0, restart=40, maxiter=max_iter)
    gamma = PeriodicField.from_values(sol)
    residual = sobolev_norm(PeriodicField.from_values(op(sol) - b), 0.0)
    if info != 0 or residual > tol * rhs_norm:
        # damped fixed point: the layer operator is a contraction near the circle
        sol = b.copy()
        for it in range(4 * max_iter):
            update = b - a_mu * apply_F(ctx, PeriodicField.from_values(sol)).real_values
            sol = 0.2 * sol + 0.8 * update
            residual = sobolev_norm(PeriodicField.from_values(op(sol) - b), 0.0)
            if residual <= tol * rhs_norm:
                gamma = PeriodicField.from_values(sol)
                return VortexSheet(gamma, float(residual), count["mv"] + it + 1)
        raise SolverError(
            f"sheet-strength solve stalled at residual {residual:.3g} "
            f"(tol {tol * rhs_norm:.3g})"
        )
    return VortexSheet(gamma, float(residual), count["mv"])


def solve_gamma(state: ShapeState, ctx: KernelContext, params: PhysicalParams) -> VortexSheet:
    """Sheet strength for the current interface; gamma has (near-)zero mean."""
    return solve_second_kind(ctx, params.a_mu, gamma_rhs(state, params))
