"""Interface state in the tangent-angle, equal-arclength frame.

The shape unknowns are the high modes theta_tilde (|k| >= 2), the
closure-determined first harmonic theta_hat(+-1), the rotation
theta_hat(0), the perimeter L, and the anchor point z(0) = x0 + i*y0.
This module reconstructs the curve, enforces the closure constraint,
computes area/perimeter, and guards against self-intersection.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import ClosureError, GeometryError
from .spectral import (
    CumulativeIntegral,
    PeriodicField,
    cumulative_integral,
    dealias,
    derivative,
    grid,
)

__all__ = [
    "ShapeState",
    "InterfaceGeometry",
    "solve_closure",
    "closure_residual",
    "make_state",
    "build_geometry",
    "compute_area",
    "area_integral",
    "length_from_area",
    "divided_differences",
    "q1_minimum",
    "write_snapshot",
]

Q1_FLOOR = 0.125  # below this the non-self-intersection bound fails
CLOSURE_TOL = 1e-12
_TABLE_LIMIT = 512


@dataclass(frozen=True)
class ShapeState:
    """Interface unknowns in Fourier form.

    theta_tilde holds modes |k| >= 2 only; theta_hat1 is the closure
    solution (theta_hat(-1) is its conjugate); V_target is the conserved
    bubble area that pins the perimeter L.  x0 is bookkeeping only.
    """

    theta_tilde: PeriodicField
    theta_hat1: complex
    theta_hat0: float
    L: float
    y0: float
    V_target: float
    x0: float = 0.0

    def __post_init__(self):
        if self.L <= 0:
            raise GeometryError("perimeter must be positive")
        low = np.abs(self.theta_tilde.wavenumbers()) <= 1
        if np.max(np.abs(self.theta_tilde.coeffs[low])) > 1e-14:
            raise ValueError("theta_tilde must have modes |k| >= 2 only")

    @property
    def n(self) -> int:
        return self.theta_tilde.n

    def theta(self) -> PeriodicField:
        """Full tangent-angle deviation theta = theta_hat0 + first harmonics + theta_tilde."""
        coeffs = self.theta_tilde.coeffs.copy()
        coeffs[0] += self.theta_hat0
        coeffs[1] += self.theta_hat1
        coeffs[-1] += np.conj(self.theta_hat1)
        return PeriodicField(coeffs)

    def q0_theta(self) -> PeriodicField:
        """theta without its mean (the part that enters the curve integrand)."""
        coeffs = self.theta_tilde.coeffs.copy()
        coeffs[1] += self.theta_hat1
        coeffs[-1] += np.conj(self.theta_hat1)
        return PeriodicField(coeffs)


@dataclass(frozen=True)
class InterfaceGeometry:
    """Reconstructed curve and its derivatives on the grid."""

    state: ShapeState
    omega: PeriodicField
    omega_alpha: PeriodicField
    z: np.ndarray
    z_alpha: np.ndarray
    z_alphaalpha: np.ndarray
    q1_min: float
    closure_jump: float

    @property
    def n(self) -> int:
        return self.omega.n

    @property
    def L(self) -> float:
        return self.state.L

    @property
    def alpha(self) -> np.ndarray:
        return grid(self.n)

    def theta_values(self) -> np.ndarray:
        return self.state.theta().real_values


# -- closure constraint ------------------------------------------------------


def _closure_integrand(theta_tilde: PeriodicField, theta_hat1: complex) -> np.ndarray:
    alpha = grid(theta_tilde.n)
    phase = alpha + 2.0 * np.real(theta_hat1 * np.exp(1j * alpha)) + theta_tilde.real_values
    return np.exp(1j * phase)


def closure_residual(theta_tilde: PeriodicField, theta_hat1: complex) -> float:
    """|integral over one period of e^{i(pi/2 + alpha + theta)}|."""
    return float(2.0 * np.pi * np.abs(np.mean(_closure_integrand(theta_tilde, theta_hat1))))


def solve_closure(
    theta_tilde: PeriodicField,
    guess: complex = 0.0 + 0.0j,
    odd: bool = False,
    tol: float = CLOSURE_TOL,
    max_iter: int = 50,
) -> complex:
    """Newton solve of the closure constraint for theta_hat(1).

    The two real unknowns are (Re, Im) of theta_hat(1); for odd
    theta_tilde the root is purely imaginary and a one-unknown Newton
    iteration is used instead.
    """
    alpha = grid(theta_tilde.n)
    cos_a, sin_a = np.cos(alpha), np.sin(alpha)
    a, b = float(np.real(guess)), float(np.imag(guess))
    if odd:
        a = 0.0
    for _ in range(max_iter):
        integrand = _closure_integrand(theta_tilde, a + 1j * b)
        res = np.mean(integrand)
        if 2.0 * np.pi * np.abs(res if not odd else np.real(res)) <= tol:
            return a + 1j * b
        d_a = np.mean(2j * cos_a * integrand)
        d_b = np.mean(-2j * sin_a * integrand)
        if odd:
            slope = np.real(d_b)
            if slope == 0.0:
                break
            b -= np.real(res) / slope
            continue
        jac = np.array([[np.real(d_a), np.real(d_b)], [np.imag(d_a), np.imag(d_b)]])
        try:
            step = np.linalg.solve(jac, np.array([np.real(res), np.imag(res)]))
        except np.linalg.LinAlgError as exc:
            raise ClosureError("singular closure Jacobian") from exc
        a -= step[0]
        b -= step[1]
    raise ClosureError(
        f"closure Newton did not reach tol={tol:g} in {max_iter} iterations "
        "(theta_tilde may be too large)"
    )


def make_state(
    theta_tilde: PeriodicField,
    L: float | None = None,
    V_target: float | None = None,
    theta_hat0: float = 0.0,
    y0: float = 0.0,
    x0: float = 0.0,
    guess: complex = 0.0 + 0.0j,
    odd: bool = False,
) -> ShapeState:
    """Build a consistent state: solve closure, then pin L or the area.

    Give either L (area is derived) or V_target (perimeter is derived).
    """
    theta_hat1 = solve_closure(theta_tilde, guess=guess, odd=odd)
    if (L is None) == (V_target is None):
        raise ValueError("give exactly one of L, V_target")
    if L is not None:
        state = ShapeState(theta_tilde, theta_hat1, theta_hat0, L, y0, 0.0, x0)
        v = compute_area(state)
        return replace(state, V_target=v)
    probe = ShapeState(theta_tilde, theta_hat1, theta_hat0, 2.0 * np.pi, y0, V_target, x0)
    return replace(probe, L=length_from_area(probe, V_target))


# -- curve reconstruction ----------------------------------------------------


def build_geometry(state: ShapeState, check_q1: bool = True, guard: bool = True) -> InterfaceGeometry:
    """Reconstruct omega and z from the state.

    omega integrates e^{i(alpha + Q0 theta)}; z scales and rotates it into
    the plane with |z_alpha| = L/2pi.  Raises GeometryError when the
    divided-difference lower bound fails (self-intersection guard); with
    guard=False the quadratic-cost bound check is skipped entirely.
    """
    q0t = state.q0_theta()
    alpha = grid(state.n)
    wprime_vals = np.exp(1j * (alpha + q0t.real_values))
    omega_alpha = dealias(PeriodicField.from_values(wprime_vals))
    anti = cumulative_integral(omega_alpha)
    closure_jump = float(2.0 * np.pi * np.abs(anti.secular))
    omega = anti.periodic
    rot = (state.L / (2.0 * np.pi)) * np.exp(1j * (np.pi / 2.0 + state.theta_hat0))
    z = rot * omega.values + (state.x0 + 1j * state.y0)
    z_alpha = rot * omega_alpha.values
    z_aa = rot * derivative(omega_alpha).values
    q1_min = q1_minimum(omega, omega_alpha) if guard else np.nan
    geom = InterfaceGeometry(state, omega, omega_alpha, z, z_alpha, z_aa, q1_min, closure_jump)
    if guard and check_q1 and q1_min < Q1_FLOOR:
        raise GeometryError(f"min |q1[omega]| = {q1_min:.4g} < {Q1_FLOOR}; curve too distorted")
    return geom


_WRAPPED: dict[int, np.ndarray] = {}


def _wrapped_differences(n: int) -> np.ndarray:
    """Pairwise alpha_i - alpha_j wrapped to (-pi, pi], unit diagonal (cached)."""
    d = _WRAPPED.get(n)
    if d is None:
        alpha = grid(n)
        d = alpha[:, None] - alpha[None, :]
        d = (d + np.pi) % (2.0 * np.pi) - np.pi
        np.fill_diagonal(d, 1.0)
        d.setflags(write=False)
        _WRAPPED[n] = d
    return d


def _q1_table(f: PeriodicField, secular: complex, d1: PeriodicField) -> np.ndarray:
    d = _wrapped_differences(f.n)
    q1 = (f.values[:, None] - f.values[None, :]) / d + secular
    np.fill_diagonal(q1, secular + d1.values)
    return q1


def q1_minimum(omega: PeriodicField, omega_alpha: PeriodicField | None = None) -> float:
    """min over grid pairs of |q1[omega]| with wrapped separations."""
    if omega_alpha is None:
        omega_alpha = derivative(omega)
    if omega.n <= _TABLE_LIMIT:
        return float(np.min(np.abs(_q1_table(omega, 0.0, omega_alpha))))
    vals, dvals = omega.values, omega_alpha.values
    alpha = grid(omega.n)
    best = np.inf
    for i in range(omega.n):
        d = (alpha[i] - alpha + np.pi) % (2.0 * np.pi) - np.pi
        d[i] = 1.0
        row = (vals[i] - vals) / d
        row[i] = dvals[i]
        best = min(best, float(np.min(np.abs(row))))
    return best


def divided_differences(
    f: PeriodicField,
    secular: complex = 0.0,
    d1: PeriodicField | None = None,
    d2: PeriodicField | None = None,
):
    """First and second divided-difference tables of f + secular*alpha.

    q1(a, a') = (f(a) - f(a'))/(a - a') with diagonal f'(a);
    q2(a, a') = (f(a) - f(a') - f'(a)(a - a'))/(a - a')^2 with diagonal
    -f''(a)/2.  Separations are wrapped to (-pi, pi].
    """
    n = f.n
    if n > _TABLE_LIMIT:
        raise ValueError(f"full tables limited to n <= {_TABLE_LIMIT}; use row evaluation")
    if d1 is None:
        d1 = derivative(f)
    if d2 is None:
        d2 = derivative(f, 2)
    d = _wrapped_differences(n)
    q1 = _q1_table(f, secular, d1)
    q2 = (f.values[:, None] - f.values[None, :] - d1.values[:, None] * d) / d**2
    np.fill_diagonal(q2, -0.5 * d2.values)
    return q1, q2


# -- area and perimeter ------------------------------------------------------


def area_integral(geom: InterfaceGeometry) -> float:
    """Im integral of omega_alpha * conj(omega) over one period."""
    n = geom.n
    total = np.sum(geom.omega_alpha.values * np.conj(geom.omega.values))
    return float(np.imag(total) * 2.0 * np.pi / n)


def compute_area(state: ShapeState, geom: InterfaceGeometry | None = None) -> float:
    """Bubble area V = L^2/(8 pi^2) * Im int omega_alpha conj(omega)."""
    if geom is None:
        geom = build_geometry(state, guard=False)
    return state.L**2 / (8.0 * np.pi**2) * area_integral(geom)


def length_from_area(state: ShapeState, V: float, geom: InterfaceGeometry | None = None) -> float:
    """Perimeter pinned by the area constraint: L = sqrt(8 pi^2 V / Im int)."""
    if geom is None:
        geom = build_geometry(state, guard=False)
    integral = area_integral(geom)
    if integral <= 0.0:
        raise GeometryError(f"area integral {integral:.4g} is not positive")
    return float(np.sqrt(8.0 * np.pi**2 * V / integral))


# -- snapshot export ---------------------------------------------------------


def write_snapshot(path, geom: InterfaceGeometry, gamma, U, T) -> None:
    """CSV with one row per grid point: alpha, x, y, theta, gamma, U, T."""
    alpha = geom.alpha
    theta = geom.theta_values()
    rows = zip(
        alpha,
        geom.z.real,
        geom.z.imag,
        theta,
        np.asarray(gamma, dtype=float),
        np.asarray(U, dtype=float),
        np.asarray(T, dtype=float),
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "x", "y", "theta", "gamma", "U", "T"])
        for row in rows:
            writer.writerow([f"{v:.17g}" for v in row])
