"""Singular and regular integral operators on the interface.

The commutator [H, psi], the kernel K split into its curvature-regularized
free-space part K1 and the smooth sidewall correction K2, and the layer
operators G, G1, G2, F built from them.  K1 uses plain trapezoid quadrature
on the cotangent-regularized integrand with its analytic diagonal limit,
which is spectrally accurate for analytic interfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GeometryError
from .geometry import InterfaceGeometry
from .spectral import PeriodicField, hilbert, multiply

__all__ = [
    "KernelContext",
    "kernel_context",
    "coth_regular",
    "cot_regular",
    "commutator_h",
    "apply_K",
    "apply_K1",
    "apply_K2",
    "apply_G",
    "apply_G1",
    "apply_G2",
    "apply_F",
]

_SERIES_RADIUS = 0.5

# Laurent coefficients of coth(w) - 1/w: sum_n c_n w^{2n-1}, from
# c_n = 4^n B_{2n} / (2n)!.
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
    Fraction(-236364091, 2730),
)
_L1_COEFFS = tuple(
    float(Fraction(4**n) * b / math.factorial(2 * n)) for n, b in enumerate(_BERNOULLI, start=1)
)


def coth_regular(w):
    """l1(w) = coth(w) - 1/w, series-evaluated for |w| < 0.5."""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w) < _SERIES_RADIUS
    ws = w[small]
    w2 = ws * ws
    acc = np.zeros_like(ws)
    for c in reversed(_L1_COEFFS):
        acc = acc * w2 + c
    out[small] = ws * acc
    wl = w[~small]
    out[~small] = 1.0 / np.tanh(wl) - 1.0 / wl
    return out


def cot_regular(w):
    """l2(w) = cot(w) - 1/w = i * l1(i w)."""
    w = np.asarray(w, dtype=complex)
    return 1j * coth_regular(1j * w)


def commutator_h(psi: PeriodicField, f: PeriodicField) -> PeriodicField:
    """[H, psi] f = H(psi f) - psi H(f), products dealiased."""
    return hilbert(multiply(psi, f)) - multiply(psi, hilbert(f))


@dataclass(frozen=True)
class KernelContext:
    """Geometry plus precomputed quadrature matrices for K1 and K2."""

    geometry: InterfaceGeometry
    beta: float
    k1_matrix: np.ndarray
    k2_matrix: np.ndarray | None

    @property
    def n(self) -> int:
        return self.geometry.n


def _k1_matrix(geom: InterfaceGeometry) -> np.ndarray:
    n = geom.n
    alpha = geom.alpha
    z, za, zaa = geom.z, geom.z_alpha, geom.z_alphaalpha
    dz = z[:, None] - z[None, :]
    da = alpha[:, None] - alpha[None, :]
    np.fill_diagonal(dz, 1.0)
    np.fill_diagonal(da, 1.0)
    kernel = 1.0 / dz - 1.0 / (np.tan(0.5 * da) * 2.0 * za[None, :])
    np.fill_diagonal(kernel, -zaa / (2.0 * za**2))
    return (-1j / n) * kernel  # (1/2pi i) * (2pi/n) trapezoid weight


def _k2_matrix(geom: InterfaceGeometry, beta: float) -> np.ndarray:
    n = geom.n
    z = geom.z
    dz = z[:, None] - z[None, :]
    dz_star = z[:, None] - np.conj(z)[None, :]
    q = 0.25 * beta
    kernel = q * coth_regular(q * dz) - q * np.tanh(q * dz_star)
    return (-1j / n) * kernel


def kernel_context(geom: InterfaceGeometry, beta: float) -> KernelContext:
    """Precompute quadrature matrices; guard the coth argument range."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if beta == 0.0:
        return KernelContext(geom, 0.0, _k1_matrix(geom), None)
    z = geom.z
    max_sep = float(np.max(np.abs(z[:, None] - z[None, :])))
    if beta * max_sep > np.pi:
        raise GeometryError(
            f"beta * max|z - z'| = {beta * max_sep:.4g} > pi; bubble too large for the channel"
        )
    return KernelContext(geom, beta, _k1_matrix(geom), _k2_matrix(geom, beta))


def apply_K1(ctx: KernelContext, f: PeriodicField) -> PeriodicField:
    return PeriodicField.from_values(ctx.k1_matrix @ f.values)


def apply_K2(ctx: KernelContext, f: PeriodicField) -> PeriodicField:
    if ctx.k2_matrix is None:
        return PeriodicField.zeros(ctx.n)
    return PeriodicField.from_values(ctx.k2_matrix @ f.values)


def apply_K(ctx: KernelContext, f: PeriodicField) -> PeriodicField:
    """K[z] f = K1[z] f + K2[z] f."""
    vals = ctx.k1_matrix @ f.values
    if ctx.k2_matrix is not None:
        vals = vals + ctx.k2_matrix @ f.values
    return PeriodicField.from_values(vals)


def _inv_z_alpha(ctx: KernelContext) -> PeriodicField:
    return PeriodicField.from_values(1.0 / ctx.geometry.z_alpha)


def apply_G(ctx: KernelContext, gamma: PeriodicField) -> PeriodicField:
    """G[z] gamma = z_alpha [H, 1/z_alpha] gamma + 2i z_alpha K[z] gamma."""
    za = ctx.geometry.z_alpha
    comm = commutator_h(_inv_z_alpha(ctx), gamma)
    vals = za * comm.values + 2j * za * apply_K(ctx, gamma).values
    return PeriodicField.from_values(vals)


def apply_G1(ctx: KernelContext, gamma: PeriodicField) -> PeriodicField:
    za = ctx.geometry.z_alpha
    comm = commutator_h(_inv_z_alpha(ctx), gamma)
    vals = za * comm.values + 2j * za * apply_K1(ctx, gamma).values
    return PeriodicField.from_values(vals)


def apply_G2(ctx: KernelContext, gamma: PeriodicField) -> PeriodicField:
    """Sidewall part G2[z] gamma = 2i z_alpha K2[z] gamma (zero when beta = 0)."""
    if ctx.k2_matrix is None:
        return PeriodicField.zeros(ctx.n)
    za = ctx.geometry.z_alpha
    return PeriodicField.from_values(2j * za * (ctx.k2_matrix @ gamma.values))


def apply_F(ctx: KernelContext, gamma: PeriodicField) -> PeriodicField:
    """F[z] gamma = Re(G[z] gamma / i) = Im(G[z] gamma)."""
    return PeriodicField.from_values(np.imag(apply_G(ctx, gamma).values))


def fast_sheet_operator(ctx: KernelContext):
    """Raw-array evaluation of v -> F[z] v for iterative solves.

    Matches apply_F (same dealiasing and quadrature) without the field
    bookkeeping; returns a callable on real sample vectors.
    """
    n = ctx.n
    za = ctx.geometry.z_alpha
    inv_za = 1.0 / za
    k = wavenumbers(n)
    minus_i_sign = -1j * np.sign(k)
    kill = (np.abs(k) > n // 3) | (np.abs(k) == n // 2)
    k1, k2 = ctx.k1_matrix, ctx.k2_matrix

    def analyze_prod(vals):
        c = np.fft.fft(vals) / n
        c[kill] = 0.0
        return c

    def apply(v: np.ndarray) -> np.ndarray:
        h_pv = np.fft.ifft(minus_i_sign * analyze_prod(inv_za * v)) * n
        v_hat = np.fft.fft(v) / n
        v_hat[n // 2] = 0.0
        hv = np.fft.ifft(minus_i_sign * v_hat) * n
        p_hv = np.fft.ifft(analyze_prod(inv_za * hv)) * n
        quad = k1 @ v if k2 is None else k1 @ v + k2 @ v
        g = za * (h_pv - p_hv) + 2j * za * quad
        return np.imag(g)

    return apply
