"""Fourier-space core for 2pi-periodic fields.

Grid/coefficient duals, the Hilbert transform and |k| multipliers,
spectral derivatives and antiderivatives, high-pass projections, and
plain/weighted Sobolev norms.  Everything here is a pure function of its
inputs; fields are never mutated after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PeriodicField",
    "CumulativeIntegral",
    "WeightProfile",
    "grid",
    "wavenumbers",
    "mirror_index",
    "hilbert",
    "lambda_op",
    "derivative",
    "cumulative_integral",
    "project_qn",
    "multiply",
    "dealias",
    "sobolev_norm",
    "weighted_norm",
    "weighted_inner",
    "l2_inner",
    "resample",
]

_HERMITIAN_TOL = 1e-13


_GRIDS: dict[int, np.ndarray] = {}
_WAVENUMBERS: dict[int, np.ndarray] = {}


def grid(n: int) -> np.ndarray:
    """Uniform grid alpha_j = 2*pi*j/n (cached, do not mutate)."""
    g = _GRIDS.get(n)
    if g is None:
        g = 2.0 * np.pi * np.arange(n) / n
        _GRIDS[n] = g
    return g


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT ordering (cached, do not mutate)."""
    k = _WAVENUMBERS.get(n)
    if k is None:
        k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
        _WAVENUMBERS[n] = k
    return k


def _check_size(n: int) -> None:
    if n < 4 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 4, got {n}")


_MIRROR_INDEX: dict[int, np.ndarray] = {}


def mirror_index(n: int) -> np.ndarray:
    """Index array sending mode k to mode -k in FFT ordering (cached)."""
    idx = _MIRROR_INDEX.get(n)
    if idx is None:
        idx = (-np.arange(n)) % n
        _MIRROR_INDEX[n] = idx
    return idx


class PeriodicField:
    """A 2pi-periodic function held as grid samples and Fourier coefficients.

    Coefficients use numpy FFT ordering for integer wavenumbers
    -n/2 .. n/2-1 with the convention f(alpha) = sum_k fhat(k) e^{ik alpha}.
    The Nyquist coefficient is zeroed at construction so real fields stay
    conjugate-symmetric under every multiplier applied downstream.
    """

    __slots__ = ("n", "coeffs", "values", "_real")

    def __init__(self, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex).copy()
        n = coeffs.size
        _check_size(n)
        coeffs[n // 2] = 0.0
        self.n = n
        self.coeffs = coeffs
        self.values = np.fft.ifft(coeffs) * n
        self._real = None

    @property
    def real(self) -> bool:
        """True when fhat(-k) == conj(fhat(k)) to relative 1e-13."""
        if self._real is None:
            scale = np.max(np.abs(self.coeffs))
            if scale == 0.0:
                self._real = True
            else:
                mirrored = np.conj(self.coeffs[mirror_index(self.n)])
                self._real = bool(
                    np.max(np.abs(self.coeffs - mirrored)) <= _HERMITIAN_TOL * scale
                )
        return self._real

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_values(cls, values: np.ndarray) -> "PeriodicField":
        values = np.asarray(values)
        _check_size(values.size)
        return cls(np.fft.fft(values) / values.size)

    @classmethod
    def from_coeffs(cls, coeffs: np.ndarray) -> "PeriodicField":
        return cls(coeffs)

    @classmethod
    def zeros(cls, n: int) -> "PeriodicField":
        return cls(np.zeros(n, dtype=complex))

    @classmethod
    def from_modes(cls, n: int, modes: dict[int, complex]) -> "PeriodicField":
        """Field with the given coefficients, all others zero."""
        coeffs = np.zeros(n, dtype=complex)
        for k, value in modes.items():
            if not -n // 2 <= k < n // 2:
                raise ValueError(f"mode {k} outside grid of size {n}")
            coeffs[k % n] = value
        return cls(coeffs)

    @classmethod
    def from_real_modes(cls, n: int, modes: dict[int, complex]) -> "PeriodicField":
        """Real field: sets fhat(k) and fhat(-k) = conj for each k > 0."""
        coeffs = np.zeros(n, dtype=complex)
        for k, value in modes.items():
            if k < 0:
                raise ValueError("give nonnegative mode numbers only")
            coeffs[k % n] = value
            if k > 0:
                coeffs[-k % n] = np.conj(value)
            else:
                coeffs[0] = np.real(value)
        return cls(coeffs)

    # -- accessors --------------------------------------------------------

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real

    def coeff(self, k: int) -> complex:
        return complex(self.coeffs[k % self.n])

    def wavenumbers(self) -> np.ndarray:
        return wavenumbers(self.n)

    # -- arithmetic (linear only; pointwise products go through multiply) --

    def __add__(self, other):
        if isinstance(other, PeriodicField):
            return PeriodicField(self.coeffs + other.coeffs)
        coeffs = self.coeffs.copy()
        coeffs[0] += other
        return PeriodicField(coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PeriodicField):
            return PeriodicField(self.coeffs - other.coeffs)
        return self + (-other)

    def __neg__(self):
        return PeriodicField(-self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, PeriodicField):
            raise TypeError("use multiply() for field*field products")
        return PeriodicField(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"PeriodicField(n={self.n}, real={self.real})"


# -- multiplier operators --------------------------------------------------


def hilbert(f: PeriodicField) -> PeriodicField:
    """Hilbert transform: multiplier -i*sgn(k), zero mode annihilated."""
    k = f.wavenumbers()
    return PeriodicField(-1j * np.sign(k) * f.coeffs)


def lambda_op(f: PeriodicField) -> PeriodicField:
    """|k| multiplier (derivative followed by the Hilbert transform)."""
    k = f.wavenumbers()
    return PeriodicField(np.abs(k) * f.coeffs)


def derivative(f: PeriodicField, order: int = 1) -> PeriodicField:
    """Spectral derivative, multiplier (ik)^order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    k = f.wavenumbers()
    return PeriodicField((1j * k) ** order * f.coeffs)


def project_qn(f: PeriodicField, n: int) -> PeriodicField:
    """Zero all modes |k| <= n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    k = f.wavenumbers()
    coeffs = np.where(np.abs(k) <= n, 0.0, f.coeffs)
    return PeriodicField(coeffs)


@dataclass(frozen=True)
class CumulativeIntegral:
    """Antiderivative F(alpha) = periodic part + secular * alpha, F(0) = 0."""

    periodic: PeriodicField
    secular: complex

    def sample(self) -> np.ndarray:
        return self.periodic.values + self.secular * grid(self.periodic.n)


def cumulative_integral(f: PeriodicField) -> CumulativeIntegral:
    """F(alpha) = int_0^alpha f; fhat(0) contributes the secular slope."""
    k = f.wavenumbers()
    coeffs = np.zeros(f.n, dtype=complex)
    nz = k != 0
    coeffs[nz] = f.coeffs[nz] / (1j * k[nz])
    coeffs[0] = -np.sum(coeffs[nz])  # anchors F(0) = 0
    return CumulativeIntegral(PeriodicField(coeffs), complex(f.coeffs[0]))


# -- products and dealiasing -------------------------------------------------


def dealias(f: PeriodicField) -> PeriodicField:
    """Zero all modes |k| > n/3 (2/3 rule)."""
    k = f.wavenumbers()
    return PeriodicField(np.where(np.abs(k) > f.n // 3, 0.0, f.coeffs))


def multiply(f: PeriodicField, g: PeriodicField) -> PeriodicField:
    """Pointwise product, dealiased."""
    return dealias(PeriodicField.from_values(f.values * g.values))


# -- norms -------------------------------------------------------------------


def sobolev_norm(f: PeriodicField, r: float) -> float:
    """sqrt( sum_{k!=0} |k|^{2r} |fhat|^2 + |fhat(0)|^2 )."""
    k = f.wavenumbers()
    mags = np.abs(f.coeffs) ** 2
    weights = np.where(k == 0, 1.0, np.abs(k).astype(float) ** (2.0 * r))
    return float(np.sqrt(np.sum(weights * mags)))


@dataclass(frozen=True)
class WeightProfile:
    """Low-mode weights sigma^{K-|k|} used by the weighted Sobolev norm.

    For sigma >= 1 the cutoff is K = 2 and every weight is 1; for
    0 < sigma < 1 the cutoff is the smallest integer K >= sqrt(1 + 6/sigma)
    and modes 2 <= |k| <= K carry weight sigma^{K-|k|}.
    """

    sigma: float
    cutoff_K: int = field(init=False)

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.sigma >= 1.0:
            k = 2
        else:
            k = int(math.ceil(math.sqrt(1.0 + 6.0 / self.sigma)))
        object.__setattr__(self, "cutoff_K", k)

    def weight(self, k: np.ndarray) -> np.ndarray:
        """w(sigma, k) on an array of integer wavenumbers."""
        absk = np.abs(k)
        w = np.ones_like(absk, dtype=float)
        if self.sigma < 1.0:
            banded = (absk >= 2) & (absk <= self.cutoff_K)
            w[banded] = self.sigma ** (self.cutoff_K - absk[banded])
        return w


def weighted_norm(f: PeriodicField, w: WeightProfile, r: float) -> float:
    """sqrt( sum_{|k|>=2} w^2(sigma,k) |k|^{2r} |fhat|^2 )."""
    k = f.wavenumbers()
    keep = np.abs(k) >= 2
    kk = np.abs(k[keep]).astype(float)
    ww = w.weight(k[keep])
    return float(np.sqrt(np.sum(ww**2 * kk ** (2.0 * r) * np.abs(f.coeffs[keep]) ** 2)))


def weighted_inner(v: PeriodicField, u: PeriodicField, w: WeightProfile, r: float) -> float:
    """(v, u)_{w,r} = 2 Re sum_{k>=2} w^2 |k|^{2r} conj(vhat) uhat (real fields)."""
    k = v.wavenumbers()
    keep = k >= 2
    kk = k[keep].astype(float)
    ww = w.weight(k[keep])
    total = np.sum(ww**2 * kk ** (2.0 * r) * np.conj(v.coeffs[keep]) * u.coeffs[keep])
    return float(2.0 * np.real(total))


def l2_inner(f: PeriodicField, g: PeriodicField) -> float:
    """Real L^2 inner product int_0^{2pi} f g dalpha for real fields."""
    return float(np.real(2.0 * np.pi * np.sum(np.conj(f.coeffs) * g.coeffs)))


def resample(f: PeriodicField, n_new: int) -> PeriodicField:
    """Trigonometric interpolation onto a finer power-of-two grid."""
    if n_new < f.n:
        raise ValueError("resample only refines")
    coeffs = np.zeros(n_new, dtype=complex)
    half = f.n // 2
    coeffs[:half] = f.coeffs[:half]
    coeffs[-half:] = f.coeffs[-half:]
    return PeriodicField(coeffs)
