"""Single-qubit noisy channels and their one-sided action on photon pairs.

Amplitude decay models Brewster-angle glass slabs: a V photon is reflected
with probability ``epsilon`` and the reflected photon is registered as H.
Phase damping models a birefringent quartz delay seen by a photon of finite
bandwidth; the coherence factor ``kappa`` is the characteristic function of
the photon spectrum evaluated at the delay ``L * dn / c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import qmat
from .states import lift

C_LIGHT = 299_792_458.0
COMPLETENESS_TOL = 1e-12
FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))
QUAD_HALF_WIDTH = 8.0
QUAD_MIN_POINTS = 4001


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]
    name: str = "kraus"

    def __post_init__(self):
        ops = tuple(qmat.as_matrix(k) for k in self.operators)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (2, 2):
                raise ChannelError(f"Kraus operators must be 2x2, got {k.shape}")
        err = completeness_error(ops)
        if err > COMPLETENESS_TOL:
            raise ChannelError(f"Kraus operators are not trace preserving (error {err:.3e})")
        object.__setattr__(self, "operators", ops)

    def __len__(self) -> int:
        return len(self.operators)


def completeness_error(ops: Sequence[np.ndarray]) -> float:
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - qmat.I2)))


def identity_channel() -> KrausChannel:
    return KrausChannel((qmat.I2.copy(),), name="identity")


def amplitude_decay(epsilon: float) -> KrausChannel:
    """Reflect V -> H with probability ``epsilon``."""
    if not 0.0 <= epsilon <= 1.0:
        raise ChannelError(f"epsilon must lie in [0, 1], got {epsilon}")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - epsilon)]], dtype=complex)
    if epsilon == 0.0:
        return KrausChannel((k0,), name="amplitude")
    k1 = np.array([[0.0, np.sqrt(epsilon)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((k0, k1), name="amplitude")


def phase_damping(kappa: complex) -> KrausChannel:
    """Keep populations, scale the V/H coherence by ``kappa``."""
    kappa = complex(kappa)
    mag = abs(kappa)
    if mag > 1.0:
        raise ChannelError(f"|kappa| must be <= 1, got {mag}")
    k0 = np.diag([1.0, kappa]).astype(complex)
    if mag == 1.0:
        return KrausChannel((k0,), name="phase")
    k1 = np.diag([0.0, np.sqrt(1.0 - mag * mag)]).astype(complex)
    return KrausChannel((k0, k1), name="phase")


def epsilon_from_slabs(pair_count: int, r_per_pair: float) -> float:
    """Total reflectivity of ``pair_count`` slab pairs reflecting independently."""
    if pair_count < 0 or int(pair_count) != pair_count:
        raise ChannelError(f"pair_count must be a nonnegative integer, got {pair_count}")
    if not 0.0 <= r_per_pair <= 1.0:
        raise ChannelError(f"r_per_pair must lie in [0, 1], got {r_per_pair}")
    return 1.0 - (1.0 - r_per_pair) ** int(pair_count)


def apply_one_sided(rho, ch: KrausChannel, side: str = "B") -> np.ndarray:
    rho = qmat.as_matrix(rho)
    out = np.zeros((4, 4), dtype=complex)
    for k in ch.operators:
        big = lift(k, side)
        out += big @ rho @ big.conj().T
    return 0.5 * (out + out.conj().T)


def transmitted_branch(rho, epsilon: float) -> np.ndarray:
    """Unnormalized state of pairs whose b photon passed the slabs."""
    k0 = amplitude_decay(epsilon).operators[0]
    big = lift(k0, "B")
    return big @ qmat.as_matrix(rho) @ big.conj().T


def reflected_branch(rho, epsilon: float) -> tuple[float, np.ndarray | None]:
    """Probability and normalized state of pairs whose b photon was reflected.

    The reflected photon is relabelled to H, so the returned state lives in the
    same two-qubit space. Returns ``(0.0, None)`` when nothing is reflected.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ChannelError(f"epsilon must lie in (0, 1], got {epsilon}")
    m = np.array([[0.0, np.sqrt(epsilon)], [0.0, 0.0]], dtype=complex)
    big = lift(m, "B")
    unnorm = big @ qmat.as_matrix(rho) @ big.conj().T
    p = float(np.trace(unnorm).real)
    if p <= 0.0:
        return 0.0, None
    return p, unnorm / p


def random_cptp(seed: int, kraus_count: int) -> KrausChannel:
    """Random channel from a Haar-distributed isometry C^2 -> C^(2k).

    The isometry is the first two columns of a Haar unitary (QR of a complex
    Ginibre matrix with the diagonal phases of R removed), cut into ``k``
    stacked 2x2 blocks.
    """
    if not 1 <= kraus_count <= 4:
        raise ChannelError(f"kraus_count must be in [1, 4], got {kraus_count}")
    rng = np.random.default_rng(seed)
    n = 2 * kraus_count
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    iso = q[:, :2]
    ops = tuple(iso[2 * i : 2 * i + 2, :].copy() for i in range(kraus_count))
    return KrausChannel(ops, name="random")


class SpectrumKind(str, Enum):
    MONOCHROMATIC = "Monochromatic"
    GAUSSIAN = "Gaussian"
    FABRY_PEROT_COMB = "FabryPerotComb"


@dataclass(frozen=True)
class CombLine:
    """One cavity transmission line: weight, offset from center and FWHM (rad/s)."""

    weight: float
    center_offset: float
    fwhm: float


@dataclass(frozen=True)
class SpectralModel:
    kind: SpectrumKind = SpectrumKind.GAUSSIAN
    center_wavelength: float = 780e-9
    fwhm_wavelength: float = 3e-9
    comb: tuple[CombLine, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SpectrumKind(self.kind))
        if self.center_wavelength <= 0:
            raise ChannelError("center_wavelength must be positive")
        if self.kind is not SpectrumKind.MONOCHROMATIC and self.fwhm_wavelength <= 0:
            raise ChannelError("fwhm_wavelength must be positive for a finite-bandwidth spectrum")
        if self.kind is SpectrumKind.FABRY_PEROT_COMB:
            comb = tuple(self.comb) if self.comb is not None else default_comb(self)
            if not comb:
                raise ChannelError("comb spectrum needs at least one line")
            for line in comb:
                if line.weight < 0 or line.fwhm <= 0:
                    raise ChannelError("comb lines need weight >= 0 and fwhm > 0")
            if sum(line.weight for line in comb) <= 0:
                raise ChannelError("comb weights sum to zero")
            object.__setattr__(self, "comb", comb)

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi * C_LIGHT / self.center_wavelength

    @property
    def sigma_omega(self) -> float:
        """Angular-frequency standard deviation of the filter line (linearized in wavelength)."""
        sigma_lambda = self.fwhm_wavelength * FWHM_TO_SIGMA
        return self.omega0 * sigma_lambda / self.center_wavelength


def default_comb(spec: SpectralModel) -> tuple[CombLine, ...]:
    """Two equal lines split symmetrically by one filter sigma each side."""
    sig = spec.sigma_omega
    width = 0.2 * sig / FWHM_TO_SIGMA
    return (CombLine(0.5, -sig, width), CombLine(0.5, sig, width))


@dataclass(frozen=True)
class QuartzRetardation:
    l_delta_n: float
    delta_n: float = 0.01

    def __post_init__(self):
        if self.l_delta_n < 0:
            raise ChannelError(f"l_delta_n must be >= 0, got {self.l_delta_n}")

    @property
    def thickness(self) -> float:
        return self.l_delta_n / self.delta_n

    @classmethod
    def from_waves(cls, waves: float, wavelength: float = 780e-9, delta_n: float = 0.01):
        return cls(l_delta_n=waves * wavelength, delta_n=delta_n)


def _grid_integral(omega: np.ndarray, density: np.ndarray, tau: float) -> complex:
    # phase referenced to the grid midpoint keeps the integrand slowly varying
    mid = 0.5 * (omega[0] + omega[-1])
    norm = np.trapezoid(density, omega)
    val = np.trapezoid(density * np.exp(1j * tau * (omega - mid)), omega) / norm
    return complex(val * np.exp(1j * tau * mid))


def spectrum_grid(spec: SpectralModel) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature grid and unnormalized spectral density for finite-bandwidth spectra."""
    w0 = spec.omega0
    sig = spec.sigma_omega
    if spec.kind is SpectrumKind.GAUSSIAN:
        omega = np.linspace(w0 - QUAD_HALF_WIDTH * sig, w0 + QUAD_HALF_WIDTH * sig, QUAD_MIN_POINTS)
        return omega, np.exp(-0.5 * ((omega - w0) / sig) ** 2)
    if spec.kind is SpectrumKind.FABRY_PEROT_COMB:
        lines = spec.comb
        sigmas = [line.fwhm * FWHM_TO_SIGMA for line in lines]
        lo = min(w0 + ln.center_offset - QUAD_HALF_WIDTH * s for ln, s in zip(lines, sigmas))
        hi = max(w0 + ln.center_offset + QUAD_HALF_WIDTH * s for ln, s in zip(lines, sigmas))
        step = min(sigmas) / 40.0
        n = max(QUAD_MIN_POINTS, int(np.ceil((hi - lo) / step)) + 1)
        omega = np.linspace(lo, hi, n)
        total_w = sum(line.weight for line in lines)
        comb = np.zeros_like(omega)
        for line, s in zip(lines, sigmas):
            g = np.exp(-0.5 * ((omega - w0 - line.center_offset) / s) ** 2) / s
            comb += (line.weight / total_w) * g
        envelope = np.exp(-0.5 * ((omega - w0) / sig) ** 2)
        return omega, comb * envelope
    raise ChannelError("monochromatic spectrum has no quadrature grid")


def kappa_from_spectrum(ret: QuartzRetardation, spec: SpectralModel) -> complex:
    """Coherence factor ``int S(w) exp(i L dn w / c) dw`` for a normalized spectrum."""
    tau = ret.l_delta_n / C_LIGHT
    if tau == 0.0:
        return 1.0 + 0.0j
    if spec.kind is SpectrumKind.MONOCHROMATIC:
        return complex(np.exp(1j * tau * spec.omega0))
    omega, density = spectrum_grid(spec)
    k = _grid_integral(omega, density, tau)
    mag = abs(k)
    if mag > 1.0:
        k /= mag
    return k


def gaussian_kappa_closed_form(ret: QuartzRetardation, spec: SpectralModel) -> complex:
    """Characteristic function of the Gaussian line, used as an independent check."""
    tau = ret.l_delta_n / C_LIGHT
    sig = spec.sigma_omega
    return complex(np.exp(1j * tau * spec.omega0 - 0.5 * (tau * sig) ** 2))
