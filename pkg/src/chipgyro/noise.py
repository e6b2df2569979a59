"""Propagation of noise power spectral densities to interferometer phase.

All PSDs are one-sided and expressed against ordinary frequency f in Hz;
angular frequency enters only through explicit omega = 2 pi f factors inside
the propagation kernels. Results carry their integration band and convention
so no number leaves the module without its hypotheses.

Kernels (omega = 2 pi f):
  phase:        sigma^2 = int S_phi(f) |H(f)|^2 df
  acceleration: sigma^2 = int (k_eff^2 / omega^4) S_a(f) |H(f)|^2 df
  rotation:     sigma^2 = int ((2 k_eff R)^2 / omega^2) S_Omega(f) |H(f)|^2 df
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, DegenerateOrientationError, DivergentIntegralError, DomainMismatchError
from .interferometer import InterferometerConfig, scale_factor, transfer_H_abs2, transfer_zeros

DOMAINS = ("phase", "acceleration", "rotation")

DEFAULT_F_MIN = 1e-4  # Hz, infrared cutoff
ONE_SIDED_CONVENTION = "one-sided, ordinary frequency"

_GL_LO = np.polynomial.legendre.leggauss(7)
_GL_HI = np.polynomial.legendre.leggauss(15)
_PANEL_CHUNK = 200_000


@dataclass(frozen=True)
class PowerSpectralDensity:
    """One-sided PSD, either analytic (white + flicker + random walk
    components) or tabulated on a strictly increasing frequency grid with
    log-log interpolation and end-segment power-law extrapolation."""

    domain: str
    white: float = 0.0        # h0
    flicker: float = 0.0      # h_-1, S += h_-1 / f
    random_walk: float = 0.0  # h_-2, S += h_-2 / f^2
    frequencies: Optional[np.ndarray] = field(default=None, repr=False)
    values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ConfigError(f"unknown PSD domain {self.domain!r}; expected one of {DOMAINS}")
        if (self.frequencies is None) != (self.values is None):
            raise ConfigError("tabulated PSD needs both frequencies and values")
        if self.frequencies is not None:
            f = np.asarray(self.frequencies, dtype=float)
            s = np.asarray(self.values, dtype=float)
            if f.ndim != 1 or f.size < 2 or f.shape != s.shape:
                raise ConfigError("tabulated PSD needs 1D grids of equal length >= 2")
            if np.any(f <= 0) or np.any(np.diff(f) <= 0):
                raise ConfigError("PSD frequency grid must be strictly increasing and > 0")
            if np.any(s < 0) or not np.all(np.isfinite(s)):
                raise ConfigError("PSD values must be finite and >= 0")
            object.__setattr__(self, "frequencies", f)
            object.__setattr__(self, "values", s)
        for name in ("white", "flicker", "random_walk"):
            if getattr(self, name) < 0:
                raise ConfigError(f"analytic PSD component {name} must be >= 0")

    @property
    def is_tabulated(self) -> bool:
        return self.frequencies is not None

    def evaluate(self, f):
        """S(f) for f > 0 (vectorized)."""
        f = np.asarray(f, dtype=float)
        if np.any(f <= 0):
            raise ConfigError("PSDs are one-sided: evaluation needs f > 0")
        if not self.is_tabulated:
            return self.white + self.flicker / f + self.random_walk / f ** 2
        return self._interpolate(f)

    def _interpolate(self, f):
        grid = self.frequencies
        vals = self.values
        logf = np.log(f)
        loggrid = np.log(grid)
        idx = np.clip(np.searchsorted(grid, f, side="right") - 1, 0, grid.size - 2)
        f0, f1 = grid[idx], grid[idx + 1]
        s0, s1 = vals[idx], vals[idx + 1]
        frac = (logf - loggrid[idx]) / (loggrid[idx + 1] - loggrid[idx])
        # log-log segments where both endpoints are positive, linear otherwise
        positive = (s0 > 0) & (s1 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            loglog = np.exp(
                np.log(np.where(positive, s0, 1.0))
                + frac * (np.log(np.where(positive, s1, 1.0)) - np.log(np.where(positive, s0, 1.0)))
            )
        linear = s0 + (f - f0) / (f1 - f0) * (s1 - s0)
        out = np.where(positive, loglog, linear)
        # extrapolation is pinned to the end segments, so out-of-range points
        # reuse idx = 0 / idx = n-2 above; clamp the linear branch at >= 0
        return np.maximum(out, 0.0)

    @classmethod
    def from_csv(cls, path, domain: str) -> "PowerSpectralDensity":
        """Load a tabulated PSD from CSV with header ``f_hz,psd_value``."""
        data = np.genfromtxt(path, delimiter=",", names=True)
        try:
            f = np.atleast_1d(data["f_hz"]).astype(float)
            s = np.atleast_1d(data["psd_value"]).astype(float)
        except (KeyError, ValueError):
            raise ConfigError(f"PSD file {path} must have header 'f_hz,psd_value'") from None
        return cls(domain=domain, frequencies=f, values=s)


def convert_psd(
    psd: PowerSpectralDensity,
    target_domain: str,
    k_eff: float,
    guide_radius: float,
    grid: Optional[np.ndarray] = None,
) -> PowerSpectralDensity:
    """Re-express a PSD in another domain through the exact kernel identities
    S_a = (omega^4 / k_eff^2) S_phi and S_Omega = (omega^2 / (2 k_eff R)^2) S_phi.

    Tabulated PSDs convert pointwise on their own grid (round trips are exact);
    analytic PSDs need an explicit grid and come back tabulated.
    """
    if target_domain not in DOMAINS:
        raise ConfigError(f"unknown PSD domain {target_domain!r}")
    if psd.is_tabulated:
        f = psd.frequencies
        s = psd.values
    else:
        if grid is None:
            raise ConfigError("converting an analytic PSD needs an explicit frequency grid")
        f = np.asarray(grid, dtype=float)
        s = psd.evaluate(f)
    omega = 2.0 * np.pi * f
    # factor taking this domain's PSD to the equivalent phase PSD
    to_phase = {
        "phase": np.ones_like(omega),
        "acceleration": k_eff ** 2 / omega ** 4,
        "rotation": (2.0 * k_eff * guide_radius) ** 2 / omega ** 2,
    }
    s_phase = s * to_phase[psd.domain]
    s_target = s_phase / to_phase[target_domain]
    return PowerSpectralDensity(domain=target_domain, frequencies=f, values=s_target)


@dataclass(frozen=True)
class VarianceResult:
    """Quadrature result with its full hypothesis set."""

    value: float            # rad^2
    error_estimate: float   # rad^2
    band: tuple             # (f_min, f_max) in Hz
    domain: str
    convention: str = ONE_SIDED_CONVENTION
    notes: str = ""

    @property
    def sigma(self) -> float:
        return math.sqrt(max(self.value, 0.0))

    def as_record(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "band": list(self.band),
            "domain": self.domain,
            "convention": self.convention,
            "notes": self.notes,
        }


def _integration_breakpoints(config, psd, f_min, f_max):
    """Panel boundaries: band edges, every transfer-function zero in band,
    tabulated-grid knots, and log-spaced filler so wide panels stay narrow in
    ratio."""
    points = [np.array([f_min, f_max])]
    zeros = transfer_zeros(config, f_max)
    points.append(zeros[(zeros > f_min) & (zeros < f_max)])
    if psd.is_tabulated:
        grid = psd.frequencies
        points.append(grid[(grid > f_min) & (grid < f_max)])
    # log filler between f_min and the first zero (or f_max)
    first = zeros[0] if zeros.size else f_max
    first = min(first, f_max)
    if first > f_min * 2:
        n_fill = int(math.ceil(math.log2(first / f_min))) * 4
        points.append(np.geomspace(f_min, first, n_fill + 1))
    pts = np.unique(np.concatenate(points))
    return pts[(pts >= f_min) & (pts <= f_max)]


def _panel_quadrature(integrand, lo, hi):
    """Fixed 15-node Gauss value and |15-node - 7-node| error per panel,
    vectorized over panel arrays."""

    def gauss(nodes, weights):
        x = nodes[None, :]
        mid = 0.5 * (lo + hi)[:, None]
        half = 0.5 * (hi - lo)[:, None]
        f = integrand((mid + half * x).ravel()).reshape(lo.size, nodes.size)
        return (f @ weights) * (0.5 * (hi - lo))

    hi_est = gauss(*_GL_HI)
    lo_est = gauss(*_GL_LO)
    return hi_est, np.abs(hi_est - lo_est)


def _integrate_band(integrand, breakpoints, rtol):
    lo_all = breakpoints[:-1]
    hi_all = breakpoints[1:]
    total = 0.0
    err = 0.0
    refine_lo = []
    refine_hi = []
    for start in range(0, lo_all.size, _PANEL_CHUNK):
        lo = lo_all[start : start + _PANEL_CHUNK]
        hi = hi_all[start : start + _PANEL_CHUNK]
        vals, errs = _panel_quadrature(integrand, lo, hi)
        bad = errs > rtol * max(abs(float(vals.sum())), 1e-300) / max(lo_all.size, 1)
        # flagged panels are re-integrated below; only keep the good ones here
        total += float(vals[~bad].sum())
        err += float(errs[~bad].sum())
        refine_lo.append(lo[bad])
        refine_hi.append(hi[bad])
    # one refinement sweep: split flagged panels eightfold
    lo = np.concatenate(refine_lo) if refine_lo else np.empty(0)
    hi = np.concatenate(refine_hi) if refine_hi else np.empty(0)
    if lo.size:
        edges = np.linspace(lo, hi, 9, axis=1)
        sub_lo = edges[:, :-1].ravel()
        sub_hi = edges[:, 1:].ravel()
        for start in range(0, sub_lo.size, _PANEL_CHUNK):
            vals, errs = _panel_quadrature(
                integrand, sub_lo[start : start + _PANEL_CHUNK], sub_hi[start : start + _PANEL_CHUNK]
            )
            total += float(vals.sum())
            err += float(errs.sum())
    return total, err


def _variance(psd, config, kernel, f_min, f_max, rtol, notes=""):
    if f_min <= 0 or not math.isfinite(f_min):
        raise DivergentIntegralError(
            f"infrared cutoff must be > 0 (band [{f_min}, {f_max}]): the kernel is "
            "non-integrable down to f = 0"
        )
    if f_max is None:
        f_max = 10.0 / config.pulse_duration
    if f_max <= f_min:
        raise ConfigError(f"empty integration band [{f_min}, {f_max}]")

    def integrand(f):
        return psd.evaluate(f) * kernel(f) * transfer_H_abs2(f, config)

    breakpoints = _integration_breakpoints(config, psd, f_min, f_max)
    value, err = _integrate_band(integrand, breakpoints, rtol)
    if not math.isfinite(value):
        raise DivergentIntegralError(f"noise integral diverged on band [{f_min}, {f_max}]")
    return VarianceResult(
        value=value,
        error_estimate=err,
        band=(f_min, f_max),
        domain=psd.domain,
        notes=notes,
    )


def phase_variance(
    psd: PowerSpectralDensity,
    config: InterferometerConfig,
    f_min: float = DEFAULT_F_MIN,
    f_max: Optional[float] = None,
    rtol: float = 1e-6,
) -> VarianceResult:
    """sigma_phi^2 = int S_phi |H|^2 df over the declared band."""
    if psd.domain != "phase":
        raise DomainMismatchError(f"phase_variance needs a phase PSD, got {psd.domain!r}")
    return _variance(psd, config, lambda f: np.ones_like(np.asarray(f, float)), f_min, f_max, rtol)


def acceleration_phase_variance(
    psd: PowerSpectralDensity,
    config: InterferometerConfig,
    k_eff: Optional[float] = None,
    f_min: float = DEFAULT_F_MIN,
    f_max: Optional[float] = None,
    rtol: float = 1e-6,
) -> VarianceResult:
    """Vibration phase variance: int (k_eff^2 / omega^4) S_a |H|^2 df.

    The omega^-4 weight makes the integrand grow like 1/f^2 towards DC for
    white acceleration noise; the declared infrared cutoff bounds it and is
    echoed in the result.
    """
    if psd.domain != "acceleration":
        raise DomainMismatchError(
            f"acceleration_phase_variance needs an acceleration PSD, got {psd.domain!r}"
        )
    if k_eff is None:
        k_eff = config.k_eff

    def kernel(f):
        omega = 2.0 * np.pi * np.asarray(f, float)
        return k_eff ** 2 / omega ** 4

    notes = f"omega^-4 kernel bounded by infrared cutoff {f_min} Hz"
    return _variance(psd, config, kernel, f_min, f_max, rtol, notes=notes)


def rotation_phase_variance(
    psd: PowerSpectralDensity,
    config: InterferometerConfig,
    k_eff: Optional[float] = None,
    guide_radius: Optional[float] = None,
    f_min: float = DEFAULT_F_MIN,
    f_max: Optional[float] = None,
    rtol: float = 1e-6,
) -> VarianceResult:
    """Rotation-noise phase variance: int ((2 k_eff R)^2 / omega^2) S_Omega |H|^2 df."""
    if psd.domain != "rotation":
        raise DomainMismatchError(
            f"rotation_phase_variance needs a rotation PSD, got {psd.domain!r}"
        )
    if k_eff is None:
        k_eff = config.k_eff
    if guide_radius is None:
        guide_radius = config.guide_radius

    def kernel(f):
        omega = 2.0 * np.pi * np.asarray(f, float)
        return (2.0 * k_eff * guide_radius) ** 2 / omega ** 2

    return _variance(psd, config, kernel, f_min, f_max, rtol)


def phase_sigma_to_rotation_sigma(sigma_phi: float, config: InterferometerConfig) -> float:
    """Rms output phase to rms rotation rate: sigma_phi over the scale factor,
    i.e. (pi/4)(hbar/M) sigma_phi / (v_r v_launch (2T)^2 sin(latitude))."""
    if math.sin(config.latitude) == 0.0:
        raise DegenerateOrientationError("sin(latitude) = 0: no rotation projection")
    return sigma_phi / scale_factor(config)
