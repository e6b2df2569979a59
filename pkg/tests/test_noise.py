import math

import numpy as np
import pytest

from chipgyro.errors import ConfigError, DivergentIntegralError, DomainMismatchError
from chipgyro.interferometer import rb87_config, scale_factor, transfer_H_abs2
from chipgyro.noise import (
    PowerSpectralDensity,
    acceleration_phase_variance,
    convert_psd,
    phase_sigma_to_rotation_sigma,
    phase_variance,
    rotation_phase_variance,
)


def _small_config(**kwargs):
    kwargs.setdefault("pulse_duration", 0.01)
    kwargs.setdefault("interrogation_time", 1.0)
    return rb87_config(**kwargs)


def test_zero_psd_gives_zero_variance():
    cfg = _small_config()
    psd = PowerSpectralDensity(domain="phase")
    result = phase_variance(psd, cfg)
    assert result.value == 0.0
    assert result.sigma == 0.0


def test_parseval_white_phase_noise():
    """For white phase noise S0, the variance is S0 * int |H|^2 df, and
    Parseval fixes int_0^inf |H|^2 df = int h^2 dt / 2 = 1/tau exactly."""
    cfg = _small_config()
    s0 = 1e-8
    psd = PowerSpectralDensity(domain="phase", white=s0)
    f_max = 200.0 / cfg.pulse_duration  # leaves a ~0.1% spectral tail
    result = phase_variance(psd, cfg, f_min=1e-5, f_max=f_max)
    expected = s0 / cfg.pulse_duration
    assert result.value == pytest.approx(expected, rel=1e-2)
    assert result.error_estimate < 1e-6 * result.value


def test_quadrature_against_trapezoid_oracle():
    """Brute-force uniform trapezoid on a truncated band, resolving every
    oscillation, vs the panel quadrature."""
    cfg = _small_config()
    psd = PowerSpectralDensity(domain="phase", white=2e-9, flicker=3e-10, random_walk=5e-12)
    f_min, f_max = 1e-4, 50.0
    f = np.linspace(f_min, f_max, 2_000_001)
    integrand = psd.evaluate(f) * transfer_H_abs2(f, cfg)
    oracle = np.trapezoid(integrand, f)
    result = phase_variance(psd, cfg, f_min=f_min, f_max=f_max)
    assert result.value == pytest.approx(oracle, rel=1e-3)


def test_acceleration_kernel_against_direct_quadrature():
    cfg = _small_config()
    psd = PowerSpectralDensity(domain="acceleration", white=1e-12)
    f_min, f_max = 0.05, 20.0
    f = np.linspace(f_min, f_max, 2_000_001)
    kernel = cfg.k_eff ** 2 / (2 * np.pi * f) ** 4
    oracle = np.trapezoid(psd.evaluate(f) * kernel * transfer_H_abs2(f, cfg), f)
    result = acceleration_phase_variance(psd, cfg, f_min=f_min, f_max=f_max)
    assert result.value == pytest.approx(oracle, rel=1e-3)
    assert "cutoff" in result.notes


def test_rotation_kernel_against_direct_quadrature():
    cfg = _small_config()
    psd = PowerSpectralDensity(domain="rotation", white=1e-14)
    f_min, f_max = 0.05, 20.0
    f = np.linspace(f_min, f_max, 2_000_001)
    kernel = (2 * cfg.k_eff * cfg.guide_radius) ** 2 / (2 * np.pi * f) ** 2
    oracle = np.trapezoid(psd.evaluate(f) * kernel * transfer_H_abs2(f, cfg), f)
    result = rotation_phase_variance(psd, cfg, f_min=f_min, f_max=f_max)
    assert result.value == pytest.approx(oracle, rel=1e-3)


def test_tabulated_round_trip_exact():
    """phase -> acceleration -> rotation -> phase on the tabulated grid is an
    identity to better than 1e-9 relative."""
    cfg = _small_config()
    f = np.geomspace(1e-3, 1e3, 301)
    values = 1e-8 * (1.0 + np.sin(np.log(f)) ** 2)
    psd = PowerSpectralDensity(domain="phase", frequencies=f, values=values)
    acc = convert_psd(psd, "acceleration", cfg.k_eff, cfg.guide_radius)
    rot = convert_psd(acc, "rotation", cfg.k_eff, cfg.guide_radius)
    back = convert_psd(rot, "phase", cfg.k_eff, cfg.guide_radius)
    assert np.max(np.abs(back.values - values) / values) < 1e-9


def test_variance_invariant_under_domain_conversion():
    """White acceleration noise converts to an exact 1/f^4 phase PSD (log-log
    interpolation is exact on power laws), so the two variance routes agree."""
    cfg = _small_config()
    acc = PowerSpectralDensity(domain="acceleration", white=1e-12)
    f_min, f_max = 0.05, 20.0
    grid = np.geomspace(f_min / 2, f_max * 2, 101)
    as_phase = convert_psd(acc, "phase", cfg.k_eff, cfg.guide_radius, grid=grid)
    v1 = acceleration_phase_variance(acc, cfg, f_min=f_min, f_max=f_max).value
    v2 = phase_variance(as_phase, cfg, f_min=f_min, f_max=f_max).value
    assert v2 == pytest.approx(v1, rel=1e-3)


def test_interpolation_reproduces_grid_points():
    f = np.geomspace(1e-2, 1e2, 41)
    values = 1e-9 * f ** -1.3
    psd = PowerSpectralDensity(domain="phase", frequencies=f, values=values)
    assert np.allclose(psd.evaluate(f), values, rtol=1e-12)
    # and log-log interpolation is exact on the power law in between
    mid = np.sqrt(f[:-1] * f[1:])
    assert np.allclose(psd.evaluate(mid), 1e-9 * mid ** -1.3, rtol=1e-10)


def test_line_at_transfer_zero_is_suppressed():
    """A narrow spectral line sitting on a zero of H contributes >= 1e6 times
    less than the same line at a transmission maximum."""
    cfg = _small_config()
    d = cfg.interrogation_time - cfg.pulse_duration
    f_zero = 5.0 / d
    f_peak = 5.5 / d
    width = 1e-6

    def line_psd(f0):
        f = np.array([f0 - width, f0 - width / 2, f0, f0 + width / 2, f0 + width])
        s = np.array([0.0, 0.5, 1.0, 0.5, 0.0]) * 1e-6
        return PowerSpectralDensity(domain="phase", frequencies=f, values=s)

    band = dict(f_min=1e-4, f_max=20.0)
    at_zero = phase_variance(line_psd(f_zero), cfg, **band).value
    at_peak = phase_variance(line_psd(f_peak), cfg, **band).value
    assert at_peak > 0
    assert at_zero < at_peak / 1e6


def test_monotone_in_psd_level():
    cfg = _small_config()
    v1 = phase_variance(PowerSpectralDensity(domain="phase", white=1e-9), cfg).value
    v2 = phase_variance(PowerSpectralDensity(domain="phase", white=2e-9), cfg).value
    assert v2 == pytest.approx(2.0 * v1, rel=1e-12)


def test_divergent_cutoff_raises():
    cfg = _small_config()
    psd = PowerSpectralDensity(domain="phase", white=1e-9)
    with pytest.raises(DivergentIntegralError):
        phase_variance(psd, cfg, f_min=0.0)
    with pytest.raises(ConfigError):
        phase_variance(psd, cfg, f_min=1.0, f_max=0.5)


def test_domain_mismatch_raises():
    cfg = _small_config()
    psd = PowerSpectralDensity(domain="rotation", white=1e-14)
    with pytest.raises(DomainMismatchError):
        phase_variance(psd, cfg)
    with pytest.raises(DomainMismatchError):
        acceleration_phase_variance(psd, cfg)
    with pytest.raises(DomainMismatchError):
        rotation_phase_variance(PowerSpectralDensity(domain="phase", white=1e-9), cfg)


def test_psd_validation():
    with pytest.raises(ConfigError):
        PowerSpectralDensity(domain="volts", white=1.0)
    with pytest.raises(ConfigError):
        PowerSpectralDensity(domain="phase", white=-1.0)
    with pytest.raises(ConfigError):
        PowerSpectralDensity(
            domain="phase", frequencies=np.array([1.0, 0.5]), values=np.array([1.0, 1.0])
        )
    with pytest.raises(ConfigError):
        PowerSpectralDensity(domain="phase", frequencies=np.array([1.0, 2.0]), values=None)
    psd = PowerSpectralDensity(domain="phase", white=1e-9)
    with pytest.raises(ConfigError):
        psd.evaluate(np.array([-1.0, 1.0]))


def test_psd_from_csv(tmp_path):
    path = tmp_path / "psd.csv"
    path.write_text("f_hz,psd_value\n0.1,1e-8\n1.0,1e-9\n10.0,1e-10\n")
    psd = PowerSpectralDensity.from_csv(str(path), domain="phase")
    assert psd.is_tabulated
    assert psd.evaluate(1.0) == pytest.approx(1e-9)
    bad = tmp_path / "bad.csv"
    bad.write_text("freq,value\n0.1,1e-8\n1.0,1e-9\n")
    with pytest.raises(ConfigError):
        PowerSpectralDensity.from_csv(str(bad), domain="phase")


def test_phase_sigma_to_rotation_sigma_inverts_scale_factor():
    cfg = _small_config()
    sigma_phi = 0.02
    omega = phase_sigma_to_rotation_sigma(sigma_phi, cfg)
    assert omega * scale_factor(cfg) == pytest.approx(sigma_phi, rel=1e-14)
