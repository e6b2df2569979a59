import math

import numpy as np
import pytest

from chipgyro.constants import species_rb87
from chipgyro.errors import ConfigError, NoGuideMinimumError, NonSmoothPotentialError
from chipgyro.guide import (
    CorrugationModel,
    characterize_guide,
    find_guide_minimum,
    modulated_roughness_average,
    potential_hessian,
    radial_frequency_quadrupole,
    roughness_potential,
)
from chipgyro.magnetostatics import design_guide_geometry, field_modulus


@pytest.fixture(scope="module")
def characterization():
    return characterize_guide(design_guide_geometry(), species_rb87())


def test_minimum_height(characterization):
    rho0, z0 = characterization.min_position
    assert abs(z0 - 13e-6) <= 0.2 * 13e-6
    assert rho0 == pytest.approx(500e-6, rel=0.03)
    assert characterization.B_min < 1e-9  # true quadrupole zero line


def test_minimum_against_fine_grid_oracle():
    """Independent check: a dense brute-force grid around the reported minimum
    finds no lower modulus, and its argmin agrees to the grid spacing."""
    geometry = design_guide_geometry()
    rho0, z0 = find_guide_minimum(geometry)
    rho = np.linspace(rho0 - 5e-6, rho0 + 5e-6, 501)
    z = np.linspace(z0 - 5e-6, z0 + 5e-6, 501)
    RR, ZZ = np.meshgrid(rho, z, indexing="ij")
    B = field_modulus(geometry, RR, ZZ)
    i, j = np.unravel_index(np.argmin(B), B.shape)
    spacing = rho[1] - rho[0]
    assert abs(rho[i] - rho0) <= spacing
    assert abs(z[j] - z0) <= spacing
    assert float(field_modulus(geometry, rho0, z0)) <= B[i, j] + 1e-15


def test_current_scaling_leaves_minimum_position():
    geometry = design_guide_geometry()
    pos1 = find_guide_minimum(geometry)
    pos2 = find_guide_minimum(geometry.scaled(2.0))
    assert pos1[0] == pytest.approx(pos2[0], abs=2e-9)
    assert pos1[1] == pytest.approx(pos2[1], abs=2e-9)


def test_gradient_scales_with_current(characterization):
    doubled = characterize_guide(design_guide_geometry().scaled(2.0), species_rb87())
    assert doubled.gradient == pytest.approx(2.0 * characterization.gradient, rel=1e-3)


def test_depth_band(characterization):
    assert 100e-6 <= characterization.depth_temperature <= 900e-6
    assert characterization.depth_field > 0


def test_radial_frequency_band(characterization):
    assert 500.0 <= characterization.radial_frequency <= 4500.0


def test_radial_frequency_against_quadrupole_oracle(characterization):
    """The Hessian route applied to an ideal 2D quadrupole potential must
    reproduce the analytic small-oscillation frequency."""
    rb = species_rb87()
    gradient = characterization.gradient
    b0 = characterization.offset_B0
    mu = rb.magnetic_moment

    def potential(r, z):
        return mu * np.sqrt(gradient ** 2 * ((r - 1e-4) ** 2 + (z - 2e-5) ** 2) + b0 ** 2)

    hessian = potential_hessian(potential, 1e-4, 2e-5)
    f_numeric = math.sqrt(max(np.linalg.eigvalsh(hessian)[-1], 0.0) / rb.mass) / (2 * math.pi)
    f_analytic = radial_frequency_quadrupole(gradient, b0, rb)
    assert f_numeric == pytest.approx(f_analytic, rel=1e-4)
    # and the real guide is quadrupole-like near its zero line
    assert characterization.radial_frequency == pytest.approx(f_analytic, rel=0.02)


def test_hessian_symmetric():
    def potential(r, z):
        return (r - 1e-4) ** 2 + 3.0 * (z - 2e-5) ** 2 + 0.5 * (r - 1e-4) * (z - 2e-5)

    h = potential_hessian(potential, 1e-4, 2e-5, step=1e-7)
    assert h[0, 1] == h[1, 0]
    assert h[0, 0] == pytest.approx(2.0, rel=1e-4)
    assert h[1, 1] == pytest.approx(6.0, rel=1e-4)
    assert h[0, 1] == pytest.approx(0.5, rel=1e-3)


def test_zero_current_raises():
    with pytest.raises(NoGuideMinimumError):
        find_guide_minimum(design_guide_geometry().scaled(0.0))


def test_non_smooth_without_offset():
    with pytest.raises(NonSmoothPotentialError):
        characterize_guide(design_guide_geometry(), species_rb87(), offset_B0=0.0)


def test_negative_offset_rejected():
    with pytest.raises(ConfigError):
        characterize_guide(design_guide_geometry(), species_rb87(), offset_B0=-1e-4)


# ---------------------------------------------------------------------------
# corrugation model


@pytest.fixture(scope="module")
def corrugation():
    return CorrugationModel(
        amplitude=1e-4, correlation_length=5e-6, seed=7, arc_length=2 * math.pi * 500e-6
    )


def test_corrugation_reproducible(corrugation):
    again = CorrugationModel(
        amplitude=1e-4, correlation_length=5e-6, seed=7, arc_length=2 * math.pi * 500e-6
    )
    assert np.array_equal(corrugation.profile, again.profile)
    other = CorrugationModel(
        amplitude=1e-4, correlation_length=5e-6, seed=8, arc_length=2 * math.pi * 500e-6
    )
    assert not np.array_equal(corrugation.profile, other.profile)


def test_corrugation_zero_mean_and_rms(corrugation):
    assert abs(corrugation.profile.mean()) < 1e-18
    assert np.sqrt(np.mean(corrugation.profile ** 2)) == pytest.approx(1e-4, rel=1e-10)


def test_roughness_odd_in_current(corrugation):
    rb = species_rb87()
    v_pos = roughness_potential(corrugation, 0.121, rb)
    v_neg = roughness_potential(corrugation, -0.121, rb)
    assert np.allclose(v_pos, -v_neg, rtol=0, atol=1e-40)
    assert np.max(np.abs(v_pos)) > 0


def test_roughness_linear_in_current(corrugation):
    rb = species_rb87()
    v1 = roughness_potential(corrugation, 0.1, rb)
    v3 = roughness_potential(corrugation, 0.3, rb)
    assert np.allclose(v3, 3.0 * v1, rtol=1e-12, atol=0)


def test_zero_mean_modulation_nulls_roughness(corrugation):
    rb = species_rb87()
    t = np.linspace(0.0, 1.0, 20001)
    current = 0.121 * np.sin(2 * math.pi * 5 * t)
    averaged = modulated_roughness_average(corrugation, t, current, rb)
    static = roughness_potential(corrugation, 0.121, rb)
    assert np.max(np.abs(averaged)) < 1e-9 * np.max(np.abs(static))


def test_dc_offset_leaves_proportional_residual(corrugation):
    rb = species_rb87()
    t = np.linspace(0.0, 1.0, 20001)
    current = 0.121 * np.sin(2 * math.pi * 5 * t) + 0.01
    averaged = modulated_roughness_average(corrugation, t, current, rb)
    static = roughness_potential(corrugation, 0.01, rb)
    assert np.allclose(averaged, static, rtol=1e-6, atol=1e-9 * np.max(np.abs(static)))


def test_corrugation_validation():
    with pytest.raises(ConfigError):
        CorrugationModel(amplitude=-1.0, correlation_length=1e-6, seed=0, arc_length=1e-3)
    with pytest.raises(ConfigError):
        CorrugationModel(amplitude=1e-4, correlation_length=0.0, seed=0, arc_length=1e-3)
    with pytest.raises(ConfigError):
        modulated_roughness_average(
            CorrugationModel(amplitude=1e-4, correlation_length=1e-6, seed=0, arc_length=1e-3),
            np.array([0.0, 1.0, 0.5]),
            np.array([1.0, 1.0, 1.0]),
            species_rb87(),
        )
