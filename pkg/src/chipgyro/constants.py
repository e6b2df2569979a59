"""Physical constants, atom species data and unit conversions.

All internal computation is SI; degree-based rotation units exist only at
presentation boundaries (CSV columns, JSON records).

Constants are CODATA 2018 values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

HBAR = 1.054571817e-34      # reduced Planck constant (J s)
MU_B = 9.2740100783e-24     # Bohr magneton (J/T)
MU_0 = 1.25663706212e-6     # vacuum permeability (T m/A)
K_B = 1.380649e-23          # Boltzmann constant (J/K)

OMEGA_EARTH = 7.29e-5       # Earth rotation rate (rad/s)

SECONDS_PER_YEAR = 3.156e7  # Julian year, to the precision used throughout
RAD_PER_ARCSEC = math.pi / (180.0 * 3600.0)

# rad/s -> deg/h
DEG_H_PER_RAD_S = (180.0 / math.pi) * 3600.0
# rad s^-1 Hz^-1/2 -> deg h^-1/2 (angular random walk)
ARW_DEG_SQRT_H_PER_RAD_S_SQRT_HZ = (180.0 / math.pi) * 60.0


@dataclass(frozen=True)
class AtomSpecies:
    """Atomic data for the guided species.

    ``wavevector`` and ``recoil_velocity`` are derived from ``mass`` and
    ``wavelength`` so that recoil_velocity * mass == HBAR * wavevector holds
    to the last ulp.
    """

    name: str
    mass: float               # kg
    wavelength: float         # m, optical transition driving the Bragg beams
    magnetic_moment: float    # J/T, of the guided Zeeman state

    def __post_init__(self):
        for field in ("mass", "wavelength", "magnetic_moment"):
            value = getattr(self, field)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"AtomSpecies.{field} must be strictly positive, got {value!r}")

    @property
    def wavevector(self) -> float:
        """Optical wavevector k = 2 pi / wavelength (rad/m)."""
        return 2.0 * math.pi / self.wavelength

    @property
    def recoil_velocity(self) -> float:
        """Single-photon recoil velocity hbar k / m (m/s)."""
        return HBAR * self.wavevector / self.mass

    @property
    def k_eff(self) -> float:
        """Effective two-photon wavevector 2k of the Bragg splitter (rad/m)."""
        return 2.0 * self.wavevector


def species_rb87() -> AtomSpecies:
    """87Rb guided in the weak-field-seeking |F=2, mF=2> state (mu = mu_B)."""
    return AtomSpecies(
        name="Rb87",
        mass=1.44316e-25,
        wavelength=780.241e-9,
        magnetic_moment=MU_B,
    )


_ROTATION_FACTORS = {
    "rad_s": 1.0,
    "deg_h": DEG_H_PER_RAD_S,
    "arw_deg_sqrt_h": ARW_DEG_SQRT_H_PER_RAD_S_SQRT_HZ,
}


def convert_rotation(value: float, target: str) -> float:
    """Convert a rotation quantity expressed in rad/s (or rad/s/sqrt(Hz) for
    the ARW tag) to the requested presentation unit.

    Tags: ``rad_s``, ``deg_h``, ``arw_deg_sqrt_h``.
    """
    if not math.isfinite(value):
        raise ConfigError(f"rotation value must be finite, got {value!r}")
    try:
        factor = _ROTATION_FACTORS[target]
    except KeyError:
        raise ConfigError(
            f"unknown rotation unit tag {target!r}; expected one of {sorted(_ROTATION_FACTORS)}"
        ) from None
    return value * factor


def rotation_from(value: float, source: str) -> float:
    """Inverse of :func:`convert_rotation`: presentation unit back to rad/s."""
    if not math.isfinite(value):
        raise ConfigError(f"rotation value must be finite, got {value!r}")
    try:
        factor = _ROTATION_FACTORS[source]
    except KeyError:
        raise ConfigError(
            f"unknown rotation unit tag {source!r}; expected one of {sorted(_ROTATION_FACTORS)}"
        ) from None
    return value / factor


@dataclass(frozen=True)
class RotationRate:
    """A rotation rate stored in rad/s with presentation-unit views."""

    value: float  # rad/s

    @property
    def deg_per_hour(self) -> float:
        return convert_rotation(self.value, "deg_h")

    @property
    def arw_deg_sqrt_h(self) -> float:
        """ARW view: interprets ``value`` as rad s^-1 Hz^-1/2."""
        return convert_rotation(self.value, "arw_deg_sqrt_h")

    @classmethod
    def from_deg_per_hour(cls, value: float) -> "RotationRate":
        return cls(rotation_from(value, "deg_h"))

