"""Forward intensity map ``x -> |F S_z(x)|^2``, noise models, and the inverse
step from intensities back to the circular autocorrelation of ``S_z(x)``."""

from dataclasses import dataclass, replace

import numpy as np

from .core import as_vector, dft, idft
from .errors import MetadataError
from .symmetrization import VARIANTS, symmetrize_padded, symmetrized_length

__all__ = [
    "MeasurementVector",
    "NoiseModel",
    "NOISE_KINDS",
    "measurement_length",
    "measure",
    "measure_symmetrized",
    "add_noise",
    "autocorrelation_from",
]

NOISE_KINDS = ("intensity", "field")


def measurement_length(n, variant):
    """Number of intensities: 4n-3 for variant A, 4n-1 for variant B."""
    if variant not in VARIANTS:
        raise MetadataError(f"unknown variant {variant!r}")
    return symmetrized_length(n, variant)


@dataclass(frozen=True)
class MeasurementVector:
    """Nonnegative intensities with the layout needed to invert them.

    ``clipped`` counts entries that noise pushed below zero before they
    were clipped; it is diagnostic only.
    """

    intensities: np.ndarray
    variant: str
    origin_n: int
    noise_sigma: float = 0.0
    clipped: int = 0

    def __post_init__(self):
        vals = np.asarray(self.intensities, dtype=np.float64)
        object.__setattr__(self, "intensities", vals)
        if vals.ndim != 1:
            raise MetadataError("intensities must be one-dimensional")
        expected = measurement_length(self.origin_n, self.variant)
        if vals.size != expected:
            raise MetadataError(
                f"variant {self.variant} with n={self.origin_n} expects "
                f"{expected} intensities, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise MetadataError("intensities must be finite")
        if np.any(vals < 0):
            raise MetadataError("intensities must be nonnegative")
        if self.noise_sigma < 0:
            raise MetadataError("noise_sigma must be nonnegative")

    def __len__(self):
        return self.intensities.size

    @property
    def n_meas(self):
        return self.intensities.size


@dataclass(frozen=True)
class NoiseModel:
    """Seeded Gaussian noise.

    ``kind="intensity"`` adds ``N(0, sigma^2)`` to each intensity.
    ``kind="field"`` adds it to the amplitudes ``sqrt(m)`` and squares again.
    """

    sigma: float
    seed: int = 0
    kind: str = "intensity"

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}")


def measure_symmetrized(s):
    """``|dft(s)|^2`` for an already symmetrized vector."""
    spectrum = dft(np.asarray(s.entries))
    return MeasurementVector(spectrum.real**2 + spectrum.imag**2, s.variant, s.origin_n)


def measure(x, variant="A"):
    """Intensities of the symmetrized, zero-padded signal.

    ``measure(x) == measure(-x)`` holds bit for bit.

    Raises
    ------
    NonRealLeadingEntry
        For variant A when ``x[0]`` is not real.
    """
    return measure_symmetrized(symmetrize_padded(as_vector(x, "x"), variant))


def add_noise(m, model):
    if model.sigma == 0:
        return replace(m, intensities=m.intensities.copy())
    rng = np.random.default_rng(model.seed)
    g = rng.standard_normal(m.intensities.size)
    if model.kind == "intensity":
        raw = m.intensities + model.sigma * g
    else:
        raw = (np.sqrt(m.intensities) + model.sigma * g) ** 2
    clipped = int(np.count_nonzero(raw < 0))
    return MeasurementVector(
        np.maximum(raw, 0.0),
        m.variant,
        m.origin_n,
        noise_sigma=float(model.sigma),
        clipped=m.clipped + clipped,
    )


def autocorrelation_from(m):
    """``sqrt(len(m)) * idft(m)``: the circular self-convolution of ``S_z(x)``.

    Noise is passed straight through.
    """
    vals = m.intensities if isinstance(m, MeasurementVector) else np.asarray(m, float)
    vals = as_vector(vals, "m")
    return np.sqrt(vals.size) * idft(vals)
