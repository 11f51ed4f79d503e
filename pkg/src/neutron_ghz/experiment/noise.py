"""
Noise Module

Two kinds of imperfection for Monte Carlo experiments:

- state noise: channels that reduce the fringe contrast of the ideal GHZ-like
  state (GHZ-coherence dephasing, and depolarisation for comparison);
- counting noise: Poisson sampling of detector counts from reproducible,
  splittable random streams.

Random streams are built from numpy's PCG64 bit generator seeded through a
SeedSequence whose spawn key is the stream id, so every (seed, stream_id)
pair owns an independent, reproducible sequence of draws.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Final

import numpy as np
import structlog

from neutron_ghz.exceptions import InvalidParameterError
from neutron_ghz.quantum import DIM, DensityMatrix

logger = structlog.get_logger(__name__)

DEFAULT_VISIBILITY: Final[float] = 0.6395
MAX_SEED: Final[int] = 2**64

# Entries (i, j) whose basis labels differ in an odd number of subsystems.
_ODD_FLIP: Final[np.ndarray] = np.array(
    [[(i ^ j).bit_count() % 2 == 1 for j in range(DIM)] for i in range(DIM)]
)


class NoiseModel(str, Enum):
    """State noise families, both parametrised by the surviving contrast V."""

    DEPHASE = "dephase"
    DEPOLARIZE = "depolarize"


def _check_unit_interval(name: str, value: float) -> None:
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        msg = f"{name} must lie in [0, 1], got {value}"
        raise InvalidParameterError(msg)


@dataclass(frozen=True)
class VisibilityModel:
    """Fringe visibility (contrast) V of the interferograms."""

    visibility: float = DEFAULT_VISIBILITY

    def __post_init__(self) -> None:
        _check_unit_interval("visibility", self.visibility)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return ghz_dephase(rho, self.visibility)


def ghz_dephase(rho: DensityMatrix, visibility: float) -> DensityMatrix:
    """
    Scale the GHZ coherences by V.

    This is the channel rho -> (1+V)/2 rho + (1-V)/2 Z rho Z with
    Z = sigma_z (x) sigma_z (x) sigma_z. It multiplies every coherence between
    basis states that differ in all three labels, (0,7), (1,6), (2,5), (3,4)
    and their transposes, by V and leaves the diagonal alone. Coherences
    differing in exactly one label are scaled as well, which keeps the map
    completely positive on every input; the GHZ family has none of them.
    For the PLUS state the Mermin value becomes 4V.
    """
    _check_unit_interval("visibility", visibility)
    mask = np.where(_ODD_FLIP, visibility, 1.0)
    return DensityMatrix(rho.entries * mask)


def depolarize(rho: DensityMatrix, strength: float) -> DensityMatrix:
    """(1 - lambda) rho + lambda I/8."""
    _check_unit_interval("lambda", strength)
    return rho.mix(DensityMatrix.maximally_mixed(), 1.0 - strength)


def apply_noise(
    rho: DensityMatrix, model: NoiseModel, visibility: float
) -> DensityMatrix:
    """Degrade rho so that in-plane triple correlations shrink by V."""
    match NoiseModel(model):
        case NoiseModel.DEPHASE:
            return ghz_dephase(rho, visibility)
        case NoiseModel.DEPOLARIZE:
            _check_unit_interval("visibility", visibility)
            return depolarize(rho, 1.0 - visibility)


@dataclass(frozen=True)
class RngStream:
    """
    Reproducible random stream identified by (seed, stream_id).

    The generator is numpy PCG64 seeded with
    SeedSequence(entropy=seed, spawn_key=(stream_id,)). One stream belongs to
    exactly one task; streams must not be shared between threads.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not 0 <= value < MAX_SEED:
                msg = f"{name} must be a non-negative 64-bit integer, got {value}"
                raise InvalidParameterError(msg)

    @cached_property
    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(sequence))

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh stream with the same seed and another id."""
        return RngStream(seed=self.seed, stream_id=stream_id)


def poisson_counts(expected: float, rng: RngStream) -> int:
    """One Poisson draw with the given mean from the stream."""
    if not math.isfinite(expected) or expected < 0:
        msg = f"Poisson mean must be finite and non-negative, got {expected}"
        raise InvalidParameterError(msg)
    return int(rng.generator.poisson(expected))
