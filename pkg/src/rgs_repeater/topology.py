"""Chain layout and the fiber loss model."""

from __future__ import annotations

from dataclasses import dataclass, field

from rgs_repeater.rgs import RgsSpec


@dataclass(frozen=True)
class ChainConfig:
    distance_km: float
    rgss_spacing_km: float = 4.0
    attenuation_db_per_km: float = 0.2
    bsm_success_cap: float = 0.5
    detector_efficiency: float = 1.0
    rgs_spec: RgsSpec = field(default_factory=lambda: RgsSpec(14, (10, 5)))
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.distance_km <= 0 or self.rgss_spacing_km <= 0:
            raise ValueError("distance and spacing must be positive")
        if self.rgss_spacing_km > self.distance_km:
            raise ValueError("RGSS spacing cannot exceed the end-to-end distance")
        if self.attenuation_db_per_km < 0:
            raise ValueError("attenuation must be non-negative")
        if not 0 <= self.bsm_success_cap <= 1:
            raise ValueError("bsm_success_cap must lie in [0, 1]")
        if not 0 < self.detector_efficiency <= 1:
            raise ValueError("detector_efficiency must lie in (0, 1]")


@dataclass(frozen=True)
class ChainTopology:
    rgss_positions_km: tuple[float, ...]
    absa_positions_km: tuple[float, ...]
    end_node_positions_km: tuple[float, float]
    segment_length_km: float  # every photon path: source or end node to its ABSA

    @property
    def n_rgss(self) -> int:
        return len(self.rgss_positions_km)

    @property
    def n_absa(self) -> int:
        return len(self.absa_positions_km)


def plan_chain(config: ChainConfig) -> ChainTopology:
    """Evenly spaced sources with an ABSA at the midpoint of every hop.

    ``round(distance / spacing) - 1`` sources are placed; the actual hop is
    ``distance / round(distance / spacing)`` so that all photon paths have
    the same length.
    """
    hops = max(1, round(config.distance_km / config.rgss_spacing_km))
    hop = config.distance_km / hops
    rgss = tuple(hop * (i + 1) for i in range(hops - 1))
    absa = tuple(hop * (i + 0.5) for i in range(hops))
    return ChainTopology(rgss, absa, (0.0, float(config.distance_km)), hop / 2)


def survival_probability(length_km: float, attenuation_db_per_km: float, detector_efficiency: float = 1.0) -> float:
    if length_km < 0:
        raise ValueError("length must be non-negative")
    return detector_efficiency * 10 ** (-attenuation_db_per_km * length_km / 10)
