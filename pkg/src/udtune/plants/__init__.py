"""Plant registry: string key -> factory."""
from ..errors import ConfigError
from .base import GainSlot, PlantModel
from .helicopter import HelicopterParams, PidGains, make_helicopter
from .quadrotor import BackstepGains, QuadrotorParams, make_quadrotor
from .synthetic import make_objective_plant, make_quadratic

PLANTS = {
    "helicopter3dof": make_helicopter,
    "quadrotor": make_quadrotor,
    "quadratic": make_quadratic,
}


def get_plant(key: str, **options) -> PlantModel:
    try:
        factory = PLANTS[key]
    except KeyError:
        raise ConfigError(f"unknown plant {key!r}; registered: {sorted(PLANTS)}") from None
    return factory(**options)


__all__ = [
    "PLANTS", "get_plant", "GainSlot", "PlantModel",
    "HelicopterParams", "PidGains", "make_helicopter",
    "QuadrotorParams", "BackstepGains", "make_quadrotor",
    "make_objective_plant", "make_quadratic",
]
