"""Finite Ramsey theory on rigid surjections, connections and partial actions."""

from .objects import (
    AugmentedSurjection,
    Connection,
    FiniteMap,
    ObjectClass,
    canonical_compose,
    connection_compose,
    enumerate_augmented,
    enumerate_class,
    enumerate_connections,
    is_member,
    truncate_augmented,
    truncate_confused,
    truncate_forgetful,
)
from .instances import InstanceSpec, build

__version__ = "0.1.0"

__all__ = [
    "AugmentedSurjection",
    "Connection",
    "FiniteMap",
    "InstanceSpec",
    "ObjectClass",
    "build",
    "canonical_compose",
    "connection_compose",
    "enumerate_augmented",
    "enumerate_class",
    "enumerate_connections",
    "is_member",
    "truncate_augmented",
    "truncate_confused",
    "truncate_forgetful",
]
