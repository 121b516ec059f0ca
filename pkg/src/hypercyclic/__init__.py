"""Density of orbits for two-generator semigroups of real Mobius maps."""

from .classifier import Verdict, classify, log_ratio_is_rational
from .intervals import IntervalSpec, MapOnInterval, validate
from .mobius import MobiusMap, compose, evaluate, invert, power
from .normalize import canonicalize_pair, conjugate, theta_for
from .orbit import OrbitConfig, consistency_check, enumerate_orbit, max_gap

__all__ = [
    "IntervalSpec",
    "MapOnInterval",
    "MobiusMap",
    "OrbitConfig",
    "Verdict",
    "canonicalize_pair",
    "classify",
    "compose",
    "conjugate",
    "consistency_check",
    "enumerate_orbit",
    "evaluate",
    "invert",
    "log_ratio_is_rational",
    "max_gap",
    "power",
    "theta_for",
    "validate",
]
