"""Pseudotoric fibration verification toolkit."""

import json

from . import _core
from ._core import (
    ConfigurationError,
    DomainError,
    EvaluationError,
    Model,
    NearSingularFiber,
    NumericalError,
    SamplingError,
    evaluate_superpotential,
    flag_plucker,
    nonfree_components,
    run_cli,
    wall_point_cloud,
)

__all__ = [
    "ConfigurationError",
    "DomainError",
    "EvaluationError",
    "Model",
    "NearSingularFiber",
    "NumericalError",
    "SamplingError",
    "chart_descriptor",
    "evaluate_superpotential",
    "flag_plucker",
    "nonfree_components",
    "rietsch_superpotential",
    "run_cli",
    "run_numeric_suite",
    "term_count_table",
    "verify_contraction_lemma",
    "verify_dlog_identity",
    "wall_point_cloud",
]


def chart_descriptor(family, size):
    return json.loads(_core.chart_descriptor(family, size))


def verify_contraction_lemma(family, size):
    return json.loads(_core.verify_contraction_lemma(family, size))


def verify_dlog_identity(family, size, j=0):
    """j = 0 picks the Schubert divisor."""
    return json.loads(_core.verify_dlog_identity(family, size, j))


def run_numeric_suite(family, size, j=0, samples=100, seed=1, threads=1, tol=1e-6):
    return json.loads(_core.run_numeric_suite(family, size, j, samples, seed, threads, tol))


def term_count_table(family, size_min, size_max):
    return json.loads(_core.term_count_table(family, size_min, size_max))


def rietsch_superpotential(n):
    return json.loads(_core.rietsch_superpotential(n))
