"""Shared fixtures: sample candidate sources used across the suite."""

import pytest

# A representative generated function: quadratic bowl + cosine modulation +
# linear interaction + skewed cubic + bias.  Exercises indexing, powers,
# trig calls with the np prefix, and multi-assignment bodies.
SAMPLE_GENERATED_FUNCTION = """\
import numpy as np

def problem(x: np.ndarray) -> float:
 quadratic_term = 0.13 * (
   x[0] ** 2 + x[1] ** 2
 )
 cosine_modulation = 0.13 * np.cos(
   x[0] - x[1]
 )
 linear_interaction_term = 0.045 * (
   x[0] + x[1] + x[0] * x[1]
 )
 skewed_cubic_term = 0.027 * (
   x[0] ** 3 + 0.5 * x[1] ** 3
 )
 bias = 0.05
 return (
   quadratic_term
   + cosine_modulation
   + linear_interaction_term
   + skewed_cubic_term
   + bias
 )
"""

SPHERE_SOURCE = """\
def problem(x):
    return sum(x ** 2)
"""


@pytest.fixture
def sample_source() -> str:
    return SAMPLE_GENERATED_FUNCTION


@pytest.fixture
def sphere_source() -> str:
    return SPHERE_SOURCE
