"""Prompt templates for the six generation operators.

One initialization prompt (I1), two exploration prompts (E1, E2) that see
several population members, and three mutation prompts (M1, M2, M3) that
see exactly one parent.  All five operator prompts share the I1 preamble.
The shared implementation-requirement list carries one extra item (8.)
restricting responses to the expression subset our interpreter accepts.
"""

from __future__ import annotations

from enum import Enum

from .. import dsl
from ..ela import FEATURE_NAMES, NormalizedVector


class PromptKind(str, Enum):
    I1 = "I1"
    E1 = "E1"
    E2 = "E2"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"

    @property
    def is_exploration(self) -> bool:
        return self in (PromptKind.E1, PromptKind.E2)

    @property
    def is_mutation(self) -> bool:
        return self in (PromptKind.M1, PromptKind.M2, PromptKind.M3)


SHARED_PREAMBLE = """\
You are an expert in Exploratory Landscape Analysis (ELA), advanced optimization benchmarks, and high-dimensional function design.
Your task is to generate a single, synthetic benchmark function in Python for testing global optimization algorithms.

The primary goal is to create a function whose ELA features closely match the target values provided below.

Target Normalized ELA Features:
(These are the values the generated function's landscape should ideally exhibit)
{ela_features}

ELA Feature Descriptions:
- ela_meta.lin_simple.adj_r2: Adjusted R^2 of a linear model. High values suggest linearity.
- ela_meta.lin_w_interact.adj_r2: Adjusted R^2 of a linear model with pairwise interactions.
- ela_meta.quad_simple.adj_r2: Adjusted R^2 of a quadratic model without interactions.
- ela_meta.quad_w_interact.adj_r2: Adjusted R^2 of a full quadratic model.
- ela_distr.skewness: Skewness of the objective value distribution.
- nbc.nb_fitness.cor: Correlation between fitness and nearest-better connectivity.
- nbc.nn_nb.sd_ratio: Ratio of standard deviations (nearest neighbor distance / nearest-better distance).
- fitness_distance.fitness_std: Standard deviation of objective values.

Implementation Requirements:
1. Language & Libraries: Implement the function in Python, using only NumPy for mathematical operations.
2. Function Signature:
   ```python
   def problem(x: np.ndarray) -> float:
       # Docstring goes here
       pass
   ```
   Your code MUST BE included in a markdown code block.
3. Input: x is a 1D NumPy array of shape (N,).
4. Domain: The function should be designed considering the domain [-5, 5]^N. Ensure operations are valid within this domain.
5. Docstring: Include a concise docstring explaining the mathematical structure of the function. If possible, include the formula. Be specific about the components used.
6. Self-Contained Code: The final output block should only contain the necessary import (import numpy as np) and the function definition.
7. The function must be deterministic: Do not use np.random or any stochastic elements.
8. Allowed Constructs: The function body must consist only of simple assignments to new names followed by a single return statement. Build expressions from x, x[i], previously assigned names, and numeric constants (np.pi and np.e are fine) using +, -, *, /, ** and the functions np.sin, np.cos, np.tan, np.tanh, np.exp, np.log, np.sqrt, np.abs, np.floor, np.sum, np.prod, np.mean, np.linalg.norm, np.min, np.max, min, max. Do not use loops, conditionals, comprehensions, lambda, indexing with variables, or any other library calls."""

_E1_SUFFIX = """\

History:
You already generated these functions:
{context}

Instructions:
Please help me create a new function that has a totally different form from the given ones."""

_E2_SUFFIX = """\

History:
You already generated these functions:
{context}

Instructions:
Please help me create a new function that has a totally different form from the given ones but can be motivated from them. Firstly, identify the common backbone idea in the provided functions. Secondly, based on the backbone idea create a new solution."""

_M1_SUFFIX = """\

Generated Function:
You already generated this function:
{context}

Instructions:
Please assist me in creating a new function that has a different form but can be a modified version of the function provided."""

_M2_SUFFIX = """\

Generated Function:
You already generated this function:
{context}

Instructions:
Please identify the main parameters of the generated function and assist me in creating a new version of the function with improved parameter settings."""

_M3_SUFFIX = """\

Generated Function:
You already generated this function:
{context}

Instructions:
First, you need to identify the main components in the function above. Next, analyze whether any of these components can be overfit to the specific sample of points used to calculate ELA features. Then, based on your analysis, simplify the components to enhance the generalization to other samples."""

_SUFFIXES = {
    PromptKind.I1: "",
    PromptKind.E1: _E1_SUFFIX,
    PromptKind.E2: _E2_SUFFIX,
    PromptKind.M1: _M1_SUFFIX,
    PromptKind.M2: _M2_SUFFIX,
    PromptKind.M3: _M3_SUFFIX,
}


class ArityError(ValueError):
    """Context size does not match what the operator expects."""


def format_features(target: NormalizedVector) -> str:
    lines = [
        f"- {name}: {value:.6f}"
        for name, value in zip(FEATURE_NAMES, target.values)
    ]
    return "\n".join(lines)


def render_context(programs) -> str:
    """Join candidate renderings for the {context} slot."""
    return "\n\n".join(dsl.render(p, "numpy-text").rstrip() for p in programs)


def render_prompt(
    kind: PromptKind,
    target: NormalizedVector,
    context: list[dsl.Program] | None = None,
) -> str:
    """Fill the operator template with the target vector and context."""
    context = context or []
    if kind is PromptKind.I1:
        if context:
            raise ArityError("I1 takes no context")
    elif kind.is_exploration:
        if not context:
            raise ArityError(f"{kind.value} needs a non-empty candidate context")
    else:
        if len(context) != 1:
            raise ArityError(f"{kind.value} needs exactly one parent")

    text = SHARED_PREAMBLE.replace("{ela_features}", format_features(target))
    suffix = _SUFFIXES[kind]
    if suffix:
        text += "\n" + suffix.replace("{context}", render_context(context))
    return text
