"""Python interface to the linkfold core."""

import json

from ._core import (
    LinkfoldError,
    Problem,
    conj_gradient,
    eval_poly,
    homogeneous_degree,
    parse_poly,
)
from ._core import verify_a1 as _verify_a1

__all__ = [
    "LinkfoldError",
    "Problem",
    "a1_problem",
    "conj_gradient",
    "eval_poly",
    "homogeneous_degree",
    "parse_poly",
    "verify_a1",
]


def a1_problem(n: int) -> Problem:
    """f = z1^2 + ... + z_{n+1}^2 and g = z1 + (i/2) z2 on the unit sphere."""
    f = " + ".join(f"z{j}^2" for j in range(1, n + 2))
    return Problem(f, "z1 + 0.5i*z2", n)


def verify_a1(n: int, out_dir: str = "", seed: int = 42):
    """Run the A1 pipeline. Returns (exit_code, report) with report as a dict."""
    code, text = _verify_a1(n, out_dir, seed)
    return code, json.loads(text)
