"""Geometric (Tits) representation, used only as a floating-point test oracle."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .diagrams import INF, CoxeterMatrix

DEFAULT_TOL = 1e-6
INVOLUTION_TOL = 1e-9


def bilinear_form(system: CoxeterMatrix) -> np.ndarray:
    n = system.rank
    B = np.eye(n)
    for i in range(n):
        for j in range(n):
            if i != j:
                m = system.order(i + 1, j + 1)
                B[i, j] = -1.0 if m is INF else -math.cos(math.pi / m)
    return B


def generator_matrix(system: CoxeterMatrix, i: int) -> np.ndarray:
    """Matrix of v -> v - 2 B(e_i, v) e_i in the basis e_1..e_n (columns are images)."""
    if not 1 <= i <= system.rank:
        raise ValueError(f"generator {i} out of range")
    B = bilinear_form(system)
    M = np.eye(system.rank)
    M[i - 1, :] -= 2.0 * B[i - 1, :]
    return M


def word_matrix(system: CoxeterMatrix, word: Iterable[int]) -> np.ndarray:
    gens = [generator_matrix(system, i) for i in system.generators()]
    M = np.eye(system.rank)
    for s in word:
        M = M @ gens[s - 1]
    return M


def equal_numeric(system: CoxeterMatrix, w: Iterable[int], v: Iterable[int], tol: float = DEFAULT_TOL) -> bool:
    diff = word_matrix(system, w) - word_matrix(system, v)
    return float(np.max(np.abs(diff))) <= tol
