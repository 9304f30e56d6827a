"""Cost model for grouping clusters into lymph-node-like aggregation units.

A unit holding ``n`` of the system's ``N`` clusters pays a local queue cost
``n**alpha`` and a global lookup cost ``N**gamma / n**beta``. The optimal
unit size balances the two and grows as ``N**(gamma / (alpha + beta))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_BLOCK = 1 << 20

REGIMES = ("sublinear", "superlinear", "linear", "constant", "negative")


@dataclass(frozen=True)
class CostParams:
    alpha: float = 2.0
    beta: float = 1.0
    gamma: float = 1.0
    N: float = 1.0
    local_coef: float = 1.0
    global_coef: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.local_coef <= 0 or self.global_coef <= 0:
            raise ValueError("cost coefficients must be positive")


def total_cost(n, p: CostParams):
    """Local plus global cost for units of ``n`` clusters. Accepts arrays."""
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 1):
        raise ValueError("n must be >= 1")
    cost = p.local_coef * n_arr ** p.alpha + p.global_coef * p.N ** p.gamma / n_arr ** p.beta
    return float(cost) if cost.ndim == 0 else cost


def stationary_n(p: CostParams) -> float:
    """Zero of d(total_cost)/dn, without the n >= 1 clamp."""
    ratio = p.global_coef * p.beta * p.N ** p.gamma / (p.local_coef * p.alpha)
    return ratio ** (1.0 / (p.alpha + p.beta))


def optimal_n(p: CostParams) -> float:
    return max(1.0, stationary_n(p))


def cost_derivative(n: float, p: CostParams) -> float:
    return (p.local_coef * p.alpha * n ** (p.alpha - 1)
            - p.global_coef * p.beta * p.N ** p.gamma / n ** (p.beta + 1))


def brute_force_optimal_n(p: CostParams, n_max: int) -> int:
    """Integer n in [1, n_max] with the lowest total cost (smallest on ties)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    best_n, best_cost = 1, math.inf
    for start in range(1, int(n_max) + 1, _BLOCK):
        ns = np.arange(start, min(start + _BLOCK, int(n_max) + 1), dtype=float)
        costs = total_cost(ns, p)
        i = int(np.argmin(costs))
        if costs[i] < best_cost:
            best_n, best_cost = start + i, costs[i]
    return best_n


def scaling_exponent(alpha: float, beta: float, gamma: float) -> float:
    if alpha + beta == 0:
        raise ValueError("alpha + beta must be non-zero")
    return gamma / (alpha + beta)


def classify_scaling(alpha: float, beta: float, gamma: float) -> str:
    """Growth regime of the optimal unit size as the system grows."""
    s = alpha + beta
    if s <= 0:
        raise ValueError("alpha + beta must be positive")
    if gamma == 0:
        return "constant"
    if gamma < 0:
        return "negative"
    if math.isclose(gamma, s, rel_tol=1e-12, abs_tol=0.0):
        return "linear"
    return "sublinear" if gamma < s else "superlinear"


def scaling_table(alpha: float, beta: float, gamma: float, Ns, n_max=None):
    """Rows ``(N, optimal_n, brute_force_n, cost)`` over a range of system sizes.

    ``n_max`` defaults to a bound comfortably past the continuous optimum.
    """
    rows = []
    for N in Ns:
        p = CostParams(alpha, beta, gamma, float(N))
        n_opt = optimal_n(p)
        limit = n_max if n_max is not None else max(2, int(math.ceil(4 * n_opt)) + 1)
        rows.append((N, n_opt, brute_force_optimal_n(p, limit), total_cost(n_opt, p)))
    return rows
