"""Closed-form and recursive region-count bounds for rectifier and maxout nets.

Every bound is evaluated in exact integer arithmetic (Python ints never
overflow); ``asymptotic_cap`` is the single real-valued exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class NetConfig:
    """Widths-only description of a network, for bound evaluation.

    rank_caps optionally tightens the layered upper bound when weight
    matrices are known to have small rank; maxout_rank selects the maxout
    bound.
    """

    input_dim: int
    widths: tuple
    rank_caps: tuple | None = None
    maxout_rank: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if self.rank_caps is not None:
            object.__setattr__(self, "rank_caps", tuple(int(r) for r in self.rank_caps))
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        if any(w < 1 for w in self.widths):
            raise ValueError("widths must be positive")
        if self.rank_caps is not None:
            if len(self.rank_caps) != len(self.widths):
                raise ValueError("rank_caps length must match widths")
            if any(r < 0 for r in self.rank_caps):
                raise ValueError("rank caps must be nonnegative")
            if any(r > w for r, w in zip(self.rank_caps, self.widths)):
                raise ValueError("rank caps cannot exceed widths")
        if self.maxout_rank is not None and self.maxout_rank < 2:
            raise ValueError("maxout rank must be >= 2")

    @property
    def depth(self):
        return len(self.widths)


def zaslavsky(m, d):
    """Regions cut from d-space by m generic hyperplanes: sum_{s<=d} C(m, s)."""
    if m < 0 or d < 0:
        raise ValueError("arguments must be nonnegative")
    if d >= m:
        return 1 << m
    return sum(math.comb(m, s) for s in range(d + 1))


def relu_upper_thm1(config):
    """Layered upper bound via the dimension-tracking recurrence.

    Memoized on (layer, remaining dimension budget); the budget never
    exceeds min(input_dim, max width), keeping the table small.  Optional
    per-layer rank caps tighten the per-layer index range.
    """
    widths = config.widths
    if not widths:
        return 1
    caps = config.rank_caps or widths
    L = len(widths)
    memo = {}

    def rec(l, d):
        if l == L:
            return 1
        key = (l, d)
        hit = memo.get(key)
        if hit is not None:
            return hit
        n = widths[l]
        total = 0
        for j in range(min(d, caps[l], n) + 1):
            total += math.comb(n, j) * rec(l + 1, min(d, n - j))
        memo[key] = total
        return total

    return rec(0, config.input_dim)


def montufar2017_upper(config):
    """Product upper bound with running width minimum d_l."""
    total = 1
    d = config.input_dim
    for n in config.widths:
        d = min(d, n)
        total *= sum(math.comb(n, j) for j in range(d + 1))
    return total


def naive_upper(config):
    """2^N over all N hidden neurons (every activation pattern a region)."""
    return 1 << sum(config.widths)


def montufar2014_lower(config):
    """Replication lower bound: prod floor(n_l/n0)^n0 * sum_{j<=n0} C(n_L, j)."""
    n0 = config.input_dim
    widths = config.widths
    if not widths:
        return 1
    if any(n < n0 for n in widths):
        raise ValueError("requires every width >= input_dim")
    prod = 1
    for n in widths[:-1]:
        prod *= (n // n0) ** n0
    return prod * sum(math.comb(widths[-1], j) for j in range(n0 + 1))


def thm3_lower(config):
    """Improved replication lower bound with the extra region per 1D strand."""
    n0 = config.input_dim
    widths = config.widths
    if not widths:
        return 1
    if any(n < 3 * n0 for n in widths):
        raise ValueError("requires every width >= 3 * input_dim")
    prod = 1
    for n in widths[:-1]:
        prod *= (n // n0 + 1) ** n0
    return prod * sum(math.comb(widths[-1], j) for j in range(n0 + 1))


def arora_lower(n0, m, w, L):
    """Lower bound attained by a wide first layer feeding 1D sawtooth layers.

    The witness network has L hidden layers of total size 2m + w(L-1).
    """
    if m < 1 or w < 2 or L < 1 or n0 < 1:
        raise ValueError("requires m >= 1, w >= 2, L >= 1, n0 >= 1")
    return 2 * sum(math.comb(m - 1, j) for j in range(n0)) * (w + 1) ** (L - 1)


def maxout_upper_thm5(config):
    """Upper bound for rank-k maxout stacks: each unit adds k(k-1)/2 hyperplanes."""
    k = config.maxout_rank
    if k is None or k < 2:
        raise ValueError("config.maxout_rank must be >= 2")
    coeff = k * (k - 1) // 2
    total = 1
    d = config.input_dim
    for n in config.widths:
        d = min(d, n)
        total *= sum(math.comb(coeff * n, j) for j in range(d + 1))
    return total


def two_layer_closed_form(n0, n1, n2):
    """Two-layer bound for large inputs: sum_{j<=n1} C(n1+n2, j).

    Valid when n0 >= max(n1, n2); cross-checked against the layered
    recurrence on every call.
    """
    if n0 < max(n1, n2):
        raise ValueError("requires n0 >= max(n1, n2)")
    value = sum(math.comb(n1 + n2, j) for j in range(n1 + 1))
    if n1 >= 1 and n2 >= 1:
        assert value == relu_upper_thm1(NetConfig(n0, (n1, n2)))
    return value


def asymptotic_cap(n, L):
    """Input-dimension-free cap: 2^(Ln) * (1/2 + 1/(2 sqrt(pi n)))^(L/2) * sqrt(2)."""
    if n < 1 or L < 1:
        raise ValueError("requires n >= 1 and L >= 1")
    return (
        math.pow(2.0, L * n)
        * math.pow(0.5 + 0.5 / math.sqrt(math.pi * n), L / 2.0)
        * math.sqrt(2.0)
    )


def exp_lower_large_input(n, L):
    """Exponential lower bound for wide inputs: (floor(n/floor(n/3))+1)^(L*floor(n/3))."""
    if n < 3:
        raise ValueError("requires n >= 3")
    if L < 1:
        raise ValueError("requires L >= 1")
    third = n // 3
    return (n // third + 1) ** (L * third)
