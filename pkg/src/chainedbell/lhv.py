"""Deterministic local strategies and the local-fraction bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .boxes import BipartiteBox, ScenarioSpec
from .functionals import chained_terms, local_bound, modular_values

DEFAULT_ENUMERATION_CAP = 10**8
_CHUNK = 1 << 18


class EnumerationLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class DeterministicStrategy:
    """Definite outcome for each of Alice's and Bob's settings (index 0 is setting 1)."""

    alice_outcomes: tuple[int, ...]
    bob_outcomes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice_outcomes", tuple(int(x) for x in self.alice_outcomes))
        object.__setattr__(self, "bob_outcomes", tuple(int(x) for x in self.bob_outcomes))
        if any(x < 0 for x in self.alice_outcomes + self.bob_outcomes):
            raise ValueError("outcomes must be non-negative")

    @classmethod
    def constant(cls, n: int, outcome: int = 0) -> DeterministicStrategy:
        return cls((outcome,) * n, (outcome,) * n)


class LhvMinimum(NamedTuple):
    value: float
    strategy: DeterministicStrategy
    count: int


@dataclass(frozen=True)
class LocalFractionBound:
    i_value: float
    d: int
    bound: float


def strategy_box(strategy: DeterministicStrategy, scenario: ScenarioSpec) -> BipartiteBox:
    n, d = scenario.n_settings, scenario.d
    if len(strategy.alice_outcomes) != n or len(strategy.bob_outcomes) != n:
        raise ValueError(
            f"strategy has {len(strategy.alice_outcomes)}/{len(strategy.bob_outcomes)} "
            f"settings, scenario needs {n}"
        )
    if max(strategy.alice_outcomes + strategy.bob_outcomes) >= d:
        raise ValueError(f"strategy outcome out of range [0, {d - 1}]")
    table = np.zeros(scenario.shape)
    for k, a in enumerate(strategy.alice_outcomes):
        for l, b in enumerate(strategy.bob_outcomes):
            table[k, l, a, b] = 1.0
    return BipartiteBox(scenario, table)


def strategy_count(scenario: ScenarioSpec) -> int:
    return scenario.d ** (2 * scenario.n_settings)


def _decode(indices: np.ndarray, d: int, width: int) -> np.ndarray:
    # digit 0 is most significant, so index order is lexicographic strategy order
    digits = np.empty((indices.size, width), dtype=np.int64)
    rest = indices.copy()
    for pos in range(width - 1, -1, -1):
        digits[:, pos] = rest % d
        rest //= d
    return digits


def _chained_values(digits: np.ndarray, d: int, n: int) -> np.ndarray:
    alice, bob = digits[:, :n], digits[:, n:]
    total = np.zeros(digits.shape[0], dtype=np.int64)
    for t in chained_terms(n):
        table = modular_values(d, t.side, t.shift)
        total += table[alice[:, t.k - 1], bob[:, t.l - 1]]
    return total


def lhv_minimum(scenario: ScenarioSpec, cap: int = DEFAULT_ENUMERATION_CAP) -> LhvMinimum:
    """Exact minimum of the chained value over all d^(2N) deterministic strategies.

    Ties go to the lexicographically smallest (alice_outcomes, bob_outcomes).

    Raises
    ------
    EnumerationLimitError
        If d^(2N) exceeds ``cap``.
    """
    d, n = scenario.d, scenario.n_settings
    count = strategy_count(scenario)
    if count > cap:
        raise EnumerationLimitError(
            f"d={d}, N={n} needs {count} strategies, enumeration cap is {cap}"
        )
    best_value, best_index = None, None
    for start in range(0, count, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, count), dtype=np.int64)
        values = _chained_values(_decode(idx, d, 2 * n), d, n)
        i = int(np.argmin(values))
        if best_value is None or values[i] < best_value:
            best_value, best_index = int(values[i]), start + i
    digits = _decode(np.array([best_index], dtype=np.int64), d, 2 * n)[0]
    strategy = DeterministicStrategy(tuple(digits[:n]), tuple(digits[n:]))
    return LhvMinimum(float(best_value), strategy, count)


def local_fraction_bound(i_value: float, d: int) -> LocalFractionBound:
    """Upper bound on the weight of any local component: I_N / (d - 1), clamped to [0, 1]."""
    if i_value < 0:
        raise ValueError(f"chained value cannot be negative, got {i_value}")
    bound = min(1.0, max(0.0, i_value / local_bound(d)))
    return LocalFractionBound(float(i_value), int(d), bound)


def simulation_bits_bound(d: int) -> float:
    """Lower bound, in bits, on classical communication needed to simulate the correlations."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return math.log2(d)


def random_strategy(scenario: ScenarioSpec, rng: np.random.Generator) -> DeterministicStrategy:
    n, d = scenario.n_settings, scenario.d
    return DeterministicStrategy(
        tuple(rng.integers(0, d, n)), tuple(rng.integers(0, d, n))
    )


def strategy_value(strategy: DeterministicStrategy, d: int) -> int:
    """Chained value of a deterministic strategy, computed outcome-wise."""
    n = len(strategy.alice_outcomes)
    digits = np.array([strategy.alice_outcomes + strategy.bob_outcomes], dtype=np.int64)
    return int(_chained_values(digits, d, n)[0])


def mixture_box(strategies: Sequence[DeterministicStrategy], weights, scenario: ScenarioSpec) -> BipartiteBox:
    """Convex combination of strategy boxes."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(strategies),) or np.any(w < 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
        raise ValueError("weights must be a probability vector matching the strategies")
    table = np.zeros(scenario.shape)
    for s, wi in zip(strategies, w):
        table += wi * strategy_box(s, scenario).table
    return BipartiteBox(scenario, table)
