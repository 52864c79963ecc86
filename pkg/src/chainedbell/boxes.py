"""Correlation boxes P(a,b|k,l) over a bipartite (d, N) scenario.

Settings are labelled 1..N and outcomes 0..d-1. The table itself is stored
zero-based as ``table[k-1, l-1, a, b]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

EPS_PROB = 1e-12
EPS_NS = 1e-9


class BoxShapeError(ValueError):
    """Table dimensions do not match the scenario."""


class SignallingError(ValueError):
    """A marginal was requested from a box that signals beyond tolerance."""


class BoxFormatError(ValueError):
    """A box file could not be parsed."""


@dataclass(frozen=True)
class ScenarioSpec:
    d: int
    n_settings: int

    def __post_init__(self):
        for name in ("d", "n_settings"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 2:
                raise ValueError(f"{name} must be >= 2, got {value}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "n_settings", int(self.n_settings))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        n, d = self.n_settings, self.d
        return (n, n, d, d)

    @property
    def n_entries(self) -> int:
        return self.n_settings**2 * self.d**2


@dataclass(frozen=True, eq=False)
class BipartiteBox:
    """Conditional distribution table for one scenario.

    The table is copied on construction and made read-only. Range and
    normalization are *not* enforced here so that malformed boxes can be
    represented and reported by :func:`validate_box`; only the shape is.
    """

    scenario: ScenarioSpec
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=float, copy=True)
        if table.shape != self.scenario.shape:
            raise BoxShapeError(
                f"table shape {table.shape} does not match scenario "
                f"(d={self.scenario.d}, N={self.scenario.n_settings}) "
                f"which needs {self.scenario.shape}"
            )
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def d(self) -> int:
        return self.scenario.d

    @property
    def n_settings(self) -> int:
        return self.scenario.n_settings

    def prob(self, k: int, l: int, a: int, b: int) -> float:
        """P(a,b|k,l) with one-based settings."""
        return float(self.table[k - 1, l - 1, a, b])

    def mix(self, other: BipartiteBox, weight: float) -> BipartiteBox:
        """Entrywise ``weight * self + (1 - weight) * other``."""
        if other.scenario != self.scenario:
            raise ValueError("cannot mix boxes from different scenarios")
        return BipartiteBox(self.scenario, weight * self.table + (1.0 - weight) * other.table)

    def __eq__(self, other):
        if not isinstance(other, BipartiteBox):
            return NotImplemented
        return self.scenario == other.scenario and np.array_equal(self.table, other.table)

    __hash__ = None


class Violation(NamedTuple):
    kind: str  # "range" or "normalization"
    index: tuple[int, ...]  # (k, l, a, b) or (k, l), one-based settings
    value: float
    magnitude: float


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class NoSignallingReport:
    """Largest setting-dependence of each party's marginals.

    ``max_alice_deviation`` measures how much Alice's marginal P(A_k=a)
    changes with Bob's setting; the worst index is ``(k, a, l, l')``.
    ``max_bob_deviation`` is the converse, with worst index ``(l, b, k, k')``.
    """

    max_alice_deviation: float
    max_bob_deviation: float
    alice_worst: tuple[int, int, int, int]
    bob_worst: tuple[int, int, int, int]

    @property
    def max_deviation(self) -> float:
        return max(self.max_alice_deviation, self.max_bob_deviation)

    @property
    def worst_indices(self) -> tuple[str, tuple[int, int, int, int]]:
        if self.max_alice_deviation >= self.max_bob_deviation:
            return ("alice", self.alice_worst)
        return ("bob", self.bob_worst)

    def is_non_signalling(self, tol: float = EPS_NS) -> bool:
        return self.max_deviation <= tol

    def describe(self) -> str:
        side, idx = self.worst_indices
        if side == "alice":
            k, a, l1, l2 = idx
            return (
                f"P(A_{k}={a}) differs by {self.max_alice_deviation:.3g} "
                f"between Bob settings l={l1} and l={l2}"
            )
        l, b, k1, k2 = idx
        return (
            f"P(B_{l}={b}) differs by {self.max_bob_deviation:.3g} "
            f"between Alice settings k={k1} and k={k2}"
        )


def _check_shape(box: BipartiteBox) -> None:
    if box.table.shape != box.scenario.shape:
        raise BoxShapeError(f"table shape {box.table.shape} != {box.scenario.shape}")


def validate_box(box: BipartiteBox, tol: float = EPS_PROB) -> ValidationResult:
    """Collect every range and normalization violation in ``box``."""
    _check_shape(box)
    t = box.table
    violations = []
    for idx in zip(*np.nonzero((t < -tol) | (t > 1.0 + tol) | ~np.isfinite(t))):
        value = float(t[idx])
        magnitude = -value if value < 0 else value - 1.0
        k, l, a, b = (int(i) for i in idx)
        violations.append(Violation("range", (k + 1, l + 1, a, b), value, magnitude))
    sums = t.sum(axis=(2, 3))
    for k, l in zip(*np.nonzero(~(np.abs(sums - 1.0) <= tol))):
        value = float(sums[k, l])
        violations.append(
            Violation("normalization", (int(k) + 1, int(l) + 1), value, abs(value - 1.0))
        )
    return ValidationResult(tuple(violations))


def _max_spread(marg: np.ndarray) -> tuple[float, tuple[int, int, int, int]]:
    # marg[s, o, t]: marginal of setting s, outcome o, under the other party's setting t
    hi = marg.max(axis=2)
    lo = marg.min(axis=2)
    spread = hi - lo
    s, o = np.unravel_index(int(np.argmax(spread)), spread.shape)
    t_hi = int(np.argmax(marg[s, o]))
    t_lo = int(np.argmin(marg[s, o]))
    return float(spread[s, o]), (int(s) + 1, int(o), t_lo + 1, t_hi + 1)


def no_signalling_violation(box: BipartiteBox) -> NoSignallingReport:
    _check_shape(box)
    # Alice marginal per Bob setting: sum over b -> [k, l, a] -> [k, a, l]
    alice = box.table.sum(axis=3).transpose(0, 2, 1)
    # Bob marginal per Alice setting: sum over a -> [k, l, b] -> [l, b, k]
    bob = box.table.sum(axis=2).transpose(1, 2, 0)
    a_dev, a_idx = _max_spread(alice)
    b_dev, b_idx = _max_spread(bob)
    return NoSignallingReport(a_dev, b_dev, a_idx, b_idx)


def _require_non_signalling(box: BipartiteBox, tol: float) -> None:
    report = no_signalling_violation(box)
    if not report.is_non_signalling(tol):
        raise SignallingError(f"marginal is ill-defined: {report.describe()}")


def alice_marginals(box: BipartiteBox, tol: float = EPS_NS) -> np.ndarray:
    """Array ``m[k-1, a]`` of Alice's marginals, averaged over Bob's settings."""
    _require_non_signalling(box, tol)
    return box.table.sum(axis=3).mean(axis=1)


def bob_marginals(box: BipartiteBox, tol: float = EPS_NS) -> np.ndarray:
    """Array ``m[l-1, b]`` of Bob's marginals, averaged over Alice's settings."""
    _require_non_signalling(box, tol)
    return box.table.sum(axis=2).mean(axis=0)


def _check_index(name: str, value: int, lo: int, hi: int) -> None:
    if not lo <= value <= hi:
        raise IndexError(f"{name}={value} out of range [{lo}, {hi}]")


def marginal_alice(box: BipartiteBox, k: int, a: int, tol: float = EPS_NS) -> float:
    """P(A_k = a), defined as the average over Bob's settings.

    Raises
    ------
    SignallingError
        If the box's no-signalling deviation exceeds ``tol``.
    """
    _check_index("k", k, 1, box.n_settings)
    _check_index("a", a, 0, box.d - 1)
    return float(alice_marginals(box, tol)[k - 1, a])


def marginal_bob(box: BipartiteBox, l: int, b: int, tol: float = EPS_NS) -> float:
    _check_index("l", l, 1, box.n_settings)
    _check_index("b", b, 0, box.d - 1)
    return float(bob_marginals(box, tol)[l - 1, b])


def uniform_box(scenario: ScenarioSpec) -> BipartiteBox:
    return BipartiteBox(scenario, np.full(scenario.shape, 1.0 / scenario.d**2))


# -- box file format ---------------------------------------------------------


def box_to_dict(box: BipartiteBox) -> dict:
    return {"d": box.d, "N": box.n_settings, "P": box.table.tolist()}


def box_from_dict(doc) -> BipartiteBox:
    if not isinstance(doc, dict):
        raise BoxFormatError("top level must be a JSON object with fields d, N, P")
    for key in ("d", "N", "P"):
        if key not in doc:
            raise BoxFormatError(f"missing field {key!r}")
    for key in ("d", "N"):
        if isinstance(doc[key], bool) or not isinstance(doc[key], int):
            raise BoxFormatError(f"field {key!r} must be an integer, got {doc[key]!r}")
    try:
        scenario = ScenarioSpec(doc["d"], doc["N"])
    except ValueError as exc:
        raise BoxFormatError(f"invalid scenario: {exc}") from exc

    n, d = scenario.n_settings, scenario.d
    table = np.empty(scenario.shape)
    P = doc["P"]
    if not isinstance(P, list) or len(P) != n:
        raise BoxFormatError(f"field P must be a list of length {n}")
    for k in range(n):
        row_k = P[k]
        if not isinstance(row_k, list) or len(row_k) != n:
            raise BoxFormatError(f"field P[{k}] must be a list of length {n}")
        for l in range(n):
            block = row_k[l]
            if not isinstance(block, list) or len(block) != d:
                raise BoxFormatError(f"field P[{k}][{l}] must be a list of length {d}")
            for a in range(d):
                row = block[a]
                if not isinstance(row, list) or len(row) != d:
                    raise BoxFormatError(f"field P[{k}][{l}][{a}] must be a list of length {d}")
                for b in range(d):
                    v = row[b]
                    if isinstance(v, bool) or not isinstance(v, (int, float)):
                        raise BoxFormatError(f"field P[{k}][{l}][{a}][{b}] is not a number: {v!r}")
                    table[k, l, a, b] = v
    return BipartiteBox(scenario, table)


def dumps_box(box: BipartiteBox) -> str:
    return json.dumps(box_to_dict(box))


def loads_box(text: str) -> BipartiteBox:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BoxFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return box_from_dict(doc)


def save_box(box: BipartiteBox, path) -> None:
    Path(path).write_text(dumps_box(box) + "\n")


def load_box(path) -> BipartiteBox:
    return loads_box(Path(path).read_text())
