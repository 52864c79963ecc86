"""Maximally entangled qudit pair measured in shifted Fourier bases.

Alice's setting k uses offset alpha_k = (k - 1/2)/N and Bob's setting l uses
beta_l = l/N. Offsets are kept as exact fractions and every phase is reduced
modulo one turn before it becomes a float, so large N does not lose the
small angle differences that dominate the chained value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .boxes import BipartiteBox, ScenarioSpec, uniform_box

DEFAULT_TABLE_CAP = 10**7
SINGULAR_THRESHOLD = 1e-9


class ResourceLimitError(RuntimeError):
    """A requested object exceeds its configured size cap."""


@dataclass(frozen=True, eq=False)
class StateVector:
    dimension: int
    amplitudes: np.ndarray = field(repr=False)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``psi[q_A, q_B]``."""
        d = math.isqrt(self.dimension)
        return self.amplitudes.reshape(d, d)


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Rows of ``vectors`` are the basis vectors |r>, r = 0..d-1."""

    d: int
    offset: Fraction
    conjugated: bool
    vectors: np.ndarray = field(repr=False)

    def gram(self) -> np.ndarray:
        return self.vectors.conj() @ self.vectors.T

    def orthonormality_error(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(self.d))))


@dataclass(frozen=True)
class GammaCoefficient:
    d: int
    value: float


def _check_scenario(d: int, n: int) -> None:
    ScenarioSpec(d, n)


def _check_setting(name: str, idx: int, n: int) -> None:
    if not 1 <= idx <= n:
        raise IndexError(f"{name}={idx} out of range [1, {n}]")


def _check_outcome(name: str, value: int, d: int) -> None:
    if not 0 <= value < d:
        raise IndexError(f"{name}={value} out of range [0, {d - 1}]")


def alice_offset(n: int, k: int) -> Fraction:
    return Fraction(2 * k - 1, 2 * n)


def bob_offset(n: int, l: int) -> Fraction:
    return Fraction(l, n)


def maximally_entangled_state(d: int) -> StateVector:
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    amps = np.zeros(d * d, dtype=complex)
    amps[np.arange(d) * (d + 1)] = 1.0 / math.sqrt(d)
    return StateVector(d * d, amps)


def _fourier_vectors(d: int, offset: Fraction, sign: int) -> np.ndarray:
    vecs = np.empty((d, d), dtype=complex)
    for r in range(d):
        for q in range(d):
            turns = (Fraction(q) * (r - offset) / d) % 1
            vecs[r, q] = np.exp(sign * 2j * math.pi * float(turns))
    vecs /= math.sqrt(d)
    vecs.setflags(write=False)
    return vecs


@lru_cache(maxsize=4096)
def _alice_basis(d: int, n: int, k: int) -> MeasurementBasis:
    off = alice_offset(n, k)
    return MeasurementBasis(d, off, False, _fourier_vectors(d, off, +1))


@lru_cache(maxsize=4096)
def _bob_basis(d: int, n: int, l: int) -> MeasurementBasis:
    off = bob_offset(n, l)
    return MeasurementBasis(d, off, True, _fourier_vectors(d, off, -1))


def alice_basis(d: int, n: int, k: int) -> MeasurementBasis:
    """Basis of Alice's measurement A_k: components exp(+2 pi i q (r - alpha_k)/d)/sqrt(d)."""
    _check_scenario(d, n)
    _check_setting("k", k, n)
    return _alice_basis(d, n, k)


def bob_basis(d: int, n: int, l: int) -> MeasurementBasis:
    """Basis of Bob's measurement B_l: the complex-conjugate family, offset beta_l.

    Note ``beta_N = 1`` is kept as is rather than reduced to 0: shifting the
    offset by a whole unit relabels the outcomes.
    """
    _check_scenario(d, n)
    _check_setting("l", l, n)
    return _bob_basis(d, n, l)


def joint_probability(d: int, n: int, k: int, l: int, a: int, b: int) -> float:
    """Born-rule probability |<a|_{A_k} <b|_{B_l} |psi_d>|^2."""
    _check_outcome("a", a, d)
    _check_outcome("b", b, d)
    va = alice_basis(d, n, k).vectors[a]
    vb = bob_basis(d, n, l).vectors[b]
    psi = maximally_entangled_state(d).as_matrix()
    amp = 0j
    for qa in range(d):
        for qb in range(d):
            amp += psi[qa, qb] * va[qa].conjugate() * vb[qb].conjugate()
    return abs(amp) ** 2


def phase_difference(n: int, k: int, l: int, a: int, b: int) -> Fraction:
    """theta = b - a + alpha_k - beta_l, exactly."""
    return b - a + alice_offset(n, k) - bob_offset(n, l)


def closed_form_probability(d: int, n: int, k: int, l: int, a: int, b: int) -> float:
    """Geometric-sum form (1/d^3) sin^2(pi theta) / sin^2(pi theta / d)."""
    _check_scenario(d, n)
    _check_setting("k", k, n)
    _check_setting("l", l, n)
    _check_outcome("a", a, d)
    _check_outcome("b", b, d)
    theta = phase_difference(n, k, l, a, b)
    return _closed_form(d, theta)


def _closed_form(d: int, theta) -> float:
    theta = Fraction(theta)
    if theta % d == 0:
        return 1.0 / d
    den = math.sin(math.pi * float((theta % d) / d))
    if abs(den) < SINGULAR_THRESHOLD:
        return 1.0 / d
    num = math.sin(math.pi * float(theta % 1))
    return num * num / (d**3 * den * den)


def _basis_stack(d: int, n: int, alice: bool) -> np.ndarray:
    get = _alice_basis if alice else _bob_basis
    return np.stack([get(d, n, s).vectors for s in range(1, n + 1)])


def quantum_box(d: int, n: int, cap: int = DEFAULT_TABLE_CAP) -> BipartiteBox:
    """Box of Born-rule probabilities for every setting pair.

    Raises
    ------
    ResourceLimitError
        If the table would hold more than ``cap`` entries.
    """
    scenario = ScenarioSpec(d, n)
    if scenario.n_entries > cap:
        raise ResourceLimitError(
            f"quantum box for d={d}, N={n} needs {scenario.n_entries} entries (cap {cap})"
        )
    A = _basis_stack(d, n, alice=True).conj()  # [k, a, q]
    B = _basis_stack(d, n, alice=False).conj()  # [l, b, q]
    psi = maximally_entangled_state(d).as_matrix()
    amp = np.einsum("kap,pq,lbq->klab", A, psi, B)
    return BipartiteBox(scenario, np.abs(amp) ** 2)


def noisy_quantum_box(d: int, n: int, visibility: float, cap: int = DEFAULT_TABLE_CAP) -> BipartiteBox:
    """``v * quantum_box + (1 - v) * uniform_box``."""
    v = float(visibility)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    q = quantum_box(d, n, cap)
    u = uniform_box(q.scenario)
    return BipartiteBox(q.scenario, v * q.table + (1.0 - v) * u.table)


def gamma_coefficient(d: int) -> GammaCoefficient:
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    s = math.fsum(j / math.sin(math.pi * j / d) ** 2 for j in range(1, d))
    return GammaCoefficient(d, math.pi**2 / (4 * d * d) * s)


def asymptotic_value(d: int, n: int) -> float:
    """Leading-order quantum chained value 2 gamma(d) / N."""
    _check_scenario(d, n)
    return 2.0 * gamma_coefficient(d).value / n
