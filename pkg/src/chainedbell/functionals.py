"""Chained Bell functional over d-outcome boxes.

    I_N = <[A_1-B_1]> + <[B_1-A_2]> + <[A_2-B_2]> + ... + <[A_N-B_N]> + <[B_N-A_1-1]>

where [X] is X mod d and <X> = sum_i i P(X=i). The closing term's "-1" is the
same as reading the chain with A_{N+1} = A_1 + 1 (mod d).

Every term is described by a :class:`Term` and evaluated through
:func:`term_coefficients`; the LP in :mod:`chainedbell.monogamy` builds its
Bell-value row from the same coefficients.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .boxes import BipartiteBox, ScenarioSpec


class SideOrder(enum.Enum):
    ALICE_MINUS_BOB = "A-B"
    BOB_MINUS_ALICE = "B-A"


class Term(NamedTuple):
    side: SideOrder
    k: int
    l: int
    shift: int

    def label(self) -> str:
        a, b = f"A{self.k}", f"B{self.l}"
        body = f"{a}-{b}" if self.side is SideOrder.ALICE_MINUS_BOB else f"{b}-{a}"
        if self.shift:
            body += f"-{self.shift}"
        return f"<[{body}]>"


@dataclass(frozen=True)
class ChainedReport:
    scenario: ScenarioSpec
    terms: tuple[float, ...]
    total: float
    labels: tuple[str, ...] = ()


def chained_terms(n: int) -> list[Term]:
    """The 2N terms in chain order."""
    out = []
    for j in range(1, n + 1):
        out.append(Term(SideOrder.ALICE_MINUS_BOB, j, j, 0))
        if j < n:
            out.append(Term(SideOrder.BOB_MINUS_ALICE, j + 1, j, 0))
        else:
            out.append(Term(SideOrder.BOB_MINUS_ALICE, 1, n, 1))
    return out


def modular_values(d: int, side: SideOrder, shift: int) -> np.ndarray:
    """``m[a, b] = [+-(a - b) - shift] mod d``."""
    a = np.arange(d)[:, None]
    b = np.arange(d)[None, :]
    diff = a - b if side is SideOrder.ALICE_MINUS_BOB else b - a
    return (diff - shift) % d


def term_coefficients(scenario: ScenarioSpec, term: Term) -> np.ndarray:
    """Coefficients c with <term> = sum(c * box.table)."""
    c = np.zeros(scenario.shape)
    c[term.k - 1, term.l - 1] = modular_values(scenario.d, term.side, term.shift)
    return c


def chained_coefficients(scenario: ScenarioSpec) -> np.ndarray:
    c = np.zeros(scenario.shape)
    for term in chained_terms(scenario.n_settings):
        c += term_coefficients(scenario, term)
    return c


def _check_term(box: BipartiteBox, k: int, l: int, shift: int) -> None:
    n = box.n_settings
    if not (1 <= k <= n and 1 <= l <= n):
        raise IndexError(f"settings (k={k}, l={l}) out of range [1, {n}]")
    if shift not in (0, 1):
        raise ValueError(f"shift must be 0 or 1, got {shift}")


def modular_expectation(box: BipartiteBox, side_order: SideOrder, k: int, l: int, shift: int = 0) -> float:
    """Expectation of ``[+-(A_k - B_l) - shift]`` under the (k, l) block of ``box``."""
    _check_term(box, k, l, shift)
    weights = modular_values(box.d, SideOrder(side_order), shift)
    block = box.table[k - 1, l - 1]
    return float(np.sum(weights * block))


def chained_value(box: BipartiteBox) -> ChainedReport:
    terms = chained_terms(box.n_settings)
    values = tuple(modular_expectation(box, t.side, t.k, t.l, t.shift) for t in terms)
    total = 0.0
    for v in values:
        total += v
    return ChainedReport(box.scenario, values, total, tuple(t.label() for t in terms))


def i2_value(box: BipartiteBox) -> float:
    """Two-setting (CGLMP-form) value; equals CHSH for d = 2."""
    if box.n_settings != 2:
        raise ValueError(f"I_2 needs N = 2 settings, box has N = {box.n_settings}")
    return chained_value(box).total


def local_bound(d: int) -> float:
    """Minimum of I_N over local hidden variable models: d - 1."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return float(d - 1)


def algebraic_minimum() -> float:
    return 0.0
