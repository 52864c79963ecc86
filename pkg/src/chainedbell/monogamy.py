"""Marginal bounds for no-signalling boxes with a small chained value.

Any no-signalling box with I_N <= I* has every marginal at most
1/d + (d/4) I*. This module checks that bound on concrete boxes, evaluates the
intermediate inequalities of its proof, and maximizes a marginal over the
no-signalling polytope cut by I_N <= I* to see how close the bound is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boxes import (
    BipartiteBox,
    ScenarioSpec,
    alice_marginals,
    bob_marginals,
    uniform_box,
)
from .functionals import chained_coefficients, chained_value
from .lhv import random_strategy, strategy_box
from .quantum import ResourceLimitError, noisy_quantum_box, quantum_box
from .simplex import LPStatus, solve_lp

EPS_LP = 1e-7
THEOREM_TOL = 1e-9
CHAIN_TOL = 1e-10
DEFAULT_LP_VARIABLE_CAP = 4096


def theorem_bound(d: int, i_star: float) -> float:
    if i_star < 0:
        raise ValueError(f"i_star must be >= 0, got {i_star}")
    return 1.0 / d + d / 4.0 * i_star


@dataclass(frozen=True)
class TheoremReport:
    passed: bool
    i_value: float
    bound: float
    worst_marginal: float
    worst_side: str  # "alice" | "bob"
    worst_index: tuple[int, int]  # (setting, outcome), setting one-based
    slack: float


def verify_theorem(box: BipartiteBox, tol: float = THEOREM_TOL) -> TheoremReport:
    """Check every marginal of ``box`` against the bound at I* = I_N(box)."""
    pa = alice_marginals(box)
    pb = bob_marginals(box)
    i_value = chained_value(box).total
    bound = theorem_bound(box.d, max(i_value, 0.0))
    ia = np.unravel_index(int(np.argmax(pa)), pa.shape)
    ib = np.unravel_index(int(np.argmax(pb)), pb.shape)
    if pa[ia] >= pb[ib]:
        side, idx, worst = "alice", ia, float(pa[ia])
    else:
        side, idx, worst = "bob", ib, float(pb[ib])
    slack = bound - worst
    return TheoremReport(
        passed=slack >= -tol,
        i_value=i_value,
        bound=bound,
        worst_marginal=worst,
        worst_side=side,
        worst_index=(int(idx[0]) + 1, int(idx[1])),
        slack=slack,
    )


@dataclass(frozen=True)
class ProofChainReport:
    """Values along I_N >= pair_bound >= marginal_gaps >= rhs."""

    i_value: float
    pair_bound: float
    marginal_gaps: float
    rhs: float
    links: tuple[bool, bool, bool]

    @property
    def lhs(self) -> float:
        return self.i_value

    @property
    def holds(self) -> bool:
        return all(self.links)


def pair_agreement_bound(box: BipartiteBox) -> float:
    """2N - sum_j [P(A_j = B_j) + P(A_{j+1} = B_j)], with A_{N+1} = A_1 + 1 mod d.

    Only block-local probabilities enter, so this is defined for any box.
    """
    n, d = box.n_settings, box.d
    t = box.table
    diag = np.arange(d)
    total = 0.0
    for j in range(n):
        total += t[j, j, diag, diag].sum()
        if j + 1 < n:
            total += t[j + 1, j, diag, diag].sum()
        else:
            # A_1 + 1 = B_N  <=>  b = a + 1
            total += t[0, n - 1, diag, (diag + 1) % d].sum()
    return 2.0 * n - total


def proof_chain_check(box: BipartiteBox, qs: Sequence[int], tol: float = CHAIN_TOL) -> ProofChainReport:
    n, d = box.n_settings, box.d
    qs = [int(q) for q in qs]
    if len(qs) != n or any(not 0 <= q < d for q in qs):
        raise ValueError(f"qs must hold {n} outcomes in [0, {d - 1}]")
    pa = alice_marginals(box)
    pb = bob_marginals(box)

    def p_alice(j: int, q: int) -> float:
        # j is one-based and may be N+1
        if j == n + 1:
            return pa[0, (q - 1) % d]
        return pa[j - 1, q]

    i_value = chained_value(box).total
    pair = pair_agreement_bound(box)
    gaps = 0.0
    rhs = 0.0
    for j in range(1, n + 1):
        q = qs[j - 1]
        pbj = pb[j - 1, q]
        gaps += abs(p_alice(j, q) - pbj) + abs(p_alice(j + 1, q) - pbj)
        rhs += abs(p_alice(j, q) - p_alice(j + 1, q))
    links = (i_value >= pair - tol, pair >= gaps - tol, gaps >= rhs - tol)
    return ProofChainReport(i_value, pair, float(gaps), float(rhs), links)


# -- linear program ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LPProblem:
    """Maximize ``objective @ x`` for x = box.table.ravel() over the constrained polytope."""

    scenario: ScenarioSpec
    objective: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    n_normalization: int
    n_ns_alice: int
    n_ns_bob: int

    @property
    def n_variables(self) -> int:
        return self.objective.size

    @property
    def n_bell(self) -> int:
        return self.b_ub.size


@dataclass(frozen=True)
class LPSolution:
    status: LPStatus
    value: float | None
    argmax_box: BipartiteBox | None


def _index(scenario: ScenarioSpec):
    return np.arange(scenario.n_entries).reshape(scenario.shape)


def build_marginal_lp(scenario: ScenarioSpec, k: int, a: int, i_star: float) -> LPProblem:
    n, d = scenario.n_settings, scenario.d
    if not 1 <= k <= n or not 0 <= a < d:
        raise IndexError(f"(k={k}, a={a}) out of range")
    if i_star < 0:
        raise ValueError(f"i_star must be >= 0, got {i_star}")
    idx = _index(scenario)
    nv = scenario.n_entries

    rows = []
    for kk in range(n):
        for ll in range(n):
            r = np.zeros(nv)
            r[idx[kk, ll].ravel()] = 1.0
            rows.append(r)
    n_norm = len(rows)
    for kk in range(n):
        for aa in range(d):
            for ll in range(n - 1):
                r = np.zeros(nv)
                r[idx[kk, ll, aa, :]] = 1.0
                r[idx[kk, ll + 1, aa, :]] -= 1.0
                rows.append(r)
    n_alice = len(rows) - n_norm
    for ll in range(n):
        for bb in range(d):
            for kk in range(n - 1):
                r = np.zeros(nv)
                r[idx[kk, ll, :, bb]] = 1.0
                r[idx[kk + 1, ll, :, bb]] -= 1.0
                rows.append(r)
    n_bob = len(rows) - n_norm - n_alice
    A_eq = np.array(rows)
    b_eq = np.concatenate([np.ones(n_norm), np.zeros(n_alice + n_bob)])

    A_ub = chained_coefficients(scenario).reshape(1, nv)
    b_ub = np.array([float(i_star)])

    objective = np.zeros(nv)
    objective[idx[k - 1, 0, a, :]] = 1.0
    return LPProblem(scenario, objective, A_eq, b_eq, A_ub, b_ub, n_norm, n_alice, n_bob)


def solve_marginal_lp(problem: LPProblem) -> LPSolution:
    res = solve_lp(-problem.objective, problem.A_ub, problem.b_ub, problem.A_eq, problem.b_eq)
    if res.status is not LPStatus.OPTIMAL:
        return LPSolution(res.status, None, None)
    box = BipartiteBox(problem.scenario, res.x.reshape(problem.scenario.shape))
    return LPSolution(res.status, float(problem.objective @ res.x), box)


def lp_residual(problem: LPProblem, solution: LPSolution) -> float:
    """Largest constraint violation of the argmax box, including objective mismatch."""
    x = solution.argmax_box.table.ravel()
    return float(
        max(
            np.abs(problem.A_eq @ x - problem.b_eq).max(),
            np.max(problem.A_ub @ x - problem.b_ub, initial=0.0),
            np.max(-x, initial=0.0),
            abs(problem.objective @ x - solution.value),
        )
    )


def lp_max_marginal(
    scenario: ScenarioSpec,
    k: int,
    a: int,
    i_star: float,
    cap: int = DEFAULT_LP_VARIABLE_CAP,
) -> LPSolution:
    """Largest P(A_k = a) over no-signalling boxes with chained value <= ``i_star``."""
    if scenario.n_entries > cap:
        raise ResourceLimitError(f"LP needs {scenario.n_entries} variables, cap is {cap}")
    return solve_marginal_lp(build_marginal_lp(scenario, k, a, i_star))


# -- sampling ------------------------------------------------------------------


def chained_pr_box(scenario: ScenarioSpec) -> BipartiteBox:
    """No-signalling box with every chained term zero, so I_N = 0.

    Linked blocks are perfectly correlated (b = a, or b = a + 1 on the closing
    block); blocks not in the chain are uniform.
    """
    n, d = scenario.n_settings, scenario.d
    table = uniform_box(scenario).table.copy()
    perm = np.eye(d) / d
    linked = {(j, j): 0 for j in range(n)}
    linked.update({(j + 1, j): 0 for j in range(n - 1)})
    linked[(0, n - 1)] = 1
    for (kk, ll), shift in linked.items():
        table[kk, ll] = np.roll(perm, shift, axis=1)
    return BipartiteBox(scenario, table)


def sample_nonsignalling_box(
    scenario: ScenarioSpec,
    rng: np.random.Generator,
    kind: str = "local",
    n_strategies: int = 4,
) -> BipartiteBox:
    """Random box that is no-signalling by construction.

    ``kind`` selects the ingredients: ``"local"`` mixes random deterministic
    boxes; ``"quantum"`` and ``"noisy"`` add a quantum (or visibility-noised
    quantum) component to such a mixture; ``"pr"`` adds the chained PR-type box.
    """
    parts = [strategy_box(random_strategy(scenario, rng), scenario).table for _ in range(n_strategies)]
    d, n = scenario.d, scenario.n_settings
    if kind == "quantum":
        parts.append(quantum_box(d, n).table)
    elif kind == "noisy":
        parts.append(noisy_quantum_box(d, n, rng.uniform()).table)
    elif kind == "pr":
        parts.append(chained_pr_box(scenario).table)
    elif kind != "local":
        raise ValueError(f"unknown kind {kind!r}")
    weights = rng.dirichlet(np.ones(len(parts)))
    if kind != "local" and rng.uniform() < 0.5:
        # put most of the weight on the non-local ingredient to reach small I_N
        weights = 0.1 * weights
        weights[-1] += 0.9
    table = sum(w * p for w, p in zip(weights, parts))
    return BipartiteBox(scenario, table)

