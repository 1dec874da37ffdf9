"""Quantitative optimality verdicts for a measurement.

A POVM is optimal iff the Hermitian part of its measurement-state operator
sum dominates every weighted state. This module measures the violation of
that domination condition per outcome (the "defect" matrices and their
positive-part traces), and converts those residuals into a certified
two-sided interval around the unknown optimal success probability:

* lower bound on the gap: the squared maximal positive-part trace, which a
  single improvement step is guaranteed to recover;
* upper bound on the gap: ``alpha * rank(P) + 4 * sum_k ||(1-P) rho_k||_1``
  minimized over greedily constructed support projectors P, where alpha is
  the smallest scalar softening that restores domination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError
from .model import Ensemble, Povm, _trace_probability, lagrange_operator

# Grid of tail-mass budgets tried when minimizing the gap upper bound.
DEFAULT_P_GRID = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2)


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Per-outcome violation of the domination condition.

    ``defects[k]`` is rho_k minus the Hermitian part of the operator sum;
    ``t[k]`` the trace of its positive part; ``lam[k]`` its top eigenvalue.
    ``argmax_ell`` indexes the largest t (lowest index on ties) and
    ``alpha_scalar`` is the smallest scalar alpha with
    Re(L) >= rho_k - alpha for every k, i.e. max_k max(lam[k], 0).
    """

    defects: tuple
    t: np.ndarray
    lam: np.ndarray
    argmax_ell: int
    alpha_scalar: float
    lagrange: np.ndarray
    asymmetry: float
    p_succ: float

    @property
    def t_max(self) -> float:
        return float(self.t[self.argmax_ell])


def residuals(ensemble: Ensemble, povm: Povm) -> ResidualReport:
    """Defect matrices, positive-part traces, and top eigenvalues per outcome."""
    operator = lagrange_operator(ensemble, povm)
    hermitian_part = linalg.real_part(operator)
    defects = []
    t_values = []
    lam_values = []
    for state in ensemble.states:
        defect = state - hermitian_part
        dec = linalg.eigh(defect)
        cutoff = linalg.positive_cutoff(dec.eigenvalues)
        t_values.append(float(np.sum(dec.eigenvalues[dec.eigenvalues > cutoff])))
        lam_values.append(float(dec.eigenvalues[0]))
        defects.append(defect)
    t_arr = np.array(t_values)
    lam_arr = np.array(lam_values)
    ell = int(np.argmax(t_arr))
    alpha = max(0.0, float(np.max(lam_arr)))
    return ResidualReport(
        defects=tuple(defects),
        t=t_arr,
        lam=lam_arr,
        argmax_ell=ell,
        alpha_scalar=alpha,
        lagrange=operator,
        asymmetry=linalg.operator_norm(operator - operator.conj().T),
        p_succ=_trace_probability(operator),
    )


def check_optimal(ensemble: Ensemble, povm: Povm, tol: float = 1e-8):
    """Whether the domination condition holds within ``tol``.

    Returns ``(optimal, report)``; ``optimal`` is true iff the largest
    positive-part trace is at most ``tol``. At a true optimum the operator
    sum is also Hermitian, which ``report.asymmetry`` exposes.
    """
    report = residuals(ensemble, povm)
    return report.t_max <= tol, report


def gap_lower_bound(report: ResidualReport) -> float:
    """Certified lower bound on (optimal - current) success probability.

    The squared maximal positive-part trace: one improvement step recovers
    at least this much, so the optimum exceeds the current value by it.
    """
    return report.t_max ** 2


def p_dimension_projector(ensemble: Ensemble, p: float):
    """Greedy small-dimensional projector capturing all but mass ``p``.

    Pools the eigenpairs of every weighted state, keeps the shortest
    descending-eigenvalue prefix whose excluded tail mass is at most ``p``,
    and orthonormalizes the kept vectors. Returns ``(rank, projector,
    residual_bound)`` where ``rank`` is an upper bound on the minimal
    dimension achieving tail mass ``p`` and ``residual_bound`` is the exact
    value of ``sum_k ||(1 - projector) rho_k||_1`` (at most the tail mass,
    hence at most ``p``, by the triangle inequality).

    ``p = 0`` keeps everything: the projector spans the joint support of
    all state ranges. ``p = 1`` may return the zero projector.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    pooled_vals = []
    pooled_vecs = []
    for state in ensemble.states:
        dec = linalg.eigh(state)
        cutoff = linalg.positive_cutoff(dec.eigenvalues)
        keep = dec.eigenvalues > cutoff
        pooled_vals.append(dec.eigenvalues[keep])
        pooled_vecs.append(dec.eigenvectors[:, keep])
    vals = np.concatenate(pooled_vals) if pooled_vals else np.empty(0)
    vecs = (
        np.concatenate(pooled_vecs, axis=1)
        if pooled_vecs
        else np.empty((ensemble.dim, 0))
    )
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]

    cumulative = np.concatenate([[0.0], np.cumsum(vals)])
    total = cumulative[-1]
    tails = total - cumulative  # tails[j]: mass excluded when keeping first j
    n_keep = int(np.argmax(tails <= p))

    dim = ensemble.dim
    if n_keep == 0:
        projector = np.zeros((dim, dim), dtype=np.complex128)
        rank = 0
    else:
        basis = vecs[:, :n_keep]
        u, singular, _ = np.linalg.svd(basis, full_matrices=False)
        rank_tol = max(basis.shape) * np.finfo(np.float64).eps * float(singular[0])
        rank = int(np.sum(singular > rank_tol))
        span = u[:, :rank]
        projector = linalg.real_part(span @ span.conj().T)

    complement = np.eye(dim, dtype=np.complex128) - projector
    residual_bound = float(
        sum(linalg.trace_norm(complement @ state) for state in ensemble.states)
    )
    return rank, projector, residual_bound


@dataclass(frozen=True)
class GapCertificate:
    """Certified interval: optimal minus current success probability lies in
    [lower, upper] (up to round-off; both endpoints are proven bounds)."""

    lower: float
    upper: float
    p_used: float
    dim_used: int
    projector_rank: int


def _upper_at(ensemble: Ensemble, alpha: float, p: float):
    rank, _, residual = p_dimension_projector(ensemble, p)
    return alpha * rank + 4.0 * residual, rank


def _refined_grid(grid, best_index):
    # One local pass: midpoints between the best point and its neighbors.
    extras = []
    best = grid[best_index]
    if best_index > 0:
        extras.append((grid[best_index - 1] + best) / 2.0)
    if best_index + 1 < len(grid):
        extras.append((best + grid[best_index + 1]) / 2.0)
    return [p for p in extras if 0.0 <= p <= 1.0 and p not in grid]


def gap_upper_bound(
    ensemble: Ensemble,
    report: ResidualReport,
    p_grid=None,
) -> GapCertificate:
    """Two-sided gap certificate from the residual report.

    For each tail-mass budget p in the grid, builds the greedy projector and
    evaluates ``alpha_scalar * rank + 4 * residual`` with the exact
    projector residual (never looser than the headline ``alpha * dim + 4p``
    form); returns the grid minimum after one refinement pass around the
    best point.
    """
    grid = sorted(set(DEFAULT_P_GRID if p_grid is None else tuple(p_grid)))
    if not grid:
        raise ValueError("p_grid must not be empty")
    for p in grid:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p_grid entries must lie in [0, 1], got {p}")
    alpha = report.alpha_scalar

    bounds = [_upper_at(ensemble, alpha, p) for p in grid]
    uppers = [b[0] for b in bounds]
    best_index = int(np.argmin(uppers))

    candidates = list(zip(grid, bounds))
    for p in _refined_grid(grid, best_index):
        candidates.append((p, _upper_at(ensemble, alpha, p)))
    candidates.sort(key=lambda item: item[0])

    best_p, (best_upper, best_rank) = min(candidates, key=lambda item: item[1][0])
    return GapCertificate(
        lower=gap_lower_bound(report),
        upper=best_upper,
        p_used=float(best_p),
        dim_used=best_rank,
        projector_rank=best_rank,
    )
