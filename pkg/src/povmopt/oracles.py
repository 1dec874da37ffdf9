"""Independent ground-truth references for testing.

Nothing here shares arithmetic with the iteration or the certificate
machinery beyond the spectral-calculus primitives: the two-state optimum is
closed form, the qubit search is brute force over projective measurements,
and the converged-operator check recomputes the operator sum directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, ValidationError
from .model import Ensemble, Povm, success_probability

_TRACE_SUM_TOL = 1e-9


def helstrom_two_state(rho1, rho2):
    """Exact two-hypothesis optimum for prior-weighted states.

    Returns ``(p_opt, povm)`` with p_opt = (1 + ||rho1 - rho2||_1) / 2 and
    the projective measurement onto the positive eigenspace of the
    difference (complement for the second outcome).
    """
    a = linalg.as_complex_matrix(rho1)
    b = linalg.as_complex_matrix(rho2)
    if a.shape != b.shape:
        raise DimensionError(f"state shapes differ: {a.shape} vs {b.shape}")
    mass = float(np.trace(a).real + np.trace(b).real)
    if abs(mass - 1.0) > _TRACE_SUM_TOL:
        raise ValidationError(
            f"prior-weighted traces must sum to 1, got {mass!r} "
            f"(deficit {1.0 - mass:.3e})"
        )
    difference = linalg.real_part(a - b)
    p_opt = 0.5 * (1.0 + linalg.trace_norm(difference))
    projector = linalg.positive_projection(difference)
    complement = np.eye(a.shape[0], dtype=np.complex128) - projector
    return p_opt, Povm(dim=a.shape[0], elements=[projector, complement])


def _fibonacci_directions(count: int) -> np.ndarray:
    """Deterministic near-uniform unit vectors on the sphere, plus the six
    coordinate axes so axis-aligned optima are hit exactly."""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    azimuth = i * math.pi * (3.0 - math.sqrt(5.0))
    radial = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    points = np.column_stack([radial * np.cos(azimuth), radial * np.sin(azimuth), z])
    axes = np.array(
        [
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ]
    )
    return np.vstack([points, axes])


_PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=np.complex128,
)


def qubit_grid_search(ensemble: Ensemble, angular_resolution: int = 720) -> float:
    """Brute-force lower bound on the qubit optimum.

    Scans two-outcome projective measurements with axes on a spherical
    Fibonacci grid, assigning one ensemble label to each projector (the
    remaining outcomes get zero), and also tries the trivial
    identity-on-one-outcome measurement. Converges to the best projective
    value as the resolution grows; always a lower bound on the optimum.
    """
    if ensemble.dim != 2:
        raise DimensionError(f"grid search requires dim 2, got {ensemble.dim}")
    if angular_resolution < 1:
        raise ValueError("angular_resolution must be positive")
    states = np.stack(ensemble.states)
    priors = ensemble.priors
    best = float(np.max(priors))  # all weight on the most likely hypothesis

    directions = _fibonacci_directions(angular_resolution)
    half_sigma = 0.5 * np.tensordot(directions, _PAULI, axes=(1, 0))
    plus = 0.5 * np.eye(2, dtype=np.complex128)[np.newaxis, :, :] + half_sigma
    # gains[n, k] = Tr(P+_n rho_k); the minus-projector value is prior - gain.
    gains = np.einsum("nab,kba->nk", plus, states).real
    losses = priors[np.newaxis, :] - gains

    for gain_row, loss_row in zip(gains, losses):
        i = int(np.argmax(gain_row))
        j = int(np.argmax(loss_row))
        if i != j:
            value = gain_row[i] + loss_row[j]
        else:
            gain_second = np.partition(gain_row, -2)[-2] if gain_row.size > 1 else -np.inf
            loss_second = np.partition(loss_row, -2)[-2] if loss_row.size > 1 else -np.inf
            value = max(gain_second + loss_row[j], gain_row[i] + loss_second)
        if value > best:
            best = float(value)
    return best


@dataclass(frozen=True)
class ConvergedOperatorReport:
    """Structural checks on the operator sum of a claimed optimum."""

    asymmetry: float
    asymmetry_limit: float
    domination_margin: float
    domination_limit: float
    trace_mismatch: float
    trace_limit: float

    @property
    def asymmetry_ok(self) -> bool:
        return self.asymmetry <= self.asymmetry_limit

    @property
    def domination_ok(self) -> bool:
        return self.domination_margin >= -self.domination_limit

    @property
    def trace_ok(self) -> bool:
        return self.trace_mismatch <= self.trace_limit

    @property
    def passed(self) -> bool:
        return self.asymmetry_ok and self.domination_ok and self.trace_ok

    def summary(self) -> str:
        return (
            f"asymmetry {self.asymmetry:.3e} (limit {self.asymmetry_limit:.3e}, "
            f"{'ok' if self.asymmetry_ok else 'FAIL'}); "
            f"domination margin {self.domination_margin:.3e} "
            f"(limit -{self.domination_limit:.3e}, "
            f"{'ok' if self.domination_ok else 'FAIL'}); "
            f"trace mismatch {self.trace_mismatch:.3e} "
            f"(limit {self.trace_limit:.3e}, {'ok' if self.trace_ok else 'FAIL'})"
        )


def certify_converged_L(
    ensemble: Ensemble, povm: Povm, tol: float = 1e-8
) -> ConvergedOperatorReport:
    """Check the hallmarks of an optimal operator sum at tolerance ``tol``.

    At a true optimum the operator sum is Hermitian and dominates every
    weighted state, and its trace equals the reported success probability.
    The operator sum is recomputed here directly so the check does not
    lean on the code paths it is auditing.
    """
    if ensemble.dim != povm.dim or ensemble.n_states != povm.n_outcomes:
        raise DimensionError("ensemble and POVM are incompatible")
    operator = np.zeros((ensemble.dim, ensemble.dim), dtype=np.complex128)
    for element, state in zip(povm.elements, ensemble.states):
        operator = operator + element @ state
    hermitian_part = (operator + operator.conj().T) / 2.0
    margin = min(
        float(np.linalg.eigvalsh(hermitian_part - state)[0])
        for state in ensemble.states
    )
    return ConvergedOperatorReport(
        asymmetry=linalg.operator_norm(operator - operator.conj().T),
        asymmetry_limit=ensemble.dim * tol,
        domination_margin=margin,
        domination_limit=tol,
        trace_mismatch=float(
            abs(complex(np.trace(operator)) - success_probability(ensemble, povm))
        ),
        trace_limit=1e-10,
    )
