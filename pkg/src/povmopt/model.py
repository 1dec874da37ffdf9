"""Problem data model for minimum-error state discrimination.

An :class:`Ensemble` holds prior-weighted mixed states (the trace of each
state equals its prior probability, priors summing to one); a :class:`Povm`
holds one measurement operator per hypothesis. The module also provides the
measurement-times-state operator sum whose trace is the success probability,
structured validation, and the two standard starting measurements (uniform
and square-root).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError

# Per-operator positive-semidefiniteness tolerance (smallest eigenvalue >= -PSD_TOL).
PSD_TOL = 1e-9

# |sum_k Tr rho_k - 1| tolerance for a valid ensemble.
TRACE_SUM_TOL = 1e-9

# Operator-norm tolerance on sum_k M_k - identity for a valid POVM.
COMPLETENESS_TOL = 1e-9


@dataclass(eq=False)
class Ensemble:
    """Prior-weighted states rho_k on a d-dimensional space, Tr rho_k = p_k."""

    dim: int
    states: list
    labels: list | None = None

    def __post_init__(self):
        self.states = [linalg.as_complex_matrix(s) for s in self.states]
        for k, state in enumerate(self.states):
            if state.shape != (self.dim, self.dim):
                raise DimensionError(
                    f"state {k} has shape {state.shape}, expected ({self.dim}, {self.dim})"
                )
        if self.labels is not None and len(self.labels) != len(self.states):
            raise DimensionError(
                f"{len(self.labels)} labels for {len(self.states)} states"
            )

    @classmethod
    def from_priors(cls, density_matrices, priors, labels=None) -> "Ensemble":
        """Build from unit-trace density matrices and prior probabilities."""
        if len(density_matrices) != len(priors):
            raise DimensionError(
                f"{len(density_matrices)} density matrices for {len(priors)} priors"
            )
        states = [
            float(p) * linalg.as_complex_matrix(rho)
            for rho, p in zip(density_matrices, priors)
        ]
        dim = states[0].shape[0] if states else 0
        return cls(dim=dim, states=states, labels=labels)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def priors(self) -> np.ndarray:
        return np.array([float(np.trace(s).real) for s in self.states])


@dataclass(eq=False)
class Povm:
    """Measurement operators M_k >= 0 with sum_k M_k = identity."""

    dim: int
    elements: list

    def __post_init__(self):
        self.elements = [linalg.as_complex_matrix(m) for m in self.elements]
        for k, element in enumerate(self.elements):
            if element.shape != (self.dim, self.dim):
                raise DimensionError(
                    f"element {k} has shape {element.shape}, expected ({self.dim}, {self.dim})"
                )

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    def element_sum(self) -> np.ndarray:
        total = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for element in self.elements:
            total = total + element
        return total


@dataclass(frozen=True)
class CheckResult:
    """One invariant check: ``residual`` is the measured violation (0 = clean)."""

    name: str
    passed: bool
    residual: float
    tolerance: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(
                f"{status}  {c.name}: residual {c.residual:.3e} (tol {c.tolerance:.3e})"
            )
        return "\n".join(lines)


def _min_eigenvalue(mat) -> float:
    herm = linalg.real_part(mat)
    return float(np.linalg.eigvalsh(herm)[0])


def validate_ensemble(
    ensemble: Ensemble,
    psd_tol: float = PSD_TOL,
    trace_tol: float = TRACE_SUM_TOL,
) -> ValidationReport:
    """Check state count, Hermiticity, positivity, and total probability mass."""
    checks = []
    count_violation = float(max(0, 2 - ensemble.n_states))
    checks.append(
        CheckResult("state_count >= 2", count_violation == 0.0, count_violation, 0.0)
    )
    for k, state in enumerate(ensemble.states):
        herm = linalg.hermiticity_defect(state)
        checks.append(
            CheckResult(
                f"state[{k}] hermitian", herm <= linalg.HERMITIAN_TOL, herm,
                linalg.HERMITIAN_TOL,
            )
        )
        neg = max(0.0, -_min_eigenvalue(state))
        checks.append(CheckResult(f"state[{k}] psd", neg <= psd_tol, neg, psd_tol))
    mass = float(sum(np.trace(s).real for s in ensemble.states))
    deficit = abs(mass - 1.0)
    checks.append(CheckResult("total prior mass = 1", deficit <= trace_tol, deficit, trace_tol))
    return ValidationReport(checks=tuple(checks))


def validate_povm(
    povm: Povm,
    psd_tol: float = PSD_TOL,
    completeness_tol: float = COMPLETENESS_TOL,
) -> ValidationReport:
    """Check Hermiticity and positivity of every element plus completeness."""
    checks = []
    for k, element in enumerate(povm.elements):
        herm = linalg.hermiticity_defect(element)
        checks.append(
            CheckResult(
                f"element[{k}] hermitian", herm <= linalg.HERMITIAN_TOL, herm,
                linalg.HERMITIAN_TOL,
            )
        )
        neg = max(0.0, -_min_eigenvalue(element))
        checks.append(CheckResult(f"element[{k}] psd", neg <= psd_tol, neg, psd_tol))
    residual = linalg.operator_norm(povm.element_sum() - np.eye(povm.dim))
    checks.append(
        CheckResult("completeness", residual <= completeness_tol, residual, completeness_tol)
    )
    return ValidationReport(checks=tuple(checks))


def _check_pair(ensemble: Ensemble, povm: Povm) -> None:
    if ensemble.dim != povm.dim:
        raise DimensionError(
            f"ensemble dimension {ensemble.dim} != POVM dimension {povm.dim}"
        )
    if ensemble.n_states != povm.n_outcomes:
        raise DimensionError(
            f"{ensemble.n_states} states but {povm.n_outcomes} POVM outcomes"
        )


def lagrange_operator(ensemble: Ensemble, povm: Povm) -> np.ndarray:
    """Operator sum of measurement times state, sum_k M_k rho_k.

    Generally not Hermitian away from an optimum; its trace is the
    success probability.
    """
    _check_pair(ensemble, povm)
    total = np.zeros((ensemble.dim, ensemble.dim), dtype=np.complex128)
    for element, state in zip(povm.elements, ensemble.states):
        total = total + element @ state
    return total


def _trace_probability(operator: np.ndarray) -> float:
    # Tiny negative round-off is clamped to zero.
    value = float(np.trace(operator).real)
    return 0.0 if value < 0.0 else value


def success_probability(ensemble: Ensemble, povm: Povm) -> float:
    """Probability of a correct guess, Tr sum_k M_k rho_k."""
    return _trace_probability(lagrange_operator(ensemble, povm))


def uniform_povm(dim: int, n_outcomes: int) -> Povm:
    """The maximally uninformative measurement, M_k = identity / n_outcomes."""
    if dim < 1 or n_outcomes < 1:
        raise DimensionError("dim and n_outcomes must be positive")
    element = np.eye(dim, dtype=np.complex128) / n_outcomes
    return Povm(dim=dim, elements=[element.copy() for _ in range(n_outcomes)])


def square_root_measurement(ensemble: Ensemble) -> Povm:
    """Square-root (pretty-good) measurement of a prior-weighted ensemble.

    M_k = S^(-1/2) rho_k S^(-1/2) with S the state sum; the inverse square
    root is taken on the range of S, and the residual identity minus the
    element sum (the projector onto the kernel of S, up to round-off) is
    folded into the first element so completeness holds exactly.
    """
    total = np.zeros((ensemble.dim, ensemble.dim), dtype=np.complex128)
    for state in ensemble.states:
        total = total + state
    dec = linalg.eigh(total)
    cutoff = linalg.positive_cutoff(dec.eigenvalues)
    keep = dec.eigenvalues > cutoff
    vecs = dec.eigenvectors[:, keep]
    inv_sqrt = (vecs * dec.eigenvalues[keep] ** -0.5) @ vecs.conj().T
    inv_sqrt = (inv_sqrt + inv_sqrt.conj().T) / 2.0
    elements = [linalg.real_part(inv_sqrt @ state @ inv_sqrt) for state in ensemble.states]
    residual = np.eye(ensemble.dim, dtype=np.complex128)
    for element in elements:
        residual = residual - element
    elements[0] = elements[0] + residual
    return Povm(dim=ensemble.dim, elements=elements)


def shifted_basis_ensemble(n_states: int) -> Ensemble:
    """Equiprobable computational-basis states |k><k| / n on C^n."""
    if n_states < 2:
        raise DimensionError("need at least two states")
    states = []
    for k in range(n_states):
        state = np.zeros((n_states, n_states), dtype=np.complex128)
        state[k, k] = 1.0 / n_states
        states.append(state)
    labels = [f"basis_{k}" for k in range(n_states)]
    return Ensemble(dim=n_states, states=states, labels=labels)


def shifted_basis_povm(n_states: int) -> Povm:
    """The cyclically shifted projective measurement M_k = |k+1><k+1| (mod n).

    Paired with :func:`shifted_basis_ensemble` it always guesses wrong:
    the success probability is exactly zero while the optimum is one.
    """
    if n_states < 2:
        raise DimensionError("need at least two outcomes")
    elements = []
    for k in range(n_states):
        element = np.zeros((n_states, n_states), dtype=np.complex128)
        idx = (k + 1) % n_states
        element[idx, idx] = 1.0
        elements.append(element)
    return Povm(dim=n_states, elements=elements)
