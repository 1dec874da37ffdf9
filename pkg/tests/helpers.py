"""Shared random-instance generators for the test suite.

All generators are seeded through an explicit numpy Generator so every test
run is reproducible. POVMs are built by symmetric normalization of random
positive blocks, ensembles from Ginibre-sampled densities with Dirichlet
priors.
"""

import numpy as np

from povmopt import Ensemble, Povm


def ginibre(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng, dim, scale=1.0):
    g = ginibre(rng, dim, dim) * scale
    return (g + g.conj().T) / 2.0


def random_density(rng, dim, rank=None):
    g = ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return rho / float(np.trace(rho).real)


def random_ensemble(rng, dim, n_states, rank=None):
    priors = rng.dirichlet(np.ones(n_states))
    matrices = [random_density(rng, dim, rank) for _ in range(n_states)]
    return Ensemble.from_priors(matrices, priors)


def random_povm(rng, dim, n_outcomes):
    blocks = [ginibre(rng, dim, dim) for _ in range(n_outcomes)]
    mats = [b @ b.conj().T for b in blocks]
    total = sum(mats)
    vals, vecs = np.linalg.eigh((total + total.conj().T) / 2.0)
    inv_sqrt = (vecs * vals**-0.5) @ vecs.conj().T
    elements = []
    for mat in mats:
        element = inv_sqrt @ mat @ inv_sqrt
        elements.append((element + element.conj().T) / 2.0)
    return Povm(dim=dim, elements=elements)


def random_unitary(rng, dim):
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def conjugate_ensemble(ensemble, unitary):
    states = []
    for state in ensemble.states:
        rotated = unitary @ state @ unitary.conj().T
        states.append((rotated + rotated.conj().T) / 2.0)
    return Ensemble(dim=ensemble.dim, states=states, labels=ensemble.labels)


def conjugate_povm(povm, unitary):
    elements = []
    for element in povm.elements:
        rotated = unitary @ element @ unitary.conj().T
        elements.append((rotated + rotated.conj().T) / 2.0)
    return Povm(dim=povm.dim, elements=elements)


def trine_ensemble():
    """Three symmetric pure qubit states with equal priors; optimum is 2/3."""
    angles = [0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0]
    matrices = []
    for angle in angles:
        vec = np.array([np.cos(angle / 2.0), np.sin(angle / 2.0)], dtype=complex)
        matrices.append(np.outer(vec, vec.conj()))
    return Ensemble.from_priors(matrices, [1.0 / 3.0] * 3)


def orthogonal_ensemble(priors):
    """Diagonal states p_k |k><k| with the projective optimum |k><k|."""
    dim = len(priors)
    states = []
    elements = []
    for k, prior in enumerate(priors):
        state = np.zeros((dim, dim), dtype=complex)
        state[k, k] = prior
        states.append(state)
        element = np.zeros((dim, dim), dtype=complex)
        element[k, k] = 1.0
        elements.append(element)
    return Ensemble(dim=dim, states=states), Povm(dim=dim, elements=elements)
