"""Pure-numpy kernels.  Reference path, and the fallback when numba is off."""

import numpy as np


def gravity_accelerations(assign, mass_values, g, eps, rand, n_vms):
    """Accelerations of every mass under pairwise gravitational attraction.

    ``assign`` is ``(s, c)`` VM row indices of one-hot position matrices.
    Two masses differ only in columns where their assignments differ, and in
    such a column exactly two elements differ: ``+1`` at the other mass's row
    and ``-1`` at this mass's row.  ``rand[m, b, 0, i]`` weights the former,
    ``rand[m, b, 1, i]`` the latter.
    """
    s, c = assign.shape
    differ = assign[:, None, :] != assign[None, :, :]
    dist = np.sqrt(2.0 * differ.sum(axis=2))
    coef = g * np.outer(mass_values, mass_values) / (dist + eps)
    np.fill_diagonal(coef, 0.0)
    weight = coef[:, :, None] * differ
    pull = weight * rand[:, :, 0, :]
    push = (weight * rand[:, :, 1, :]).sum(axis=1)

    onehot = (assign[:, None, :] == np.arange(n_vms)[None, :, None]).astype(np.float64)
    force = np.einsum("bji,mbi->mji", onehot, pull)
    force -= onehot * push[:, None, :]

    acc = np.zeros((s, n_vms, c))
    live = mass_values > 0
    acc[live] = force[live] / mass_values[live, None, None]
    return acc


def repair_onehot(candidates, probs):
    """Pick one VM per column; returns ``(..., c)`` row indices.

    Among set candidate bits the most probable wins; an empty column takes
    the most probable row overall.  ``argmax`` resolves ties to the lowest row.
    """
    count = candidates.sum(axis=-2)
    among_set = np.where(candidates, probs, -1.0).argmax(axis=-2)
    overall = probs.argmax(axis=-2)
    return np.where(count == 0, overall, among_set).astype(np.int64)


def makespans(assign, lengths, capacities):
    s, c = assign.shape
    v = len(capacities)
    if c == 0:
        return np.zeros(s)
    onehot = (assign[:, None, :] == np.arange(v)[None, :, None]).astype(np.float64)
    work = onehot @ lengths
    counts = onehot.sum(axis=2)
    return (work * counts / capacities).max(axis=1)
