"""numba twins of the numpy kernels; same signatures, same results."""

import numpy as np
from numba import njit


@njit(cache=True)
def gravity_accelerations(assign, mass_values, g, eps, rand, n_vms):
    s, c = assign.shape
    acc = np.zeros((s, n_vms, c))
    for m in range(s):
        mm = mass_values[m]
        if mm <= 0.0:
            continue
        for b in range(s):
            if b == m:
                continue
            ham = 0
            for i in range(c):
                if assign[m, i] != assign[b, i]:
                    ham += 1
            if ham == 0:
                continue
            coef = g * (mm * mass_values[b]) / (np.sqrt(2.0 * ham) + eps)
            for i in range(c):
                if assign[m, i] != assign[b, i]:
                    acc[m, assign[b, i], i] += coef * rand[m, b, 0, i]
                    acc[m, assign[m, i], i] -= coef * rand[m, b, 1, i]
        for j in range(n_vms):
            for i in range(c):
                acc[m, j, i] /= mm
    return acc


@njit(cache=True)
def _repair_3d(candidates, probs):
    s, v, c = probs.shape
    out = np.empty((s, c), dtype=np.int64)
    for m in range(s):
        for i in range(c):
            best_set, p_set = -1, -1.0
            best_any, p_any = 0, -1.0
            for j in range(v):
                p = probs[m, j, i]
                if p > p_any:
                    best_any, p_any = j, p
                if candidates[m, j, i] and p > p_set:
                    best_set, p_set = j, p
            out[m, i] = best_set if best_set >= 0 else best_any
    return out


def repair_onehot(candidates, probs):
    lead = probs.shape[:-2]
    v, c = probs.shape[-2:]
    out = _repair_3d(
        np.ascontiguousarray(candidates.reshape(-1, v, c)),
        np.ascontiguousarray(probs.reshape(-1, v, c), dtype=np.float64),
    )
    return out.reshape(lead + (c,))


@njit(cache=True)
def makespans(assign, lengths, capacities):
    s, c = assign.shape
    v = capacities.shape[0]
    out = np.zeros(s)
    work = np.empty(v)
    counts = np.empty(v)
    for m in range(s):
        work[:] = 0.0
        counts[:] = 0.0
        for i in range(c):
            work[assign[m, i]] += lengths[i]
            counts[assign[m, i]] += 1.0
        worst = 0.0
        for j in range(v):
            f = work[j] * counts[j] / capacities[j]
            if f > worst:
                worst = f
        out[m] = worst
    return out
