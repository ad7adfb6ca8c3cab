"""Random smooth fields, pairs and perturbation blocks for property checks."""
from __future__ import annotations

import numpy as np

from .algebra import Potential2x2, ReductionParams, ScalarField
from .reduction import PerturbationBlock, ReducedPair


def random_field(rng, real=False, n_modes=3, scale=1.0):
    """Sum of a few random plane-wave-like modes in ``(x, y, t)``, bounded by ``~scale``."""
    k = rng.normal(size=(n_modes, 3)) * 0.6
    ph = rng.uniform(0.0, 2.0 * np.pi, size=n_modes)
    amp = rng.normal(size=n_modes) * scale / n_modes
    if not real:
        amp = amp + 1j * rng.normal(size=n_modes) * scale / n_modes
    offset = rng.normal() * scale * 0.5

    def fn(x, y, t):
        out = np.full(np.shape(x), offset, dtype=complex)
        for j in range(n_modes):
            arg = k[j, 0] * x + k[j, 1] * y + k[j, 2] * t + ph[j]
            out = out + amp[j] * (np.cos(arg) if real else np.exp(1j * arg))
        return out.real if real else out

    return ScalarField(fn, hermitian_entry=real, name="random")


def random_potential2x2(rng, scale=1.0):
    return Potential2x2(random_field(rng, True, scale=scale), random_field(rng, scale=scale),
                        random_field(rng, True, scale=scale))


def random_params(rng, tau_range=(0.0, 2.0 * np.pi), epsilon=None):
    eps = int(rng.choice([-1, 1])) if epsilon is None else epsilon
    return ReductionParams(rng.uniform(*tau_range), rng.uniform(0.0, 2.0 * np.pi), eps)


def random_pair(rng, params=None, scale=1.0):
    params = params if params is not None else random_params(rng)
    return ReducedPair(random_potential2x2(rng, scale), random_potential2x2(rng, scale), params)


def random_block(rng, scale=1.0):
    return PerturbationBlock(*(random_field(rng, scale=scale) for _ in range(4)))
