"""Spinor samples on a grid, optionally carrying their analytic derivatives."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, ParameterError
from .quadrature import quadrature

AXES = ("x", "y", "t")


@dataclass(frozen=True)
class SampledSpinor:
    """Components of shape ``(ncomp, *grid.shape)``.

    ``derivs`` maps an axis name to the analytic partial derivative of every
    component (same shape as ``components``). Residual evaluation prefers
    these and falls back to finite differences for the missing axes.
    ``convention`` records the kinetic operator the state was built for.
    """

    grid: object
    components: np.ndarray
    derivs: dict = field(default_factory=dict)
    convention: str = "pi"
    label: str = ""

    ncomp = 2

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=complex)
        if comps.shape != (self.ncomp,) + tuple(self.grid.shape):
            raise DimensionError(
                f"{type(self).__name__} expects shape {(self.ncomp,) + tuple(self.grid.shape)}, "
                f"got {comps.shape}")
        if not np.all(np.isfinite(comps)):
            raise ParameterError("spinor samples must be finite")
        derivs = {}
        for name, arr in dict(self.derivs).items():
            if name not in AXES:
                raise DimensionError(f"unknown derivative axis {name!r}")
            arr = np.asarray(arr, dtype=complex)
            if arr.shape != comps.shape:
                raise DimensionError(f"derivative along {name} has shape {arr.shape}")
            derivs[name] = arr
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "derivs", derivs)

    # -- derived quantities ------------------------------------------------
    def density(self):
        return np.sum(np.abs(self.components) ** 2, axis=0)

    def norm(self, over=None):
        """Quadrature L2 norm; ``over`` restricts the integrated axes."""
        val = quadrature(self.density(), self.grid, over=over)
        return np.sqrt(np.real(val))

    def inner(self, other):
        """``<self, other>`` by quadrature over the whole grid."""
        if other.grid != self.grid or other.ncomp != self.ncomp:
            raise DimensionError("inner product needs spinors on the same grid")
        return quadrature(np.sum(np.conj(self.components) * other.components, axis=0), self.grid)

    # -- transformations ---------------------------------------------------
    def scaled(self, c):
        return self._rebuild(self.components * c, {k: v * c for k, v in self.derivs.items()})

    def normalized(self):
        """Copy with unit quadrature norm over the whole grid."""
        nrm = float(self.norm())
        if nrm == 0.0:
            raise ParameterError("cannot normalize a vanishing spinor")
        return self.scaled(1.0 / nrm)

    def without_derivatives(self, *axes):
        axes = axes or AXES
        return self._rebuild(self.components, {k: v for k, v in self.derivs.items() if k not in axes})

    def _rebuild(self, comps, derivs):
        return type(self)(self.grid, comps, derivs, self.convention, self.label)


@dataclass(frozen=True)
class SampledBispinor(SampledSpinor):
    ncomp = 4
