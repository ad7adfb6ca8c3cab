"""Trapezoidal quadrature on uniform grids with a fixed summation order."""
import numpy as np

from .. import kernels
from ..errors import DimensionError


def _trapezoid_last(f, h):
    lead = f.shape[:-1]
    flat = np.ascontiguousarray(f.reshape(-1, f.shape[-1]), dtype=complex)
    return kernels.trapezoid_rows(flat, float(h)).reshape(lead)


def quadrature(f, grid, over=None):
    """Integrate samples ``f`` (shape ``grid.shape``) over the named axes.

    ``over`` defaults to every axis of ``grid``. Axes are contracted last to
    first, each with a left-to-right sum, so results are reproducible bit for
    bit on a given backend. Returns a complex scalar, or an array over the
    axes that were not integrated.
    """
    f = np.asarray(f)
    if f.shape != grid.shape:
        raise DimensionError(f"samples of shape {f.shape} do not match grid {grid.shape}")
    names = [ax.axis for ax in grid.axes]
    over = names if over is None else list(over)
    for name in over:
        if name not in names:
            raise DimensionError(f"grid has no axis {name!r}")
    out = f.astype(complex)
    for k in reversed(range(len(names))):
        if names[k] in over:
            out = np.moveaxis(out, k, -1)
            out = _trapezoid_last(out, grid.axes[k].spacing)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def trapezoid_weights(grid1d):
    w = np.full(grid1d.n_points, grid1d.spacing)
    w[0] = w[-1] = 0.5 * grid1d.spacing
    return w
