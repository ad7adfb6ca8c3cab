"""Observed order of accuracy from a refinement chain."""
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

FLOOR = 1e-12


@dataclass(frozen=True)
class ConvergenceResult:
    order: float | None
    spacings: tuple
    errors: tuple
    status: str  # "ok" or "floor"


def observed_order(spacings, errors, floor=FLOOR):
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    spacings = np.asarray(spacings, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(spacings) < 3:
        raise ParameterError("convergence order needs at least 3 grids")
    if np.max(errors) < floor:
        return ConvergenceResult(None, tuple(spacings), tuple(errors), "floor")
    slope = np.polyfit(np.log(spacings), np.log(errors), 1)[0]
    return ConvergenceResult(float(slope), tuple(spacings), tuple(errors), "ok")


def convergence_order(op_under_test, grids, floor=FLOOR):
    """Run ``op_under_test(grid) -> error`` on each grid and fit the order.

    Spacing is taken from the first axis of every grid.
    """
    grids = list(grids)
    if len(grids) < 3:
        raise ParameterError("convergence order needs at least 3 grids")
    errors = [float(op_under_test(g)) for g in grids]
    spacings = [g.axes[0].spacing for g in grids]
    return observed_order(spacings, errors, floor)
