"""Finite-difference matrices for 1D reduced Dirac operators and their in-gap spectra.

The operator is ``H = [[a, A], [A^dagger, d]]`` with ``A = -i d/dx + w(x)``;
``w`` absorbs the off-diagonal potential and the transverse momentum. Rows
are interleaved ``(u_0, l_0, u_1, l_1, ...)`` so every scheme is banded.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from .. import kernels
from ..errors import NumericError, ParameterError
from .grid import Grid1D, MIN_POINTS

SCHEMES = ("staggered", "central", "wilson")
DENSE_LIMIT = 8192


@dataclass(frozen=True)
class DiscreteOperator:
    matrix: scipy.sparse.csr_matrix
    scheme: str
    grid: Grid1D
    upper_x: np.ndarray
    lower_x: np.ndarray
    bandwidth: int

    @property
    def dim(self):
        return self.matrix.shape[0]

    def dense(self):
        return self.matrix.toarray()

    def hermiticity_defect(self):
        diff = self.matrix - self.matrix.conj().T
        return float(np.max(np.abs(diff.data), initial=0.0))

    def split(self, vec):
        """Interleaved vector -> (upper, lower) component arrays."""
        return vec[0::2], vec[1::2]

    def banded_lower(self):
        """LAPACK lower band storage ``ab[k, j] = H[j + k, j]``."""
        coo = self.matrix.tocoo()
        keep = coo.row >= coo.col
        ab = np.zeros((self.bandwidth + 1, self.dim), dtype=complex)
        ab[coo.row[keep] - coo.col[keep], coo.col[keep]] = coo.data[keep]
        return ab


def _off_diagonal_w(V, x, k_y, convention):
    b = V.b(x, 0.0, 0.0)
    # y-derivative of e^{i k_y y} inside the upper-right kinetic entry
    if convention == "pi":
        return b - 1j * k_y
    if convention == "pi_dagger":
        return b + 1j * k_y
    raise ParameterError(f"discretization supports conventions 'pi' and 'pi_dagger', not {convention!r}")


def discretize_1d(V, grid, scheme="staggered", k_y=0.0, convention="pi", wilson_r=1.0):
    """Banded Hermitian matrix of the reduced operator restricted to ``x``.

    ``staggered`` places the upper component on the grid points and the
    lower one half a cell to the right, which keeps a single Dirac cone.
    ``central`` uses collocated second-order differences and therefore
    carries the doubled branch; ``wilson`` adds ``r h/2 (-d^2) sigma_3`` to
    gap it out. Dirichlet truncation at both ends.
    """
    if scheme not in SCHEMES:
        raise ParameterError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if grid.n_points < MIN_POINTS:
        raise ParameterError(f"grid too coarse: n_points={grid.n_points} < {MIN_POINTS}")
    x = grid.points
    h = grid.spacing
    if scheme == "staggered":
        xl = x + 0.5 * h
        a = np.real(V.a(x, 0.0, 0.0))
        d = np.real(V.d(xl, 0.0, 0.0))
        w = _off_diagonal_w(V, x, k_y, convention)
        rows, cols, vals = kernels.staggered_coo(a, d, np.ascontiguousarray(w), h)
        bandwidth = 1
    else:
        xl = x
        a = np.real(V.a(x, 0.0, 0.0))
        d = np.real(V.d(x, 0.0, 0.0))
        w = _off_diagonal_w(V, x, k_y, convention)
        r = wilson_r if scheme == "wilson" else 0.0
        rows, cols, vals = kernels.central_coo(a, d, np.ascontiguousarray(w), h, float(r))
        bandwidth = 3
    n = 2 * grid.n_points
    mat = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    return DiscreteOperator(mat, scheme, grid, x, xl, bandwidth)


def participation_ratio(vec):
    p = np.abs(vec) ** 2
    return float(np.sum(p) ** 2 / np.sum(p ** 2))


@dataclass
class GapStates:
    """Eigenpairs inside an energy window, after localization filtering."""

    energies: np.ndarray
    vectors: list
    participation: np.ndarray
    n_filtered: int
    rejected_energies: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __iter__(self):
        return iter(zip(self.energies, self.vectors))

    def __len__(self):
        return len(self.energies)


def _tridiagonal_in_window(ab, lo, hi):
    """Eigenpairs of a Hermitian tridiagonal matrix with energy in ``(lo, hi]``.

    A diagonal phase similarity makes the subdiagonal real and nonnegative,
    so the real symmetric solver applies; memory stays linear in the
    dimension, unlike the general banded driver.
    """
    diag, sub = ab[0].real, ab[1, :-1]
    mag = np.abs(sub)
    step = np.ones(len(sub), dtype=complex)
    nz = mag > 0.0
    step[nz] = sub[nz] / mag[nz]
    phase = np.concatenate([[1.0 + 0.0j], np.cumprod(step)])
    w, v = scipy.linalg.eigh_tridiagonal(diag, mag, select="v", select_range=(lo, hi),
                                         check_finite=False)
    return w, phase[:, None] * v


def eigen_in_gap(op, window, method="auto", pr_threshold=0.5):
    """All eigenpairs with energy in ``window``, sorted by energy.

    States whose participation ratio is at least ``pr_threshold * n_points``
    are treated as extended box states and dropped; their number is
    reported in ``n_filtered``. ``method`` is ``"banded"``, ``"dense"`` or
    ``"auto"`` (banded storage whenever the operator is banded).
    """
    lo, hi = map(float, window)
    if not lo < hi:
        raise ParameterError(f"empty energy window {window!r}")
    if method == "auto":
        method = "banded"
    try:
        if method == "banded" and op.bandwidth == 1:
            w, v = _tridiagonal_in_window(op.banded_lower(), lo, hi)
        elif method == "banded":
            w, v = scipy.linalg.eig_banded(op.banded_lower(), lower=True, select="v",
                                           select_range=(lo, hi), check_finite=False)
        elif method == "dense":
            if op.dim > DENSE_LIMIT:
                raise ParameterError(f"dense eigensolve limited to dimension {DENSE_LIMIT}")
            w, v = scipy.linalg.eigh(op.dense(), subset_by_value=(lo, hi), driver="evr")
        else:
            raise ParameterError(f"unknown eigensolver method {method!r}")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericError(f"eigensolver failed on a {op.dim}x{op.dim} {op.scheme} "
                           f"operator in window ({lo}, {hi}): {exc}") from exc
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    limit = pr_threshold * op.grid.n_points
    keep_e, keep_v, keep_pr, rejected = [], [], [], []
    for k in range(len(w)):
        pr = participation_ratio(v[:, k])
        if pr < limit:
            keep_e.append(w[k])
            keep_v.append(op.split(v[:, k]))
            keep_pr.append(pr)
        else:
            rejected.append(w[k])
    return GapStates(np.array(keep_e), keep_v, np.array(keep_pr), len(rejected), np.array(rejected))
