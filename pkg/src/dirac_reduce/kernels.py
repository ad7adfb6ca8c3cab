"""Hot numerical kernels, each in a numba and a numpy flavour.

The public names at the bottom of the module dispatch on
:data:`dirac_reduce._accel.BACKEND`. Both flavours are importable directly
(``*_nb`` / ``*_np``) so the benchmark and the backend-agreement tests can
compare them in one process.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

# --------------------------------------------------------------------------
# Jacobi polynomials, forward three-term recurrence in n
# --------------------------------------------------------------------------


@njit
def _jacobi_nb(n, alpha, beta, z):
    out = np.empty(z.shape[0])
    ab = alpha + beta
    for i in range(z.shape[0]):
        x = z[i]
        p0 = 1.0
        if n == 0:
            out[i] = p0
            continue
        p1 = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) * 0.5
        for k in range(2, n + 1):
            c = 2.0 * k + ab
            a1 = 2.0 * k * (k + ab) * (c - 2.0)
            a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta)
            a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
            p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
        out[i] = p1
    return out


def _jacobi_np(n, alpha, beta, z):
    ab = alpha + beta
    p0 = np.ones_like(z)
    if n == 0:
        return p0
    p1 = (alpha + 1.0) + (ab + 2.0) * (z - 1.0) * 0.5
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (c * (c - 2.0) * z + alpha * alpha - beta * beta)
        a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
    return p1


# --------------------------------------------------------------------------
# Trapezoid rule along the last axis, fixed left-to-right summation
# --------------------------------------------------------------------------


@njit
def _trapezoid_nb(f, h):
    rows, n = f.shape
    out = np.empty(rows, dtype=np.complex128)
    for r in range(rows):
        acc = 0.5 * f[r, 0]
        for j in range(1, n - 1):
            acc += f[r, j]
        acc += 0.5 * f[r, n - 1]
        out[r] = acc * h
    return out


def _trapezoid_np(f, h):
    terms = np.concatenate([0.5 * f[:, :1], f[:, 1:-1], 0.5 * f[:, -1:]], axis=1)
    # cumsum accumulates left to right, matching the compiled loop term for term
    return np.cumsum(terms, axis=1)[:, -1] * h


# --------------------------------------------------------------------------
# Pointwise conjugation  T M_p T^dagger  and pointwise matrix-vector products
# --------------------------------------------------------------------------


@njit
def _conjugate_nb(t, m):
    npts, k, _ = m.shape
    out = np.empty_like(m)
    tmp = np.empty((k, k), dtype=np.complex128)
    for p in range(npts):
        for i in range(k):
            for j in range(k):
                acc = 0j
                for l in range(k):
                    acc += t[i, l] * m[p, l, j]
                tmp[i, j] = acc
        for i in range(k):
            for j in range(k):
                acc = 0j
                for l in range(k):
                    acc += tmp[i, l] * np.conj(t[j, l])
                out[p, i, j] = acc
    return out


def _conjugate_np(t, m):
    return np.matmul(np.matmul(t, m), t.conj().T)


@njit
def _apply_nb(m, v):
    npts, k, _ = m.shape
    out = np.empty((npts, k), dtype=np.complex128)
    for p in range(npts):
        for i in range(k):
            acc = 0j
            for j in range(k):
                acc += m[p, i, j] * v[p, j]
            out[p, i] = acc
    return out


def _apply_np(m, v):
    return np.einsum("pij,pj->pi", m, v)


# --------------------------------------------------------------------------
# Finite-difference band assembly for  H = [[a, A], [A^dagger, d]],
# A = -i d/dx + w,  interleaved ordering (u_0, l_0, u_1, l_1, ...)
# --------------------------------------------------------------------------


@njit
def _staggered_coo_nb(a, d, w, h):
    # upper on x_j, lower on x_j + h/2; A l at x_j uses l_j and l_{j-1}
    n = a.shape[0]
    nnz = 2 * n + 2 * (2 * n - 1)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.complex128)
    k = 0
    for j in range(n):
        rows[k] = 2 * j
        cols[k] = 2 * j
        vals[k] = a[j]
        k += 1
        rows[k] = 2 * j + 1
        cols[k] = 2 * j + 1
        vals[k] = d[j]
        k += 1
    for j in range(n):
        v = -1j / h + 0.5 * w[j]
        rows[k] = 2 * j
        cols[k] = 2 * j + 1
        vals[k] = v
        k += 1
        rows[k] = 2 * j + 1
        cols[k] = 2 * j
        vals[k] = np.conj(v)
        k += 1
        if j > 0:
            v = 1j / h + 0.5 * w[j]
            rows[k] = 2 * j
            cols[k] = 2 * j - 1
            vals[k] = v
            k += 1
            rows[k] = 2 * j - 1
            cols[k] = 2 * j
            vals[k] = np.conj(v)
            k += 1
    return rows, cols, vals


def _staggered_coo_np(a, d, w, h):
    n = a.shape[0]
    j = np.arange(n)
    up, lo = 2 * j, 2 * j + 1
    v0 = -1j / h + 0.5 * w
    v1 = 1j / h + 0.5 * w[1:]
    rows = np.concatenate([up, lo, up, lo, up[1:], lo[:-1]])
    cols = np.concatenate([up, lo, lo, up, lo[:-1], up[1:]])
    vals = np.concatenate([a.astype(complex), d.astype(complex), v0, v0.conj(), v1, v1.conj()])
    return rows, cols, vals


@njit
def _central_coo_nb(a, d, w, h, r):
    # both components on x_j; optional Wilson term r/(2h) (2 - shift_+ - shift_-) sigma_3
    n = a.shape[0]
    nnz = 2 * n + 2 * n + 4 * (n - 1) + 4 * (n - 1)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.complex128)
    k = 0
    wil = r / h
    for j in range(n):
        rows[k] = 2 * j
        cols[k] = 2 * j
        vals[k] = a[j] + wil
        k += 1
        rows[k] = 2 * j + 1
        cols[k] = 2 * j + 1
        vals[k] = d[j] - wil
        k += 1
        rows[k] = 2 * j
        cols[k] = 2 * j + 1
        vals[k] = w[j]
        k += 1
        rows[k] = 2 * j + 1
        cols[k] = 2 * j
        vals[k] = np.conj(w[j])
        k += 1
    for j in range(n - 1):
        # -i d/dx couples u_j <-> l_{j+1} and l_j <-> u_{j+1}
        v = -0.5j / h
        for (p, q) in ((2 * j, 2 * (j + 1) + 1), (2 * j + 1, 2 * (j + 1))):
            rows[k] = p
            cols[k] = q
            vals[k] = v
            k += 1
            rows[k] = q
            cols[k] = p
            vals[k] = np.conj(v)
            k += 1
        for (p, q, s) in ((2 * j, 2 * (j + 1), 1.0), (2 * j + 1, 2 * (j + 1) + 1, -1.0)):
            rows[k] = p
            cols[k] = q
            vals[k] = -0.5 * wil * s
            k += 1
            rows[k] = q
            cols[k] = p
            vals[k] = -0.5 * wil * s
            k += 1
    return rows, cols, vals


def _central_coo_np(a, d, w, h, r):
    n = a.shape[0]
    j = np.arange(n)
    jj = np.arange(n - 1)
    up, lo = 2 * j, 2 * j + 1
    wil = r / h
    v = np.full(n - 1, -0.5j / h)
    hop = np.full(n - 1, -0.5 * wil + 0j)
    rows = np.concatenate([
        up, lo, up, lo,
        2 * jj, 2 * (jj + 1) + 1, 2 * jj + 1, 2 * (jj + 1),
        2 * jj, 2 * (jj + 1), 2 * jj + 1, 2 * (jj + 1) + 1,
    ])
    cols = np.concatenate([
        up, lo, lo, up,
        2 * (jj + 1) + 1, 2 * jj, 2 * (jj + 1), 2 * jj + 1,
        2 * (jj + 1), 2 * jj, 2 * (jj + 1) + 1, 2 * jj + 1,
    ])
    vals = np.concatenate([
        a + wil + 0j, d - wil + 0j, w.astype(complex), np.conj(w),
        v, v.conj(), v, v.conj(),
        hop, hop, -hop, -hop,
    ])
    return rows, cols, vals


if USE_NUMBA:
    jacobi_values = _jacobi_nb
    trapezoid_rows = _trapezoid_nb
    conjugate_pointwise = _conjugate_nb
    apply_pointwise = _apply_nb
    staggered_coo = _staggered_coo_nb
    central_coo = _central_coo_nb
else:
    jacobi_values = _jacobi_np
    trapezoid_rows = _trapezoid_np
    conjugate_pointwise = _conjugate_np
    apply_pointwise = _apply_np
    staggered_coo = _staggered_coo_np
    central_coo = _central_coo_np

NUMBA_KERNELS = {
    "jacobi": _jacobi_nb,
    "trapezoid": _trapezoid_nb,
    "conjugate": _conjugate_nb,
    "apply": _apply_nb,
    "staggered": _staggered_coo_nb,
    "central": _central_coo_nb,
}
NUMPY_KERNELS = {
    "jacobi": _jacobi_np,
    "trapezoid": _trapezoid_np,
    "conjugate": _conjugate_np,
    "apply": _apply_np,
    "staggered": _staggered_coo_np,
    "central": _central_coo_np,
}
