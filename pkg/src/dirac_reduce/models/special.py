"""Jacobi polynomials and their derivatives."""
import numpy as np

from .. import kernels


def jacobi_polynomial(n, alpha, beta, z):
    """``P_n^{(alpha, beta)}(z)`` by the forward three-term recurrence.

    Scalar input gives a float, array input an array of the same shape.
    """
    n = int(n)
    if n < 0:
        raise ValueError("Jacobi degree must be nonnegative")
    arr = np.asarray(z, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    out = kernels.jacobi_values(n, float(alpha), float(beta), flat).reshape(arr.shape)
    return float(out) if np.ndim(z) == 0 else out


def jacobi_derivative(n, alpha, beta, z, order=1):
    """``d^k/dz^k P_n^{(alpha, beta)}`` from the shifted-parameter identity.

    ``d/dz P_n^{(a,b)} = (n + a + b + 1)/2 * P_{n-1}^{(a+1, b+1)}``, applied ``order`` times.
    """
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    if order > n:
        return 0.0 if np.ndim(z) == 0 else np.zeros(np.shape(z))
    coef = 1.0
    for j in range(order):
        coef *= 0.5 * (n + alpha + beta + 1.0 + j)
    return coef * jacobi_polynomial(n - order, alpha + order, beta + order, z)
