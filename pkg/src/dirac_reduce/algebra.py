"""Matrix-valued fields and the constant unitaries of the reduction scheme.

Component ordering follows the 4x4 Dirac problem throughout: indices 0, 1
belong to the first 2-spinor block, 2, 3 to the second.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Number
from typing import Callable

import numpy as np

from .errors import ParameterError

HERMITIAN_TOL = 1e-12


def _broadcast(x, y, t):
    x, y, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float),
                                  np.asarray(t, dtype=float))
    return x, y, t


@dataclass(frozen=True)
class ScalarField:
    """A complex function of ``(x, y, t)`` evaluated elementwise on arrays.

    ``hermitian_entry`` marks fields that must be real (diagonal entries and
    the real couplings of the fixed-form potential). Fields compose with
    ``+``, ``-``, ``*`` and :meth:`conj`, so printed entry formulas can be
    written directly in terms of other fields.
    """

    fn: Callable
    hermitian_entry: bool = False
    name: str = ""

    def __call__(self, x, y=0.0, t=0.0):
        x, y, t = _broadcast(x, y, t)
        val = np.asarray(self.fn(x, y, t), dtype=complex)
        if val.shape != x.shape:
            val = np.broadcast_to(val, x.shape).copy()
        return val

    # -- construction helpers --------------------------------------------
    @classmethod
    def constant(cls, value, name=""):
        value = complex(value)
        return cls(lambda x, y, t: np.full(np.shape(x), value),
                   hermitian_entry=value.imag == 0.0, name=name or repr(value))

    @classmethod
    def zero(cls):
        return cls.constant(0.0, name="0")

    # -- algebra ---------------------------------------------------------
    def conj(self):
        f = self.fn
        return ScalarField(lambda x, y, t: np.conj(f(x, y, t)), self.hermitian_entry,
                           f"conj({self.name})")

    def real(self):
        f = self.fn
        return ScalarField(lambda x, y, t: np.real(f(x, y, t)), True, f"Re({self.name})")

    def imag(self):
        f = self.fn
        return ScalarField(lambda x, y, t: np.imag(f(x, y, t)), True, f"Im({self.name})")

    def __neg__(self):
        f = self.fn
        return ScalarField(lambda x, y, t: -f(x, y, t), self.hermitian_entry, f"-{self.name}")

    def __add__(self, other):
        other = as_field(other)
        f, g = self.fn, other.fn
        return ScalarField(lambda x, y, t: f(x, y, t) + g(x, y, t),
                           self.hermitian_entry and other.hermitian_entry)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-as_field(other))

    def __rsub__(self, other):
        return as_field(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, Number):
            c = complex(other)
            f = self.fn
            return ScalarField(lambda x, y, t: c * f(x, y, t),
                               self.hermitian_entry and c.imag == 0.0)
        other = as_field(other)
        f, g = self.fn, other.fn
        return ScalarField(lambda x, y, t: f(x, y, t) * g(x, y, t),
                           self.hermitian_entry and other.hermitian_entry)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Number):
            raise TypeError("fields divide by scalars only")
        return self * (1.0 / other)

    def max_imag(self, x, y=0.0, t=0.0):
        return float(np.max(np.abs(np.imag(self(x, y, t))), initial=0.0))


def as_field(value, hermitian_entry=None):
    """Coerce a number, callable or :class:`ScalarField` to a field."""
    if isinstance(value, ScalarField):
        if hermitian_entry and not value.hermitian_entry:
            return ScalarField(value.fn, True, value.name)
        return value
    if isinstance(value, Number):
        return ScalarField.constant(value)
    if callable(value):
        return ScalarField(value, bool(hermitian_entry))
    raise TypeError(f"cannot build a ScalarField from {type(value).__name__}")


@dataclass(frozen=True)
class Potential2x2:
    """Hermitian 2x2 potential ``[[a, b], [conj(b), d]]``."""

    a: ScalarField
    b: ScalarField
    d: ScalarField

    def __post_init__(self):
        object.__setattr__(self, "a", as_field(self.a, hermitian_entry=True))
        object.__setattr__(self, "b", as_field(self.b))
        object.__setattr__(self, "d", as_field(self.d, hermitian_entry=True))

    def matrix(self, x, y=0.0, t=0.0):
        a = self.a(x, y, t)
        b = self.b(x, y, t)
        d = self.d(x, y, t)
        out = np.empty(a.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = a
        out[..., 0, 1] = b
        out[..., 1, 0] = np.conj(b)
        out[..., 1, 1] = d
        return out

    def diagonal_defect(self, x, y=0.0, t=0.0):
        """Largest imaginary part of a diagonal entry over the sample points."""
        return max(self.a.max_imag(x, y, t), self.d.max_imag(x, y, t))

    def __add__(self, other):
        return Potential2x2(self.a + other.a, self.b + other.b, self.d + other.d)

    def scaled(self, c):
        c = float(c)
        return Potential2x2(self.a * c, self.b * c, self.d * c)


@dataclass(frozen=True)
class Potential4x4:
    """4x4 matrix of scalar fields, stored row-major as a 16-tuple."""

    entries: tuple

    def __post_init__(self):
        flat = tuple(np.ravel(np.array(self.entries, dtype=object)))
        if len(flat) != 16:
            raise ParameterError("Potential4x4 needs exactly 16 entries")
        object.__setattr__(self, "entries", tuple(as_field(e) for e in flat))

    def entry(self, i, j):
        """Entry at zero-based row ``i`` and column ``j``."""
        return self.entries[4 * i + j]

    def matrix(self, x, y=0.0, t=0.0):
        vals = [e(x, y, t) for e in self.entries]
        shape = vals[0].shape
        out = np.empty(shape + (16,), dtype=complex)
        for k, v in enumerate(vals):
            out[..., k] = v
        return out.reshape(shape + (4, 4))

    def hermiticity_defect(self, x, y=0.0, t=0.0):
        m = self.matrix(x, y, t)
        return float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))), initial=0.0))

    def is_hermitian(self, x, y=0.0, t=0.0, tol=HERMITIAN_TOL):
        return self.hermiticity_defect(x, y, t) < tol

    @classmethod
    def from_function(cls, fn):
        """Wrap ``fn(x, y, t) -> (..., 4, 4)`` as sixteen entry fields."""
        def pick(i, j):
            return ScalarField(lambda x, y, t: fn(x, y, t)[..., i, j])
        return cls(tuple(pick(i, j) for i in range(4) for j in range(4)))


@dataclass(frozen=True)
class ReductionParams:
    """Mixing angle ``tau``, phase ``phi`` (radians) and swap sign ``epsilon``."""

    tau: float
    phi: float
    epsilon: int = 1

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ParameterError(f"epsilon must be +1 or -1, got {self.epsilon!r}")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "epsilon", int(self.epsilon))


def mixer_matrix(tau, phi=None):
    """The 2x2 unitary ``[[cos t, -e^{-i phi} sin t], [e^{i phi} sin t, cos t]]``.

    Accepts either ``(tau, phi)`` or a single :class:`ReductionParams`.
    """
    if isinstance(tau, ReductionParams):
        tau, phi = tau.tau, tau.phi
    c, s = np.cos(tau), np.sin(tau)
    return np.array([[c, -np.exp(-1j * phi) * s],
                     [np.exp(1j * phi) * s, c]], dtype=complex)


def swap_matrix(epsilon):
    """Exchange of components 3 and 4 with sign ``epsilon`` on entry (3, 4)."""
    if isinstance(epsilon, ReductionParams):
        epsilon = epsilon.epsilon
    if epsilon not in (1, -1):
        raise ParameterError(f"epsilon must be +1 or -1, got {epsilon!r}")
    r = np.zeros((4, 4))
    r[0, 0] = r[1, 1] = 1.0
    r[2, 3] = float(epsilon)
    r[3, 2] = 1.0
    return r


def total_transform(params):
    """``swap_matrix(eps) @ kron(mixer, I2)``, the map from the decoupled to the coupled system."""
    return swap_matrix(params.epsilon) @ np.kron(mixer_matrix(params), np.eye(2))


def unitarity_defect(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def blockdiag(m1, m2):
    """Stack two ``(..., 2, 2)`` arrays into ``(..., 4, 4)`` block-diagonal form."""
    shape = np.broadcast_shapes(m1.shape, m2.shape)
    out = np.zeros(shape[:-2] + (4, 4), dtype=complex)
    out[..., :2, :2] = m1
    out[..., 2:, 2:] = m2
    return out
