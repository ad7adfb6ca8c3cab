"""Arithmetic expressions over ``x, y, t`` for fields given in config files.

Only numbers, the names ``x``, ``y``, ``t``, ``pi``, ``i`` and a fixed set of
numpy functions are accepted; anything else is a parse error.
"""
import ast

import numpy as np

from ..algebra import ScalarField
from ..errors import ConfigError

FUNCTIONS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "sinh": np.sinh, "cosh": np.cosh,
    "tanh": np.tanh, "exp": np.exp, "log": np.log, "sqrt": np.sqrt, "abs": np.abs,
    "conj": np.conj, "real": np.real, "imag": np.imag, "arctan": np.arctan,
}
CONSTANTS = {"pi": np.pi, "i": 1j, "j": 1j}
VARIABLES = ("x", "y", "t")

_BINOPS = {
    ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
    ast.Div: np.divide, ast.Pow: np.power,
}


def _build(node, text):
    if isinstance(node, ast.Expression):
        return _build(node.body, text)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) \
            and not isinstance(node.value, bool):
        v = node.value
        return lambda env: v
    if isinstance(node, ast.Name):
        if node.id in VARIABLES:
            name = node.id
            return lambda env: env[name]
        if node.id in CONSTANTS:
            v = CONSTANTS[node.id]
            return lambda env: v
        raise ConfigError(f"unknown name {node.id!r} in expression {text!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        a, b = _build(node.left, text), _build(node.right, text)
        return lambda env: op(a(env), b(env))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        a = _build(node.operand, text)
        if isinstance(node.op, ast.USub):
            return lambda env: -a(env)
        return a
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        fn = FUNCTIONS.get(node.func.id)
        if fn is None:
            raise ConfigError(f"unknown function {node.func.id!r} in expression {text!r}")
        args = [_build(a, text) for a in node.args]
        return lambda env: fn(*(a(env) for a in args))
    raise ConfigError(f"unsupported syntax in expression {text!r}")


def compile_expression(text):
    """``text`` -> function of ``(x, y, t)``."""
    if isinstance(text, (int, float, complex)) and not isinstance(text, bool):
        v = text
        return lambda x, y, t: v
    if not isinstance(text, str):
        raise ConfigError(f"expected a number or an expression string, got {text!r}")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from None
    f = _build(tree, text)
    return lambda x, y, t: f({"x": x, "y": y, "t": t})


def field_from_expression(text, real=False):
    fn = compile_expression(text)
    if real:
        return ScalarField(lambda x, y, t: np.real(fn(x, y, t)), hermitian_entry=True, name=str(text))
    return ScalarField(fn, name=str(text))


def number(value, what="value"):
    """A real constant, given as a number or a constant expression like ``sqrt(3)/2``."""
    if isinstance(value, bool):
        raise ConfigError(f"{what} must be a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    with np.errstate(invalid="ignore"):
        v = complex(np.asarray(compile_expression(value)(np.nan, np.nan, np.nan)))
    if not np.isfinite(v):
        raise ConfigError(f"{what} must be a finite constant, got {value!r}")
    if v.imag != 0.0:
        raise ConfigError(f"{what} must be real, got {value!r}")
    return v.real
