"""Integer polynomials in the fixed parameter set ``k, l, eps, kp``.

``eps`` ranges over {0, 1}, so every power ``eps**e`` with ``e >= 1`` is
rewritten to ``eps`` on construction.

>>> k, l = Poly.var("k"), Poly.var("l")
>>> str(k * (l + 1))
'k*l + k'
>>> (k * (l + 1)).mod(2) == (3 * k * l + k).mod(2)
True
"""

from __future__ import annotations

import ast
from typing import Iterable, Mapping

VARS = ("k", "l", "eps", "kp")
BINARY_VARS = frozenset({"eps"})
_INDEX = {v: i for i, v in enumerate(VARS)}
_ZERO_EXP = (0,) * len(VARS)


class NonIntegralError(ArithmeticError):
    """Raised when an exact division leaves a non-integer coefficient."""


def _normalize_exp(exp: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(
        min(e, 1) if VARS[i] in BINARY_VARS else e for i, e in enumerate(exp)
    )


def _order_key(exp: tuple[int, ...]):
    # graded, then lexicographic in VARS order, highest first
    return (-sum(exp), tuple(-e for e in exp))


class Poly:
    """Immutable polynomial with integer coefficients.

    Terms are stored as a tuple of ``(exponent_vector, coefficient)`` pairs in
    a fixed graded order with no zero coefficients, so structural equality is
    polynomial equality.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], int] | Iterable = ()):
        acc: dict[tuple[int, ...], int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exp, c in items:
            if len(exp) != len(VARS):
                raise ValueError(f"exponent vector {exp!r} has wrong length")
            exp = _normalize_exp(tuple(exp))
            acc[exp] = acc.get(exp, 0) + int(c)
        self.terms = tuple(
            sorted(((e, c) for e, c in acc.items() if c), key=lambda t: _order_key(t[0]))
        )
        self._hash = hash(self.terms)

    # construction ---------------------------------------------------------

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({_ZERO_EXP: c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        exp = [0] * len(VARS)
        exp[_INDEX[name]] = 1
        return cls({tuple(exp): 1})

    @classmethod
    def coerce(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a coefficient")
        if isinstance(x, int):
            return cls.const(x)
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Poly")

    @classmethod
    def parse(cls, text: str) -> "Poly":
        """Parse ``+ - *`` and ``**`` expressions over integers and VARS."""
        return _eval_ast(ast.parse(text.strip(), mode="eval").body)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "Poly":
        other = Poly.coerce(other)
        return Poly(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([(e, -c) for e, c in self.terms])

    def __sub__(self, other) -> "Poly":
        return self + (-Poly.coerce(other))

    def __rsub__(self, other) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = Poly.coerce(other)
        out = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        for _ in range(n):
            result = result * self
        return result

    def exact_div(self, d: int) -> "Poly":
        out = []
        for e, c in self.terms:
            if c % d:
                raise NonIntegralError(f"{self} is not divisible by {d}")
            out.append((e, c // d))
        return Poly(out)

    def binom2(self) -> "Poly":
        """``self * (self - 1) / 2`` as an integer-coefficient polynomial."""
        return (self * (self - 1)).exact_div(2)

    def mod(self, n: int) -> "Poly":
        """Reduce every coefficient into ``[0, n)``; ``n == 0`` is a no-op."""
        if n == 0:
            return self
        return Poly([(e, c % n) for e, c in self.terms])

    # inspection -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(e == _ZERO_EXP for e, _ in self.terms)

    def constant(self) -> int:
        for e, c in self.terms:
            if e == _ZERO_EXP:
                return c
        return 0

    def variables(self) -> tuple[str, ...]:
        used = {i for e, _ in self.terms for i, x in enumerate(e) if x}
        return tuple(VARS[i] for i in sorted(used))

    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        i = _INDEX[name]
        return max((e[i] for e, _ in self.terms), default=0)

    def max_abs_coeff(self) -> int:
        return max((abs(c) for _, c in self.terms), default=0)

    def __call__(self, values: Mapping[str, int] | None = None, **kw) -> int:
        return self.evaluate({**(values or {}), **kw})

    def evaluate(self, values: Mapping[str, int]) -> int:
        total = 0
        for e, c in self.terms:
            term = c
            for i, x in enumerate(e):
                if x:
                    term *= values[VARS[i]] ** x
            total += term
        return total

    def subs(self, values: Mapping[str, "Poly | int"]) -> "Poly":
        """Substitute polynomials for variables."""
        values = {k: Poly.coerce(v) for k, v in values.items()}
        result = Poly()
        for e, c in self.terms:
            term = Poly.const(c)
            for i, x in enumerate(e):
                if not x:
                    continue
                name = VARS[i]
                base = values.get(name, Poly.var(name))
                term = term * base**x
            result = result + term
        return result

    # protocol -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.terms:
            mono = "*".join(
                VARS[i] if x == 1 else f"{VARS[i]}**{x}" for i, x in enumerate(e) if x
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def needs_parens(self) -> bool:
        return len(self.terms) > 1


def _eval_ast(node) -> Poly:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Poly.const(node.value)
    if isinstance(node, ast.Name):
        if node.id not in _INDEX:
            raise ValueError(f"unknown parameter {node.id!r}")
        return Poly.var(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _eval_ast(node.operand)
        return -inner if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ValueError("exponent must be an integer literal")
            return _eval_ast(node.left) ** node.right.value
        left, right = _eval_ast(node.left), _eval_ast(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
    raise ValueError(f"unsupported syntax in polynomial: {ast.dump(node)}")

