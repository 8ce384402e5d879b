"""Sparse multivariate polynomials and a small expression language for them.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*        # division only by constants
    factor := ('+' | '-') factor | power
    power  := atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')'

Names must belong to the variable set supplied by the caller.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class PolyParseError(ValueError):
    """Syntax or name error in a polynomial expression; carries the position."""

    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos} in {text!r}")


@dataclass(frozen=True)
class PolySpec:
    """``sum c * prod x_i^e_i`` over an ordered variable tuple.

    ``terms`` maps exponent tuples to coefficients; zero coefficients are
    dropped on construction.
    """

    variables: tuple[str, ...]
    terms: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        n = len(self.variables)
        merged: dict[tuple[int, ...], float] = {}
        for exps, coef in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match {n} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            merged[exps] = merged.get(exps, 0.0) + float(coef)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(
            self, "terms", tuple(sorted((e, c) for e, c in merged.items() if c != 0.0))
        )

    # -- construction helpers
    @classmethod
    def constant(cls, variables, value: float) -> "PolySpec":
        return cls(tuple(variables), (((0,) * len(variables), value),))

    @classmethod
    def variable(cls, variables, name: str) -> "PolySpec":
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, ((exps, 1.0),))

    @classmethod
    def parse(cls, text: str, variables, aliases: dict[str, str] | None = None) -> "PolySpec":
        return _Parser(text, tuple(variables), aliases or {}).parse()

    # -- algebra
    def _coerce(self, other) -> "PolySpec":
        if isinstance(other, PolySpec):
            if other.variables != self.variables:
                raise ValueError("polynomials over different variables")
            return other
        return PolySpec.constant(self.variables, float(other))

    def __add__(self, other):
        other = self._coerce(other)
        return PolySpec(self.variables, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return PolySpec(self.variables, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return PolySpec(self.variables, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only non-negative integer powers")
        out = PolySpec.constant(self.variables, 1.0)
        for _ in range(int(n)):
            out = out * self
        return out

    def embed(self, variables) -> "PolySpec":
        """Re-express over a larger variable tuple containing ours."""
        variables = tuple(variables)
        idx = [variables.index(v) for v in self.variables]
        terms = []
        for exps, c in self.terms:
            new = [0] * len(variables)
            for j, e in zip(idx, exps):
                new[j] = e
            terms.append((tuple(new), c))
        return PolySpec(variables, tuple(terms))

    # -- calculus
    def diff(self, var: str | int) -> "PolySpec":
        i = self.variables.index(var) if isinstance(var, str) else int(var)
        out = []
        for exps, c in self.terms:
            if exps[i] > 0:
                new = list(exps)
                new[i] -= 1
                out.append((tuple(new), c * exps[i]))
        return PolySpec(self.variables, tuple(out))

    @cached_property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def __call__(self, point) -> float:
        x = np.asarray(point, dtype=float)
        total = 0.0
        for exps, c in self.terms:
            term = c
            for xi, e in zip(x, exps):
                if e:
                    term *= xi**e
            total += term
        return float(total)

    def derivatives(self, point, order: int = 3) -> list[np.ndarray]:
        """Exact derivative tensors ``[value, grad, hessian, third]`` at ``point``."""
        x = np.asarray(point, dtype=float)
        n = len(self.variables)
        out = [np.zeros((n,) * k) if k else np.zeros(()) for k in range(order + 1)]
        for exps, c in self.terms:
            support = [i for i, e in enumerate(exps) if e]
            _monomial_derivs(c, exps, support, x, out, order)
        out[0] = float(out[0])
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms:
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exps) if e
            )
            coef = repr(abs(c))
            body = (coef if abs(c) != 1.0 or not mono else "") + ("*" if mono and abs(c) != 1.0 else "") + mono
            parts.append(("-" if c < 0 else "+") + body)
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s


def _falling(e: int, k: int) -> int:
    return math.perm(e, k) if k <= e else 0


def _monomial_derivs(c, exps, support, x, out, order):
    # value and derivatives only involve the support variables of the monomial
    def mono_value(shift: dict[int, int]) -> float:
        val = c
        for i in support:
            k = shift.get(i, 0)
            f = _falling(exps[i], k)
            if f == 0:
                return 0.0
            val *= f * x[i] ** (exps[i] - k)
        return val

    out[0] = out[0] + mono_value({})
    if order >= 1:
        for a in support:
            out[1][a] += mono_value({a: 1})
    if order >= 2:
        for a in support:
            for b in support:
                sh = {a: 1}
                sh[b] = sh.get(b, 0) + 1
                out[2][a, b] += mono_value(sh)
    if order >= 3:
        for a in support:
            for b in support:
                for d in support:
                    sh: dict[int, int] = {}
                    for i in (a, b, d):
                        sh[i] = sh.get(i, 0) + 1
                    out[3][a, b, d] += mono_value(sh)


_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...], aliases: dict[str, str]):
        self.text = text
        self.variables = variables
        self.aliases = aliases
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1) is not None:
                self.tokens.append(("num", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.tokens.append(("name", m.group(2), m.start(2)))
            elif m.group(3) is not None:
                if m.group(3).isspace():
                    pos = m.end()
                    continue
                self.tokens.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def error(self, msg, pos=None):
        raise PolyParseError(msg, self.text, self.tokens[self.i][2] if pos is None else pos)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> PolySpec:
        if self.peek()[0] == "end":
            self.error("empty expression")
        poly = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return poly

    def expr(self):
        out = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            pos = self.peek()[2]
            rhs = self.factor()
            if op == "*":
                out = out * rhs
            else:
                if rhs.degree > 0 or not rhs.terms:
                    self.error("division only by a nonzero constant", pos)
                out = out * (1.0 / rhs.terms[0][1])
        return out

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.factor()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                self.error("exponent must be a non-negative integer", pos)
            base = base ** int(val)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return PolySpec.constant(self.variables, float(val))
        if kind == "name":
            name = self.aliases.get(val, val)
            if name not in self.variables:
                self.error(f"unknown variable {val!r} (expected one of {', '.join(self.variables)})", pos)
            return PolySpec.variable(self.variables, name)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.error("expected ')'")
            self.take()
            return inner
        self.error(f"unexpected {val!r}" if kind != "end" else "unexpected end of expression", pos)
