"""Exact coefficient field: multivariate rational functions over the rationals.

A :class:`Scalar` is a quotient ``p/q`` of integer-coefficient multivariate
polynomials in canonical form: ``gcd(p, q) = 1`` (polynomial gcd, integer
content included) and the leading coefficient of ``q`` is positive, with the
graded lexicographic monomial order over the declared variable order.  Two
canonical scalars are equal iff their representations are equal, so identity
verification reduces to a structural zero test.

A float-backed scalar uses the same representation with float coefficients;
it is never gcd-reduced and its zero test samples the value at supplied
points against a tolerance (default ``1e-9``).

Expression grammar (EBNF, also the serialization format)::

    expr    = term { ("+" | "-") term } ;
    term    = factor { ("*" | "/") factor } ;
    factor  = "-" factor | power ;
    power   = atom [ "^" integer ] ;
    atom    = integer | variable | "(" expr ")" ;
    integer = digit { digit } ;                       (* nonnegative *)
    variable = letter { letter | digit | "_" } ;

Rationals are written ``p/q`` and exponents are nonnegative integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd as int_gcd
from typing import Iterable, Sequence

from cpgeo._kernels import poly_add, poly_mul, poly_neg, poly_scale
from cpgeo.errors import FieldError, ScalarParseError

Mono = tuple  # exponent tuple, one entry per context variable


@dataclass(frozen=True)
class VarContext:
    """Ordered chart variables a scalar lives over (may be empty)."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise FieldError(f"duplicate variable names: {self.names}")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise FieldError(f"unknown variable {name!r} in context {self.names}") from None

    def zero_mono(self) -> Mono:
        return (0,) * len(self.names)

    def constant(self, value) -> "Scalar":
        """Scalar from an int, Fraction or float."""
        if isinstance(value, float):
            num = {} if value == 0.0 else {self.zero_mono(): value}
            return Scalar(self, num, {self.zero_mono(): 1.0}, _canonical=True)
        q = Fraction(value)
        num = {} if q == 0 else {self.zero_mono(): q.numerator}
        return Scalar(self, num, {self.zero_mono(): q.denominator}, _canonical=True)

    def variable(self, name: str) -> "Scalar":
        i = self.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(self.names)))
        return Scalar(self, {mono: 1}, {self.zero_mono(): 1}, _canonical=True)

    def zero(self) -> "Scalar":
        return self.constant(0)

    def one(self) -> "Scalar":
        return self.constant(1)

    def parse(self, text: str) -> "Scalar":
        return parse_scalar(text, self.names)


# ---------------------------------------------------------------------------
# polynomial helpers (dicts of int coefficients unless stated otherwise)
# ---------------------------------------------------------------------------


def _grlex_key(mono: Mono):
    return (sum(mono), mono)


def _leading(poly: dict) -> tuple[Mono, int]:
    mono = max(poly, key=_grlex_key)
    return mono, poly[mono]


def _content(poly: dict) -> int:
    return reduce(int_gcd, (abs(c) for c in poly.values()), 0)


def _is_one(poly: dict) -> bool:
    if len(poly) != 1:
        return False
    mono, coeff = next(iter(poly.items()))
    return coeff == 1 and not any(mono)


def _is_constant_poly(poly: dict) -> bool:
    return len(poly) <= 1 and all(not any(m) for m in poly)


def _divexact(a: dict, b: dict) -> dict:
    """Exact polynomial division; raises if ``b`` does not divide ``a``."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    lm_b, lc_b = _leading(b)
    quot: dict = {}
    rem = dict(a)
    while rem:
        lm_r, lc_r = _leading(rem)
        mono = tuple(er - eb for er, eb in zip(lm_r, lm_b))
        if any(e < 0 for e in mono) or lc_r % lc_b:
            raise ArithmeticError("inexact polynomial division")
        c = lc_r // lc_b
        quot[mono] = c
        rem = poly_add(rem, poly_neg(poly_mul({mono: c}, b)))
    return quot


def _to_univar(poly: dict, v: int) -> dict[int, dict]:
    """View as univariate in variable ``v`` with polynomial coefficients."""
    out: dict[int, dict] = {}
    for mono, coeff in poly.items():
        d = mono[v]
        sub = mono[:v] + (0,) + mono[v + 1 :]
        out.setdefault(d, {})[sub] = coeff
    return out


def _from_univar(uni: dict[int, dict], v: int) -> dict:
    out: dict = {}
    for d, sub in uni.items():
        for mono, coeff in sub.items():
            out[mono[:v] + (d,) + mono[v + 1 :]] = coeff
    return out


def _uni_shift_mul(uni: dict[int, dict], shift: int, factor: dict) -> dict[int, dict]:
    return {d + shift: poly_mul(sub, factor) for d, sub in uni.items()}


def _uni_add(a: dict[int, dict], b: dict[int, dict]) -> dict[int, dict]:
    out = dict(a)
    for d, sub in b.items():
        merged = poly_add(out.get(d, {}), sub)
        if merged:
            out[d] = merged
        else:
            out.pop(d, None)
    return out


def _sign_normalize(poly: dict) -> dict:
    if poly and _leading(poly)[1] < 0:
        return poly_neg(poly)
    return poly


def _primitive_part(poly: dict) -> dict:
    if not poly:
        return poly
    c = _content(poly)
    if c > 1:
        poly = {m: coeff // c for m, coeff in poly.items()}
    return _sign_normalize(poly)


def poly_gcd(a: dict, b: dict) -> dict:
    """Gcd in Z[x...]: primitive pseudo-remainder sequences, content included."""
    if not a:
        return _sign_normalize(dict(b))
    if not b:
        return _sign_normalize(dict(a))
    active = [v for v in range(len(next(iter(a)))) if any(m[v] for m in a) or any(m[v] for m in b)]
    if not active:
        mono = next(iter(a))
        return {mono: int_gcd(abs(next(iter(a.values()))), abs(next(iter(b.values()))))}
    v = active[-1]
    ua, ub = _to_univar(a, v), _to_univar(b, v)
    cont_a = reduce(poly_gcd, ua.values())
    cont_b = reduce(poly_gcd, ub.values())
    cont = poly_gcd(cont_a, cont_b)
    ua = {d: _divexact(sub, cont_a) for d, sub in ua.items()}
    ub = {d: _divexact(sub, cont_b) for d, sub in ub.items()}
    if max(ua) < max(ub):
        ua, ub = ub, ua
    while ub:
        rem = _uni_prem(ua, ub, v)
        ua, ub = ub, _to_univar(_primitive_part(_from_univar(rem, v)), v) if rem else {}
    g = _from_univar(ua, v)
    return _sign_normalize(poly_mul(cont, _primitive_part(g)))


def _uni_prem(a: dict[int, dict], b: dict[int, dict], v: int) -> dict[int, dict]:
    """Pseudo-remainder of univariate polys with polynomial coefficients."""
    db = max(b)
    lb = b[db]
    rem = a
    while rem and max(rem) >= db:
        dr = max(rem)
        lr = rem[dr]
        rem = _uni_add(
            {d: poly_mul(sub, lb) for d, sub in rem.items()},
            _uni_shift_mul({d: poly_neg(sub) for d, sub in b.items()}, dr - db, lr),
        )
    return rem


def _eval_poly(poly: dict, point: Sequence):
    total = 0
    for mono, coeff in poly.items():
        term = coeff
        for val, e in zip(point, mono):
            if e:
                term = term * val**e
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Scalar
# ---------------------------------------------------------------------------


class Scalar:
    """Element of the coefficient field, canonical ``p/q`` representation."""

    __slots__ = ("ctx", "num", "den", "is_float")

    def __init__(self, ctx: VarContext, num: dict, den: dict, *, _canonical: bool = False):
        self.ctx = ctx
        is_float = any(isinstance(c, float) for c in num.values()) or any(
            isinstance(c, float) for c in den.values()
        )
        if is_float:
            if not den:
                raise FieldError("zero denominator")
            self.num, self.den = _normalize_float(num, den)
        elif _canonical:
            if not den:
                raise FieldError("zero denominator")
            self.num, self.den = num, den
        else:
            self.num, self.den = _canonicalize(num, den)
        self.is_float = is_float

    @property
    def backend(self) -> str:
        return "float" if self.is_float else "exact"

    # -- coercion ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.ctx != self.ctx:
                raise FieldError("scalars from different variable contexts")
            return other
        if isinstance(other, (int, Fraction, float)):
            return self.ctx.constant(other)
        return None

    def _wrap(self, num: dict, den: dict) -> "Scalar":
        return Scalar(self.ctx, num, den)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        s, o = _match_backend(self, o)
        if s.den == o.den:
            return s._wrap(poly_add(s.num, o.num), s.den)
        num = poly_add(poly_mul(s.num, o.den), poly_mul(o.num, s.den))
        return s._wrap(num, poly_mul(s.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.ctx, poly_neg(self.num), self.den, _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        s, o = _match_backend(self, o)
        return s._wrap(poly_mul(s.num, o.num), poly_mul(s.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        s, o = _match_backend(self, o)
        if not o.num:
            raise FieldError("division by zero scalar")
        return s._wrap(poly_mul(s.num, o.den), poly_mul(s.den, o.num))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise FieldError("scalar powers must be nonnegative integers")
        result = self.ctx.one() if not self.is_float else self.ctx.constant(1.0)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base if power > 1 else base
            power >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_float != o.is_float:
            s, o = _match_backend(self, o)
            return s.num == o.num and s.den == o.den
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.ctx, frozenset(self.num.items()), frozenset(self.den.items())))

    # -- calculus and queries -------------------------------------------------

    def diff(self, var: str | int) -> "Scalar":
        """Partial derivative (quotient rule, canonicalized)."""
        v = self.ctx.index(var) if isinstance(var, str) else var
        dp = _poly_diff(self.num, v)
        if _is_constant_poly(self.den):
            return self._wrap(dp, dict(self.den))
        dq = _poly_diff(self.den, v)
        num = poly_add(poly_mul(dp, self.den), poly_neg(poly_mul(self.num, dq)))
        return self._wrap(num, poly_mul(self.den, self.den))

    def is_zero(self, samples: Iterable[Sequence] | None = None, tol: float = 1e-9) -> bool:
        """Exact: canonical-form test.  Float: |value| <= tol at every sample."""
        if not self.num:
            return True
        if not self.is_float:
            return False
        if samples is None:
            raise FieldError("float-backend zero test requires sample points")
        checked = False
        for point in samples:
            checked = True
            if abs(self.evaluate(point)) > tol:
                return False
        if not checked:
            raise FieldError("float-backend zero test requires sample points")
        return True

    def is_constant(self) -> bool:
        return _is_constant_poly(self.num) and _is_constant_poly(self.den)

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise FieldError(f"scalar {self} is not constant")
        if self.is_float:
            raise FieldError("float scalar has no exact value")
        n = next(iter(self.num.values()), 0)
        d = next(iter(self.den.values()), 1)
        return Fraction(n, d)

    def as_float(self) -> float:
        if not self.is_constant():
            raise FieldError(f"scalar {self} is not constant")
        n = next(iter(self.num.values()), 0)
        d = next(iter(self.den.values()), 1)
        return float(n) / float(d)

    def evaluate(self, point: Sequence):
        """Value at a rational or float point (exact over Fractions)."""
        if len(point) != self.ctx.nvars:
            raise FieldError(f"expected {self.ctx.nvars} coordinates, got {len(point)}")
        den_val = _eval_poly(self.den, point)
        if den_val == 0:
            raise FieldError(f"denominator of {self} vanishes at {tuple(point)}")
        num_val = _eval_poly(self.num, point)
        if self.is_float:
            return float(num_val) / float(den_val)
        return Fraction(num_val, den_val)

    def to_float(self) -> "Scalar":
        if self.is_float:
            return self
        return Scalar(
            self.ctx,
            {m: float(c) for m, c in self.num.items()},
            {m: float(c) for m, c in self.den.items()},
            _canonical=True,
        )

    # -- serialization -------------------------------------------------------

    def __str__(self) -> str:
        if not self.num:
            return "0"
        num_s = _poly_str(self.num, self.ctx.names)
        if _is_one(self.den):
            return num_s
        den_s = _poly_str(self.den, self.ctx.names)
        if len(self.num) > 1:
            num_s = f"({num_s})"
        if not _den_is_atom(self.den):
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    def __repr__(self) -> str:
        return f"Scalar({self})"


def _match_backend(a: Scalar, b: Scalar) -> tuple[Scalar, Scalar]:
    if a.is_float == b.is_float:
        return a, b
    return a.to_float(), b.to_float()


def _poly_diff(poly: dict, v: int) -> dict:
    out = {}
    for mono, coeff in poly.items():
        e = mono[v]
        if e:
            out[mono[:v] + (e - 1,) + mono[v + 1 :]] = coeff * e
    return out


def _canonicalize(num: dict, den: dict) -> tuple[dict, dict]:
    if not den:
        raise FieldError("zero denominator")
    num, den = _clear_fractions(num, den)
    if not num:
        return {}, {(0,) * len(next(iter(den))): 1}
    if _is_constant_poly(den):
        c = next(iter(den.values()))
        g = int_gcd(_content(num), abs(c))
        if c < 0:
            g = -g
        if g != 1:
            num = {m: v // g for m, v in num.items()}
            den = {next(iter(den)): c // g}
        return num, den
    g = poly_gcd(num, den)
    if not _is_one(g):
        num = _divexact(num, g)
        den = _divexact(den, g)
    if _leading(den)[1] < 0:
        num, den = poly_neg(num), poly_neg(den)
    return num, den


def _normalize_float(num: dict, den: dict) -> tuple[dict, dict]:
    """Cheap float-backend normalization (no gcd): constant or monic den."""
    zero_mono = (0,) * len(next(iter(den)))
    if not num:
        return {}, {zero_mono: 1.0}
    if num == den:
        return {zero_mono: 1.0}, {zero_mono: 1.0}
    if _is_constant_poly(den):
        c = next(iter(den.values()))
        if c == 1.0:
            return num, den
        return {m: v / c for m, v in num.items()}, {zero_mono: 1.0}
    lead = _leading(den)[1]
    if lead != 1.0:
        num = {m: v / lead for m, v in num.items()}
        den = {m: v / lead for m, v in den.items()}
    return num, den


def _clear_fractions(num: dict, den: dict) -> tuple[dict, dict]:
    """Scale both parts by a common integer so coefficients are ints."""
    dens = [Fraction(c).denominator for c in num.values() if not isinstance(c, int)]
    dens += [Fraction(c).denominator for c in den.values() if not isinstance(c, int)]
    if not dens:
        return dict(num), dict(den)
    lcm = reduce(lambda a, b: a * b // int_gcd(a, b), dens, 1)
    to_int = lambda c: int(Fraction(c) * lcm)
    return (
        {m: to_int(c) for m, c in num.items() if Fraction(c) != 0},
        {m: to_int(c) for m, c in den.items()},
    )


def _poly_str(poly: dict, names: tuple[str, ...]) -> str:
    parts = []
    for mono in sorted(poly, key=_grlex_key, reverse=True):
        coeff = poly[mono]
        factors = []
        for name, e in zip(names, mono):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        mag = abs(coeff)
        if not factors:
            body = repr(mag) if isinstance(coeff, float) else str(mag)
        elif mag == 1 and not isinstance(coeff, float):
            body = "*".join(factors)
        else:
            head = repr(mag) if isinstance(coeff, float) else str(mag)
            body = "*".join([head] + factors)
        sign = "-" if (coeff < 0) else "+"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = first_body if first_sign == "+" else f"-{first_body}"
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _den_is_atom(den: dict) -> bool:
    """True when the denominator parses correctly without parentheses."""
    if len(den) != 1:
        return False
    mono, coeff = next(iter(den.items()))
    if not any(mono):
        return coeff > 0
    return coeff == 1 and sum(1 for e in mono if e) == 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ScalarParseError(f"unexpected character {text[bad_at]!r}", bad_at)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, ctx: VarContext):
        self.tokens = tokens
        self.ctx = ctx
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, None)

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ScalarParseError(f"expected {op!r}", pos)

    def parse(self) -> Scalar:
        value = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ScalarParseError(f"trailing input {val!r}", pos)
        return value

    def expr(self) -> Scalar:
        value = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self) -> Scalar:
        value = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.factor()
                if val == "*":
                    value = value * rhs
                else:
                    if not rhs.num:
                        raise ScalarParseError("division by zero", pos)
                    value = value / rhs
            else:
                return value

    def factor(self) -> Scalar:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return -self.factor()
        return self.power()

    def power(self) -> Scalar:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            ekind, eval_, epos = self.next()
            if ekind != "int":
                raise ScalarParseError("exponent must be a nonnegative integer", epos)
            return base ** int(eval_)
        return base

    def atom(self) -> Scalar:
        kind, val, pos = self.next()
        if kind == "int":
            return self.ctx.constant(int(val))
        if kind == "name":
            if val not in self.ctx.names:
                raise ScalarParseError(f"unknown variable {val!r}", pos)
            return self.ctx.variable(val)
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        raise ScalarParseError("expected a number, variable or parenthesis", pos)


# ---------------------------------------------------------------------------
# module-level operations (the public field API)
# ---------------------------------------------------------------------------


def parse_scalar(text: str, variables: Sequence[str]) -> Scalar:
    """Parse an expression over the given ordered variables into a Scalar."""
    ctx = variables if isinstance(variables, VarContext) else VarContext(tuple(variables))
    tokens = _tokenize(text)
    if not tokens:
        raise ScalarParseError("empty expression", 0)
    return _Parser(tokens, ctx).parse()


def partial_derivative(s: Scalar, var: str | int) -> Scalar:
    return s.diff(var)


def is_zero(s: Scalar, samples=None, tol: float = 1e-9) -> bool:
    return s.is_zero(samples=samples, tol=tol)
