r"""
scripts/exact_ring.py

Exact scalars for the h-deformation engine.

Two scalar rings are used everywhere:

- RatFunc: rational functions in v and h over QQ, with q = v**2 so that the
  half-integer powers q**(1/2) needed by the B series stay exact monomials.
  Elements are sympy FracElement values of FIELD; sympy cancels every result
  with a polynomial gcd, so equality is equality of canonical forms.
- HPoly: polynomials in h over QQ (sympy PolyElement values of HRING), the
  scalars left after the q -> 1 limit.

The singular entry of every contraction map is the exact representative
SINGULAR = h/(q - 1).
"""

import re
from fractions import Fraction
from typing import Union

from sympy import QQ
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.fields import FracElement, field
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, ring

# Scalar rings
FIELD, V, H = field("v,h", QQ)
VH_RING = FIELD.ring
V_POLY, H_POLY = VH_RING.gens
HRING, HP = ring("h", QQ)
QH_RING = ring("q,h", QQ)[0]  # printing only

Q = V**2
SINGULAR = H / (Q - 1)

Scalar = Union[FracElement, PolyElement]

_SCALAR_TEXT = re.compile(r"^[0-9qhv+\-*/^()\s]+$")
_TRANSFORMS = standard_transformations + (convert_xor,)
_V_SYM, _H_SYM = FIELD.symbols


class ScalarError(ValueError):
    """Base class for scalar errors."""


class ScalarParseError(ScalarError):
    """Raised when scalar text does not follow the grammar."""


class ZeroHasNoOrder(ScalarError):
    """Raised when the order at q=1 of the zero function is requested."""


class PoleAtQ1(ScalarError):
    """Raised when a limit at q=1 is taken of a function with a pole there."""

    def __init__(self, value: FracElement, order: int):
        self.value = value
        self.order = order
        super().__init__(f"pole of order {-order} at q=1 in {format_scalar(value)}")


class NonPolynomialInH(ScalarError):
    """Raised when a value that must be a polynomial in h is not one."""


def is_ratfunc(value) -> bool:
    return isinstance(value, FracElement) and value.field == FIELD


def is_hpoly(value) -> bool:
    return isinstance(value, PolyElement) and value.ring == HRING


def to_qq(value) -> object:
    """Convert an int, Fraction or QQ value into a QQ element."""
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ.convert(value)


def as_ratfunc(value) -> FracElement:
    """Coerce an int, Fraction, QQ value or HPoly into FIELD."""
    if is_ratfunc(value):
        return value
    if is_hpoly(value):
        numer = VH_RING.from_dict({(0,) + monom: coeff for monom, coeff in value.items()})
        return FIELD.new(numer)
    return FIELD(to_qq(value))


def as_hpoly(value) -> PolyElement:
    """Coerce an int, Fraction or QQ value into HRING (HPoly values pass through)."""
    if is_hpoly(value):
        return value
    return HRING(to_qq(value))


def q_power(k: int) -> FracElement:
    """q**k as an exact element of FIELD."""
    return V ** (2 * k)


def v_power(k: int) -> FracElement:
    """v**k = q**(k/2) as an exact element of FIELD."""
    return V**k


def ratfunc_arith(a: FracElement, b: FracElement, op: str) -> FracElement:
    """
    Exact field arithmetic on two RatFunc values.

    Args:
        a (FracElement): Left operand.
        b (FracElement): Right operand.
        op (str): One of add, sub, mul, div.

    Returns:
        FracElement: The reduced, canonical result.

    Raises:
        ZeroDivisionError: If op is div and b is zero.
        ValueError: If op is not recognized.
    """
    a, b = as_ratfunc(a), as_ratfunc(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not b:
            raise ZeroDivisionError("division of a rational function by zero")
        return a / b
    raise ValueError(f"Unknown operation '{op}', expected add, sub, mul or div.")


def _strip_v_minus_one(poly: PolyElement):
    """Split poly = (v - 1)**k * rest with rest(1, h) != 0."""
    k = 0
    while poly and not poly.evaluate(V_POLY, 1):
        poly = poly.exquo(V_POLY - 1)
        k += 1
    return k, poly


def order_at_q1(value: Scalar) -> int:
    """
    Order of a scalar at q=1 (v=1): multiplicity of (v - 1) in the numerator
    minus its multiplicity in the denominator.

    Raises:
        ZeroHasNoOrder: If value is zero.
    """
    if not value:
        raise ZeroHasNoOrder("the zero function has no order at q=1")
    if is_hpoly(value):
        return 0
    value = as_ratfunc(value)
    k_numer, _ = _strip_v_minus_one(value.numer)
    k_denom, _ = _strip_v_minus_one(value.denom)
    return k_numer - k_denom


def limit_q1(value: Scalar) -> PolyElement:
    """
    Exact value at q=1 (v=1) of a scalar, as a polynomial in h.

    Raises:
        PoleAtQ1: If the scalar has a pole at q=1.
        NonPolynomialInH: If the value at q=1 has h in a denominator.
    """
    if is_hpoly(value):
        return value
    value = as_ratfunc(value)
    if not value:
        return HRING.zero

    k_numer, numer = _strip_v_minus_one(value.numer)
    k_denom, denom = _strip_v_minus_one(value.denom)
    order = k_numer - k_denom
    if order < 0:
        raise PoleAtQ1(value, order)
    if order > 0:
        return HRING.zero

    numer_at_1 = numer.evaluate(V_POLY, 1).set_ring(HRING)
    denom_at_1 = denom.evaluate(V_POLY, 1).set_ring(HRING)
    try:
        return numer_at_1.exquo(denom_at_1)
    except ExactQuotientFailed:
        raise NonPolynomialInH(
            f"value at q=1 of {format_scalar(value)} is not a polynomial in h"
        )


def to_hpoly(value: Scalar) -> PolyElement:
    """
    Reinterpret a v-free RatFunc with constant denominator as an HPoly.

    Raises:
        NonPolynomialInH: If value depends on v or has a non-constant denominator.
    """
    if is_hpoly(value):
        return value
    value = as_ratfunc(value)
    if not value.denom.is_ground or any(monom[0] for monom in value.numer.keys()):
        raise NonPolynomialInH(f"{format_scalar(value)} is not a polynomial in h")
    scale = value.denom.LC
    return HRING.from_dict({(monom[1],): coeff / scale for monom, coeff in value.numer.items()})


def substitute_h(value: Scalar, h0) -> Scalar:
    """Specialize h to an exact rational number, keeping the scalar ring."""
    h0 = to_qq(h0)
    if is_hpoly(value):
        return HRING(value.evaluate(HP, h0))
    return as_ratfunc(value).subs(H, h0)


def evaluate(value: Scalar, v0, h0):
    """
    Exact numeric value at v = v0 and h = h0 (q = v0**2).

    Raises:
        ZeroDivisionError: If the denominator vanishes at the point.
    """
    v0, h0 = to_qq(v0), to_qq(h0)
    if is_hpoly(value):
        return value.evaluate(HP, h0)
    value = as_ratfunc(value)
    point = [(V_POLY, v0), (H_POLY, h0)]
    denom = value.denom.evaluate(point)
    if not denom:
        raise ZeroDivisionError(f"{format_scalar(value)} has a pole at v={v0}, h={h0}")
    return value.numer.evaluate(point) / denom


def parse_scalar(text: str, target: str = "ratfunc") -> Scalar:
    """
    Parse scalar text built from integers, q, h, v and + - * / ^ ( ).

    Args:
        text (str): The scalar text, e.g. "h/(q - 1)" or "2*h^2".
        target (str): "ratfunc" (default) or "hpoly".

    Returns:
        Scalar: The parsed value in the requested ring.

    Raises:
        ScalarParseError: If the text is not in the grammar.
        NonPolynomialInH: If target is hpoly and the value is not one.
    """
    if not isinstance(text, str) or not _SCALAR_TEXT.match(text):
        raise ScalarParseError(f"Invalid scalar text: '{text}'")
    local = {"v": _V_SYM, "h": _H_SYM, "q": _V_SYM**2}
    try:
        expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS)
        value = FIELD.from_expr(expr)
    except ZeroDivisionError:
        raise ScalarParseError(f"Division by zero in scalar text: '{text}'")
    except Exception as e:
        raise ScalarParseError(f"Invalid scalar text: '{text}' ({e})")
    if target == "hpoly":
        return to_hpoly(value)
    if target != "ratfunc":
        raise ValueError(f"Unknown scalar target '{target}', expected ratfunc or hpoly.")
    return value


def _poly_text(poly: PolyElement) -> str:
    return str(poly).replace("**", "^")


def _q_form(poly: PolyElement):
    """Rewrite a polynomial in v, h as one in q, h when all v powers are even."""
    if any(monom[0] % 2 for monom in poly.keys()):
        return None
    return QH_RING.from_dict({(monom[0] // 2, monom[1]): coeff for monom, coeff in poly.items()})


def _is_power(poly: PolyElement) -> bool:
    """True for a single power of one generator with coefficient 1, e.g. h or q^2."""
    if len(poly) != 1:
        return False
    monom, coeff = next(iter(poly.items()))
    return coeff == 1 and sum(1 for exp in monom if exp) == 1


def format_scalar(value: Scalar) -> str:
    """
    Print a scalar in the text grammar, in q-form when every v power is even.
    Parsing the output gives back the same value.
    """
    if is_hpoly(value):
        return _poly_text(value)
    value = as_ratfunc(value)
    numer, denom = value.numer, value.denom
    q_numer, q_denom = _q_form(numer), _q_form(denom)
    if q_numer is not None and q_denom is not None:
        numer, denom = q_numer, q_denom

    numer_text = _poly_text(numer)
    if denom == 1:
        return numer_text
    if len(numer) > 1:
        numer_text = f"({numer_text})"
    denom_text = _poly_text(denom)
    return f"{numer_text}/{denom_text}" if _is_power(denom) else f"{numer_text}/({denom_text})"
