"""Exponential polynomials: finite sums of c * t^k * e^(mu*t).

This ring is closed under differentiation, multiplication and under
solving first-order linear ODEs a' = alpha*a + g by variation of
parameters, which is exactly what the holonomy coefficient functions and
formal flow coefficients require.

Frequencies mu that are rational multiples q of 2*pi*i are kept exact
(q stored as a Fraction), so resonance (mu - alpha == 0) is detected
exactly; other frequencies fall back to complex doubles with a 1e-12
resonance tolerance.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

TWO_PI_I = 2j * math.pi
PRUNE_TOL = 1e-14
RESONANCE_TOL = 1e-12
_RATIONAL_MAX_DEN = 64


@dataclass(frozen=True)
class Frequency:
    """An exponential frequency, exact when it is 2*pi*i times a rational."""

    q: Fraction | None
    value: complex

    @classmethod
    def rational(cls, q) -> "Frequency":
        q = Fraction(q)
        return cls(q, TWO_PI_I * float(q))

    @classmethod
    def from_complex(cls, z: complex) -> "Frequency":
        z = complex(z)
        ratio = z / TWO_PI_I
        if abs(ratio.imag) < RESONANCE_TOL:
            q = Fraction(ratio.real).limit_denominator(_RATIONAL_MAX_DEN)
            if abs(ratio.real - float(q)) < RESONANCE_TOL:
                return cls.rational(q)
        return cls(None, z)

    @classmethod
    def coerce(cls, x) -> "Frequency":
        if isinstance(x, Frequency):
            return x
        if isinstance(x, (Fraction, int)):
            return cls.rational(x)
        return cls.from_complex(x)

    @classmethod
    def zero(cls) -> "Frequency":
        return cls.rational(0)

    def is_zero(self) -> bool:
        if self.q is not None:
            return self.q == 0
        return abs(self.value) < RESONANCE_TOL

    def __add__(self, other: "Frequency") -> "Frequency":
        if self.q is not None and other.q is not None:
            return Frequency.rational(self.q + other.q)
        return Frequency.from_complex(self.value + other.value)

    def __sub__(self, other: "Frequency") -> "Frequency":
        return self + (-other)

    def __neg__(self) -> "Frequency":
        if self.q is not None:
            return Frequency.rational(-self.q)
        return Frequency(None, -self.value)

    def __hash__(self):
        if self.q is not None:
            return hash(("q", self.q))
        return hash(("c", self.value))

    def __eq__(self, other):
        if not isinstance(other, Frequency):
            return NotImplemented
        if (self.q is None) != (other.q is None):
            return False
        if self.q is not None:
            return self.q == other.q
        return self.value == other.value

    def exp_at(self, t: complex) -> complex:
        return cmath.exp(self.value * t)

    def __repr__(self):
        if self.q is not None:
            return f"2*pi*i*({self.q})"
        return f"{self.value!r}"


Key = Tuple[int, Frequency]


class ExpPoly:
    """Finite sum over (k, mu) of coeff * t^k * exp(mu*t)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Key, complex] | None = None):
        clean: Dict[Key, complex] = {}
        if terms:
            for (k, freq), c in terms.items():
                if k < 0:
                    raise ValueError("t-power must be non-negative")
                c = complex(c)
                if abs(c) < PRUNE_TOL:
                    continue
                key = (int(k), Frequency.coerce(freq))
                clean[key] = clean.get(key, 0.0 + 0j) + c
        self.terms = {key: c for key, c in clean.items() if abs(c) >= PRUNE_TOL}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    @classmethod
    def constant(cls, c) -> "ExpPoly":
        return cls({(0, Frequency.zero()): complex(c)})

    @classmethod
    def one(cls) -> "ExpPoly":
        return cls.constant(1.0)

    @classmethod
    def term(cls, c, k: int = 0, freq=0) -> "ExpPoly":
        return cls({(k, Frequency.coerce(freq)): complex(c)})

    @classmethod
    def t_power(cls, k: int) -> "ExpPoly":
        return cls.term(1.0, k=k)

    @classmethod
    def exponential(cls, freq) -> "ExpPoly":
        """e^(mu t); pass a Frequency, a rational q (meaning 2*pi*i*q) or a complex mu."""
        return cls.term(1.0, k=0, freq=freq)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0.0 + 0j) + c
        return ExpPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return ExpPoly({key: -c for key, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return ExpPoly({key: c * other for key, c in self.terms.items()})
        if not isinstance(other, ExpPoly):
            return NotImplemented
        out: Dict[Key, complex] = {}
        for (k1, f1), c1 in self.terms.items():
            for (k2, f2), c2 in other.terms.items():
                key = (k1 + k2, f1 + f2)
                out[key] = out.get(key, 0.0 + 0j) + c1 * c2
        return ExpPoly(out)

    def __rmul__(self, other):
        return self.__mul__(other)

    # -- calculus ----------------------------------------------------------

    def derivative(self) -> "ExpPoly":
        out: Dict[Key, complex] = {}
        for (k, f), c in self.terms.items():
            if k > 0:
                key = (k - 1, f)
                out[key] = out.get(key, 0.0 + 0j) + c * k
            if not f.is_zero():
                key = (k, f)
                out[key] = out.get(key, 0.0 + 0j) + c * f.value
        return ExpPoly(out)

    def antiderivative(self) -> "ExpPoly":
        """The antiderivative F with F(0) = 0, term by term in closed form."""
        out = ExpPoly.zero()
        for (k, f), c in self.terms.items():
            if f.is_zero():
                out = out + ExpPoly.term(c / (k + 1), k=k + 1)
            else:
                mu = f.value
                # int t^k e^(mu t) = e^(mu t) * sum_j (-1)^j k!/(k-j)! t^(k-j) / mu^(j+1)
                fact = 1.0
                for j in range(k + 1):
                    if j > 0:
                        fact *= k - j + 1
                    coef = c * ((-1) ** j) * fact / mu ** (j + 1)
                    out = out + ExpPoly.term(coef, k=k - j, freq=f)
                const = c * ((-1) ** k) * math.factorial(k) / mu ** (k + 1)
                out = out - ExpPoly.constant(const)
        return out

    def eval(self, t: complex) -> complex:
        t = complex(t)
        total = 0.0 + 0j
        for (k, f), c in self.terms.items():
            total += c * (t ** k if k else 1.0) * f.exp_at(t)
        return total

    # -- queries / io ------------------------------------------------------

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_negligible(self, tol: float = PRUNE_TOL) -> bool:
        return self.max_abs_coeff() < tol

    def _sorted_items(self):
        def key(item):
            (k, f), _ = item
            if f.q is not None:
                return (k, 0, float(f.q), 0.0)
            return (k, 1, f.value.real, f.value.imag)

        return sorted(self.terms.items(), key=key)

    def to_json_dict(self) -> dict:
        terms = []
        for (k, f), c in self._sorted_items():
            terms.append(
                {
                    "k": k,
                    "q_re": str(f.q) if f.q is not None else None,
                    "q_im": "0" if f.q is not None else None,
                    "mu_re": f.value.real,
                    "mu_im": f.value.imag,
                    "c_re": c.real,
                    "c_im": c.imag,
                }
            )
        return {"terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExpPoly":
        terms: Dict[Key, complex] = {}
        for t in d["terms"]:
            if t.get("q_re") is not None:
                freq = Frequency.rational(Fraction(t["q_re"]))
            else:
                freq = Frequency(None, complex(t["mu_re"], t["mu_im"]))
            terms[(int(t["k"]), freq)] = complex(t["c_re"], t["c_im"])
        return cls(terms)

    @classmethod
    def from_json(cls, s: str) -> "ExpPoly":
        return cls.from_json_dict(json.loads(s))

    def __repr__(self):
        parts = []
        for (k, f), c in self._sorted_items():
            s = f"({c})"
            if k:
                s += f"*t^{k}"
            if not f.is_zero():
                s += f"*exp[{f!r}*t]"
            parts.append(s)
        return "ExpPoly(" + (" + ".join(parts) if parts else "0") + ")"


def _coerce(x):
    if isinstance(x, ExpPoly):
        return x
    if isinstance(x, (int, float, complex)):
        return ExpPoly.constant(x)
    return NotImplemented


def solve_linear_ode(alpha, g: ExpPoly, a0) -> ExpPoly:
    """Exact solution of a' = alpha*a + g(t), a(0) = a0, in the ExpPoly ring.

    Variation of parameters: a = e^(alpha t) * (a0 + int_0^t e^(-alpha s) g(s) ds).
    Resonant terms (frequency of g equal to alpha) integrate to t^(k+1)/(k+1);
    exactness of that comparison is what produces the paper-style t*e^(mu t)
    coefficients.
    """
    alpha = Frequency.coerce(alpha)
    shifted = g * ExpPoly.exponential(-alpha)
    integral = shifted.antiderivative()
    return (ExpPoly.constant(a0) + integral) * ExpPoly.exponential(alpha)
