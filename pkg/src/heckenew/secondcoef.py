"""Second coefficient of the characteristic polynomial of T_m on the newspace.

    a2 = 1/2 [ (Tr T_m)^2 - sum_{d | m} chi(d) d^(k-1) Tr T_{m^2/d^2} ]

with every trace taken on the newspace.  The newspace dimension is Tr T_1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import DomainError, divisors, factor
from .characters import DirichletCharacter
from .cyclotomic import Cyclotomic
from .tracefm import IntegerTerms, _validate, exact_str, trace_new, trace_terms

NONVANISHING = "nonvanishing"
TRIVIAL = "trivial-vanishing"
NONTRIVIAL = "nontrivial-vanishing"


@dataclass(frozen=True)
class SecondCoeffResult:
    m: int
    N: int
    k: int
    chi: DirichletCharacter | None
    value: object  # int for trivial chi, Cyclotomic otherwise
    dim_new: int
    classification: str

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "N": self.N,
            "k": self.k,
            "chi": None if self.chi is None else self.chi.to_json(),
            "a2": exact_str(self.value),
            "dim_new": self.dim_new,
            "class": self.classification,
        }


def classify_value(value, dim_new: int) -> str:
    if dim_new < 2:
        if value:
            raise ArithmeticError(f"a2 = {value} on a space of dimension {dim_new}")
        return TRIVIAL
    return NONTRIVIAL if not value else NONVANISHING


def _as_dimension(x) -> int:
    if isinstance(x, Cyclotomic):
        x = x.to_rational()
    x = Fraction(x)
    if x.denominator != 1 or x < 0:
        raise ArithmeticError(f"newspace trace of T_1 is {x}, not a dimension")
    return int(x)


def a2_new(m: int, N, k: int, chi: DirichletCharacter | None = None) -> SecondCoeffResult:
    N = factor(N)
    _validate(m, N, k, chi)
    if chi is not None and chi.modulus != N.value:
        raise DomainError(f"character modulus {chi.modulus} differs from level {N.value}")
    if chi is None:
        ev = NewspaceEvaluator(m, N)
        value = ev.a2(k)
        dim = ev.dim(k)
    else:
        tm = trace_new(m, N, k, chi)
        acc = tm * tm
        for d in divisors(m):
            d = d.value
            acc = acc - chi(d) * d ** (k - 1) * trace_new((m // d) ** 2, N, k, chi)
        value = acc / 2
        if value.is_rational():
            q = value.to_rational()
            if q.denominator != 1:
                raise ArithmeticError(f"non-integral rational a2 = {q}")
        dim = _as_dimension(trace_new(1, N, k, chi))
    return SecondCoeffResult(m, N.value, k, chi, value, dim, classify_value(value, dim))


def classify(m: int, N, k: int, chi: DirichletCharacter | None = None) -> str:
    return a2_new(m, N, k, chi).classification


class NewspaceEvaluator:
    """Integer-only a2 and dimension at fixed (m, N), trivial character, any even k.

    Builds the scaled newspace weights once for every m' in {1, m, m^2/d^2} and
    reuses them across weights.
    """

    def __init__(self, m: int, N):
        N = factor(N)
        self.m = m
        self.N = N.value
        self.ds = [d.value for d in divisors(m)]
        needed = {1, m} | {(m // d) ** 2 for d in self.ds}
        self.terms: dict[int, IntegerTerms] = {
            mm: trace_terms(mm, N, new=True).integer_weights() for mm in sorted(needed)
        }

    def trace(self, mm: int, k: int) -> int:
        return self.terms[mm].trace(k)

    def dim(self, k: int) -> int:
        d = self.terms[1].trace(k)
        if d < 0:
            raise ArithmeticError(f"negative newspace dimension {d} at N={self.N}, k={k}")
        return d

    def a2(self, k: int) -> int:
        tm = self.trace(self.m, k)
        twice = tm * tm
        for d in self.ds:
            twice -= d ** (k - 1) * self.trace((self.m // d) ** 2, k)
        if twice % 2:
            raise ArithmeticError(f"odd 2*a2 at m={self.m}, N={self.N}, k={k}")
        return twice // 2

    def result(self, k: int) -> SecondCoeffResult:
        if k % 2:
            raise DomainError("trivial character needs even weight")
        value = self.a2(k)
        dim = self.dim(k)
        return SecondCoeffResult(self.m, self.N, k, None, value, dim, classify_value(value, dim))


__all__ = [
    "NONVANISHING",
    "NONTRIVIAL",
    "TRIVIAL",
    "NewspaceEvaluator",
    "SecondCoeffResult",
    "a2_new",
    "classify",
    "classify_value",
]
