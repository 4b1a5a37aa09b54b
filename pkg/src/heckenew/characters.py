"""Dirichlet characters with exact values in Z[zeta_e].

(Z/NZ)^* is split by CRT into cyclic components: one per odd prime power
p^r (generated by a primitive root), and for 2^r the decomposition
{+-1} x <5> (r >= 3), {+-1} (r = 2), trivial (r = 1).  A character is an
exponent vector a with chi(g_i) = exp(2 pi i a_i / ord_i).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from sympy.ntheory import discrete_log, primitive_root

from .arith import DomainError, FactoredInteger, factor
from .cyclotomic import Cyclotomic

_TABLE_LIMIT = 1 << 20


@dataclass(frozen=True)
class Component:
    p: int
    r: int
    gen: int
    order: int
    kind: str  # "odd", "sign" (the -1 factor mod 2^r) or "five"

    @property
    def modulus(self) -> int:
        return self.p**self.r


@lru_cache(maxsize=None)
def _log_table(modulus: int, gen: int, order: int) -> dict[int, int] | None:
    if modulus > _TABLE_LIMIT:
        return None
    table = {}
    x = 1
    for j in range(order):
        table[x] = j
        x = x * gen % modulus
    return table


def _dlog(x: int, modulus: int, gen: int, order: int) -> int:
    x %= modulus
    table = _log_table(modulus, gen, order)
    if table is not None:
        return table[x]
    return discrete_log(modulus, x, gen, order=order)


def component_log(c: Component, x: int) -> int:
    """Discrete logarithm of the unit x in the cyclic component c."""
    q = c.modulus
    if c.kind == "odd":
        return _dlog(x, q, c.gen, c.order)
    if c.kind == "sign":
        return 0 if x % 4 == 1 else 1
    y = x % q if x % 4 == 1 else (-x) % q
    return _dlog(y, q, 5, c.order)


@lru_cache(maxsize=None)
def unit_group(N: int) -> tuple[Component, ...]:
    comps = []
    for p, r in factor(N).factors:
        q = p**r
        if p == 2:
            if r >= 2:
                comps.append(Component(2, r, q - 1, 2, "sign"))
            if r >= 3:
                comps.append(Component(2, r, 5, 2 ** (r - 2), "five"))
        else:
            comps.append(Component(p, r, int(primitive_root(q)), q // p * (p - 1), "odd"))
    return tuple(comps)


def _local_conductor_exponent(comps, exps) -> int:
    """Exponent c with p^c the conductor of the p-part given its components."""
    c = 0
    for comp, a in zip(comps, exps):
        o = comp.order // math.gcd(a, comp.order)
        if o == 1:
            continue
        if comp.kind == "sign":
            c = max(c, 2)
        elif comp.kind == "five":
            c = max(c, o.bit_length() - 1 + 2)
        else:
            j = 0
            while o % comp.p == 0:
                o //= comp.p
                j += 1
            c = max(c, j + 1)
    return c


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    exponents: tuple[int, ...]
    components: tuple[Component, ...] = field(repr=False, compare=False, default=())

    def __post_init__(self):
        comps = unit_group(self.modulus)
        if len(self.exponents) != len(comps):
            raise DomainError(
                f"modulus {self.modulus} needs {len(comps)} exponents, got {len(self.exponents)}"
            )
        object.__setattr__(self, "components", comps)
        object.__setattr__(
            self,
            "exponents",
            tuple(a % c.order for a, c in zip(self.exponents, comps)),
        )

    @classmethod
    def trivial(cls, N: int) -> "DirichletCharacter":
        return cls(N, (0,) * len(unit_group(N)))

    # invariants -------------------------------------------------------------
    @property
    def order(self) -> int:
        e = 1
        for a, c in zip(self.exponents, self.components):
            e = math.lcm(e, c.order // math.gcd(a, c.order))
        return e

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    @property
    def conductor(self) -> int:
        f = 1
        for p, _ in factor(self.modulus).factors:
            idx = [i for i, c in enumerate(self.components) if c.p == p]
            cexp = _local_conductor_exponent(
                [self.components[i] for i in idx], [self.exponents[i] for i in idx]
            )
            f *= p**cexp
        return f

    @property
    def parity(self) -> int:
        return 1 if self.exponent(-1) == 0 else -1

    # evaluation -------------------------------------------------------------
    def exponent(self, a: int, p: int | None = None) -> int | None:
        """j with chi(a) = zeta_e^j, or None when gcd(a, N) > 1.

        With ``p`` given, only the p-part of chi is evaluated.
        """
        if math.gcd(a, self.modulus) != 1:
            return None
        e = self.order
        j = 0
        for aa, c in zip(self.exponents, self.components):
            if aa and (p is None or c.p == p):
                j += aa * component_log(c, a) * e // c.order
        return j % e

    def __call__(self, a: int) -> Cyclotomic:
        j = self.exponent(a)
        if j is None:
            return Cyclotomic.zero(self.order)
        return Cyclotomic.zeta_power(self.order, j)

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, tuple(-a for a in self.exponents))

    def primitive(self) -> "DirichletCharacter":
        return self.at_level(self.conductor)

    def at_level(self, M: int) -> "DirichletCharacter":
        """The character mod M sharing this character's primitive core (f | M required)."""
        if M % self.conductor:
            raise DomainError(f"conductor {self.conductor} does not divide {M}")
        e = self.order
        exps = []
        for c in unit_group(M):
            # lift the generator to a unit mod N that is 1 away from p
            rest = self.modulus // math.gcd(self.modulus, c.p**64)
            g, _ = _crt_unit(c.gen, c.modulus, rest)
            j = self.exponent(g, p=c.p) if math.gcd(g, self.modulus) == 1 else 0
            if (j * c.order) % e:
                raise DomainError("character does not factor through the requested level")
            exps.append(j * c.order // e)
        return DirichletCharacter(M, tuple(exps))

    def label(self) -> str:
        return f"{self.modulus}:[{','.join(map(str, self.exponents))}]"

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "exponents": list(self.exponents),
            "order": self.order,
            "conductor": self.conductor,
            "parity": self.parity,
        }


def _crt_unit(g: int, q: int, rest: int) -> tuple[int, int]:
    # x = g (mod q), x = 1 (mod rest), with gcd(q, rest) = 1
    if rest == 1:
        return g % q, q
    t = ((1 - g) * pow(q, -1, rest)) % rest
    return g + q * t, q * rest


def enumerate_characters(N, parity: int | None = None) -> list[DirichletCharacter]:
    """All characters mod N, optionally filtered to chi(-1) == parity."""
    N = factor(N).value if isinstance(N, FactoredInteger) else int(N)
    comps = unit_group(N)
    out = []
    for exps in product(*(range(c.order) for c in comps)):
        chi = DirichletCharacter(N, exps)
        if parity is None or chi.parity == parity:
            out.append(chi)
    return out
