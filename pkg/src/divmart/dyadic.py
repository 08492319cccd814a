"""Exact dyadic rationals num / 2**exp with arbitrary-precision integers.

This is the only number type used for set measures, martingale values and
certificate bounds.  Plain ``fractions.Fraction`` would work arithmetically,
but the canonical (numerator, exponent) pair is part of the on-disk format
and the restriction to powers of two is a correctness guard: any operation
that would leave the dyadic lattice (e.g. dividing by 3) simply does not
exist here.

Canonical form: ``num`` is odd or zero, and ``exp == 0`` when ``num == 0``.
``exp`` is always a natural number, so every value is an integer multiple of
2**(-exp).
"""

from __future__ import annotations

from typing import Union

_IntLike = Union[int, "Dyadic"]


class Dyadic:
    __slots__ = ("num", "exp")

    num: int
    exp: int

    def __init__(self, num: int, exp: int = 0) -> None:
        if exp < 0:
            # Normalize values given as num * 2**(-exp) with exp < 0.
            num <<= -exp
            exp = 0
        if num == 0:
            exp = 0
        else:
            while num % 2 == 0 and exp > 0:
                num //= 2
                exp -= 1
        self.num = num
        self.exp = exp

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Dyadic":
        return Dyadic(0)

    @staticmethod
    def one() -> "Dyadic":
        return Dyadic(1)

    @staticmethod
    def pow2(k: int) -> "Dyadic":
        """2**k for any integer k (negative k gives 1/2**(-k))."""
        if k >= 0:
            return Dyadic(1 << k)
        return Dyadic(1, -k)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other: _IntLike) -> "Dyadic":
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other)
        raise TypeError(f"cannot mix Dyadic with {type(other).__name__}")

    def __add__(self, other: _IntLike) -> "Dyadic":
        o = self._coerce(other)
        e = max(self.exp, o.exp)
        return Dyadic((self.num << (e - self.exp)) + (o.num << (e - o.exp)), e)

    __radd__ = __add__

    def __sub__(self, other: _IntLike) -> "Dyadic":
        o = self._coerce(other)
        e = max(self.exp, o.exp)
        return Dyadic((self.num << (e - self.exp)) - (o.num << (e - o.exp)), e)

    def __rsub__(self, other: _IntLike) -> "Dyadic":
        return self._coerce(other).__sub__(self)

    def __mul__(self, other: _IntLike) -> "Dyadic":
        o = self._coerce(other)
        return Dyadic(self.num * o.num, self.exp + o.exp)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.num, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.num), self.exp)

    def mul_pow2(self, k: int) -> "Dyadic":
        """Exact multiplication by 2**k (k may be negative)."""
        return Dyadic(self.num, self.exp - k)

    def half(self) -> "Dyadic":
        return Dyadic(self.num, self.exp + 1)

    # -- comparisons ---------------------------------------------------

    def _cmp(self, other: _IntLike) -> int:
        o = self._coerce(other)
        e = max(self.exp, o.exp)
        a = self.num << (e - self.exp)
        b = o.num << (e - o.exp)
        return (a > b) - (a < b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (Dyadic, int)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other: _IntLike) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: _IntLike) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: _IntLike) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: _IntLike) -> bool:
        return self._cmp(other) >= 0

    def __hash__(self) -> int:
        return hash((self.num, self.exp))

    # -- rendering -----------------------------------------------------

    def __float__(self) -> float:
        return self.num / (1 << self.exp)

    def decimal(self) -> str:
        """Exact decimal expansion (dyadics always terminate in base 10)."""
        if self.exp == 0:
            return str(self.num)
        sign = "-" if self.num < 0 else ""
        scaled = abs(self.num) * 5 ** self.exp  # num/2^e = num*5^e / 10^e
        digits = str(scaled).rjust(self.exp + 1, "0")
        ipart, fpart = digits[: -self.exp], digits[-self.exp :]
        return f"{sign}{ipart}.{fpart}"

    def __repr__(self) -> str:
        if self.exp == 0:
            return f"Dyadic({self.num})"
        return f"Dyadic({self.num}, {self.exp})"

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/2^{self.exp}"

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        return {"num": str(self.num), "exp": self.exp}

    @staticmethod
    def from_json(obj: dict) -> "Dyadic":
        num = int(obj["num"])
        exp = obj["exp"]
        if not isinstance(exp, int) or exp < 0:
            raise ValueError(f"bad dyadic exponent: {exp!r}")
        d = Dyadic(num, exp)
        if d.num != num or d.exp != exp:
            raise ValueError(f"dyadic not in canonical form: {obj!r}")
        return d


ZERO = Dyadic(0)
ONE = Dyadic(1)
