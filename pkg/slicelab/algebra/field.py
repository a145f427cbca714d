"""
Exact scalar fields: GF(p) for prime p, and the rationals.

GF(p) scalars are Python ints in [0, p); rational scalars are
``fractions.Fraction`` (always lowest terms, positive denominator).
Matrices are numpy arrays: int64 for GF(p), object dtype holding
Fractions for the rationals.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Union

import numpy as np
from sympy import isprime

from slicelab.utils.errors import DimensionMismatchError, FieldError

Scalar = Union[int, Fraction]

# sums of a few thousand products of reduced entries stay inside int64
_MAX_PRIME = 2**26


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(p) (characteristic p) or the rationals (characteristic 0)."""

    characteristic: int

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or (p != 0 and not isprime(p)):
            raise FieldError(f"Characteristic must be 0 or a prime, got {p}")
        if p > _MAX_PRIME:
            raise FieldError(f"Prime {p} too large for exact int64 elimination")

    @classmethod
    def parse(cls, flag: str) -> "FieldSpec":
        """Parse a cli field flag: gf2, gf3, gfp:<p>, rat."""
        text = flag.strip().lower()
        if text in ("rat", "q", "qq"):
            return cls(0)
        if text.startswith("gfp:"):
            digits = text[4:]
        elif text.startswith("gf"):
            digits = text[2:]
        else:
            raise FieldError(f"Unknown field flag: {flag!r}")
        if not digits.isdigit():
            raise FieldError(f"Unknown field flag: {flag!r}")
        p = int(digits)
        if p == 0:
            raise FieldError("Use 'rat' for the rationals")
        return cls(p)

    @property
    def flag(self) -> str:
        p = self.characteristic
        if p == 0:
            return "rat"
        return f"gf{p}" if p in (2, 3) else f"gfp:{p}"

    def __str__(self) -> str:
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"

    @property
    def is_finite(self) -> bool:
        return self.characteristic != 0

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise FieldError("The rationals have no finite order")
        return self.characteristic

    @cached_property
    def dtype(self) -> Any:
        return np.int64 if self.is_finite else object

    # scalars

    def scalar(self, value: Any) -> Scalar:
        """Coerce an int, Fraction or numpy integer into a canonical field element."""
        p = self.characteristic
        if p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise FieldError(f"Denominator of {value} vanishes in GF({p})")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    @property
    def zero(self) -> Scalar:
        return self.scalar(0)

    @property
    def one(self) -> Scalar:
        return self.scalar(1)

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return self.scalar(a * b)

    def neg(self, a: Scalar) -> Scalar:
        return self.scalar(-a)

    def inv(self, a: Scalar) -> Scalar:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.characteristic == 0:
            return 1 / Fraction(a)
        return pow(int(a), -1, self.characteristic)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def format_scalar(self, a: Scalar) -> str:
        """Integers print bare; rationals as num/den."""
        if isinstance(a, Fraction) and a.denominator != 1:
            return f"{a.numerator}/{a.denominator}"
        return str(int(a))

    # arrays

    def array(self, rows: Iterable[Iterable[Any]], ncols: int = 0) -> np.ndarray:
        """Build a normalized 2-d matrix over this field."""
        data = [[self.scalar(x) for x in row] for row in rows]
        if not data:
            return self.zeros((0, ncols))
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise DimensionMismatchError("ragged matrix")
        out = np.empty((len(data), width), dtype=self.dtype)
        for i, row in enumerate(data):
            for j, x in enumerate(row):
                out[i, j] = x
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.is_finite:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        """Bring integer arithmetic results back into [0, p); identity over QQ."""
        if self.is_finite:
            return np.mod(arr, self.characteristic)
        return arr

    def to_tuple(self, vector: np.ndarray) -> tuple:
        """Canonical hashable Python form of a vector."""
        return tuple(self.scalar(x) for x in vector)

    def random_array(self, rng: np.random.Generator, shape, bound: int = 5) -> np.ndarray:
        """Uniform entries over GF(p); integers in [-bound, bound] over QQ."""
        if self.is_finite:
            return rng.integers(0, self.characteristic, size=shape, dtype=np.int64)
        ints = rng.integers(-bound, bound + 1, size=shape)
        flat = np.empty(ints.size, dtype=object)
        for i, x in enumerate(ints.flat):
            flat[i] = Fraction(int(x))
        return flat.reshape(ints.shape)


GF2 = FieldSpec(2)
GF3 = FieldSpec(3)
GF5 = FieldSpec(5)
QQ = FieldSpec(0)
