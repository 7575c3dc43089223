"""2-adic numbers of the form 2^-scale * value, value known mod 2^bits."""

from dataclasses import dataclass

# precision recorded for exactly known zeros
EXACT_BITS = 1 << 30


class PrecisionError(ArithmeticError):
    """Not enough 2-adic (or pi_n-adic) precision left to certify a result."""


class IntegralityError(ArithmeticError):
    """A quantity that must be integral carries a denominator."""


@dataclass(frozen=True)
class ScaledInt:
    value: int
    scale: int
    bits: int

    @classmethod
    def make(cls, value, scale, bits):
        if bits <= 0:
            value = 0
        elif value < 0 or value.bit_length() > bits:
            value &= (1 << bits) - 1
        while scale > 0 and value & 1 == 0 and bits > 0:
            value >>= 1
            scale -= 1
            bits -= 1
        if bits <= 0:
            value = 0
        return cls(value, scale, bits)

    @property
    def abs_bits(self):
        """Absolute 2-adic precision: the value is known mod 2^abs_bits."""
        return self.bits - self.scale

    def _align(self, other):
        s = max(self.scale, other.scale)
        a = self.value << (s - self.scale)
        b = other.value << (s - other.scale)
        bits = min(self.bits + s - self.scale, other.bits + s - other.scale)
        return a, b, s, bits

    def __add__(self, other):
        if isinstance(other, int):
            other = ScaledInt.exact(other, self.bits + self.scale)
        a, b, s, bits = self._align(other)
        return ScaledInt.make(a + b, s, bits)

    __radd__ = __add__

    def __neg__(self):
        return ScaledInt.make(-self.value, self.scale, self.bits)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, ScaledInt):
            return ScaledInt.make(self.value * k.value, self.scale + k.scale, min(self.bits, k.bits))
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return ScaledInt(0, 0, EXACT_BITS)
        r = (k & -k).bit_length() - 1
        drop = min(r, self.scale)
        return ScaledInt.make(self.value * (k >> drop), self.scale - drop, self.bits + r - drop)

    __rmul__ = __mul__

    def mul_pow2(self, k):
        if k >= 0:
            return self * (1 << k)
        return ScaledInt.make(self.value, self.scale - k, self.bits)

    @classmethod
    def exact(cls, value, bits):
        return cls.make(value, 0, bits)

    def is_integral(self):
        return self.scale == 0

    def mod(self, k):
        """Residue mod 2^k; requires integrality and k certified bits."""
        if self.scale:
            raise IntegralityError(f"value has a denominator 2^{self.scale}")
        if self.bits < k:
            raise PrecisionError(f"only {self.bits} bits known, {k} requested")
        return self.value & ((1 << k) - 1)
