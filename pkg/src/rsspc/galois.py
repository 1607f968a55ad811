"""GF(2^p) arithmetic with log/antilog tables and polynomial-basis bit maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Conventional primitive polynomials, bit i is the coefficient of x^i.
PRIMITIVE_POLYS = {
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10001001,  # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,  # x^9 + x^4 + 1
    10: 0b10000001001,  # x^10 + x^3 + 1
    11: 0b100000000101,  # x^11 + x^2 + 1
    12: 0b1000001010011,  # x^12 + x^6 + x^4 + x + 1
}


def poly_mulmod(a: int, b: int, poly: int, p: int) -> int:
    """Carry-less multiply of two field elements reduced modulo ``poly``.

    Table-free; used to build the tables and as an independent check.
    """
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> p:
            a ^= poly
    return result


@dataclass(frozen=True, eq=False)
class Field:
    p: int
    primitive_poly: int
    q: int = field(init=False)
    exp: np.ndarray = field(init=False, repr=False)
    log: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        q = 1 << self.p
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            if log[x] != -1:
                raise ConfigurationError(
                    f"polynomial {self.primitive_poly:#b} is not primitive for p={self.p}"
                )
            exp[i] = x
            log[x] = i
            x = poly_mulmod(x, 2, self.primitive_poly, self.p)
        if x != 1:
            raise ConfigurationError(
                f"polynomial {self.primitive_poly:#b} is not primitive for p={self.p}"
            )
        # Doubled antilog table so exp[log a + log b] needs no modulo.
        exp[q - 1 :] = exp[: q - 1]
        exp.setflags(write=False)
        log.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "exp", exp)
        object.__setattr__(self, "log", log)
        # Plain-list copies: scalar indexing is much faster on lists.
        object.__setattr__(self, "_exp", exp.tolist())
        object.__setattr__(self, "_log", log.tolist())

    @property
    def order(self) -> int:
        """Multiplicative group order q - 1."""
        return self.q - 1

    @property
    def beta(self) -> int:
        return 2

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^p)")
        if a == 0:
            return 0
        return self._exp[(self._log[a] - self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^p)")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero has no inverse in GF(2^p)")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def alpha_pow(self, e: int) -> int:
        """beta**e for any integer exponent."""
        return self._exp[e % (self.q - 1)]

    def mul_vec(self, a: np.ndarray, b) -> np.ndarray:
        """Elementwise product of symbol arrays (broadcasting)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)


def build_field(p: int, primitive_poly: int | None = None) -> Field:
    if not 2 <= p <= 12:
        raise ConfigurationError(f"unsupported extension degree p={p} (need 2 <= p <= 12)")
    if primitive_poly is None:
        primitive_poly = PRIMITIVE_POLYS[p]
    elif primitive_poly >> p != 1:
        raise ConfigurationError(f"primitive polynomial must have degree {p}")
    return Field(p, primitive_poly)


def gf_add(f: Field, a: int, b: int) -> int:
    return a ^ b


def gf_mul(f: Field, a: int, b: int) -> int:
    return f.mul(a, b)


def gf_inv(f: Field, a: int) -> int:
    return f.inv(a)


def gf_pow(f: Field, a: int, e: int) -> int:
    return f.pow(a, e)


def symbol_to_bits(f: Field, s: int) -> np.ndarray:
    """Bit h of the result is the coefficient of beta^h."""
    if not 0 <= s < f.q:
        raise ValueError(f"symbol {s} out of range for GF(2^{f.p})")
    return ((s >> np.arange(f.p)) & 1).astype(np.uint8)


def bits_to_symbol(f: Field, bits) -> int:
    bits = np.asarray(bits)
    if bits.shape != (f.p,):
        raise ValueError(f"expected {f.p} bits, got shape {bits.shape}")
    return int(np.dot(bits.astype(np.int64) & 1, 1 << np.arange(f.p)))


def symbols_to_bits(f: Field, symbols) -> np.ndarray:
    """Vectorised expansion; last axis grows by a factor of p."""
    symbols = np.asarray(symbols, dtype=np.int64)
    bits = (symbols[..., None] >> np.arange(f.p)) & 1
    return bits.reshape(*symbols.shape[:-1], -1).astype(np.uint8)


def bits_to_symbols(f: Field, bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    grouped = bits.reshape(*bits.shape[:-1], -1, f.p)
    return grouped @ (1 << np.arange(f.p))
