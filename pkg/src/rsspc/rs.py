"""Narrow-sense Reed-Solomon codes: construction, systematic encoding and
Berlekamp-Massey bounded-distance decoding.

Word vectors are indexed by polynomial degree: ``word[c]`` is the
coefficient of ``x^c``, so syndrome ``r`` is the word evaluated at
``beta^(r+1)`` and column ``c`` of the parity matrix is ``beta^((r+1)c)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .galois import Field

CORRECTED = "corrected"
FAILURE = "failure"


@dataclass(frozen=True, eq=False)
class RsCode:
    field: Field
    k: int
    n: int = field(init=False)
    t: int = field(init=False)
    generator_poly: tuple = field(init=False, repr=False)
    h_s: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gf = self.field
        n = gf.q - 1
        if not 0 < self.k < n:
            raise ConfigurationError(f"need 0 < k < n={n}, got k={self.k}")
        if (n - self.k) % 2:
            raise ConfigurationError(f"n - k = {n - self.k} must be even")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "t", (n - self.k) // 2)

        g = [1]
        for i in range(1, n - self.k + 1):
            g = _poly_mul(gf, g, [gf.alpha_pow(i), 1])
        object.__setattr__(self, "generator_poly", tuple(g))

        r = np.arange(1, n - self.k + 1)[:, None]
        c = np.arange(n)[None, :]
        h_s = gf.exp[(r * c) % (n)]
        h_s.setflags(write=False)
        object.__setattr__(self, "h_s", h_s)

    @property
    def delta(self) -> int:
        return self.n - self.k + 1

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def n_b(self) -> int:
        return self.n * self.field.p

    @property
    def k_b(self) -> int:
        return self.k * self.field.p

    @property
    def m_b(self) -> int:
        return self.n_b - self.k_b


@dataclass
class DecodeOutcome:
    status: str
    codeword: np.ndarray | None = None
    errors_corrected: int = 0

    @property
    def ok(self) -> bool:
        return self.status == CORRECTED


def build_rs(field: Field, k: int) -> RsCode:
    return RsCode(field, k)


def _poly_mul(gf: Field, a, b) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] ^= gf.mul(ai, bj)
    return out


def _poly_mod(gf: Field, num: list, den: tuple) -> list:
    """Remainder of num / den; den must be monic."""
    rem = list(num)
    d = len(den) - 1
    for i in range(len(rem) - 1, d - 1, -1):
        coef = rem[i]
        if coef:
            for j in range(d + 1):
                rem[i - d + j] ^= gf.mul(coef, den[j])
    return rem[:d]


def _poly_eval(gf: Field, poly, x: int) -> int:
    acc = 0
    for coef in reversed(poly):
        acc = gf.mul(acc, x) ^ coef
    return acc


def encode(code: RsCode, message) -> np.ndarray:
    """Systematic encoding: message in positions 0..k-1, parity in k..n-1.

    The parity block is ``(x^(n-k) m(x)) mod g(x)``, placed at ``x^k``;
    since ``x^n = 1`` modulo ``g`` this makes the whole word a multiple of ``g``.
    """
    message = [int(s) for s in message]
    if len(message) != code.k:
        raise ValueError(f"message must have {code.k} symbols, got {len(message)}")
    nk = code.n - code.k
    parity = _poly_mod(code.field, [0] * nk + message, code.generator_poly)
    return np.array(message + parity, dtype=np.int64)


def syndromes(code: RsCode, word) -> np.ndarray:
    word = np.asarray(word, dtype=np.int64)
    if word.shape != (code.n,):
        raise ValueError(f"word must have {code.n} symbols")
    prods = code.field.mul_vec(code.h_s, word[None, :])
    return np.bitwise_xor.reduce(prods, axis=1)


def is_codeword(code: RsCode, word) -> bool:
    return not syndromes(code, word).any()


def berlekamp_massey(gf: Field, synd) -> tuple[list, int]:
    """Shortest LFSR (connection polynomial, length) generating ``synd``."""
    conn = [1]
    prev = [1]
    length = 0
    shift = 1
    prev_disc = 1
    for i, s in enumerate(synd):
        d = s
        for j in range(1, length + 1):
            if j < len(conn):
                d ^= gf.mul(conn[j], synd[i - j])
        if d == 0:
            shift += 1
            continue
        coef = gf.div(d, prev_disc)
        update = [0] * shift + [gf.mul(coef, b) for b in prev]
        new = conn + [0] * max(0, len(update) - len(conn))
        for j, u in enumerate(update):
            new[j] ^= u
        if 2 * length <= i:
            prev = conn
            length = i + 1 - length
            prev_disc = d
            shift = 1
        else:
            shift += 1
        conn = new
    while len(conn) > 1 and conn[-1] == 0:
        conn.pop()
    return conn, length


def _syndromes_list(code: RsCode, word: list) -> list:
    exp, log = code.field._exp, code.field._log
    order = code.field.q - 1
    synd = [0] * (code.n - code.k)
    for c, v in enumerate(word):
        if v:
            base = log[v]
            for r in range(len(synd)):
                synd[r] ^= exp[(base + (r + 1) * c) % order]
    return synd


def bm_decode(code: RsCode, word) -> DecodeOutcome:
    """Errors-only bounded-distance decoding.

    Returns a corrected codeword when the error locator's degree equals the
    number of its distinct roots among the n positions and every Forney value
    is nonzero; otherwise ``failure``. A corrected word is always a codeword
    but may be the wrong one when more than t symbols were in error.
    """
    gf = code.field
    exp, log = gf._exp, gf._log
    order = gf.q - 1
    values = [int(v) for v in word]
    if len(values) != code.n:
        raise ValueError(f"word must have {code.n} symbols")
    synd = _syndromes_list(code, values)
    if not any(synd):
        return DecodeOutcome(CORRECTED, np.array(values, dtype=np.int64), 0)

    locator, length = berlekamp_massey(gf, synd)
    degree = len(locator) - 1
    if length > code.t or degree != length:
        return DecodeOutcome(FAILURE)

    # Chien search: position j is in error iff locator(beta^-j) == 0.
    terms = [(i, log[c]) for i, c in enumerate(locator) if c and i]
    positions = []
    for j in range(code.n):
        acc = locator[0]
        for i, lc in terms:
            acc ^= exp[(lc - i * j) % order]
        if acc == 0:
            positions.append(j)
    if len(positions) != degree:
        return DecodeOutcome(FAILURE)

    # Forney with first consecutive root beta^1: e = omega(X^-1) / locator'(X^-1).
    nk = code.n - code.k
    omega = _poly_mul(gf, synd, locator)[:nk]
    deriv = [locator[i] if i % 2 else 0 for i in range(1, len(locator))]
    for j in positions:
        x_inv = exp[(-j) % order]
        den = _poly_eval(gf, deriv, x_inv)
        num = _poly_eval(gf, omega, x_inv)
        if den == 0 or num == 0:
            return DecodeOutcome(FAILURE)
        values[j] ^= exp[(log[num] - log[den]) % order]
    return DecodeOutcome(CORRECTED, np.array(values, dtype=np.int64), degree)


def bm_decode_many(code: RsCode, words) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised ``bm_decode`` over a stack of words.

    Returns ``(ok, corrected, n_errors)``; rows of ``corrected`` where
    ``ok`` is False hold the input unchanged.
    """
    gf = code.field
    order = gf.q - 1
    exp, log = gf.exp, gf.log
    words = np.asarray(words, dtype=np.int64)
    batch = words.shape[0]
    nk, t = code.n - code.k, code.t
    if batch == 0:
        return np.zeros(0, bool), words.copy(), np.zeros(0, np.int64)

    def mul(a, b):
        out = exp[(log[a] + log[b]) % order]
        return np.where((a == 0) | (b == 0), 0, out)

    synd = np.bitwise_xor.reduce(mul(words[:, None, :], code.h_s[None, :, :]), axis=2)

    # Berlekamp-Massey, one LFSR per row.
    width = nk + 1
    conn = np.zeros((batch, width), np.int64)
    conn[:, 0] = 1
    prev = conn.copy()
    length = np.zeros(batch, np.int64)
    shift = np.ones(batch, np.int64)
    prev_disc = np.ones(batch, np.int64)
    cols = np.arange(width)
    for i in range(nk):
        d = synd[:, i].copy()
        if i:
            d ^= np.bitwise_xor.reduce(mul(conn[:, 1 : i + 1], synd[:, i - 1 :: -1]), axis=1)
        nonzero = d != 0
        coef = np.where(nonzero, exp[(log[np.maximum(d, 1)] - log[prev_disc]) % order], 0)
        src = cols[None, :] - shift[:, None]
        moved = np.where(src >= 0, np.take_along_axis(prev, np.clip(src, 0, width - 1), axis=1), 0)
        new = conn ^ mul(coef[:, None], moved)
        grow = nonzero & (2 * length <= i)
        prev = np.where(grow[:, None], conn, prev)
        length = np.where(grow, i + 1 - length, length)
        prev_disc = np.where(grow, d, prev_disc)
        shift = np.where(grow, 1, shift + 1)
        conn = new

    degree = np.where(conn != 0, cols[None, :], 0).max(axis=1)
    ok = (length <= t) & (degree == length)

    # Chien search over all positions at once: (batch, n, width).
    j = np.arange(code.n)
    lc = log[conn]
    powers = exp[(lc[:, None, :] - cols[None, None, :] * j[None, :, None]) % order]
    powers = np.where(conn[:, None, :] != 0, powers, 0)
    is_root = np.bitwise_xor.reduce(powers, axis=2) == 0
    ok &= is_root.sum(axis=1) == degree

    # Forney: omega = S * locator mod x^(n-k); errors at roots X^-1 = beta^-j.
    omega = np.zeros((batch, nk), np.int64)
    for a in range(nk):
        for b in range(min(width, nk - a)):
            omega[:, a + b] ^= mul(synd[:, a], conn[:, b])
    x_inv_pow = (-(np.arange(nk)[None, :] * j[:, None])) % order  # (n, nk)
    num = np.bitwise_xor.reduce(
        np.where(omega[:, None, :] != 0, exp[(log[omega][:, None, :] + x_inv_pow[None]) % order], 0),
        axis=2,
    )
    odd = np.zeros_like(conn)
    odd[:, 0 : width - 1 : 2] = conn[:, 1::2]  # formal derivative, char 2
    den_pow = x_inv_pow[:, :width]
    den = np.bitwise_xor.reduce(
        np.where(odd[:, None, : den_pow.shape[1]] != 0,
                 exp[(log[odd][:, None, : den_pow.shape[1]] + den_pow[None]) % order], 0),
        axis=2,
    )
    bad = is_root & ((den == 0) | (num == 0))
    ok &= ~bad.any(axis=1)
    values = np.where(is_root & (den != 0) & (num != 0),
                      exp[(log[np.maximum(num, 1)] - log[np.maximum(den, 1)]) % order], 0)
    clean = ~synd.any(axis=1)
    ok |= clean
    corrected = np.where(ok[:, None], words ^ np.where(clean[:, None], 0, values), words)
    return ok, corrected, np.where(ok & ~clean, degree, 0)
