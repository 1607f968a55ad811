"""RS-SPC product codes P(n, k, w, L).

Frame layout: L RS codewords back to back (each symbol-major, basis
coefficient minor), followed by the n_b/w SPC parity bits. Parity bit j
covers bits ``j*w .. j*w + w - 1`` of every RS row.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .binary_image import BinaryMatrix, expand, sparsify
from .errors import ConfigurationError
from .galois import bits_to_symbols, build_field, symbols_to_bits
from .rs import RsCode, build_rs, encode


@functools.lru_cache(maxsize=16)
def _sparse_image(p: int, primitive_poly: int, k: int) -> BinaryMatrix:
    code = build_rs(build_field(p, primitive_poly), k)
    return sparsify(expand(code), code)


def sparse_parity_matrix(rs: RsCode) -> BinaryMatrix:
    """Sparsified binary parity-check matrix of ``rs`` (memoised per code)."""
    return _sparse_image(rs.field.p, rs.field.primitive_poly, rs.k)


@dataclass(frozen=True, eq=False)
class ProductCode:
    rs: RsCode
    w: int
    L: int
    h_tilde: BinaryMatrix = field(repr=False)
    generator_bits: np.ndarray = field(init=False, repr=False)
    lower_index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rs = self.rs
        if self.w < 1 or rs.p % self.w:
            raise ConfigurationError(f"tuple width w={self.w} must divide p={rs.p}")
        if self.L < 1:
            raise ConfigurationError(f"need L >= 1, got {self.L}")
        if (self.h_tilde.rows, self.h_tilde.cols) != (rs.m_b, rs.n_b):
            raise ConfigurationError("component parity-check matrix has the wrong shape")

        # Binary generator: row i is the codeword image of message bit i.
        gen = np.zeros((rs.k_b, rs.n_b), dtype=np.uint8)
        for i in range(rs.k_b):
            msg = np.zeros(rs.k, dtype=np.int64)
            msg[i // rs.p] = 1 << (i % rs.p)
            gen[i] = symbols_to_bits(rs.field, encode(rs, msg))
        gen.setflags(write=False)
        object.__setattr__(self, "generator_bits", gen)

        # Lower check j: tuple j of every RS row, then parity bit j.
        j = np.arange(self.n_spc)[:, None, None]
        l = np.arange(self.L)[None, :, None]
        i = np.arange(self.w)[None, None, :]
        data = (l * rs.n_b + j * self.w + i).reshape(self.n_spc, -1)
        parity = (self.L * rs.n_b + np.arange(self.n_spc))[:, None]
        idx = np.hstack([data, parity])
        idx.setflags(write=False)
        object.__setattr__(self, "lower_index", idx)

    @property
    def n_b(self) -> int:
        return self.rs.n_b

    @property
    def n_spc(self) -> int:
        """Number of SPC parity bits (= lower check rows), n_b / w."""
        return self.rs.n_b // self.w

    @property
    def n_data(self) -> int:
        return self.rs.n_b * self.L

    @property
    def n_p(self) -> int:
        return self.n_data + self.n_spc

    @property
    def rate(self) -> float:
        n, k, w, L = self.rs.n, self.rs.k, self.w, self.L
        return w * L * k / ((w * L + 1) * n)

    @property
    def spc_row_weight(self) -> int:
        return self.w * self.L + 1

    @property
    def n_checks(self) -> int:
        return self.rs.m_b * self.L + self.n_spc

    def component_slice(self, l: int) -> slice:
        return slice(l * self.n_b, (l + 1) * self.n_b)

    def parity_bits(self, data_bits: np.ndarray) -> np.ndarray:
        """SPC parities for RS row images of shape (..., L, n_b)."""
        tuples = data_bits.reshape(*data_bits.shape[:-2], self.L, self.n_spc, self.w)
        return np.bitwise_xor.reduce(tuples, axis=(-3, -1)).astype(np.uint8)

    def encode_bits(self, message_bits: np.ndarray) -> np.ndarray:
        """Batch encoder: message bits (..., L, k_b) -> frames (..., N_P)."""
        rows = (message_bits.astype(np.int64) @ self.generator_bits.astype(np.int64)) & 1
        rows = rows.astype(np.uint8)
        parity = self.parity_bits(rows)
        flat = rows.reshape(*rows.shape[:-2], self.n_data)
        return np.concatenate([flat, parity], axis=-1)

    def upper_syndrome(self, word: np.ndarray) -> np.ndarray:
        rows = np.asarray(word[: self.n_data], dtype=np.uint8).reshape(self.L, self.n_b)
        return self.h_tilde.multiply(rows)

    def lower_syndrome(self, word: np.ndarray) -> np.ndarray:
        return np.bitwise_xor.reduce(np.asarray(word, dtype=np.uint8)[self.lower_index], axis=1)

    def spc_matrix(self) -> np.ndarray:
        """The (n_b/w) x n_b block with disjoint runs of w ones."""
        r = np.zeros((self.n_spc, self.n_b), dtype=np.uint8)
        for j in range(self.n_spc):
            r[j, j * self.w : (j + 1) * self.w] = 1
        return r

    def composite_matrix(self) -> np.ndarray:
        """Dense H(n, k, w, L); intended for small codes and inspection."""
        h = np.zeros((self.n_checks, self.n_p), dtype=np.uint8)
        dense = self.h_tilde.to_dense()
        m_b, n_b = self.rs.m_b, self.n_b
        for l in range(self.L):
            h[l * m_b : (l + 1) * m_b, l * n_b : (l + 1) * n_b] = dense
        lower = h[m_b * self.L :]
        r = self.spc_matrix()
        for l in range(self.L):
            lower[:, l * n_b : (l + 1) * n_b] = r
        lower[:, self.n_data :] = np.eye(self.n_spc, dtype=np.uint8)
        return h


def build_product(rs: RsCode, w: int, L: int, h_tilde: BinaryMatrix | None = None) -> ProductCode:
    if w < 1 or rs.p % w:
        raise ConfigurationError(f"tuple width w={w} must divide p={rs.p}")
    if h_tilde is None:
        h_tilde = sparse_parity_matrix(rs)
    return ProductCode(rs, w, L, h_tilde)


def encode_product(pc: ProductCode, messages) -> np.ndarray:
    messages = np.asarray(messages, dtype=np.int64)
    if messages.shape != (pc.L, pc.rs.k):
        raise ValueError(f"messages must have shape ({pc.L}, {pc.rs.k})")
    rows = np.stack([symbols_to_bits(pc.rs.field, encode(pc.rs, m)) for m in messages])
    return np.concatenate([rows.reshape(-1), pc.parity_bits(rows)])


def check_product(pc: ProductCode, word) -> bool:
    word = np.asarray(word, dtype=np.uint8)
    if word.shape != (pc.n_p,):
        raise ValueError(f"word must have {pc.n_p} bits, got shape {word.shape}")
    return not pc.upper_syndrome(word).any() and not pc.lower_syndrome(word).any()


def frame_symbols(pc: ProductCode, word: np.ndarray) -> np.ndarray:
    """RS symbol rows (L, n) of a frame's data part."""
    return bits_to_symbols(pc.rs.field, np.asarray(word[: pc.n_data]).reshape(pc.L, pc.n_b))
