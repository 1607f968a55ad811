"""Binary images of RS parity-check matrices and row-space-preserving
density reduction.

Rows are stored bit-packed in little-endian uint64 words: column ``c`` lives
in word ``c // 64`` at bit ``c % 64``.
"""

from __future__ import annotations

import logging
from typing import TextIO

import numpy as np

from .rs import RsCode

log = logging.getLogger(__name__)


class BinaryMatrix:
    def __init__(self, words: np.ndarray, cols: int):
        self.words = np.ascontiguousarray(words, dtype=np.uint64)
        self.words.setflags(write=False)
        self.rows = self.words.shape[0]
        self.cols = cols

    @classmethod
    def from_dense(cls, dense) -> BinaryMatrix:
        dense = np.asarray(dense, dtype=np.uint8) & 1
        rows, cols = dense.shape
        n_words = max(1, -(-cols // 64))
        padded = np.zeros((rows, n_words * 64), dtype=np.uint8)
        padded[:, :cols] = dense
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(packed.view("<u8").astype(np.uint64), cols)

    def to_dense(self) -> np.ndarray:
        as_bytes = self.words.astype("<u8").view(np.uint8)
        bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
        return bits[:, : self.cols]

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1).astype(np.int64)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0, dtype=np.int64)

    @property
    def ones(self) -> int:
        return int(self.row_weights().sum())

    @property
    def density(self) -> float:
        return density(self)

    def row_support(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.to_dense()[i])

    def multiply(self, vectors) -> np.ndarray:
        """GF(2) product ``M @ v`` for one vector or a stack of row vectors."""
        v = np.asarray(vectors, dtype=np.uint8)
        return (v @ self.to_dense().T.astype(np.int64)) & 1

    def __eq__(self, other):
        return (
            isinstance(other, BinaryMatrix)
            and self.cols == other.cols
            and np.array_equal(self.words, other.words)
        )

    def __repr__(self):
        return f"BinaryMatrix({self.rows}x{self.cols}, density={self.density:.4f})"


def density(m: BinaryMatrix) -> float:
    if m.rows == 0 or m.cols == 0:
        return 0.0
    return m.ones / (m.rows * m.cols)


def expand(code: RsCode) -> BinaryMatrix:
    """Binary image of the symbol parity-check matrix.

    Symbol entry ``h`` at (r, c) becomes the p x p block whose column j is
    the bit vector of ``h * beta^j``; rows are ``r*p + i``, columns ``c*p + j``.
    """
    gf = code.field
    p = gf.p
    h_s = code.h_s
    nk, n = h_s.shape
    # products[r, c, j] = h_s[r, c] * beta^j
    products = gf.mul_vec(h_s[:, :, None], gf.exp[np.arange(p)][None, None, :])
    bits = (products[..., None] >> np.arange(p)) & 1  # [r, c, j, i]
    dense = bits.transpose(0, 3, 1, 2).reshape(nk * p, n * p)
    return BinaryMatrix.from_dense(dense)


def _greedy_pairs(words: np.ndarray, cols: int, max_passes: int) -> np.ndarray:
    """Replace row i by row i XOR row j whenever that strictly lowers its
    weight; sweep until no pair improves or the pass limit is hit."""
    words = words.copy()
    rows = words.shape[0]
    weights = np.bitwise_count(words).sum(axis=1).astype(np.int64)
    big = np.iinfo(np.int64).max
    for sweep in range(max_passes):
        improved = 0
        for i in range(rows):
            cand = np.bitwise_count(words ^ words[i]).sum(axis=1).astype(np.int64)
            cand[i] = big
            j = int(np.argmin(cand))
            if cand[j] < weights[i]:
                words[i] ^= words[j]
                weights[i] = cand[j]
                improved += 1
        log.debug("pair sweep %d: %d rows improved, density %.4f",
                  sweep, improved, weights.sum() / (rows * cols))
        if not improved:
            break
    return words


class _PackedEchelon:
    """Incremental GF(2) basis over packed rows, one pivot bit per row."""

    def __init__(self, n_words: int, capacity: int):
        self.rows = np.zeros((capacity, n_words), dtype=np.uint64)
        self.pivot_word = np.zeros(capacity, dtype=np.int64)
        self.pivot_mask = np.zeros(capacity, dtype=np.uint64)
        self.size = 0
        self.capacity = capacity

    @property
    def full(self) -> bool:
        return self.size == self.capacity

    def insert(self, batch: np.ndarray) -> list[int]:
        """Add the rows of ``batch`` that are independent of the basis so
        far; returns their indices within ``batch``."""
        batch = batch.copy()
        for r in range(self.size):
            hit = (batch[:, self.pivot_word[r]] & self.pivot_mask[r]) != 0
            batch[hit] ^= self.rows[r]
        added = []
        for i in range(batch.shape[0]):
            v = batch[i]
            nonzero = np.flatnonzero(v)
            if nonzero.size == 0:
                continue
            w = int(nonzero[0])
            x = int(v[w])
            mask = np.uint64(x & -x)
            rest = batch[i + 1 :]
            rest[(rest[:, w] & mask) != 0] ^= v
            self.rows[self.size] = v
            self.pivot_word[self.size] = w
            self.pivot_mask[self.size] = mask
            self.size += 1
            added.append(i)
            if self.full:
                break
        return added


def _trace_coordinates(code: RsCode) -> np.ndarray:
    """phi[x] packs (Tr(x beta^j))_j: a check row restricted to one symbol
    position equals phi of the matching dual-code symbol."""
    gf = code.field
    trace = np.zeros(gf.q, dtype=np.int64)
    for x in range(gf.q):
        acc, y = 0, x
        for _ in range(gf.p):
            acc ^= y
            y = gf.mul(y, y)
        trace[x] = acc
    phi = np.zeros(gf.q, dtype=np.int64)
    for j in range(gf.p):
        phi |= trace[gf.mul_vec(np.arange(gf.q), gf.alpha_pow(j))] << j
    return phi


def _orbit_refine(words: np.ndarray, code: RsCode) -> np.ndarray:
    """Rebuild the row set as a minimum-weight basis drawn from scalar
    multiples and cyclic symbol shifts of the current rows.

    Every candidate is a binary image of a dual-code word, so the result
    spans the same space as the input.
    """
    gf, p, n = code.field, code.field.p, code.n
    rows = words.shape[0]
    n_words = words.shape[1]
    phi = _trace_coordinates(code)
    phi_inv = np.zeros(gf.q, dtype=np.int64)
    phi_inv[phi] = np.arange(gf.q)
    bit_weight = np.bitwise_count(np.arange(gf.q, dtype=np.uint64)).astype(np.int64)

    dense = BinaryMatrix(words, code.n_b).to_dense().astype(np.int64)
    dual = phi_inv[(dense.reshape(rows, n, p) << np.arange(p)).sum(axis=-1)]
    scalars = np.arange(1, gf.q)
    weights = np.stack([bit_weight[phi[gf.mul_vec(g, dual)]].sum(axis=-1) for g in scalars])

    basis = _PackedEchelon(n_words, rows)
    chosen = []
    for flat in np.argsort(weights, axis=None, kind="stable"):
        g, r = divmod(int(flat), rows)
        image = phi[gf.mul_vec(scalars[g], dual[r])]
        bits = ((image[:, None] >> np.arange(p)) & 1).reshape(-1)
        orbit = np.stack([np.roll(bits, p * s) for s in range(n)])
        packed = BinaryMatrix.from_dense(orbit).words
        chosen.extend(packed[i] for i in basis.insert(packed))
        if basis.full:
            break
    return np.array(chosen, dtype=np.uint64)


def sparsify(
    h_b: BinaryMatrix,
    code: RsCode | None = None,
    max_passes: int = 50,
    max_rounds: int = 4,
) -> BinaryMatrix:
    """Lower the density of ``h_b`` without changing its row space.

    Starts with greedy pairwise row combination. When ``code`` is given and
    ``h_b`` has full rank, follows with rounds of orbit refinement (see
    ``_orbit_refine``) while the density keeps falling.
    """
    words = _greedy_pairs(h_b.words, h_b.cols, max_passes)
    best = BinaryMatrix(words, h_b.cols)
    if code is None or h_b.rows != code.m_b or h_b.cols != code.n_b:
        return best
    for round_ in range(max_rounds):
        words = _greedy_pairs(_orbit_refine(best.words, code), h_b.cols, max_passes)
        cand = BinaryMatrix(words, h_b.cols)
        log.debug("orbit round %d: density %.4f", round_, cand.density)
        if cand.ones >= best.ones:
            break
        best = cand
    return best


def gf2_rank(m: BinaryMatrix | np.ndarray) -> int:
    if isinstance(m, BinaryMatrix):
        m = m.to_dense()
    work = np.array(m, dtype=np.uint8) & 1
    rank = 0
    rows, cols = work.shape
    for col in range(cols):
        if rank == rows:
            break
        pivots = np.flatnonzero(work[rank:, col])
        if pivots.size == 0:
            continue
        piv = rank + pivots[0]
        if piv != rank:
            work[[rank, piv]] = work[[piv, rank]]
        hit = np.flatnonzero(work[:, col])
        hit = hit[hit != rank]
        work[hit] ^= work[rank]
        rank += 1
    return rank


def write_alist(m: BinaryMatrix, out: TextIO) -> None:
    """MacKay alist format with 1-based indices."""
    dense = m.to_dense()
    col_w = dense.sum(axis=0)
    row_w = dense.sum(axis=1)
    out.write(f"{m.cols} {m.rows}\n")
    out.write(f"{int(col_w.max(initial=0))} {int(row_w.max(initial=0))}\n")
    out.write(" ".join(str(int(w)) for w in col_w) + "\n")
    out.write(" ".join(str(int(w)) for w in row_w) + "\n")
    for c in range(m.cols):
        out.write(" ".join(str(int(r) + 1) for r in np.flatnonzero(dense[:, c])) + "\n")
    for r in range(m.rows):
        out.write(" ".join(str(int(c) + 1) for c in np.flatnonzero(dense[r])) + "\n")


def read_alist(src: TextIO) -> BinaryMatrix:
    lines = [ln for ln in src.read().splitlines()]
    cols, rows = map(int, lines[0].split())
    dense = np.zeros((rows, cols), dtype=np.uint8)
    for r in range(rows):
        for c in lines[4 + cols + r].split():
            dense[r, int(c) - 1] = 1
    return BinaryMatrix.from_dense(dense)
