"""Two-phase decoding of RS-SPC product codes.

Local decoding runs Berlekamp-Massey on every RS row of the hard-decided
frame and freezes rows that decode with a small soft weight. Global
decoding then iterates an APP-based min-sum over the whole composite
parity-check matrix in two stages: the stacked RS checks (on cyclically
shifted row LLRs) and the SPC checks. Rows are re-tried with BM after every
inner iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import hard_decision, llr as channel_llr
from .errors import ConfigurationError
from .galois import bits_to_symbols, symbols_to_bits
from .product import ProductCode
from .rs import bm_decode, bm_decode_many

GENIE_OFF = "off"
GENIE_AUDIT = "audit"  # threshold gate as usual, wrong freezes are counted
GENIE_GATE = "gate"  # freeze exactly the rows that decode to the transmitted row


@dataclass(frozen=True)
class DecoderConfig:
    n1: int = 10
    n2: int = 1
    alpha1: float = 0.32
    alpha2: float = 0.8
    w_theta: float = 0.06
    llr_clamp: float = 128.0

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ConfigurationError("iteration limits must be >= 1")
        if not (0 < self.alpha1 <= 1 and 0 < self.alpha2 <= 1):
            raise ConfigurationError("damping factors must lie in (0, 1]")
        if not 0 <= self.w_theta <= 1:
            raise ConfigurationError("soft-weight threshold must lie in [0, 1]")
        if self.llr_clamp <= 0:
            raise ConfigurationError("frozen LLR magnitude must be positive")

    @classmethod
    def for_mode(cls, mode: str, n: int, **kwargs) -> DecoderConfig:
        """``lcs`` (one outer pass), ``hcs`` (n outer passes) or ``n2=<int>``."""
        mode = mode.lower()
        if mode == "lcs":
            n2 = 1
        elif mode == "hcs":
            n2 = n
        elif mode.startswith("n2="):
            n2 = int(mode[3:])
        else:
            raise ConfigurationError(f"unknown decoding mode {mode!r}")
        return cls(n2=n2, **kwargs)


@dataclass
class DecoderState:
    y: np.ndarray
    sigma_n: float
    hard: np.ndarray
    llr0: np.ndarray
    llr: np.ndarray
    active: np.ndarray  # bool mask over N_P positions
    frozen: np.ndarray  # bool per RS row
    decoded: np.ndarray  # (L, n_b) recorded rows; valid where frozen
    n_err: int
    kappa1: int = 0
    kappa2: int = 0

    @classmethod
    def fresh(cls, pc: ProductCode, y, sigma_n: float) -> DecoderState:
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (pc.n_p,):
            raise ValueError(f"received vector must have {pc.n_p} samples")
        ch = channel_llr(y, sigma_n)
        return cls(
            y=y,
            sigma_n=sigma_n,
            hard=hard_decision(y),
            llr0=ch.copy(),
            llr=ch.copy(),
            active=np.ones(pc.n_p, dtype=bool),
            frozen=np.zeros(pc.L, dtype=bool),
            decoded=np.zeros((pc.L, pc.n_b), dtype=np.uint8),
            n_err=pc.L,
        )


@dataclass
class DecodeCounters:
    iterations: int = 0
    bm_invocations: int = 0
    cn_ops: int = 0
    vn_ops: int = 0
    undetected_freezes: int = 0
    soft_weights: list = field(default_factory=list)


@dataclass
class DecodeResult:
    bits: np.ndarray  # decided frame, N_P bits
    ld_bits: np.ndarray  # decision after local decoding alone
    n_err: int  # rows still unfrozen at the end
    counters: DecodeCounters


def soft_weight(y_sub, hard_sub, decoded_sub) -> float:
    """Reliability-weighted fraction of positions where the decoded row
    disagrees with the channel hard decision; 0 for an all-zero ``y_sub``."""
    mag = np.abs(np.asarray(y_sub, dtype=np.float64))
    total = mag.sum()
    if total == 0:
        return 0.0
    flips = np.asarray(hard_sub, dtype=np.uint8) ^ np.asarray(decoded_sub, dtype=np.uint8)
    return float(mag @ flips / total)


def shift_subvectors(pc: ProductCode, v: np.ndarray, mu: int, inverse: bool = False) -> np.ndarray:
    """Rotate each RS row sub-vector right by ``mu`` bits (left if inverse);
    the SPC parity sub-vector is left alone."""
    out = np.array(v, copy=True)
    if mu % pc.n_b == 0:
        return out
    rows = out[: pc.n_data].reshape(pc.L, pc.n_b)
    rows[:] = np.roll(rows, -mu if inverse else mu, axis=1)
    return out


def _padded_supports(dense: np.ndarray) -> np.ndarray:
    """Row supports padded with ``cols`` (an index into a dummy slot)."""
    rows, cols = dense.shape
    weights = dense.sum(axis=1)
    out = np.full((rows, int(weights.max(initial=1))), cols, dtype=np.int64)
    for r in range(rows):
        sup = np.flatnonzero(dense[r])
        out[r, : sup.size] = sup
    return out


def minsum_extrinsic(values: np.ndarray, support: np.ndarray, size: int) -> np.ndarray:
    """APP-based min-sum: for every bit, the sum over its checks of
    (product of the other signs) * (smallest other magnitude).

    ``values`` has shape (..., size); ``support`` lists each check's bit
    indices, padded with ``size``. sgn(0) counts as +1.
    """
    lead = values.shape[:-1]
    padded = np.concatenate([values, np.zeros((*lead, 1))], axis=-1)
    g = padded[..., support]  # (..., checks, d)
    mag = np.abs(g)
    pad = support == size
    mag[..., pad] = np.inf
    neg = (g < 0) & ~pad
    if support.shape[1] >= 2:
        two = np.partition(mag, 1, axis=-1)
        min1, min2 = two[..., 0:1], two[..., 1:2]
    else:
        min1 = mag
        min2 = np.full_like(mag, np.inf)
    is_min = np.arange(support.shape[1]) == np.argmin(mag, axis=-1)[..., None]
    other = np.where(is_min, min2, min1)
    parity = np.logical_xor.reduce(neg, axis=-1, keepdims=True)
    sign = np.where(parity ^ neg, -1.0, 1.0)
    edge = np.where(pad, 0.0, sign * other)

    batch = int(np.prod(lead, dtype=np.int64))
    cols = support.reshape(1, -1) + (size + 1) * np.arange(batch)[:, None]
    out = np.bincount(cols.reshape(-1), weights=edge.reshape(-1), minlength=batch * (size + 1))
    return out.reshape(batch, size + 1)[:, :size].reshape(*lead, size)


def check_op_count(degree: int) -> int:
    """Comparisons for one degree-d check node: d + ceil(log2 d) - 2."""
    return degree + math.ceil(math.log2(degree)) - 2 if degree > 0 else 0


class IterativeDecoder:
    def __init__(self, pc: ProductCode, cfg: DecoderConfig | None = None):
        self.pc = pc
        self.cfg = cfg or DecoderConfig()
        dense = pc.h_tilde.to_dense()
        self._h_t = dense.T.astype(np.int64)  # for row syndromes
        self.upper_support = _padded_supports(dense)
        self.lower_support = pc.lower_index

        row_w = dense.sum(axis=1)
        self.cn_ops_per_iteration = pc.L * sum(check_op_count(int(d)) for d in row_w) + (
            pc.n_spc * check_op_count(pc.spc_row_weight)
        )
        col_w = np.concatenate([np.tile(dense.sum(axis=0) + 1, pc.L), np.ones(pc.n_spc)])
        self.vn_degree = col_w.astype(np.int64)

    # -- building blocks -------------------------------------------------

    def stage1(self, llr: np.ndarray, mu: int) -> np.ndarray:
        """Extrinsic sums from the RS checks, evaluated on row LLRs rotated
        by ``mu`` and rotated back; zero on parity positions."""
        pc = self.pc
        rows = llr[: pc.n_data].reshape(pc.L, pc.n_b)
        if mu % pc.n_b:
            rows = np.roll(rows, mu, axis=1)
        ext = minsum_extrinsic(rows, self.upper_support, pc.n_b)
        if mu % pc.n_b:
            ext = np.roll(ext, -mu, axis=1)
        return np.concatenate([ext.reshape(-1), np.zeros(pc.n_spc)])

    def stage2(self, llr: np.ndarray) -> np.ndarray:
        return minsum_extrinsic(llr, self.lower_support, self.pc.n_p)

    def freeze(self, state: DecoderState, l: int, decoded: np.ndarray) -> None:
        if state.frozen[l]:
            raise RuntimeError(f"row {l} is already frozen")
        sl = self.pc.component_slice(l)
        state.decoded[l] = decoded
        state.frozen[l] = True
        state.active[sl] = False
        state.llr[sl] = self.cfg.llr_clamp * (1.0 - 2.0 * decoded)
        state.n_err -= 1

    def _row_decode(self, rows_bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """BM on hard-decision row images (R, n_b) -> (ok, decoded images).

        Rows with a zero binary syndrome are codewords already and skip BM.
        """
        pc = self.pc
        synd = (rows_bits.astype(np.int64) @ self._h_t) & 1
        dirty = np.flatnonzero(synd.any(axis=1))
        ok = np.ones(rows_bits.shape[0], dtype=bool)
        decoded = rows_bits.copy()
        if dirty.size == 0:
            return ok, decoded
        symbols = bits_to_symbols(pc.rs.field, rows_bits[dirty])
        if dirty.size >= 8:
            good, fixed, _ = bm_decode_many(pc.rs, symbols)
        else:
            outcomes = [bm_decode(pc.rs, w) for w in symbols]
            good = np.array([o.ok for o in outcomes])
            fixed = np.array([o.codeword if o.ok else w for o, w in zip(outcomes, symbols)])
        ok[dirty] = good
        decoded[dirty] = symbols_to_bits(pc.rs.field, fixed)
        return ok, decoded

    def _gate(self, ok, decoded, y_rows, hard_rows, ref_rows, genie):
        """Freeze decisions for BM outputs.

        Returns ``(freeze, weight, wrong)``: the gate, each row's soft weight,
        and (genie modes only) whether a frozen row differs from the
        transmitted one.
        """
        mag = np.abs(y_rows)
        total = mag.sum(axis=1)
        flips = (hard_rows ^ decoded).astype(np.float64)
        weight = np.divide((mag * flips).sum(axis=1), total, out=np.zeros_like(total), where=total > 0)
        wrong = np.zeros(len(ok), dtype=bool)
        if genie == GENIE_GATE:
            freeze = ok & (decoded == ref_rows).all(axis=1)
        else:
            freeze = ok & (weight < self.cfg.w_theta)
            if genie == GENIE_AUDIT:
                wrong = freeze & (decoded != ref_rows).any(axis=1)
        return freeze, weight, wrong

    @staticmethod
    def _tally(counters, genie, freeze, weight, wrong):
        if genie == GENIE_GATE:
            counters.soft_weights.extend(weight[freeze].tolist())
        counters.undetected_freezes += int(wrong.sum())

    def _try_rows(self, state, rows_bits, counters, reference=None, genie=GENIE_OFF):
        """BM on every unfrozen row of ``rows_bits`` and freeze the
        rows that pass the gate."""
        pc = self.pc
        todo = np.flatnonzero(~state.frozen)
        if todo.size == 0:
            return
        counters.bm_invocations += int(todo.size)
        ok, decoded = self._row_decode(rows_bits[todo])
        y_rows = state.y[: pc.n_data].reshape(pc.L, pc.n_b)[todo]
        hard_rows = state.hard[: pc.n_data].reshape(pc.L, pc.n_b)[todo]
        ref_rows = None if reference is None else reference[: pc.n_data].reshape(pc.L, pc.n_b)[todo]
        freeze, weight, wrong = self._gate(ok, decoded, y_rows, hard_rows, ref_rows, genie)
        self._tally(counters, genie, freeze, weight, wrong)
        for idx in np.flatnonzero(freeze):
            self.freeze(state, int(todo[idx]), decoded[idx])

    # -- phases ----------------------------------------------------------

    def local_decode(self, state, counters=None, reference=None, genie=GENIE_OFF, ld_rows=None):
        """BM on every row of the channel hard decision; ``ld_rows`` (if given)
        receives each successful BM output regardless of the freeze gate."""
        counters = counters if counters is not None else DecodeCounters()
        pc = self.pc
        todo = np.flatnonzero(~state.frozen)
        rows = state.hard[: pc.n_data].reshape(pc.L, pc.n_b)
        counters.bm_invocations += int(todo.size)
        ok, decoded = self._row_decode(rows[todo])
        if ld_rows is not None:
            ld_rows[todo[ok]] = decoded[ok]
        y_rows = state.y[: pc.n_data].reshape(pc.L, pc.n_b)[todo]
        ref_rows = None if reference is None else reference[: pc.n_data].reshape(pc.L, pc.n_b)[todo]
        freeze, weight, wrong = self._gate(ok, decoded, y_rows, rows[todo], ref_rows, genie)
        self._tally(counters, genie, freeze, weight, wrong)
        for idx in np.flatnonzero(freeze):
            self.freeze(state, int(todo[idx]), decoded[idx])
        return state

    def global_decode(self, state, counters=None, reference=None, genie=GENIE_OFF) -> DecodeCounters:
        pc, cfg = self.pc, self.cfg
        counters = counters if counters is not None else DecodeCounters()
        if state.n_err == 0:
            return counters
        ch = channel_llr(state.y, state.sigma_n)
        for kappa2 in range(cfg.n2):
            state.kappa2 = kappa2
            # Channel LLRs on the active set, pinned values elsewhere.
            state.llr0 = np.where(state.active, ch, state.llr)
            state.llr = state.llr0.copy()
            mu = pc.rs.p * kappa2
            for kappa1 in range(cfg.n1):
                state.kappa1 = kappa1
                ext1 = self.stage1(state.llr, mu)
                ext2 = self.stage2(state.llr)
                update = state.llr0 + cfg.alpha1 * ext1 + cfg.alpha2 * ext2
                state.llr = np.where(state.active, update, state.llr)
                counters.iterations += 1
                counters.cn_ops += self.cn_ops_per_iteration
                counters.vn_ops += int(self.vn_degree[state.active].sum())
                hard = (state.llr < 0).astype(np.uint8)
                rows = hard[: pc.n_data].reshape(pc.L, pc.n_b)
                self._try_rows(state, rows, counters, reference, genie)
                if state.n_err == 0:
                    return counters
        return counters

    def decide(self, state: DecoderState) -> np.ndarray:
        """Frozen rows where available, current hard decisions otherwise;
        parity bits re-encoded from the decided rows."""
        pc = self.pc
        rows = (state.llr[: pc.n_data] < 0).astype(np.uint8).reshape(pc.L, pc.n_b)
        rows[state.frozen] = state.decoded[state.frozen]
        return np.concatenate([rows.reshape(-1), pc.parity_bits(rows)])

    def decode(self, y, sigma_n: float, reference=None, genie: str = GENIE_OFF) -> DecodeResult:
        """Full two-phase decoding of one received frame.

        ``reference`` (the transmitted frame) is only consulted in genie modes.
        """
        refs = None if reference is None else np.asarray(reference)[None, :]
        return self.decode_batch(np.asarray(y)[None, :], sigma_n, refs, genie)[0]

    def decode_batch(self, ys, sigma_n: float, references=None, genie: str = GENIE_OFF) -> list[DecodeResult]:
        """Decode a stack of frames (F, N_P).

        Local decoding runs on all F*L rows at once; frames with rows left
        unfrozen then go through global decoding one by one. Results are
        identical to decoding each frame separately.
        """
        if genie not in (GENIE_OFF, GENIE_AUDIT, GENIE_GATE):
            raise ConfigurationError(f"unknown genie mode {genie!r}")
        if genie != GENIE_OFF and references is None:
            raise ValueError("genie modes need the transmitted frames")
        pc = self.pc
        L, n_b = pc.L, pc.n_b
        ys = np.asarray(ys, dtype=np.float64)
        if ys.ndim != 2 or ys.shape[1] != pc.n_p:
            raise ValueError(f"received frames must have shape (F, {pc.n_p})")
        frames = ys.shape[0]
        hard = hard_decision(ys)
        rows = hard[:, : pc.n_data].reshape(frames * L, n_b)
        ok, decoded = self._row_decode(rows)
        ref_rows = None
        if genie != GENIE_OFF:
            ref_rows = np.asarray(references, dtype=np.uint8)[:, : pc.n_data].reshape(frames * L, n_b)
        freeze, weight, wrong = self._gate(
            ok, decoded, ys[:, : pc.n_data].reshape(frames * L, n_b), rows, ref_rows, genie
        )
        ld_rows = np.where(ok[:, None], decoded, rows).reshape(frames, L, n_b)
        decoded = decoded.reshape(frames, L, n_b)
        freeze, weight, wrong = (a.reshape(frames, L) for a in (freeze, weight, wrong))

        results = []
        for f in range(frames):
            counters = DecodeCounters(bm_invocations=L)
            self._tally(counters, genie, freeze[f], weight[f], wrong[f])
            ld_bits = np.concatenate([ld_rows[f].reshape(-1), pc.parity_bits(ld_rows[f])])
            if freeze[f].all():
                results.append(DecodeResult(ld_bits, ld_bits, 0, counters))
                continue
            state = DecoderState.fresh(pc, ys[f], sigma_n)
            for l in np.flatnonzero(freeze[f]):
                self.freeze(state, int(l), decoded[f, l])
            ref = None if references is None else np.asarray(references[f], dtype=np.uint8)
            self.global_decode(state, counters, ref, genie)
            results.append(DecodeResult(self.decide(state), ld_bits, state.n_err, counters))
        return results
