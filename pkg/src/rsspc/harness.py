"""Monte-Carlo driver: BER/FER sweeps, genie-aided soft-weight sweeps and
CSV output.

Frames are simulated in fixed-size blocks. Block ``b`` of SNR point ``i``
draws messages and noise from ``stream(seed, i, b)``, and the stopping rule
is checked only at block boundaries, so a sweep is bit-reproducible and
independent of how blocks are scheduled across workers.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .channel import ebn0_to_sigma, modulate, stream
from .decoder import GENIE_AUDIT, GENIE_GATE, GENIE_OFF, DecoderConfig, IterativeDecoder
from .errors import ConfigurationError
from .galois import build_field
from .product import ProductCode, build_product
from .rs import build_rs

log = logging.getLogger(__name__)

CSV_COLUMNS = [
    "ebn0_db",
    "frames",
    "bit_errors",
    "frame_errors",
    "ber",
    "fer",
    "ld_ber",
    "avg_iterations",
    "bm_invocations",
    "cn_ops",
    "vn_ops",
    "undetected_freezes",
]


@dataclass(frozen=True)
class SimConfig:
    p: int
    k: int
    w: int
    L: int
    ebn0_db: tuple
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    min_frame_errors: int = 100
    max_frames: int = 10_000
    block_size: int = 250
    seed: int = 0
    genie: str = GENIE_OFF
    primitive_poly: int | None = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ebn0_db", tuple(float(x) for x in self.ebn0_db))
        if not self.ebn0_db:
            raise ConfigurationError("need at least one Eb/N0 point")
        if self.min_frame_errors < 1:
            raise ConfigurationError("min_frame_errors must be >= 1")
        if self.max_frames < 1 or self.block_size < 1 or self.workers < 1:
            raise ConfigurationError("frame counts and worker count must be positive")
        if self.genie not in (GENIE_OFF, GENIE_AUDIT, GENIE_GATE):
            raise ConfigurationError(f"unknown genie mode {self.genie!r}")

    def product_code(self) -> ProductCode:
        rs = build_rs(build_field(self.p, self.primitive_poly), self.k)
        return build_product(rs, self.w, self.L)


@dataclass
class SimResult:
    ebn0_db: float
    frames: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    ld_bit_errors: int = 0
    ld_frame_errors: int = 0
    iterations: int = 0
    bm_invocations: int = 0
    cn_ops: int = 0
    vn_ops: int = 0
    undetected_freezes: int = 0
    n_p: int = 0
    soft_weight_sum: float = 0.0
    soft_weight_max: float = 0.0
    soft_weight_count: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.n_p) if self.frames else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ld_ber(self) -> float:
        return self.ld_bit_errors / (self.frames * self.n_p) if self.frames else 0.0

    @property
    def ld_fer(self) -> float:
        return self.ld_frame_errors / self.frames if self.frames else 0.0

    @property
    def avg_iterations(self) -> float:
        return self.iterations / self.frames if self.frames else 0.0

    @property
    def avg_soft_weight(self) -> float:
        return self.soft_weight_sum / self.soft_weight_count if self.soft_weight_count else 0.0

    def merge(self, other: SimResult) -> None:
        for name in ("frames", "bit_errors", "frame_errors", "ld_bit_errors", "ld_frame_errors",
                     "iterations", "bm_invocations", "cn_ops", "vn_ops", "undetected_freezes",
                     "soft_weight_sum", "soft_weight_count"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.soft_weight_max = max(self.soft_weight_max, other.soft_weight_max)
        self.n_p = other.n_p or self.n_p

    def csv_row(self) -> list:
        return [self.ebn0_db, self.frames, self.bit_errors, self.frame_errors, self.ber, self.fer,
                self.ld_ber, self.avg_iterations, self.bm_invocations, self.cn_ops, self.vn_ops,
                self.undetected_freezes]


@dataclass
class GenieResult:
    ebn0_db: float
    frames: int
    avg_soft_weight: float
    max_soft_weight: float
    samples: int


_DECODERS: dict = {}


def _decoder(cfg: SimConfig) -> IterativeDecoder:
    key = (cfg.p, cfg.k, cfg.w, cfg.L, cfg.primitive_poly, cfg.decoder)
    if key not in _DECODERS:
        _DECODERS[key] = IterativeDecoder(cfg.product_code(), cfg.decoder)
    return _DECODERS[key]


def simulate_block(cfg: SimConfig, point: int, block: int, frames: int, sigma_n: float) -> SimResult:
    """Encode, transmit and decode one block of random frames."""
    dec = _decoder(cfg)
    pc = dec.pc
    rng = stream(cfg.seed, point, block)
    messages = rng.integers(0, 2, size=(frames, pc.L, pc.rs.k_b), dtype=np.uint8)
    sent = pc.encode_bits(messages)
    received = modulate(sent) + sigma_n * rng.standard_normal(sent.shape)

    refs = sent if cfg.genie != GENIE_OFF else None
    out = SimResult(cfg.ebn0_db[point], n_p=pc.n_p)
    for frame, res in zip(sent, dec.decode_batch(received, sigma_n, refs, cfg.genie)):
        errs = int(np.count_nonzero(res.bits != frame))
        ld_errs = int(np.count_nonzero(res.ld_bits != frame))
        c = res.counters
        out.frames += 1
        out.bit_errors += errs
        out.frame_errors += errs > 0
        out.ld_bit_errors += ld_errs
        out.ld_frame_errors += ld_errs > 0
        out.iterations += c.iterations
        out.bm_invocations += c.bm_invocations
        out.cn_ops += c.cn_ops
        out.vn_ops += c.vn_ops
        out.undetected_freezes += c.undetected_freezes
        if c.soft_weights:
            out.soft_weight_sum += math.fsum(c.soft_weights)
            out.soft_weight_count += len(c.soft_weights)
            out.soft_weight_max = max(out.soft_weight_max, max(c.soft_weights))
    return out


def _blocks(cfg: SimConfig):
    full, rest = divmod(cfg.max_frames, cfg.block_size)
    sizes = [cfg.block_size] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _run_point(cfg: SimConfig, point: int, stop_on_errors: bool, pool=None) -> SimResult:
    pc_rate = _decoder(cfg).pc.rate
    sigma_n = ebn0_to_sigma(cfg.ebn0_db[point], pc_rate)
    total = SimResult(cfg.ebn0_db[point], n_p=_decoder(cfg).pc.n_p)
    blocks = _blocks(cfg)
    wave = cfg.workers if pool is not None else 1
    for start in range(0, len(blocks), wave):
        chunk = blocks[start : start + wave]
        if pool is None:
            parts = [simulate_block(cfg, point, b, size, sigma_n) for b, size in chunk]
        else:
            futures = [pool.submit(simulate_block, cfg, point, b, size, sigma_n) for b, size in chunk]
            parts = [f.result() for f in futures]
        # Stopping is applied in block order so results do not depend on `workers`.
        for part in parts:
            total.merge(part)
            if stop_on_errors and total.frame_errors >= cfg.min_frame_errors:
                return total
    return total


def run_sweep(cfg: SimConfig) -> list[SimResult]:
    """One SimResult per Eb/N0 point. Each point stops once
    ``min_frame_errors`` full-decoder frame errors are collected or
    ``max_frames`` frames have run, whichever comes first."""
    results = []
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for i, ebn0 in enumerate(cfg.ebn0_db):
            res = _run_point(cfg, i, stop_on_errors=True, pool=pool)
            log.info("Eb/N0 %.2f dB: %d frames, FER %.3g (LD %.3g), BER %.3g, I_avg %.3f",
                     ebn0, res.frames, res.fer, res.ld_fer, res.ber, res.avg_iterations)
            results.append(res)
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def genie_sweep(cfg: SimConfig) -> list[GenieResult]:
    """Average and maximum soft weights of correctly decoded rows, with the
    transmitted frame gating every freeze. Runs exactly ``max_frames``
    frames per point."""
    gcfg = SimConfig(**{**cfg.__dict__, "genie": GENIE_GATE})
    out = []
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for i, ebn0 in enumerate(gcfg.ebn0_db):
            res = _run_point(gcfg, i, stop_on_errors=False, pool=pool)
            out.append(GenieResult(ebn0, res.frames, res.avg_soft_weight, res.soft_weight_max,
                                   res.soft_weight_count))
            log.info("Eb/N0 %.2f dB: avg W %.5f, max W %.5f over %d rows",
                     ebn0, res.avg_soft_weight, res.soft_weight_max, res.soft_weight_count)
    finally:
        if pool is not None:
            pool.shutdown()
    return out


def write_csv(results: Iterable[SimResult], dest) -> None:
    """Header plus one row per point; ``dest`` is a path or an open text file."""
    if hasattr(dest, "write"):
        _write_rows(results, dest)
        return
    with open(dest, "w", newline="") as fh:
        _write_rows(results, fh)


def _write_rows(results, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in r.csv_row()])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    ints = {"frames", "bit_errors", "frame_errors", "bm_invocations", "cn_ops", "vn_ops",
            "undetected_freezes"}
    return [{k: (int(v) if k in ints else float(v)) for k, v in row.items()} for row in rows]


def wilson_interval(errors: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Two-sided score interval for a binomial proportion (95% by default)."""
    if trials == 0:
        return 0.0, 1.0
    phat = errors / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)
