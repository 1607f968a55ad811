"""Closed-form bounds and operation counts: undetected-error bound,
per-iteration check/variable node work, per-bit normalised complexity
against a Chase-Pyndiah turbo product code, and the BM multiplication bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError


def undetected_bound(q: int, t: int, lam: int) -> float:
    """q^(-2t) * sum_{h<=lam} C(q-1, h) (q-1)^h, bounding the probability of
    an undetected error after correcting up to ``lam`` symbol errors.

    The sum is exact integer arithmetic; scaling happens in the log domain.
    """
    if q < 2 or q & (q - 1):
        raise ConfigurationError(f"q must be a power of two, got {q}")
    if t < 0 or not 0 <= lam <= t:
        raise ConfigurationError(f"need 0 <= lambda <= t, got lambda={lam}, t={t}")
    total = sum(math.comb(q - 1, h) * (q - 1) ** h for h in range(lam + 1))
    return math.exp(math.log(total) - 2 * t * math.log(q))


def bm_mult_bound(n: int, k: int) -> int:
    """Upper bound on GF multiplications in one BM decoding: 7(n-k)^2 + (n-k)(3n+1)/2."""
    if not n > k:
        raise ConfigurationError("need n > k")
    r = n - k
    return 7 * r * r + r * (3 * n + 1) // 2


@dataclass(frozen=True)
class ComplexityModel:
    rho: float
    n: int
    k: int
    p: int
    w: int
    L: int
    eta: int = 4
    # Turbo product code used for the comparison row.
    tpc_n: int = 63
    tpc_k: int = 61
    tpc_p: int = 6

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise ConfigurationError("density must be in (0, 1]")
        if min(self.n, self.k, self.p, self.w, self.L, self.tpc_n, self.tpc_k, self.tpc_p) <= 0:
            raise ConfigurationError("code parameters must be positive")
        if self.eta < 0:
            raise ConfigurationError("eta must be non-negative")

    @property
    def n_b(self) -> int:
        return self.n * self.p

    @property
    def m_b(self) -> int:
        return (self.n - self.k) * self.p

    @property
    def tpc_n_b(self) -> int:
        return self.tpc_n * self.tpc_p


@dataclass(frozen=True)
class NodeOps:
    n_cn: float
    n_vn: float
    approx: float


def _cn_cost(d: float) -> float:
    return d + math.ceil(math.log2(d)) - 2


def predicted_cn_vn_ops(m: ComplexityModel) -> NodeOps:
    """Real-number operations of one full iteration, exact and approximate."""
    upper_deg = m.rho * m.n_b
    lower_deg = m.w * m.L + 1
    n_cn = m.m_b * m.L * _cn_cost(upper_deg) + (m.n_b / m.w) * _cn_cost(lower_deg)
    n_vn = m.n_b * m.L * (m.rho * m.m_b + 1) + m.n_b / m.w
    approx = (m.rho * m.m_b + 1) * m.n_b * m.L
    return NodeOps(n_cn, n_vn, approx)


@dataclass(frozen=True)
class NormalizedComplexity:
    real_ops: float  # per-bit real computations, this scheme (upper bound)
    bm_per_bit: float  # BM runs per bit, this scheme (upper bound)
    tpc_real_ops: float  # Chase-Pyndiah estimate
    tpc_bm_per_bit: float
    parity_check_mults: float  # GF multiplications per bit for codeword checks
    tpc_parity_check_mults: float


def normalized_complexity(m: ComplexityModel, i_avg: float, tpc_i_avg: float | None = None) -> NormalizedComplexity:
    """Per-bit complexity for this scheme at ``i_avg`` average iterations and
    for the turbo product code at ``tpc_i_avg`` (defaults to ``i_avg``)."""
    if i_avg < 0:
        raise ConfigurationError("average iteration count must be non-negative")
    tpc_i = i_avg if tpc_i_avg is None else tpc_i_avg
    patterns = 2**m.eta
    return NormalizedComplexity(
        real_ops=2 * (m.rho * m.m_b + 1) * i_avg,
        bm_per_bit=i_avg / m.n_b,
        tpc_real_ops=3 * patterns * tpc_i,
        tpc_bm_per_bit=patterns * tpc_i / m.tpc_n_b,
        parity_check_mults=(m.n - m.k) / m.p * i_avg,
        tpc_parity_check_mults=patterns * (m.tpc_n - m.tpc_k) / m.tpc_p * tpc_i,
    )


def complexity_table(m: ComplexityModel, i_avg: float, tpc_i_avg: float | None = None) -> dict:
    """Per-bit operation counts by kind for both schemes (one dict per row)."""
    tpc_i = i_avg if tpc_i_avg is None else tpc_i_avg
    e = m.eta
    patterns = 2**e
    nb = m.tpc_n_b
    node = m.rho * m.m_b + 1
    return {
        "pyndiah": {
            "addition": (patterns + 1.5) * tpc_i,
            "multiplication": (patterns + 1.5) * tpc_i,
            "comparison": (patterns - 1 + e + (patterns - 1 - (e + 1) * e / 2) / nb) * tpc_i,
            "bm_hdd": patterns / nb * tpc_i,
            "parity_check": patterns * (m.tpc_n - m.tpc_k) / m.tpc_p * tpc_i,
        },
        "rs_spc": {
            "addition": node * i_avg,
            "multiplication": 0.0,
            "comparison": node * i_avg,
            "bm_hdd": i_avg / m.n_b,
            "parity_check": (m.n - m.k) / m.p * i_avg,
        },
    }
