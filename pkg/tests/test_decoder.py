import itertools

import numpy as np
import pytest

from rsspc import ConfigurationError, DecoderConfig, DecoderState, IterativeDecoder
from rsspc import build_field, build_product, build_rs, ebn0_to_sigma, modulate
from rsspc.channel import stream
from rsspc.decoder import (
    GENIE_AUDIT,
    GENIE_GATE,
    _padded_supports,
    check_op_count,
    minsum_extrinsic,
    shift_subvectors,
    soft_weight,
)


@pytest.fixture(scope="module")
def pc():
    return build_product(build_rs(build_field(4), 9), 1, 8)


@pytest.fixture(scope="module")
def dec(pc):
    return IterativeDecoder(pc)


def random_frames(pc, count, seed):
    rng = np.random.default_rng(seed)
    return pc.encode_bits(rng.integers(0, 2, (count, pc.L, pc.rs.k_b), dtype=np.uint8))


def noisy(pc, frames, ebn0, seed):
    sigma = ebn0_to_sigma(ebn0, pc.rate)
    rng = stream(seed)
    return modulate(frames) + sigma * rng.standard_normal(frames.shape), sigma


def brute_minsum(values, dense):
    out = np.zeros(dense.shape[1])
    for row in dense:
        sup = np.flatnonzero(row)
        for i in sup:
            others = [values[j] for j in sup if j != i]
            sign = np.prod([1.0 if v >= 0 else -1.0 for v in others])
            out[i] += sign * min(abs(v) for v in others)
    return out


def test_minsum_hand_example():
    support = np.array([[0, 1, 2]])
    out = minsum_extrinsic(np.array([4.0, -2.0, 3.0]), support, 3)
    assert out == pytest.approx([-2.0, 3.0, -2.0])


def test_minsum_zero_counts_as_positive():
    out = minsum_extrinsic(np.array([0.0, -1.0, 2.0]), np.array([[0, 1, 2]]), 3)
    assert out == pytest.approx([-1.0, 0.0, -0.0])
    out = minsum_extrinsic(np.array([0.0, 1.0, 2.0]), np.array([[0, 1, 2]]), 3)
    assert out == pytest.approx([1.0, 0.0, 0.0])


def test_minsum_against_brute_force():
    rng = np.random.default_rng(0)
    dense = (rng.random((9, 14)) < 0.35).astype(np.uint8)
    dense[:, :2] = 1
    support = _padded_supports(dense)
    values = rng.normal(size=(3, 14))
    got = minsum_extrinsic(values, support, 14)
    for v, g in zip(values, got):
        assert g == pytest.approx(brute_minsum(v, dense))


def test_check_op_count():
    assert check_op_count(2) == 1
    assert check_op_count(8) == 9
    assert check_op_count(9) == 11
    assert check_op_count(0) == 0


def test_soft_weight():
    y = np.array([1.0, -0.5, 0.25, -2.0])
    hard = (y < 0).astype(np.uint8)
    assert soft_weight(y, hard, hard) == 0.0
    flipped = hard.copy()
    flipped[1] ^= 1
    assert soft_weight(y, hard, flipped) == pytest.approx(0.5 / 3.75)
    assert soft_weight(y, hard, 1 - hard) == pytest.approx(1.0)
    assert soft_weight(np.zeros(4), hard, 1 - hard) == 0.0


def test_shift_is_invertible_and_leaves_parity(pc):
    v = np.arange(pc.n_p, dtype=float)
    s = shift_subvectors(pc, v, 7)
    assert np.array_equal(s[pc.n_data :], v[pc.n_data :])
    assert s[7] == v[0] and s[pc.n_b + 7] == v[pc.n_b]
    assert np.array_equal(shift_subvectors(pc, s, 7, inverse=True), v)
    assert np.array_equal(shift_subvectors(pc, v, pc.n_b), v)


def test_stage1_is_shift_equivariant(pc, dec):
    rng = np.random.default_rng(4)
    llr = rng.normal(size=pc.n_p)
    mu = 2 * pc.rs.p
    direct = dec.stage1(llr, mu)
    rotated = dec.stage1(shift_subvectors(pc, llr, mu), 0)
    assert direct == pytest.approx(shift_subvectors(pc, rotated, mu, inverse=True))
    assert not direct[pc.n_data :].any()


def test_config_validation():
    with pytest.raises(ConfigurationError):
        DecoderConfig(n1=0)
    with pytest.raises(ConfigurationError):
        DecoderConfig(alpha1=1.5)
    with pytest.raises(ConfigurationError):
        DecoderConfig(w_theta=-0.1)
    with pytest.raises(ConfigurationError):
        DecoderConfig(llr_clamp=0)
    assert DecoderConfig.for_mode("hcs", 15).n2 == 15
    assert DecoderConfig.for_mode("LCS", 15).n2 == 1
    assert DecoderConfig.for_mode("n2=4", 15, n1=3) == DecoderConfig(n1=3, n2=4)
    with pytest.raises(ConfigurationError):
        DecoderConfig.for_mode("fast", 15)


def test_noiseless_frames_decode_without_iterations(pc, dec):
    frames = random_frames(pc, 5, 1)
    for f in frames:
        res = dec.decode(modulate(f), 0.5)
        assert np.array_equal(res.bits, f)
        assert np.array_equal(res.ld_bits, f)
        assert res.n_err == 0
        assert res.counters.iterations == 0
        assert res.counters.bm_invocations == pc.L


def test_zero_threshold_never_freezes(pc):
    # W < 0 is impossible, so every row stays active through all iterations.
    dec = IterativeDecoder(pc, DecoderConfig(w_theta=0.0, n1=3))
    f = random_frames(pc, 1, 2)[0]
    res = dec.decode(modulate(f), 0.5)
    assert res.n_err == pc.L
    assert res.counters.iterations == 3
    assert np.array_equal(res.bits, f)


def test_threshold_is_strict(pc):
    f = random_frames(pc, 1, 3)[0]
    y = modulate(f)
    y[0] = -0.5 * y[0]  # one wrong, weak bit in row 0
    row0 = np.abs(y[: pc.n_b])
    w = 0.5 / row0.sum()
    at = IterativeDecoder(pc, DecoderConfig(w_theta=w, n1=1))
    above = IterativeDecoder(pc, DecoderConfig(w_theta=w * 1.0001, n1=1))
    state = DecoderState.fresh(pc, y, 0.5)
    at.local_decode(state)
    assert not state.frozen[0] and state.frozen[1:].all()
    state = DecoderState.fresh(pc, y, 0.5)
    above.local_decode(state)
    assert state.frozen.all()
    assert np.array_equal(state.decoded[0], f[: pc.n_b])


def test_freeze_pins_llrs(pc, dec):
    f = random_frames(pc, 1, 5)[0]
    state = DecoderState.fresh(pc, modulate(f), 0.8)
    row = f[pc.component_slice(2)]
    dec.freeze(state, 2, row)
    assert state.frozen[2] and state.n_err == pc.L - 1
    assert not state.active[pc.component_slice(2)].any()
    assert np.array_equal(state.llr[pc.component_slice(2)], 128.0 * (1 - 2.0 * row))
    with pytest.raises(RuntimeError):
        dec.freeze(state, 2, row)


def test_global_decoding_keeps_frozen_rows(pc, dec):
    f = random_frames(pc, 1, 6)[0]
    y, sigma = noisy(pc, f[None], 4.0, 6)
    state = DecoderState.fresh(pc, y[0], sigma)
    dec.freeze(state, 0, f[: pc.n_b])
    pinned = state.llr[: pc.n_b].copy()
    dec.global_decode(state)
    assert np.array_equal(state.llr[: pc.n_b], pinned)


def test_batch_matches_single_frame(pc, dec):
    frames = random_frames(pc, 40, 7)
    y, sigma = noisy(pc, frames, 4.5, 7)
    batch = dec.decode_batch(y, sigma)
    for yi, r in zip(y, batch):
        single = dec.decode(yi, sigma)
        assert np.array_equal(single.bits, r.bits)
        assert np.array_equal(single.ld_bits, r.ld_bits)
        assert single.counters.iterations == r.counters.iterations
        assert single.counters.cn_ops == r.counters.cn_ops


def test_decoded_output_is_a_product_codeword_when_all_rows_frozen(pc, dec):
    frames = random_frames(pc, 30, 8)
    y, sigma = noisy(pc, frames, 5.0, 8)
    h = pc.composite_matrix().astype(np.int64)
    for r in dec.decode_batch(y, sigma):
        if r.n_err == 0:
            assert not ((h @ r.bits) % 2).any()


def test_global_decoding_recovers_ld_failures(pc, dec):
    frames = random_frames(pc, 300, 9)
    y, sigma = noisy(pc, frames, 5.0, 9)
    res = dec.decode_batch(y, sigma)
    gd = sum(np.any(r.bits != f) for r, f in zip(res, frames))
    ld = sum(np.any(r.ld_bits != f) for r, f in zip(res, frames))
    assert ld > 50
    assert gd < ld / 5


def test_genie_gate_never_freezes_a_wrong_row(pc, dec):
    frames = random_frames(pc, 200, 10)
    y, sigma = noisy(pc, frames, 4.0, 10)
    res = dec.decode_batch(y, sigma, frames, GENIE_GATE)
    for r, f in zip(res, frames):
        assert r.counters.undetected_freezes == 0
        if r.n_err == 0:
            assert np.array_equal(r.bits, f)
    weights = list(itertools.chain.from_iterable(r.counters.soft_weights for r in res))
    assert len(weights) > 1000
    assert all(0 <= w <= 1 for w in weights)


def test_audit_counts_wrong_freezes(pc):
    # A permissive threshold lets miscorrections through; audit must see them.
    dec = IterativeDecoder(pc, DecoderConfig(w_theta=0.5))
    frames = random_frames(pc, 300, 11)
    y, sigma = noisy(pc, frames, 4.0, 11)
    res = dec.decode_batch(y, sigma, frames, GENIE_AUDIT)
    wrong = sum(r.counters.undetected_freezes for r in res)
    assert wrong > 0


def test_genie_requires_reference(pc, dec):
    y = modulate(random_frames(pc, 2, 12))
    with pytest.raises(ValueError):
        dec.decode_batch(y, 0.5, genie=GENIE_GATE)
    with pytest.raises(ConfigurationError):
        dec.decode_batch(y, 0.5, y, genie="maybe")
    with pytest.raises(ValueError):
        dec.decode(np.zeros(10), 0.5)


def test_first_iteration_op_counts(pc):
    dense = pc.h_tilde.to_dense()
    dec = IterativeDecoder(pc, DecoderConfig(n1=1, w_theta=0.0))
    res = dec.decode(modulate(random_frames(pc, 1, 13)[0]), 0.7)
    expected_cn = pc.L * sum(check_op_count(int(d)) for d in dense.sum(axis=1)) + pc.n_spc * check_op_count(9)
    expected_vn = pc.L * (dense.sum() + pc.n_b) + pc.n_spc
    assert res.counters.cn_ops == expected_cn
    assert res.counters.vn_ops == expected_vn


def test_unit_threshold_freezes_every_bm_success(pc):
    dec = IterativeDecoder(pc, DecoderConfig(w_theta=1.0))
    frames = random_frames(pc, 50, 14)
    y, sigma = noisy(pc, frames, 3.5, 14)
    for yi in y:
        state = DecoderState.fresh(pc, yi, sigma)
        dec.local_decode(state)
        ok, _ = dec._row_decode(state.hard[: pc.n_data].reshape(pc.L, pc.n_b))
        assert np.array_equal(state.frozen, ok)
