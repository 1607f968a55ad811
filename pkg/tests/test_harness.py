import io

import pytest

from rsspc import ConfigurationError
from rsspc.harness import (
    CSV_COLUMNS,
    SimConfig,
    SimResult,
    genie_sweep,
    read_csv,
    run_sweep,
    wilson_interval,
    write_csv,
)


def small(**kw):
    base = dict(p=3, k=3, w=1, L=4, ebn0_db=(3.0, 5.0), max_frames=600, block_size=100, seed=9)
    base.update(kw)
    return SimConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        small(ebn0_db=())
    with pytest.raises(ConfigurationError):
        small(min_frame_errors=0)
    with pytest.raises(ConfigurationError):
        small(block_size=0)
    with pytest.raises(ConfigurationError):
        small(genie="sometimes")


def test_sweep_is_reproducible():
    a = run_sweep(small())
    b = run_sweep(small())
    assert [r.csv_row() for r in a] == [r.csv_row() for r in b]


def test_worker_count_does_not_change_results():
    a = run_sweep(small(min_frame_errors=5))
    b = run_sweep(small(min_frame_errors=5, workers=2))
    assert [r.csv_row() for r in a] == [r.csv_row() for r in b]


def test_stopping_rule():
    res = run_sweep(small(ebn0_db=(1.0,), min_frame_errors=3))[0]
    assert res.frame_errors >= 3
    assert res.frames == 100  # stopped at the first block boundary
    capped = run_sweep(small(ebn0_db=(12.0,), max_frames=250))[0]
    assert capped.frames == 250 and capped.frame_errors == 0


def test_counts_are_consistent():
    for r in run_sweep(small()):
        assert r.n_p == 4 * 21 + 21
        assert r.ber == pytest.approx(r.bit_errors / (r.frames * r.n_p))
        assert r.frame_errors <= r.frames
        assert r.bm_invocations >= r.frames * 4
        assert r.ld_fer >= 0


def test_genie_sweep_runs_fixed_frames():
    out = genie_sweep(small(max_frames=300))
    assert [g.frames for g in out] == [300, 300]
    for g in out:
        assert 0 <= g.avg_soft_weight <= g.max_soft_weight <= 1
        assert g.samples > 0


def test_csv_round_trip(tmp_path):
    results = run_sweep(small())
    path = tmp_path / "out.csv"
    write_csv(results, path)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert all(len(line.split(",")) == 12 for line in lines)
    back = read_csv(path)
    for r, row in zip(results, back):
        assert [row[c] for c in CSV_COLUMNS] == r.csv_row()


def test_empty_csv_is_header_only():
    buf = io.StringIO()
    write_csv([], buf)
    assert buf.getvalue() == ",".join(CSV_COLUMNS) + "\n"


def test_merge_and_rates():
    a = SimResult(1.0, frames=10, frame_errors=2, bit_errors=5, n_p=100, soft_weight_max=0.1)
    a.merge(SimResult(1.0, frames=30, frame_errors=1, bit_errors=3, n_p=100, soft_weight_max=0.3))
    assert (a.frames, a.frame_errors) == (40, 3)
    assert a.fer == pytest.approx(3 / 40)
    assert a.ber == pytest.approx(8 / 4000)
    assert a.soft_weight_max == 0.3
    assert SimResult(0.0).fer == 0.0


def test_wilson_interval():
    lo, hi = wilson_interval(10, 100)
    assert lo < 0.1 < hi
    assert lo == pytest.approx(0.0552, abs=1e-3)
    assert hi == pytest.approx(0.1744, abs=1e-3)
    assert wilson_interval(0, 0) == (0.0, 1.0)
    assert wilson_interval(0, 50)[0] == pytest.approx(0.0, abs=1e-12)
