import logging

import numpy as np
import pytest
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import fftconvolve

from analysis.probability import false_alarm_prob, detection_prob
from correlator.architecture import arch_init, arch_step, arch_run, arch_resources
from correlator.correlation import correlate, rotated_variants, correlation_profile
from correlator.detector import DetectionEvent, scan, extract_payloads, write_events_csv, read_events
from framing.bitstream import BitStream
from framing.frames import FrameConfig, gen_frames
from framing.syncword import gen_syncword
from modem.constellation import rotate_bits
from utils.errors import LengthMismatchError, FormatError

def naive_profile(bits, sync_bits):
    if bits.shape[0] < sync_bits.shape[0]:
        return np.zeros(0, dtype=np.int64)
    windows = sliding_window_view(bits, sync_bits.shape[0])
    return (windows == sync_bits).sum(axis=1)

def fft_profile(bits, sync_bits):
    # agreements = (k + sum of +-1 products) / 2
    a = 2.0 * bits - 1.0
    s = 2.0 * sync_bits[::-1] - 1.0
    dots = fftconvolve(a, s, mode='valid')
    return np.rint((sync_bits.shape[0] + dots) / 2.0).astype(np.int64)

def reference_scan(bits, sync_bits, k, m, threshold, n, continuous=False, profile=naive_profile):
    corr = np.stack([profile(bits, rotate_bits(sync_bits, r)) for r in range(4)])
    n_pos = corr.shape[1]
    events = []
    p = 0
    while p < n_pos:
        last = min(((p + k - 1) // m + 1) * m - k, n_pos - 1)
        seg = corr[:, p:last + 1]
        best = seg.max(axis=1)
        r = int(np.argmax(best))
        nxt = last + 1
        if best[r] >= threshold:
            pos = p + int(np.argmax(seg[r]))
            events.append(DetectionEvent(pos, int(best[r]), r))
            if not continuous:
                nxt = max(nxt, pos + k + n)
        p = nxt
    return events

def planted_stream(length, sync_bits, count, flip_fraction, seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, length).astype(np.uint8)
    k = sync_bits.shape[0]
    starts = np.sort(rng.choice(np.arange(0, length - k, 2 * k), size=count, replace=False))
    n_flip = int(round(flip_fraction * k))
    for s in starts:
        word = sync_bits.copy()
        word[rng.choice(k, n_flip, replace=False)] ^= 1
        bits[s:s + k] = word
    return bits, starts

def test_correlate_examples():
    assert correlate(BitStream.from_string("10010"), BitStream.from_string("10110")) == 4
    sync = gen_syncword(300, 1)
    assert correlate(sync.bits, sync) == 300
    assert correlate(sync.bits.invert(), sync) == 0

def test_correlate_identities():
    rng = np.random.default_rng(4)
    for k in (2, 63, 64, 65, 300):
        w = BitStream.from_bits(rng.integers(0, 2, k))
        s = BitStream.from_bits(rng.integers(0, 2, k))
        assert correlate(w, s) + correlate(w.invert(), s) == k
        assert correlate(w, s) == correlate(s, w)
        assert correlate(w, s) == int(np.sum(w.bits == s.bits))

def test_flipping_agreeing_bit_decreases_by_one():
    sync = gen_syncword(100, 9)
    bits = sync.bits.bits.copy()
    bits[17] ^= 1
    assert correlate(bits, sync) == 99

def test_correlate_length_mismatch():
    with pytest.raises(LengthMismatchError):
        correlate(BitStream.from_string("101"), BitStream.from_string("10"))

def test_rotated_variants():
    sync = BitStream.from_string("00011110")
    variants = rotated_variants(sync)
    assert variants[0] == sync
    assert variants[1] == BitStream.from_string("01111000")
    assert variants[2] == sync.invert()

def test_profile_matches_naive():
    rng = np.random.default_rng(5)
    bits = rng.integers(0, 2, 5000).astype(np.uint8)
    sync = gen_syncword(130, 3)
    assert np.array_equal(correlation_profile(bits, sync), naive_profile(bits, sync.bits.bits))

def test_sync_alone():
    sync = gen_syncword(300, 11)
    cfg = FrameConfig(n=4700, k=300, threshold=300, m=8)
    assert scan(sync.bits, cfg, sync) == [DetectionEvent(0, 300, 0)]

def test_planted_syncword_found():
    sync = gen_syncword(300, 12)
    rng = np.random.default_rng(6)
    bits = rng.integers(0, 2, 100000).astype(np.uint8)
    word = sync.bits.bits.copy()
    word[rng.choice(300, 30, replace=False)] ^= 1
    bits[137:437] = word
    cfg = FrameConfig(n=4700, k=300, threshold=210, m=8)
    events = scan(bits, cfg, sync)
    assert [(ev.pos, ev.corr, ev.rot) for ev in events] == [(137, 270, 0)]

def test_random_bits_give_no_events():
    rng = np.random.default_rng(7)
    bits = rng.integers(0, 2, 10 ** 6).astype(np.uint8)
    cfg = FrameConfig(n=4700, k=300, threshold=210, m=8)
    assert scan(bits, cfg, gen_syncword(300, 13)) == []

@pytest.mark.parametrize("k, threshold", [(20, 16), (300, 210)])
@pytest.mark.parametrize("m", [1, 7, 8, 64])
def test_scan_matches_reference(k, threshold, m):
    sync = gen_syncword(k, 100 + k)
    bits, _ = planted_stream(30000, sync.bits.bits, 20, 0.1, seed=m)
    cfg = FrameConfig(n=200, k=k, threshold=threshold, m=m)
    expected = reference_scan(bits, sync.bits.bits, k, m, threshold, 200)
    assert scan(bits, cfg, sync) == expected
    assert arch_run(bits, cfg, sync) == expected

def test_continuous_mode_keeps_scanning():
    sync = gen_syncword(40, 5)
    rng = np.random.default_rng(8)
    bits = rng.integers(0, 2, 2000).astype(np.uint8)
    bits[100:140] = sync.bits.bits
    bits[300:340] = sync.bits.bits
    suspended = scan(bits, FrameConfig(n=400, k=40, threshold=40, m=8), sync)
    continuous = scan(bits, FrameConfig(n=400, k=40, threshold=40, m=8, continuous=True), sync)
    assert [ev.pos for ev in suspended] == [100]
    assert [ev.pos for ev in continuous] == [100, 300]

def test_event_spacing_with_suspension():
    sync = gen_syncword(20, 21)
    bits, _ = planted_stream(50000, sync.bits.bits, 60, 0.0, seed=9)
    events = scan(bits, FrameConfig(n=100, k=20, threshold=16, m=8), sync)
    gaps = np.diff([ev.pos for ev in events])
    assert np.all(gaps >= 120)

def test_refresh_schedule_is_followed():
    cfg = FrameConfig(n=400, k=100, threshold=70, m=8, frames=12, refresh_interval=4)
    payloads, stream = gen_frames(cfg)
    events = scan(stream, cfg)
    assert [ev.pos for ev in events] == [i * 500 for i in range(12)]
    captured = [p for _, p in extract_payloads(stream, events, cfg)]
    assert captured == payloads

def test_extract_clean_frames():
    cfg = FrameConfig(n=600, k=300, threshold=210, m=8, frames=10)
    payloads, stream = gen_frames(cfg)
    captures = extract_payloads(stream, scan(stream, cfg), cfg)
    assert [p for _, p in captures] == payloads

def test_extract_rotated_stream():
    cfg = FrameConfig(n=600, k=300, threshold=210, m=8, frames=4)
    payloads, stream = gen_frames(cfg)
    rotated = rotate_bits(stream.bits, 1)
    events = scan(rotated, cfg)
    assert [ev.rot for ev in events] == [1, 1, 1, 1]
    assert [p for _, p in extract_payloads(rotated, events, cfg)] == payloads

def test_truncated_capture_is_dropped(caplog):
    sync = gen_syncword(300, 14)
    cfg = FrameConfig(n=4700, k=300, threshold=210, m=8)
    rng = np.random.default_rng(10)
    bits = np.concatenate((rng.integers(0, 2, 1000).astype(np.uint8), sync.bits.bits))
    events = scan(bits, cfg, sync)
    assert events[0].pos == len(bits) - 300
    with caplog.at_level(logging.WARNING):
        assert extract_payloads(bits, events, cfg) == []
    assert "capture dropped" in caplog.text

def test_events_csv(tmp_path):
    events = [DetectionEvent(10, 280, 0), DetectionEvent(5010, 212, 3)]
    path = str(tmp_path / "events.csv")
    write_events_csv(path, events)
    assert (tmp_path / "events.csv").read_text().splitlines()[0] == "pos,corr,rot"
    assert read_events(path) == events

def test_events_csv_bad_header(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(FormatError):
        read_events(str(path))

def test_arch_step_emits_when_window_completes():
    sync = gen_syncword(16, 15)
    cfg = FrameConfig(n=64, k=16, threshold=16, m=4)
    state = arch_init(cfg, sync)
    emitted = []
    for step in range(4):
        state, events = arch_step(state, sync.bits.bits[4 * step:4 * step + 4])
        emitted.append(events)
    assert emitted[:3] == [[], [], []]
    assert emitted[3] == [DetectionEvent(0, 16, 0)]
    assert state.capture_remaining == 64
    assert np.array_equal(state.register[-16:], sync.bits.bits)

def test_arch_m1_is_per_bit_sliding_window():
    sync = gen_syncword(20, 16)
    bits, _ = planted_stream(4000, sync.bits.bits, 10, 0.05, seed=11)
    cfg = FrameConfig(n=40, k=20, threshold=17, m=1, continuous=True)
    profile = np.max(np.stack([naive_profile(bits, rotate_bits(sync.bits.bits, r)) for r in range(4)]), axis=0)
    assert [ev.pos for ev in arch_run(bits, cfg, sync)] == list(np.flatnonzero(profile >= 17))

def test_arch_resources():
    r = arch_resources(300, 8)
    assert (r.xnor, r.adders, r.comparators, r.register_bits) == (2400, 2392, 8, 307)
    assert (r.adder_depth, r.comparator_depth, r.bits_per_cycle) == (9, 3, 8)
    r = arch_resources(2, 1)
    assert (r.xnor, r.adders, r.comparators, r.adder_depth, r.comparator_depth) == (2, 1, 1, 1, 0)
    r = arch_resources(500, 8)
    assert (r.xnor, r.adders) == (4000, 3992)
    assert arch_resources(300, 8).line_rate(250e6) == 2e9

def test_false_alarm_calibration():
    # 10^7 independent (non-overlapping) windows
    sync = gen_syncword(20, 17)
    rng = np.random.default_rng(12)
    hits = 0
    windows = 0
    for _ in range(100):
        bits = rng.integers(0, 2, 20 * 100000).astype(np.uint8)
        hits += int(np.sum(correlation_profile(bits, sync)[::20] >= 16))
        windows += 100000
    p = false_alarm_prob(20, 16)
    assert p == pytest.approx(6196 / 2 ** 20, rel=1e-9)
    sigma = np.sqrt(windows * p * (1 - p))
    assert abs(hits - windows * p) <= 3 * sigma

def test_detection_calibration():
    sync = gen_syncword(300, 18)
    rng = np.random.default_rng(13)
    flips = (rng.random((10 ** 4, 300)) < 0.25).astype(np.uint8)
    corrupted = sync.bits.bits[None, :] ^ flips
    detected = sum(correlate(row, sync) >= 210 for row in corrupted)
    p = detection_prob(300, 210, 0.25)
    sigma = np.sqrt(10 ** 4 * p * (1 - p))
    assert abs(detected - 10 ** 4 * p) <= 3 * sigma

@pytest.mark.slow
@pytest.mark.parametrize("k, threshold", [(20, 16), (300, 210)])
@pytest.mark.parametrize("m", [1, 7, 8, 64])
def test_scan_matches_reference_megabit(k, threshold, m):
    sync = gen_syncword(k, 200 + k)
    bits, _ = planted_stream(10 ** 6, sync.bits.bits, 100, 0.1, seed=1000 + m)
    cfg = FrameConfig(n=4700, k=k, threshold=threshold, m=m)
    expected = reference_scan(bits, sync.bits.bits, k, m, threshold, 4700, profile=fft_profile)
    assert scan(bits, cfg, sync) == expected
    assert arch_run(bits, cfg, sync) == expected
