import math
import time
from fractions import Fraction

import numpy as np
import pytest

from analysis.fser import FserReport, match_payloads, ber_measure, split_payloads, write_reports_csv, read_reports_csv
from analysis.probability import (binom_tail, false_alarm_prob, detection_prob, miss_prob, recommend_threshold,
                                  qpsk_ber, ebn0_db_for_ber, ebn0_db_from_noise_voltage, noise_voltage_for_ebn0)
from framing.bitstream import BitStream
from utils.errors import LengthMismatchError

def exact_tail(k, p, T):
    p = Fraction(p)
    return sum(math.comb(k, i) * p ** i * (1 - p) ** (k - i) for i in range(max(T, 0), k + 1))

def random_payloads(count, n, seed):
    rng = np.random.default_rng(seed)
    return [BitStream.from_bits(rng.integers(0, 2, n)) for _ in range(count)]

def test_binom_tail_edges():
    assert binom_tail(20, 0.3, 0) == 1.0
    assert binom_tail(20, 0.3, 21) == 0.0
    assert binom_tail(20, 0.0, 1) == 0.0
    assert binom_tail(20, 1.0, 20) == 1.0

def test_binom_tail_example():
    assert binom_tail(20, 0.5, 16) == pytest.approx(6196 / 2 ** 20, rel=1e-12)

def test_binom_tail_against_exact_sum():
    rng = np.random.default_rng(20)
    for _ in range(50):
        k = int(rng.integers(2, 65))
        T = int(rng.integers(0, k + 1))
        p = float(rng.random())
        exact = float(exact_tail(k, p, T))
        assert binom_tail(k, p, T) == pytest.approx(exact, rel=1e-9, abs=1e-300)

def test_binom_tail_is_monotonic():
    tails = [binom_tail(300, 0.6, T) for T in range(302)]
    assert all(a >= b for a, b in zip(tails[:-1], tails[1:]))
    by_p = [binom_tail(300, p, 180) for p in np.linspace(0, 1, 41)]
    assert all(a <= b for a, b in zip(by_p[:-1], by_p[1:]))

def test_binom_tail_bulk_keeps_order():
    assert binom_tail(300, 0.875, 180) <= binom_tail(300, 0.9, 180)
    assert binom_tail(300, 0.9, 180) == pytest.approx(1.0 - float(exact_tail(300, 0.1, 121)), abs=1e-16)
    misses = [miss_prob(k, 7 * k // 10, 0.1) for k in range(100, 501, 50)]
    assert all(a > b for a, b in zip(misses[:-1], misses[1:]))
    assert 1.0 - detection_prob(100, 70, 0.1) == pytest.approx(misses[0], rel=1e-3, abs=1e-16)

def test_false_alarm_prob():
    fa = false_alarm_prob(300, 210)
    assert 0.0 < fa <= math.exp(-24)
    assert fa == pytest.approx(float(Fraction(sum(math.comb(300, i) for i in range(210, 301)), 2 ** 300)), rel=1e-9)
    assert false_alarm_prob(20, 16) == pytest.approx(5.909e-3, rel=1e-3)
    assert false_alarm_prob(300, 0) == 1.0

def test_detection_prob():
    assert detection_prob(300, 210, 0.0) == 1.0
    assert detection_prob(300, 210, 0.5) == pytest.approx(false_alarm_prob(300, 210), rel=1e-12)
    assert detection_prob(300, 210, 0.25) + miss_prob(300, 210, 0.25) == pytest.approx(1.0, abs=1e-12)

def test_longer_syncwords_detect_better():
    for ber in (0.1, 0.2, 0.25):
        probs = [detection_prob(k, 7 * k // 10, ber) for k in range(100, 501, 50)]
        assert all(a <= b for a, b in zip(probs[:-1], probs[1:]))

def test_recommend_threshold():
    T = recommend_threshold(300, 0.2, 1e-9)
    assert T is not None and T <= 210
    assert false_alarm_prob(300, 210) <= 1e-9
    assert miss_prob(300, 210, 0.2) <= 1e-3
    assert recommend_threshold(20, 0.2, 1e-9) is None

def test_recommend_threshold_degenerate_budget():
    T = recommend_threshold(300, 1e-6, 0.5)
    assert T is not None and T <= 151

def test_recommend_threshold_strict_rule():
    # miss budget tied to fa_max: the k=300 operating point is then infeasible
    assert recommend_threshold(300, 0.2, 1e-9, miss_max=None) is None

def test_qpsk_theory_helpers():
    assert qpsk_ber(9.5879) == pytest.approx(1e-5, rel=1e-2)
    assert float(ebn0_db_for_ber(qpsk_ber(6.0))) == pytest.approx(6.0, abs=1e-9)
    assert float(ebn0_db_from_noise_voltage(noise_voltage_for_ebn0(4.3, 4), 4)) == pytest.approx(4.3)

def test_match_identical():
    payloads = random_payloads(20, 100, 21)
    report = match_payloads(payloads, list(payloads))
    assert (report.total, report.detected, report.missed, report.false_alarms, report.fser) == (20, 20, 0, 0, 0.0)

def test_match_nothing_extracted():
    report = match_payloads(random_payloads(20, 100, 22), [])
    assert report.fser == 1.0
    assert report.missed == 20

def test_match_corrupted_payload():
    n, delta = 100, 0.3
    payloads = random_payloads(10, n, 23)
    bits = payloads[4].bits.copy()
    bits[:math.ceil(delta * n) + 1] ^= 1
    extracted = payloads[:4] + [BitStream.from_bits(bits)] + payloads[5:]
    report = match_payloads(payloads, extracted, delta)
    assert (report.missed, report.false_alarms, report.detected) == (1, 1, 9)

def test_match_tolerates_bit_errors():
    payloads = random_payloads(5, 100, 24)
    bits = payloads[2].bits.copy()
    bits[:30] ^= 1
    extracted = payloads[:2] + [BitStream.from_bits(bits)] + payloads[3:]
    assert match_payloads(payloads, extracted, 0.3).missed == 0

def test_match_is_order_preserving():
    payloads = random_payloads(6, 100, 25)
    # a payload seen out of order cannot be matched behind the cursor
    report = match_payloads(payloads, [payloads[3], payloads[1], payloads[4]])
    assert (report.detected, report.false_alarms, report.missed) == (2, 1, 4)

def test_match_scales_to_long_runs():
    payload = random_payloads(1, 4700, 29)[0]
    originals = [payload] * 20000
    extracted = random_payloads(20, 4700, 30) + originals[:19990]
    match_payloads(originals[:2], originals[:2])
    start = time.perf_counter()
    report = match_payloads(originals, extracted)
    assert time.perf_counter() - start < 10.0
    assert (report.detected, report.missed, report.false_alarms) == (19990, 10, 20)

def test_match_length_mismatch():
    with pytest.raises(LengthMismatchError):
        match_payloads(random_payloads(3, 100, 26), random_payloads(1, 98, 27))

def test_ber_measure():
    rng = np.random.default_rng(28)
    a = BitStream.from_bits(rng.integers(0, 2, 10 ** 6))
    assert ber_measure(a, a) == 0.0
    assert ber_measure(a, a.invert()) == 1.0
    b = BitStream.from_bits(rng.integers(0, 2, 10 ** 6))
    assert ber_measure(a, b) == pytest.approx(0.5, abs=0.002)
    with pytest.raises(LengthMismatchError):
        ber_measure(a, b[:10])

def test_split_payloads():
    stream = BitStream.from_string("110100")
    assert split_payloads(stream, 2) == [BitStream.from_string(s) for s in ("11", "01", "00")]
    with pytest.raises(LengthMismatchError):
        split_payloads(stream, 4)

def test_report_csv(tmp_path):
    reports = [FserReport(label="k300-T210", noise_voltage=0.4, snr_db=7.96, total=100, detected=99, missed=1,
                          false_alarms=0, fser=0.01, k=300, threshold=210, repeat=0, seed=12345)]
    path = str(tmp_path / "fser.csv")
    write_reports_csv(path, reports)
    header = (tmp_path / "fser.csv").read_text().splitlines()[0]
    assert header.startswith("label,noise_voltage,snr_db,total,detected,missed,false_alarms,fser")
    assert read_reports_csv(path) == reports
