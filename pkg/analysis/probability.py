import logging
import math

import numpy as np
from scipy.special import gammaln, erfc, erfcinv

from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

def binom_tail(k, p, T):
    """P(X >= T) for X ~ Binomial(k, p), summed in log-space.

    When the tail holds the bulk of the mass, one minus the opposite tail is
    summed instead so values close to 1 keep their ordering in p and k.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"Success probability must lie in [0, 1], got {p}")
    if T <= 0:
        return 1.0
    if T > k:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0

    if T <= k * p:
        return 1.0 - upper_tail(k, 1.0 - p, k - T + 1)
    return upper_tail(k, p, T)

def upper_tail(k, p, T):
    if T > k:
        return 0.0
    if T <= 0 or p >= 1.0:
        return 1.0
    if p <= 0.0:
        return 0.0
    i = np.arange(T, k + 1, dtype=np.float64)
    log_terms = (gammaln(k + 1.0) - gammaln(i + 1.0) - gammaln(k - i + 1.0)
                 + i * math.log(p) + (k - i) * math.log1p(-p))
    peak = float(log_terms.max())
    total = math.fsum(np.exp(log_terms - peak))
    return min(1.0, math.exp(peak) * total)

def false_alarm_prob(k, T):
    return binom_tail(k, 0.5, T)

def detection_prob(k, T, ber):
    if not 0.0 <= ber <= 0.5:
        raise ConfigurationError(f"Bit error rate must lie in [0, 0.5], got {ber}")
    return binom_tail(k, 1.0 - ber, T)

def miss_prob(k, T, ber):
    # P(fewer than T agreeing bits) = P(more than k-T errors), without cancellation
    if not 0.0 <= ber <= 0.5:
        raise ConfigurationError(f"Bit error rate must lie in [0, 0.5], got {ber}")
    return binom_tail(k, ber, k - T + 1)

def hoeffding_bound(k, T):
    if T <= k / 2.0:
        return 1.0
    return math.exp(-2.0 * (T - k / 2.0) ** 2 / k)

def smallest_threshold(k, fa_max):
    for T in range(0, k + 2):
        if false_alarm_prob(k, T) <= fa_max:
            return T
    return k + 1

def recommend_threshold(k, ber_max, fa_max, miss_max=1e-3):
    """Smallest T meeting the false-alarm budget, or None if detection then fails.

    With miss_max=None the miss budget is tied to fa_max, i.e.
    detection_prob >= 1 - fa_max.
    """
    if not 0.0 < ber_max < 0.5:
        raise ConfigurationError(f"ber_max must lie in (0, 0.5), got {ber_max}")
    if not 0.0 < fa_max < 1.0:
        raise ConfigurationError(f"fa_max must lie in (0, 1), got {fa_max}")
    budget = fa_max if miss_max is None else miss_max

    T = smallest_threshold(k, fa_max)
    if T > k:
        logger.info("No threshold reaches a false-alarm rate of %.3g with k=%d", fa_max, k)
        return None
    missed = miss_prob(k, T, ber_max)
    if missed > budget:
        logger.info("k=%d, T=%d: miss probability %.3g exceeds %.3g at BER %.3g", k, T, missed, budget, ber_max)
        return None
    return T

def qpsk_ber(ebn0_db):
    ebn0 = 10.0 ** (np.asarray(ebn0_db, dtype=np.float64) / 10.0)
    return 0.5 * erfc(np.sqrt(ebn0))

def ebn0_db_for_ber(ber):
    return 10.0 * np.log10(erfcinv(2.0 * np.asarray(ber, dtype=np.float64)) ** 2)

def ebn0_db_from_noise_voltage(noise_voltage, sps, signal_power=1.0):
    # unit-power samples: Es/N0 = sps * P / sigma^2, two bits per symbol
    return 10.0 * np.log10(sps * signal_power / (2.0 * np.asarray(noise_voltage, dtype=np.float64) ** 2))

def noise_voltage_for_ebn0(ebn0_db, sps, signal_power=1.0):
    return np.sqrt(sps * signal_power / (2.0 * 10.0 ** (np.asarray(ebn0_db, dtype=np.float64) / 10.0)))
