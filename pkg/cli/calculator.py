from analysis.probability import (binom_tail, false_alarm_prob, detection_prob, miss_prob,
                                  recommend_threshold, hoeffding_bound, qpsk_ber, ebn0_db_for_ber,
                                  ebn0_db_from_noise_voltage, noise_voltage_for_ebn0)
from correlator.architecture import arch_resources
from utils.errors import ConfigurationError

def calc_tail(k, p, threshold):
    return {"binom_tail": binom_tail(k, p, threshold)}

def calc_false_alarm(k, threshold):
    return {"false_alarm_prob": false_alarm_prob(k, threshold), "hoeffding_bound": hoeffding_bound(k, threshold)}

def calc_detection(k, threshold, ber):
    return {"detection_prob": detection_prob(k, threshold, ber), "miss_prob": miss_prob(k, threshold, ber)}

def calc_threshold(k, ber_max, fa_max, miss_max=1e-3):
    T = recommend_threshold(k, ber_max, fa_max, miss_max)
    if T is None:
        return {"threshold": "infeasible"}
    return {"threshold": T, "ratio": T / k, "false_alarm_prob": false_alarm_prob(k, T),
            "miss_prob": miss_prob(k, T, ber_max)}

def calc_resources(k, m, clock=None):
    report = arch_resources(k, m)
    result = dict(vars(report))
    if clock is not None:
        result["line_rate_bps"] = report.line_rate(clock)
    return result

def calc_ebn0(sps, noise_voltage=None, ber=None):
    # operating point of the uncoded QPSK link from either end
    if (noise_voltage is None) == (ber is None):
        raise ConfigurationError("Give exactly one of noise_voltage and ber")
    if noise_voltage is not None:
        ebn0_db = float(ebn0_db_from_noise_voltage(noise_voltage, sps))
    else:
        ebn0_db = float(ebn0_db_for_ber(ber))
    return {"ebn0_db": ebn0_db, "qpsk_ber": float(qpsk_ber(ebn0_db)),
            "noise_voltage": float(noise_voltage_for_ebn0(ebn0_db, sps))}

def get_calculation(name):
    if name == "tail":
        return calc_tail
    elif name == "false-alarm":
        return calc_false_alarm
    elif name == "detection":
        return calc_detection
    elif name == "threshold":
        return calc_threshold
    elif name == "resources":
        return calc_resources
    elif name == "ebn0":
        return calc_ebn0
    else:
        raise ValueError("Invalid calculation chosen.")

def format_result(result):
    lines = []
    for key, value in result.items():
        if isinstance(value, float):
            lines.append(f"{key}: {value:.6g}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)
