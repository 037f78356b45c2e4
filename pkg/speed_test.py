import time

from tqdm import tqdm
import numpy as np

from cli.config import load_run_config
from correlator.correlation import correlation_profile
from correlator.detector import scan
from framing.frames import gen_frames

INPUT_SETTINGS = 'configs/smoke.json'
N_RUNS = 20
N_RANDOM_BITS = 1 << 20

def scan_stream(stream, cfg):
    return scan(stream, cfg)

def main():
    cfg = load_run_config(INPUT_SETTINGS).frame
    _, stream = gen_frames(cfg)
    noise = np.random.default_rng(0).integers(0, 2, N_RANDOM_BITS, dtype=np.uint8)

    start_time_1 = time.time()

    scan_stream(stream, cfg)
    correlation_profile(noise[:cfg.k + 1], cfg.schedule().syncword())

    start_time_2 = time.time()

    detections = []
    for _ in tqdm(range(N_RUNS)):
        detections.append(len(scan_stream(noise, cfg)))
    profile = correlation_profile(noise, cfg.schedule().syncword())

    end_time = time.time()
    time_elapsed_1 = end_time - start_time_1
    time_elapsed_2 = end_time - start_time_2
    compilation_time = time_elapsed_1 - time_elapsed_2
    bits_per_second = N_RUNS * N_RANDOM_BITS / time_elapsed_2

    print(f"Time taken for {N_RUNS} scans with compilation time: {time_elapsed_1}")
    print(f"Time taken for {N_RUNS} scans without compilation time: {time_elapsed_2}")
    print(f"Compilation time: {compilation_time}")
    print(f"Scan throughput (4 rotations, m={cfg.m}): {bits_per_second / 1e6:.2f} Mbit/s")
    print(f"Detections on random bits: {detections[0]}, highest correlation {profile.max()} of {cfg.k}")

if __name__ == "__main__" :
    main()
