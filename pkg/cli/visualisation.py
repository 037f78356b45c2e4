from collections import defaultdict

import matplotlib
matplotlib.use('Agg')
import numpy as np
from matplotlib import pyplot as plt

MARKERS = ('o', 's', '^', 'D', 'v')

def fser_curves(reports):
    # label -> (snr_db, mean fser, frames per point), averaged over repeats
    grouped = defaultdict(lambda: defaultdict(list))
    for r in reports:
        grouped[r.label][r.noise_voltage].append(r)

    curves = {}
    for label, points in grouped.items():
        voltages = sorted(points, reverse=True)
        snr = np.array([np.mean([r.snr_db for r in points[v]]) for v in voltages])
        fser = np.array([np.mean([r.fser for r in points[v]]) for v in voltages])
        frames = np.array([sum(r.total for r in points[v]) for v in voltages])
        curves[label] = (snr, fser, frames)
    return curves

def generate_fser_figure(reports):
    fig = plt.figure(figsize=(8, 5))
    for i, (label, (snr, fser, frames)) in enumerate(sorted(fser_curves(reports).items())):
        # zero FSER has no place on a log axis; draw it at half a frame
        floor = 0.5 / np.maximum(frames, 1)
        plt.plot(snr, np.maximum(fser, floor), marker=MARKERS[i % len(MARKERS)], label=label)

    plt.yscale('log')
    plt.xlabel('SNR (dB)')
    plt.ylabel('FSER')
    plt.title('Frame synchronisation error rate')
    plt.grid(True, which='both', alpha=0.3)
    plt.legend()
    return fig

def plot_fser(reports, path):
    fig = generate_fser_figure(reports)
    fig.savefig(path, format='svg')
    plt.close(fig)
