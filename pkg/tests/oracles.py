"""Independent brute-force references used by the tests.

Nothing here imports arraybeam: amplitudes are read off densely sampled
waveforms, integrals come from scipy quadrature or closed forms.
"""

import numpy as np

SAMPLES_PER_PERIOD = 1 << 17


def sampled_amplitude(wave: np.ndarray) -> float:
    """Half the peak-to-peak swing of one sampled period."""
    return 0.5 * (wave.max() - wave.min())


def time_axis(samples: int = SAMPLES_PER_PERIOD) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi, samples, endpoint=False)


def das_time_domain(offsets, samples: int = SAMPLES_PER_PERIOD) -> float:
    """Amplitude of ``mean_i sin(x + psi_i)`` from a sampled period."""
    x = time_axis(samples)
    wave = np.zeros_like(x)
    for psi in offsets:
        wave += np.sin(x + psi)
    return sampled_amplitude(wave / len(offsets))


def conventional_time_domain(matrix, samples: int = SAMPLES_PER_PERIOD) -> float:
    """Amplitude of the literal ``(1/N^2) sum_ij sin(x + D_ij)``."""
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    x = time_axis(samples)
    wave = np.zeros_like(x)
    for i in range(n):
        for j in range(n):
            wave += np.sin(x + m[i, j])
    return sampled_amplitude(wave / n**2)
