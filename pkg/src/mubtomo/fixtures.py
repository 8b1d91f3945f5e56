"""Expected states reported for the experimental runs (amplitudes rounded to 3 decimals)."""

import numpy as np

from .qudit import QuditVector

RAW_AMPLITUDES = {
    "psi7": (0.256, 0.362, 0.443, 0.473, 0.439, 0.352, 0.254),
    "psi8_1": (0.217, 0.308, 0.399, 0.456, 0.453, 0.393, 0.297, 0.202),
    "psi8_2": (0.343, 0.350, 0.355, 0.358, 0.359, 0.357, 0.354, 0.348),
}

# the published values are rounded, so the norm is only close to 1
NORM_TOL = 2e-3


def fixture_names():
    return tuple(RAW_AMPLITUDES)


def load_fixture(name, normalize=True):
    try:
        amps = np.array(RAW_AMPLITUDES[name], dtype=float)
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(RAW_AMPLITUDES)}") from None
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"fixture {name} has norm {norm:.6f}, outside 1 +/- {NORM_TOL}")
    return QuditVector(amps / norm if normalize else amps)
