"""Qudit state vectors and slit labeling conventions.

Slit labels are symmetric about zero: ``-(D-1)/2, ..., (D-1)/2``. For odd
``D`` they are integers (``-3..3`` for ``D=7``); for even ``D`` they are
half-integers (``-7/2..7/2`` for ``D=8``).
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

SOURCE = "source"
INVERTED = "inverted"
_CONVENTIONS = (SOURCE, INVERTED)

NORM_TOL = 1e-12


def slit_labels(dim):
    """Symmetric slit labels for a ``dim``-slit aperture, as floats."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return np.arange(dim) - (dim - 1) / 2.0


def label_index(label, dim):
    """Array position of slit ``label`` (int, float or Fraction)."""
    pos = Fraction(label) + Fraction(dim - 1, 2)
    if pos.denominator != 1 or not 0 <= pos < dim:
        raise ValueError(f"label {label} is not a slit label for D={dim}")
    return int(pos)


_QUBIT_LABELS = {Fraction(2 * k - 7, 2): format(k, "03b") for k in range(8)}


def qubit_labels(label):
    """Three-qubit string for a ``D=8`` slit label.

    >>> qubit_labels(-3.5)
    '000'
    >>> qubit_labels(Fraction(1, 2))
    '100'
    """
    try:
        key = Fraction(label)
    except (TypeError, ValueError):
        raise ValueError(f"not a D=8 slit label: {label!r}") from None
    try:
        return _QUBIT_LABELS[key]
    except KeyError:
        raise ValueError(f"label {label} outside -7/2..7/2") from None


@dataclass(frozen=True)
class QuditVector:
    """Complex amplitudes over the slit labels.

    ``convention`` records whether amplitudes are stored in the source
    labeling or in the mirrored labeling produced by the image-plane
    inversion (slit ``l`` stored at ``-l``).
    """

    amplitudes: np.ndarray
    convention: str = SOURCE
    labels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise ValueError("a qudit vector needs at least one amplitude")
        if self.convention not in _CONVENTIONS:
            raise ValueError(f"unknown index convention {self.convention!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        labels = slit_labels(amps.size)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self):
        return self.amplitudes.size

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol=NORM_TOL):
        return abs(self.norm**2 - 1.0) <= tol

    def normalized(self):
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return QuditVector(self.amplitudes / n, self.convention)

    def in_source_labels(self):
        """Same state with amplitudes in the source labeling."""
        if self.convention == SOURCE:
            return self
        return QuditVector(self.amplitudes[::-1], SOURCE)

    def amplitude(self, label):
        return self.amplitudes[label_index(label, self.dim)]

    def overlap(self, other):
        """``<self|other>``, both taken in the source labeling."""
        a = self.in_source_labels().amplitudes
        b = other.in_source_labels().amplitudes
        if a.size != b.size:
            raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
        return complex(np.vdot(a, b))

    def projector(self):
        a = self.in_source_labels().amplitudes
        return np.outer(a, a.conj())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.in_source_labels().amplitudes, dtype=dtype)

    def __len__(self):
        return self.dim


def as_vector(state):
    """Coerce a QuditVector or 1-D array-like to a source-labeled QuditVector."""
    if isinstance(state, QuditVector):
        return state.in_source_labels()
    return QuditVector(state)


def state_fidelity(a, b):
    """``|<a|b>|^2`` for two pure states."""
    return abs(as_vector(a).overlap(as_vector(b))) ** 2
