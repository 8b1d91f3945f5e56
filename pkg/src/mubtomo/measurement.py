"""Projection probabilities, simulated photon counts, and their normalization."""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .mub import is_prime, prime_mub_phases, vector_to_modulation
from .optics import POINT_DETECTOR, apply_phase, count_rate, modulated_rate
from .qudit import QuditVector, as_vector, slit_labels


class EmptyBasisError(ValueError):
    """A basis row of a count table has no counts at all."""

    def __init__(self, alpha):
        super().__init__(f"basis alpha={alpha} recorded zero total counts; cannot normalize")
        self.alpha = alpha


@dataclass(frozen=True)
class ProbabilityTable:
    """Projection probabilities, one row per basis (``alphas[i]`` labels row i)."""

    values: np.ndarray
    alphas: tuple = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("probability table must be 2-D (bases x outcomes)")
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")
        v = np.clip(v, 0.0, 1.0)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        alphas = tuple(range(v.shape[0])) if self.alphas is None else tuple(int(a) for a in self.alphas)
        if len(alphas) != v.shape[0]:
            raise ValueError("one alpha label per row is required")
        object.__setattr__(self, "alphas", alphas)

    @property
    def dim(self):
        return self.values.shape[1]

    def row_sums(self):
        return self.values.sum(axis=1)


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "poisson"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "poisson"):
            raise ValueError(f"unknown noise kind {self.kind!r}")


@dataclass(frozen=True)
class CountTable:
    counts: np.ndarray
    mean_peak_rate: float
    integration_time: float
    seed: int = None
    alphas: tuple = None
    noise: str = "poisson"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = np.array(self.counts)
        if c.ndim != 2:
            raise ValueError("count table must be 2-D (bases x outcomes)")
        if not np.all(np.equal(np.mod(c, 1), 0)) or np.any(c < 0):
            raise ValueError("counts must be nonnegative integers")
        c = c.astype(np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        alphas = tuple(range(c.shape[0])) if self.alphas is None else tuple(int(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)

    @property
    def dim(self):
        return self.counts.shape[1]

    def metadata(self):
        meta = {
            "dim": self.dim,
            "alphas": list(self.alphas),
            "mean_peak_rate": self.mean_peak_rate,
            "integration_time": self.integration_time,
            "seed": self.seed,
            "noise": self.noise,
        }
        meta.update(self.extra)
        return meta


def _rho_of(state_or_rho):
    if isinstance(state_or_rho, QuditVector):
        return None, state_or_rho.in_source_labels().amplitudes
    matrix = getattr(state_or_rho, "matrix", None)
    arr = np.asarray(state_or_rho if matrix is None else matrix, dtype=complex)
    if arr.ndim == 1:
        return None, arr
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return arr, None
    raise ValueError(f"expected a state vector or square density matrix, got shape {arr.shape}")


def ideal_probabilities(state_or_rho, family):
    """``p[a, m] = Tr(rho Pi_m^a)`` (or ``|<psi_m^a|psi>|^2``) for every projector."""
    rho, psi = _rho_of(state_or_rho)
    dim = psi.size if rho is None else rho.shape[0]
    if dim != family.dim:
        raise ValueError(f"state dimension {dim} does not match family dimension {family.dim}")
    u = family.stacked()
    if rho is None:
        if abs(np.vdot(psi, psi).real - 1.0) > 1e-9:
            raise ValueError("state vector is not normalized")
        amps = np.einsum("aim,i->am", u.conj(), psi)
        p = np.abs(amps) ** 2
    else:
        if abs(np.trace(rho).real - 1.0) > 1e-9:
            raise ValueError("density matrix does not have unit trace")
        p = np.einsum("aim,ij,ajm->am", u.conj(), rho, u).real
    return ProbabilityTable(np.clip(p, 0.0, 1.0), family.indices)


def optical_probabilities(beta, family, geom, det=POINT_DETECTOR, invert_labels=True):
    """Same table as :func:`ideal_probabilities`, computed by driving the optical model.

    Each projector is realized by setting SLM1 to ``eps`` and SLM2 to ``phi``
    and reading the rate at ``x = 0``.
    """
    beta = as_vector(beta)
    rows = []
    for b in family.bases:
        row = []
        for k in range(family.dim):
            setting = vector_to_modulation(b.vector(k), tol=1e-10)
            row.append(modulated_rate(beta, setting, geom, det, 0.0, invert_labels))
        rows.append(row)
    return ProbabilityTable(np.clip(rows, 0.0, 1.0), family.indices)


def simulate_counts(p, mean_peak_rate, integration_time, noise=NoiseModel()):
    """Draw one count per projector with mean ``p * rate * time``."""
    if not (mean_peak_rate > 0 and integration_time > 0):
        raise ValueError("rate and integration time must be positive")
    means = p.values * mean_peak_rate * integration_time
    if noise.kind == "none":
        counts = np.rint(means)
    else:
        rng = np.random.default_rng(noise.seed)
        counts = rng.poisson(means)
    return CountTable(counts, mean_peak_rate, integration_time, noise.seed, p.alphas, noise.kind)


def normalize_counts(c):
    """Per-basis normalization: each row becomes a probability simplex."""
    counts = c.counts if isinstance(c, CountTable) else np.asarray(c)
    alphas = c.alphas if isinstance(c, CountTable) else tuple(range(counts.shape[0]))
    totals = counts.sum(axis=1)
    for a, t in zip(alphas, totals):
        if t <= 0:
            raise EmptyBasisError(a)
    return ProbabilityTable(counts / totals[:, None], alphas)


def pattern_positions(geom):
    """Detector positions where the inter-slit phase ``k d x / f`` equals ``2 pi m / D``."""
    m = slit_labels(geom.dim)
    return 2.0 * np.pi * m / (geom.dim * geom.fringe_scale)


def single_pattern_probabilities(state, alpha, geom, det=POINT_DETECTOR, invert_labels=True):
    """All probabilities of phase basis ``alpha`` from one far-field pattern (odd prime D).

    SLM2 imposes ``phi_{0,l}^alpha = 2 pi alpha l^2 / D``; the rate is read at
    the ``D`` positions of :func:`pattern_positions`, divided by the slit
    envelope and normalized. Position ``m`` (in slit-label order) is outcome
    ``m`` of the basis.
    """
    state = as_vector(state)
    d = state.dim
    if d != geom.dim:
        raise ValueError(f"state has dimension {d}, aperture has {geom.dim} slits")
    if d < 3 or not is_prime(d):
        raise ValueError(f"single-pattern extraction needs an odd prime dimension, got D={d}")
    thetas = prime_mub_phases(d, alpha, 0)
    modulated = apply_phase(state, thetas, invert_labels)
    x = pattern_positions(geom)
    rates = count_rate(modulated, x, geom, det)
    env = np.sinc(geom.envelope_scale * x / np.pi) ** 2
    if det.mode == "integrated":
        n = det.samples
        offsets = ((np.arange(n) + 0.5) / n - 0.5) * det.slit_width
        env = (np.sinc(geom.envelope_scale * (x[:, None] + offsets) / np.pi) ** 2).mean(axis=1)
    row = rates / env
    return row / row.sum()


# ---------------------------------------------------------------------------
# serialization


def table_csv(table, fmt=lambda v: f"{v:.17g}"):
    """CSV with columns ``alpha, m, value``; ``m`` is the slit-label of the outcome."""
    vals = table.counts if isinstance(table, CountTable) else table.values
    labels = slit_labels(vals.shape[1])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "m", "value"])
    for a, row in zip(table.alphas, vals):
        for m, v in zip(labels, row):
            mstr = str(int(m)) if float(m).is_integer() else repr(float(m))
            w.writerow([a, mstr, int(v) if isinstance(table, CountTable) else fmt(float(v))])
    return buf.getvalue()


def read_table_csv(text):
    """Parse ``alpha, m, value`` CSV into ``(alphas, values)`` preserving row order."""
    rows = list(csv.DictReader(io.StringIO(text)))
    alphas = []
    grouped = {}
    for r in rows:
        a = int(r["alpha"])
        if a not in grouped:
            alphas.append(a)
            grouped[a] = []
        grouped[a].append((float(r["m"]), float(r["value"])))
    values = [[v for _, v in sorted(grouped[a])] for a in alphas]
    return tuple(alphas), np.array(values)


def counts_to_dict(c):
    return {**c.metadata(), "counts": c.counts.tolist()}


def counts_from_dict(data):
    known = {"dim", "alphas", "mean_peak_rate", "integration_time", "seed", "noise", "counts"}
    return CountTable(
        np.array(data["counts"]),
        float(data["mean_peak_rate"]),
        float(data["integration_time"]),
        data.get("seed"),
        data.get("alphas"),
        data.get("noise", "poisson"),
        {k: v for k, v in data.items() if k not in known},
    )


def probabilities_to_dict(p):
    return {"dim": p.dim, "alphas": list(p.alphas), "values": p.values.tolist()}


def counts_json(c, indent=2):
    return json.dumps(counts_to_dict(c), indent=indent)
