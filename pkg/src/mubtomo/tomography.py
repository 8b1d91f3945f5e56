"""Linear MUB inversion, physicality correction, forced purity and fidelity error bars."""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .measurement import CountTable, EmptyBasisError, ProbabilityTable, normalize_counts
from .qudit import QuditVector, as_vector

DEGENERACY_TOL = 1e-10


class DegenerateEigenvalueWarning(RuntimeWarning):
    """The dominant eigenvalue of a density operator is not unique."""


class ReconstructionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DensityOperator:
    """``D x D`` Hermitian operator; ``raw`` estimates may fail positivity."""

    matrix: np.ndarray
    raw: bool = False

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density operator must be square, got shape {m.shape}")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > 1e-10:
            raise ValueError(f"operator is not Hermitian (max |rho - rho^+| = {herm_err:.2e})")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"operator trace is {tr:.15g}, expected 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    @classmethod
    def pure(cls, psi):
        return cls(as_vector(psi).normalized().projector())


def _as_matrix(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def linear_reconstruct(p, family):
    """Invert ``rho = sum_a sum_m p[a, m] Pi_m^a - I``; positivity is not enforced."""
    values = p.values if isinstance(p, ProbabilityTable) else np.asarray(p, dtype=float)
    if values.shape != (len(family.bases), family.dim):
        raise ValueError(
            f"probability table shape {values.shape} does not match family "
            f"({len(family.bases)} bases, D={family.dim})"
        )
    rho = kernels.assemble_density(
        np.ascontiguousarray(values[None], dtype=float), np.ascontiguousarray(family.stacked())
    )[0]
    return DensityOperator(rho, raw=True)


def force_physical(raw):
    """Clip negative eigenvalues to zero and rescale the rest to unit trace."""
    m = _as_matrix(raw)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    s = w.sum()
    if not s > 0:
        raise ReconstructionError("every eigenvalue is nonpositive; no physical state to recover")
    return DensityOperator((v * (w / s)) @ v.conj().T)


def _phase_fix(vec):
    mags = np.abs(vec)
    k = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    return vec * np.exp(-1j * np.angle(vec[k]))


def force_purity(rho):
    """Dominant eigenvector, rephased so its largest coefficient is real positive.

    Emits :class:`DegenerateEigenvalueWarning` when the top eigenvalue is
    degenerate within ``1e-10``; the first eigenvector returned by the solver
    is used in that case.
    """
    m = _as_matrix(rho)
    w, v = np.linalg.eigh(m)
    if w.size > 1 and w[-1] - w[-2] < DEGENERACY_TOL:
        mult = int(np.sum(w >= w[-1] - DEGENERACY_TOL))
        what = "fully degenerate" if mult == w.size else f"{mult}-fold degenerate"
        warnings.warn(f"dominant eigenvalue is {what}", DegenerateEigenvalueWarning, stacklevel=2)
    return QuditVector(_phase_fix(v[:, -1]))


def fidelity(psi, rho):
    """``<psi|rho|psi>`` clamped to [0, 1]."""
    a = as_vector(psi).amplitudes
    m = _as_matrix(rho)
    if m.shape != (a.size, a.size):
        raise ValueError(f"dimension mismatch: state {a.size}, operator {m.shape}")
    return float(np.clip(np.vdot(a, m @ a).real, 0.0, 1.0))


def purity(rho):
    m = _as_matrix(rho)
    return float(np.real(np.vdot(m, m)))


@dataclass(frozen=True)
class FidelityEstimate:
    value: float
    sigma: float
    n_trials: int

    def __str__(self):
        return f"{self.value:.4f} +/- {self.sigma:.4f} ({self.n_trials} trials)"


@dataclass(frozen=True)
class ReconstructionResult:
    raw: DensityOperator
    physical: DensityOperator
    pure_forced: QuditVector
    min_raw_eigenvalue: float
    diagnostics: str = ""
    raw_eigenvalues: np.ndarray = field(default=None, repr=False)

    def fidelities(self, psi):
        return {
            "raw": float(np.vdot(as_vector(psi).amplitudes, self.raw.matrix @ as_vector(psi).amplitudes).real),
            "physical": fidelity(psi, self.physical),
            "pure_forced": abs(as_vector(psi).overlap(self.pure_forced)) ** 2,
        }


def reconstruct(data, family):
    """Full pipeline from counts or probabilities to raw, physical and pure estimates."""
    p = normalize_counts(data) if isinstance(data, CountTable) else data
    raw = linear_reconstruct(p, family)
    evals = raw.eigenvalues()
    notes = []
    if evals[0] < 0:
        notes.append(f"raw estimate not positive semidefinite (min eigenvalue {evals[0]:.3e}); clipped")
    physical = force_physical(raw)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateEigenvalueWarning)
        pure = force_purity(physical)
    notes.extend(f"warning: {w.message}" for w in caught if issubclass(w.category, DegenerateEigenvalueWarning))
    return ReconstructionResult(raw, physical, pure, float(evals[0]), "\n".join(notes), evals)


def _batched_physical(rhos):
    w, v = np.linalg.eigh(rhos)
    w = np.clip(w, 0.0, None)
    s = w.sum(axis=1)
    if np.any(s <= 0):
        raise ReconstructionError("a bootstrap replicate has no positive eigenvalue")
    return w / s[:, None], v


def fidelity_with_errors(counts, family, psi_expected, n_trials=1000, seed=0, estimator="physical"):
    """Parametric Poisson bootstrap of the fidelity with ``psi_expected``.

    Every trial redraws each count as ``Poisson(observed)`` and reruns
    normalization, linear inversion and eigenvalue clipping. With
    ``estimator="pure"`` the forced-purity state is scored instead of the
    clipped operator. Returns the mean and standard deviation over trials.
    """
    if n_trials < 100:
        raise ValueError("use at least 100 bootstrap trials")
    if estimator not in ("physical", "pure"):
        raise ValueError(f"unknown estimator {estimator!r}")
    psi = as_vector(psi_expected).amplitudes
    obs = counts.counts.astype(float)
    normalize_counts(counts)  # surfaces empty rows before resampling
    rng = np.random.default_rng(seed)
    draws = rng.poisson(np.broadcast_to(obs, (n_trials,) + obs.shape)).astype(float)
    totals = draws.sum(axis=2)
    empty = np.argwhere(totals <= 0)
    if empty.size:
        raise EmptyBasisError(counts.alphas[empty[0][1]])
    probs = np.ascontiguousarray(draws / totals[..., None])
    rhos = kernels.assemble_density(probs, np.ascontiguousarray(family.stacked()))
    w, v = _batched_physical(np.asarray(rhos))
    # |<psi|v_k>|^2 for every eigenvector
    overlaps = np.abs(np.einsum("i,bik->bk", psi.conj(), v)) ** 2
    if estimator == "physical":
        f = np.sum(w * overlaps, axis=1)
    else:
        f = overlaps[:, -1]
    f = np.clip(f, 0.0, 1.0)
    return FidelityEstimate(float(f.mean()), float(f.std(ddof=1)), n_trials)


# ---------------------------------------------------------------------------
# serialization


def _pairs(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def density_to_dict(rho):
    return {"dim": rho.dim, "matrix": _pairs(rho.matrix)}


def density_from_dict(data, raw=False):
    arr = np.array(data["matrix"], dtype=float)
    m = arr[..., 0] + 1j * arr[..., 1]
    if m.shape != (data["dim"], data["dim"]):
        raise ValueError("matrix shape does not match dim")
    return DensityOperator(m, raw=raw)


def result_to_dict(result, expected=None, estimate=None):
    out = {
        "dim": result.physical.dim,
        "raw": {**density_to_dict(result.raw), "eigenvalues": [float(x) for x in result.raw_eigenvalues]},
        "physical": {
            **density_to_dict(result.physical),
            "eigenvalues": [float(x) for x in result.physical.eigenvalues()],
            "purity": purity(result.physical),
        },
        "pure_forced": [[float(z.real), float(z.imag)] for z in result.pure_forced.amplitudes],
        "min_raw_eigenvalue": result.min_raw_eigenvalue,
        "diagnostics": result.diagnostics,
    }
    if expected is not None:
        out["fidelity"] = result.fidelities(expected)
    if estimate is not None:
        out["fidelity_bootstrap"] = {
            "value": estimate.value, "sigma": estimate.sigma, "n_trials": estimate.n_trials,
        }
    return out


def result_json(result, expected=None, estimate=None, indent=2):
    return json.dumps(result_to_dict(result, expected, estimate), indent=indent)
