"""Construction and certification of mutually unbiased bases.

Two families are available: the quadratic-phase construction for odd prime
dimensions and the tabulated eight-dimensional family built from nine
unitaries (see :mod:`mubtomo._d8tables`).
"""

import csv
import enum
import functools
import io
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from ._d8tables import table_indices, table_unitary
from .qudit import QuditVector, slit_labels

TWO_PI = 2.0 * np.pi


class Provenance(str, enum.Enum):
    PRIME_FORMULA = "prime_formula"
    D8_TABLES = "d8_tables"


class CertificationError(RuntimeError):
    """Embedded MUB data failed its unbiasedness audit."""


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % k for k in range(3, int(n**0.5) + 1, 2))


def _check_odd_prime(dim):
    if not isinstance(dim, (int, np.integer)) or isinstance(dim, bool):
        raise TypeError(f"dimension must be an integer, got {dim!r}")
    if dim % 2 == 0:
        raise ValueError(f"quadratic-phase MUBs need an odd prime dimension; D={dim} is even")
    if not is_prime(dim):
        raise ValueError(f"quadratic-phase MUBs need an odd prime dimension; D={dim} is not prime")


def prime_mub_phases(dim, alpha, m):
    """SLM phases ``2 pi (alpha l^2 + m l) / D mod 2 pi`` over the slit labels."""
    _check_odd_prime(dim)
    if not 1 <= alpha <= dim:
        raise ValueError(f"alpha must be in 1..{dim}, got {alpha}")
    half = (dim - 1) // 2
    if m != int(m) or not -half <= m <= half:
        raise ValueError(f"m must be an integer in -{half}..{half}, got {m}")
    l = np.arange(-half, half + 1)
    # integer arithmetic first, so the reduction mod D is exact
    return TWO_PI * np.mod(alpha * l * l + int(m) * l, dim) / dim


def prime_mub_vector(dim, alpha, m):
    """Vector ``m`` of phase basis ``alpha`` for odd prime ``dim``.

    Coefficients are ``exp(-i phi_l) / sqrt(D)`` with ``phi_l`` from
    :func:`prime_mub_phases`; ``m`` runs over the slit labels ``-(D-1)/2..(D-1)/2``.
    """
    phases = prime_mub_phases(dim, alpha, m)
    return QuditVector(np.exp(-1j * phases) / np.sqrt(dim))


@dataclass(frozen=True)
class MubBasis:
    """One orthonormal basis; column ``k`` of ``unitary`` is vector ``k``."""

    dim: int
    index: int
    unitary: np.ndarray

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex)
        if u.shape != (self.dim, self.dim):
            raise ValueError(f"basis matrix must be {self.dim}x{self.dim}, got {u.shape}")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @property
    def vectors(self):
        return tuple(QuditVector(self.unitary[:, k]) for k in range(self.dim))

    def vector(self, k):
        return QuditVector(self.unitary[:, k])

    def projectors(self):
        u = self.unitary
        return np.einsum("im,jm->mij", u, u.conj())


@dataclass(frozen=True)
class MubFamily:
    dim: int
    bases: tuple
    provenance: Provenance
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        for b in self.bases:
            if b.dim != self.dim:
                raise ValueError(f"basis {b.index} has dimension {b.dim}, family has {self.dim}")

    def __len__(self):
        return len(self.bases)

    @property
    def indices(self):
        return tuple(b.index for b in self.bases)

    @property
    def num_projectors(self):
        return len(self.bases) * self.dim

    def stacked(self):
        """``(n_bases, D, D)`` array; ``[a, :, m]`` is vector m of basis a."""
        return np.stack([b.unitary for b in self.bases])

    def basis(self, index):
        for b in self.bases:
            if b.index == index:
                return b
        raise KeyError(f"no basis with index {index}")


def computational_basis(dim):
    return MubBasis(dim, 0, np.eye(dim, dtype=complex))


def prime_mub_family(dim):
    """Computational basis (index 0) plus the ``D`` quadratic-phase bases."""
    _check_odd_prime(dim)
    half = (dim - 1) // 2
    bases = [computational_basis(dim)]
    for alpha in range(1, dim + 1):
        cols = [prime_mub_vector(dim, alpha, m).amplitudes for m in range(-half, half + 1)]
        bases.append(MubBasis(dim, alpha, np.column_stack(cols)))
    return MubFamily(dim, bases, Provenance.PRIME_FORMULA)


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class PairResult:
    alpha: int
    beta: int
    max_deviation: float
    passed: bool


@dataclass(frozen=True)
class CertificationReport:
    dim: int
    n_bases: int
    tol: float
    orthonormality: dict
    pairs: tuple
    notes: tuple = field(default=())

    @property
    def max_orthonormality_deviation(self):
        return max(self.orthonormality.values(), default=0.0)

    @property
    def max_unbiasedness_deviation(self):
        return max((p.max_deviation for p in self.pairs), default=0.0)

    @property
    def failed_pairs(self):
        return tuple(p for p in self.pairs if not p.passed)

    @property
    def passed(self):
        return (
            self.n_bases == self.dim + 1
            and self.max_orthonormality_deviation < self.tol
            and not self.failed_pairs
        )

    def summary(self):
        lines = [
            f"dimension: {self.dim}",
            f"bases: {self.n_bases} (complete family needs {self.dim + 1})",
            f"projectors: {self.n_bases * self.dim}",
            f"tolerance: {self.tol:.1e}",
            f"max orthonormality deviation: {self.max_orthonormality_deviation:.3e}",
            f"max |overlap^2 - 1/D| over cross pairs: {self.max_unbiasedness_deviation:.3e}",
        ]
        for p in self.pairs:
            mark = "pass" if p.passed else "FAIL"
            lines.append(f"  pair ({p.alpha}, {p.beta}): {p.max_deviation:.3e} {mark}")
        lines.extend(self.notes)
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _pair_deviation(u, v, dim):
    return float(np.max(np.abs(np.abs(u.conj().T @ v) ** 2 - 1.0 / dim)))


def verify_family(family, tol=1e-10):
    """Audit orthonormality of each basis and unbiasedness of every pair.

    Never raises on a bad family; inspect ``report.passed`` and
    ``report.failed_pairs``.
    """
    d = family.dim
    eye = np.eye(d)
    ortho = {}
    for b in family.bases:
        ortho[b.index] = float(np.max(np.abs(b.unitary.conj().T @ b.unitary - eye)))
    pairs = []
    for b1, b2 in itertools.combinations(family.bases, 2):
        dev = _pair_deviation(b1.unitary, b2.unitary, d)
        pairs.append(PairResult(b1.index, b2.index, dev, dev < tol))
    notes = (family.notes,) if family.notes else ()
    return CertificationReport(d, len(family.bases), tol, ortho, tuple(pairs), notes)


# ---------------------------------------------------------------------------
# eight-dimensional tables


@dataclass(frozen=True)
class TableAudit:
    reading: str
    selected: tuple
    candidates: tuple
    subsets_passing: tuple
    offending_pairs: tuple
    max_unitarity_deviation: float

    def describe(self):
        names = ", ".join("I" if k == 0 else f"U{k}" for k in self.selected)
        lines = [
            f"table audit: basis vectors read as {self.reading} of each unitary",
            f"mutually unbiased 9-set: {{{names}}}",
            f"passing 9-subsets of {{I, U1..U9}}: {len(self.subsets_passing)}",
        ]
        if self.offending_pairs:
            bad = ", ".join(f"({a}, {b})" for a, b in self.offending_pairs)
            lines.append(f"biased pairs among candidates (0 = identity): {bad}")
        return "\n".join(lines)


def _table_candidates(reading):
    mats = {0: np.eye(8, dtype=complex)}
    for k in table_indices():
        u = table_unitary(k)
        # row reading: vector m has coefficients conj(U[m, l]) (eps=|U|, phi=arg U)
        mats[k] = u if reading == "columns" else u.conj().T
    return mats


@functools.lru_cache(maxsize=None)
def audit_tables(tol=1e-12):
    """Find the mutually unbiased 9-subset of ``{I, U1..U9}``.

    Both the column and the row reading of the tables are tried; the first
    reading with a passing subset wins.
    """
    unit_dev = max(
        float(np.max(np.abs(table_unitary(k).conj().T @ table_unitary(k) - np.eye(8))))
        for k in table_indices()
    )
    last = None
    for reading in ("columns", "rows"):
        mats = _table_candidates(reading)
        keys = tuple(sorted(mats))
        bad = tuple(
            (a, b) for a, b in itertools.combinations(keys, 2)
            if _pair_deviation(mats[a], mats[b], 8) >= tol
        )
        badset = set(bad)
        passing = tuple(
            sub for sub in itertools.combinations(keys, 9)
            if not any(p in badset for p in itertools.combinations(sub, 2))
        )
        audit = TableAudit(reading, passing[0] if passing else (), keys, passing, bad, unit_dev)
        if passing:
            return audit
        last = audit
    raise CertificationError(
        "tables contain no mutually unbiased 9-set; offending pairs: "
        + ", ".join(f"({a}, {b})" for a, b in last.offending_pairs)
    )


def dim8_mub_family():
    """Nine mutually unbiased bases for ``D=8`` from the tabulated unitaries."""
    audit = audit_tables()
    mats = _table_candidates(audit.reading)
    bases = [MubBasis(8, k, mats[k]) for k in audit.selected]
    return MubFamily(8, bases, Provenance.D8_TABLES, notes=audit.describe())


def family_for(dim, source=None):
    """Family lookup used by the CLI: ``source`` is ``"prime"``, ``"tables"`` or None (auto)."""
    if source is None:
        source = "tables" if dim == 8 else "prime"
    if source == "tables":
        if dim != 8:
            raise ValueError(f"no construction available for D={dim} from tables (only D=8)")
        return dim8_mub_family()
    if source == "prime":
        if dim < 3 or not is_prime(dim):
            raise ValueError(f"no construction available for D={dim} (need an odd prime, or D=8 with tables)")
        return prime_mub_family(dim)
    raise ValueError(f"unknown family source {source!r}")


# ---------------------------------------------------------------------------
# modulation settings


@dataclass(frozen=True)
class ModulationSetting:
    """Slit amplitude transmissions and image-plane phases for one projector."""

    epsilons: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        eps = np.array(self.epsilons, dtype=float)
        phi = np.mod(np.array(self.phases, dtype=float), TWO_PI)
        if eps.shape != phi.shape or eps.ndim != 1:
            raise ValueError("epsilons and phases must be 1-D arrays of equal length")
        if np.any(eps < 0):
            raise ValueError("amplitude transmissions must be nonnegative")
        eps.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "phases", phi)

    @property
    def dim(self):
        return self.epsilons.size

    def to_vector(self):
        return QuditVector(self.epsilons * np.exp(-1j * self.phases))


def vector_to_modulation(v, tol=1e-12):
    """SLM settings ``eps_l = |c_l|``, ``phi_l = -arg(c_l) mod 2 pi`` for a unit vector."""
    v = v.in_source_labels() if isinstance(v, QuditVector) else QuditVector(v)
    if not v.is_normalized(tol):
        raise ValueError(f"modulation needs a unit vector; norm^2 = {v.norm ** 2:.15g}")
    c = v.amplitudes
    eps = np.abs(c)
    phi = np.where(eps > 0, np.mod(-np.angle(c), TWO_PI), 0.0)
    # mod can return 2 pi itself for tiny negative zero-like inputs
    phi[phi >= TWO_PI] = 0.0
    return ModulationSetting(eps, phi)


# ---------------------------------------------------------------------------
# export


def _complex_pairs(arr):
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def family_to_dict(family):
    return {
        "dim": family.dim,
        "provenance": family.provenance.value,
        "bases": [
            # vectors[k] is basis vector k
            {"alpha": b.index, "vectors": _complex_pairs(b.unitary.T)}
            for b in family.bases
        ],
    }


def family_from_dict(data):
    dim = int(data["dim"])
    bases = []
    for entry in data["bases"]:
        vecs = np.array(entry["vectors"], dtype=float)
        u = (vecs[..., 0] + 1j * vecs[..., 1]).T
        bases.append(MubBasis(dim, int(entry["alpha"]), u))
    prov = Provenance(data.get("provenance", Provenance.PRIME_FORMULA.value))
    return MubFamily(dim, bases, prov)


def family_to_json(family, indent=None):
    return json.dumps(family_to_dict(family), indent=indent)


def modulation_rows(family):
    """Yield ``(alpha, m, l, epsilon, phi_rad)`` for every projector and slit."""
    labels = slit_labels(family.dim)
    for b in family.bases:
        for k, m in enumerate(labels):
            setting = vector_to_modulation(b.vector(k), tol=1e-10)
            for l, eps, phi in zip(labels, setting.epsilons, setting.phases):
                yield b.index, m, l, eps, phi


def _fmt_label(x):
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def modulation_csv(family):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "m", "l", "epsilon", "phi_rad"])
    for alpha, m, l, eps, phi in modulation_rows(family):
        w.writerow([alpha, _fmt_label(m), _fmt_label(l), f"{eps:.17g}", f"{phi:.17g}"])
    return buf.getvalue()
