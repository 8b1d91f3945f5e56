"""Forward model of the slit-encoded photon: beam, two SLMs, far-field detection.

Lengths are in metres. The far-field rate for a state with source-labeled
amplitudes ``c_l`` is

    C(x) = sinc^2(k a x / f) * |sum_l c_l exp(i l d k x / f)|^2

with ``sinc(u) = sin(u)/u``, normalized so that a single open slit gives 1
at ``x = 0``. States stored in the inverted labeling are mapped back to the
source labeling first, so the rate does not depend on whether the image
inversion is modelled explicitly.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from . import kernels
from .qudit import INVERTED, SOURCE, QuditVector, as_vector, slit_labels


@dataclass(frozen=True)
class ApertureGeometry:
    dim: int
    half_width: float = 52e-6
    spacing: float = 208e-6
    wavelength: float = 670e-9
    focal_length: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"need at least one slit, got dim={self.dim}")
        for name in ("half_width", "spacing", "wavelength", "focal_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if 2 * self.half_width > self.spacing:
            raise ValueError(
                f"slits overlap: width 2a={2 * self.half_width:g} exceeds spacing d={self.spacing:g}"
            )

    @property
    def wavenumber(self):
        return 2.0 * np.pi / self.wavelength

    @property
    def fringe_scale(self):
        """Inter-slit phase per metre of detector displacement, ``k d / f``."""
        return self.wavenumber * self.spacing / self.focal_length

    @property
    def envelope_scale(self):
        return self.wavenumber * self.half_width / self.focal_length

    @property
    def slit_centers(self):
        return slit_labels(self.dim) * self.spacing

    @property
    def fringe_period(self):
        return self.wavelength * self.focal_length / self.spacing

    @property
    def envelope_first_zero(self):
        return self.wavelength * self.focal_length / (2.0 * self.half_width)


@dataclass(frozen=True)
class BeamProfile:
    kind: str = "uniform"
    waist: float = None
    center_offset: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown beam kind {self.kind!r}")
        if self.kind == "gaussian" and not (self.waist is not None and self.waist > 0):
            raise ValueError("gaussian beam needs a positive waist")


@dataclass(frozen=True)
class SlmModulation:
    """Amplitude factors ``lambda_l = sqrt(t_l)`` and image-plane phases ``theta_l``."""

    lambdas: np.ndarray
    thetas: np.ndarray = None

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float)
        if np.any(lam < 0) or np.any(lam > 1):
            raise ValueError("amplitude factors must lie in [0, 1]")
        th = np.zeros_like(lam) if self.thetas is None else np.mod(np.array(self.thetas, dtype=float), 2 * np.pi)
        if th.shape != lam.shape:
            raise ValueError("lambdas and thetas differ in length")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "thetas", th)

    @property
    def transmissions(self):
        return self.lambdas**2

    @classmethod
    def from_setting(cls, setting):
        return cls(np.clip(setting.epsilons, 0.0, 1.0), setting.phases)


@dataclass(frozen=True)
class DetectorConfig:
    slit_width: float = 20e-6
    mode: str = "point"
    samples: int = 32

    def __post_init__(self):
        if self.mode not in ("point", "integrated"):
            raise ValueError(f"unknown detector mode {self.mode!r}")
        if self.mode == "integrated":
            if not self.slit_width > 0:
                raise ValueError("integrated detector needs a positive slit width")
            if self.samples < 32:
                raise ValueError("integrated detector needs at least 32 quadrature samples")


POINT_DETECTOR = DetectorConfig()


def _slit_intensity(profile, geom):
    if profile.kind == "uniform":
        return np.ones(geom.dim)
    w = profile.waist
    lo = geom.slit_centers - geom.half_width - profile.center_offset
    hi = geom.slit_centers + geom.half_width - profile.center_offset
    s = np.sqrt(2.0) / w
    # integral of exp(-2 x^2 / w^2) over [lo, hi]; erfc form keeps precision in the tails
    diff = special.erf(s * hi) - special.erf(s * lo)
    diff = np.where(lo > 0, special.erfc(s * lo) - special.erfc(s * hi), diff)
    diff = np.where(hi < 0, special.erfc(-s * hi) - special.erfc(-s * lo), diff)
    return diff * w * np.sqrt(np.pi / 2.0) / 2.0


def beam_amplitudes(profile, geom):
    """Real, nonnegative slit amplitudes from the beam intensity integrated over each slit."""
    inten = _slit_intensity(profile, geom)
    total = inten.sum()
    if not total > 0:
        raise ValueError("beam delivers no intensity to the aperture")
    return QuditVector(np.sqrt(inten / total))


def fit_beam(target, geom, fit_offset=True):
    """Gaussian beam whose slit amplitudes best match ``target`` (least squares).

    Returns ``(profile, max_abs_residual)``. Convenience only: a real beam need
    not be Gaussian.
    """
    target = np.abs(as_vector(target).normalized().amplitudes)
    span = geom.dim * geom.spacing

    def make(params):
        off = params[1] * span if fit_offset else 0.0
        return BeamProfile("gaussian", span * np.exp(params[0]), off)

    def resid(params):
        return beam_amplitudes(make(params), geom).amplitudes.real - target

    x0 = [0.0, 0.0] if fit_offset else [0.0]
    if not fit_offset:
        res = optimize.least_squares(lambda p: resid([p[0], 0.0]), x0, xtol=1e-14, ftol=1e-14)
        params = [res.x[0], 0.0]
    else:
        res = optimize.least_squares(resid, x0, xtol=1e-14, ftol=1e-14)
        params = res.x
    profile = make(params)
    return profile, float(np.max(np.abs(resid(params))))


def transmission(beta, lambdas):
    """Normalization ``N = sum_l lambda_l^2 |beta_l|^2``: fraction of photons passing SLM1."""
    beta = as_vector(beta)
    lam = lambdas.lambdas if isinstance(lambdas, SlmModulation) else np.asarray(lambdas, dtype=float)
    if lam.shape != (beta.dim,):
        raise ValueError(f"expected {beta.dim} amplitude factors, got {lam.shape}")
    return float(np.sum(lam**2 * np.abs(beta.amplitudes) ** 2))


def prepare_state(beta, lambdas):
    """Amplitude-modulated state ``lambda_l beta_l / sqrt(N)``."""
    beta = as_vector(beta)
    lam = lambdas.lambdas if isinstance(lambdas, SlmModulation) else np.asarray(lambdas, dtype=float)
    if np.any(lam < 0) or np.any(lam > 1):
        raise ValueError("amplitude factors must lie in [0, 1]")
    n = transmission(beta, lam)
    if n <= 0:
        raise ValueError("no photon is transmitted: all slits with beam intensity are closed")
    return QuditVector(lam * beta.amplitudes / np.sqrt(n))


def apply_phase(state, thetas, invert_labels=False):
    """Multiply amplitude ``l`` by ``exp(i theta_l)``; optionally mirror the labels ``l -> -l``."""
    if not isinstance(state, QuditVector):
        state = QuditVector(state)
    th = np.asarray(thetas, dtype=float)
    if th.shape != (state.dim,):
        raise ValueError(f"expected {state.dim} phases, got {th.shape}")
    amps = state.amplitudes * np.exp(1j * th)
    if not invert_labels:
        return QuditVector(amps, state.convention)
    flipped = INVERTED if state.convention == SOURCE else SOURCE
    return QuditVector(amps[::-1], flipped)


def count_rate(state, x, geom, det=POINT_DETECTOR):
    """Relative single-count rate at detector position(s) ``x``."""
    c = as_vector(state).amplitudes
    if c.size != geom.dim:
        raise ValueError(f"state has dimension {c.size}, aperture has {geom.dim} slits")
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    labels = slit_labels(geom.dim)
    if det.mode == "integrated":
        n = det.samples
        offsets = ((np.arange(n) + 0.5) / n - 0.5) * det.slit_width
        grid = np.ascontiguousarray((xs[:, None] + offsets[None, :]).ravel())
        rates = kernels.interference_pattern(
            np.ascontiguousarray(c), labels, grid, geom.fringe_scale, geom.envelope_scale
        )
        rates = np.asarray(rates).reshape(xs.size, n).mean(axis=1)
    else:
        rates = np.asarray(kernels.interference_pattern(
            np.ascontiguousarray(c), labels, np.ascontiguousarray(xs), geom.fringe_scale, geom.envelope_scale
        ))
    return float(rates[0]) if scalar else rates


@dataclass(frozen=True)
class Pattern:
    x: np.ndarray
    rate: np.ndarray

    def visibility(self):
        hi, lo = float(self.rate.max()), float(self.rate.min())
        return (hi - lo) / (hi + lo) if hi + lo > 0 else 0.0


def pattern(state, x_min, x_max, n_points, geom, det=POINT_DETECTOR):
    """Count rate sampled on ``n_points`` uniformly spaced positions."""
    if n_points < 2:
        raise ValueError("a pattern needs at least two sample points")
    if not x_max > x_min:
        raise ValueError(f"empty range [{x_min}, {x_max}]")
    x = np.linspace(x_min, x_max, n_points)
    return Pattern(x, count_rate(state, x, geom, det))


def modulated_rate(beta, setting, geom, det=POINT_DETECTOR, x=0.0, invert_labels=True):
    """Rate for ``beta`` after both SLMs are configured with ``setting``.

    Includes the SLM1 transmission ``N``, so at ``x = 0`` the result equals
    ``|<psi|beta>|^2`` for the vector ``psi`` described by ``setting``.
    """
    beta = as_vector(beta)
    mod = setting if isinstance(setting, SlmModulation) else SlmModulation.from_setting(setting)
    n = transmission(beta, mod)
    if n <= 0:
        return 0.0 if np.ndim(x) == 0 else np.zeros(np.shape(x))
    state = apply_phase(prepare_state(beta, mod), mod.thetas, invert_labels)
    return n * count_rate(state, x, geom, det)
