"""Command-line front end: ``mubtomo {mub,simulate,reconstruct,pattern,fidelity}``.

Exit codes: 0 success, 2 configuration error, 3 certification failure,
4 numerical failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fixtures import RAW_AMPLITUDES, load_fixture
from .measurement import (
    EmptyBasisError,
    NoiseModel,
    counts_from_dict,
    counts_to_dict,
    optical_probabilities,
    simulate_counts,
    table_csv,
)
from .mub import family_for, family_to_json, modulation_csv, vector_to_modulation, verify_family
from .optics import (
    ApertureGeometry,
    BeamProfile,
    DetectorConfig,
    SlmModulation,
    beam_amplitudes,
    modulated_rate,
)
from .qudit import QuditVector, label_index
from .tomography import ReconstructionError, fidelity_with_errors, reconstruct, result_json

log = logging.getLogger("mubtomo")

EXIT_OK, EXIT_CONFIG, EXIT_CERT, EXIT_NUMERIC = 0, 2, 3, 4
AMPLITUDE_WARN_TOL = 1e-3


class ConfigError(ValueError):
    pass


def derive_seeds(master, n=2):
    """Sub-seeds ``[counts, bootstrap]`` spawned in order from the master seed."""
    children = np.random.SeedSequence(int(master)).spawn(n)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


@dataclass
class ExperimentConfig:
    dim: int
    geometry: ApertureGeometry
    beam: QuditVector
    family_source: str
    noise: NoiseModel
    mean_peak_rate: float
    integration_time: float
    expected: QuditVector
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    output_dir: Path = Path("out")
    seed: int = 0


def _line_of(text, key):
    needle = f'"{key}"'
    for n, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return n
    return None


def _amplitudes(raw, dim, what, where):
    if isinstance(raw, str):
        if raw not in RAW_AMPLITUDES:
            raise ConfigError(f"{where}: unknown fixture {raw!r} for {what}")
        vec = load_fixture(raw)
    else:
        try:
            arr = np.array(
                [complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a) for a in raw]
            )
        except (TypeError, ValueError, IndexError):
            raise ConfigError(f"{where}: {what} must be a list of numbers or [re, im] pairs") from None
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ConfigError(f"{where}: {what} is the zero vector")
        if abs(norm**2 - 1) > AMPLITUDE_WARN_TOL:
            log.warning("%s: %s has squared norm %.6f; normalizing", where, what, norm**2)
        vec = QuditVector(arr / norm)
    if vec.dim != dim:
        raise ConfigError(f"{where}: {what} has {vec.dim} amplitudes but dim is {dim}")
    return vec


def load_config(path, seed_override=None):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: top level must be an object")

    def where(key):
        line = _line_of(text, key)
        return f"{path}:{line}" if line else str(path)

    if "dim" not in data:
        raise ConfigError(f"{path}: missing required key 'dim'")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 2:
        raise ConfigError(f"{where('dim')}: dim must be an integer >= 2")

    try:
        geometry = ApertureGeometry(dim, **data.get("geometry", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where('geometry')}: {exc}") from None
    try:
        detector = DetectorConfig(**data.get("detector", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where('detector')}: {exc}") from None

    beam_cfg = data.get("beam", {"kind": "uniform"})
    if isinstance(beam_cfg, (str, list)):
        beam = _amplitudes(beam_cfg, dim, "beam", where("beam"))
    elif "fixture" in beam_cfg:
        beam = _amplitudes(beam_cfg["fixture"], dim, "beam fixture", where("fixture"))
    elif "amplitudes" in beam_cfg:
        beam = _amplitudes(beam_cfg["amplitudes"], dim, "beam amplitudes", where("amplitudes"))
    else:
        try:
            beam = beam_amplitudes(BeamProfile(**beam_cfg), geometry)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where('beam')}: {exc}") from None

    source = data.get("family")
    if source not in (None, "prime", "tables"):
        raise ConfigError(f"{where('family')}: family must be 'prime' or 'tables'")

    noise_cfg = data.get("noise", {})
    kind = noise_cfg.get("kind", "poisson")
    rate = noise_cfg.get("mean_peak_rate", 10000.0)
    time = noise_cfg.get("integration_time", 1.0)
    seed = noise_cfg.get("seed", 0) if seed_override is None else seed_override
    if kind not in ("none", "poisson"):
        raise ConfigError(f"{where('kind')}: noise kind must be 'none' or 'poisson'")
    if not isinstance(rate, (int, float)) or rate <= 0:
        raise ConfigError(f"{where('mean_peak_rate')}: mean_peak_rate must be positive")
    if not isinstance(time, (int, float)) or time <= 0:
        raise ConfigError(f"{where('integration_time')}: integration_time must be positive")
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"{where('seed')}: seed must be a nonnegative integer")

    expected_raw = data.get("expected_state")
    expected = beam if expected_raw is None else _amplitudes(expected_raw, dim, "expected_state", where("expected_state"))
    out = Path(data.get("output", {}).get("dir", "out"))
    counts_seed = derive_seeds(seed)[0]
    return ExperimentConfig(
        dim, geometry, beam, source, NoiseModel(kind, counts_seed), float(rate), float(time),
        expected, detector, out, seed,
    )


def _family(dim, source):
    try:
        return family_for(dim, source)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _outdir(args, cfg=None):
    out = Path(args.out) if args.out else (cfg.output_dir if cfg else Path("."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_mub(args):
    family = _family(args.dim, args.source)
    report = verify_family(family, tol=args.tol)
    out = _outdir(args)
    stem = f"D{family.dim}"
    (out / f"mub_{stem}.json").write_text(family_to_json(family, indent=1) + "\n")
    (out / f"modulation_{stem}.csv").write_text(modulation_csv(family))
    (out / f"certification_{stem}.txt").write_text(report.summary() + "\n")
    print(f"D={family.dim}: {len(family.bases)} bases, {family.num_projectors} projectors, "
          f"certification {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_CERT


def _simulate(cfg):
    family = _family(cfg.dim, cfg.family_source)
    probs = optical_probabilities(cfg.beam, family, cfg.geometry, cfg.detector)
    counts = simulate_counts(probs, cfg.mean_peak_rate, cfg.integration_time, cfg.noise)
    return family, probs, counts


def cmd_simulate(args):
    cfg = load_config(args.config, args.seed)
    family, probs, counts = _simulate(cfg)
    counts.extra["master_seed"] = cfg.seed
    counts.extra["family"] = family.provenance.value
    out = _outdir(args, cfg)
    (out / "counts.csv").write_text(table_csv(counts))
    (out / "counts.json").write_text(json.dumps(counts_to_dict(counts), indent=1) + "\n")
    (out / "probabilities.csv").write_text(table_csv(probs))
    print(f"wrote {out / 'counts.csv'}: {counts.counts.sum()} counts over "
          f"{family.num_projectors} projectors (max {counts.counts.max()})")
    return EXIT_OK


def _load_counts(args, cfg, family):
    path = Path(args.counts) if args.counts else (Path(args.out) if args.out else cfg.output_dir) / "counts.json"
    try:
        counts = counts_from_dict(json.loads(path.read_text()))
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read counts ({exc.strerror})") from None
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: malformed count table ({exc})") from None
    if counts.alphas != family.indices or counts.dim != family.dim:
        raise ConfigError(f"{path}: count table bases {counts.alphas} do not match family {family.indices}")
    return counts


def cmd_reconstruct(args):
    cfg = load_config(args.config, args.seed)
    family = _family(cfg.dim, cfg.family_source)
    counts = _load_counts(args, cfg, family)
    result = reconstruct(counts, family)
    boot_seed = derive_seeds(cfg.seed)[1]
    estimate = fidelity_with_errors(counts, family, cfg.expected, args.trials, boot_seed)
    out = _outdir(args, cfg)
    (out / "reconstruction.json").write_text(result_json(result, cfg.expected, estimate) + "\n")
    fids = result.fidelities(cfg.expected)
    report = [
        f"dimension: {cfg.dim}",
        f"min raw eigenvalue: {result.min_raw_eigenvalue:.6e}",
        f"purity (physical): {np.real(np.vdot(result.physical.matrix, result.physical.matrix)):.6f}",
        f"fidelity raw: {fids['raw']:.6f}",
        f"fidelity physical: {fids['physical']:.6f}",
        f"fidelity forced-purity: {fids['pure_forced']:.6f}",
        f"bootstrap fidelity (physical): {estimate.value:.6f} +/- {estimate.sigma:.6f} ({estimate.n_trials} trials)",
    ]
    if result.diagnostics:
        report.append(result.diagnostics)
    (out / "fidelity.txt").write_text("\n".join(report) + "\n")
    print("\n".join(report))
    return EXIT_OK


def cmd_fidelity(args):
    cfg = load_config(args.config, args.seed)
    family = _family(cfg.dim, cfg.family_source)
    counts = _load_counts(args, cfg, family)
    estimate = fidelity_with_errors(
        counts, family, cfg.expected, args.trials, derive_seeds(cfg.seed)[1], args.estimator
    )
    out = _outdir(args, cfg)
    payload = {"value": estimate.value, "sigma": estimate.sigma, "n_trials": estimate.n_trials,
               "estimator": args.estimator}
    (out / "fidelity.json").write_text(json.dumps(payload, indent=1) + "\n")
    print(f"F = {estimate}")
    return EXIT_OK


def cmd_pattern(args):
    cfg = load_config(args.config, args.seed)
    geom = cfg.geometry
    if args.alpha is None:
        setting = SlmModulation(np.ones(cfg.dim))
        name = "pattern_unmodulated.csv"
    else:
        family = _family(cfg.dim, cfg.family_source)
        try:
            basis = family.basis(args.alpha)
            k = label_index(args.m, cfg.dim)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc).strip("'")) from None
        setting = vector_to_modulation(basis.vector(k), tol=1e-10)
        name = f"pattern_a{args.alpha}_m{args.m:g}.csv"
    half = args.x_max if args.x_max is not None else 2.5 * geom.envelope_first_zero
    x_min = args.x_min if args.x_min is not None else -half
    if args.points < 2 or not half > x_min:
        raise ConfigError(f"empty pattern range [{x_min}, {half}] with {args.points} points")
    x = np.linspace(x_min, half, args.points)
    rates = modulated_rate(cfg.beam, setting, geom, cfg.detector, x)
    out = _outdir(args, cfg)
    lines = ["x_meters,relative_rate"] + [f"{a:.17g},{b:.17g}" for a, b in zip(x, rates)]
    (out / name).write_text("\n".join(lines) + "\n")
    print(f"wrote {out / name} ({len(x)} points)")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="mubtomo", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mub", help="construct, certify and export a MUB family")
    m.add_argument("--dim", type=int, required=True)
    m.add_argument("--source", choices=["prime", "tables"])
    m.add_argument("--tol", type=float, default=1e-10)
    m.add_argument("--out")
    m.set_defaults(func=cmd_mub)

    def common(sp):
        sp.add_argument("--config", required=True)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")

    s = sub.add_parser("simulate", help="simulate photon counts for every projector")
    common(s)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reconstruct", help="reconstruct the state from a count table")
    common(r)
    r.add_argument("--counts")
    r.add_argument("--trials", type=int, default=1000)
    r.set_defaults(func=cmd_reconstruct)

    f = sub.add_parser("fidelity", help="bootstrap fidelity with error bar")
    common(f)
    f.add_argument("--counts")
    f.add_argument("--trials", type=int, default=1000)
    f.add_argument("--estimator", choices=["physical", "pure"], default="physical")
    f.set_defaults(func=cmd_fidelity)

    t = sub.add_parser("pattern", help="far-field pattern for one projector setting")
    common(t)
    t.add_argument("--alpha", type=int)
    t.add_argument("--m", type=float, default=0.0)
    t.add_argument("--x-min", type=float)
    t.add_argument("--x-max", type=float)
    t.add_argument("--points", type=int, default=2001)
    t.set_defaults(func=cmd_pattern)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EmptyBasisError, ReconstructionError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
