"""Command-line front end: scenario runs, figure data files, verification.

Subcommands
-----------
``tavis-sim run <config.json> [--out DIR]``
    Simulate a JSON-described scenario; writes ``<stem>.csv`` plus a
    ``<stem>_manifest.json`` run manifest.  Exit codes: 0 success,
    2 config/schema violation, 3 Fock truncation failure, 4 dimension cap.
``tavis-sim figure <fig1|fig2|fig3|fig4|qfunc> [--nbar F] [--theta F]
    [--samples N] [--times LIST] [--out DIR]``
    Reproduce the canonical data sets: one-qubit collapse/revival (fig1),
    two-qubit attractor approach (fig2), tangle-vs-a sweep (fig3),
    entanglement collapse and revival (fig4), Husimi grids (qfunc, one CSV
    per requested time in units of t_r).
``tavis-sim verify [--max-dim N]``
    Independent-oracle self checks; exit 0 iff every check passes.

CSV files use decimal scientific notation with 17 significant digits and
LF line endings, so parsing a file recovers the computed doubles exactly.
The TAVIS_SIM_THREADS environment variable caps worker parallelism.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .dynamics import (OBSERVABLE_NAMES, ScenarioConfig, TimeSeries,
                       characteristic_times, prepare_initial, simulate)
from .errors import DimensionCapError, TruncationError
from .hilbert import PureState, reduce_to_field
from .model import (ModelParams, build_blocks, dense_hamiltonian, evolve)
from .observables import (configuration_probability, default_q_ranges,
                          mixed_tangle, pure_tangle, q_function,
                          von_neumann_entropy)
from .states import (BasinParams, CoherentParams, basin_state, coherent_field,
                     default_fock_dim)
from .hilbert import DensityMatrix, QubitRegisterState, compose_state

__all__ = ["main", "RunManifest", "run_scenario_file", "make_figure",
           "run_verification", "CONFIG_SCHEMA"]

FIGURE_NAMES = ("fig1", "fig2", "fig3", "fig4", "qfunc")

#: default Husimi snapshot times in units of t_r
DEFAULT_QFUNC_TIMES = (0.0, 0.05, 0.25, 0.45, 0.75, 1.0)

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["model", "coherent"],
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["num_qubits"],
            "properties": {
                "num_qubits": {"type": "integer", "minimum": 1},
                "fock_dim": {"type": "integer", "minimum": 2},
                "coupling": {"type": "number", "exclusiveMinimum": 0},
                "omega": {"type": "number", "minimum": 0},
                "frame": {"enum": ["interaction", "lab"]},
            },
        },
        "coherent": {
            "type": "object",
            "additionalProperties": False,
            "required": ["nbar"],
            "properties": {
                "nbar": {"type": "number", "exclusiveMinimum": 0},
                "theta": {"type": "number"},
                "fock_dim": {"type": "integer", "minimum": 2},
            },
        },
        "initial_qubits": {
            "type": "object",
            "required": ["family"],
            "properties": {
                "family": {
                    "enum": ["configuration", "basin", "attractor", "dicke", "raw"]
                },
            },
        },
        "time_grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_max_over_tr": {"type": "number", "exclusiveMinimum": 0},
                "samples": {"type": "integer", "minimum": 2},
            },
        },
        "observables": {
            "type": "array",
            "items": {"enum": list(OBSERVABLE_NAMES)},
        },
        "attractor_sign": {"enum": ["+", "-"]},
        "track_config": {"type": ["string", "integer"]},
    },
}


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written next to every ``run`` output."""

    config: dict
    version: str
    duration_seconds: float
    files: list

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "duration_seconds": self.duration_seconds,
            "files": self.files,
        }


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _format(value: float) -> str:
    """Decimal scientific notation with 17 significant digits."""
    return f"{value:.16e}"


def write_timeseries_csv(path: Path, series: TimeSeries):
    """Emit a TimeSeries as CSV: t, t_over_tr, then one observable per column."""
    names = list(series.columns)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(["t", "t_over_tr"] + names) + "\n")
        for j in range(series.times.size):
            t = float(series.times[j])
            row = [t, t / series.revival_time]
            row += [float(series.columns[name][j]) for name in names]
            fh.write(",".join(_format(v) for v in row) + "\n")


def _write_rows_csv(path: Path, header, rows):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format(float(v)) for v in row) + "\n")


def _scenario_echo(config: ScenarioConfig) -> dict:
    """JSON-serializable echo of the effective scenario."""
    spec = config.initial_qubits
    if isinstance(spec, QubitRegisterState):
        spec = {"family": "raw",
                "amplitudes": [[z.real, z.imag] for z in spec.amplitudes]}
    return {
        "model": {
            "num_qubits": config.model.num_qubits,
            "fock_dim": config.model.fock_dim,
            "coupling": config.model.coupling,
            "omega": config.model.omega,
            "frame": config.model.frame,
        },
        "coherent": {
            "nbar": config.coherent.nbar,
            "theta": config.coherent.theta,
            "fock_dim": config.coherent.fock_dim,
        },
        "initial_qubits": spec if spec is not None
        else {"family": "configuration", "config": 0},
        "time_grid": {
            "t_max_over_tr": config.t_max_over_tr,
            "samples": config.samples,
        },
        "observables": list(config.observables),
        "attractor_sign": "+" if config.attractor_sign > 0 else "-",
        "track_config": config.track_config,
    }


def _write_manifest(out_dir: Path, stem: str, config_echo: dict,
                    file_names: list, duration: float) -> Path:
    manifest = RunManifest(
        config=config_echo,
        version=__version__,
        duration_seconds=duration,
        files=[{"path": name, "sha256": _sha256(out_dir / name)}
               for name in file_names],
    )
    path = out_dir / f"{stem}_manifest.json"
    path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n",
                    encoding="ascii")
    return path


def build_scenario(raw: dict) -> ScenarioConfig:
    """Turn a schema-valid config dict into a ScenarioConfig with defaults."""
    model_raw = dict(raw["model"])
    coherent_raw = dict(raw["coherent"])
    nbar = float(coherent_raw["nbar"])
    shared_default = default_fock_dim(nbar)
    model_fd = int(model_raw.get("fock_dim",
                                 coherent_raw.get("fock_dim", shared_default)))
    coherent_fd = int(coherent_raw.get("fock_dim", model_fd))
    model = ModelParams(
        num_qubits=int(model_raw["num_qubits"]),
        fock_dim=model_fd,
        coupling=float(model_raw.get("coupling", 1.0)),
        omega=float(model_raw.get("omega", 0.0)),
        frame=model_raw.get("frame", "interaction"),
    )
    coherent = CoherentParams(nbar=nbar,
                              theta=float(coherent_raw.get("theta", 0.0)),
                              fock_dim=coherent_fd)
    grid = raw.get("time_grid", {})
    sign = 1 if raw.get("attractor_sign", "+") == "+" else -1
    return ScenarioConfig(
        model=model,
        coherent=coherent,
        initial_qubits=raw.get("initial_qubits"),
        t_max_over_tr=float(grid.get("t_max_over_tr", 1.1)),
        samples=int(grid.get("samples", 2000)),
        observables=tuple(raw.get("observables",
                                  ("p_initial", "p_attractor", "entropy"))),
        attractor_sign=sign,
        track_config=raw.get("track_config", 0),
    )


def run_scenario_file(config_path: str, out_dir: str = ".") -> int:
    """Execute the ``run`` subcommand; returns the process exit code."""
    started = time.perf_counter()
    path = Path(config_path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        field = "/".join(str(part) for part in exc.absolute_path) or "<root>"
        print(f"error: config field '{field}': {exc.message}", file=sys.stderr)
        return 2
    try:
        config = build_scenario(raw)
        series = simulate(config)
    except TruncationError as exc:
        print(f"error: truncation failure: {exc}", file=sys.stderr)
        return 3
    except DimensionCapError as exc:
        print(f"error: dimension cap: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_name = f"{path.stem}.csv"
    write_timeseries_csv(out / csv_name, series)
    duration = time.perf_counter() - started
    manifest_path = _write_manifest(out, path.stem, _scenario_echo(config),
                                    [csv_name], duration)
    print(f"wrote {out / csv_name} and {manifest_path}")
    return 0


def _figure_scenario(name: str, nbar: float, theta: float,
                     samples: int) -> ScenarioConfig:
    fock_dim = default_fock_dim(nbar)
    coherent = CoherentParams(nbar=nbar, theta=theta, fock_dim=fock_dim)
    if name == "fig1":
        return ScenarioConfig(
            model=ModelParams(num_qubits=1, fock_dim=fock_dim),
            coherent=coherent,
            initial_qubits={"family": "configuration", "config": "g"},
            t_max_over_tr=1.2,
            samples=samples,
            observables=("p_initial", "p_attractor", "entropy"),
        )
    observables = ("p_initial", "p_attractor", "entropy")
    if name == "fig4":
        observables = observables + ("mixed_tangle",)
    return ScenarioConfig(
        model=ModelParams(num_qubits=2, fock_dim=fock_dim),
        coherent=coherent,
        initial_qubits={"family": "basin", "a": [1.0 / math.sqrt(2.0), 0.0]},
        t_max_over_tr=1.1,
        samples=samples,
        observables=observables,
    )


def _time_label(t_over_tr: float) -> str:
    return f"{t_over_tr:g}".replace(".", "p").replace("-", "m")


def make_figure(name: str, nbar: float = 50.0, theta: float = 0.0,
                samples: int | None = None, times=None,
                out_dir: str = ".") -> list:
    """Produce the data files for one named figure; returns written paths."""
    if name not in FIGURE_NAMES:
        raise ValueError(f"unknown figure {name!r}; choose from {FIGURE_NAMES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    if name == "fig3":
        points = samples if samples else 401
        limit = 1.0 / math.sqrt(2.0)
        rows = []
        for a in np.linspace(-limit, limit, points):
            state = basin_state(BasinParams(num_qubits=2, a=complex(a), theta=theta))
            rows.append((a, pure_tangle(state)))
        path = out / "fig3.csv"
        _write_rows_csv(path, ("a", "pure_tangle"), rows)
        written.append(path)
        return written

    if name == "qfunc":
        config = _figure_scenario("fig2", nbar, theta, samples or 2000)
        blocks, psi0, _, t_r = prepare_initial(config)
        snapshot_times = tuple(times) if times is not None else DEFAULT_QFUNC_TIMES
        re_range, im_range = default_q_ranges(nbar)
        for t_over_tr in snapshot_times:
            state = evolve(psi0, float(t_over_tr) * t_r, blocks)
            grid = q_function(reduce_to_field(state), re_range, im_range)
            rows = []
            re_axis, im_axis = grid.re_axis, grid.im_axis
            for i in range(grid.re_count):
                for j in range(grid.im_count):
                    rows.append((re_axis[i], im_axis[j], grid.values[i, j]))
            path = out / f"qfunc_t{_time_label(float(t_over_tr))}.csv"
            _write_rows_csv(path, ("re", "im", "q"), rows)
            written.append(path)
        return written

    config = _figure_scenario(name, nbar, theta, samples or 2000)
    series = simulate(config)
    path = out / f"{name}.csv"
    write_timeseries_csv(path, series)
    written.append(path)
    return written


# ---------------------------------------------------------------------------
# verification harness
# ---------------------------------------------------------------------------

def _random_state(rng, dim: int) -> np.ndarray:
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return amps / np.linalg.norm(amps)


def _check_oracle_evolution(rng, max_dim: int):
    cases = [(1, 32), (2, 24), (3, 16)]
    ran = []
    worst_amp = 0.0
    worst_eig = 0.0
    for num_qubits, fock_dim in cases:
        dim = (2 ** num_qubits) * fock_dim
        if dim > max_dim:
            continue
        ran.append((num_qubits, fock_dim))
        params = ModelParams(num_qubits=num_qubits, fock_dim=fock_dim)
        blocks = build_blocks(params)
        dense = dense_hamiltonian(params, cap=max_dim)
        dense_eigs = np.sort(np.linalg.eigvalsh(dense))
        block_eigs = np.sort(np.concatenate([b.eigenvalues for b in blocks.blocks]))
        worst_eig = max(worst_eig, float(np.max(np.abs(dense_eigs - block_eigs))))
        w, v = np.linalg.eigh(dense)
        horizon = 2.0 * math.pi * math.sqrt(50.0)
        for _ in range(20):
            amps = _random_state(rng, dim)
            state = PureState(amps, num_qubits, fock_dim)
            for t in rng.uniform(0.0, horizon, size=20):
                reference = v @ (np.exp(-1j * w * t) * (v.conj().T @ amps))
                deviation = np.max(np.abs(evolve(state, t, blocks).amplitudes - reference))
                worst_amp = max(worst_amp, float(deviation))
    detail = f"cases {ran}: max amplitude deviation {worst_amp:.2e}"
    yield ("block-vs-dense evolution", worst_amp <= 1e-8, detail)
    yield ("eigenvalue multisets", worst_eig <= 1e-9,
           f"cases {ran}: max eigenvalue deviation {worst_eig:.2e}")


def _check_basin_normalization(rng):
    worst = 0.0
    for _ in range(100):
        num_qubits = int(rng.integers(1, 7))
        limit = 1.0 / math.sqrt(2.0 ** (num_qubits - 1))
        a = rng.uniform(0.0, limit) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        theta = rng.uniform(0.0, 2.0 * np.pi)
        state = basin_state(BasinParams(num_qubits=num_qubits, a=a, theta=theta))
        worst = max(worst, abs(float(np.linalg.norm(state.amplitudes)) - 1.0))
    yield ("basin normalization", worst <= 1e-12,
           f"100 random members: max |norm - 1| = {worst:.2e}")


def _check_tangle_oracles(rng):
    worst_pure = 0.0
    for _ in range(100):
        amps = _random_state(rng, 4)
        state = QubitRegisterState(amps, 2)
        rho = DensityMatrix(np.outer(amps, amps.conj()), "qubit-register")
        worst_pure = max(worst_pure, abs(mixed_tangle(rho) - pure_tangle(state)))
    yield ("tangle pure-vs-mixed", worst_pure <= 1e-8,
           f"100 random projectors: max deviation {worst_pure:.2e}")

    bell = np.zeros(4, dtype=complex)
    bell[0b00] = bell[0b11] = 1.0 / math.sqrt(2.0)
    projector = np.outer(bell, bell.conj())
    worst_werner = 0.0
    for p in (0.0, 0.2, 1.0 / 3.0, 0.6, 0.9, 1.0):
        rho = DensityMatrix(p * projector + (1.0 - p) * np.eye(4) / 4.0,
                            "qubit-register")
        expected = max(0.0, (3.0 * p - 1.0) / 2.0) ** 2
        worst_werner = max(worst_werner, abs(mixed_tangle(rho) - expected))
    yield ("Werner closed form", worst_werner <= 1e-10,
           f"max deviation from max(0,(3p-1)/2)^2: {worst_werner:.2e}")


def _check_coherent_moments():
    params = CoherentParams(nbar=50.0, theta=0.0, fock_dim=136)
    amps = coherent_field(params)
    n = np.arange(params.fock_dim)
    mean = float(np.sum(n * np.abs(amps) ** 2))
    mean_ok = abs(mean - params.nbar) <= 1e-6 * params.nbar
    log_pmf = -params.nbar + n * np.log(params.nbar) - \
        np.cumsum(np.concatenate([[0.0], np.log(n[1:])]))
    poisson = np.exp(log_pmf)
    tv = 0.5 * (np.sum(np.abs(np.abs(amps) ** 2 - poisson)) + (1.0 - poisson.sum()))
    tv_ok = tv <= 1e-8
    yield ("coherent-state moments", mean_ok and tv_ok,
           f"mean {mean:.8f} (target 50), total variation vs Poisson {tv:.2e}")


def _check_frame_consistency(rng):
    nbar, fock_dim = 4.0, 24
    theta = 0.7
    worst = 0.0
    register = basin_state(BasinParams(num_qubits=2, a=0.4 + 0.2j, theta=theta))
    field = coherent_field(CoherentParams(nbar=nbar, theta=theta, fock_dim=fock_dim))
    psi0 = compose_state(register, field)
    times = rng.uniform(0.0, 2.0 * math.pi * math.sqrt(nbar), size=10)
    results = []
    for frame in ("interaction", "lab"):
        params = ModelParams(num_qubits=2, fock_dim=fock_dim, omega=1.7,
                             frame=frame)
        blocks = build_blocks(params)
        probs = []
        for t in times:
            state = evolve(psi0, t, blocks)
            probs.append([configuration_probability(state, q) for q in range(4)])
        results.append(np.array(probs))
    worst = max(worst, float(np.max(np.abs(results[0] - results[1]))))
    yield ("frame consistency", worst <= 1e-9,
           f"interaction vs lab configuration probabilities: max dev {worst:.2e}")


def _check_entropy_invariance(rng):
    dim = 6
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    base = DensityMatrix(rho, "field")
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    rotated = DensityMatrix(q @ rho @ q.conj().T, "field")
    deviation = abs(von_neumann_entropy(base) - von_neumann_entropy(rotated))
    yield ("entropy basis invariance", deviation <= 1e-9,
           f"|S(rho) - S(U rho U†)| = {deviation:.2e}")


def run_verification(max_dim: int = 256) -> list:
    """All self checks as (name, passed, detail) tuples."""
    rng = np.random.default_rng(20240817)
    results = []
    results.extend(_check_oracle_evolution(rng, max_dim))
    results.extend(_check_basin_normalization(rng))
    results.extend(_check_tangle_oracles(rng))
    results.extend(_check_coherent_moments())
    results.extend(_check_frame_consistency(rng))
    results.extend(_check_entropy_invariance(rng))
    return results


def _cmd_verify(max_dim: int) -> int:
    results = run_verification(max_dim)
    all_passed = True
    for name, passed, detail in results:
        marker = "PASS" if passed else "FAIL"
        all_passed &= passed
        print(f"{marker}  {name}: {detail}")
    return 0 if all_passed else 1


def _parse_times(raw: str | None):
    if raw is None:
        return None
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --times list {raw!r}: {exc}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tavis-sim",
        description="Exact simulation of N qubits resonantly coupled to a "
                    "single quantized field mode.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a JSON scenario config")
    p_run.add_argument("config", help="path to the scenario JSON file")
    p_run.add_argument("--out", default=".", help="output directory")

    p_fig = sub.add_parser("figure", help="write canonical figure data files")
    p_fig.add_argument("name", choices=FIGURE_NAMES)
    p_fig.add_argument("--nbar", type=float, default=50.0)
    p_fig.add_argument("--theta", type=float, default=0.0)
    p_fig.add_argument("--samples", type=int, default=None)
    p_fig.add_argument("--times", type=str, default=None,
                       help="comma-separated snapshot times in units of t_r "
                            "(qfunc only)")
    p_fig.add_argument("--out", default=".", help="output directory")

    p_verify = sub.add_parser("verify", help="run the oracle self checks")
    p_verify.add_argument("--max-dim", type=int, default=256,
                          help="dense-oracle dimension cap")

    args = parser.parse_args(argv)

    if args.command == "run":
        return run_scenario_file(args.config, args.out)
    if args.command == "figure":
        try:
            written = make_figure(args.name, nbar=args.nbar, theta=args.theta,
                                  samples=args.samples,
                                  times=_parse_times(args.times),
                                  out_dir=args.out)
        except TruncationError as exc:
            print(f"error: truncation failure: {exc}", file=sys.stderr)
            return 3
        except DimensionCapError as exc:
            print(f"error: dimension cap: {exc}", file=sys.stderr)
            return 4
        for path in written:
            print(f"wrote {path}")
        return 0
    return _cmd_verify(args.max_dim)


if __name__ == "__main__":
    sys.exit(main())
