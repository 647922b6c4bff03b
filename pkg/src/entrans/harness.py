"""Sweep runner: configuration, parallel execution, aggregation and I/O.

A sweep walks a grid of coupling strengths. At each point it diagonalizes the
system operator (one kicked-rotor Floquet operator, or ``realizations``
members of the transition ensemble), takes the Schmidt spectra of all
eigenstates and accumulates per-state observables.

Sums are kept as exact floating-point expansions, so merging partial results
in any order gives bit-identical means; together with per-item random
streams this makes the output independent of the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__, distributions, dynamics, ensembles, schmidt, theory
from .linalg import MAX_PRODUCT_DIM, DimensionError, eig_unitary

SYSTEMS = ("rmt", "kicked_rotor")
OBSERVABLE_GROUPS = ("lambdas", "moments", "entropies", "renyi", "d_star")
KNOBS = ("epsilon", "b", "sqrt_lambda")

#: Default histogram binning per sample kind: (lo, hi, bins, log).
DEFAULT_HISTOGRAMS = {
    "u2": (1e-3, 1e6, 90, True),
    "u1": (1e-2, 1e6, 80, True),
    "purity_u": (0.0, 4.0, 80, False),
    "mp": (0.0, 5.0, 100, False),
    "tw_max": (-8.0, 6.0, 70, False),
    "exp_min": (0.0, 8.0, 80, False),
}

#: Default RMT realization counts at and above ``N_A N_B = 32²``.
SMALL_PRODUCT_DIM = 32 * 32
DEFAULT_REALIZATIONS_SMALL = 100
DEFAULT_REALIZATIONS_LARGE = 20

CSV_COLUMNS = ("sqrt_lambda", "observable", "value", "stderr")


class ConfigError(ValueError):
    """Invalid sweep configuration."""


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SweepConfig:
    """Sweep settings; the TOML keys are these field names.

    ``dimensions`` holds ``n_a``/``n_b`` for ``rmt`` and ``n`` for
    ``kicked_rotor``. ``coupling`` holds exactly one of ``epsilon``, ``b``
    or ``sqrt_lambda`` mapped to a list of values. ``rotor`` overrides the
    kicked-rotor parameters ``k_a``, ``k_b``, ``theta_q``, ``theta_p``.
    ``histograms`` maps sample kinds to ``{lo, hi, bins, log}`` tables (an
    empty table selects the default binning). ``realizations`` defaults to
    1 for the rotor and, for ``rmt``, to 100 up to ``N_A N_B = 32²`` and 20
    above.
    """

    system: str
    dimensions: dict
    coupling: dict
    realizations: int | None = None
    observables: list = field(default_factory=lambda: ["lambdas", "moments", "entropies", "d_star"])
    alphas: list = field(default_factory=lambda: [0.5, 1.0, 2.0, 3.0, 4.0])
    seed: int = 0
    output: str = "sweep_out"
    workers: int = 1
    n_lambdas: int = 7
    rotor: dict = field(default_factory=dict)
    histograms: dict = field(default_factory=dict)
    max_failures: int = 0

    def __post_init__(self):
        self.validate()

    # -- derived quantities -------------------------------------------------

    @property
    def n_a(self) -> int:
        d = self.dimensions
        return int(d["n"] if self.system == "kicked_rotor" else d["n_a"])

    @property
    def n_b(self) -> int:
        d = self.dimensions
        return int(d["n"] if self.system == "kicked_rotor" else d["n_b"])

    @property
    def knob(self) -> str:
        return next(iter(self.coupling))

    @property
    def grid_values(self) -> list:
        return [float(x) for x in self.coupling[self.knob]]

    def rotor_params(self, b: float = 0.0) -> dynamics.KickedRotorParams:
        return dynamics.KickedRotorParams(n=self.n_a, b=b, **self.rotor)

    def histogram_specs(self) -> dict:
        out = {}
        for kind, spec in self.histograms.items():
            lo, hi, bins, log = DEFAULT_HISTOGRAMS[kind]
            spec = dict(spec or {})
            out[kind] = (
                float(spec.get("lo", lo)),
                float(spec.get("hi", hi)),
                int(spec.get("bins", bins)),
                bool(spec.get("log", log)),
            )
        return out

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if self.system not in SYSTEMS:
            raise ConfigError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        if not isinstance(self.dimensions, dict):
            raise ConfigError("dimensions must be a table")
        if self.system == "rmt":
            if set(self.dimensions) != {"n_a", "n_b"}:
                raise ConfigError("rmt dimensions need exactly n_a and n_b")
            if not 2 <= self.n_a <= self.n_b:
                raise ConfigError("rmt dimensions need 2 <= n_a <= n_b")
            if self.realizations is None:
                self.realizations = DEFAULT_REALIZATIONS_SMALL if self.n_a * self.n_b <= SMALL_PRODUCT_DIM else DEFAULT_REALIZATIONS_LARGE
        else:
            if set(self.dimensions) == {"n_a", "n_b"}:
                if self.dimensions["n_a"] != self.dimensions["n_b"]:
                    raise ConfigError("kicked_rotor requires n_a == n_b")
                self.dimensions = {"n": int(self.dimensions["n_a"])}
            if set(self.dimensions) != {"n"}:
                raise ConfigError("kicked_rotor dimensions need n")
            if self.n_a < 2:
                raise ConfigError("kicked_rotor needs n >= 2")
            if self.realizations is None:
                self.realizations = 1
            if self.realizations != 1:
                raise ConfigError("kicked_rotor sweeps are deterministic; use realizations = 1")
            unknown = set(self.rotor) - {"k_a", "k_b", "theta_q", "theta_p"}
            if unknown:
                raise ConfigError(f"unknown rotor keys {sorted(unknown)}")
        if not isinstance(self.coupling, dict) or len(self.coupling) != 1 or self.knob not in KNOBS:
            raise ConfigError(f"coupling must contain exactly one of {KNOBS}")
        if self.system == "rmt" and self.knob == "b":
            raise ConfigError("rmt coupling is epsilon or sqrt_lambda")
        if self.system == "kicked_rotor" and self.knob == "epsilon":
            raise ConfigError("kicked_rotor coupling is b or sqrt_lambda")
        vals = self.coupling[self.knob]
        if not isinstance(vals, (list, tuple)) or not vals:
            raise ConfigError("coupling grid must be a nonempty list")
        if any(not isinstance(v, (int, float)) or v < 0 or not math.isfinite(v) for v in vals):
            raise ConfigError("coupling values must be finite and nonnegative")
        if not isinstance(self.realizations, int) or self.realizations < 1:
            raise ConfigError("realizations must be a positive integer")
        bad = set(self.observables) - set(OBSERVABLE_GROUPS)
        if bad:
            raise ConfigError(f"unknown observables {sorted(bad)}")
        if any(not isinstance(a, (int, float)) or a <= 0 for a in self.alphas):
            raise ConfigError("alphas must be positive numbers")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if self.n_lambdas < 1:
            raise ConfigError("n_lambdas must be positive")
        if self.max_failures < 0:
            raise ConfigError("max_failures must be nonnegative")
        bad = set(self.histograms) - set(DEFAULT_HISTOGRAMS)
        if bad:
            raise ConfigError(f"unknown histogram kinds {sorted(bad)}")
        if self.system == "rmt" and self.n_a != self.n_b and {"tw_max", "exp_min"} & set(self.histograms):
            raise ConfigError("extreme-eigenvalue histograms need n_a == n_b")
        if self.system == "kicked_rotor":
            try:
                self.rotor_params()
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        self.alphas = [float(a) for a in self.alphas]


def config_from_dict(data: dict) -> SweepConfig:
    names = set(SweepConfig.__dataclass_fields__)
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    missing = {"system", "dimensions", "coupling"} - set(data)
    if missing:
        raise ConfigError(f"missing config keys {sorted(missing)}")
    try:
        return SweepConfig(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> SweepConfig:
    """Read a TOML sweep configuration."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return config_from_dict(data)


def config_to_dict(config: SweepConfig) -> dict:
    return asdict(config)


# ---------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class GridPoint:
    index: int
    sqrt_lambda: float
    knob: str
    value: float


def resolve_grid(config: SweepConfig) -> list:
    """Map the configured coupling grid to ``(√Λ, knob, value)`` points.

    √Λ targets are inverted to ε or b; ε or b values are mapped to √Λ with
    the closed forms. The resulting √Λ must be strictly increasing.
    """
    pts = []
    for i, v in enumerate(config.grid_values):
        try:
            if config.system == "rmt":
                if config.knob == "sqrt_lambda":
                    eps = theory.epsilon_from_sqrt_lambda(v, config.n_a, config.n_b)
                    pts.append(GridPoint(i, v, "epsilon", eps))
                else:
                    s = math.sqrt(theory.lambda_rmt(config.n_a, config.n_b, v))
                    pts.append(GridPoint(i, s, "epsilon", v))
            else:
                if config.knob == "sqrt_lambda":
                    b = dynamics.b_from_sqrt_lambda(v, config.n_a)
                    pts.append(GridPoint(i, v, "b", b))
                else:
                    lam = dynamics.lambda_kicked_rotor(config.rotor_params(v)).exact
                    pts.append(GridPoint(i, math.sqrt(lam), "b", v))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    s = [p.sqrt_lambda for p in pts]
    if any(b <= a for a, b in zip(s, s[1:])):
        raise ConfigError("coupling grid must give strictly increasing sqrt_lambda")
    return pts


# ---------------------------------------------------------------------------
# exact accumulation


def exact_expansion(values) -> list:
    """Floats whose exact sum equals the exact sum of ``values``."""
    vals = [float(x) for x in np.asarray(values, dtype=float).ravel()]
    parts = []
    for _ in range(200):
        r = math.fsum(vals + [-p for p in parts])
        if r == 0.0:
            return parts
        parts.append(r)
    raise ArithmeticError("exact expansion did not terminate")


@dataclass
class Accumulator:
    """Count, sum and sum of squares of a stream of floats, kept exactly."""

    count: int = 0
    sum_parts: list = field(default_factory=list)
    sq_parts: list = field(default_factory=list)

    def add(self, values) -> None:
        v = np.asarray(values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise FloatingPointError("non-finite observable value")
        self.count += v.size
        self.sum_parts.extend(exact_expansion(v))
        # squares are rounded once; that rounding is per value, so order-free
        self.sq_parts.extend(exact_expansion(v * v))

    def merge(self, other: "Accumulator") -> "Accumulator":
        return Accumulator(
            self.count + other.count,
            self.sum_parts + other.sum_parts,
            self.sq_parts + other.sq_parts,
        )

    def mean(self) -> float:
        if self.count == 0:
            return math.nan
        return float(sum(map(Fraction, self.sum_parts), Fraction(0)) / self.count)

    def stderr(self) -> float:
        n = self.count
        if n < 2:
            return math.nan
        s1 = sum(map(Fraction, self.sum_parts), Fraction(0))
        s2 = sum(map(Fraction, self.sq_parts), Fraction(0))
        var = (s2 - s1 * s1 / n) / (n - 1)
        return math.sqrt(max(float(var), 0.0) / n)


# ---------------------------------------------------------------------------
# per-item computation


def _alpha_label(a: float) -> str:
    return f"{a:g}"


def observable_names(config: SweepConfig) -> list:
    """Observable names in output order."""
    names = []
    obs = set(config.observables)
    if "lambdas" in obs:
        names += [f"lambda_{i + 1}" for i in range(min(config.n_lambdas, config.n_a))]
        names.append("sqrt_lambda_1")
    for a in config.alphas:
        lab = _alpha_label(a)
        if "moments" in obs:
            names.append(f"mu_{lab}")
        if "entropies" in obs:
            names.append(f"S_{lab}")
        if "renyi" in obs:
            names.append(f"R_{lab}")
    if "d_star" in obs:
        names.append("d_star_sq")
    return names


def per_state_observables(spectra: np.ndarray, config: SweepConfig) -> dict:
    """Observable arrays (one value per eigenstate) from Schmidt spectra."""
    out = {}
    obs = set(config.observables)
    if "lambdas" in obs:
        for i in range(min(config.n_lambdas, spectra.shape[1])):
            out[f"lambda_{i + 1}"] = spectra[:, i]
        out["sqrt_lambda_1"] = np.sqrt(spectra[:, 0])
    for a in config.alphas:
        lab = _alpha_label(a)
        if "moments" in obs:
            out[f"mu_{lab}"] = schmidt.power_moment(spectra, a)
        if "entropies" in obs:
            out[f"S_{lab}"] = schmidt.hct_entropy(spectra, a)
        if "renyi" in obs:
            out[f"R_{lab}"] = schmidt.renyi_entropy(spectra, a)
    if "d_star" in obs:
        out["d_star_sq"] = schmidt.d_star_squared(spectra)
    return out


def rescaled_samples(spectra: np.ndarray, lam: float, kinds) -> dict:
    """Rescaled samples of the requested kinds; g-based kinds need Λ > 0."""
    out = {}
    for kind in kinds:
        if kind in ("u1", "u2", "purity_u") and lam <= 0:
            continue
        if kind == "u2":
            out[kind] = distributions.rescale_g(spectra[:, 1], lam, "u2")
        elif kind == "u1":
            out[kind] = distributions.rescale_g(spectra[:, 0], lam, "u1")
        elif kind == "purity_u":
            out[kind] = distributions.rescale_purity(schmidt.power_moment(spectra, 2), lam)
        elif kind == "mp":
            out[kind] = distributions.rescale_mp(spectra)
        elif kind in ("tw_max", "exp_min"):
            tw, ex = distributions.rescale_extremes(spectra, spectra.shape[1])
            out[kind] = tw if kind == "tw_max" else ex
    return out


def operator_eigenvectors(config: SweepConfig, point: GridPoint, realization: int) -> np.ndarray:
    """Eigenvectors (columns) of the system operator at one work item.

    An identity coupling leaves an exact tensor product, which is
    diagonalized factor by factor so that near-degenerate product states
    are not mixed by roundoff.
    """
    if config.system == "rmt":
        params = ensembles.TransitionEnsembleParams(config.n_a, config.n_b, point.value, config.seed)
        rng = ensembles.stream(config.seed, point.index, realization)
        real = ensembles.build_transition_operator(params, rng)
        u_a, u_b, diag = real.u_a, real.u_b, real.coupling_diagonal
    else:
        params = config.rotor_params(point.value)
        if params.n**2 > MAX_PRODUCT_DIM:
            raise DimensionError(f"N^2 = {params.n**2} exceeds cap {MAX_PRODUCT_DIM}")
        u_a = dynamics.build_single_rotor(params, "A")
        u_b = dynamics.build_single_rotor(params, "B")
        diag = dynamics.coupling_phases(params)
    if np.all(diag == 1):
        return np.kron(eig_unitary(u_a, atol=1e-9).eigenvectors, eig_unitary(u_b, atol=1e-9).eigenvectors)
    return eig_unitary(np.kron(u_a, u_b) * diag[None, :], atol=1e-9).eigenvectors


def compute_spectra(config: SweepConfig, point: GridPoint, realization: int = 0) -> np.ndarray:
    """Schmidt spectra ``(N_A N_B, N_A)`` of all eigenstates at one work item."""
    with threadpool_limits(1):
        vecs = operator_eigenvectors(config, point, realization)
        return schmidt.schmidt_spectra(vecs, config.n_a, config.n_b)


@dataclass
class ItemResult:
    point: int
    realization: int
    stats: dict = field(default_factory=dict)
    histograms: dict = field(default_factory=dict)
    excluded: dict = field(default_factory=dict)
    failure: str | None = None


def run_item(config: SweepConfig, point: GridPoint, realization: int) -> ItemResult:
    res = ItemResult(point.index, realization)
    try:
        spectra = compute_spectra(config, point, realization)
        for name, vals in per_state_observables(spectra, config).items():
            acc = Accumulator()
            acc.add(vals)
            res.stats[name] = acc
        specs = config.histogram_specs()
        for kind, sample in rescaled_samples(spectra, point.sqrt_lambda**2, specs).items():
            lo, hi, bins, log = specs[kind]
            res.histograms[kind] = distributions.Histogram.from_samples(sample.values, lo, hi, bins, log)
            res.excluded[kind] = sample.excluded
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        res.stats.clear()
        res.histograms.clear()
        res.failure = f"{type(exc).__name__}: {exc}"
    return res


def _run_item_star(args):
    return run_item(*args)


# ---------------------------------------------------------------------------
# results


@dataclass
class ObservableStat:
    value: float
    stderr: float
    count: int

    def __eq__(self, other):
        if not isinstance(other, ObservableStat):
            return NotImplemented

        def same(a, b):
            return a == b or (math.isnan(a) and math.isnan(b))

        return same(self.value, other.value) and same(self.stderr, other.stderr) and self.count == other.count


@dataclass
class PointRecord:
    index: int
    sqrt_lambda: float
    knob: str
    coupling: float
    stats: dict = field(default_factory=dict)
    histograms: dict = field(default_factory=dict)
    excluded: dict = field(default_factory=dict)


@dataclass
class TransitionSweepResult:
    points: list
    metadata: dict
    failures: list = field(default_factory=list)

    def stat(self, observable: str) -> tuple:
        """``(√Λ, value, stderr)`` arrays for one observable across the grid."""
        rows = [(p.sqrt_lambda, p.stats[observable].value, p.stats[observable].stderr) for p in self.points if observable in p.stats]
        return tuple(np.array(c) for c in zip(*rows)) if rows else (np.array([]),) * 3

    def __eq__(self, other):
        if not isinstance(other, TransitionSweepResult):
            return NotImplemented
        return self.points == other.points and self.failures == other.failures and _meta_key(self.metadata) == _meta_key(other.metadata)


def _meta_key(meta):
    return {k: v for k, v in meta.items() if k != "wall_time"}


def aggregate(config: SweepConfig, grid: list, items) -> TransitionSweepResult:
    """Merge item results into per-point statistics (order independent)."""
    acc = {p.index: {} for p in grid}
    hists = {p.index: {} for p in grid}
    excl = {p.index: {} for p in grid}
    failures = []
    for it in sorted(items, key=lambda r: (r.point, r.realization)):
        if it.failure is not None:
            failures.append({"point": it.point, "realization": it.realization, "error": it.failure})
            continue
        for name, a in it.stats.items():
            acc[it.point][name] = acc[it.point][name].merge(a) if name in acc[it.point] else a
        for kind, h in it.histograms.items():
            hists[it.point][kind] = hists[it.point][kind].merge(h) if kind in hists[it.point] else h
        for kind, n in it.excluded.items():
            excl[it.point][kind] = excl[it.point].get(kind, 0) + n
    names = observable_names(config)
    points = []
    for p in grid:
        stats = {
            n: ObservableStat(acc[p.index][n].mean(), acc[p.index][n].stderr(), acc[p.index][n].count)
            for n in names if n in acc[p.index]
        }
        points.append(PointRecord(p.index, p.sqrt_lambda, p.knob, p.value, stats, hists[p.index], excl[p.index]))
    meta = {
        "seed": config.seed,
        "realizations": config.realizations,
        "system": config.system,
        "code_version": __version__,
        "config": config_to_dict(config),
    }
    return TransitionSweepResult(points, meta, failures)


def run_sweep(config: SweepConfig, workers: int | None = None) -> TransitionSweepResult:
    """Run all work items, optionally across a process pool."""
    t0 = time.perf_counter()
    grid = resolve_grid(config)
    items = [(config, p, r) for p in grid for r in range(config.realizations)]
    nw = config.workers if workers is None else workers
    if nw <= 1 or len(items) == 1:
        results = [run_item(*it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(_run_item_star, items, chunksize=1))
    out = aggregate(config, grid, results)
    out.metadata["wall_time"] = time.perf_counter() - t0
    out.metadata["workers"] = nw
    return out


# ---------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    return "" if x is None else repr(float(x))


def _parse(s: str) -> float:
    return math.nan if s == "" else float(s)


def format_sweep_csv(result: TransitionSweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in result.points:
        for name, st in p.stats.items():
            w.writerow([_fmt(p.sqrt_lambda), name, _fmt(st.value), _fmt(st.stderr)])
    return buf.getvalue()


def format_histogram_csv(h: distributions.Histogram) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("left_edge", "right_edge", "density", "count"))
    for lo, hi, d, c in zip(h.edges[:-1], h.edges[1:], h.density, h.counts):
        w.writerow([_fmt(lo), _fmt(hi), _fmt(d), int(c)])
    return buf.getvalue()


def _hist_name(point: int, kind: str) -> str:
    return f"hist_p{point:03d}_{kind}.csv"


def write_result(result: TransitionSweepResult, out_dir, histograms_only: bool = False) -> Path:
    """Write ``sweep.csv``, ``sweep.json`` and one CSV per histogram."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not histograms_only:
        (out / "sweep.csv").write_text(format_sweep_csv(result))
    side = {
        "metadata": result.metadata,
        "failures": result.failures,
        "points": [
            {
                "index": p.index,
                "sqrt_lambda": p.sqrt_lambda,
                "knob": p.knob,
                "coupling": p.coupling,
                "counts": {n: s.count for n, s in p.stats.items()},
                "excluded": p.excluded,
                "histograms": {
                    k: {"file": _hist_name(p.index, k), "log": h.log, "underflow": h.underflow, "overflow": h.overflow}
                    for k, h in p.histograms.items()
                },
            }
            for p in result.points
        ],
    }
    (out / "sweep.json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    for p in result.points:
        for kind, h in p.histograms.items():
            (out / _hist_name(p.index, kind)).write_text(format_histogram_csv(h))
    return out


def read_result(out_dir) -> TransitionSweepResult:
    """Inverse of :func:`write_result`."""
    out = Path(out_dir)
    side = json.loads((out / "sweep.json").read_text())
    rows = {}
    with open(out / "sweep.csv", newline="") as fh:
        for r in csv.DictReader(fh):
            rows.setdefault(float(r["sqrt_lambda"]), []).append(r)
    points = []
    for pj in side["points"]:
        stats = {}
        for r in rows.get(pj["sqrt_lambda"], []):
            stats[r["observable"]] = ObservableStat(
                _parse(r["value"]), _parse(r["stderr"]), pj["counts"][r["observable"]]
            )
        hists = {}
        for kind, info in pj["histograms"].items():
            with open(out / info["file"], newline="") as fh:
                hr = list(csv.DictReader(fh))
            edges = np.array([float(x["left_edge"]) for x in hr] + [float(hr[-1]["right_edge"])])
            counts = np.array([int(x["count"]) for x in hr], dtype=np.int64)
            hists[kind] = distributions.Histogram(edges, counts, info["log"], info["underflow"], info["overflow"])
        points.append(
            PointRecord(pj["index"], pj["sqrt_lambda"], pj["knob"], pj["coupling"], stats, hists, pj["excluded"])
        )
    return TransitionSweepResult(points, side["metadata"], side["failures"])


# ---------------------------------------------------------------------------
# predictions


def emit_predictions(config: SweepConfig) -> list:
    """Prediction curves on the sweep's √Λ grid."""
    grid = resolve_grid(config)
    return theory.prediction_curves([p.sqrt_lambda for p in grid], config.alphas, config.n_a)


def format_predictions_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + ("regime", "valid"))
    for c in curves:
        for g, v, ok in zip(c.grid, c.values, c.valid):
            w.writerow([_fmt(g), c.observable, _fmt(v), "", c.regime, int(bool(ok))])
    return buf.getvalue()


def write_predictions(curves, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_predictions_csv(curves))
    return path
