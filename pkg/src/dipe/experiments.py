"""Config-driven variance sweeps with CSV and gnuplot ``.dat`` output.

Configuration files are INI files with one section per scenario, for example::

    [fig2a]
    ensembles = local-clifford, brickwork:1, brickwork:3, brickwork:5, global-clifford
    n = 4..12:2
    fixed_m = 100
    m = 10, 100, 1000
    fixed_n = 8
    rounds = 10000
    seed = 1

Integer lists accept ``a..b`` and ``a..b:step`` ranges as well as comma lists;
angles accept plain floats and multiples of ``pi`` such as ``pi/4`` or ``3pi/8``.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analytics import (
    avg_variance_case2,
    AvgVarianceInputs,
    fit_log_base,
    global_clifford_breakdown,
    haar_variance_sample,
    local_clifford_breakdown,
    local_product_reference,
    leading_v2_base,
    m2_sre,
)
from .ensembles import EnsembleKind, EnsembleSpec
from .errors import ConfigError, ResourceCapError
from .protocol import run_protocol, variance_stderr
from .states import StatePair, make_ghz, make_s_state, parse_state
from .tensornet import pauli_for_pattern, upsilon_mps

SCENARIOS = ("fig2a", "fig2b", "haar-scaling", "upsilon-convergence")
CSV_COLUMNS = (
    "scenario",
    "ensemble",
    "d",
    "n",
    "m",
    "k",
    "theta",
    "empirical_variance",
    "analytic_reference",
    "stderr",
)
ALL_ENSEMBLES = ("local-clifford", "brickwork:1", "brickwork:3", "brickwork:5", "global-clifford")

_DEFAULTS: dict[str, dict[str, str]] = {
    "fig2a": {
        "ensembles": ", ".join(ALL_ENSEMBLES),
        "n": "4..12:2",
        "fixed_m": "100",
        "m": "10, 100, 1000",
        "fixed_n": "8",
        "rounds": "10000",
    },
    "fig2b": {
        "ensembles": ", ".join(ALL_ENSEMBLES),
        "fixed_n": "8",
        "fixed_m": "1000",
        "k": "0..8",
        "fixed_theta": "pi/4",
        "theta": "0, pi/16, pi/8, 3pi/16, pi/4, 5pi/16, 3pi/8, 7pi/16, pi/2",
        "fixed_k": "4",
        "rounds": "10000",
    },
    "haar-scaling": {
        "ensembles": "local-clifford, brickwork:1, brickwork:3, global-clifford",
        "n": "4..10:2",
        "m": "10, 100, 1000",
        "n_states": "200",
        "n_unitaries": "200",
    },
    "upsilon-convergence": {
        "fixed_n": "6",
        "d": "1..9",
    },
}

_KNOWN_KEYS = {
    "ensembles",
    "n",
    "m",
    "d",
    "k",
    "theta",
    "fixed_n",
    "fixed_m",
    "fixed_k",
    "fixed_theta",
    "rounds",
    "n_states",
    "n_unitaries",
    "seed",
    "out",
    "workers",
}

DESK_N_CAP = 16
HAAR_N_CAP = 14


# ---------------------------------------------------------------------------
# parsing


def parse_int_list(text: str) -> tuple[int, ...]:
    """``4..12:2``, ``1..9`` or ``10, 100, 1000``."""
    out: list[int] = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)(?::(\d+))?", part)
        try:
            if m:
                lo, hi, step = int(m[1]), int(m[2]), int(m[3] or 1)
                if step < 1 or hi < lo:
                    raise ConfigError(f"bad range {part!r}")
                out.extend(range(lo, hi + 1, step))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigError(f"bad integer list entry {part!r}") from None
    if not out:
        raise ConfigError(f"empty integer list {text!r}")
    return tuple(out)


def parse_angle(text: str) -> float:
    t = text.strip().replace(" ", "").lower()
    m = re.fullmatch(r"([0-9.]*)\*?pi(?:/([0-9.]+))?", t)
    try:
        if m:
            num = float(m[1]) if m[1] else 1.0
            den = float(m[2]) if m[2] else 1.0
            return num * math.pi / den
        return float(t)
    except ValueError:
        raise ConfigError(f"bad angle {text!r}") from None


def parse_angle_list(text: str) -> tuple[float, ...]:
    vals = tuple(parse_angle(p) for p in text.split(",") if p.strip())
    if not vals:
        raise ConfigError(f"empty angle list {text!r}")
    return vals


def _parse_ensembles(text: str) -> tuple[str, ...]:
    labels = tuple(p.strip().lower() for p in text.split(",") if p.strip())
    if not labels:
        raise ConfigError("no ensembles given")
    for label in labels:
        EnsembleSpec.parse(label, 2)  # validates the label
    return labels


# ---------------------------------------------------------------------------
# config


@dataclass(frozen=True)
class SweepConfig:
    scenario: str
    ensembles: tuple[str, ...] = ()
    n_values: tuple[int, ...] = ()
    m_values: tuple[int, ...] = ()
    d_values: tuple[int, ...] = ()
    k_values: tuple[int, ...] = ()
    theta_values: tuple[float, ...] = ()
    fixed_n: int | None = None
    fixed_m: int | None = None
    fixed_k: int | None = None
    fixed_theta: float | None = None
    rounds: int = 10_000
    n_states: int = 200
    n_unitaries: int = 200
    seed: int = 0
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {', '.join(SCENARIOS)}")
        self.validate()

    @classmethod
    def from_mapping(cls, scenario: str, values: dict[str, str]) -> "SweepConfig":
        merged = dict(_DEFAULTS.get(scenario, {}))
        merged.update({k.strip().lower(): v for k, v in values.items()})
        unknown = set(merged) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

        def opt_int(key):
            return _int(merged[key], key) if key in merged else None

        kw = dict(
            scenario=scenario,
            ensembles=_parse_ensembles(merged["ensembles"]) if "ensembles" in merged else (),
            n_values=parse_int_list(merged["n"]) if "n" in merged else (),
            m_values=parse_int_list(merged["m"]) if "m" in merged else (),
            d_values=parse_int_list(merged["d"]) if "d" in merged else (),
            k_values=parse_int_list(merged["k"]) if "k" in merged else (),
            theta_values=parse_angle_list(merged["theta"]) if "theta" in merged else (),
            fixed_n=opt_int("fixed_n"),
            fixed_m=opt_int("fixed_m"),
            fixed_k=opt_int("fixed_k"),
            fixed_theta=parse_angle(merged["fixed_theta"]) if "fixed_theta" in merged else None,
            out=merged.get("out") or None,
        )
        for key in ("rounds", "n_states", "n_unitaries", "seed", "workers"):
            if key in merged:
                kw[key] = _int(merged[key], key)
        return cls(**kw)

    @classmethod
    def default(cls, scenario: str) -> "SweepConfig":
        return cls.from_mapping(scenario, {})

    @classmethod
    def from_file(cls, path: str | Path, scenario: str) -> "SweepConfig":
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
        if not parser.has_section(scenario):
            raise ConfigError(f"config {path} has no [{scenario}] section")
        return cls.from_mapping(scenario, dict(parser.items(scenario)))

    def with_overrides(self, **kw) -> "SweepConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def validate(self) -> None:
        def positive(name, values):
            if any(v < 1 for v in values):
                raise ConfigError(f"{name} values must be >= 1")

        positive("m", self.m_values)
        positive("d", self.d_values)
        positive("n", self.n_values)
        for name in ("rounds", "n_states", "n_unitaries", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        s = self.scenario
        if s == "fig2a":
            self._need("ensembles", "n_values", "fixed_m", "m_values", "fixed_n")
            self._sizes_ok(self.n_values + (self.fixed_n,), DESK_N_CAP)
            positive("m", (self.fixed_m,))
        elif s == "fig2b":
            self._need("ensembles", "fixed_n", "fixed_m", "k_values", "fixed_theta", "theta_values", "fixed_k")
            self._sizes_ok((self.fixed_n,), DESK_N_CAP)
            positive("m", (self.fixed_m,))
            for k in self.k_values + (self.fixed_k,):
                if not 0 <= k <= self.fixed_n:
                    raise ConfigError(f"k = {k} is outside [0, {self.fixed_n}]")
        elif s == "haar-scaling":
            self._need("ensembles", "n_values", "m_values")
            self._sizes_ok(self.n_values, HAAR_N_CAP)
        else:
            self._need("fixed_n", "d_values")
            if self.fixed_n < 2 or self.fixed_n % 2:
                raise ConfigError(f"brickwork circuits need even n >= 2, got {self.fixed_n}")

    def _need(self, *names) -> None:
        missing = [n for n in names if getattr(self, n) in (None, ())]
        if missing:
            raise ConfigError(f"{self.scenario} needs {', '.join(missing)}")

    def _sizes_ok(self, ns, cap: int) -> None:
        for n in ns:
            if n > cap:
                raise ResourceCapError(f"n = {n} exceeds the desk-scale cap of {cap} for {self.scenario}")
            for label in self.ensembles:
                EnsembleSpec.parse(label, n)


def _int(text: str, key: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {text!r}") from None


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    ensemble: str
    d: int | None = None
    n: int | None = None
    m: int | None = None
    k: int | None = None
    theta: float | None = None
    empirical_variance: float | None = None
    analytic_reference: float | None = None
    stderr: float | None = None

    def cells(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def select(self, **filters) -> list[SweepRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in filters.items())]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def to_dat(self, comments: list[str] | None = None) -> str:
        """Whitespace-separated blocks, one per (scenario, ensemble), for gnuplot ``index``."""
        lines = ["# " + " ".join(CSV_COLUMNS)]
        lines += [f"# {c}" for c in comments or ()]
        groups: dict[tuple[str, str], list[SweepRow]] = {}
        for r in self.rows:
            groups.setdefault((r.scenario, r.ensemble), []).append(r)
        for (scenario, ensemble), rows in groups.items():
            lines += ["", "", f"# block {scenario} {ensemble}"]
            for r in rows:
                lines.append(" ".join(c if c else "nan" for c in r.cells()))
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path, comments: list[str] | None = None) -> tuple[Path, Path]:
        """Write ``path`` as CSV and a sibling ``.dat`` file."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")
        dat = path.with_suffix(".dat")
        dat.write_text(self.to_dat(comments), encoding="utf-8")
        return path, dat


# ---------------------------------------------------------------------------
# point execution


def point_seed(master_seed: int, index: int) -> int:
    """Seed of sweep point ``index``, independent of scheduling."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(seq.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class _Point:
    scenario: str
    ensemble: str
    n: int
    m: int
    k: int | None
    theta: float | None
    rounds: int
    seed: int


def _make_pair(point: _Point) -> StatePair:
    if point.k is None:
        state = make_ghz(point.n)
    else:
        state = make_s_state(point.n, point.k, point.theta)
    return StatePair(state, state)


def _analytic(point: _Point, spec: EnsembleSpec, pair: StatePair) -> float | None:
    try:
        if point.k is not None and spec.kind is EnsembleKind.LOCAL_CLIFFORD:
            return local_product_reference(point.n, point.k, point.theta)
        return analytic_reference(spec, pair, point.m)
    except ResourceCapError:
        return None


def analytic_reference(spec: EnsembleSpec, pair: StatePair, m: int) -> float | None:
    """Closed-form reference for a fixed pair, or None where no closed form ships.

    Global Clifford gives the exact V1 + V2 + V3 + V4; local Clifford gives
    V1 + V2 + V4 (V3 is of order 1/m); brickwork has no fixed-pair closed form.
    """
    if spec.kind is EnsembleKind.GLOBAL_CLIFFORD:
        return float(global_clifford_breakdown(pair, m).total)
    if spec.kind is EnsembleKind.LOCAL_CLIFFORD:
        b = local_clifford_breakdown(pair, m)
        return b.v1 + b.v2 + b.v4
    return None


def _run_point(point: _Point) -> SweepRow:
    spec = EnsembleSpec.parse(point.ensemble, point.n)
    pair = _make_pair(point)
    report = run_protocol(spec, pair, point.rounds, point.m, point.seed)
    return SweepRow(
        scenario=point.scenario,
        ensemble=spec.label,
        d=spec.depth,
        n=point.n,
        m=point.m,
        k=point.k,
        theta=point.theta,
        empirical_variance=report.empirical_variance,
        analytic_reference=_analytic(point, spec, pair),
        stderr=variance_stderr(report.x_values),
    )


def _map(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# scenarios


def run_fig2a(config: SweepConfig) -> SweepResult:
    """GHZ state against itself: n sweep at ``fixed_m`` and m sweep at ``fixed_n``."""
    if config.scenario != "fig2a":
        config = replace(config, scenario="fig2a")
    grid = [(n, config.fixed_m) for n in config.n_values]
    grid += [(config.fixed_n, m) for m in config.m_values if (config.fixed_n, m) not in grid]
    points = []
    for ens in config.ensembles:
        for n, m in grid:
            seed = point_seed(config.seed, len(points))
            points.append(_Point("fig2a", ens, n, m, None, None, config.rounds, seed))
    result = SweepResult(_map(_run_point, points, config.workers))
    for n, m in grid:
        result.rows.append(SweepRow("fig2a", "reference-green", None, n, m, analytic_reference=2 + 2 ** (n + 1) / m**2))
        result.rows.append(SweepRow("fig2a", "reference-red", None, n, m, analytic_reference=2.5**n / m**2))
    return result


def run_fig2b(config: SweepConfig) -> SweepResult:
    """S_{n,k}(theta) against itself: k sweep at ``fixed_theta``, theta sweep at ``fixed_k``."""
    if config.scenario != "fig2b":
        config = replace(config, scenario="fig2b")
    n, m = config.fixed_n, config.fixed_m
    grid = [(k, config.fixed_theta) for k in config.k_values]
    grid += [(config.fixed_k, t) for t in config.theta_values if (config.fixed_k, t) not in grid]
    points = []
    for ens in config.ensembles:
        for k, theta in grid:
            seed = point_seed(config.seed, len(points))
            points.append(_Point("fig2b", ens, n, m, k, theta, config.rounds, seed))
    result = SweepResult(_map(_run_point, points, config.workers))
    for k, theta in grid:
        result.rows.append(SweepRow("fig2b", "m2", None, n, m, k, theta, analytic_reference=m2_sre(n, k, theta)))
    return result


def _haar_point(args) -> list[SweepRow]:
    label, n, m_values, n_states, n_unitaries, seed = args
    spec = EnsembleSpec.parse(label, n)
    sample = haar_variance_sample(spec, 2, n_states, n_unitaries, seed)
    rows = []
    for m in m_values:
        ref = avg_variance_case2(AvgVarianceInputs.for_ensemble(spec, m)).total
        rows.append(
            SweepRow(
                "haar-scaling",
                spec.label,
                spec.depth,
                n,
                m,
                empirical_variance=float(sample.breakdown(m).total),
                analytic_reference=float(ref),
                stderr=sample.total_stderr(m),
            )
        )
    return rows


def run_haar_scaling(config: SweepConfig) -> SweepResult:
    """Independent Haar pairs; variance against n for each ensemble and m."""
    jobs = []
    for ens in config.ensembles:
        for n in config.n_values:
            seed = point_seed(config.seed, len(jobs))
            jobs.append((ens, n, config.m_values, config.n_states, config.n_unitaries, seed))
    return SweepResult([row for rows in _map(_haar_point, jobs, config.workers) for row in rows])


def pattern_label(pattern) -> str:
    return "brickwork[x=" + "".join(str(int(v)) for v in pattern) + "]"


def run_upsilon_convergence(config: SweepConfig) -> SweepResult:
    """Upsilon_d for one Pauli per block pattern x in {0,1}^{n/2}, all depths."""
    n = config.fixed_n
    half = n // 2
    result = SweepResult()
    for idx in range(1 << half):
        pattern = tuple((idx >> (half - 1 - c)) & 1 for c in range(half))
        p = pauli_for_pattern(pattern)
        for d in config.d_values:
            result.rows.append(
                SweepRow("upsilon-convergence", pattern_label(pattern), d, n, analytic_reference=upsilon_mps(p, d))
            )
    return result


RUNNERS = {
    "fig2a": run_fig2a,
    "fig2b": run_fig2b,
    "haar-scaling": run_haar_scaling,
    "upsilon-convergence": run_upsilon_convergence,
}


def run_scenario(config: SweepConfig) -> SweepResult:
    return RUNNERS[config.scenario](config)


def fitted_bases(result: SweepResult, scenario: str, m: int, column: str = "empirical_variance") -> dict[str, float]:
    """Per-ensemble base b of a log-linear fit of ``column`` against n at fixed m."""
    out = {}
    by_ens: dict[str, list[tuple[int, float]]] = {}
    for r in result.rows:
        v = getattr(r, column)
        if r.scenario == scenario and r.m == m and v is not None and not math.isnan(v):
            by_ens.setdefault(r.ensemble, []).append((r.n, v))
    for ens, pts in by_ens.items():
        ns = sorted({n for n, _ in pts})
        if len(ns) >= 2 and all(v > 0 for _, v in pts):
            pts.sort()
            out[ens] = fit_log_base([n for n, _ in pts], [v for _, v in pts])
    return out


def summary_lines(config: SweepConfig, result: SweepResult) -> list[str]:
    """Fit summaries for the scaling scenarios, used on stdout and in ``.dat`` headers."""
    lines = []
    if config.scenario == "fig2a":
        for ens, b in sorted(fitted_bases(result, "fig2a", config.fixed_m).items()):
            lines.append(f"fitted base m={config.fixed_m} {ens}: {b:.4f}")
    elif config.scenario == "haar-scaling":
        for m in config.m_values:
            for ens, b in sorted(fitted_bases(result, "haar-scaling", m).items()):
                lines.append(f"fitted base m={m} {ens}: {b:.4f}")
        for ens in config.ensembles:
            kind = EnsembleSpec.parse(ens, 2).kind
            lines.append(f"leading V2 base {ens}: {leading_v2_base(kind):.4f}")
    return lines


# ---------------------------------------------------------------------------
# free-form sweep


def run_variance_sweep(
    ensembles: tuple[str, ...],
    state_a: str,
    state_b: str,
    m_values: tuple[int, ...],
    rounds: int,
    seed: int,
    workers: int = 1,
) -> SweepResult:
    """Empirical variance of X_m for a fixed pair of named states."""
    rho = parse_state(state_a)
    sigma = rho if state_b == state_a else parse_state(state_b)
    pair = StatePair(rho, sigma)
    jobs = []
    for ens in ensembles:
        spec = EnsembleSpec.parse(ens, pair.n)
        for m in m_values:
            jobs.append((spec, pair, m, rounds, point_seed(seed, len(jobs))))
    return SweepResult(_map(_sweep_point, jobs, workers))


def _sweep_point(args) -> SweepRow:
    spec, pair, m, rounds, seed = args
    report = run_protocol(spec, pair, rounds, m, seed)
    try:
        ref = analytic_reference(spec, pair, m)
    except ResourceCapError:
        ref = None
    return SweepRow(
        "variance-sweep",
        spec.label,
        spec.depth,
        pair.n,
        m,
        empirical_variance=report.empirical_variance,
        analytic_reference=ref,
        stderr=variance_stderr(report.x_values),
    )
