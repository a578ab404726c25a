"""Command-line runner: ``enslab run <config>``, ``enslab list``, ``enslab version``."""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from . import experiments as ex
from .fields import QuadratureError

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str = "<config>"):
        self.line = line
        self.path = path
        where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Parsed ``key = value`` configuration with the line of every key."""

    experiment: str
    values: dict
    lines: dict
    path: str = "<config>"
    used: set = field(default_factory=set)

    def _raw(self, key: str, default):
        self.used.add(key)
        if key not in self.values:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key '{key}'", None, self.path)
            return None
        return self.values[key]

    def _fail(self, key: str, msg: str):
        raise ConfigError(f"{key}: {msg}", self.lines.get(key), self.path)

    def get_str(self, key: str, default=None) -> str:
        raw = self._raw(key, default)
        return default if raw is None else raw

    def get_float(self, key: str, default=None) -> float:
        raw = self._raw(key, default)
        if raw is None:
            return default
        try:
            v = float(raw)
        except ValueError:
            self._fail(key, f"expected a number, got {raw!r}")
        if not math.isfinite(v):
            self._fail(key, "value must be finite")
        return v

    def get_int(self, key: str, default=None) -> int:
        v = self.get_float(key, default)
        if v is None:
            return None
        if v != int(v):
            self._fail(key, f"expected an integer, got {self.values[key]!r}")
        return int(v)

    def get_list(self, key: str, default=None, *, kind: Callable = float) -> list:
        raw = self._raw(key, default)
        if raw is None:
            return list(default) if default is not None else None
        items = [s.strip() for s in raw.split(",")]
        if not items or any(s == "" for s in items):
            self._fail(key, "list must be nonempty with no empty entries")
        try:
            vals = [kind(float(s)) if kind is int else kind(s) for s in items]
        except ValueError:
            self._fail(key, f"could not parse list {raw!r}")
        if kind is int and any(float(s) != int(float(s)) for s in items):
            self._fail(key, "expected integers")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            self._fail(key, "list must be sorted in strictly ascending order")
        return vals

    def check_unused(self) -> None:
        extra = sorted(set(self.values) - self.used - {"experiment", "output"})
        if extra:
            self._fail(extra[0], "unknown key for experiment " + repr(self.experiment))


_REQUIRED = object()


def parse_config(text: str, path: str = "<config>") -> ExperimentConfig:
    values, lines = {}, {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", no, path)
        key, _, val = (s.strip() for s in line.partition("="))
        if not key or not val:
            raise ConfigError("empty key or value", no, path)
        if key in values:
            raise ConfigError(f"duplicate key '{key}' (first on line {lines[key]})", no, path)
        values[key] = val
        lines[key] = no
    if "experiment" not in values:
        raise ConfigError("missing required key 'experiment'", None, path)
    exp = values["experiment"]
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment '{exp}'; see 'enslab list'", lines["experiment"], path)
    return ExperimentConfig(exp, values, lines, path)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.16e" % float(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


@dataclass
class Table:
    name: str
    columns: tuple
    rows: list

    def to_csv(self) -> str:
        out = [",".join(self.columns)]
        out.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(out) + "\n"


@dataclass
class Report:
    tables: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    checks: list = field(default_factory=list)  # (description, passed)

    def check(self, description: str, passed: bool) -> None:
        self.checks.append((description, bool(passed)))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def summary(self, experiment: str) -> str:
        lines = [f"experiment: {experiment}", f"enslab {__version__}"]
        lines += self.notes
        lines += [f"[{'ok' if ok else 'FAILED'}] {d}" for d, ok in self.checks]
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def _counterexample(cfg: ExperimentConfig, map_fn) -> Report:
    nus = cfg.get_list("nu", _REQUIRED)
    ts = cfg.get_list("t", _REQUIRED)
    eps = cfg.get_list("eps", _REQUIRED)
    tn = cfg.get_list("transport_n", [1024, 2048], kind=int)
    n = cfg.get_int("n", 2048)
    L = cfg.get_float("L", 4.0)
    delta = cfg.get_float("delta", 0.02)
    cutoff_id = cfg.get_str("cutoff", "bump_smoothstep")
    nu_grid_min = cfg.get_float("nu_grid_min", 1e-5)
    cfg.check_unused()
    if cutoff_id not in ex.CUTOFFS:
        cfg._fail("cutoff", f"unknown cutoff {cutoff_id!r}; choose from {sorted(ex.CUTOFFS)}")
    res = ex.counterexample_experiment(
        nu_list=nus, t_list=ts, eps_list=eps, transport_n=tn, viscous_n=n, L=L, delta=delta,
        cutoff_id=cutoff_id, nu_grid_min=nu_grid_min, map_fn=map_fn,
    )
    rep = Report()
    rep.tables.append(Table(
        "counterexample_viscous",
        ("nu", "t", "l1_grid", "l1_spectral", "mass_r0.05", "mass_r0.1", "mass_r0.5"),
        [(r.nu, r.t, r.l1_grid, r.l1_spectral, r.mass_r005, r.mass_r01, r.mass_r05) for r in res.viscous],
    ))
    rep.tables.append(Table("counterexample_limit", ("nu", "t", "l1_limit_normalization", "target"),
                            [(r.nu, r.t, r.l1_limit, ex.FOUR_PI_CUBED / r.t) for r in res.viscous]))
    rep.tables.append(Table("counterexample_transport", ("n", "eps", "l1", "sup"),
                            [(r.n, r.eps, r.l1, r.sup) for r in res.transport]))
    budget = 1e-3 * ex.FOUR_PI_CUBED
    for t in ts:
        rows = [r for r in res.viscous if r.t == t]
        last = min(rows, key=lambda r: r.nu)
        rel = abs(last.l1_limit / (ex.FOUR_PI_CUBED / t) - 1.0)
        rep.check(f"t={t:g}: spectral defect at nu={last.nu:g} within 2% of 4 pi^3/t (rel {rel:.2e})", rel < 0.02)
        rel_p = abs(last.l1_spectral / (math.pi / (2.0 * t)) - 1.0)
        rep.check(f"t={t:g}: exact dissipation rate within 2% of pi/(2t) (rel {rel_p:.2e})", rel_p < 0.02)
        grid = [r for r in rows if math.isfinite(r.l1_grid)]
        fr = [r.outside_fraction for r in sorted(grid, key=lambda r: -r.nu)]
        if len(fr) > 1:
            rep.check(f"t={t:g}: mass outside B(0;0.1) decreases as nu decreases", all(b < a for a, b in zip(fr, fr[1:])))
        for r in grid:
            if r.nu >= 1e-4:
                d = abs(r.l1_grid / r.l1_spectral - 1.0)
                rep.check(f"t={t:g}, nu={r.nu:g}: grid and spectral routes agree within 1% (rel {d:.2e})", d < 0.01)
    for r in res.transport:
        if r.n <= 1024:
            rep.check(f"n={r.n}, eps={r.eps:g}: ||Z_eps||_1 = {r.l1:.2e} below {budget:.3g}", r.l1 < budget)
    by = {(r.n, r.eps): r.l1 for r in res.transport}
    for (nn, e), v in sorted(by.items()):
        if (2 * nn, e) in by:
            rep.check(f"eps={e:g}: refining n={nn} -> {2 * nn} reduces ||Z_eps||_1 at least 2x", by[(2 * nn, e)] <= 0.5 * v)
    return rep


def _limitcase(cfg: ExperimentConfig, map_fn) -> Report:
    alphas = cfg.get_list("alpha", _REQUIRED)
    lo = cfg.get_float("x1_min", 1e-6)
    hi = cfg.get_float("x1_max", 1.0 / 36.0)
    m = cfg.get_int("x1_points", 25)
    rtol = cfg.get_float("rtol", 1e-8)
    cfg.check_unused()
    if not 0 < lo < hi < 1.0 / 3.0 or m < 2:
        cfg._fail("x1_min", "need 0 < x1_min < x1_max < 1/3 and x1_points >= 2")
    x1 = np.geomspace(lo, hi, m)
    rows = ex.limitcase_table(alphas, x1, rtol=rtol, map_fn=map_fn)
    fine = ex.limitcase_table(alphas, x1, rtol=rtol / 10.0, map_fn=map_fn)
    rep = Report()
    rep.tables.append(Table("limitcase", ("alpha", "x1", "u1", "ratio"), [(r.alpha, r.x1, r.u1, r.ratio) for r in rows]))
    for a in alphas:
        inf0 = ex.axis_ratio_infimum(rows, a)
        inf1 = ex.axis_ratio_infimum(fine, a)
        rep.check(f"alpha={a:g}: inf ratio {inf0:.6g} > 0", inf0 > 0)
        rep.check(f"alpha={a:g}: inf ratio stable under 10x tighter tolerance ({inf1:.6g})", abs(inf1 / inf0 - 1.0) < 0.2)
    return rep


def _cubic(cfg: ExperimentConfig, map_fn) -> Report:
    alpha = cfg.get_float("alpha", _REQUIRED)
    ns = cfg.get_list("n_trunc", _REQUIRED, kind=int)
    r0 = cfg.get_float("r0", ex.R0_DEFAULT)
    tol = cfg.get_float("exponent_tolerance", 0.15)
    cfg.check_unused()
    res = ex.cubic_divergence_experiment(alpha, ns, r0=r0, map_fn=map_fn)
    rep = Report()
    rep.tables.append(Table("cubic_divergence", ("n", "I_n", "error_Un", "error_full"),
                            [(r.n, r.cubic, r.error_Un, r.error_full) for r in res.rows]))
    target = 2.0 - 3.0 * alpha
    cubic = [r.cubic for r in res.rows]
    rep.check("I_n strictly increasing", all(b > a for a, b in zip(cubic, cubic[1:])))
    if len(ns) >= 4:
        p = res.exponent_expansion()
        rep.notes.append(f"growth exponent, one-term fit A + c L^p: {res.exponent_naive():.4f}")
        rep.check(f"growth exponent (two-term fit) {p:.4f} within {tol:g} of 2 - 3 alpha = {target:.4f}", abs(p - target) <= tol)
    err = [(r.n, abs(r.error_Un)) for r in res.rows if r.error_Un != 0.0]
    if len(err) > 1:
        rep.check("|int_U_n e_n |omega_n|^2| decreasing in n", all(b < a for (_, a), (_, b) in zip(err, err[1:])))
    return rep


def _norm_suite(cfg: ExperimentConfig, map_fn) -> Report:
    seed = cfg.get_int("seed", 0)
    n = cfg.get_int("n", 64)
    pairs = cfg.get_int("pairs", 100)
    cfg.check_unused()
    checks = ex.norm_suite(seed=seed, n=n, pairs=pairs)
    rep = Report()
    rep.tables.append(Table("norm_suite", ("check", "value", "bound", "passed"),
                            [(c.name, c.value, c.bound, c.passed) for c in checks]))
    for c in checks:
        rep.check(f"{c.name}: {c.value:.3e} (bound {c.bound:g})", c.passed)
    return rep


def _zygmund(cfg: ExperimentConfig, map_fn) -> Report:
    alphas = cfg.get_list("alpha", _REQUIRED)
    kappas = cfg.get_list("kappa", _REQUIRED)
    levels = cfg.get_int("levels", 6)
    step = cfg.get_float("step", 2.0)
    thr = cfg.get_float("threshold", 1.5)
    cfg.check_unused()
    scans = list(map_fn(lambda a: ex.zygmund_membership_scan(a, kappas, levels=levels, step=step, threshold=thr), alphas))
    rep = Report()
    rows = []
    for sc in scans:
        rows += [(sc.alpha, r.kappa, r.level, r.u_inner, r.modular, r.increment, r.decay) for r in sc.rows]
        for k in kappas:
            if k == sc.alpha - 0.5:
                continue
            expect = "bounded" if k < sc.alpha - 0.5 else "divergent"
            rep.check(f"alpha={sc.alpha:g}, kappa={k:g}: {sc.verdict(k)} (expected {expect})", sc.verdict(k) == expect)
    rep.tables.append(Table("zygmund_membership", ("alpha", "kappa", "level", "u_inner", "modular", "increment", "decay"), rows))
    return rep


def _truncation(cfg: ExperimentConfig, map_fn) -> Report:
    alpha = cfg.get_float("alpha", _REQUIRED)
    kappa = cfg.get_float("kappa", _REQUIRED)
    ns = cfg.get_list("n_trunc", _REQUIRED, kind=int)
    cfg.check_unused()
    rows = ex.truncation_zygmund_decay(alpha, kappa, ns, map_fn=map_fn)
    rep = Report()
    lead = ex.decay_rate_prediction(alpha, kappa, ns)
    rep.tables.append(Table("truncation_decay", ("n", "norm", "modular_at_norm", "leading_order"),
                            [(r.n, r.norm, r.modular_at_norm, float(q)) for r, q in zip(rows, lead)]))
    norms = [r.norm for r in rows]
    rep.check("||W_n|| strictly decreasing", all(b < a for a, b in zip(norms, norms[1:])))
    rep.check("modular equals 1 at the norm (1e-8)", all(abs(r.modular_at_norm - 1.0) < 1e-8 for r in rows))
    return rep


def _symbol(cfg: ExperimentConfig, map_fn) -> Report:
    lo = cfg.get_float("kappa_min", 1e-2)
    hi = cfg.get_float("kappa_max", 1e4)
    m = cfg.get_int("kappa_points", 121)
    cutoff_id = cfg.get_str("cutoff", "bump_smoothstep")
    cfg.check_unused()
    if not 0 < lo < hi or m < 2:
        cfg._fail("kappa_min", "need 0 < kappa_min < kappa_max and kappa_points >= 2")
    kap = np.geomspace(lo, hi, m)
    rows = ex.symbol_scan(kap, cutoff_id)
    rep = Report()
    rep.tables.append(Table("symbol_error", ("kappa", "e"), rows))
    e = np.array([v for _, v in rows])
    rep.notes.append(f"sup |e| over the scan: {np.max(np.abs(e)):.6g}")
    rep.check("|e| bounded by 2 pi + 1 over the scan", np.max(np.abs(e)) <= 2.0 * math.pi + 1.0)
    if hi >= 1e4:
        rep.check(f"|e(kappa_max)| = {abs(e[-1]):.2e} < 0.01 * 2 pi", abs(e[-1]) < 0.02 * math.pi)
    derr = ex.disk_hankel_error(kap)
    rep.check(f"disk transform matches 2 pi J1(k)/k ({derr:.1e})", derr < 1e-8)
    return rep


def _besov(cfg: ExperimentConfig, map_fn) -> Report:
    nus = cfg.get_list("nu", _REQUIRED)
    t = cfg.get_float("t", 1.0)
    n = cfg.get_int("n", 1024)
    L = cfg.get_float("L", 4.0)
    cutoff_id = cfg.get_str("cutoff", "bump_smoothstep")
    cfg.check_unused()
    rows = ex.besov_scan(nus, t=t, n=n, L=L, cutoff_id=cutoff_id)
    rep = Report()
    rep.tables.append(Table("besov", ("nu", "value", "argmax_j", "top_j"), [(r.nu, r.value, r.argmax_j, r.top_j) for r in rows]))
    v = [r.value for r in rows]
    spread = max(v) / min(v) - 1.0
    rep.check(f"Besov sup varies {spread:.2%} across nu (< 5%)", spread < 0.05)
    rep.check("argmax block below the Nyquist block", all(r.argmax_j < r.top_j for r in rows))
    return rep


@dataclass(frozen=True)
class Experiment:
    runner: Callable
    description: str


EXPERIMENTS: dict[str, Experiment] = {
    "counterexample": Experiment(
        _counterexample, "transport defect of the 1/|x| vortex vanishes; viscous defect tends to 4 pi^3/t at the origin"
    ),
    "limitcase": Experiment(_limitcase, "axis velocity of the half-disk log vortex grows like |log x1|^(1-alpha)"),
    "cubic-divergence": Experiment(_cubic, "cubic integral of truncated half-disk data diverges like (log n)^(2-3 alpha)"),
    "norm-suite": Experiment(_norm_suite, "Orlicz, Lorentz and rearrangement lemmas on random fields"),
    "zygmund-membership": Experiment(_zygmund, "log vortex lies in L^2(log L)^kappa exactly for kappa < alpha - 1/2"),
    "truncation-decay": Experiment(_truncation, "Zygmund norm of the truncation remainder W_n decreases in n"),
    "symbol-error": Experiment(_symbol, "Fourier symbol |xi| omega0_hat - 2 pi is bounded and vanishes at infinity"),
    "besov": Experiment(_besov, "B^0_{2,inf} norm of the heat-evolved vortex is bounded uniformly in nu"),
}


def list_experiments() -> str:
    w = max(map(len, EXPERIMENTS))
    return "\n".join(f"{k:<{w}}  {v.description}" for k, v in EXPERIMENTS.items()) + "\n"


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------


def thread_count() -> int:
    raw = os.environ.get("ENSLAB_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"ENSLAB_THREADS must be a positive integer, got {raw!r}", None, "environment") from None
    if n < 1:
        raise ConfigError(f"ENSLAB_THREADS must be a positive integer, got {raw!r}", None, "environment")
    return n


@contextmanager
def _mapper(threads: int):
    if threads == 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield lambda f, it: list(pool.map(f, it))


def run(config_path: str | os.PathLike, output: str | os.PathLike | None = None, *, stream=None) -> int:
    """Run one config; returns the process exit code."""
    stream = stream or sys.stdout
    path = Path(config_path)
    try:
        if not path.is_file():
            raise ConfigError("no such config file", None, str(path))
        cfg = parse_config(path.read_text(), str(path))
        outdir = Path(output) if output is not None else Path(cfg.values.get("output", f"enslab-out/{cfg.experiment}"))
        threads = thread_count()
        with _mapper(threads) as map_fn:
            rep = EXPERIMENTS[cfg.experiment].runner(cfg, map_fn)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        print(f"config error: {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outdir.mkdir(parents=True, exist_ok=True)
    for tab in rep.tables:
        (outdir / f"{tab.name}.csv").write_text(tab.to_csv())
    summary = rep.summary(cfg.experiment)
    (outdir / f"{cfg.experiment}_summary.txt").write_text(summary)
    stream.write(summary)
    return EXIT_OK if rep.passed else EXIT_ASSERT


def bundled_config(name: str) -> Path:
    """Path of a config shipped with the package (``counterexample.cfg`` etc.)."""
    return Path(str(resources.files("enslab") / "configs" / name))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="enslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="config file, or the name of a bundled config")
    p_run.add_argument("-o", "--output", help="output directory (overrides the config)")
    sub.add_parser("list", help="list experiments")
    sub.add_parser("version", help="print the version")
    args = parser.parse_args(argv)
    if args.command == "list":
        sys.stdout.write(list_experiments())
        return EXIT_OK
    if args.command == "version":
        print(__version__)
        return EXIT_OK
    cfg = Path(args.config)
    if not cfg.exists() and bundled_config(cfg.name if cfg.suffix else cfg.name + ".cfg").is_file():
        cfg = bundled_config(cfg.name if cfg.suffix else cfg.name + ".cfg")
    return run(cfg, args.output)


if __name__ == "__main__":
    sys.exit(main())
