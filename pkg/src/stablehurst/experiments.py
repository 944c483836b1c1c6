"""Seeded Monte Carlo campaigns: consistency, convergence rates and CLT checks.

Replication ``rep`` at grid size ``n`` draws from the stream
``SeedSpec(master_seed, pair(n, rep))`` so grids never share randomness and
results do not depend on the order in which tasks run.  Workers only change
wall time; rows are sorted by ``(n, rep)`` before anything is folded or
written.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .asymptotics import sigma_fbm, sigma_levy, xi_fbm, xi_levy, levy_cov_table
from .errors import ConfigurationError, NumericError, StableHurstError, ValidationError
from .estimators import DEFAULT_BETA, DEFAULT_BETA_PAIR, estimate_joint
from .processes import (MODELS, lfsm_rate_exponent, make_params, simulate, takenaka_rate_exponent)
from .rng import SeedSpec
from .specfun import BetaPair
from .variations import make_filter

__all__ = [
    "ExperimentConfig",
    "RateTarget",
    "ExperimentReport",
    "CSV_COLUMNS",
    "stream_index",
    "parse_config",
    "load_config",
    "run_replications",
    "run_consistency",
    "run_rate",
    "run_clt",
    "rate_target_for",
    "aggregate",
    "write_csv",
    "read_csv",
]

CSV_COLUMNS = ("model", "n", "rep", "seed", "h_hat", "alpha_hat", "degenerate_alpha", "v_n_beta",
               "v_half_beta", "v_n_beta1", "v_n_beta2", "psi_value")

RATE_SLACK = 0.15
KS_SLACK = 1.5
KS_MIN_R = 30
XI_BAND = (0.8, 1.25)
SIGMA_BAND = (0.75, 1.33)
MAX_FAILED_FRACTION = 0.01

_PARAM_KEYS = {
    "FBM": ("H",),
    "LEVY": ("alpha",),
    "LFSM": ("H", "alpha", "T", "mesh"),
    "TAKENAKA": ("nu", "alpha"),
}


def stream_index(n: int, rep: int) -> int:
    """Cantor pairing of (n, rep): distinct for every grid size and replication."""
    return (n + rep) * (n + rep + 1) // 2 + rep


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    params: dict
    n_list: tuple
    replications: int
    master_seed: int
    filter: str = "second_difference"
    beta: float = DEFAULT_BETA
    beta_pair: BetaPair = DEFAULT_BETA_PAIR
    variance_checks: bool = False
    output: str | None = None
    workers: int = 1
    levy_mc_samples: int = 1_000_000

    def __post_init__(self):
        model = str(self.model).upper()
        object.__setattr__(self, "model", model)
        if model not in MODELS:
            raise ConfigurationError(f"unknown model {self.model!r}; expected one of {MODELS}")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        ns = self.n_list
        if not ns:
            raise ConfigurationError("n_list is empty")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigurationError(f"n_list must be strictly increasing, got {list(ns)}")
        if any(n % 2 or n <= 0 for n in ns):
            raise ConfigurationError(f"n_list entries must be positive and even, got {list(ns)}")
        if self.replications < 2:
            raise ConfigurationError(f"replications must be >= 2, got {self.replications}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        bp = self.beta_pair if isinstance(self.beta_pair, BetaPair) else BetaPair(*self.beta_pair)
        object.__setattr__(self, "beta_pair", bp)
        SeedSpec(self.master_seed, 0)
        make_filter(self.filter)
        self.model_params()  # validates parameters early

    def model_params(self):
        return make_params(self.model, **self.params)

    @property
    def true_h(self) -> float:
        return self.model_params().hurst

    @property
    def true_alpha(self) -> float:
        return 2.0 if self.model == "FBM" else float(self.params["alpha"])


@dataclass(frozen=True)
class RateTarget:
    model: str
    exponent: float

    def __post_init__(self):
        if self.exponent > 0:
            raise ValidationError(f"rate exponent must be <= 0, got {self.exponent}")


def rate_target_for(cfg: ExperimentConfig) -> RateTarget:
    """Log-rate of b_n for the configured model."""
    p = cfg.model_params()
    if cfg.model in ("FBM", "LEVY"):
        return RateTarget(cfg.model, -0.5)
    if cfg.model == "LFSM":
        return RateTarget(cfg.model, lfsm_rate_exponent(p.H, p.alpha))
    return RateTarget(cfg.model, takenaka_rate_exponent(p.nu))


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list
    aggregates: dict
    failures: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    rate: dict | None = None
    clt: dict | None = None
    notes: list = field(default_factory=list)

    def summary(self) -> str:
        """Structured key = value text, one block per section."""
        cfg = self.config
        out = ["[config]"]
        out.append(f"model = {cfg.model}")
        for k in sorted(cfg.params):
            out.append(f"{k} = {cfg.params[k]!r}")
        out += [f"n_list = {','.join(map(str, cfg.n_list))}", f"replications = {cfg.replications}",
                f"seed = {cfg.master_seed}", f"filter = {cfg.filter}", f"beta = {cfg.beta!r}",
                f"beta1 = {cfg.beta_pair.beta1!r}", f"beta2 = {cfg.beta_pair.beta2!r}",
                f"failed_replications = {len(self.failures)}"]
        for n in cfg.n_list:
            out.append(f"[n={n}]")
            for k, v in self.aggregates[n].items():
                out.append(f"{k} = {v!r}")
        for title, block in (("rate", self.rate), ("clt", self.clt), ("checks", self.checks)):
            if block:
                out.append(f"[{title}]")
                for k, v in block.items():
                    out.append(f"{k} = {v!r}")
        if self.notes:
            out.append("[notes]")
            out += [f"note = {s}" for s in self.notes]
        return "\n".join(out) + "\n"


# ---------------------------------------------------------------- replications

def _one(task):
    model, params, fkind, beta, bp, master, n, rep = task
    idx = stream_index(n, rep)
    row = {"model": model, "n": n, "rep": rep, "seed": idx}
    try:
        path = simulate(model, make_params(model, **params), n, SeedSpec(master, idx))
        res = estimate_joint(path, fkind, beta, bp)
    except StableHurstError as exc:
        return row, f"{type(exc).__name__}: {exc}"
    row.update(h_hat=res.h_hat, alpha_hat=res.alpha_hat, degenerate_alpha=res.degenerate_alpha,
               v_n_beta=res.v_n_beta, v_half_beta=res.v_half_beta, v_n_beta1=res.v_n_beta1,
               v_n_beta2=res.v_n_beta2, psi_value=res.psi_value)
    return row, None


def run_replications(cfg: ExperimentConfig):
    """All (n, rep) replications; returns (rows sorted by (n, rep), failures)."""
    tasks = [(cfg.model, dict(cfg.params), cfg.filter, cfg.beta, cfg.beta_pair, cfg.master_seed, n, rep)
             for n in cfg.n_list for rep in range(cfg.replications)]
    if cfg.workers == 1:
        results = [_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_one, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers))))
    results.sort(key=lambda r: (r[0]["n"], r[0]["rep"]))
    rows, failures = [], []
    nan = float("nan")
    for row, err in results:
        if err is not None:
            failures.append((row["n"], row["rep"], err))
            row.update(h_hat=nan, alpha_hat=nan, degenerate_alpha=False, v_n_beta=nan, v_half_beta=nan,
                       v_n_beta1=nan, v_n_beta2=nan, psi_value=nan)
        rows.append(row)
    if len(failures) > MAX_FAILED_FRACTION * len(rows):
        first = failures[0]
        raise NumericError(f"{len(failures)} of {len(rows)} replications failed "
                           f"(first at n={first[0]}, rep={first[1]}: {first[2]})")
    return rows, failures


def aggregate(rows, true_h: float, true_alpha: float) -> dict:
    """Per-n aggregates; recomputable from the raw rows alone."""
    out = {}
    for n in sorted({r["n"] for r in rows}):
        sel = sorted((r for r in rows if r["n"] == n), key=lambda r: r["rep"])
        h = np.array([r["h_hat"] for r in sel], dtype=float)
        a = np.array([r["alpha_hat"] for r in sel], dtype=float)
        ok = np.isfinite(h) & np.isfinite(a)
        eh, ea = h[ok] - true_h, a[ok] - true_alpha
        out[n] = {
            "count": int(ok.sum()),
            "mean_h": float(np.mean(h[ok])),
            "mean_alpha": float(np.mean(a[ok])),
            "mean_abs_err_h": float(np.mean(np.abs(eh))),
            "mean_abs_err_alpha": float(np.mean(np.abs(ea))),
            "median_abs_err_alpha": float(np.median(np.abs(ea))),
            "rmse_h": float(np.sqrt(np.mean(eh**2))),
            "rmse_alpha": float(np.sqrt(np.mean(ea**2))),
            "degenerate_alpha_count": int(sum(bool(r["degenerate_alpha"]) for r in sel)),
        }
    return out


def _decreasing_with_one_inversion(seq) -> bool:
    return sum(b >= a for a, b in zip(seq, seq[1:])) <= 1


def _base_report(cfg):
    rows, failures = run_replications(cfg)
    agg = aggregate(rows, cfg.true_h, cfg.true_alpha)
    rep = ExperimentReport(cfg, rows, agg, failures)
    if failures:
        rep.notes.append(f"{len(failures)} replication(s) failed and are excluded from aggregates")
    return rep


def _finish(rep: ExperimentReport):
    cfg = rep.config
    if cfg.output:
        write_csv(rep.rows, cfg.output)
        Path(str(cfg.output) + ".summary.txt").write_text(rep.summary())
    return rep


def run_consistency(cfg: ExperimentConfig) -> ExperimentReport:
    rep = _base_report(cfg)
    ns = cfg.n_list
    eh = [rep.aggregates[n]["mean_abs_err_h"] for n in ns]
    ea = [rep.aggregates[n]["mean_abs_err_alpha"] for n in ns]
    rep.checks = {
        "h_error_decreasing": _decreasing_with_one_inversion(eh),
        "alpha_error_decreasing": _decreasing_with_one_inversion(ea),
        "terminal_mean_abs_err_h": eh[-1],
        "terminal_mean_abs_err_alpha": ea[-1],
    }
    return _finish(rep)


def run_rate(cfg: ExperimentConfig, target: RateTarget | None = None) -> ExperimentReport:
    if len(cfg.n_list) < 4:
        raise ConfigurationError(f"rate regression needs at least 4 grid sizes, got {len(cfg.n_list)}")
    target = target or rate_target_for(cfg)
    rep = _base_report(cfg)
    x = np.log(np.array(cfg.n_list, dtype=float))
    y = np.log([rep.aggregates[n]["rmse_h"] for n in cfg.n_list])
    fit = stats.linregress(x, y)
    bound = target.exponent + RATE_SLACK
    rep.rate = {"target_exponent": target.exponent, "slope": float(fit.slope),
                "slope_std_error": float(fit.stderr), "intercept": float(fit.intercept),
                "bound": bound, "pass": bool(fit.slope <= bound)}
    if cfg.model in ("LFSM", "TAKENAKA"):
        rep.notes.append("rate bound is one-sided; the simulator is a discretisation and its bias "
                         "is not part of the bound")
    return _finish(rep)


def _predicted_variances(cfg: ExperimentConfig):
    p = cfg.model_params()
    if cfg.model == "FBM":
        return xi_fbm(cfg.filter, p.H, cfg.beta), sigma_fbm(cfg.filter, p.H, cfg.beta_pair)
    if cfg.model == "LEVY":
        bp = cfg.beta_pair
        table = levy_cov_table(p.alpha, cfg.filter, (cfg.beta, bp.beta1, bp.beta2), cfg.levy_mc_samples,
                               SeedSpec(cfg.master_seed, stream_index(0, 0)))
        return (xi_levy(p.alpha, cfg.filter, cfg.beta, table),
                sigma_levy(p.alpha, cfg.filter, bp, table))
    raise ConfigurationError(f"CLT checks need model FBM or LEVY, got {cfg.model}")


def _normal_block(prefix, z, predicted, band, R):
    out = {}
    svar = float(np.var(z, ddof=1))
    ratio = svar / predicted.value
    out[f"{prefix}_sample_variance"] = svar
    out[f"{prefix}_predicted_variance"] = predicted.value
    out[f"{prefix}_variance_ratio"] = ratio
    out[f"{prefix}_ratio_band"] = band
    out[f"{prefix}_ratio_pass"] = bool(band[0] <= ratio <= band[1])
    ks = stats.kstest(z, "norm", args=(0.0, math.sqrt(predicted.value))).statistic
    out[f"{prefix}_ks_distance"] = float(ks)
    if R >= KS_MIN_R:
        out[f"{prefix}_ks_bound"] = 1.36 / math.sqrt(R) * KS_SLACK
        out[f"{prefix}_ks_pass"] = bool(ks < out[f"{prefix}_ks_bound"])
    if "std_error" in predicted.truncation:
        out[f"{prefix}_predicted_std_error"] = predicted.truncation["std_error"]
    if predicted.flags:
        out[f"{prefix}_flags"] = "; ".join(predicted.flags)
    return out


def run_clt(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.model not in ("FBM", "LEVY"):
        raise ConfigurationError(f"CLT checks need model FBM or LEVY, got {cfg.model}")
    rep = _base_report(cfg)
    n = cfg.n_list[-1]
    sel = [r for r in rep.rows if r["n"] == n and math.isfinite(r["h_hat"])]
    zh = math.sqrt(n) * (np.array([r["h_hat"] for r in sel]) - cfg.true_h)
    za = math.sqrt(n) * (np.array([r["alpha_hat"] for r in sel]) - cfg.true_alpha)
    xi, sigma = _predicted_variances(cfg)
    R = len(sel)
    clt = {"n": n, "replications": R}
    clt.update(_normal_block("h", zh, xi, XI_BAND, R))
    clt.update(_normal_block("alpha", za, sigma, SIGMA_BAND, R))
    if R < KS_MIN_R:
        clt["ks_flag"] = "sample too small for KS"
        rep.notes.append(f"sample too small for KS (R={R} < {KS_MIN_R}); no KS verdict")
    rep.clt = clt
    return _finish(rep)


# ---------------------------------------------------------------- CSV

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows, out) -> Path:
    out = Path(out)
    lines = [",".join(CSV_COLUMNS)]
    for r in sorted(rows, key=lambda r: (r["n"], r["rep"])):
        lines.append(",".join(_fmt(r[c]) for c in CSV_COLUMNS))
    out.write_text("\n".join(lines) + "\n")
    return out


def read_csv(src) -> list:
    src = Path(src)
    text = src.read_text().splitlines()
    if not text or text[0] != ",".join(CSV_COLUMNS):
        raise ValidationError(f"{src}:1: unexpected header")
    rows = []
    for lineno, line in enumerate(text[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ValidationError(f"{src}:{lineno}: expected {len(CSV_COLUMNS)} fields, got {len(parts)}")
        r = dict(zip(CSV_COLUMNS, parts))
        try:
            for k in ("n", "rep", "seed"):
                r[k] = int(r[k])
            for k in ("h_hat", "alpha_hat", "v_n_beta", "v_half_beta", "v_n_beta1", "v_n_beta2", "psi_value"):
                r[k] = float(r[k])
        except ValueError:
            raise ValidationError(f"{src}:{lineno}: cannot parse row") from None
        r["degenerate_alpha"] = r["degenerate_alpha"] == "true"
        rows.append(r)
    return rows


# ---------------------------------------------------------------- config files

CONFIG_KEYS = ("model", "H", "alpha", "nu", "T", "mesh", "filter", "beta", "beta1", "beta2", "n_list",
               "replications", "seed", "variance_checks", "output", "workers", "levy_mc_samples", "mode")


def _parse_bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {s!r}")


def parse_config(text: str, overrides: dict | None = None) -> tuple[ExperimentConfig, str]:
    """Parse flat ``key = value`` text; returns (config, mode).

    ``#`` starts a comment.  ``overrides`` (e.g. from command-line flags)
    take precedence over file values.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config line {lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"config line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigurationError(f"config line {lineno}: duplicate key {key!r}")
        raw[key] = value
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = str(v)
    try:
        model = raw["model"].upper()
        if model not in _PARAM_KEYS:
            raise ConfigurationError(f"unknown model {raw['model']!r}; expected one of {MODELS}")
        params = {k: float(raw[k]) for k in _PARAM_KEYS[model] if k in raw}
        if "seed" not in raw:
            raise ConfigurationError("a seed is required for experiments")
        kw = {
            "model": model,
            "params": params,
            "n_list": tuple(int(s) for s in raw["n_list"].split(",")),
            "replications": int(raw["replications"]),
            "master_seed": int(raw["seed"]),
        }
    except KeyError as exc:
        raise ConfigurationError(f"missing required config key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ConfigurationError(f"bad config value: {exc}") from None
    try:
        if "filter" in raw:
            kw["filter"] = raw["filter"]
        if "beta" in raw:
            kw["beta"] = float(raw["beta"])
        if "beta1" in raw or "beta2" in raw:
            kw["beta_pair"] = BetaPair(float(raw.get("beta1", DEFAULT_BETA_PAIR.beta1)),
                                       float(raw.get("beta2", DEFAULT_BETA_PAIR.beta2)))
        if "variance_checks" in raw:
            kw["variance_checks"] = _parse_bool(raw["variance_checks"])
        if "output" in raw:
            kw["output"] = raw["output"]
        if "workers" in raw:
            kw["workers"] = int(raw["workers"])
        if "levy_mc_samples" in raw:
            kw["levy_mc_samples"] = int(raw["levy_mc_samples"])
    except ValueError as exc:
        raise ConfigurationError(f"bad config value: {exc}") from None
    mode = raw.get("mode", "consistency").lower()
    if mode not in ("consistency", "rate", "clt"):
        raise ConfigurationError(f"mode must be consistency, rate or clt, got {mode!r}")
    cfg = ExperimentConfig(**kw)
    if cfg.variance_checks and mode == "consistency":
        mode = "clt"
    return cfg, mode


def load_config(path, overrides: dict | None = None) -> tuple[ExperimentConfig, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, overrides)


def run(cfg: ExperimentConfig, mode: str = "consistency") -> ExperimentReport:
    return {"consistency": run_consistency, "rate": run_rate, "clt": run_clt}[mode](cfg)

