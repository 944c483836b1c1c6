"""Sample paths of H-sssi SaS processes on the grid {k/n, k = 0..n}.

Four models are provided:

``FBM``
    Fractional Brownian motion, exact synthesis by circulant embedding of
    fractional Gaussian noise (Cholesky when the embedding fails).
``LEVY``
    Standard SaS Levy motion, exact at grid points.
``LFSM``
    Well-balanced linear fractional stable motion, Riemann-sum
    approximation of the moving-average integral (FFT convolution).
``TAKENAKA``
    Takenaka's process, exact at grid points.  The half-plane of discs
    ``(x, r)`` is partitioned into atoms according to the set of grid times
    the disc ``|x - t| <= r`` contains; that set is always a run of
    consecutive indices ``[k1, k2]`` so the atom masses have closed forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg, signal

from .errors import ConfigurationError, DomainError, NumericError, ValidationError
from .rng import SeedSpec, derive_stream, sample_standard_sas

__all__ = [
    "FbmParams",
    "LevyParams",
    "LfsmParams",
    "TakenakaParams",
    "SamplePath",
    "simulate",
    "simulate_fbm",
    "simulate_levy",
    "simulate_lfsm",
    "simulate_takenaka",
    "fgn_autocovariance",
    "lfsm_path_from_noise",
    "takenaka_indicator",
    "takenaka_atom_masses",
    "takenaka_rate_exponent",
    "lfsm_rate_exponent",
    "write_path_csv",
    "read_path_csv",
]

MODELS = ("FBM", "LEVY", "LFSM", "TAKENAKA")


@dataclass(frozen=True)
class FbmParams:
    H: float
    unit_variance: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.H < 1.0:
            raise ValidationError(f"fBm needs 0 < H < 1, got H={self.H}")
        if not self.unit_variance > 0:
            raise ValidationError(f"unit_variance must be positive, got {self.unit_variance}")

    @property
    def hurst(self) -> float:
        return self.H

    @property
    def alpha(self) -> float:
        return 2.0


@dataclass(frozen=True)
class LevyParams:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValidationError(f"Levy motion needs 0 < alpha <= 2, got alpha={self.alpha}")

    @property
    def hurst(self) -> float:
        # alpha = 1 is Cauchy motion: still 1-self-similar in the symmetric case.
        return 1.0 / self.alpha


@dataclass(frozen=True)
class LfsmParams:
    """Well-balanced LFSM and its discretisation.

    ``T`` is the kernel truncation half-width (support [-T, 1 + T]) and
    ``mesh`` the cell width; ``None`` means ``1 / (4 n)``.  Both ``T`` and
    ``1/n`` must be integer multiples of the mesh.
    """

    H: float
    alpha: float
    T: float = 10.0
    mesh: float | None = None

    def __post_init__(self):
        if not 0.0 < self.H < 1.0:
            raise ValidationError(f"LFSM needs 0 < H < 1, got H={self.H}")
        if not 0.0 < self.alpha < 2.0:
            raise ValidationError(f"LFSM needs 0 < alpha < 2, got alpha={self.alpha}")
        if math.isclose(self.H, 1.0 / self.alpha, rel_tol=0.0, abs_tol=1e-12):
            raise ValidationError("LFSM needs H != 1/alpha")
        if not self.T > 1.0:
            raise ValidationError(f"LFSM truncation T must exceed 1, got {self.T}")
        if self.mesh is not None and not 0.0 < self.mesh < 1.0:
            raise ValidationError(f"LFSM mesh must lie in (0, 1), got {self.mesh}")

    @property
    def hurst(self) -> float:
        return self.H


@dataclass(frozen=True)
class TakenakaParams:
    """Takenaka's process with control measure r^(nu-2) dx dr.

    ``max_atoms`` caps the O(n^2) atom count of the exact construction.
    """

    nu: float
    alpha: float
    max_atoms: int = 40_000_000

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0:
            raise ValidationError(f"Takenaka needs 0 < nu < 1, got nu={self.nu}")
        if not 0.0 < self.alpha < 2.0:
            raise ValidationError(f"Takenaka needs 0 < alpha < 2, got alpha={self.alpha}")
        if not self.nu / self.alpha < 1.0:
            raise ValidationError(f"Takenaka needs nu/alpha < 1, got {self.nu / self.alpha}")

    @property
    def hurst(self) -> float:
        return self.nu / self.alpha


_PARAM_TYPES = {"FBM": FbmParams, "LEVY": LevyParams, "LFSM": LfsmParams, "TAKENAKA": TakenakaParams}


@dataclass
class SamplePath:
    """Observations of X at k/n, k = 0..n, with their provenance."""

    n: int
    values: np.ndarray
    model: str
    params: object
    seed: SeedSpec | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n + 1,):
            raise ValidationError(f"expected {self.n + 1} values, got shape {self.values.shape}")

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    def subsample(self, step: int = 2) -> "SamplePath":
        """Every ``step``-th observation, i.e. the path seen on the grid k/(n/step)."""
        if self.n % step:
            raise ValidationError(f"n={self.n} is not divisible by {step}")
        return SamplePath(self.n // step, self.values[::step], self.model, self.params, self.seed,
                          dict(self.meta))

    def scaled(self, lam: float) -> "SamplePath":
        return SamplePath(self.n, lam * self.values, self.model, self.params, self.seed, dict(self.meta))


def _check_n(n, minimum=2):
    if int(n) != n or n < minimum:
        raise ValidationError(f"n must be an integer >= {minimum}, got {n}")
    return int(n)


# ---------------------------------------------------------------- fBm

def fgn_autocovariance(H: float, m: int, unit_variance: float = 1.0) -> np.ndarray:
    """Autocovariance at lags 0..m-1 of unit-step fractional Gaussian noise."""
    k = np.arange(m, dtype=float)
    return 0.5 * unit_variance * (np.abs(k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))


_CHOLESKY_MAX = 2**13


def simulate_fbm(p: FbmParams, n: int, seed: SeedSpec, method: str = "auto") -> SamplePath:
    """Fractional Brownian motion at k/n with E X(1)^2 = ``p.unit_variance``.

    ``method`` is ``"auto"`` (circulant embedding, Cholesky fallback),
    ``"circulant"`` or ``"cholesky"``.
    """
    n = _check_n(n)
    stream = derive_stream(seed)
    H = p.H
    gamma = fgn_autocovariance(H, n + 1, 1.0)
    used = method
    increments = None
    if method in ("auto", "circulant"):
        # Circulant of size 2n built from lags 0..n.
        row = np.concatenate([gamma, gamma[n - 1:0:-1]])
        lam = np.fft.fft(row).real
        if lam.min() < -1e-9 * lam.max():
            if method == "circulant":
                raise NumericError("circulant embedding is not non-negative definite")
        else:
            lam = np.clip(lam, 0.0, None)
            size = row.size
            z = stream.standard_normal(size) + 1j * stream.standard_normal(size)
            w = np.fft.fft(np.sqrt(lam / size) * z)
            increments = w.real[:n]
            used = "circulant"
    if increments is None:
        if n > _CHOLESKY_MAX:
            raise ConfigurationError(f"Cholesky synthesis limited to n <= {_CHOLESKY_MAX}")
        cov = linalg.toeplitz(gamma[:n])
        chol = linalg.cholesky(cov, lower=True)
        increments = chol @ stream.standard_normal(n)
        used = "cholesky"
    scale = math.sqrt(p.unit_variance) * n ** (-H)
    values = np.concatenate([[0.0], np.cumsum(increments) * scale])
    return SamplePath(n, values, "FBM", p, seed, {"method": used})


# ---------------------------------------------------------------- Levy

def simulate_levy(p: LevyParams, n: int, seed: SeedSpec) -> SamplePath:
    """Standard SaS Levy motion: increments over 1/n are SaS with scale n^(-1/alpha)."""
    n = _check_n(n)
    stream = derive_stream(seed)
    steps = sample_standard_sas(stream, p.alpha, n) * (1.0 / n) ** (1.0 / p.alpha)
    values = np.concatenate([[0.0], np.cumsum(steps)])
    return SamplePath(n, values, "LEVY", p, seed)


# ---------------------------------------------------------------- LFSM

def _lfsm_grid(p: LfsmParams, n: int):
    mesh = p.mesh if p.mesh is not None else 1.0 / (4 * n)
    sub = 1.0 / (n * mesh)
    half = p.T / mesh
    m, j0 = round(sub), round(half)
    if m < 1 or abs(sub - m) > 1e-9 * sub or abs(half - j0) > 1e-9 * half:
        raise ConfigurationError(f"mesh {mesh} must divide both 1/n and T={p.T}")
    return m, j0


def _cell_average_power(i: np.ndarray, gamma: float) -> np.ndarray:
    """int_0^1 |i - s|^gamma ds for integer i (exact)."""
    g1 = gamma + 1.0
    i = i.astype(float)
    pos = (np.abs(i) ** g1 - np.abs(i - 1.0) ** g1) / g1
    neg = (np.abs(1.0 - i) ** g1 - np.abs(i) ** g1) / g1
    return np.where(i >= 1, pos, neg)


def lfsm_path_from_noise(p: LfsmParams, n: int, noise: np.ndarray) -> np.ndarray:
    """LFSM values at k/n driven by one standard SaS variate per cell.

    ``noise`` has one entry per cell of [-T, 1 + T].  Cell j contributes
    ``mesh^(1/alpha) S_j`` times the cell average of
    ``|t - x|^(H - 1/alpha) - |x|^(H - 1/alpha)``.
    """
    m, j0 = _lfsm_grid(p, n)
    ncell = 2 * j0 + m * n
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (ncell,):
        raise ConfigurationError(f"expected {ncell} noise values, got {noise.shape}")
    mesh = 1.0 / (m * n)
    gamma = p.H - 1.0 / p.alpha
    # Cell index relative to x = 0 runs from -j0 to j0 + m n - 1; we need the
    # convolution sum_j c(i - j) S_j at i = k m for k = 0..n.
    lags = np.arange(-(j0 + m * n - 1), j0 + m * n + 1)
    kern = _cell_average_power(lags, gamma)
    conv = signal.fftconvolve(noise, kern, mode="full")
    # full index q corresponds to i = q + lags[0] + (-j0)
    offset = lags[0] - j0
    idx = np.arange(n + 1) * m - offset
    y = conv[idx]
    return mesh ** p.H * (y - y[0])


def simulate_lfsm(p: LfsmParams, n: int, seed: SeedSpec) -> SamplePath:
    """Riemann-sum approximation of well-balanced LFSM (not exact)."""
    n = _check_n(n)
    m, j0 = _lfsm_grid(p, n)
    stream = derive_stream(seed)
    noise = sample_standard_sas(stream, p.alpha, 2 * j0 + m * n)
    values = lfsm_path_from_noise(p, n, noise)
    values[0] = 0.0
    return SamplePath(n, values, "LFSM", p, seed, {"mesh": 1.0 / (m * n), "T": p.T})


def lfsm_rate_exponent(H: float, alpha: float) -> float:
    """Log-rate of the error bound b_n for LFSM."""
    crit = 2.0 - 2.0 / alpha
    if H < crit:
        return -0.5
    if H > crit:
        return (alpha * H - 2.0 * alpha) / 4.0
    return -0.5  # sqrt(log n / n): same power, log factor ignored


# ---------------------------------------------------------------- Takenaka

def takenaka_indicator(x, r, t):
    """Indicator of S_t = C_t symmetric-difference C_0, with C_t = {|x - t| <= r}."""
    x, r = np.asarray(x, dtype=float), np.asarray(r, dtype=float)
    return np.logical_xor(np.abs(x - t) <= r, np.abs(x) <= r).astype(float)


def _second_antiderivative(d, nu):
    d = np.asarray(d, dtype=float)
    return d**nu / (nu * (nu - 1.0))


def takenaka_atom_masses(nu: float, n: int):
    """Control-measure masses of the atoms of the grid-k/n partition.

    Returns ``(interior, boundary)``: ``interior[D]`` is the mass of an atom
    whose discs contain exactly the grid indices k1..k1+D (1 <= k1, k1+D <= n-1);
    ``boundary[j]`` is the mass of an atom whose index run is 0..j or
    n-j..n (both have the same mass by reflection), j = 0..n-1.
    """
    G = lambda d: _second_antiderivative(d, nu)  # noqa: E731
    D = np.arange(n, dtype=float)
    interior = G(D) + G(D + 2.0) - 2.0 * G(D + 1.0)
    boundary = G(D) - G(D + 1.0)
    scale = 2.0 ** (1.0 - nu) * float(n) ** (-nu)
    return scale * interior, scale * boundary


def takenaka_rate_exponent(nu: float) -> float:
    return 0.5 * (nu - 1.0)


def simulate_takenaka(p: TakenakaParams, n: int, seed: SeedSpec, chunk: int = 2_000_000) -> SamplePath:
    """Takenaka's process at k/n, exact in distribution.

    A disc with centre x and radius r contains the grid times k/n for k in a
    run [k1, k2].  If 0 is not in the run, the disc lies in S_{k/n} exactly
    for k1 <= k <= k2; if the run starts at 0 it lies in S_{k/n} for k > k2.
    Summing the stable random measure over each atom gives independent SaS
    variables with scale mass^(1/alpha).
    """
    n = _check_n(n)
    natoms = n * (n - 1) // 2 + 2 * n
    if natoms > p.max_atoms:
        raise ConfigurationError(f"n={n} needs {natoms} atoms, above max_atoms={p.max_atoms}")
    interior, boundary = takenaka_atom_masses(p.nu, n)
    a = p.alpha
    stream = derive_stream(seed)
    diff = np.zeros(n + 2)

    # Runs k1..k2 with 0 < k1 and k2 < n: lengths D = 0..n-2, k1 = 1..n-1-D.
    d_lo = 0
    while d_lo <= n - 2:
        count, d_hi = 0, d_lo
        while d_hi <= n - 2 and count < chunk:
            count += n - 1 - d_hi
            d_hi += 1
        ds = np.arange(d_lo, d_hi)
        lens = n - 1 - ds
        dd = np.repeat(ds, lens)
        starts = np.arange(lens.sum()) - np.repeat(np.cumsum(lens) - lens, lens) + 1
        w = interior[dd] ** (1.0 / a) * sample_standard_sas(stream, a, dd.size)
        diff += np.bincount(starts, w, n + 2)
        diff -= np.bincount(starts + dd + 1, w, n + 2)
        d_lo = d_hi

    # Runs k1..n with k1 >= 1: present for k1 <= k <= n.
    k1 = np.arange(1, n + 1)
    w = boundary[n - k1] ** (1.0 / a) * sample_standard_sas(stream, a, n)
    diff[:n + 1] += np.bincount(k1, w, n + 1)
    # Runs 0..k2 with k2 <= n-1: present for k > k2.
    k2 = np.arange(n)
    w = boundary[k2] ** (1.0 / a) * sample_standard_sas(stream, a, n)
    diff[:n + 2] += np.bincount(k2 + 1, w, n + 2)

    values = np.cumsum(diff)[:n + 1]
    values[0] = 0.0
    return SamplePath(n, values, "TAKENAKA", p, seed)


# ---------------------------------------------------------------- dispatch and I/O

_SIMULATORS = {
    "FBM": simulate_fbm,
    "LEVY": simulate_levy,
    "LFSM": simulate_lfsm,
    "TAKENAKA": simulate_takenaka,
}


def make_params(model: str, **kwargs):
    """Build the parameter record of ``model`` from keyword arguments."""
    model = model.upper()
    if model not in _PARAM_TYPES:
        raise ValidationError(f"unknown model {model!r}; expected one of {MODELS}")
    return _PARAM_TYPES[model](**kwargs)


def simulate(model: str, params, n: int, seed: SeedSpec) -> SamplePath:
    model = model.upper()
    if model not in _SIMULATORS:
        raise ValidationError(f"unknown model {model!r}; expected one of {MODELS}")
    return _SIMULATORS[model](params, n, seed)


def write_path_csv(path: SamplePath, out) -> Path:
    """Write ``t,value`` rows plus a JSON metadata sidecar ``<out>.json``."""
    out = Path(out)
    lines = ["t,value"]
    lines += [f"{t!r},{v!r}" for t, v in zip((k / path.n for k in range(path.n + 1)),
                                            map(float, path.values))]
    out.write_text("\n".join(lines) + "\n")
    meta = {
        "model": path.model,
        "n": path.n,
        "params": asdict(path.params) if path.params is not None else None,
        "seed": asdict(path.seed) if path.seed is not None else None,
    }
    meta.update(path.meta)
    Path(str(out) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out


def read_path_csv(src) -> SamplePath:
    """Read a ``t,value`` CSV; the sidecar is used when present."""
    src = Path(src)
    values = []
    with src.open() as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "t,value":
            raise ValidationError(f"{src}:1: expected header 't,value', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            try:
                if len(parts) != 2:
                    raise ValueError
                values.append(float(parts[1]))
            except ValueError:
                raise ValidationError(f"{src}:{lineno}: cannot parse row {line.strip()!r}") from None
    if len(values) < 2:
        raise ValidationError(f"{src}: need at least two observations")
    model, params, seed = "UNKNOWN", None, None
    side = Path(str(src) + ".json")
    if side.exists():
        meta = json.loads(side.read_text())
        model = meta.get("model", model)
        if meta.get("params") and model in _PARAM_TYPES:
            params = _PARAM_TYPES[model](**meta["params"])
        if meta.get("seed"):
            seed = SeedSpec(**meta["seed"])
    return SamplePath(len(values) - 1, np.array(values), model, params, seed)
