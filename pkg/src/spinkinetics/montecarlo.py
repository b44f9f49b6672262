"""Random-walk oracle for gradient dephasing.

Each particle starts at ``u . x = 0`` with a 1-D Maxwellian velocity along
``u`` (only that component enters the phase, so the walk is 1-D).  Its
velocity is redrawn from the same Maxwellian at exponentially distributed
times with rate ``alpha`` (BGK resampling), which gives exactly
``<v(0) v(t)> = (kT/M) exp(-alpha t)`` and hence ``D = kT / (M alpha)``.
Positions are exact between events; the phase
``phi = -gamma int_0^t x(t') G(t') dt'`` is accumulated with the trapezoidal
rule on a uniform grid.

Random numbers
--------------
The ensemble is split into ``n_blocks`` blocks.  Block ``b`` draws from two
child streams of ``SeedSequence(seed).spawn(n_blocks)[b]``: one for the
collision intervals, one for the velocities.  Row ``j`` of each table is the
``j``-th draw for every particle of the block, so collision histories do
not depend on ``dt`` or on how blocks are shared among workers.  The blocks
double as jackknife groups for the standard error.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .gas import K_B
from .gradient import GradientWaveform

__all__ = [
    "MCConfig",
    "MCResult",
    "MCError",
    "MIN_PARTICLES",
    "default_dt",
    "simulate",
    "velocity_autocorrelation",
]

MIN_PARTICLES = 1000


class MCError(RuntimeError):
    """Non-finite values appeared during the walk."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(f"{message}: {diagnostics}")
        self.diagnostics = diagnostics


def default_dt(collision_rate: float, duration: float) -> float:
    """``min(0.1 / alpha, T / 1e4)``; ``T / 1e4`` alone when ``alpha = 0``."""
    dt = duration / 1e4
    if collision_rate > 0:
        dt = min(dt, 0.1 / collision_rate)
    return dt


@dataclass(frozen=True)
class MCConfig:
    """Random-walk settings.  ``dt=None`` selects :func:`default_dt`."""

    n_particles: int
    seed: int
    collision_rate: float
    temperature: float
    mass: float
    gamma: float
    waveform: GradientWaveform
    dt: float | None = None
    n_blocks: int = 50
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_particles < MIN_PARTICLES:
            raise ValueError(f"n_particles must be at least {MIN_PARTICLES}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not (self.collision_rate >= 0 and math.isfinite(self.collision_rate)):
            raise ValueError("collision_rate must be finite and non-negative")
        if not (self.temperature > 0 and self.mass > 0):
            raise ValueError("temperature and mass must be positive")
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if not (2 <= self.n_blocks <= self.n_particles):
            raise ValueError("n_blocks must lie in [2, n_particles]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.waveform.duration > 0:
            raise ValueError("waveform must have positive duration")
        if self.dt is not None:
            if not self.dt > 0:
                raise ValueError("dt must be positive")
            if self.collision_rate > 0 and self.dt > 0.1 / self.collision_rate * (1 + 1e-12):
                raise ValueError("dt must not exceed 0.1 / collision_rate")

    @property
    def step(self) -> float:
        return default_dt(self.collision_rate, self.waveform.duration) if self.dt is None else self.dt

    @property
    def thermal_velocity(self) -> float:
        return math.sqrt(K_B * self.temperature / self.mass)

    def block_sizes(self) -> np.ndarray:
        base, extra = divmod(self.n_particles, self.n_blocks)
        return np.array([base + (1 if b < extra else 0) for b in range(self.n_blocks)])


@dataclass(frozen=True)
class MCResult:
    mean_attenuation: complex
    std_error: float
    n_collisions_mean: float
    n_particles: int
    seed: int
    dt: float
    std_error_re: float = 0.0
    std_error_im: float = 0.0
    block_means: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def magnitude(self) -> float:
        return abs(self.mean_attenuation)

    def to_json_dict(self) -> dict:
        return {
            "mean_re": self.mean_attenuation.real,
            "mean_im": self.mean_attenuation.imag,
            "std_error": self.std_error,
            "n_particles": self.n_particles,
            "seed": self.seed,
        }


class _BlockTables:
    """Per-block interval and velocity tables with lazy row extension."""

    def __init__(self, config: MCConfig, blocks):
        self.alpha = config.collision_rate
        self.v_th = config.thermal_velocity
        root = np.random.SeedSequence(config.seed).spawn(config.n_blocks)
        sizes = config.block_sizes()
        self.sizes = [int(sizes[b]) for b in blocks]
        self.rngs = []
        for b in blocks:
            s_int, s_vel = root[b].spawn(2)
            self.rngs.append((np.random.default_rng(s_int), np.random.default_rng(s_vel)))
        expected = self.alpha * config.waveform.duration
        self.rows = int(math.ceil(expected + 6.0 * math.sqrt(expected) + 8.0))
        self.intervals = np.empty((0, sum(self.sizes)))
        self.velocities = np.empty((0, sum(self.sizes)))
        self._extend(self.rows)

    def _extend(self, n_rows: int) -> None:
        ints, vels = [], []
        for (r_int, r_vel), size in zip(self.rngs, self.sizes):
            if self.alpha > 0:
                ints.append(r_int.standard_exponential((n_rows, size)) / self.alpha)
            else:
                ints.append(np.full((n_rows, size), np.inf))
            vels.append(r_vel.standard_normal((n_rows, size)) * self.v_th)
        self.intervals = np.vstack([self.intervals, np.hstack(ints)])
        self.velocities = np.vstack([self.velocities, np.hstack(vels)])

    def ensure(self, row: int) -> None:
        while row >= self.intervals.shape[0]:
            self._extend(self.intervals.shape[0])


def _walk(config: MCConfig, blocks) -> tuple[np.ndarray, np.ndarray, float]:
    """Simulate the given blocks; return per-block complex sums, sizes and collision count."""
    tab = _BlockTables(config, blocks)
    n = sum(tab.sizes)
    cols = np.arange(n)
    wf = config.waveform
    T = wf.duration
    n_steps = max(1, int(math.ceil(T / config.step * (1.0 - 1e-12))))
    grid = np.linspace(0.0, T, n_steps + 1)
    G = np.asarray(wf.G(grid), dtype=float)
    half_gamma = 0.5 * config.gamma

    x = np.zeros(n)
    v = tab.velocities[0].copy()
    next_t = tab.intervals[0].copy()
    ncoll = np.zeros(n, dtype=np.int64)
    phi = np.zeros(n)
    xG_old = np.zeros(n)

    # overflow surfaces below as MCError
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            t_old, t_new = grid[i], grid[i + 1]
            advance = np.full(n, t_new - t_old)
            idx = np.flatnonzero(next_t <= t_new)
            t_here = np.full(idx.size, t_old)
            while idx.size:
                tc = next_t[idx]
                x[idx] += v[idx] * (tc - t_here)
                row = ncoll[idx] + 1
                tab.ensure(int(row.max()))
                v[idx] = tab.velocities[row, cols[idx]]
                next_t[idx] = tc + tab.intervals[row, cols[idx]]
                ncoll[idx] = row
                advance[idx] = t_new - tc
                t_here = tc
                keep = next_t[idx] <= t_new
                idx, t_here = idx[keep], t_here[keep]
            x += v * advance
            xG_new = x * G[i + 1]
            phi -= half_gamma * (t_new - t_old) * (xG_old + xG_new)
            xG_old = xG_new

    if not np.all(np.isfinite(phi)):
        bad = np.flatnonzero(~np.isfinite(phi))
        raise MCError(
            "non-finite phase",
            {"n_bad": int(bad.size), "first_particle": int(bad[0]), "max_abs_x": float(np.nanmax(np.abs(x)))},
        )

    z = np.exp(1j * phi)
    sums = []
    start = 0
    for size in tab.sizes:
        part = z[start : start + size]
        sums.append(complex(math.fsum(part.real), math.fsum(part.imag)))
        start += size
    return np.array(sums), np.array(tab.sizes), float(ncoll.sum())


def _walk_star(args):
    return _walk(*args)


def _jackknife(sums: np.ndarray, sizes: np.ndarray, estimator) -> float:
    total, N = sums.sum(), sizes.sum()
    loo = np.array([estimator((total - s) / (N - m)) for s, m in zip(sums, sizes)])
    B = len(sums)
    return float(math.sqrt((B - 1) / B * math.fsum((loo - loo.mean()) ** 2)))


def simulate(config: MCConfig) -> MCResult:
    """Ensemble mean of ``exp(i phi)`` with a block-jackknife standard error.

    ``std_error`` refers to the magnitude of the mean; ``std_error_re`` and
    ``std_error_im`` to its components.  A zero gradient gives exactly
    ``1 + 0j`` and zero error.
    """
    blocks = list(range(config.n_blocks))
    if config.workers == 1:
        parts = [_walk(config, blocks)]
    else:
        chunks = [c.tolist() for c in np.array_split(blocks, config.workers) if len(c)]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(_walk_star, [(config, c) for c in chunks]))
    sums = np.concatenate([p[0] for p in parts])
    sizes = np.concatenate([p[1] for p in parts])
    n_coll = math.fsum(p[2] for p in parts)
    N = int(sizes.sum())
    mean = complex(math.fsum(sums.real), math.fsum(sums.imag)) / N
    return MCResult(
        mean_attenuation=mean,
        std_error=_jackknife(sums, sizes, abs),
        n_collisions_mean=n_coll / N,
        n_particles=N,
        seed=config.seed,
        dt=config.step,
        std_error_re=_jackknife(sums, sizes, lambda c: c.real),
        std_error_im=_jackknife(sums, sizes, lambda c: c.imag),
        block_means=sums / sizes,
    )


def velocity_autocorrelation(config: MCConfig, lags) -> list[tuple[float, float, float]]:
    """Empirical ``<v(0) v(lag)>`` from the exact event histories.

    Returns ``(lag, correlation, standard_error)`` triples; correlation in
    m^2/s^2.  The waveform only sets the table size and is otherwise unused.
    """
    lags = np.atleast_1d(np.asarray(lags, dtype=float))
    if np.any(lags < 0) or not np.all(np.isfinite(lags)):
        raise ValueError("lags must be finite and non-negative")
    tab = _BlockTables(config, range(config.n_blocks))
    n = sum(tab.sizes)
    cols = np.arange(n)
    v0 = tab.velocities[0]
    out = []
    for lag in lags:
        # collisions up to ``lag``: extend until every history passes it
        while True:
            times = np.cumsum(tab.intervals, axis=0)
            if np.all(times[-1] > lag):
                break
            tab.ensure(tab.intervals.shape[0])
        k = np.sum(times <= lag, axis=0)
        prod = v0 * tab.velocities[k, cols]
        out.append((float(lag), float(prod.mean()), float(prod.std(ddof=1) / math.sqrt(n))))
    return out
