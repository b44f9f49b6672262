"""Piecewise-linear gradient waveforms and their exact time moments.

A waveform is a list of ``(time, G)`` breakpoints joined by straight lines.
Two consecutive breakpoints may share a time; that encodes an instantaneous
jump in ``G`` (ideal bipolar lobes, hard switch-off).  Because ``G`` is
piecewise linear, ``F = int G`` is piecewise quadratic, ``int F`` piecewise
cubic and ``int F**2`` piecewise quintic, so every moment below is evaluated
in closed form without quadrature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "WaveformDomainError",
    "GradientWaveform",
    "WaveformMoments",
    "random_waveform",
    "waveform_from_arrays",
]

_DOMAIN_RTOL = 1e-12


class WaveformDomainError(ValueError):
    """Raised when a waveform is evaluated outside ``[0, T_total]``."""


@dataclass(frozen=True)
class WaveformMoments:
    """Bundle of moment callables for one waveform (all SI units)."""

    F: Callable[[np.ndarray | float], np.ndarray | float]
    int_F: Callable[[np.ndarray | float], np.ndarray | float]
    int_F2: Callable[[np.ndarray | float], np.ndarray | float]


def _exp_moment(j: int, z: np.ndarray) -> np.ndarray:
    """``int_0^1 u**j exp(-z u) du`` for ``z >= 0``, stable at small ``z``."""
    z = np.asarray(z, dtype=float)
    small = z < 1.0
    out = np.empty_like(z)

    zs = z[small]
    if zs.size:
        # alternating series, 25 terms reaches double precision for z < 1
        term = np.ones_like(zs)
        acc = term / (j + 1)
        for m in range(1, 25):
            term = term * (-zs) / m
            acc = acc + term / (m + j + 1)
        out[small] = acc

    zl = z[~small]
    if zl.size:
        e = np.exp(-zl)
        psi = (1.0 - e) / zl
        for i in range(1, j + 1):
            psi = (i * psi - e) / zl
        out[~small] = psi
    return out


@dataclass(frozen=True)
class GradientWaveform:
    """Piecewise-linear gradient strength ``G(t)`` along a fixed direction.

    Parameters
    ----------
    breakpoints : sequence of (t [s], G [T/m])
        Times start at 0 and are non-decreasing; a repeated time is a jump.
    direction : 3-vector
        Unit vector ``u`` of the field gradient.
    B0 : float
        Uniform field strength [T].
    """

    breakpoints: tuple[tuple[float, float], ...]
    direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    B0: float = 0.0
    _seg: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = tuple((float(t), float(g)) for t, g in self.breakpoints)
        if not pts:
            pts = ((0.0, 0.0),)
        times = np.array([p[0] for p in pts])
        if times[0] != 0.0:
            raise ValueError("waveform must start at t = 0")
        if np.any(np.diff(times) < 0):
            raise ValueError("breakpoint times must be non-decreasing")
        if len(times) >= 3 and np.any((np.diff(times)[:-1] == 0) & (np.diff(times)[1:] == 0)):
            raise ValueError("at most two breakpoints may share a time")
        if not np.all(np.isfinite([p[1] for p in pts])) or not np.all(np.isfinite(times)):
            raise ValueError("breakpoints must be finite")
        u = np.asarray(self.direction, dtype=float)
        if u.shape != (3,) or abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError(f"direction must be a unit 3-vector, got {self.direction!r}")
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "direction", tuple(u.tolist()))
        object.__setattr__(self, "B0", float(self.B0))
        object.__setattr__(self, "_seg", self._build_segments(pts))

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, duration: float = 0.0, **kw) -> GradientWaveform:
        bp = [(0.0, 0.0)] if duration == 0 else [(0.0, 0.0), (duration, 0.0)]
        return cls(tuple(bp), **kw)

    @classmethod
    def constant(cls, G: float, duration: float, **kw) -> GradientWaveform:
        return cls(((0.0, G), (duration, G)), **kw)

    @classmethod
    def bipolar(cls, G: float, delta: float, **kw) -> GradientWaveform:
        """``+G`` on ``[0, delta]`` then ``-G`` on ``[delta, 2 delta]``."""
        return cls(((0.0, G), (delta, G), (delta, -G), (2 * delta, -G)), **kw)

    @classmethod
    def trapezoid(cls, G: float, ramp: float, flat: float, **kw) -> GradientWaveform:
        t1, t2 = ramp, ramp + flat
        return cls(((0.0, 0.0), (t1, G), (t2, G), (t2 + ramp, 0.0)), **kw)

    # ------------------------------------------------------------------
    # serialisation

    def to_json_dict(self) -> dict:
        return {
            "B0_T": self.B0,
            "u": list(self.direction),
            "breakpoints": [[t, g] for t, g in self.breakpoints],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> GradientWaveform:
        allowed = {"B0_T", "u", "breakpoints"}
        unknown = set(d) - allowed
        if unknown:
            raise ValueError(f"unknown waveform keys: {sorted(unknown)}")
        bps = d.get("breakpoints", [])
        for bp in bps:
            if len(bp) != 2:
                raise ValueError(f"breakpoint must be [t_s, G_T_per_m], got {bp!r}")
        return cls(
            tuple((t, g) for t, g in bps),
            direction=tuple(d.get("u", (0.0, 0.0, 1.0))),
            B0=d.get("B0_T", 0.0),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    # ------------------------------------------------------------------
    # internals

    @staticmethod
    def _build_segments(pts):
        t0, h, g0, slope = [], [], [], []
        for (ta, ga), (tb, gb) in zip(pts[:-1], pts[1:]):
            if tb == ta:
                continue
            t0.append(ta)
            h.append(tb - ta)
            g0.append(ga)
            slope.append((gb - ga) / (tb - ta))
        if not t0:
            # degenerate waveform: a single zero-length segment holding G at t=0
            t0, h, g0, slope = [0.0], [0.0], [pts[-1][1]], [0.0]

        n = len(t0)
        cF = np.zeros((n, 3))
        cIF = np.zeros((n, 4))
        cIF2 = np.zeros((n, 6))
        F0 = IF0 = IF20 = 0.0
        for i in range(n):
            # local polynomials in s = t - t0[i]
            f = np.array([F0, g0[i], slope[i] / 2.0])
            if_ = P.polyint(f, k=IF0)
            if2 = P.polyint(P.polymul(f, f), k=IF20)
            cF[i] = f
            cIF[i] = if_
            cIF2[i, : len(if2)] = if2
            F0 = P.polyval(h[i], f)
            IF0 = P.polyval(h[i], if_)
            IF20 = P.polyval(h[i], if2)
        return {
            "t0": np.array(t0),
            "h": np.array(h),
            "g0": np.array(g0),
            "slope": np.array(slope),
            "F": cF,
            "IF": cIF,
            "IF2": cIF2,
        }

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        T = self.duration
        tol = _DOMAIN_RTOL * max(T, 1e-300)
        if np.any(t < -tol) or np.any(t > T + tol) or np.any(~np.isfinite(t)):
            raise WaveformDomainError(f"t outside waveform domain [0, {T}]")
        t = np.clip(t, 0.0, T)
        seg = self._seg
        idx = np.searchsorted(seg["t0"], t, side="right") - 1
        idx = np.clip(idx, 0, len(seg["t0"]) - 1)
        return t, idx, t - seg["t0"][idx]

    @staticmethod
    def _horner(coef: np.ndarray, s: np.ndarray) -> np.ndarray:
        out = coef[..., -1]
        for k in range(coef.shape[-1] - 2, -1, -1):
            out = out * s + coef[..., k]
        return out

    def _eval(self, key: str, t):
        scalar = np.ndim(t) == 0
        _, idx, s = self._locate(t)
        val = self._horner(self._seg[key][idx], s)
        return float(val) if scalar else val

    # ------------------------------------------------------------------
    # public evaluation

    @property
    def duration(self) -> float:
        return self.breakpoints[-1][0]

    @property
    def u(self) -> np.ndarray:
        return np.asarray(self.direction)

    def G(self, t):
        """Gradient strength [T/m]; right-continuous at jumps."""
        scalar = np.ndim(t) == 0
        _, idx, s = self._locate(t)
        seg = self._seg
        val = seg["g0"][idx] + seg["slope"][idx] * s
        return float(val) if scalar else val

    def F(self, t):
        """Integrated gradient ``int_0^t G`` [T s / m]."""
        return self._eval("F", t)

    def int_F(self, t):
        """``int_0^t F`` [T s^2 / m]."""
        return self._eval("IF", t)

    def int_F2(self, t):
        """``int_0^t F**2`` [T^2 s^3 / m^2]."""
        return self._eval("IF2", t)

    def moments(self) -> WaveformMoments:
        return WaveformMoments(F=self.F, int_F=self.int_F, int_F2=self.int_F2)

    def peak_F(self) -> float:
        """Maximum of ``|F|`` over the waveform domain."""
        seg = self._seg
        cand = [0.0]
        for i in range(len(seg["t0"])):
            f = seg["F"][i]
            h = seg["h"][i]
            cand.append(abs(P.polyval(h, f)))
            cand.append(abs(f[0]))
            if f[2] != 0.0:
                s_star = -f[1] / (2.0 * f[2])
                if 0.0 < s_star < h:
                    cand.append(abs(P.polyval(s_star, f)))
        return float(max(cand))

    def lowpass_F(self, alpha: float, t):
        """``exp(-alpha t) int_0^t F(t') exp(alpha t') dt'`` in closed form.

        ``F`` is quadratic on each segment, so each piece reduces to the
        moments ``int_0^s w**j exp(-alpha w) dw`` for ``j <= 2``.
        """
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
        scalar = np.ndim(t) == 0
        _, idx, s = self._locate(t)
        seg = self._seg
        starts = self._lowpass_starts(alpha)
        s = np.atleast_1d(s)
        idx = np.atleast_1d(idx)
        val = np.exp(-alpha * s) * starts[idx] + self._lowpass_piece(seg["F"][idx], s, alpha)
        return float(val[0]) if scalar else val.reshape(np.shape(t))

    def _lowpass_piece(self, fcoef: np.ndarray, s: np.ndarray, alpha: float) -> np.ndarray:
        # q(s - w) = p0 + p1 w + p2 w^2 for the local quadratic q
        f0, f1, f2 = fcoef[..., 0], fcoef[..., 1], fcoef[..., 2]
        p0 = f0 + f1 * s + f2 * s * s
        p1 = -(f1 + 2.0 * f2 * s)
        p2 = f2
        z = alpha * s
        return (
            p0 * s * _exp_moment(0, z)
            + p1 * s**2 * _exp_moment(1, z)
            + p2 * s**3 * _exp_moment(2, z)
        )

    def _lowpass_starts(self, alpha: float) -> np.ndarray:
        seg = self._seg
        n = len(seg["t0"])
        out = np.zeros(n)
        for i in range(n - 1):
            h = np.array([seg["h"][i]])
            out[i + 1] = np.exp(-alpha * h[0]) * out[i] + self._lowpass_piece(
                seg["F"][i : i + 1], h, alpha
            )[0]
        return out

    def time_reversed(self) -> GradientWaveform:
        """Waveform ``G(T - t)``."""
        T = self.duration
        bps = tuple((T - t, g) for t, g in reversed(self.breakpoints))
        return GradientWaveform(bps, direction=self.direction, B0=self.B0)

    def scaled(self, factor: float) -> GradientWaveform:
        bps = tuple((t, factor * g) for t, g in self.breakpoints)
        return GradientWaveform(bps, direction=self.direction, B0=self.B0)

    def segment_times(self) -> np.ndarray:
        """Distinct breakpoint times, including 0 and ``T_total``."""
        return np.unique(np.array([t for t, _ in self.breakpoints]))


def random_waveform(
    rng: np.random.Generator,
    duration: float,
    n_breaks: int = 6,
    G_scale: float = 1.0,
    jumps: bool = True,
) -> GradientWaveform:
    """Random piecewise-linear waveform, used by tests and validation."""
    inner = np.sort(rng.uniform(0.0, duration, size=n_breaks - 2))
    times = np.concatenate([[0.0], inner, [duration]])
    gs = rng.normal(0.0, G_scale, size=times.size)
    bps: list[tuple[float, float]] = []
    for t, g in zip(times, gs):
        if jumps and bps and rng.random() < 0.3:
            bps.append((t, float(rng.normal(0.0, G_scale))))
        bps.append((float(t), float(g)))
    return GradientWaveform(tuple(bps))


def waveform_from_arrays(times: Sequence[float], G: Sequence[float], **kw) -> GradientWaveform:
    return GradientWaveform(tuple(zip(map(float, times), map(float, G))), **kw)
