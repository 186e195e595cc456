"""Numerical certification of the subsolution hypotheses.

Each ``check_*`` function is independent and pure. ``full_report`` runs
them all for one initial field and collects the results in a
``VerificationReport``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .energy import (
    EnergyProfile,
    _pointwise,
    energy_density,
    energy_profile,
    estimate_lipschitz,
    generalized_energy,
)
from .spectral import (
    FourierTensorField,
    FourierVectorField,
    integrate,
    l2_norm_sq,
    to_physical,
)
from .subsolution import (
    SubsolutionSnapshot,
    limit_data,
    make_snapshot,
    time_derivative,
)

PREAMBLE = (
    "If every check passes, (vbar, ubar, 0) is a subsolution below the energy profile "
    "ebar = e(vbar, ubar) + min(t, 1/t); convex integration then yields infinitely many "
    "weak Euler solutions with initial data v0 and |v|^2/2 = ebar."
)


class VerificationError(RuntimeError):
    """A check could not be carried out; the message names the check."""


def _relative(value: float, scale: float) -> float:
    return value / scale if scale > 0 else value


def check_linear_system(snapshot: SubsolutionSnapshot, dv_dt: FourierVectorField, relative: bool = True) -> float:
    """max_{k,i} |d_t vhat_i + i sum_j k_j uhat_ij + i k_i qhat| with qhat = 0.

    The relative value divides by the size of the terms that cancel,
    ``max(max|d_t vhat|, max_k |k| max|uhat(k)|)``.
    """
    if dv_dt.grid != snapshot.grid:
        raise ValueError(f"grid mismatch: {dv_dt.grid} vs {snapshot.grid}")
    grid = snapshot.grid
    k = grid.wavenumbers.astype(float)
    u = snapshot.ubar.coeffs
    div_u = np.einsum("j...,ij...->i...", k, u)
    residual = np.abs(dv_dt.coeffs + 1j * div_u + 1j * k * snapshot.qbar)
    res = float(residual.max())
    if not relative:
        return res
    scale = max(dv_dt.max_abs(), float(np.max(grid.k_abs * np.abs(u).max(axis=(0, 1)))))
    return _relative(res, scale)


def check_range(ubar: FourierTensorField, relative: bool = True) -> tuple[float, float]:
    """(max |trace uhat(k)|, max |uhat_ij - uhat_ji|), relative to max |uhat|."""
    trace_max = float(np.abs(ubar.trace()).max())
    asym_max = float(ubar.asymmetry().max())
    if not relative:
        return trace_max, asym_max
    scale = ubar.max_abs()
    return _relative(trace_max, scale), _relative(asym_max, scale)


def check_strict_inequality(snapshot: SubsolutionSnapshot, profile: EnergyProfile) -> float:
    """min over the profile grid of ebar - e(vbar, ubar), with e evaluated afresh."""
    if profile.t != snapshot.t:
        raise ValueError(f"profile time {profile.t} differs from snapshot time {snapshot.t}")
    factor = profile.grid.n // snapshot.grid.n
    e, _ = energy_density(snapshot.vbar.coeffs, snapshot.ubar.coeffs, snapshot.grid, factor)
    return float(np.min(profile.total - e))


@dataclass(frozen=True)
class EnergyBounds:
    t: float
    energy_v: float  # int |vbar|^2
    energy_v_bound: float  # int |v0|^2
    stress_l1: float  # int |ubar|_F
    stress_l2sq: float  # int |ubar|_F^2
    stress_l1_bound: float  # |Q|^(1/2) (int |ubar|^2)^(1/2)
    stress_l2sq_bound: float  # 4 int |v0|^2

    def holds(self, rtol: float) -> bool:
        def le(a, b):
            return a <= b + rtol * max(abs(b), 1.0)

        return (
            le(self.energy_v, self.energy_v_bound)
            and le(self.stress_l2sq, self.stress_l2sq_bound)
            and le(self.stress_l1, self.stress_l1_bound)
        )


def _frobenius(u_phys: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(u_phys**2, axis=(0, 1)))


def check_energy_bounds(v0: FourierVectorField, snapshot: SubsolutionSnapshot, oversample: int = 2) -> EnergyBounds:
    u_phys, fine = to_physical(snapshot.ubar.coeffs, snapshot.grid, oversample)
    norm_u = _frobenius(u_phys)
    l2sq = integrate(norm_u**2, fine)
    v0_sq = l2_norm_sq(v0)
    return EnergyBounds(
        t=snapshot.t,
        energy_v=l2_norm_sq(snapshot.vbar),
        energy_v_bound=v0_sq,
        stress_l1=integrate(norm_u, fine),
        stress_l2sq=l2sq,
        stress_l1_bound=math.sqrt(fine.volume * l2sq),
        stress_l2sq_bound=4.0 * v0_sq,
    )


@dataclass(frozen=True)
class DecayResult:
    seq: list[tuple[float, float]]
    strictly_decreasing: bool
    ratio: float | None
    ratio_limit: float

    @property
    def ok(self) -> bool:
        return self.strictly_decreasing and (self.ratio is None or self.ratio <= self.ratio_limit)


def check_decay(
    v0: FourierVectorField,
    times,
    oversample: int = 2,
    ratio_limit: float = 0.01,
    *,
    check: bool = True,
) -> DecayResult:
    """Sequence (t, int ebar dx) and its decay beyond t = 1.

    The ratio test compares the last value with the value at the first
    time >= 1 and is applied when the sequence reaches t >= 100.
    """
    times = [float(t) for t in times]
    if any(t <= 0 for t in times):
        raise ValueError("decay times must be positive")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError(f"decay times must be strictly increasing, got {times}")
    if times[-1] < 10:
        raise ValueError(f"decay sequence must reach t >= 10, got max {times[-1]}")
    seq = [(t, energy_profile(make_snapshot(v0, t, check=check), oversample).integral()) for t in times]
    tail = [value for t, value in seq if t >= 1.0]
    strictly = all(b < a for a, b in zip(tail, tail[1:]))
    ratio = None
    if tail and times[-1] >= 100.0:
        ratio = _relative(tail[-1], tail[0])
    return DecayResult(seq, strictly, ratio, ratio_limit)


@dataclass(frozen=True)
class ContinuityResult:
    seq: list[tuple[float, float]]  # (t, ||e(vbar, ubar) - e(v0, u0)||_L1)
    v_dist: list[tuple[float, float]]  # (t, ||vbar - v0||_L2)
    u_dist: list[tuple[float, float]]  # (t, ||ubar - u0||_L1)
    majorant: list[tuple[float, float]]  # (t, 2 L sup||vbar|| ||vbar - v0|| + L ||ubar - u0||_L1)
    lipschitz: float
    monotone: bool
    ratio: float | None
    ratio_limit: float
    majorized: bool

    @property
    def ok(self) -> bool:
        return self.monotone and self.majorized and (self.ratio is None or self.ratio <= self.ratio_limit)


def check_continuity_at_zero(
    v0: FourierVectorField,
    times,
    oversample: int = 2,
    lipschitz: float | None = None,
    ratio_limit: float = 0.05,
    tol: float = 1e-10,
    *,
    check: bool = True,
) -> ContinuityResult:
    """L^1 convergence of e(vbar(t), ubar(t)) to e(v0, u0) along decreasing t.

    Also reports ||vbar - v0||_L2 and ||ubar - u0||_L1 and checks the
    majorization by the Lipschitz estimate of the scaled energy. The decade
    ratio test applies when the times span at least two decades.
    """
    times = [float(t) for t in times]
    if any(t <= 0 for t in times):
        raise ValueError("continuity times must be positive")
    if any(b >= a for a, b in zip(times, times[1:])):
        raise ValueError(f"continuity times must be strictly decreasing, got {times}")
    grid = v0.grid
    if lipschitz is None:
        lipschitz = estimate_lipschitz(grid.d)
    v0_, u0 = limit_data(v0, check=check)
    v0_phys, fine = to_physical(v0_.coeffs, grid, oversample)
    u0_phys, _ = to_physical(u0.coeffs, grid, oversample)
    e0 = generalized_energy(_pointwise(v0_phys, 1), _pointwise(u0_phys, 2))
    # the heat flow only shrinks |vhat|, so sup_t ||vbar(t)|| is attained at t = 0
    sup_v = math.sqrt(l2_norm_sq(v0))

    seq, v_dist, u_dist, majorant = [], [], [], []
    for t in times:
        snap = make_snapshot(v0, t, check=check)
        v_phys, _ = to_physical(snap.vbar.coeffs, grid, oversample)
        u_phys, _ = to_physical(snap.ubar.coeffs, grid, oversample)
        e = generalized_energy(_pointwise(v_phys, 1), _pointwise(u_phys, 2))
        dist_e = integrate(np.abs(e - e0), fine)
        dist_v = math.sqrt(l2_norm_sq(snap.vbar - v0))
        dist_u = integrate(_frobenius(u_phys - u0_phys), fine)
        seq.append((t, dist_e))
        v_dist.append((t, dist_v))
        u_dist.append((t, dist_u))
        majorant.append((t, 2 * lipschitz * sup_v * dist_v + lipschitz * dist_u))

    values = [x for _, x in seq]
    monotone = all(b <= a + tol for a, b in zip(values, values[1:]))
    ratio = None
    if times[0] / times[-1] >= 100.0:
        ratio = _relative(values[-1], values[0]) if values[0] > 0 else 0.0
    majorized = all(x <= m + tol for (_, x), (_, m) in zip(seq, majorant))
    return ContinuityResult(seq, v_dist, u_dist, majorant, lipschitz, monotone, ratio, ratio_limit, majorized)


def initial_energy_jump(v0: FourierVectorField, oversample: int = 2, *, check: bool = True) -> float:
    """int_Q e(v0, u0) dx - (1/2) ||v0||^2, the jump of the energy at t = 0."""
    v, u0 = limit_data(v0, check=check)
    e, fine = energy_density(v.coeffs, u0.coeffs, v.grid, oversample)
    return integrate(e, fine) - 0.5 * l2_norm_sq(v0)


@dataclass
class VerifyConfig:
    oversample: int = 2
    tol_algebraic: float = 1e-12
    tol_quadrature: float = 1e-10
    continuity_times: tuple[float, ...] = (1.0, 0.1, 0.01, 0.001)
    continuity_ratio: float = 0.05
    decay_times: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)
    decay_ratio: float = 0.01
    lipschitz_samples: int = 10**6
    lipschitz_seed: int = 0


@dataclass
class VerificationReport:
    residual_max: float
    trace_max: float
    asym_max: float
    min_margin: float
    energy_v: float
    energy_v_bound: float
    stress_l1: float
    stress_l1_bound: float
    continuity_seq: list[tuple[float, float]]
    decay_seq: list[tuple[float, float]]
    initial_jump: float
    passes: dict[str, bool]
    times: list[float] = field(default_factory=list)
    margins: list[tuple[float, float]] = field(default_factory=list)
    stress_l2sq: float = 0.0
    stress_l2sq_bound: float = 0.0
    lipschitz: float = 0.0
    continuity_majorant: list[tuple[float, float]] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    preamble: str = PREAMBLE

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=True)


def _run(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise VerificationError(f"check {name!r} failed to run: {exc}") from exc


def full_report(v0: FourierVectorField, t_grid, config: VerifyConfig | None = None) -> VerificationReport:
    """Run every check for the subsolution generated by ``v0``.

    Non-solenoidal data is not rejected: the stress is built anyway and the
    failure surfaces as ``passes["range"] = False``.
    """
    cfg = config or VerifyConfig()
    times = sorted(float(t) for t in t_grid)
    if not times or times[0] <= 0:
        raise ValueError(f"time grid must be non-empty and positive, got {list(t_grid)}")
    tol_a, tol_q, over = cfg.tol_algebraic, cfg.tol_quadrature, cfg.oversample

    residual = trace = asym = 0.0
    margins, bounds = [], []
    for t in times:
        snap = _run("snapshot", make_snapshot, v0, t, check=False)
        dv = _run("linear_system", time_derivative, v0, t)
        residual = max(residual, _run("linear_system", check_linear_system, snap, dv))
        tr, asy = _run("range", check_range, snap.ubar)
        trace, asym = max(trace, tr), max(asym, asy)
        profile = _run("strict_inequality", energy_profile, snap, over)
        margins.append((t, _run("strict_inequality", check_strict_inequality, snap, profile)))
        bounds.append(_run("energy_bounds", check_energy_bounds, v0, snap, over))

    lip = _run("continuity", estimate_lipschitz, v0.grid.d, cfg.lipschitz_samples, cfg.lipschitz_seed)
    cont = _run(
        "continuity",
        check_continuity_at_zero,
        v0,
        cfg.continuity_times,
        over,
        lip,
        cfg.continuity_ratio,
        tol_q,
        check=False,
    )
    decay = _run("decay", check_decay, v0, cfg.decay_times, over, cfg.decay_ratio, check=False)
    jump = _run("initial_jump", initial_energy_jump, v0, over, check=False)

    energies = [b.energy_v for b in bounds]
    nonincreasing = all(b <= a * (1 + tol_a) for a, b in zip(energies, energies[1:]))
    passes = {
        "linear_system": residual <= tol_a,
        "range": trace <= tol_a and asym <= tol_a,
        "strict_inequality": all(m > 0 and abs(m - min(t, 1 / t)) <= tol_a for t, m in margins),
        "energy_bounds": nonincreasing and all(b.holds(tol_q) for b in bounds),
        "continuity": cont.ok,
        "decay": decay.ok,
        "initial_jump": jump >= -tol_a,
    }
    passes["all"] = all(passes.values())

    worst = max(bounds, key=lambda b: b.energy_v)
    worst_u = max(bounds, key=lambda b: b.stress_l1)
    return VerificationReport(
        residual_max=residual,
        trace_max=trace,
        asym_max=asym,
        min_margin=min(m for _, m in margins),
        energy_v=worst.energy_v,
        energy_v_bound=worst.energy_v_bound,
        stress_l1=worst_u.stress_l1,
        stress_l1_bound=worst_u.stress_l1_bound,
        continuity_seq=cont.seq,
        decay_seq=decay.seq,
        initial_jump=jump,
        passes=passes,
        times=times,
        margins=margins,
        stress_l2sq=max(b.stress_l2sq for b in bounds),
        stress_l2sq_bound=worst.stress_l2sq_bound,
        lipschitz=lip,
        continuity_majorant=cont.majorant,
        config=asdict(cfg),
    )
