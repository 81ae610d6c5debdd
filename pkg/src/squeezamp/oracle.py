"""Brute-force truncated Fock-space reference.

The spin is kept as two oscillator blocks: index 0 is sigma_z = +1 (up),
index 1 is sigma_z = -1 (down).  Everything here is built from the ladder
matrices directly and never calls into the Gaussian engine, except for
:func:`predicted_state`, which turns engine output into Fock amplitudes so
the two can be compared, and :func:`required_dim`, which reads the engine's
phonon maximum to size the truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from . import engine
from .protocol import ProtocolSpec, SegmentSpec, with_eta

__all__ = [
    "OracleConfig",
    "SpinFockState",
    "TruncationError",
    "InsensitiveOperatingPoint",
    "ladder_ops",
    "segment_hamiltonian",
    "initial_state",
    "evolve_exact",
    "evolve_trotter",
    "run_protocol",
    "spin_down_population",
    "ideal_population",
    "mean_phonon",
    "trajectory_phonons",
    "trajectory_max_phonon",
    "qfi_pure",
    "fd_sensitivity",
    "fidelity",
    "displaced_squeezed_amplitudes",
    "predicted_state",
    "sizing_rule",
    "required_dim",
]


class TruncationError(RuntimeError):
    """Fock cutoff too small for the requested evolution."""

    def __init__(self, message: str, leakage: Optional[float] = None):
        super().__init__(message)
        self.leakage = leakage


class InsensitiveOperatingPoint(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    dim: int
    trotter_steps: int = 4096
    fidelity_tol: float = 1e-8
    leakage_tol: float = 1e-8

    def __post_init__(self):
        if self.dim < 16:
            raise ValueError("dim must be >= 16")
        if self.trotter_steps < 1:
            raise ValueError("trotter_steps must be >= 1")


@dataclass(frozen=True)
class SpinFockState:
    """Joint spin-oscillator amplitudes, shape (2, dim)."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != 2 or amps.shape[1] < 2:
            raise ValueError("amps must have shape (2, dim) with dim >= 2")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[1]

    @property
    def amps_up(self) -> np.ndarray:
        return self.amps[0]

    @property
    def amps_down(self) -> np.ndarray:
        return self.amps[1]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @property
    def leakage(self) -> float:
        return float(np.sum(np.abs(self.amps[:, -2:]) ** 2))


def ladder_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated annihilation and creation matrices."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T


def segment_hamiltonian(seg: SegmentSpec, dim: int) -> np.ndarray:
    """Oscillator Hamiltonian in each spin block, shape (2, dim, dim)."""
    a, ad = ladder_ops(dim)
    field = seg.eta * (a + ad)
    force = 1j * seg.alpha * (ad - a)
    drive = 0.5j * seg.g * (ad @ ad - a @ a)
    return np.stack([
        field + s * seg.sdf_sign * force + seg.pd_sign * drive for s in (+1, -1)
    ])


def _oscillator_vector(psi_i: str, dim: int) -> np.ndarray:
    kind, _, arg = psi_i.partition(":")
    kind = kind.strip().lower()
    if kind == "vacuum":
        v = np.zeros(dim, complex)
        v[0] = 1.0
        return v
    if kind == "fock":
        n = int(arg)
        if not 0 <= n < dim:
            raise ValueError("Fock index outside truncation")
        v = np.zeros(dim, complex)
        v[n] = 1.0
        return v
    if kind == "coherent":
        return displaced_squeezed_amplitudes(complex(arg.replace(" ", "")), 0.0, dim)
    raise ValueError(f"unknown initial state {psi_i!r}")


def initial_state(dim: int, psi_i: str = "vacuum") -> SpinFockState:
    """``|+> |psi_i>``."""
    v = _oscillator_vector(psi_i, dim) / math.sqrt(2)
    return SpinFockState(np.stack([v, v]))


def _checked(amps: np.ndarray, config: OracleConfig) -> SpinFockState:
    out = SpinFockState(amps)
    if abs(out.norm - 1.0) > 1e-10:
        raise RuntimeError(f"norm drifted to {out.norm!r}")
    if out.leakage > config.leakage_tol:
        raise TruncationError(
            f"truncation too small: leakage {out.leakage:.3e} at dim {out.dim}",
            out.leakage,
        )
    return out


def _propagators(seg: SegmentSpec, t: float, dim: int) -> np.ndarray:
    H = segment_hamiltonian(seg, dim)
    return np.stack([expm(-1j * t * H[i]) for i in range(2)])


def evolve_exact(state: SpinFockState, seg: SegmentSpec, config: OracleConfig) -> SpinFockState:
    """Advance each spin block by ``expm(-i H_s duration)``."""
    U = _propagators(seg, seg.duration, state.dim)
    return _checked(np.einsum("sij,sj->si", U, state.amps), config)


def evolve_trotter(state: SpinFockState, seg: SegmentSpec, n: int,
                   config: OracleConfig) -> SpinFockState:
    """First-order product of ``n`` alternating linear and quadratic steps."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, ad = ladder_ops(state.dim)
    dt = seg.duration / n
    quad = seg.pd_sign * 0.5j * seg.g * (ad @ ad - a @ a)
    S = expm(-1j * dt * quad)
    amps = []
    for i, s in enumerate((+1, -1)):
        lin = seg.eta * (a + ad) + s * seg.sdf_sign * 1j * seg.alpha * (ad - a)
        step = expm(-1j * dt * lin) @ S
        v = state.amps[i]
        for _ in range(n):
            v = step @ v
        amps.append(v)
    return _checked(np.stack(amps), config)


def sizing_rule(nbar_max: float) -> int:
    """Smallest cutoff allowed for a trajectory peaking at ``nbar_max`` phonons."""
    return int(math.ceil(nbar_max + 10 * math.sqrt(nbar_max) + 20))


MAX_DIM = 2000


def required_dim(spec: ProtocolSpec, psi_i: str = "vacuum", leakage_tol: float = 1e-8,
                 max_dim: int = MAX_DIM) -> int:
    """Auto cutoff: the sizing rule, grown until the predicted tails are negligible.

    The phonon maximum comes from the exact Gaussian trajectory.  The tail
    test uses predicted amplitudes at every segment boundary and at the
    phonon peak, requiring the top-two-level weight to sit three decades
    below ``leakage_tol`` so the truncated dynamics stay faithful.
    """
    nbar, t_peak = engine.max_phonon(spec, psi_i)
    dim = max(sizing_rule(nbar), 16)
    if dim > max_dim:
        raise TruncationError(
            f"truncation too small: peak mean phonon number {nbar:.4g} needs dim {dim} > cap {max_dim}"
        )
    instants = sorted(set(spec.boundaries[1:] + [t_peak]))
    ops = [_op_at(spec, t) for t in instants]
    while True:
        big = dim + 64
        tail = 0.0
        for op in ops:
            amps = predicted_state(op, big, psi_i).amps
            tail = max(tail, float(np.sum(np.abs(amps[:, dim - 2:]) ** 2)))
        if tail <= 1e-3 * leakage_tol:
            return dim
        dim = int(math.ceil(dim * 1.1))
        if dim > max_dim:
            raise TruncationError(f"truncation too small: tails need dim > cap {max_dim}")


def _op_at(spec: ProtocolSpec, t: float) -> engine.BranchOperator:
    ops, start = [], 0.0
    for seg in spec.segments:
        if t <= start + seg.duration:
            ops.append(engine.partial_segment(seg, max(t - start, 0.0)))
            break
        ops.append(engine.closed_form_segment(seg))
        start += seg.duration
    return engine.compose(ops).op


def run_protocol(spec: ProtocolSpec, config: OracleConfig, psi_i: str = "vacuum",
                 check_dim: bool = True) -> SpinFockState:
    """Exact evolution of ``|+>|psi_i>`` through every segment of ``spec``."""
    if check_dim:
        nbar, _ = engine.max_phonon(spec, psi_i)
        need = sizing_rule(nbar)
        if config.dim < need:
            raise TruncationError(
                f"truncation too small: dim {config.dim} < {need} required for "
                f"peak mean phonon number {nbar:.4g}"
            )
    state = initial_state(config.dim, psi_i)
    for seg in spec.segments:
        state = evolve_exact(state, seg, config)
    return state


def _branch_overlap(state: SpinFockState) -> complex:
    # amplitudes carry the 1/sqrt(2) of |+>
    return 2.0 * complex(np.vdot(state.amps_down, state.amps_up))


def spin_down_population(state: SpinFockState, readout: str = "signal") -> float:
    """Readout probability from the branch overlap ``o = <b_-|b_+>``.

    ``readout="signal"`` returns ``(1 + |o| cos(arg(o) / 2)) / 2``, which is
    ``(1 + cos phi)`` / 2 for the signal phase ``phi`` = half the branch phase
    difference (valid while ``|phi| < pi/2``).  ``readout="ramsey"`` returns
    the plain ``|+>``-projection ``(1 + Re o) / 2``, i.e. ``(1 + cos 2 phi) / 2``.
    """
    o = _branch_overlap(state)
    if readout == "signal":
        return 0.5 * (1.0 + abs(o) * math.cos(0.5 * math.atan2(o.imag, o.real)))
    if readout == "ramsey":
        return 0.5 * (1.0 + o.real)
    raise ValueError(f"unknown readout {readout!r}")


def ideal_population(phi: float, visibility: float = 1.0) -> float:
    """Readout for a disentangled output carrying signal phase ``phi``."""
    return 0.5 * (1.0 + visibility * math.cos(phi))


def mean_phonon(state: SpinFockState) -> float:
    n = np.arange(state.dim)
    return float(np.sum(n * np.abs(state.amps) ** 2))


def trajectory_phonons(spec: ProtocolSpec, samples_per_segment: int, config: OracleConfig,
                       psi_i: str = "vacuum") -> tuple[np.ndarray, np.ndarray]:
    """Mean phonon number sampled on an even grid inside every segment."""
    if samples_per_segment < 8:
        raise ValueError("samples_per_segment must be >= 8")
    state = initial_state(config.dim, psi_i)
    times, values = [0.0], [mean_phonon(state)]
    start = 0.0
    for seg in spec.segments:
        dt = seg.duration / samples_per_segment
        U = _propagators(seg, dt, config.dim)
        amps = state.amps
        for j in range(1, samples_per_segment + 1):
            amps = np.einsum("sij,sj->si", U, amps)
            state = _checked(amps, config)
            times.append(start + j * dt)
            values.append(mean_phonon(state))
        start += seg.duration
    return np.array(times), np.array(values)


def trajectory_max_phonon(spec: ProtocolSpec, samples_per_segment: int,
                          config: OracleConfig, psi_i: str = "vacuum") -> float:
    return float(np.max(trajectory_phonons(spec, samples_per_segment, config, psi_i)[1]))


def qfi_pure(state) -> float:
    """Quantum Fisher information ``4 Var(H0)`` with ``H0 = i (a^dag - a)``.

    Accepts a :class:`SpinFockState` or a bare oscillator vector.  The state
    is padded by one level so ``H0 |psi>`` is exact inside the cutoff.
    """
    amps = state.amps if isinstance(state, SpinFockState) else np.atleast_2d(np.asarray(state, complex))
    padded = np.concatenate([amps, np.zeros((amps.shape[0], 1), complex)], axis=1)
    a, ad = ladder_ops(padded.shape[1])
    H0 = 1j * (ad - a)
    h = padded @ H0.T
    second = float(np.sum(np.abs(h) ** 2))
    first = float(np.real(np.sum(padded.conj() * h)))
    return max(4.0 * (second - first * first), 0.0)


def fd_sensitivity(spec: ProtocolSpec, config: OracleConfig, delta: Optional[float] = None,
                   psi_i: str = "vacuum", readout: str = "signal") -> float:
    """Error-propagation sensitivity ``sqrt(P(1-P)) / |dP/deta|`` from oracle runs."""
    p = spec.params()
    if delta is None:
        scale = max(p["alpha"], p["g"]) or 1.0 / spec.total_T
        delta = 1e-5 * scale
    eta = p["eta"]

    def population(e: float) -> float:
        return spin_down_population(run_protocol(with_eta(spec, e), config, psi_i), readout)

    step = population(eta + delta) - population(eta - delta)
    # below this the difference is rounding noise, not signal
    if abs(step) < 1e-12:
        raise InsensitiveOperatingPoint("insensitive operating point: dP/deta vanishes")
    slope = step / (2 * delta)
    P = population(eta)
    return math.sqrt(max(P * (1 - P), 0.0)) / abs(slope)


def fidelity(psi: SpinFockState, phi: SpinFockState) -> float:
    return float(abs(np.vdot(psi.amps, phi.amps)) ** 2)


def displaced_squeezed_amplitudes(disp: complex, squeeze: float, dim: int) -> np.ndarray:
    """Fock amplitudes of ``D(disp) S(squeeze) |0>`` from the three-term recursion.

    ``D S |0>`` is annihilated by ``cosh(z)(a - disp) + sinh(z)(a^dag - disp*)``,
    which ties neighbouring amplitudes together; the vacuum amplitude fixes
    normalisation and phase.
    """
    z = float(squeeze)
    c, s = math.cosh(z), math.sinh(z)
    gamma = disp * c + disp.conjugate() * s
    out = np.zeros(dim, complex)
    out[0] = np.exp(-0.5 * abs(disp) ** 2 - 0.5 * math.tanh(z) * disp.conjugate() ** 2) / math.sqrt(c)
    if dim > 1:
        out[1] = gamma * out[0] / c
    for n in range(1, dim - 1):
        out[n + 1] = (gamma * out[n] - s * math.sqrt(n) * out[n - 1]) / (c * math.sqrt(n + 1))
    return out


def _generic_branch(phase: float, disp: complex, squeeze: float, base: str, dim: int) -> np.ndarray:
    big = dim + 80 + int(8 * abs(disp) ** 2 + 40 * abs(squeeze))
    a, ad = ladder_ops(big)
    v = _oscillator_vector(base, big)
    v = expm(0.5 * squeeze * (a @ a - ad @ ad)) @ v
    v = expm(disp * ad - np.conj(disp) * a) @ v
    return np.exp(1j * phase) * v[:dim]


def predicted_state(result, dim: int, psi_i: str = "vacuum") -> SpinFockState:
    """Fock amplitudes of the engine's branch states on ``|+>|psi_i>``."""
    branches = engine.apply_to_state_params(result, psi_i)
    rows = []
    for b in branches:
        if b.base == "vacuum":
            v = np.exp(1j * b.phase) * displaced_squeezed_amplitudes(b.disp, b.squeeze, dim)
        else:
            v = _generic_branch(b.phase, b.disp, b.squeeze, b.base, dim)
        rows.append(v / math.sqrt(2))
    return SpinFockState(np.stack(rows))
