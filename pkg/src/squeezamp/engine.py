"""Exact Gaussian propagation of the two spin branches.

For a quadratic Hamiltonian the evolution in spin branch ``s`` is

    U_s = exp(i phase_s) D(disp_s) S(squeeze_s)

with ``D(x) = exp(x a^dag - x* a)`` and ``S(z) = exp(z/2 (a^2 - a^dag^2))``
for a signed real ``z``.  Segments are composed exactly with

    D(x) D(y) = exp(i Im(x y*)) D(x + y)
    S(z) D(y) S(z)^dag = D(cosh(z) y - sinh(z) y*)
    S(a) S(b) = S(a + b)

All time evolution uses ``U = exp(-i H t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import _stable
from .protocol import ProtocolSpec, SegmentSpec

__all__ = [
    "BRANCHES",
    "FIELD_TERM_SIGN",
    "FORCE_TERM_SIGN",
    "PHASE_SIGN",
    "BranchOperator",
    "BranchState",
    "CompositionResult",
    "UnsupportedComposition",
    "displace_compose",
    "squeeze_adjoint_displace",
    "closed_form_segment",
    "partial_segment",
    "compose",
    "evolve_protocol",
    "apply_to_state_params",
    "phonon_trajectory",
    "max_phonon",
    "wrap_phase",
    "unwrap_phases",
]

BRANCHES = (+1, -1)

# Sign map from the printed single-segment closed form
#     exp(i phi0 sigma_z) D[c (e^{Gt}-1)/G + i eta (1-e^{-Gt})/G] S(.)
# to the exp(-iHt) result.  Checked against the Fock oracle by
# tests/test_calibration.py; flipping any one of them breaks fidelity.
FIELD_TERM_SIGN = -1
FORCE_TERM_SIGN = +1
PHASE_SIGN = -1


class UnsupportedComposition(ValueError):
    """Squeezes off the single fixed axis do not close under composition."""


@dataclass(frozen=True)
class BranchOperator:
    """``exp(i phase) D(disp) S(squeeze)`` for the branches s = +1, -1 (in that order)."""

    phase: tuple[float, float]
    disp: tuple[complex, complex]
    squeeze: tuple[float, float]

    @classmethod
    def identity(cls) -> "BranchOperator":
        return cls((0.0, 0.0), (0j, 0j), (0.0, 0.0))

    def branch(self, s: int) -> tuple[float, complex, float]:
        i = BRANCHES.index(s)
        return self.phase[i], self.disp[i], self.squeeze[i]


@dataclass(frozen=True)
class CompositionResult:
    op: BranchOperator
    signal_phase: float
    residual_entanglement: float

    def is_disentangling(self, tol: float = 1e-10) -> bool:
        return self.residual_entanglement <= tol


@dataclass(frozen=True)
class BranchState:
    """Branch state ``exp(i phase) D(disp) S(squeeze) |base>``."""

    phase: float
    disp: complex
    squeeze: float
    base: str = "vacuum"


def displace_compose(x: complex, y: complex) -> tuple[float, complex]:
    """Return ``(phase, x + y)`` with ``D(x) D(y) = exp(i phase) D(x + y)``."""
    return (complex(x) * complex(y).conjugate()).imag, complex(x) + complex(y)


def squeeze_adjoint_displace(zeta: float, y: complex) -> complex:
    """Argument of ``S(zeta)^dag D(y) S(zeta)``, itself a displacement."""
    y = complex(y)
    return math.cosh(zeta) * y + math.sinh(zeta) * y.conjugate()


def _check_axis(z) -> float:
    if isinstance(z, complex) or np.iscomplexobj(z):
        if complex(z).imag != 0.0:
            raise UnsupportedComposition(
                f"squeeze {z!r} is off the fixed real axis"
            )
        z = complex(z).real
    return float(z)


def partial_segment(seg: SegmentSpec, t: float) -> BranchOperator:
    """Closed-form propagator for the first ``t`` of ``seg``."""
    G = seg.pd_sign * seg.g
    grow = _stable.grow(G, t)
    decay = _stable.decay(G, t)
    excess = _stable.sinh_excess(G, t)
    phases, disps, squeezes = [], [], []
    for s in BRANCHES:
        c = s * seg.sdf_sign * seg.alpha
        disps.append(FORCE_TERM_SIGN * c * grow + FIELD_TERM_SIGN * 1j * seg.eta * decay)
        phases.append(PHASE_SIGN * 2.0 * seg.eta * c * excess)
        squeezes.append(-G * t)
    return BranchOperator(tuple(phases), tuple(disps), tuple(squeezes))


def closed_form_segment(seg: SegmentSpec) -> BranchOperator:
    return partial_segment(seg, seg.duration)


def _compose_pair(later: BranchOperator, earlier: BranchOperator) -> BranchOperator:
    phases, disps, squeezes = [], [], []
    for i in range(2):
        z1 = _check_axis(later.squeeze[i])
        z0 = _check_axis(earlier.squeeze[i])
        # S(z1) D(d0) = D(d0') S(z1)
        moved = squeeze_adjoint_displace(-z1, earlier.disp[i])
        ph, d = displace_compose(later.disp[i], moved)
        phases.append(earlier.phase[i] + later.phase[i] + ph)
        disps.append(d)
        squeezes.append(z0 + z1)
    return BranchOperator(tuple(phases), tuple(disps), tuple(squeezes))


def _result(op: BranchOperator) -> CompositionResult:
    residual = max(abs(op.disp[0] - op.disp[1]), abs(op.squeeze[0] - op.squeeze[1]))
    return CompositionResult(op, 0.5 * (op.phase[0] - op.phase[1]), residual)


def compose(ops: Iterable[BranchOperator]) -> CompositionResult:
    """Product of ``ops`` in application order (first element acts first)."""
    acc = BranchOperator.identity()
    for op in ops:
        acc = _compose_pair(op, acc)
    return _result(acc)


def evolve_protocol(spec: ProtocolSpec) -> CompositionResult:
    return compose(closed_form_segment(s) for s in spec.segments)


def _parse_input(psi_i: str) -> tuple[str, complex]:
    kind, _, arg = psi_i.partition(":")
    kind = kind.strip().lower()
    if kind == "vacuum":
        return "vacuum", 0j
    if kind == "coherent":
        return "coherent", complex(arg.replace(" ", ""))
    if kind == "fock":
        n = int(arg)
        if n < 0:
            raise ValueError("Fock index must be >= 0")
        return f"fock:{n}", 0j
    raise ValueError(f"unknown initial state {psi_i!r}")


def apply_to_state_params(result: CompositionResult | BranchOperator,
                          psi_i: str = "vacuum") -> tuple[BranchState, BranchState]:
    """Branch states produced by ``result`` acting on ``|psi_i>``.

    ``psi_i`` is ``"vacuum"``, ``"coherent:<x>"`` or ``"fock:<N>"``.  A coherent
    input is folded into the displacement so the base is the vacuum again.
    """
    op = result.op if isinstance(result, CompositionResult) else result
    base, x = _parse_input(psi_i)
    out = []
    for phase, d, z in zip(op.phase, op.disp, op.squeeze):
        if base == "coherent":
            ph, d = displace_compose(d, squeeze_adjoint_displace(-z, x))
            out.append(BranchState(phase + ph, d, z, "vacuum"))
        else:
            out.append(BranchState(phase, d, z, base))
    return tuple(out)


def _branch_phonons(state: BranchState) -> float:
    n = int(state.base.partition(":")[2] or 0)
    c, s = math.cosh(state.squeeze), math.sinh(state.squeeze)
    return abs(state.disp) ** 2 + n * c * c + (n + 1) * s * s


def _nbar_at(spec: ProtocolSpec, t: float, psi_i: str) -> float:
    ops = []
    start = 0.0
    for seg in spec.segments:
        if t <= start + seg.duration:
            ops.append(partial_segment(seg, max(t - start, 0.0)))
            break
        ops.append(closed_form_segment(seg))
        start += seg.duration
    states = apply_to_state_params(compose(ops), psi_i)
    return 0.5 * sum(_branch_phonons(b) for b in states)


def phonon_trajectory(spec: ProtocolSpec, samples_per_segment: int = 64,
                      psi_i: str = "vacuum") -> tuple[np.ndarray, np.ndarray]:
    """Spin-averaged mean phonon number at evenly spaced instants (t=0 included)."""
    times = [0.0]
    nbar = [_nbar_at(spec, 0.0, psi_i)]
    acc = BranchOperator.identity()
    start = 0.0
    for seg in spec.segments:
        for j in range(1, samples_per_segment + 1):
            t = seg.duration * j / samples_per_segment
            states = apply_to_state_params(_compose_pair(partial_segment(seg, t), acc), psi_i)
            times.append(start + t)
            nbar.append(0.5 * sum(_branch_phonons(b) for b in states))
        acc = _compose_pair(closed_form_segment(seg), acc)
        start += seg.duration
    return np.array(times), np.array(nbar)


def max_phonon(spec: ProtocolSpec, psi_i: str = "vacuum",
               samples_per_segment: int = 64) -> tuple[float, float]:
    """Maximum of the mean phonon number over the protocol and where it occurs."""
    times, nbar = phonon_trajectory(spec, samples_per_segment, psi_i)
    k = int(np.argmax(nbar))
    lo, hi = times[max(k - 1, 0)], times[min(k + 1, len(times) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: -_nbar_at(spec, t, psi_i), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-10})
        if -res.fun > nbar[k]:
            return float(-res.fun), float(res.x)
    return float(nbar[k]), float(times[k])


def wrap_phase(phase: float) -> float:
    """Map to (-pi, pi]."""
    w = math.remainder(phase, 2 * math.pi)
    return math.pi if w == -math.pi else w


def unwrap_phases(phases: Sequence[float]) -> np.ndarray:
    """Continuous phase curve from wrapped samples (for sweeps in eta)."""
    return np.unwrap(np.asarray(phases, dtype=float))
