"""Protocol segments and the two named sensing sequences.

Units: hbar = 1 and the zero-point length z0 = 1, so the field coupling
``eta``, the spin-dependent force ``alpha`` and the parametric drive ``g``
are angular frequencies and every observable depends only on the products
``eta * t``, ``alpha * t`` and ``g * t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

__all__ = [
    "SegmentSpec",
    "ProtocolSpec",
    "MSP_SIGN_TABLE",
    "make_single_squeeze",
    "make_msp",
    "make_protocol",
    "validate_protocol",
    "with_eta",
]


@dataclass(frozen=True)
class SegmentSpec:
    """One constant-Hamiltonian interval.

    In spin branch ``s`` (the sigma_z eigenvalue) the oscillator sees

        H_s = eta (a + a^dag) + s * sdf_sign * i alpha (a^dag - a)
              + pd_sign * (i g / 2) (a^dag^2 - a^2)

    for ``duration``.  ``field_provenance`` optionally records the
    ``(E, q, z0)`` triple whose product is ``eta``.
    """

    eta: float
    sdf_sign: int
    alpha: float
    pd_sign: int
    g: float
    duration: float
    field_provenance: Optional[tuple[float, float, float]] = None

    @property
    def is_free(self) -> bool:
        return self.sdf_sign == 0 and self.pd_sign == 0

    def reversed_signs(self) -> "SegmentSpec":
        """Same segment with both drive signs and the field flipped."""
        return replace(self, eta=-self.eta, sdf_sign=-self.sdf_sign, pd_sign=-self.pd_sign)


@dataclass(frozen=True)
class ProtocolSpec:
    segments: tuple[SegmentSpec, ...]
    name: str = "custom"
    total_T: float = field(default=float("nan"))

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if math.isnan(self.total_T):
            object.__setattr__(
                self, "total_T", math.fsum(s.duration for s in self.segments)
            )

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    @property
    def boundaries(self) -> list[float]:
        """Cumulative segment end times, starting with 0."""
        out = [0.0]
        for seg in self.segments:
            out.append(out[-1] + seg.duration)
        return out

    def params(self) -> dict:
        """Representative (eta, alpha, g) of the first driven segment."""
        driven = [s for s in self.segments if not s.is_free] or list(self.segments)
        s = driven[0]
        return {"eta": s.eta, "alpha": s.alpha, "g": s.g}


# Rows are (sdf_sign, pd_sign) in time order.  Fixed by composing all 256
# drive patterns (force flipped at T/2) and checking against the Fock
# oracle: two patterns disentangle the spin, return the squeeze to zero and
# accumulate phase (eta alpha T^2 / 2) sinh^2(r_m) / r_m^2.  This one repeats
# the (-, +, +, -) half-pattern; the other is its mirror image.
MSP_SIGN_TABLE: tuple[tuple[int, int], ...] = (
    (+1, -1),
    (+1, +1),
    (+1, +1),
    (+1, -1),
    (-1, -1),
    (-1, +1),
    (-1, +1),
    (-1, -1),
)


def _check_drive(alpha: float, g: float) -> None:
    if alpha < 0 or g < 0:
        raise ValueError("alpha and g must be non-negative")


def _driven(eta, sdf, alpha, pd, g, duration) -> SegmentSpec:
    # a zero-strength term is absent, so its sign is 0
    return SegmentSpec(eta, sdf if alpha else 0, alpha, pd if g else 0, g, duration)


def make_single_squeeze(eta: float, alpha: float, g: float, tau: float, T: float) -> ProtocolSpec:
    """Force+drive for ``tau``, free evolution, then the reversed pair for ``tau``.

    The free segment is dropped when ``T == 2 * tau``.
    """
    if tau <= 0 or T <= 0:
        raise ValueError("tau and T must be positive")
    if 2 * tau > T:
        raise ValueError("pulse duration exceeds total time: 2*tau > T")
    _check_drive(alpha, g)
    segs = [_driven(eta, +1, alpha, +1, g, tau)]
    free = T - 2 * tau
    if free > 0:
        segs.append(SegmentSpec(eta, 0, 0.0, 0, 0.0, free))
    segs.append(_driven(eta, -1, alpha, -1, g, tau))
    return ProtocolSpec(tuple(segs), name="single", total_T=T)


def make_msp(eta: float, alpha: float, g: float, tau: float,
             sign_table: Sequence[tuple[int, int]] = MSP_SIGN_TABLE) -> ProtocolSpec:
    """Eight alternating squeeze/anti-squeeze segments of length ``tau``."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    _check_drive(alpha, g)
    segs = tuple(_driven(eta, sdf, alpha, pd, g, tau) for sdf, pd in sign_table)
    return ProtocolSpec(segs, name="msp")


def make_protocol(kind: str, eta: float, alpha: float, g: float, T: float,
                  tau: Optional[float] = None) -> ProtocolSpec:
    """Named protocol at total time ``T`` (``tau`` defaults to T/2 or T/8)."""
    if kind == "single":
        return make_single_squeeze(eta, alpha, g, T / 2 if tau is None else tau, T)
    if kind == "msp":
        return make_msp(eta, alpha, g, T / 8 if tau is None else tau)
    raise ValueError(f"unknown protocol kind {kind!r}")


def with_eta(spec: ProtocolSpec, eta: float) -> ProtocolSpec:
    """Copy of ``spec`` with every segment's field coupling set to ``eta``."""
    segs = tuple(replace(s, eta=eta, field_provenance=None) for s in spec.segments)
    return ProtocolSpec(segs, name=spec.name, total_T=spec.total_T)


def validate_protocol(spec: ProtocolSpec) -> list[str]:
    """Return the list of violated invariants; empty means well formed."""
    problems = []
    if len(spec.segments) == 0:
        problems.append("protocol has no segments")
    for i, s in enumerate(spec.segments):
        if not s.duration > 0:
            problems.append(f"segment {i}: duration must be > 0")
        if s.alpha < 0:
            problems.append(f"segment {i}: alpha must be >= 0")
        if s.g < 0:
            problems.append(f"segment {i}: g must be >= 0")
        if s.sdf_sign not in (-1, 0, 1):
            problems.append(f"segment {i}: sdf_sign must be -1, 0 or +1")
        if s.pd_sign not in (-1, 0, 1):
            problems.append(f"segment {i}: pd_sign must be -1, 0 or +1")
        if (s.sdf_sign == 0) != (s.alpha == 0):
            problems.append(f"segment {i}: sdf_sign is 0 iff alpha is 0")
        if (s.pd_sign == 0) != (s.g == 0):
            problems.append(f"segment {i}: pd_sign is 0 iff g is 0")
        if s.field_provenance is not None:
            E, q, z0 = s.field_provenance
            if abs(s.eta - E * q * z0) > 1e-12 * abs(s.eta):
                problems.append(f"segment {i}: eta differs from E*q*z0")
    total = math.fsum(s.duration for s in spec.segments)
    if not math.isclose(spec.total_T, total, rel_tol=1e-12, abs_tol=1e-15):
        problems.append("total_T inconsistent")
    return problems
