"""Closed-form sensitivities, phonon budgets, gains and figure sweeps.

Conventions
-----------
* ``r = g T / 2`` for the single-squeeze protocol and ``r_m = g T / 8`` for
  the eight-segment protocol.
* Displacement sensitivity ``delta_beta = delta_eta * T``.
* SQL ``1/sqrt(n_bar)``, HL ``1/n_bar``, gain ``10 log10(SQL / delta_beta)``
  and HL-scaling exponent ``k = -ln(delta_beta) / ln(n_bar)`` (SQL -> 0.5,
  HL -> 1).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy.optimize import brentq

from ._stable import decay, exp_excess, grow, sinhc

__all__ = [
    "SensitivityReport",
    "sens_single",
    "sens_entanglement_only",
    "sens_squeeze_only",
    "amp_factors",
    "nbar_single",
    "msp_phase",
    "msp_sens",
    "msp_nbar",
    "msp_T_for_nbar",
    "gains_db",
    "hl_scaling",
    "successive_bound_gain",
    "qfi_closed",
    "report",
    "sweep",
]


def sens_single(alpha: float, g: float, T: float) -> float:
    """``r^2 / (alpha T^2 (e^r - 1 - r))`` with ``r = gT/2``."""
    if alpha == 0:
        raise ValueError("alpha = 0: no entangling force, use sens_squeeze_only")
    if alpha < 0 or g < 0 or T <= 0:
        raise ValueError("need alpha > 0, g >= 0, T > 0")
    return 1.0 / (4.0 * alpha * exp_excess(g, T / 2))


def sens_entanglement_only(alpha: float, T: float) -> float:
    return 2.0 / (alpha * T * T)


def sens_squeeze_only(g: float, T: float) -> float:
    """``g / (e^r - 1)``; tends to ``2/T`` without squeezing."""
    return 1.0 / grow(g, T / 2)


def amp_factors(alpha: float, g: float, T: float) -> tuple[float, float]:
    """Gains over squeezing alone and entanglement alone, ``(G_s, G_e)``.

    ``G_s = 2 alpha (e^r - 1 - r) / (g (e^r - 1))`` falls below one once
    ``g`` exceeds about ``2 alpha``; that regime is returned as is.
    """
    h = T / 2
    excess = exp_excess(g, h)
    return 2.0 * alpha * excess / grow(g, h), 2.0 * excess / (h * h)


def nbar_single(eta: float, alpha: float, g: float, T: float) -> float:
    """Peak mean phonon number of the single-squeeze protocol (reached at T/2)."""
    h = T / 2
    return (eta * decay(g, h)) ** 2 + (alpha * grow(g, h)) ** 2 + math.sinh(g * h) ** 2


def msp_phase(eta: float, alpha: float, g: float, T: float) -> float:
    """Signal phase ``(eta alpha T^2 / 2) sinh^2(r_m) / r_m^2``."""
    return 0.5 * eta * alpha * T * T * sinhc(g * T / 8) ** 2


def msp_sens(alpha: float, g: float, T: float) -> float:
    """``1 / (d phase / d eta)`` for the eight-segment protocol."""
    return 2.0 / (alpha * T * T * sinhc(g * T / 8) ** 2)


def msp_nbar(eta: float, alpha: float, g: float, T: float, field_term: bool = False) -> float:
    """Closed-form phonon budget ``max((alpha T/2)^2 sinhc^2 r_m, sinh^2 r_m)``.

    With ``field_term`` the field displacement ``(eta T/2)^2 sinhc^2 r_m`` is
    added; it is negligible when ``eta << alpha``.

    Note: this is the budget evaluated at the half-way point.  The exact
    Gaussian trajectory (:func:`squeezamp.engine.max_phonon`) peaks higher,
    one segment earlier, because the third segment anti-squeezes the force
    displacement built up by the first two.
    """
    rm = g * T / 8
    s = sinhc(rm)
    n = max((alpha * T / 2 * s) ** 2, math.sinh(rm) ** 2)
    if field_term:
        n += (eta * T / 2 * s) ** 2
    return n


def msp_T_for_nbar(alpha: float, g: float, nbar: float) -> float:
    """Total time at which :func:`msp_nbar` (no field term) equals ``nbar``."""
    if nbar <= 0:
        raise ValueError("nbar must be positive")
    f = lambda T: msp_nbar(0.0, alpha, g, T) - nbar
    hi = 1.0
    while f(hi) < 0:
        hi *= 2
    return brentq(f, 0.0, hi, xtol=1e-14, rtol=1e-15)


def gains_db(alpha: float, g: float, T: float) -> float:
    """Gain over the SQL of the eight-segment protocol, in dB."""
    rm = g * T / 8
    if g <= 4 * alpha:
        return 10 * math.log10(sinhc(rm))
    return 10 * math.log10(4 * alpha / g * sinhc(rm))


def hl_scaling(delta_beta: float, n_bar: float) -> float:
    if n_bar <= 1:
        raise ValueError("k undefined for n_bar <= 1")
    return -math.log(delta_beta) / math.log(n_bar)


def successive_bound_gain(n_bar: float) -> float:
    """Best gain reachable by successive entangle/squeeze/sense steps, in dB."""
    return 10 * math.log10(4 + 2 * math.sqrt(2) / math.sqrt(n_bar))


def qfi_closed(kind: str, param: float) -> float:
    """Fisher information for generator ``i(a^dag - a)``.

    ``kind`` is ``"fock"`` (param N), ``"squeezed"`` (param r) or ``"bound"``
    (param n_bar, the ceiling over all pure states).
    """
    if kind == "fock":
        return 8 * param + 4
    if kind == "squeezed":
        return 4 * math.exp(2 * param)
    if kind == "bound":
        return 16 * param + 8
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class SensitivityReport:
    protocol: str
    alpha: float
    eta: float
    g: float
    T: float
    delta_eta: float
    delta_beta: float
    n_bar: float
    sql: float
    hl: float
    gain_db: float
    k: float
    flags: tuple[str, ...] = ()

    FIELDS = ("protocol", "alpha", "eta", "g", "T", "delta_eta", "delta_beta",
              "n_bar", "sql", "hl", "gain_db", "k", "flags")

    @property
    def sql_ratio(self) -> float:
        """``delta_beta * sqrt(n_bar)``; below one means sub-SQL."""
        return self.delta_beta * math.sqrt(self.n_bar)


def report(kind: str, alpha: float, eta: float, g: float, T: float) -> SensitivityReport:
    """One sweep row; problems become flags instead of exceptions."""
    nan = float("nan")
    flags = []
    try:
        if T <= 0 or alpha < 0 or g < 0:
            raise ValueError("need T > 0, alpha >= 0, g >= 0")
        if kind == "single":
            if alpha == 0:
                flags.append("squeeze_only")
                d_eta = sens_squeeze_only(g, T)
            else:
                d_eta = sens_single(alpha, g, T)
            n = nbar_single(eta, alpha, g, T)
        elif kind == "msp":
            if alpha == 0:
                raise ValueError("alpha = 0 gives no signal")
            d_eta = msp_sens(alpha, g, T)
            n = msp_nbar(eta, alpha, g, T)
        else:
            raise ValueError(f"unknown protocol {kind!r}")
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        return SensitivityReport(kind, alpha, eta, g, T, nan, nan, nan, nan, nan, nan, nan,
                                 (f"error: {exc}",))
    d_beta = d_eta * T
    if n > 0:
        sql, hl = 1 / math.sqrt(n), 1 / n
        gain = 10 * math.log10(sql / d_beta)
    else:
        sql = hl = gain = nan
        flags.append("zero_phonons")
    if n > 1:
        k = hl_scaling(d_beta, n)
    else:
        k = nan
        flags.append("k_undefined")
    if n > 0 and d_beta < sql:
        flags.append("sub_sql")
    return SensitivityReport(kind, alpha, eta, g, T, d_eta, d_beta, n, sql, hl, gain, k, tuple(flags))


def _workers(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get("SQUEEZAMP_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def sweep(protocol_kind: str, alpha: float, eta: float, g_list: Sequence[float],
          T_list: Sequence[float], workers: Optional[int] = None) -> list[SensitivityReport]:
    """Reports over the ``g_list x T_list`` grid, g-major, in grid order."""
    if not len(g_list) or not len(T_list):
        raise ValueError("g_list and T_list must be non-empty")
    points = [(g, T) for g in g_list for T in T_list]
    n = _workers(workers)
    run = lambda p: report(protocol_kind, alpha, eta, float(p[0]), float(p[1]))
    if n == 1:
        return [run(p) for p in points]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(run, points))
