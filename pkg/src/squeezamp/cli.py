"""Command-line entry point: ``squeezamp {simulate,sweep,validate,qfi}``.

Exit codes: 0 ok, 1 validation failure, 2 config error, 3 truncation too
small, 4 engine/oracle mismatch.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import engine, metrology, oracle, validation
from .protocol import (MSP_SIGN_TABLE, ProtocolSpec, SegmentSpec, make_msp, make_protocol,
                       validate_protocol)

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_TRUNCATION, EXIT_MISMATCH = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    protocol: str = "single"
    alpha: float = 1.0
    eta: float = 0.01
    g: float = 0.5
    tau: Optional[float] = None
    T: float = 4.0
    dim: int = 0
    trotter_steps: int = 0
    output_path: Optional[str] = None
    format: str = "csv"
    g_list: list = field(default_factory=list)
    T_list: list = field(default_factory=list)
    segments_file: Optional[str] = None
    psi_i: str = "vacuum"
    sign_table: tuple = MSP_SIGN_TABLE


_FLOAT_KEYS = {"alpha", "eta", "g", "T"}
_INT_KEYS = {"dim", "trotter_steps"}
_KEYS = _FLOAT_KEYS | _INT_KEYS | {"protocol", "tau", "output_path", "format", "g_list",
                                   "T_list", "segments_file", "psi_i", "sign_table"}


def _parse_list(text: str, key: str) -> list:
    items = [t for t in text.replace(",", " ").split()]
    try:
        values = [float(t) for t in items]
    except ValueError:
        raise ConfigError(f"{key}: malformed number list {text!r}") from None
    if not values:
        raise ConfigError(f"{key}: empty list")
    return values


def _parse_sign_table(text: str) -> tuple:
    """``+-,++,++,+-,--,-+,-+,--`` -> ((+1,-1), ...), pairs are (sdf, pd)."""
    pairs = [p.strip() for p in text.split(",")]
    sign = {"+": 1, "-": -1}
    if len(pairs) != 8 or any(len(p) != 2 or set(p) - set("+-") for p in pairs):
        raise ConfigError(f"sign_table: expected 8 comma-separated pairs like '+-', got {text!r}")
    return tuple((sign[p[0]], sign[p[1]]) for p in pairs)


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                setattr(cfg, key, float(value))
            elif key in _INT_KEYS:
                setattr(cfg, key, int(value))
            elif key == "tau":
                cfg.tau = None if value.lower() in ("", "auto") else float(value)
            elif key in ("g_list", "T_list"):
                setattr(cfg, key, _parse_list(value, key))
            elif key == "sign_table":
                cfg.sign_table = _parse_sign_table(value)
            else:
                setattr(cfg, key, value)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    if cfg.protocol not in ("single", "msp", "custom-file"):
        raise ConfigError(f"protocol must be single, msp or custom-file, not {cfg.protocol!r}")
    if cfg.format not in ("csv", "tsv"):
        raise ConfigError(f"format must be csv or tsv, not {cfg.format!r}")
    if cfg.dim < 0 or cfg.trotter_steps < 0:
        raise ConfigError("dim and trotter_steps must be >= 0 (0 = auto)")
    return cfg


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)


def read_segments(path: str) -> ProtocolSpec:
    """One segment per line: ``duration eta sdf_sign alpha pd_sign g``."""
    segs = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read segments file: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 6:
            raise ConfigError(f"segments line {lineno}: expected 6 fields")
        try:
            dur, eta, sdf, alpha, pd, g = line
            segs.append(SegmentSpec(float(eta), int(sdf), float(alpha), int(pd), float(g), float(dur)))
        except ValueError:
            raise ConfigError(f"segments line {lineno}: malformed field") from None
    return ProtocolSpec(tuple(segs), name="custom")


def build_protocol(cfg: RunConfig) -> ProtocolSpec:
    if cfg.protocol == "custom-file":
        if not cfg.segments_file:
            raise ConfigError("protocol=custom-file needs segments_file")
        spec = read_segments(cfg.segments_file)
    else:
        try:
            if cfg.protocol == "msp":
                tau = cfg.tau if cfg.tau is not None else cfg.T / 8
                spec = make_msp(cfg.eta, cfg.alpha, cfg.g, tau, cfg.sign_table)
            else:
                spec = make_protocol(cfg.protocol, cfg.eta, cfg.alpha, cfg.g, cfg.T, cfg.tau)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    problems = validate_protocol(spec)
    if problems:
        raise ConfigError("; ".join(problems))
    return spec


def fmt_number(x) -> str:
    """Shortest round-trip text, capped at 9 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return repr(float(f"{x:.9g}"))


def _row(rep: metrology.SensitivityReport, sep: str) -> str:
    cells = []
    for name in metrology.SensitivityReport.FIELDS:
        v = getattr(rep, name)
        if name == "protocol":
            cells.append(v)
        elif name == "flags":
            cells.append(";".join(v))
        else:
            cells.append(fmt_number(v))
    return sep.join(cells)


def format_sweep(rows: Sequence[metrology.SensitivityReport], fmt: str = "csv") -> str:
    sep = "," if fmt == "csv" else "\t"
    lines = [sep.join(metrology.SensitivityReport.FIELDS)]
    lines += [_row(r, sep) for r in rows]
    return "\n".join(lines) + "\n"


def _prediction(spec: ProtocolSpec) -> Optional[float]:
    p = spec.params()
    if spec.name == "single":
        return metrology.nbar_single(p["eta"], p["alpha"], p["g"], spec.total_T)
    if spec.name == "msp":
        return metrology.msp_nbar(p["eta"], p["alpha"], p["g"], spec.total_T)
    return None


def cmd_simulate(cfg: RunConfig, out=print) -> int:
    spec = build_protocol(cfg)
    result = engine.evolve_protocol(spec)
    try:
        dim = cfg.dim or oracle.required_dim(spec, cfg.psi_i)
        ocfg = oracle.OracleConfig(dim, trotter_steps=cfg.trotter_steps or 4096)
        final = oracle.run_protocol(spec, ocfg, cfg.psi_i)
    except oracle.TruncationError as exc:
        out(str(exc))
        return EXIT_TRUNCATION
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    predicted = oracle.predicted_state(result, dim, cfg.psi_i)
    fid = oracle.fidelity(final, predicted)
    phi = result.signal_phase
    out(f"protocol            {spec.name} ({len(spec)} segments, T={fmt_number(spec.total_T)})")
    out(f"dim                 {dim}")
    out(f"signal_phase        {abs(phi):.7f}")
    out(f"residual            {result.residual_entanglement:.3e}")
    out(f"P_down engine       {oracle.spin_down_population(predicted):.7f}")
    out(f"P_down oracle       {oracle.spin_down_population(final):.7f}")
    out(f"fidelity            {fid:.12f}")
    if cfg.trotter_steps:
        state = oracle.initial_state(dim, cfg.psi_i)
        for seg in spec.segments:
            state = oracle.evolve_trotter(state, seg, cfg.trotter_steps, ocfg)
        out(f"trotter fidelity    {oracle.fidelity(state, final):.12f} (n={cfg.trotter_steps})")
    n_max, t_max = engine.max_phonon(spec, cfg.psi_i)
    pred = _prediction(spec)
    pred_txt = "n/a" if pred is None else f"{pred:.4f}"
    out(f"max phonon          {n_max:.4f} at t={t_max:.4f} (closed-form budget {pred_txt})")
    if fid < 1 - ocfg.fidelity_tol:
        out("engine/oracle mismatch")
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out_path: Optional[str] = None, out=print) -> int:
    if not cfg.g_list or not cfg.T_list:
        raise ConfigError("sweep needs non-empty g_list and T_list")
    if cfg.protocol not in ("single", "msp"):
        raise ConfigError("sweep supports protocol=single or msp")
    rows = metrology.sweep(cfg.protocol, cfg.alpha, cfg.eta, cfg.g_list, cfg.T_list)
    text = format_sweep(rows, cfg.format)
    path = out_path or cfg.output_path
    if path:
        Path(path).write_text(text)
        out(f"wrote {len(rows)} rows to {path}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, out=print) -> int:
    base = cfg.trotter_steps or 256
    results = validation.run_all(cfg.sign_table, base, echo=out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def cmd_qfi(cfg: RunConfig, out=print) -> int:
    dim = cfg.dim or 160
    out("state           closed          oracle")
    for N in (0, 1, 2, 5, 10):
        v = np.zeros(dim, complex)
        v[N] = 1
        out(f"fock N={N:<7d} {metrology.qfi_closed('fock', N):<15.9g} {oracle.qfi_pure(v):.9g}")
    for r in (0.25, 0.5, 1.0):
        v = oracle.displaced_squeezed_amplitudes(0j, r, dim)
        out(f"squeezed r={r:<4g} {metrology.qfi_closed('squeezed', r):<15.9g} {oracle.qfi_pure(v):.9g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="squeezamp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=("simulate", "sweep", "validate", "qfi"))
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", help="output file (sweep)")
    p.add_argument("--format", choices=("csv", "tsv"))
    p.add_argument("--dim", type=int, help="Fock cutoff, 0 = auto")
    p.add_argument("--trotter", type=int, help="Trotter step count")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.format:
            cfg = replace(cfg, format=args.format)
        if args.dim is not None:
            cfg = replace(cfg, dim=args.dim)
        if args.trotter is not None:
            cfg = replace(cfg, trotter_steps=args.trotter)
        if cfg.dim < 0 or cfg.trotter_steps < 0:
            raise ConfigError("dim and trotter must be >= 0")
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out)
        if args.command == "validate":
            return cmd_validate(cfg)
        return cmd_qfi(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
