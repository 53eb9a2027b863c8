"""
Command-line front end: ``pdu-forge {design,generate,simulate}``.

Exit codes: 0 success, 2 input error (bad flags, config, netlist, existing
output without ``--force``), 3 simulation error.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import device
from .analysis import extract_logical, fidelity, photon_number_distribution, target_cluster4, target_ghz
from .circuit import (
    CALIBRATED_CLUSTER4_PHASES,
    DEFAULT_MAX_STAGES,
    PUBLISHED_CLUSTER4_PHASES,
    build_cluster4,
    build_fock_chain,
    build_ghz,
    format_netlist,
    one_photon_per_pair,
    parse_netlist,
    residuals_vacuum,
    simulate,
)
from .errors import ConfigError, InvalidNetlist, NetlistSyntaxError, PduForgeError
from .optics import PduParams

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SIMULATION = 3


class InputError(Exception):
    """Reported to the user with exit code 2."""


@dataclass
class RunManifest:
    subcommand: str
    inputs: list[Path] = field(default_factory=list)
    config: str | None = None
    outputs: list[Path] = field(default_factory=list)
    postselect: bool = False
    force: bool = False
    # every command is deterministic: no seeds, clocks or randomness

    def check(self) -> None:
        for path in self.inputs:
            if not path.exists():
                raise InputError(f"input file not found: {path}")
        for path in self.outputs:
            if path.exists() and not self.force:
                raise InputError(f"refusing to overwrite {path} (use --force)")


_ANGLE = re.compile(r"^([-+]?\d*\.?\d*)\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$")


def parse_angle(text: str) -> float:
    """Float, or a multiple of pi such as ``pi/2``, ``3pi/2``, ``-pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text.strip().lower())
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    coeff = m.group(1)
    factor = 1.0 if coeff in ("", "+") else -1.0 if coeff == "-" else float(coeff)
    denom = float(m.group(2)) if m.group(2) else 1.0
    return factor * math.pi / denom


def parse_encoding(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for item in text.replace(";", " ").split():
        a, sep, b = item.partition(",")
        if not sep:
            raise InputError(f"encoding pair {item!r} must look like '<rail0>,<rail1>'")
        try:
            pairs.append((int(a), int(b)))
        except ValueError:
            raise InputError(f"encoding pair {item!r} is not integer") from None
    if not pairs:
        raise InputError("empty encoding")
    return tuple(pairs)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# -- design -------------------------------------------------------------------


def _load_config(spec: str) -> tuple[str, device.DeviceConfig]:
    if spec in device.BUILTIN_CONFIGS:
        return spec, device.parse_config(device.builtin_config_text(spec))
    path = Path(spec)
    if not path.exists():
        raise InputError(f"config not found: {spec} (built-ins: {', '.join(device.BUILTIN_CONFIGS)})")
    return str(path), device.load_config(path)


def _fmt(value: float, raw: bool) -> str:
    return repr(float(value)) if raw else format(value, ".3g")


def format_summary(name: str, config: device.DeviceConfig, raw: bool = False) -> str:
    s = device.design_summary(config)
    f = lambda v: _fmt(v, raw)  # noqa: E731
    lines = [
        f"config: {name}",
        f"xi: {f(s['xi_rad_per_s'])} rad/s",
        f"Q_SLM: {f(s['q_slm_min'])}",
        f"Q_DPDC: {f(s['q_required_dpdc'])}",
        f"t1: {f(s['t1_at_q_required_s'])} s",
        f"kappa_SFG1_formula: {f(s['kappa_sfg1_formula'])} W^-1 m^-2",
        f"kappa_SFG2_formula: {f(s['kappa_sfg2_formula'])} W^-1 m^-2",
    ]
    if "kappa_calibration" in s:
        lines.append(f"kappa_calibration: {f(s['kappa_calibration'])} W^-1 m^-2")
    lines += [
        f"P_DPUC: {f(s['p_required_dpuc_w'])} W (l = {f(config.waveguide_length)} m)",
        f"P_DPUC_SFG2: {f(s['p_required_dpuc_sfg2_w'])} W",
    ]
    return "\n".join(lines) + "\n"


def _grid(lo: float, hi: float, points: int, log: bool) -> np.ndarray:
    if points < 1:
        raise InputError("--points must be >= 1")
    if not 0 < lo <= hi or (points > 1 and lo == hi):
        raise InputError(f"range must satisfy 0 < min < max, got [{lo}, {hi}]")
    return np.geomspace(lo, hi, points) if log else np.linspace(lo, hi, points)


def cmd_design(args) -> int:
    outputs = [Path(args.out)] if args.out else []
    RunManifest("design", config=args.config, outputs=outputs, force=args.force).check()
    name, config = _load_config(args.config)

    table = None
    if args.sweep == "eta_pdc":
        table = device.sweep_eta_pdc(config, _grid(args.qmin, args.qmax, args.points, args.log))
    elif args.sweep == "q_vs_radius":
        table = device.sweep_q_required_vs_radius(config, _grid(args.rmin, args.rmax, args.points, args.log))
    elif args.sweep == "eta_puc":
        calibrated = config.calib_power is not None and config.calib_length is not None
        if args.kappa_source == "calibration" and calibrated:
            k = device.kappa_from_calibration(config.calib_power, config.calib_length)
        else:
            k = device.kappa(config, args.which)
        table = device.sweep_eta_puc(
            k,
            _grid(args.pmin, args.pmax, args.points, args.log),
            _grid(args.lmin, args.lmax, args.lpoints, args.log),
        )

    summary = format_summary(name, config, args.raw) if (args.summary or table is None) else None
    if table is not None:
        _emit(table.to_csv(), Path(args.out) if args.out else None)
        if summary is not None:
            (sys.stdout if args.out else sys.stderr).write(summary)
    else:
        sys.stdout.write(summary)
    return EXIT_OK


# -- generate -----------------------------------------------------------------


def cmd_generate(args) -> int:
    outputs = [Path(args.out)] if args.out else []
    RunManifest("generate", outputs=outputs, force=args.force).check()
    try:
        params = PduParams(args.eta_pdc, args.eta_puc_s, args.eta_puc_i)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    try:
        if args.family == "fock":
            netlist = build_fock_chain(args.stages, params, max_stages=args.max_stages)
        elif args.family == "ghz":
            netlist = build_ghz(args.stages, args.phi, params, max_stages=args.max_stages)
        else:
            if args.phases is not None:
                phases = tuple(args.phases)
            elif args.published_phases:
                phases = PUBLISHED_CLUSTER4_PHASES
            else:
                phases = CALIBRATED_CLUSTER4_PHASES
            netlist = build_cluster4(phases, params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(format_netlist(netlist), Path(args.out) if args.out else None)
    return EXIT_OK


# -- simulate -----------------------------------------------------------------


def _parse_target(text: str):
    if text == "cluster4":
        return target_cluster4()
    parts = text.split(":")
    if len(parts) == 3 and parts[0] == "ghz":
        try:
            n = int(parts[1])
            return target_ghz(n, parse_angle(parts[2]))
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise InputError(f"bad target {text!r}: {exc}") from None
    raise InputError(f"target must be 'cluster4' or 'ghz:<N>:<phi>', got {text!r}")


def _format_distribution(dist: dict[int, float]) -> str:
    return "{" + ", ".join(f"{n}: {round(p, 12)!r}" for n, p in dist.items()) + "}"


def cmd_simulate(args) -> int:
    netlist_path = Path(args.netlist)
    outputs = [Path(args.terms_csv)] if args.terms_csv else []
    RunManifest("simulate", inputs=[netlist_path], outputs=outputs, postselect=args.postselect, force=args.force).check()
    text = netlist_path.read_text()
    netlist = parse_netlist(text)

    encoding = parse_encoding(args.encoding) if args.encoding else netlist.encoding
    target = _parse_target(args.target) if args.target else None
    if target is not None:
        if encoding is None:
            raise InputError("--target needs an encoding (--encoding or '# encoding:' in the netlist)")
        if len(encoding) != target.n_qubits:
            raise InputError(f"target has {target.n_qubits} qubits, encoding has {len(encoding)}")

    predicate = None
    if args.postselect:
        converted = residuals_vacuum(netlist)
        if encoding is not None:
            logical = one_photon_per_pair(encoding)
            predicate = lambda occ: converted(occ) and logical(occ)  # noqa: E731
        else:
            predicate = converted

    source_lines = text.splitlines()
    try:
        report = simulate(netlist, postselect=predicate, n_max=args.nmax)
    except InvalidNetlist as exc:
        raise InputError(f"invalid netlist: {exc}") from None
    except PduForgeError as exc:
        k = getattr(exc, "component_index", None)
        where = ""
        if k is not None:
            comp = netlist.components[k]
            where = f" at component {k} ({comp.kind}"
            if netlist.line_numbers is not None:
                line_no = netlist.line_numbers[k]
                where += f", line {line_no}: {source_lines[line_no - 1].strip()}"
            where += ")"
        sys.stderr.write(f"error: {type(exc).__name__}{where}: {exc}\n")
        return EXIT_SIMULATION

    final = report.final_state
    readout = report.postselected_state if report.postselected_state is not None else final
    lines = [
        f"netlist: {netlist.name}",
        f"modes: {final.n_modes}",
        f"components: {len(netlist.components)}",
        f"terms: {len(final)}",
        f"success_probability: {report.success_probability:.6f}",
    ]
    if encoding is not None:
        lines.append(f"leakage: {extract_logical(final, encoding).leakage:.6f}")
        if target is not None:
            lines.append(f"fidelity: {fidelity(extract_logical(readout, encoding), target):.6f}")
    lines.append(f"photons: {_format_distribution(photon_number_distribution(final))}")
    sys.stdout.write("\n".join(lines) + "\n")

    if args.terms_csv:
        with open(args.terms_csv, "w", newline="") as fp:
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow(["occupation", "re", "im", "probability"])
            for occ, amp in sorted(final.items()):
                writer.writerow([" ".join(map(str, occ)), repr(amp.real), repr(amp.imag), repr(abs(amp) ** 2)])
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdu-forge", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="device requirements and efficiency sweeps")
    d.add_argument("--config", default="calibration", help="config path or built-in name (calibration, first_principles)")
    d.add_argument("--summary", action="store_true", help="print the requirement summary")
    d.add_argument("--raw", action="store_true", help="full precision instead of 3 significant figures")
    d.add_argument("--sweep", choices=["eta_pdc", "q_vs_radius", "eta_puc"])
    d.add_argument("--points", type=int, default=200)
    d.add_argument("--log", action="store_true", help="logarithmic spacing")
    d.add_argument("--qmin", type=float, default=1e5)
    d.add_argument("--qmax", type=float, default=2e8)
    d.add_argument("--rmin", type=float, default=10e-6)
    d.add_argument("--rmax", type=float, default=100e-6)
    d.add_argument("--pmin", type=float, default=1e-4)
    d.add_argument("--pmax", type=float, default=50e-3)
    d.add_argument("--lmin", type=float, default=1e-4)
    d.add_argument("--lmax", type=float, default=3e-2)
    d.add_argument("--lpoints", type=int, default=200)
    d.add_argument("--which", choices=["SFG1", "SFG2"], default="SFG1")
    d.add_argument("--kappa-source", choices=["calibration", "formula"], default="calibration")
    d.add_argument("-o", "--out")
    d.add_argument("--force", action="store_true")
    d.set_defaults(func=cmd_design)

    g = sub.add_parser("generate", help="write a netlist for a built-in circuit family")
    g.add_argument("family", choices=["fock", "ghz", "cluster4"])
    g.add_argument("--stages", type=int, default=1)
    g.add_argument("--max-stages", type=int, default=DEFAULT_MAX_STAGES)
    g.add_argument("--phi", type=parse_angle, default=0.0)
    g.add_argument("--phases", type=parse_angle, nargs=4, metavar="PHI")
    g.add_argument("--published-phases", action="store_true", help="use the published cluster phases unchanged")
    g.add_argument("--eta-pdc", type=float, default=1.0)
    g.add_argument("--eta-puc-s", type=float, default=1.0)
    g.add_argument("--eta-puc-i", type=float, default=1.0)
    g.add_argument("-o", "--out")
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("simulate", help="simulate a netlist file")
    s.add_argument("netlist")
    s.add_argument("--postselect", action="store_true", help="condition on full conversion (and one photon per rail pair)")
    s.add_argument("--encoding", help="rail pairs, e.g. '3,5 4,6'")
    s.add_argument("--target", help="'cluster4' or 'ghz:<N>:<phi>'")
    s.add_argument("--terms-csv", help="write basis terms to this CSV")
    s.add_argument("--nmax", type=int, default=None, help="occupation cap (default: $PDU_FORGE_NMAX or 4)")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ConfigError, NetlistSyntaxError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
