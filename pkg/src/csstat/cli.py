"""Command-line front end: inspect codes, sweep quantities, export models.

Exit codes: 0 success, 1 computational bound exceeded, 2 input error,
3 internal invariant violation. Every CSV artifact starts with `#` provenance
lines (tool version, command, code hash, parameters); JSON artifacts carry
the same data in a "provenance" object. Infinity is always emitted as the
literal string "inf", never a floating special.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import __version__
from . import info, mc, statmech
from .channels import (
    InternalInvariantError,
    PauliNoise,
    depolarizing_from_independent,
    marginalize,
    sector_distribution_joint,
    sector_distribution_x,
    sector_distribution_z,
)
from .css import CodeFormatError, CommutationViolation, CssCode, TooLarge
from .css import code_hash, distance
from .css import representative_x, representative_z
from .gf2 import BitVector
from .zoo import from_selector

EXIT_OK = 0
EXIT_TOO_LARGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

SWEEP_COLUMNS = list(info.SWEEP_COLUMNS)
JOINT_EXTRA_COLUMNS = ["pt_x", "pt_y", "pt_z"]
MC_COLUMNS = ["p", "beta", "mean_energy", "energy_err", "ea_overlap", "ea_err",
              "samples"]


# ---------------------------------------------------------------------------
# Noise grammar: independent | independent:pz=<v> | depolarizing |
# general:<wx>,<wy>,<wz>
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    pz_fixed: Optional[float] = None
    weights: Optional[Tuple[float, float, float]] = None

    @property
    def joint(self) -> bool:
        return self.kind in ("depolarizing", "general")

    def rates_at(self, p: float):
        """(px, pz) for factorized kinds, PauliNoise for joint kinds."""
        if self.kind == "independent":
            return p, (self.pz_fixed if self.pz_fixed is not None else p)
        if self.kind == "depolarizing":
            return depolarizing_from_independent(p, p)
        wx, wy, wz = self.weights
        total = wx + wy + wz
        return PauliNoise(p * wx / total, p * wy / total, p * wz / total)

    def describe(self) -> str:
        if self.kind == "independent" and self.pz_fixed is not None:
            return f"independent:pz={self.pz_fixed}"
        if self.kind == "general":
            return "general:" + ",".join(str(w) for w in self.weights)
        return self.kind


def parse_noise(text: str) -> NoiseSpec:
    if text == "independent":
        return NoiseSpec("independent")
    if text.startswith("independent:pz="):
        value = float(text[len("independent:pz="):])
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"fixed pz must be a probability, got {value}")
        return NoiseSpec("independent", pz_fixed=value)
    if text == "depolarizing":
        return NoiseSpec("depolarizing")
    if text.startswith("general:"):
        parts = text[len("general:"):].split(",")
        if len(parts) != 3:
            raise ValueError("general noise needs three weights: general:<wx>,<wy>,<wz>")
        wx, wy, wz = (float(w) for w in parts)
        if min(wx, wy, wz) < 0 or wx + wy + wz <= 0:
            raise ValueError("noise weights must be nonnegative with a positive sum")
        return NoiseSpec("general", weights=(wx, wy, wz))
    raise ValueError(
        f"unknown noise spec {text!r}; expected independent | independent:pz=<v> "
        "| depolarizing | general:<wx>,<wy>,<wz>"
    )


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------


def _provenance(command: str, selector: str, code: CssCode, params: Dict) -> List[str]:
    param_text = " ".join(f"{k}={v}" for k, v in params.items())
    return [
        f"csstat {__version__}",
        f"command: {command}",
        f"code: {selector} hash={code_hash(code)}",
        f"params: {param_text}",
    ]


def _emit_table(
    out: Optional[str],
    fmt: str,
    provenance: List[str],
    columns: List[str],
    rows: List[List[float]],
) -> None:
    if fmt == "csv":
        lines = [f"# {line}" for line in provenance]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(info.format_cell(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "provenance": provenance,
            "columns": columns,
            "rows": [
                ["inf" if math.isinf(v) else v for v in row] for row in rows
            ],
        }
        text = json.dumps(payload, indent=1) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _p_grid(start: float, stop: float, points: int) -> List[float]:
    if points < 1:
        raise ValueError("points must be >= 1")
    for v in (start, stop):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"p values must lie in [0, 1], got {v}")
    if points == 1:
        return [start]
    step = (stop - start) / (points - 1)
    return [start + i * step for i in range(points)]


# ---------------------------------------------------------------------------
# Sweep core (shared by ic-sweep / decoder-sweep / relent-sweep)
# ---------------------------------------------------------------------------


def _sweep_rows(
    code: CssCode,
    grid: Sequence[float],
    spec: NoiseSpec,
    threads: int,
    k0: BitVector,
    k0p: BitVector,
) -> Tuple[List[str], List[List[float]]]:
    columns = SWEEP_COLUMNS + (JOINT_EXTRA_COLUMNS if spec.joint else [])
    rows = []
    for p in grid:
        if spec.joint:
            noise = spec.rates_at(p)
            dist = sector_distribution_joint(code, noise, threads)
            report = info.bound_report(dist, code.k)
            rel_source = marginalize(dist, ["b", "kz"])
            extra = [noise.ptx, noise.pty, noise.ptz]
            p_x = p_z = p
        else:
            p_x, p_z = spec.rates_at(p)
            dist_x = sector_distribution_x(code, p_x, threads)
            dist_z = sector_distribution_z(code, p_z, threads)
            report = info.bound_report((dist_x, dist_z), code.k)
            rel_source = dist_x
            extra = []
        rel = info.relative_entropy(rel_source, k0, k0p).value
        rows.append(
            [p_x, p_z, report.ic_bits, report.ml, report.sampling,
             report.jensen_lower, rel] + extra
        )
    return columns, rows


def _default_shift(code: CssCode) -> Tuple[BitVector, BitVector]:
    k0 = BitVector(code.k, 0)
    k0p = BitVector(code.k, 1) if code.k > 0 else BitVector(0, 0)
    return k0, k0p


def _run_sweep(args: argparse.Namespace, command: str) -> int:
    code = from_selector(args.code)
    spec = parse_noise(args.noise)
    grid = _p_grid(args.p_start, args.p_stop, args.points)
    if command == "relent-sweep":
        width = code.k
        for name, value in (("k0", args.k0), ("k0p", args.k0p)):
            if not 0 <= value < (1 << width):
                raise ValueError(f"{name} must lie in [0, 2^k); k={width}")
        k0 = BitVector(width, args.k0)
        k0p = BitVector(width, args.k0p)
    else:
        k0, k0p = _default_shift(code)
    columns, rows = _sweep_rows(code, grid, spec, args.threads, k0, k0p)
    params = {
        "p_start": args.p_start, "p_stop": args.p_stop, "points": args.points,
        "noise": spec.describe(), "threads": args.threads,
        "rel_shift": (k0 ^ k0p).to01(),
    }
    prov = _provenance(command, args.code, code, params)
    _emit_table(args.out, args.format, prov, columns, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_code_info(args: argparse.Namespace) -> int:
    code = from_selector(args.selector)
    try:
        dx, dz = distance(code)
        dist_text: Union[str, Dict] = f"dx={dx} dz={dz}"
        dist_json: Optional[Dict] = {"dx": dx, "dz": dz}
    except TooLarge:
        dist_text = "not computed (kernel dimension exceeds enumeration bound)"
        dist_json = None
    if args.format == "json":
        payload = {
            "selector": args.selector,
            "hash": code_hash(code),
            "n": code.n, "k": code.k,
            "rank_x": code.rank_x, "rank_z": code.rank_z,
            "Dx": code.Dx, "Dz": code.Dz,
            "distance": dist_json,
            "logical_x": code.logical_x.to01_lines(),
            "logical_z": code.logical_z.to01_lines(),
        }
        sys.stdout.write(json.dumps(payload, indent=1) + "\n")
        return EXIT_OK
    lines = [
        f"code: {args.selector} (hash={code_hash(code)})",
        f"n={code.n} k={code.k} rank_x={code.rank_x} rank_z={code.rank_z} "
        f"Dx={code.Dx} Dz={code.Dz}",
        f"distance: {dist_text}",
    ]
    for i, row in enumerate(code.logical_x.to01_lines()):
        lines.append(f"logical_x[{i}]: {row}")
    for i, row in enumerate(code.logical_z.to01_lines()):
        lines.append(f"logical_z[{i}]: {row}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    code = from_selector(args.selector)
    reports = {
        side: statmech.verify_sector_identity(code, args.p, side=side)
        for side in ("x", "z")
    }
    print(f"csstat {__version__} verify")
    print(f"code: {args.selector} hash={code_hash(code)}")
    print(f"p={args.p}")
    worst = 0.0
    for side, rep in reports.items():
        print(
            f"side {side}: sectors={rep.sectors_checked} "
            f"max_abs_dev={rep.max_abs_dev:.3e}"
        )
        worst = max(worst, rep.max_abs_dev)
    tolerance = 1e-9
    if worst > tolerance:
        print(f"FAIL: deviation {worst:.3e} exceeds {tolerance}")
        return EXIT_INTERNAL
    print(f"ok (tolerance {tolerance})")
    return EXIT_OK


def cmd_kw_check(args: argparse.Namespace) -> int:
    code = from_selector(args.selector)
    rep = statmech.kw_check(code, args.beta_x)
    print(f"csstat {__version__} kw-check")
    print(f"code: {args.selector} hash={code_hash(code)}")
    print(f"beta_x={rep.beta_x} beta_z={rep.beta_z}")
    print(f"raw_residual={rep.raw_residual:.6e}")
    print(f"summed_residual={rep.summed_residual:.6e}")
    return EXIT_OK


def _parse_bits(text: str, width: int, name: str) -> BitVector:
    if text == "-":
        text = ""
    if len(text) != width or any(c not in "01" for c in text):
        raise ValueError(
            f"{name} must be a {width}-bit 0/1 string (use - when empty), "
            f"got {text!r}"
        )
    return BitVector.from01(text)


def cmd_sm_export(args: argparse.Namespace) -> int:
    code = from_selector(args.selector)
    parts = args.sector.split(":")
    species = parts[0] if parts else ""
    couplings = None
    if species == "x" and len(parts) == 3:
        b = _parse_bits(parts[1], code.rank_z, "b")
        kz = _parse_bits(parts[2], code.k, "kz")
        model = statmech.build_sm_x(code, representative_x(code, b, kz))
        if args.p is not None:
            couplings = statmech.Couplings.uniform(statmech.nishimori_beta(args.p))
    elif species == "z" and len(parts) == 3:
        a = _parse_bits(parts[1], code.rank_x, "a")
        kx = _parse_bits(parts[2], code.k, "kx")
        model = statmech.build_sm_z(code, representative_z(code, a, kx))
        if args.p is not None:
            couplings = statmech.Couplings.uniform(statmech.nishimori_beta(args.p))
    elif species == "coupled" and len(parts) == 5:
        b = _parse_bits(parts[1], code.rank_z, "b")
        kz = _parse_bits(parts[2], code.k, "kz")
        a = _parse_bits(parts[3], code.rank_x, "a")
        kx = _parse_bits(parts[4], code.k, "kx")
        model = statmech.build_sm_coupled(
            code,
            representative_x(code, b, kz),
            representative_z(code, a, kx),
        )
        if args.p is not None:
            spec = parse_noise(args.noise)
            if not spec.joint:
                raise ValueError(
                    "coupled-model couplings need a joint noise spec "
                    "(depolarizing or general:<wx>,<wy>,<wz>)"
                )
            couplings = statmech.Couplings.from_pauli(spec.rates_at(args.p))
    else:
        raise ValueError(
            f"sector {args.sector!r} not understood; expected x:<b>:<kz>, "
            "z:<a>:<kx>, or coupled:<b>:<kz>:<a>:<kx> with 0/1 strings "
            "(- for zero-width fields)"
        )
    payload = statmech.sm_to_json_dict(model, couplings)
    payload["provenance"] = _provenance(
        "sm-export", args.selector, code,
        {"sector": args.sector, "p": args.p, "noise": args.noise},
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    code = from_selector(args.selector)
    grid = _p_grid(args.p_start, args.p_stop, args.points)
    cfg = mc.McConfig(
        sweeps=args.sweeps,
        burn_in=args.burn_in,
        seed=args.seed,
        replicas=args.replicas,
        thread_count=args.threads,
    )
    scan = mc.nishimori_scan(code, args.side, grid, args.samples, cfg)
    rows = [
        [r.p, r.beta, r.mean_energy, r.energy_err, r.ea_overlap, r.ea_err,
         float(r.samples)]
        for r in scan
    ]
    params = {
        "side": args.side, "p_start": args.p_start, "p_stop": args.p_stop,
        "points": args.points, "samples": args.samples, "sweeps": args.sweeps,
        "burn_in": args.burn_in, "replicas": args.replicas, "seed": args.seed,
        "threads": args.threads,
    }
    prov = _provenance("mc", args.selector, code, params)
    _emit_table(args.out, args.format, prov, MC_COLUMNS, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-start", type=float, required=True)
    p.add_argument("--p-stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument(
        "--noise",
        default="independent",
        help="independent | independent:pz=<v> | depolarizing | "
        "general:<wx>,<wy>,<wz>  (joint kinds sweep the total rate and "
        "append pt_x,pt_y,pt_z columns)",
    )
    p.add_argument("--threads", type=int, default=1)
    _add_output_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csstat",
        description="CSS-code sector distributions, information quantities, "
        "and their disorder-model duals.",
    )
    parser.add_argument("--version", action="version", version=f"csstat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code-info", help="print code parameters and logicals")
    p.add_argument("selector", help="family[:dims] (e.g. toric2d:3) or a code file path")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_code_info)

    for name, desc in (
        ("ic-sweep", "coherent information and decoder bounds over a p grid"),
        ("decoder-sweep", "optimal-decoder success probabilities over a p grid"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--code", required=True, help="family[:dims] or file path")
        _add_sweep_flags(p)
        p.set_defaults(func=lambda a, _n=name: _run_sweep(a, _n))

    p = sub.add_parser(
        "relent-sweep",
        help="relative entropy between logical sectors k0 and k0p over a p grid",
    )
    p.add_argument("selector", help="family[:dims] or file path")
    p.add_argument("k0", type=int, help="first logical label (integer, low bit = pair 0)")
    p.add_argument("k0p", type=int, help="second logical label")
    _add_sweep_flags(p)
    p.set_defaults(func=lambda a: _run_sweep_positional(a))

    p = sub.add_parser("sm-export", help="export one sector's disorder model as JSON")
    p.add_argument("selector")
    p.add_argument(
        "sector",
        help="x:<b>:<kz> | z:<a>:<kx> | coupled:<b>:<kz>:<a>:<kx> "
        "(0/1 strings, low bit first; - for zero-width fields)",
    )
    p.add_argument("out", help="output JSON path")
    p.add_argument("--p", type=float, default=None,
                   help="include couplings at this noise rate")
    p.add_argument("--noise", default="depolarizing",
                   help="joint noise spec for coupled couplings")
    p.set_defaults(func=cmd_sm_export)

    p = sub.add_parser("kw-check", help="high/low temperature duality residuals")
    p.add_argument("selector")
    p.add_argument("beta_x", type=float)
    p.set_defaults(func=cmd_kw_check)

    p = sub.add_parser("verify", help="check sector probabilities against partition sums")
    p.add_argument("selector")
    p.add_argument("p", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mc", help="Metropolis scan along the Nishimori line")
    p.add_argument("selector")
    p.add_argument("--side", choices=("x", "z"), default="x")
    p.add_argument("--p-start", type=float, required=True)
    p.add_argument("--p-stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--samples", type=int, default=8, help="disorder samples per point")
    p.add_argument("--sweeps", type=int, default=2000)
    p.add_argument("--burn-in", type=int, default=500)
    p.add_argument("--replicas", type=int, default=2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None)
    _add_output_flags(p)
    p.set_defaults(func=cmd_mc)

    return parser


def _run_sweep_positional(args: argparse.Namespace) -> int:
    args.code = args.selector
    return _run_sweep(args, "relent-sweep")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (CodeFormatError, CommutationViolation, FileNotFoundError,
            IsADirectoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalInvariantError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
