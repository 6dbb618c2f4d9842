"""Command-line interface: ``qlut build|estimate|simulate|sweep|table``.

Exit codes: 0 success, 1 usage / invalid configuration, 2 expression parse
error, 3 domain fault while evaluating the function, 4 table-size guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import errband, qir, resx, sim
from .exceptions import DomainFault, ParseError, TableTooLargeError
from .fxp import Domain, Tolerances, decode, encode, grid
from .funcspec import evaluate, parse
from .synth import LookupArtifact, apply_function_with_lookup, make_clean

EXIT_USAGE, EXIT_PARSE, EXIT_DOMAIN, EXIT_SIZE = 1, 2, 3, 4

SWEEP_COLUMNS = ("l", "t_count", "t_depth", "row_depth", "qubits_total")
TABLE_COLUMNS = (
    "function", "x_min", "x_max", "eps_in", "eps_out", "swap_qubits",
    "t_count", "qubits_total", "reference_t_count", "reference_qubits", "error",
)

# e^-x rows with reference LUT figures published alongside the method (l = 0)
PRESETS = {
    "exp-neg": [
        dict(function="exp(-x)", xmin=0.0, xmax=10.0, eps_in=2.0**-3, eps_out=1e-7,
             reference_t_count=1176, reference_qubits=36),
        dict(function="exp(-x)", xmin=0.0, xmax=10.0, eps_in=2.0**-4, eps_out=1e-9,
             reference_t_count=2310, reference_qubits=45),
        dict(function="exp(-x)", xmin=0.0, xmax=100.0, eps_in=1.0, eps_out=1e-7,
             reference_t_count=1442, reference_qubits=30),
        dict(function="exp(-x)", xmin=0.0, xmax=100.0, eps_in=2.0**-1, eps_out=1e-9,
             reference_t_count=2856, reference_qubits=42),
        dict(function="exp(-x)", xmin=math.log(0.5), xmax=0.0, eps_in=2.0**-4, eps_out=1e-7,
             reference_t_count=574, reference_qubits=45),
        dict(function="exp(-x)", xmin=math.log(0.5), xmax=0.0, eps_in=2.0**-5, eps_out=1e-9,
             reference_t_count=826, reference_qubits=57),
    ],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    function: str
    x_min: float
    x_max: float
    eps_in: float
    eps_out: float
    swap_qubits: int = 0
    clean: bool = False
    restore: bool = True
    mcx_strategy: str = "unary-iteration"
    lipschitz: float | None = None
    seed: int = 0
    allow_large: bool = False

    def domain(self) -> Domain:
        try:
            return Domain(self.x_min, self.x_max)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def tolerances(self) -> Tolerances:
        try:
            return Tolerances(self.eps_in, self.eps_out)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def model(self) -> resx.CostModel:
        return resx.CostModel(mcx_strategy=self.mcx_strategy)

    def build(self, swap_qubits: int | None = None) -> LookupArtifact:
        expr = parse(self.function)
        domain, tol = self.domain(), self.tolerances()
        l = self.swap_qubits if swap_qubits is None else swap_qubits
        if l < 0:
            raise UsageError(f"swap qubits must be non-negative, got {l}")
        try:
            art = apply_function_with_lookup(
                expr, domain, tol, l, restore=self.restore, allow_large=self.allow_large
            )
        except (TableTooLargeError, DomainFault):
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return make_clean(art) if self.clean else art


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        function=args.function,
        x_min=args.xmin,
        x_max=args.xmax,
        eps_in=args.eps_in,
        eps_out=args.eps_out,
        swap_qubits=args.swap_qubits,
        clean=args.clean,
        restore=not args.no_restore,
        mcx_strategy=args.mcx_strategy,
        lipschitz=args.lipschitz,
        seed=args.seed,
        allow_large=args.allow_large,
    )


def _layout_summary(art: LookupArtifact) -> dict:
    t = art.table
    return {
        "n": t.in_fmt.total_bits,
        "p": t.in_fmt.integer_bits,
        "m": t.out_fmt.total_bits,
        "q": t.out_fmt.integer_bits,
        "input_signed": t.in_fmt.signed,
        "output_signed": t.out_fmt.signed,
        "swap_qubits": art.swap_qubits,
        "table_size": len(t.entries),
        "width": art.circuit.width,
        "gates": len(art.circuit),
        "clean": art.clean,
        "restore": art.restore,
    }


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qlut-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_build(cfg: RunConfig, output: str, out=None) -> dict:
    art = cfg.build()
    _write_atomic(output, qir.serialize(art.circuit))
    summary = _layout_summary(art)
    summary["output"] = output
    print(_dump(summary), file=out or sys.stdout)
    return summary


def estimate_payload(cfg: RunConfig, art: LookupArtifact | None = None) -> dict:
    art = art or cfg.build()
    report = resx.estimate_artifact(art, cfg.model())
    n, l, m = art.layout.n, art.swap_qubits, art.layout.m
    payload = report.as_dict()
    payload["predicted_row_depth"] = resx.predicted_row_depth(n, l)
    payload["predicted_lookup_qubits"] = resx.predicted_lookup_qubits(m, l)
    payload["bank_qubits"] = art.bank_qubits
    payload["layout"] = _layout_summary(art)
    return payload


def cmd_estimate(cfg: RunConfig, out=None) -> dict:
    payload = estimate_payload(cfg)
    print(_dump(payload), file=out or sys.stdout)
    return payload


def _bound_for(cfg: RunConfig, expr, domain: Domain) -> errband.ErrorBound:
    L = cfg.lipschitz if cfg.lipschitz is not None else errband.estimate_lipschitz(expr, domain)
    return errband.bound(L, cfg.tolerances())


def cmd_simulate(cfg: RunConfig, mode: str = "all", samples: int = 1000, x: float | None = None, out=None) -> dict:
    art = cfg.build()
    expr = parse(cfg.function)
    domain = cfg.domain()
    eb = _bound_for(cfg, expr, domain)
    if mode == "single":
        if x is None:
            raise UsageError("--x is required in single mode")
        if not domain.x_min <= x <= domain.x_max:
            raise UsageError(f"x={x} outside the domain [{domain.x_min}, {domain.x_max}]")
        in_fmt = art.table.in_fmt
        code = encode(x, in_fmt)
        final = sim.simulate_codes(art.circuit, art.layout.input_wires, [code])
        out_code = sim.codes_from_slices([final[w] for w in art.layout.output_wires], 1)[0]
        x_hat = grid(domain, in_fmt)[(code - art.offset_code) % in_fmt.size]
        fx = evaluate(expr, x)
        got = decode(out_code, art.table.out_fmt)
        payload = {
            "x": x,
            "x_hat": x_hat,
            "input_code": code,
            "f_x": fx,
            "output_code": out_code,
            "decoded_output": got,
            "abs_error": abs(got - fx),
            "bound": eb.total,
            "holds": abs(got - fx) <= eb.total,
        }
    else:
        if mode == "all":
            check = sim.check_lookup(art, expr, exhaustive_limit=sim.MAX_TABLE_BITS)
            val = errband.validate(art, expr, eb, 0, seed=cfg.seed, include_grid=True)
        elif mode == "sample":
            check = sim.check_lookup(art, expr, exhaustive_limit=-1, samples=samples, seed=cfg.seed)
            val = errband.validate(art, expr, eb, samples, seed=cfg.seed, include_grid=False)
        else:
            raise UsageError(f"unknown mode {mode!r}")
        payload = {
            "mode": mode,
            "checked_codes": check.checked,
            "table_max_abs_error": check.max_abs_error,
            "empirical_max_error": val.empirical_max,
            "worst_x": val.worst_x,
            "samples": val.samples,
            "seed": cfg.seed,
            "clean_ok": check.clean_ok,
            "input_restored": check.input_restored,
            "lipschitz_L": eb.lipschitz_L,
            "bound": eb.total,
            "holds": val.holds,
            "lipschitz_risk": val.lipschitz_risk,
        }
    print(_dump(payload), file=out or sys.stdout)
    return payload


def _sweep_row(args: tuple[RunConfig, int]) -> dict:
    cfg, l = args
    art = cfg.build(l)
    r = resx.estimate_artifact(art, cfg.model())
    return {"l": l, "t_count": r.t_count, "t_depth": r.t_depth, "row_depth": r.row_depth, "qubits_total": r.qubits_total}


def sweep_rows(cfg: RunConfig, l_values: list[int] | None = None, jobs: int = 1) -> list[dict]:
    n = cfg.build(0).layout.n
    if l_values is None:
        l_values = list(range(n + 1))
    bad = [l for l in l_values if not 0 <= l <= n]
    if bad:
        raise UsageError(f"swap qubit values {bad} outside [0, {n}]")
    work = [(cfg, l) for l in l_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_row, work))
    return [_sweep_row(w) for w in work]


def _csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in columns})
    return buf.getvalue()


def cmd_sweep(cfg: RunConfig, l_values: list[int] | None = None, jobs: int = 1, out=None) -> str:
    text = _csv(sweep_rows(cfg, l_values, jobs), SWEEP_COLUMNS)
    (out or sys.stdout).write(text)
    return text


def _config_from_mapping(d: dict, defaults: RunConfig | None = None) -> RunConfig:
    base = dict(
        swap_qubits=0, clean=False, restore=True, mcx_strategy="unary-iteration", seed=0, allow_large=False
    )
    if defaults is not None:
        base.update(
            mcx_strategy=defaults.mcx_strategy, seed=defaults.seed, allow_large=defaults.allow_large
        )
    return RunConfig(
        function=str(d["function"]),
        x_min=float(d["xmin"]),
        x_max=float(d["xmax"]),
        eps_in=float(d["eps_in"]),
        eps_out=float(d["eps_out"]),
        swap_qubits=int(d.get("swap_qubits", base["swap_qubits"])),
        clean=bool(d.get("clean", base["clean"])),
        restore=bool(d.get("restore", base["restore"])),
        mcx_strategy=d.get("mcx_strategy", base["mcx_strategy"]),
        seed=base["seed"],
        allow_large=bool(d.get("allow_large", base["allow_large"])),
    )


def table_rows(configs: list[dict], defaults: RunConfig | None = None) -> list[dict]:
    """One row per config; a failing config yields a row with only ``error`` filled."""
    rows = []
    for d in configs:
        row = {
            "function": d.get("function", ""),
            "x_min": d.get("xmin", ""),
            "x_max": d.get("xmax", ""),
            "eps_in": d.get("eps_in", ""),
            "eps_out": d.get("eps_out", ""),
            "swap_qubits": d.get("swap_qubits", 0),
            "reference_t_count": d.get("reference_t_count", ""),
            "reference_qubits": d.get("reference_qubits", ""),
        }
        try:
            cfg = _config_from_mapping(d, defaults)
            r = resx.estimate_artifact(cfg.build(), cfg.model())
            row.update(t_count=r.t_count, qubits_total=r.qubits_total, error="")
        except (KeyError, TypeError, ValueError, UsageError, DomainFault) as exc:
            msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
            row.update(t_count="", qubits_total="", error=f"{type(exc).__name__}: {msg}")
        rows.append(row)
    return rows


def _markdown(rows: list[dict], columns) -> str:
    lines = ["| " + " | ".join(columns) + " |", "|" + "|".join("---" for _ in columns) + "|"]
    for r in rows:
        lines.append("| " + " | ".join(str(r.get(c, "")).replace("|", "\\|") for c in columns) + " |")
    return "\n".join(lines) + "\n"


def cmd_table(configs: list[dict], fmt: str = "csv", defaults: RunConfig | None = None, out=None) -> str:
    rows = table_rows(configs, defaults)
    text = _markdown(rows, TABLE_COLUMNS) if fmt == "markdown" else _csv(rows, TABLE_COLUMNS)
    (out or sys.stdout).write(text)
    return text


def _default_seed() -> int:
    raw = os.environ.get("QLUT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QLUT_SEED must be an integer, got {raw!r}") from None


def _parse_l_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --l-range {text!r}; use LO:HI or a comma list") from None


def _add_function_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--function", "-f", required=True, help='expression in x, e.g. "exp(-x^2)"')
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--eps-in", type=float, required=True, help="maximum input grid spacing")
    p.add_argument("--eps-out", type=float, required=True, help="output precision")
    p.add_argument("--swap-qubits", "-l", type=int, default=0)
    p.add_argument("--clean", action="store_true", help="uncompute banks into a result register")
    p.add_argument("--no-restore", action="store_true", help="leave x - x_min in the input register")
    p.add_argument("--mcx-strategy", choices=[s.value for s in resx.MCXStrategy], default="unary-iteration")
    p.add_argument("--lipschitz", type=float, default=None, help="override the estimated Lipschitz constant")
    p.add_argument("--seed", type=int, default=None, help="sampling seed (default: $QLUT_SEED or 0)")
    p.add_argument("--allow-large", action="store_true", help="lift the 24-bit input guard")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qlut", description="Quantum lookup-table synthesis and resource estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="write the lookup circuit in qlut-circuit v1 format")
    _add_function_args(p)
    p.add_argument("--output", "-o", required=True)

    p = sub.add_parser("estimate", help="print a JSON resource report")
    _add_function_args(p)

    p = sub.add_parser("simulate", help="simulate the circuit and check the error bound")
    _add_function_args(p)
    p.add_argument("--mode", choices=["all", "sample", "single"], default="all")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--x", type=float, default=None)

    p = sub.add_parser("sweep", help="CSV of resources versus swap qubits")
    _add_function_args(p)
    p.add_argument("--l-range", default=None, help="LO:HI (inclusive) or comma list; default 0:n")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("table", help="comparison rows for a list of configurations")
    p.add_argument("configs", nargs="?", help="JSON file holding a list of configurations")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p.add_argument("--mcx-strategy", choices=[s.value for s in resx.MCXStrategy], default="unary-iteration")
    return parser


def _run(args) -> None:
    if args.command == "table":
        if args.preset and args.configs:
            raise UsageError("give either a config file or --preset, not both")
        if args.preset:
            configs = PRESETS[args.preset]
        elif args.configs:
            try:
                with open(args.configs) as fh:
                    configs = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read {args.configs}: {exc}") from None
            if not isinstance(configs, list):
                raise UsageError("config file must hold a JSON list")
        else:
            configs = []
        defaults = RunConfig("x", 0.0, 1.0, 1.0, 0.5, mcx_strategy=args.mcx_strategy)
        cmd_table(configs, args.format, defaults)
        return

    if args.seed is None:
        args.seed = _default_seed()
    cfg = _config_from_args(args)
    if args.command == "build":
        cmd_build(cfg, args.output)
    elif args.command == "estimate":
        cmd_estimate(cfg)
    elif args.command == "simulate":
        cmd_simulate(cfg, args.mode, args.samples, args.x)
    elif args.command == "sweep":
        l_values = _parse_l_range(args.l_range) if args.l_range else None
        cmd_sweep(cfg, l_values, args.jobs)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _run(args)
    except UsageError as exc:
        print(f"qlut: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"qlut: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainFault as exc:
        print(f"qlut: domain fault: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except TableTooLargeError as exc:
        print(f"qlut: {exc}", file=sys.stderr)
        return EXIT_SIZE
    return 0


if __name__ == "__main__":
    sys.exit(main())
