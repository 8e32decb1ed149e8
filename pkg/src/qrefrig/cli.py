"""Command-line front end.

Subcommands: ``spectrum``, ``cycle otto|stirling|classical-otto``,
``sweep``, ``figure <name>``, ``oracle compare``.  Ledgers and reports
are emitted as JSON, sweeps and figures as CSV with a provenance header.
Outputs are deterministic: identical invocations produce byte-identical
files.

A flat key = value config file (``--config``) may pre-set any long option
of the invoked subcommand; explicit flags win.  Exit codes: 0 success,
2 validation error, 3 numeric (validity/convergence/truncation) error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Any, Sequence

from . import __version__
from .errors import ConvergenceError, TruncationError, ValidityDomainError
from .media import Medium, MediumKind, MediumParams, ao_spectrum
from .thermo import energy_cost_ao, energy_cost_spin
from .cycles import (
    Backend,
    ClassicalOttoParams,
    CycleParams,
    classical_otto_cop_closed,
    classical_otto_ledger,
    otto_cop_first_order,
    otto_ledger,
    stirling_cop_first_order,
    stirling_cop_leading,
    stirling_ledger,
)
from . import oracle as oracle_mod

_NUMERIC_ERRORS = (ValidityDomainError, TruncationError, ConvergenceError)

_MEDIUM_CHOICES = {
    "harmonic": MediumKind.QUANTUM_HARMONIC,
    "anharmonic": MediumKind.QUANTUM_ANHARMONIC,
    "spin-harmonic": MediumKind.SPIN_HARMONIC,
    "spin-anharmonic": MediumKind.SPIN_ANHARMONIC,
}

_DEFAULT_OMEGA0 = 0.6 ** (1.0 / 3.0)


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _fmt_or(x: float | None, placeholder: str = "nan") -> str:
    return placeholder if x is None else _fmt(x)


def _round12(obj: Any) -> Any:
    """Round floats to 12 significant digits for stable JSON output."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qrefrig-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _provenance(args: argparse.Namespace, keys: Sequence[str]) -> dict[str, Any]:
    cfg = {k: getattr(args, k) for k in sorted(keys) if hasattr(args, k)}
    return {"tool": f"qrefrig {__version__}", "config": _round12(cfg)}


def _csv_header(args: argparse.Namespace, keys: Sequence[str]) -> str:
    lines = [f"# qrefrig {__version__}"]
    for k in sorted(keys):
        if hasattr(args, k):
            v = getattr(args, k)
            lines.append(f"# {k} = {_fmt(v) if isinstance(v, float) else v}")
    return "\n".join(lines) + "\n"


def _json_text(payload: dict[str, Any]) -> str:
    return json.dumps(_round12(payload), indent=2) + "\n"


def _flag_string(flags: dict[str, bool]) -> str:
    parts = []
    if not flags.get("negative_work_condition", True):
        parts.append("neg-work-unmet")
    if not flags.get("partition_valid", True):
        parts.append("partition-invalid")
    if flags.get("partition_marginal", False):
        parts.append("partition-marginal")
    if not flags.get("truncation_converged", True):
        parts.append("truncation-unconverged")
    return ";".join(parts) or "ok"


def _lam_from_args(args: argparse.Namespace) -> float:
    if getattr(args, "lam", None) is not None:
        return args.lam
    g = getattr(args, "g", None) or 0.0
    return g * args.omega0**3


def _medium(args: argparse.Namespace, lam: float) -> Medium:
    kind = _MEDIUM_CHOICES[args.medium]
    if kind.is_harmonic:
        lam = 0.0
    return Medium(kind, MediumParams(omega=args.omega, lam=lam, omega0=args.omega0))


def _require_refrigerator_geometry(omega: float, omega_prime: float) -> None:
    if not (omega > omega_prime):
        raise ValueError(
            f"refrigerator cycles require omega > omega_prime, got "
            f"omega={omega}, omega_prime={omega_prime}"
        )


# --------------------------------------------------------------------------
# subcommand implementations
# --------------------------------------------------------------------------

def _run_spectrum(args: argparse.Namespace) -> int:
    lam = _lam_from_args(args)
    p = MediumParams(omega=args.omega, lam=lam, omega0=args.omega0)
    spec = ao_spectrum(p, args.levels)
    payload: dict[str, Any] = {
        "provenance": _provenance(args, ("omega", "lam", "g", "omega0", "levels", "exact", "basis_size")),
        "params": {"omega": p.omega, "lam": p.lam, "omega0": p.omega0, "g": p.g},
        "first_order": list(spec.levels),
    }
    if args.exact:
        cfg = oracle_mod.BasisConfig(size=args.basis_size, max_size=max(1024, 2 * args.basis_size))
        exact = oracle_mod.ao_exact_spectrum(p, cfg, min_levels=min(args.levels, 2))
        payload["exact"] = {
            "levels": list(exact.levels[: args.levels]),
            "converged_levels": exact.truncation,
        }
    _emit(_json_text(payload), args.output)
    return 0


def _run_cycle(args: argparse.Namespace) -> int:
    backend = Backend.NUMERIC if args.backend == "numeric" else Backend.CLOSED_FORM_O1
    keys = ("cycle_kind", "medium", "omega", "omega_prime", "beta_h", "beta_c",
            "lam", "g", "omega0", "backend", "beta1", "beta2", "beta3", "beta4")
    lam = _lam_from_args(args)
    if args.cycle_kind == "classical-otto":
        _require_refrigerator_geometry(args.omega, args.omega_prime)
        params = ClassicalOttoParams(
            omega=args.omega, omega_prime=args.omega_prime,
            beta_1=args.beta1, beta_2=args.beta2, beta_3=args.beta3, beta_4=args.beta4,
            lam=lam,
        )
        ledger = classical_otto_ledger(params)
        payload = {"provenance": _provenance(args, keys), **ledger.to_dict()}
        payload["cop_closed_form"] = classical_otto_cop_closed(params)
        _emit(_json_text(payload), args.output)
        return 0

    _require_refrigerator_geometry(args.omega, args.omega_prime)
    cp = CycleParams(
        omega=args.omega, omega_prime=args.omega_prime,
        beta_h=args.beta_h, beta_c=args.beta_c, medium=_medium(args, lam),
    )
    if args.cycle_kind == "otto":
        ledger = otto_ledger(cp, backend)
        cop_first_order = otto_cop_first_order(cp)
    else:
        ledger = stirling_ledger(cp, backend)
        cop_first_order = stirling_cop_first_order(cp)
    payload = {"provenance": _provenance(args, keys), **ledger.to_dict()}
    payload["cop_first_order"] = cop_first_order
    _emit(_json_text(payload), args.output)
    return 0


def _sweep_grid(args: argparse.Namespace) -> list[float]:
    if args.g_count < 1:
        raise ValueError(f"g-count must be at least 1, got {args.g_count}")
    if args.g_start > args.g_stop:
        raise ValueError("g-start must not exceed g-stop")
    if args.g_count == 1:
        return [args.g_start]
    step = (args.g_stop - args.g_start) / (args.g_count - 1)
    return [args.g_start + i * step for i in range(args.g_count)]


def _cost_point(args: argparse.Namespace) -> tuple[float, float]:
    # case (i): hot-bath inverse temperature at the hot frequency;
    # case (ii): cold-bath inverse temperature at the cold frequency
    if args.cost_case == "i":
        return args.beta_h, args.omega
    return args.beta_c, args.omega_prime


def _run_sweep(args: argparse.Namespace) -> int:
    _require_refrigerator_geometry(args.omega, args.omega_prime)
    grid = _sweep_grid(args)
    backend = Backend.NUMERIC if args.backend == "numeric" else Backend.CLOSED_FORM_O1
    beta_cost, omega_cost = _cost_point(args)
    keys = ("cycle", "backend", "cost_case", "omega", "omega_prime", "beta_h", "beta_c",
            "omega0", "g_start", "g_stop", "g_count")
    out = [_csv_header(args, keys)]
    out.append("g,lambda,deltaH_ao,cop_ao,deltaH_spin,cop_spin,cop_harmonic,flags\n")

    def cop_for(kind: MediumKind, lam: float) -> tuple[float | None, dict[str, bool]]:
        cp = CycleParams(
            omega=args.omega, omega_prime=args.omega_prime,
            beta_h=args.beta_h, beta_c=args.beta_c,
            medium=Medium(kind, MediumParams(args.omega, lam, args.omega0)),
        )
        if backend is Backend.NUMERIC:
            led = otto_ledger(cp, backend) if args.cycle == "otto" else stirling_ledger(cp, backend)
            return led.cop, led.flags
        led = otto_ledger(cp, backend) if args.cycle == "otto" else stirling_ledger(cp, backend)
        cop = otto_cop_first_order(cp) if args.cycle == "otto" else stirling_cop_first_order(cp)
        return cop, led.flags

    for g in grid:
        lam = g * args.omega0**3
        try:
            p_cost = MediumParams(omega=omega_cost, lam=lam, omega0=args.omega0)
            dh_ao = energy_cost_ao(beta_cost, p_cost).delta_h
            dh_spin = energy_cost_spin(beta_cost, p_cost).delta_h
            cop_ao, flags_ao = cop_for(MediumKind.QUANTUM_ANHARMONIC, lam)
            cop_spin, flags_spin = cop_for(MediumKind.SPIN_ANHARMONIC, lam)
            cop_harm, _ = cop_for(MediumKind.QUANTUM_HARMONIC, 0.0)
            merged = {
                k: flags_ao.get(k, True) and flags_spin.get(k, True)
                for k in ("negative_work_condition", "partition_valid", "truncation_converged")
            }
            merged["partition_marginal"] = flags_ao.get("partition_marginal", False) or flags_spin.get(
                "partition_marginal", False
            )
            row = ",".join([
                _fmt(g), _fmt(lam), _fmt(dh_ao), _fmt_or(cop_ao),
                _fmt(dh_spin), _fmt_or(cop_spin), _fmt_or(cop_harm),
                _flag_string(merged),
            ])
        except _NUMERIC_ERRORS as exc:
            row = ",".join([
                _fmt(g), _fmt(lam), "nan", "nan", "nan", "nan", "nan",
                f"error:{type(exc).__name__}",
            ])
        out.append(row + "\n")
    _emit("".join(out), args.output)
    return 0


_FIGURES = ("fig2a", "fig2b", "fig3a", "fig3b", "figS2")


def _run_figure(args: argparse.Namespace) -> int:
    name = args.name
    points = args.points
    omega0 = _DEFAULT_OMEGA0
    w, wp, bh, bc = 5.0, 4.0, 0.5, 1.0
    gs = [i / (points - 1) for i in range(points)] if points > 1 else [0.0]
    keys = ("name", "points")
    out = [_csv_header(args, keys)]

    def cp(kind: MediumKind, lam: float) -> CycleParams:
        return CycleParams(omega=w, omega_prime=wp, beta_h=bh, beta_c=bc,
                           medium=Medium(kind, MediumParams(w, lam, omega0)))

    if name in ("fig2a", "fig2b", "fig3a", "fig3b"):
        case_i = name.endswith("a")
        beta_cost, omega_cost = (bh, w) if case_i else (bc, wp)
        otto = name.startswith("fig2")
        if otto:
            out.append("g,lambda,deltaH_ao,cop_otto_ao,deltaH_spin,cop_otto_spin,cop_harmonic\n")
        else:
            out.append("g,lambda,deltaH_ao,cop_stirling_ao,deltaH_spin,cop_stirling_spin,"
                       "cop_harmonic_osc,cop_harmonic_qubit\n")
        for g in gs:
            lam = g * omega0**3
            p_cost = MediumParams(omega=omega_cost, lam=lam, omega0=omega0)
            dh_ao = energy_cost_ao(beta_cost, p_cost).delta_h
            dh_spin = energy_cost_spin(beta_cost, p_cost).delta_h
            if otto:
                cells = [
                    g, lam, dh_ao, otto_cop_first_order(cp(MediumKind.QUANTUM_ANHARMONIC, lam)),
                    dh_spin, otto_cop_first_order(cp(MediumKind.SPIN_ANHARMONIC, lam)),
                    otto_cop_first_order(cp(MediumKind.QUANTUM_HARMONIC, 0.0)),
                ]
            else:
                base = cp(MediumKind.QUANTUM_HARMONIC, 0.0)
                cells = [
                    g, lam, dh_ao, stirling_cop_first_order(cp(MediumKind.QUANTUM_ANHARMONIC, lam)),
                    dh_spin, stirling_cop_first_order(cp(MediumKind.SPIN_ANHARMONIC, lam)),
                    stirling_cop_leading(base, spin=False),
                    stirling_cop_leading(base, spin=True),
                ]
            out.append(",".join(_fmt(c) for c in cells) + "\n")
    else:  # figS2
        out.append("g,cop_quantum_ao,cop_harmonic,cop_classical_ao\n")
        for g in gs:
            lam = g * omega0**3
            classical = ClassicalOttoParams(
                omega=w, omega_prime=wp, beta_1=1.0, beta_2=0.6, beta_3=0.5, beta_4=0.8, lam=lam
            )
            cells = [
                g,
                otto_cop_first_order(cp(MediumKind.QUANTUM_ANHARMONIC, lam)),
                otto_cop_first_order(cp(MediumKind.QUANTUM_HARMONIC, 0.0)),
                classical_otto_cop_closed(classical),
            ]
            out.append(",".join(_fmt(c) for c in cells) + "\n")
    _emit("".join(out), args.output)
    return 0


def _run_oracle(args: argparse.Namespace) -> int:
    if args.quantity == "all":
        names = sorted(oracle_mod.ORDER_CHECK_QUANTITIES)
    else:
        names = [args.quantity]
    reports = []
    for name in names:
        lam = args.lam if args.lam is not None else oracle_mod.default_lambda(name)
        rep = oracle_mod.order_check(name, lam)
        reports.append({
            "quantity": rep.quantity,
            "lambda": rep.lam,
            "err": rep.err,
            "err_half": rep.err_half,
            "ratio": rep.ratio,
            "pass": rep.passed,
        })
    payload = {"provenance": _provenance(args, ("quantity", "lam")), "reports": reports}
    _emit(_json_text(payload), args.output)
    return 0


# --------------------------------------------------------------------------
# parser construction and config handling
# --------------------------------------------------------------------------

def _add_output(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--output", default=None, help="output path (default: stdout)")


def _add_medium_options(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--medium", choices=sorted(_MEDIUM_CHOICES), default="anharmonic")
    sp.add_argument("--omega", type=float, default=5.0, help="hot-side frequency")
    sp.add_argument("--omega-prime", type=float, default=4.0, help="cold-side frequency")
    sp.add_argument("--beta-h", type=float, default=0.5, help="hot inverse temperature")
    sp.add_argument("--beta-c", type=float, default=1.0, help="cold inverse temperature")
    sp.add_argument("--omega0", type=float, default=_DEFAULT_OMEGA0,
                    help="reference frequency for the dimensionless anharmonicity")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--lam", type=float, default=None, help="quartic strength")
    group.add_argument("--g", type=float, default=None, help="dimensionless anharmonicity")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="qrefrig",
        description="Quantum Otto/Stirling refrigeration cycles with anharmonic media",
    )
    parser.add_argument("--config", default=None, help="flat key = value config file")
    parser.add_argument("--version", action="version", version=f"qrefrig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    submap: dict[str, argparse.ArgumentParser] = {}

    sp = sub.add_parser("spectrum", help="first-order (and optionally exact) oscillator levels")
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--omega0", type=float, default=_DEFAULT_OMEGA0)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--lam", type=float, default=None)
    group.add_argument("--g", type=float, default=None)
    sp.add_argument("--levels", type=int, default=8)
    sp.add_argument("--exact", action="store_true", help="include diagonalized levels")
    sp.add_argument("--basis-size", type=int, default=128)
    _add_output(sp)
    sp.set_defaults(func=_run_spectrum)
    submap["spectrum"] = sp

    sp = sub.add_parser("cycle", help="evaluate one refrigeration cycle")
    sp.add_argument("cycle_kind", choices=("otto", "stirling", "classical-otto"))
    _add_medium_options(sp)
    sp.add_argument("--backend", choices=("closed", "numeric"), default="closed")
    sp.add_argument("--beta1", type=float, default=1.0)
    sp.add_argument("--beta2", type=float, default=0.6)
    sp.add_argument("--beta3", type=float, default=0.5)
    sp.add_argument("--beta4", type=float, default=0.8)
    _add_output(sp)
    sp.set_defaults(func=_run_cycle)
    submap["cycle"] = sp

    sp = sub.add_parser("sweep", help="anharmonicity sweep to CSV")
    sp.add_argument("--cycle", choices=("otto", "stirling"), default="otto")
    _add_medium_options(sp)
    sp.add_argument("--backend", choices=("closed", "numeric"), default="closed")
    sp.add_argument("--cost-case", choices=("i", "ii"), default="i")
    sp.add_argument("--g-start", type=float, default=0.0)
    sp.add_argument("--g-stop", type=float, default=1.0)
    sp.add_argument("--g-count", type=int, default=50)
    _add_output(sp)
    sp.set_defaults(func=_run_sweep)
    submap["sweep"] = sp

    sp = sub.add_parser("figure", help="reproduce a baked-in figure data set")
    sp.add_argument("name", choices=_FIGURES)
    sp.add_argument("--points", type=int, default=101)
    _add_output(sp)
    sp.set_defaults(func=_run_figure)
    submap["figure"] = sp

    sp = sub.add_parser("oracle", help="order-of-accuracy comparisons against the oracles")
    sp.add_argument("action", choices=("compare",))
    sp.add_argument("--quantity", default="all",
                    choices=["all", *sorted(oracle_mod.ORDER_CHECK_QUANTITIES)])
    sp.add_argument("--lam", type=float, default=None,
                    help="probe strength (default: per-quantity standard value)")
    _add_output(sp)
    sp.set_defaults(func=_run_oracle)
    submap["oracle"] = sp

    return parser, submap


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot interpret {raw!r} as a boolean")


def load_config(path: str) -> dict[str, str]:
    """Read a flat ``key = value`` file; '#' starts a comment."""
    config: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, value = stripped.split("=", 1)
            config[key.strip().replace("-", "_")] = value.strip()
    return config


def _apply_config(sp: argparse.ArgumentParser, config: dict[str, str]) -> None:
    actions = {a.dest: a for a in sp._actions}
    for key, raw in config.items():
        action = actions.get(key)
        if action is None or key in ("help", "func"):
            raise ValueError(f"unknown config key {key!r} for this subcommand")
        if isinstance(action, argparse._StoreTrueAction):
            value: Any = _parse_bool(raw)
        elif action.type is not None:
            value = action.type(raw)
        else:
            value = raw
        if action.choices is not None and value not in action.choices:
            raise ValueError(f"config key {key!r}: {value!r} not in {sorted(action.choices)}")
        sp.set_defaults(**{key: value})


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, submap = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(submap[args.command], load_config(args.config))
            args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse --help/--version/usage errors
        return int(exc.code or 0)
    except _NUMERIC_ERRORS as exc:
        print(f"qrefrig: numeric error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"qrefrig: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
