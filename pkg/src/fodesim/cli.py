"""Command-line front end.

    fodesim <step|traj|poles|bode> --config FILE [--out FILE] [--fig FILE]
            [--solver direct|statespace|both] [--variant verbatim|derived]
            [--h REAL] [--t-end REAL] [--which NAME] [--dump-config]

Emits CSV (12 significant digits, LF line endings) to stdout or --out, and
optionally renders the matching figure to --fig.  Exit codes: 0 success,
1 numerical failure, 2 usage or config error.  FODESIM_THREADS caps the
numeric backend's thread pool; results are byte-identical regardless.
"""

from __future__ import annotations

import argparse
import os
import sys

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

_THREAD_ENV_TARGETS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _apply_thread_cap() -> None:
    """Propagate FODESIM_THREADS to the BLAS/OpenMP pools.

    Must run before numpy is imported, which is why the numeric modules are
    imported lazily inside main().
    """
    cap = os.environ.get("FODESIM_THREADS")
    if not cap:
        return
    try:
        n = max(1, int(cap))
    except ValueError:
        return
    for var in _THREAD_ENV_TARGETS:
        os.environ.setdefault(var, str(n))


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fodesim",
        description="Simulate and analyze a fractional-order feedback loop.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", help="write CSV here instead of stdout")
        p.add_argument("--fig", help="also render the figure to this file")
        p.add_argument("--h", type=float, dest="h", help="override sim.h")
        p.add_argument("--t-end", type=float, dest="t_end", help="override sim.t_end")
        p.add_argument(
            "--variant",
            choices=("verbatim", "derived"),
            help="override sim.variant",
        )
        p.add_argument(
            "--dump-config",
            action="store_true",
            help="print the effective config and exit",
        )

    p_step = sub.add_parser("step", help="closed-loop step response")
    common(p_step)
    p_step.add_argument(
        "--solver",
        choices=("direct", "statespace", "both"),
        default="both",
        help="which solver(s) to run",
    )

    p_traj = sub.add_parser("traj", help="state trajectory and classification")
    common(p_traj)

    p_poles = sub.add_parser("poles", help="characteristic roots and verdict")
    common(p_poles)

    p_bode = sub.add_parser("bode", help="frequency response")
    common(p_bode)
    p_bode.add_argument(
        "--which",
        choices=("plant", "controller", "open_loop", "closed_loop"),
        default="closed_loop",
        help="transfer function to evaluate",
    )
    return parser


def _load_config(args):
    from .config import ConfigError, parse_config

    try:
        with open(args.config, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
    cfg = parse_config(text)
    from dataclasses import replace

    overrides = {}
    if args.h is not None:
        overrides["h"] = args.h
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if getattr(args, "variant", None) is not None:
        overrides["variant"] = args.variant
    if overrides:
        cfg = replace(cfg, **overrides)
        from .config import _validate

        _validate(cfg)
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows, footer_lines=()):
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    lines.extend(footer_lines)
    return "\n".join(lines) + "\n"


def _run_step(cfg, args) -> str:
    from .sim_direct import simulate_direct
    from .sim_statespace import build_realization, simulate_state_space

    model = cfg.model()
    results = {}
    if args.solver in ("direct", "both"):
        results["y_direct"] = simulate_direct(
            model, cfg.h, cfg.t_end, memory=cfg.memory,
            divergence_bound=cfg.divergence_bound,
        )
    if args.solver in ("statespace", "both"):
        realization = build_realization(model, cfg.realization_variant())
        results["y_statespace"] = simulate_state_space(
            realization, model, cfg.h, cfg.t_end, memory=cfg.memory,
            divergence_bound=cfg.divergence_bound,
        )

    n = min(len(ts) for ts in results.values())
    diverged = any(ts.diverged for ts in results.values())
    first = next(iter(results.values()))
    header = ["t", "w"] + list(results)
    if diverged:
        header.append("diverged")
    rows = []
    for k in range(n):
        row = [_fmt(first.t[k]), _fmt(first.w[k])]
        row.extend(_fmt(ts.y[k]) for ts in results.values())
        if diverged:
            row.append("1" if k == n - 1 else "0")
        rows.append(row)

    if args.fig:
        from .plotting import save_step_figure

        save_step_figure(results, args.fig)
    return _csv(header, rows)


def _run_traj(cfg, args) -> str:
    from .sim_statespace import (
        build_realization,
        classify_trajectory,
        equilibrium,
        simulate_state_space,
    )

    model = cfg.model()
    realization = build_realization(model, cfg.realization_variant())
    traj = simulate_state_space(
        realization, model, cfg.h, cfg.t_end, memory=cfg.memory,
        divergence_bound=cfg.divergence_bound,
    )
    eq = equilibrium(model, cfg.amplitude)
    label = classify_trajectory(traj, eq)
    rows = [
        [_fmt(traj.t[k]), _fmt(traj.x1[k]), _fmt(traj.x2[k]), _fmt(traj.y[k])]
        for k in range(len(traj))
    ]
    footer = [
        f"# classification: {label}; equilibrium: "
        f"{_fmt(eq.x1_star)},{_fmt(eq.x2_star)}"
    ]
    if args.fig:
        from .plotting import save_trajectory_figure

        save_trajectory_figure(traj, eq, label, args.fig)
    return _csv(["t", "x1", "x2", "y"], rows, footer)


def _run_poles(cfg, args) -> str:
    import math

    from .analysis import stability_report
    from .model import principal_power

    report = stability_report(cfg.model())
    rows = []
    limit = math.pi * report.base_order
    for v in report.v_roots:
        on_sheet = abs(math.atan2(v.imag, v.real)) < limit and v != 0
        if on_sheet:
            s = principal_power(complex(v), 1.0 / report.base_order)
            re_s, im_s = _fmt(s.real), _fmt(s.imag)
        else:
            re_s = im_s = ""
        rows.append([_fmt(v.real), _fmt(v.imag), "1" if on_sheet else "0", re_s, im_s])
    footer = [
        f"# verdict: {report.verdict}",
        f"# base_order: {_fmt(report.base_order)}",
    ]
    if report.dominant_pole is not None:
        dom = report.dominant_pole
        footer.append(f"# dominant_pole: {_fmt(dom.real)},{_fmt(dom.imag)}")
        footer.append(f"# stability_measure_St: {_fmt(report.stability_measure)}")
        if math.isfinite(report.damping_measure):
            footer.append(f"# damping_measure_Tl: {_fmt(report.damping_measure)}")
            footer.append(
                f"# damping_reciprocal: {_fmt(1.0 / report.damping_measure)}"
            )
    footer.append(f"# notes: {report.convention_notes}")
    if args.fig:
        from .plotting import save_poles_figure

        save_poles_figure(report, args.fig)
    return _csv(["re_v", "im_v", "on_principal_sheet", "re_s", "im_s"], rows, footer)


def _run_bode(cfg, args) -> str:
    from .analysis import frequency_response

    fr = frequency_response(
        cfg.model(), cfg.omega_min, cfg.omega_max, cfg.points, which=args.which
    )
    rows = [
        [_fmt(om), _fmt(mag), _fmt(ph)]
        for om, mag, ph in fr.rows()
    ]
    if args.fig:
        from .plotting import save_bode_figure

        save_bode_figure(fr, args.fig)
    return _csv(["omega", "mag_db", "phase_deg"], rows)


_RUNNERS = {
    "step": _run_step,
    "traj": _run_traj,
    "poles": _run_poles,
    "bode": _run_bode,
}


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = _build_parser()
    args = parser.parse_args(argv)

    from .config import ConfigError

    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"fodesim: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.dump_config:
        from .config import dump_config

        sys.stdout.write(dump_config(cfg))
        return EXIT_OK

    from .analysis import IncommensurateOrdersError, RootFindingError
    from .model import TransferPoleError
    from .sim_direct import IllPosedDiscretizationError, NoEquilibriumError

    try:
        text = _RUNNERS[args.command](cfg, args)
    except (
        IllPosedDiscretizationError,
        NoEquilibriumError,
        IncommensurateOrdersError,
        RootFindingError,
        TransferPoleError,
        FloatingPointError,
    ) as exc:
        print(f"fodesim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"fodesim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
