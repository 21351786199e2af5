"""Command-line front end: ``hyperdistill {analytic,sweep,oracle-check,montecarlo,rates}``.

Exit codes: 0 success, 1 failed check, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path

from hyperdistill import checks, montecarlo, rates
from hyperdistill.sweep import (
    MODELS,
    SCENARIOS,
    ConfigError,
    ResultRow,
    build_point,
    evaluate_point,
    fmt,
    parse_config,
    point_state,
    read_sections,
    rows_to_csv,
    run_sweep,
)
from hyperdistill.oracle import ConversionModel


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key=value config file")
    p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    p.add_argument("--seed", type=int, default=None, help="RNG seed")
    p.add_argument("--format", choices=["csv"], default=None, help="output format")


def _state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--Fp", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--Ff", type=float)
    p.add_argument("--Fa", type=float)
    p.add_argument("--bf-share", dest="bf_share", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--variant", choices=["standard", "hadamard"])
    p.add_argument("--model", choices=list(MODELS))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperdistill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form F_p', Y, G at one parameter point")
    _common(p)
    _state_args(p)

    p = sub.add_parser("sweep", help="parameter-grid sweep to CSV")
    _common(p)
    p.add_argument("--preset", help="fig2a, fig2b, fig3a, fig3b or figA1 (when no config is given)")
    p.add_argument("--steps", type=int, help="override grid steps per axis")
    p.add_argument("--sources", help="comma-separated: analytic,probability,oracle,montecarlo")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("oracle-check", help="transition table, unitarity and three-way equivalence checks")
    _common(p)
    p.add_argument("--grid", type=int, default=21)

    p = sub.add_parser("montecarlo", help="shot-level or event-level simulation")
    _common(p)
    _state_args(p)
    p.add_argument("--mode", choices=["shots", "events"], default="shots")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--pair-prob", type=float, default=1e-3)
    p.add_argument("--rep-rate", type=float, default=76e6)
    p.add_argument("--TA", type=float, default=1.0)
    p.add_argument("--TB", type=float, default=1.0)
    p.add_argument("--det-eff", type=float, default=1.0)
    p.add_argument("--window", type=float, default=montecarlo.DEFAULT_WINDOW_PS, help="coincidence window, ps")
    p.add_argument("--jitter", type=float, default=0.0, help="Gaussian timing jitter sigma, ps")
    p.add_argument("--duration", type=float, default=1e-3, help="seconds")
    p.add_argument("--events-out", metavar="PATH", help="write time_tag_ps,detector CSV")

    p = sub.add_parser("rates", help="distillation-rate table and ratios")
    _common(p)
    p.add_argument("--preset", choices=["paper-pet", "paper-psm"], default=None)
    p.add_argument("--p", type=float, default=1e-3)
    p.add_argument("--rep-rate", type=float, default=76e6)
    p.add_argument("--length", type=float, default=100.0, help="km per arm")
    p.add_argument("--alpha", type=float, default=rates.STANDARD_FIBER_DB_PER_KM, help="single-copy dB/km")
    p.add_argument("--alpha-two-copy", type=float, default=rates.STANDARD_FIBER_DB_PER_KM)
    p.add_argument("--Y", type=float, default=0.8)
    p.add_argument("--eta", type=float, default=1.0)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


_STATE_KEYS = {"Fp": "Fp", "A": "A", "B": "B", "C": "C", "Ff": "Ff", "Fa": "Fa", "bf_share": "bf_share"}


def _point_from_args(args) -> tuple[str, dict, str, str, float]:
    """Merge config ([state]/[model]/[sweep] scenario, variant) with command-line flags."""
    values: dict[str, float] = {}
    scenario, variant, model, eta = None, "standard", "ideal", 1.0
    if args.config:
        sec = read_sections(Path(args.config).read_text(encoding="utf-8"))
        for key, (value, line) in sec["state"].items():
            if key == "mode":
                continue
            try:
                values[key] = float(value)
            except ValueError:
                raise ConfigError(f"{key}: not a number: {value!r}", line) from None
        if "scenario" in sec["sweep"]:
            scenario = sec["sweep"]["scenario"][0]
        if "variant" in sec["sweep"]:
            variant = sec["sweep"]["variant"][0]
        if "model" in sec["model"]:
            model = sec["model"]["model"][0]
        if "eta" in sec["model"]:
            eta = float(sec["model"]["eta"][0])
        if "seed" in sec["model"] and args.seed is None:
            args.seed = int(sec["model"]["seed"][0])
    for attr, key in _STATE_KEYS.items():
        v = getattr(args, attr, None)
        if v is not None:
            values[key] = v
    scenario = args.scenario or scenario
    variant = args.variant or variant
    model = args.model or model
    eta = args.eta if args.eta is not None else eta
    if scenario is None:
        raise UsageError("--scenario is required")
    for key in ("Fp", "Fa" if scenario.startswith("aux") else "Ff") + (("A",) if scenario in ("s3", "aux-s3") else ()):
        if key not in values:
            raise UsageError(f"missing required parameter --{key}")
    for key, v in values.items():
        if not (0.0 <= v <= 1.0):
            raise UsageError(f"--{key}={v} outside [0, 1]")
    if not (0.0 <= eta <= 1.0):
        raise UsageError(f"--eta={eta} outside [0, 1]")
    if model == "ideal" and eta != 1.0:
        model = "eq9"
    values["eta"] = eta
    return scenario, values, variant, model, eta


def cmd_analytic(args) -> int:
    scenario, values, variant, model, eta = _point_from_args(args)
    pt = build_point(scenario, values)
    if not pt.feasible:
        raise UsageError("polarization weights do not sum to 1")
    row = evaluate_point(pt, variant, model, "analytic")
    if args.format == "csv" or args.out:
        _emit(rows_to_csv([row]), args.out)
        if not args.out:
            return 0
    print(f"F_p'={fmt(row.F_p_prime)} Y={fmt(row.Y)} G={fmt(row.G)}")
    return 0


def cmd_sweep(args) -> int:
    if args.config:
        specs = parse_config(Path(args.config).read_text(encoding="utf-8"))
    elif args.preset:
        specs = parse_config(f"[sweep]\npreset = {args.preset}\n")
    else:
        raise UsageError("sweep needs --config or --preset")
    if args.steps is not None:
        if args.steps < 2:
            raise UsageError("--steps must be at least 2")
        specs = [replace(s, x=replace(s.x, steps=args.steps), y=replace(s.y, steps=args.steps)) for s in specs]
    if args.sources:
        specs = [replace(s, sources=tuple(x.strip() for x in args.sources.split(","))) for s in specs]
    out = args.out or specs[0].output
    text = run_sweep(specs, out=out, seed=args.seed, workers=args.workers)
    if not out:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(text.splitlines()) - 1} rows to {out} (+ {out}.meta)")
    return 0


def cmd_oracle_check(args) -> int:
    results = checks.run_all(args.grid)
    for r in results:
        print(r.line())
    table = results[0]
    print(table.detail.split(" (")[0])
    return 0 if all(r.passed for r in results) else 1


def cmd_montecarlo(args) -> int:
    scenario, values, variant, model, eta = _point_from_args(args)
    if model == "eq9":
        raise UsageError("Monte Carlo needs a physical model: --model per-photon or per-pair")
    seed = args.seed if args.seed is not None else 0
    pt = build_point(scenario, values)
    if not pt.feasible:
        raise UsageError("polarization weights do not sum to 1")
    h = point_state(pt)
    m = ConversionModel(MODELS[model], eta)
    if args.mode == "shots":
        row = evaluate_point(pt, variant, model, "montecarlo", shots=args.shots, seed=seed)
        _emit(rows_to_csv([row]), args.out)
        return 0
    d = montecarlo.DetectionParams(
        pair_rate_per_pulse=args.pair_prob, rep_rate=args.rep_rate, T_A=args.TA, T_B=args.TB,
        detector_efficiency=args.det_eff, coincidence_window=args.window, duration=args.duration,
        rng_seed=seed, jitter=args.jitter,
    )
    streams, truth = montecarlo.simulate_event_stream(d, h, variant, m)
    kept, discarded = montecarlo.count_coincidences(streams, d.coincidence_window)
    if args.events_out:
        Path(args.events_out).write_text(streams.to_csv(), encoding="utf-8", newline="")
    f = truth.F_hat
    row = ResultRow(scenario, variant, model, pt.F_p, pt.A, pt.B, pt.C, pt.F_aux, eta, f, truth.Y_hat,
                    None if f is None else f - pt.F_p, "montecarlo", truth.n_total, truth.ci95_F)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pulses", "pairs", "kept_coincidences", "discarded_coincidences", "kept_rate_hz"])
    rate = kept / d.duration if d.duration > 0 else None
    w.writerow([d.n_pulses, truth.n_total, kept, discarded, fmt(rate)])
    _emit(rows_to_csv([row]) + "\n" + buf.getvalue(), args.out)
    return 0


def cmd_rates(args) -> int:
    if args.preset == "paper-pet":
        single, two = rates.pet_comparison_params()
    elif args.preset == "paper-psm":
        single, two = rates.psm_comparison_params()
    else:
        single = rates.RateParams(args.p, args.rep_rate, args.length, args.alpha, args.Y, args.eta,
                                  rates.Scheme.SINGLE_COPY)
        two = rates.RateParams(args.p, args.rep_rate, args.length, args.alpha_two_copy, args.Y, 1.0,
                               rates.Scheme.TWO_COPY)
    ratio = rates.rate_ratio(single, two)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "p", "rep_rate_hz", "length_km", "attenuation_db_per_km", "Y", "eta",
                "source", "transmission", "yield", "conversion", "rate_hz", "ratio_to_two_copy"])
    for r in (single, two):
        res = rates.distillation_rate(r)
        f = res.factors
        w.writerow([r.scheme.value, fmt(r.p), fmt(r.rep_rate), fmt(r.fiber_length_km), fmt(r.attenuation_db_per_km),
                    fmt(r.Y), fmt(r.eta), fmt(f["source"]), fmt(f["transmission"]), fmt(f["yield"]),
                    fmt(f["conversion"]), fmt(res.rate_hz), fmt(rates.rate_ratio(r, two))])
    _emit(buf.getvalue(), args.out)
    if args.format != "csv" or args.out:
        print(f"ratio single-copy/two-copy = {fmt(ratio)}")
    return 0


COMMANDS = {
    "analytic": cmd_analytic,
    "sweep": cmd_sweep,
    "oracle-check": cmd_oracle_check,
    "montecarlo": cmd_montecarlo,
    "rates": cmd_rates,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"hyperdistill {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
