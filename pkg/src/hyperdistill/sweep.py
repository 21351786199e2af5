"""Config parsing, parameter-grid sweeps and CSV emission.

Config files are plain ``key = value`` lines grouped in ``[sweep]``,
``[state]``, ``[model]`` and ``[output]`` sections; ``#`` starts a comment.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from hyperdistill import __version__, analytic, montecarlo, protocol
from hyperdistill.channels import (
    AUX_BITFLIP,
    LINEAR,
    HyperState,
    auxiliary_bitflip,
    freq_dephasing,
    pol_mix,
)
from hyperdistill.oracle import ConversionKind, ConversionModel

COLUMNS = (
    "scenario", "variant", "model", "F_p", "A", "B", "C", "F_f_or_F_a", "eta",
    "F_p_prime", "Y", "G", "source", "n_shots", "ci",
)
UNDEF = "undef"
SCENARIOS = ("s1", "s2", "s3", "aux-s1", "aux-s3")
SOURCES = ("analytic", "probability", "oracle", "montecarlo")
PARAMS = ("Fp", "A", "B", "C", "Ff", "Fa", "eta", "bf_share")
MODELS = {"ideal": ConversionKind.IDEAL, "eq9": ConversionKind.ETA_CORRECTED,
          "per-photon": ConversionKind.PER_PHOTON, "per-pair": ConversionKind.PER_PAIR}
DEFAULT_STEPS = 51
DEFAULT_SHOTS = 10_000
# split of the non-phase-flip error between Phi+ and Phi- when B, C are not given
DEFAULT_BF_SHARE = {"s1": 1.0, "aux-s1": 1.0, "s3": 0.5, "aux-s3": 0.5}

SECTION_KEYS = {
    "sweep": {"preset", "scenario", "x", "y", "steps", "x_steps", "y_steps", "variant", "sources"},
    "state": {"Fp", "A", "B", "C", "Ff", "Fa", "mode", "bf_share"},
    "model": {"model", "eta", "shots", "seed", "workers"},
    "output": {"path"},
}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int = DEFAULT_STEPS

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    scenario: str
    x: Axis
    y: Axis
    fixed: dict = field(default_factory=dict)
    variant: str = "standard"
    model: str = "ideal"
    eta: float = 1.0
    sources: tuple[str, ...] = ("analytic",)
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    workers: int = 1
    output: str | None = None
    name: str = ""

    def conversion_model(self) -> ConversionModel:
        return ConversionModel(MODELS[self.model], self.eta)

    @property
    def freq_key(self) -> str:
        return "Fa" if self.scenario.startswith("aux") else "Ff"


def _preset(name: str) -> list[dict]:
    fp = ("Fp", 0.0, 1.0)
    presets = {
        "fig2a": [dict(scenario="s1", x=fp, y=("Ff", 0.0, 1.0))],
        "fig2b": [dict(scenario="s3", x=fp, y=("Ff", 0.0, 1.0), fixed={"A": 0.1})],
        "fig3a": [dict(scenario="aux-s1", x=fp, y=("Fa", 0.0, 1.0))],
        "fig3b": [dict(scenario="aux-s3", x=fp, y=("Fa", 0.0, 1.0), fixed={"A": 0.1})],
        "figA1": [
            dict(scenario="s3", x=fp, y=("Ff", 0.0, 1.0), fixed={"A": a}, name=f"figA1-A{round(a * 100)}")
            for a in (0.1, 0.3, 0.5, 0.7, 0.9)
        ],
    }
    if name not in presets:
        raise KeyError(name)
    out = []
    for p in presets[name]:
        p.setdefault("name", name)
        out.append(p)
    return out


def _float(key: str, value: str, line: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {value!r}", line) from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: not finite", line)
    return x


def _int(key: str, value: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {value!r}", line) from None


def _axis_text(key: str, value: str, line: int) -> tuple[str, float, float]:
    parts = value.split()
    if len(parts) == 2 and ".." in parts[1]:
        lo, hi = parts[1].split("..", 1)
    elif len(parts) == 3:
        lo, hi = parts[1], parts[2]
    else:
        raise ConfigError(f"{key}: expected 'NAME lo..hi', got {value!r}", line)
    name = parts[0]
    if name not in PARAMS:
        raise ConfigError(f"{key}: unknown sweep parameter {name!r}", line)
    return name, _float(key, lo, line), _float(key, hi, line)


def read_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    """Split config text into ``{section: {key: (value, line)}}``."""
    sections: dict[str, dict[str, tuple[str, int]]] = {s: {} for s in SECTION_KEYS}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or line[1:-1].strip() not in SECTION_KEYS:
                raise ConfigError(f"unknown section {line!r}", lineno)
            current = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        if current is None:
            raise ConfigError("key outside of a section", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SECTION_KEYS[current]:
            raise ConfigError(f"unknown key: {key} in [{current}]", lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key: {key}", lineno)
        sections[current][key] = (value, lineno)
    return sections


def _required_state(scenario: str) -> tuple[str, ...]:
    need = ["Fp"]
    if scenario in ("s3", "aux-s3"):
        need.append("A")
    need.append("Fa" if scenario.startswith("aux") else "Ff")
    return tuple(need)


def parse_config(text: str) -> list[SweepSpec]:
    """Parse a sweep config; a preset may expand to several sweeps."""
    sec = read_sections(text)
    sw, st, md, outp = sec["sweep"], sec["state"], sec["model"], sec["output"]

    bases: list[dict] = [{}]
    if "preset" in sw:
        value, line = sw["preset"]
        try:
            bases = _preset(value)
        except KeyError:
            raise ConfigError(f"unknown preset {value!r}", line) from None

    specs = []
    for base in bases:
        scenario = base.get("scenario")
        if "scenario" in sw:
            scenario, line = sw["scenario"]
            if scenario not in SCENARIOS:
                raise ConfigError(f"unknown scenario {scenario!r}", line)
        if scenario is None:
            raise ConfigError("missing required key: scenario")

        steps = DEFAULT_STEPS
        if "steps" in sw:
            steps = _int("steps", *sw["steps"])
        axes = {}
        for key in ("x", "y"):
            if key in sw:
                name, lo, hi = _axis_text(key, *sw[key])
            elif key in base:
                name, lo, hi = base[key]
            else:
                raise ConfigError(f"missing required key: {key}")
            n = steps
            if f"{key}_steps" in sw:
                n = _int(f"{key}_steps", *sw[f"{key}_steps"])
            if n < 2:
                raise ConfigError(f"{key}: need at least 2 steps", sw.get(f"{key}_steps", sw.get("steps", ("", 0)))[1])
            if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
                raise ConfigError(f"{key}: range of {name} must lie in [0, 1]", sw.get(key, ("", 0))[1])
            axes[key] = Axis(name, lo, hi, n)
        if axes["x"].name == axes["y"].name:
            raise ConfigError("x and y sweep the same parameter", sw.get("y", ("", 0))[1])

        fixed = dict(base.get("fixed", {}))
        for key in ("Fp", "A", "B", "C", "Ff", "Fa", "bf_share"):
            if key in st:
                value, line = st[key]
                x = _float(key, value, line)
                if not (0.0 <= x <= 1.0):
                    raise ConfigError(f"{key}={x} outside [0, 1]", line)
                fixed[key] = x
        swept = {axes["x"].name, axes["y"].name}
        for key in _required_state(scenario):
            if key not in fixed and key not in swept:
                raise ConfigError(f"missing required key: {key}")
        if scenario in ("s1", "aux-s1") and fixed.get("A", 0.0) != 0.0:
            raise ConfigError("scenario 1 has no phase-flip weight A", st.get("A", ("", 0))[1])

        if "mode" in st:
            mode, line = st["mode"]
            expected = AUX_BITFLIP if scenario.startswith("aux") else LINEAR
            if mode not in (LINEAR, AUX_BITFLIP):
                raise ConfigError(f"unknown mode {mode!r}", line)
            if mode != expected:
                raise ConfigError(f"mode {mode} does not match scenario {scenario}", line)

        variant = "standard"
        if "variant" in sw:
            variant, line = sw["variant"]
            if variant not in ("standard", "hadamard"):
                raise ConfigError(f"unknown variant {variant!r}", line)
            if variant == "hadamard" and scenario.startswith("aux"):
                raise ConfigError("hadamard variant is not defined for aux-bitflip scenarios", line)

        sources: tuple[str, ...] = ("analytic",)
        if "sources" in sw:
            value, line = sw["sources"]
            sources = tuple(s.strip() for s in value.split(",") if s.strip())
            bad = [s for s in sources if s not in SOURCES]
            if bad or not sources:
                raise ConfigError(f"unknown source(s) {bad}", line)

        model, eta = "ideal", 1.0
        if "model" in md:
            model, line = md["model"]
            if model not in MODELS:
                raise ConfigError(f"unknown model {model!r}", line)
        if "eta" in md:
            eta = _float("eta", *md["eta"])
            if not (0.0 <= eta <= 1.0):
                raise ConfigError(f"eta={eta} outside [0, 1]", md["eta"][1])
        if model == "ideal" and eta != 1.0:
            raise ConfigError("model ideal requires eta = 1", md["eta"][1])
        if "eta" in swept:
            if model == "ideal":
                raise ConfigError("sweeping eta needs a non-ideal model")
        if model == "eq9":
            others = [s for s in sources if s != "analytic"]
            if others:
                raise ConfigError(f"model eq9 is a closed form; sources {others} need a physical model",
                                  md["model"][1])

        shots = _int("shots", *md["shots"]) if "shots" in md else DEFAULT_SHOTS
        if shots < 1:
            raise ConfigError("shots must be at least 1", md["shots"][1])
        seed = _int("seed", *md["seed"]) if "seed" in md else 0
        workers = _int("workers", *md["workers"]) if "workers" in md else 1
        output = outp["path"][0] if "path" in outp else None

        specs.append(SweepSpec(
            scenario=scenario, x=axes["x"], y=axes["y"], fixed=fixed, variant=variant,
            model=model, eta=eta, sources=sources, shots=shots, seed=seed, workers=workers,
            output=output, name=base.get("name", scenario),
        ))
    return specs


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    variant: str
    model: str
    F_p: float | None
    A: float | None
    B: float | None
    C: float | None
    F_f_or_F_a: float | None
    eta: float
    F_p_prime: float | None
    Y: float | None
    G: float | None
    source: str
    n_shots: int | None = None
    ci: float | None = None

    def cells(self) -> list[str]:
        return [fmt(getattr(self, c)) for c in COLUMNS]


def fmt(x) -> str:
    if x is None:
        return UNDEF
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return UNDEF
    if x == 0.0:
        x = 0.0
    return format(x, ".12g")


@dataclass(frozen=True)
class Point:
    scenario: str
    F_p: float
    A: float
    B: float
    C: float
    F_aux: float
    eta: float
    feasible: bool = True


def build_point(scenario: str, values: dict) -> Point:
    """Resolve one grid point's full polarization weights."""
    F_p = values["Fp"]
    eta = values.get("eta", 1.0)
    F_aux = values["Fa"] if scenario.startswith("aux") else values["Ff"]
    if scenario == "s2":
        A, B, C = 1.0 - F_p, 0.0, 0.0
    else:
        A = values.get("A", 0.0) if scenario in ("s3", "aux-s3") else 0.0
        rest = 1.0 - F_p - A
        if rest < -1e-9:
            return Point(scenario, F_p, A, math.nan, math.nan, F_aux, eta, feasible=False)
        rest = max(rest, 0.0)
        if "B" in values or "C" in values:
            B = values.get("B", rest - values.get("C", 0.0))
            C = values.get("C", rest - B)
            if B < -1e-12 or C < -1e-12 or abs(F_p + A + B + C - 1.0) > 1e-9:
                return Point(scenario, F_p, A, B, C, F_aux, eta, feasible=False)
            B, C = max(B, 0.0), max(C, 0.0)
        else:
            share = values.get("bf_share", DEFAULT_BF_SHARE[scenario])
            B, C = rest * share, rest * (1.0 - share)
    return Point(scenario, F_p, A, B, C, F_aux, eta)


def point_state(pt: Point) -> HyperState:
    pol = pol_mix(pt.F_p, pt.A, pt.B, pt.C)
    freq = auxiliary_bitflip(pt.F_aux) if pt.scenario.startswith("aux") else freq_dephasing(pt.F_aux)
    return HyperState(pol, freq)


def evaluate_point(pt: Point, variant: str, model: str, source: str, shots: int = DEFAULT_SHOTS,
                   seed: int = 0) -> ResultRow:
    """Evaluate one grid point with one source; infeasible or 0/0 corners give ``undef`` cells."""
    model_name = model
    base = dict(scenario=pt.scenario, variant=variant, F_p=pt.F_p, F_f_or_F_a=pt.F_aux, eta=pt.eta, source=source)
    if not pt.feasible:
        return ResultRow(model=model_name, A=pt.A, B=None, C=None, F_p_prime=None, Y=None, G=None, **base)
    weights = dict(A=pt.A, B=pt.B, C=pt.C)
    if source == "analytic":
        if pt.eta != 1.0:
            model_name = "eq9"
            if variant == "hadamard":
                # no eta-corrected closed form exists for the Hadamard-modified protocol
                return ResultRow(model=model_name, F_p_prime=None, Y=None, G=None, **weights, **base)
        params = analytic.ScenarioParams(pt.scenario, pt.F_p, pt.F_aux, pt.A, pt.B, pt.C, pt.eta, variant)
        f, y, g = analytic.evaluate(params)
        return ResultRow(model=model_name, F_p_prime=f, Y=y, G=g, **weights, **base)
    m = ConversionModel(MODELS[model], pt.eta)
    h = point_state(pt)
    if source == "montecarlo":
        res = montecarlo.simulate_shots(shots, h, variant, m, seed=seed)
        f = res.F_hat
        g = None if f is None else f - pt.F_p
        return ResultRow(model=model_name, F_p_prime=f, Y=res.Y_hat, G=g, n_shots=res.n_total, ci=res.ci95_F,
                         **weights, **base)
    out = protocol.run(h, variant, m, source=source)
    return ResultRow(model=model_name, F_p_prime=out.F_p_prime, Y=out.Y, G=out.G, **weights, **base)


def _point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1)[0])


def _eval_task(args):
    return evaluate_point(*args)


def sweep_rows(spec: SweepSpec) -> list[ResultRow]:
    """All rows of a sweep in row-major grid order (x outer, y inner), sources innermost."""
    tasks = []
    index = 0
    for xv in spec.x.values():
        for yv in spec.y.values():
            values = dict(spec.fixed)
            values[spec.x.name] = float(xv)
            values[spec.y.name] = float(yv)
            values.setdefault("eta", spec.eta)
            pt = build_point(spec.scenario, values)
            for source in spec.sources:
                tasks.append((pt, spec.variant, spec.model, source, spec.shots, _point_seed(spec.seed, index)))
            index += 1
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(_eval_task, tasks, chunksize=64))
    return [_eval_task(t) for t in tasks]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def metadata(specs: list[SweepSpec]) -> str:
    lines = [
        "tool=hyperdistill",
        f"tool_version={__version__}",
        f"rng={montecarlo.RNG_ALGORITHM}",
        f"coincidence_window_ps={montecarlo.DEFAULT_WINDOW_PS} (placeholder)",
    ]
    for i, s in enumerate(specs):
        p = f"sweep{i}."
        lines += [
            f"{p}name={s.name}",
            f"{p}scenario={s.scenario}",
            f"{p}variant={s.variant}",
            f"{p}model={s.model}",
            f"{p}eta={fmt(s.eta)}",
            f"{p}x={s.x.name} {fmt(s.x.lo)}..{fmt(s.x.hi)} steps={s.x.steps}",
            f"{p}y={s.y.name} {fmt(s.y.lo)}..{fmt(s.y.hi)} steps={s.y.steps}",
            f"{p}fixed=" + ",".join(f"{k}:{fmt(v)}" for k, v in sorted(s.fixed.items())),
            f"{p}sources={','.join(s.sources)}",
            f"{p}seed={s.seed}",
            f"{p}shots={s.shots}",
        ]
        if s.scenario in DEFAULT_BF_SHARE and "B" not in s.fixed and "C" not in s.fixed:
            share = s.fixed.get("bf_share", DEFAULT_BF_SHARE[s.scenario])
            lines.append(f"{p}bf_share={fmt(share)}" + ("" if "bf_share" in s.fixed else " (default)"))
    return "\n".join(lines) + "\n"


def run_sweep(specs, out: str | Path | None = None, seed: int | None = None, workers: int | None = None) -> str:
    """Evaluate the sweep(s) and return the CSV text; with ``out`` also write ``out`` and ``out.meta``."""
    if isinstance(specs, SweepSpec):
        specs = [specs]
    if seed is not None:
        specs = [replace(s, seed=seed) for s in specs]
    if workers is not None:
        specs = [replace(s, workers=workers) for s in specs]
    rows = []
    for s in specs:
        rows.extend(sweep_rows(s))
    text = rows_to_csv(rows)
    if out is not None:
        out = Path(out)
        out.write_text(text, encoding="utf-8", newline="")
        Path(str(out) + ".meta").write_text(metadata(specs), encoding="utf-8", newline="")
    return text


def read_rows(text: str) -> list[dict]:
    """Parse result CSV back into dicts; ``undef`` becomes ``None``, numbers become floats."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == UNDEF or v == "":
                row[k] = None
            else:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


__all__ = [
    "Axis", "ConfigError", "ResultRow", "SweepSpec", "build_point", "evaluate_point",
    "parse_config", "point_state", "read_rows", "rows_to_csv", "run_sweep", "sweep_rows",
]
