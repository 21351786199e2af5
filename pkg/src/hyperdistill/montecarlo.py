"""Shot-level and detector-level stochastic simulation of the distillation round.

Random numbers come from numpy's ``PCG64`` bit generator. Shots are processed
in fixed-size chunks, chunk ``k`` seeded with ``SeedSequence(seed,
spawn_key=(k,))``, so tallies do not depend on how chunks are spread over
workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from hyperdistill import oracle
from hyperdistill.bellspace import FREQ_BELLS, POL_BELLS, FreqBell, PolBell, hadamard_relabel, keep_decision
from hyperdistill.channels import HyperState
from hyperdistill.oracle import ConversionKind, ConversionModel, ModelMismatchError
from hyperdistill.protocol import ProtocolVariant, _transition_probs

RNG_ALGORITHM = "PCG64"
CHUNK = 1 << 18
Z95 = 1.96
DEFAULT_WINDOW_PS = 1000
DETECTORS = ("A0", "A1", "B0", "B1")

_PSI_PLUS = POL_BELLS.index(PolBell.PSI_PLUS)


@dataclass(frozen=True)
class ShotResult:
    n_total: int
    n_kept: int
    n_kept_psi_plus: int

    def __post_init__(self):
        if not (0 <= self.n_kept_psi_plus <= self.n_kept <= self.n_total):
            raise ValueError("inconsistent tallies")

    @property
    def F_hat(self) -> float | None:
        return self.n_kept_psi_plus / self.n_kept if self.n_kept else None

    @property
    def Y_hat(self) -> float | None:
        return self.n_kept / self.n_total if self.n_total else None

    @property
    def se_F(self) -> float | None:
        f = self.F_hat
        return None if f is None else math.sqrt(f * (1.0 - f) / self.n_kept)

    @property
    def se_Y(self) -> float | None:
        y = self.Y_hat
        return None if y is None else math.sqrt(y * (1.0 - y) / self.n_total)

    @property
    def ci95_F(self) -> float | None:
        se = self.se_F
        return None if se is None else Z95 * se

    @property
    def ci95_Y(self) -> float | None:
        se = self.se_Y
        return None if se is None else Z95 * se

    def __add__(self, other: "ShotResult") -> "ShotResult":
        return ShotResult(
            self.n_total + other.n_total,
            self.n_kept + other.n_kept,
            self.n_kept_psi_plus + other.n_kept_psi_plus,
        )


def _cdf(weights: np.ndarray) -> np.ndarray:
    """Cumulative sum along the last axis, pinned to exactly 1 from the last nonzero cell on."""
    w = np.asarray(weights, dtype=float)
    c = np.cumsum(w, axis=-1)
    last = w.shape[-1] - 1 - np.argmax((w > 0)[..., ::-1], axis=-1)
    cols = np.arange(w.shape[-1])
    return np.where(cols >= last[..., None], 1.0, c)


class _Sampler:
    """Vectorized per-shot sampler of (input Bell pair, converter branch, output Bell pair)."""

    def __init__(self, h: HyperState, v: ProtocolVariant, m: ConversionModel):
        if m.kind is ConversionKind.ETA_CORRECTED:
            raise ModelMismatchError("Monte Carlo needs a physical conversion model, not eq9")
        self.v = ProtocolVariant(v)
        self.invert = self.v is ProtocolVariant.HADAMARD
        self.joint_cdf = _cdf(h.joint_weights().reshape(16))
        self.eta = 1.0 if m.is_ideal else m.eta
        self.per_photon = m.kind is ConversionKind.PER_PHOTON
        # out-state CDF per (branch code, source pol, in freq); code = 2*fires_A + fires_B
        cdf = np.zeros((4, 4, 4, 16))
        for code in range(4):
            cdf[code] = _cdf(_transition_probs(bool(code & 2), bool(code & 1)).reshape(4, 4, 16))
        self.out_cdf = cdf
        # branches with a single possible output (both or neither converter fires)
        self.fixed_out = np.full((4, 4, 4), -1, dtype=np.int64)
        for code in (0, 3):
            t = _transition_probs(bool(code & 2), bool(code & 1)).reshape(4, 4, 16)
            self.fixed_out[code] = np.argmax(t, axis=-1)
        src = [POL_BELLS.index(hadamard_relabel(p)) if self.invert else i for i, p in enumerate(POL_BELLS)]
        self.src_pol = np.array(src)
        final = [POL_BELLS.index(hadamard_relabel(p)) if self.invert else i for i, p in enumerate(POL_BELLS)]
        self.final_pol = np.array(final)
        self.keep_freq = np.array([keep_decision(f, invert=self.invert).value == "keep" for f in FREQ_BELLS])

    def sample(self, rng: np.random.Generator, n: int):
        """Return (final polarization index, output frequency index) arrays of length ``n``."""
        joint = np.minimum(np.searchsorted(self.joint_cdf, rng.random(n), side="right"), 15)
        pol, freq = np.divmod(joint, 4)
        src = self.src_pol[pol]
        if self.eta == 1.0:
            code = np.full(n, 3, dtype=np.int64)
        elif self.per_photon:
            code = 2 * (rng.random(n) < self.eta) + (rng.random(n) < self.eta)
        else:
            code = 3 * (rng.random(n) < self.eta)
        out = self.fixed_out[code, src, freq]
        spread = np.flatnonzero(out < 0)
        if spread.size:
            rows = self.out_cdf[code[spread], src[spread], freq[spread]]
            draw = (rng.random(spread.size)[:, None] >= rows).sum(axis=1)
            out[spread] = np.minimum(draw, 15)
        out_pol, out_freq = np.divmod(out, 4)
        return self.final_pol[out_pol], out_freq

    def tally(self, final_pol: np.ndarray, out_freq: np.ndarray) -> ShotResult:
        kept = self.keep_freq[out_freq]
        good = kept & (final_pol == _PSI_PLUS)
        return ShotResult(int(final_pol.size), int(kept.sum()), int(good.sum()))


def _chunk_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def simulate_shots(
    n: int,
    h: HyperState,
    v: ProtocolVariant = ProtocolVariant.STANDARD,
    m: ConversionModel = oracle.IDEAL,
    seed: int = 0,
    workers: int = 1,
) -> ShotResult:
    """Sample ``n`` pairs through the protocol and tally kept and Psi+ outcomes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    sampler = _Sampler(h, v, m)
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])

    def run_chunk(k: int) -> ShotResult:
        return sampler.tally(*sampler.sample(_chunk_rng(seed, k), sizes[k]))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, range(len(sizes))))
    else:
        parts = [run_chunk(k) for k in range(len(sizes))]
    total = ShotResult(0, 0, 0)
    for part in parts:
        total = total + part
    return total


@dataclass(frozen=True)
class EventRecord:
    time_tag: int
    detector: str


@dataclass(frozen=True)
class DetectionParams:
    """Source, link and detector settings for the event-level simulation.

    ``coincidence_window`` and ``jitter`` are in picoseconds. The default window
    is a placeholder, not a measured value.
    """

    pair_rate_per_pulse: float = 1e-3
    rep_rate: float = 76e6
    T_A: float = 1.0
    T_B: float = 1.0
    detector_efficiency: float = 1.0
    coincidence_window: float = DEFAULT_WINDOW_PS
    duration: float = 1e-3
    rng_seed: int = 0
    jitter: float = 0.0

    def __post_init__(self):
        for name in ("pair_rate_per_pulse", "T_A", "T_B", "detector_efficiency"):
            x = getattr(self, name)
            if not (0.0 <= x <= 1.0):
                raise ValueError(f"{name}={x!r} outside [0, 1]")
        if self.coincidence_window <= 0:
            raise ValueError("coincidence window must be positive")
        if self.rep_rate <= 0 or self.duration < 0 or self.jitter < 0:
            raise ValueError("rep_rate must be positive; duration and jitter nonnegative")

    @property
    def period_ps(self) -> float:
        return 1e12 / self.rep_rate

    @property
    def n_pulses(self) -> int:
        return int(round(self.rep_rate * self.duration))


@dataclass
class EventStreams:
    """Time tags (integer ps, sorted) per detector."""

    tags: dict[str, np.ndarray] = field(default_factory=lambda: {d: np.zeros(0, dtype=np.int64) for d in DETECTORS})

    def __getitem__(self, detector: str) -> np.ndarray:
        return self.tags[detector]

    def records(self) -> list[EventRecord]:
        """All events merged in time order (ties broken by detector name)."""
        out = [EventRecord(int(t), d) for d in DETECTORS for t in self.tags[d]]
        out.sort(key=lambda e: (e.time_tag, e.detector))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_tag_ps", "detector"])
        for e in self.records():
            w.writerow([e.time_tag, e.detector])
        return buf.getvalue()


def _pair_pulses(rng: np.random.Generator, n_pulses: int, p: float) -> np.ndarray:
    """Indices of pulses carrying a pair (at most one pair per pulse)."""
    if p <= 0.0 or n_pulses == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(n_pulses, dtype=np.int64)
    chunks = []
    last = -1
    batch = max(16, int(n_pulses * p * 1.1) + 16)
    while True:
        gaps = rng.geometric(p, size=batch)
        idx = last + np.cumsum(gaps)
        chunks.append(idx[idx < n_pulses])
        if idx[-1] >= n_pulses:
            break
        last = int(idx[-1])
    return np.concatenate(chunks).astype(np.int64)


def simulate_event_stream(
    d: DetectionParams,
    h: HyperState,
    v: ProtocolVariant = ProtocolVariant.STANDARD,
    m: ConversionModel = oracle.IDEAL,
) -> tuple[EventStreams, ShotResult]:
    """Generate detector time tags; ``truth`` tallies every emitted pair before losses."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(d.rng_seed)))
    sampler = _Sampler(h, v, m)
    pulses = _pair_pulses(rng, d.n_pulses, d.pair_rate_per_pulse)
    n = pulses.size
    final_pol, out_freq = sampler.sample(rng, n)
    truth = sampler.tally(final_pol, out_freq)

    # frequency readout: phi+- -> equal outcomes, psi+- -> opposite, each 50/50
    f_a = (rng.random(n) < 0.5).astype(np.int64)
    equal = np.isin(out_freq, [FREQ_BELLS.index(FreqBell.PHI_PLUS), FREQ_BELLS.index(FreqBell.PHI_MINUS)])
    f_b = np.where(equal, f_a, 1 - f_a)
    alive_a = rng.random(n) < d.T_A * d.detector_efficiency
    alive_b = rng.random(n) < d.T_B * d.detector_efficiency

    times = np.rint(pulses * d.period_ps).astype(np.int64)
    if d.jitter > 0:
        t_a = times + np.rint(rng.normal(0.0, d.jitter, n)).astype(np.int64)
        t_b = times + np.rint(rng.normal(0.0, d.jitter, n)).astype(np.int64)
    else:
        t_a = t_b = times
    tags = {
        "A0": np.sort(t_a[alive_a & (f_a == 0)]),
        "A1": np.sort(t_a[alive_a & (f_a == 1)]),
        "B0": np.sort(t_b[alive_b & (f_b == 0)]),
        "B1": np.sort(t_b[alive_b & (f_b == 1)]),
    }
    return EventStreams(tags), truth


def _merge_side(streams, names: tuple[str, str]) -> tuple[np.ndarray, np.ndarray]:
    t0, t1 = streams[names[0]], streams[names[1]]
    t = np.concatenate([t0, t1])
    label = np.concatenate([np.zeros(len(t0), dtype=np.int8), np.ones(len(t1), dtype=np.int8)])
    order = np.lexsort((label, t))
    return t[order], label[order]


def count_coincidences(streams, window: float) -> tuple[int, int]:
    """Greedy earliest-match pairing of A-side and B-side events within ``window``.

    Returns ``(kept, discarded)``: A0-B0 and A1-B1 coincidences are kept,
    A0-B1 and A1-B0 discarded. Each event is used at most once.
    """
    ta, la = _merge_side(streams, ("A0", "A1"))
    tb, lb = _merge_side(streams, ("B0", "B1"))
    kept = discarded = 0
    i = j = 0
    na, nb = len(ta), len(tb)
    while i < na and j < nb:
        a = ta[i]
        b = tb[j]
        if b < a - window:
            j += 1
        elif b > a + window:
            i += 1
        else:
            if la[i] == lb[j]:
                kept += 1
            else:
                discarded += 1
            i += 1
            j += 1
    return kept, discarded
