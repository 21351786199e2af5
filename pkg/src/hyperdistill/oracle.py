"""Brute-force 16-dimensional density-matrix engine.

Basis order is ``|p_A f_A p_B f_B>`` with H=0, V=1, w_s=0, w_i=1 and index
``8*p_A + 4*f_A + 2*p_B + f_B``. Everything here is dense numpy linear algebra
on tiny matrices; it is the reference the probability and Monte Carlo paths
are checked against.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from hyperdistill.bellspace import FREQ_BELLS, POL_BELLS, FreqBell, PolBell, freq_bell_vector, pol_bell_vector
from hyperdistill.channels import HyperState

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIG_FLOOR = -1e-10
NOTHING_KEPT = 1e-15


class ModelMismatchError(ValueError):
    """A conversion model was used where it has no meaning (closed-form eta correction vs. channel)."""


class ConversionKind(str, enum.Enum):
    IDEAL = "ideal"
    ETA_CORRECTED = "eq9"
    PER_PHOTON = "per-photon"
    PER_PAIR = "per-pair"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ConversionModel:
    """Frequency-converter imperfection model with efficiency ``eta``.

    ``PER_PHOTON``: each converter fires independently with probability eta.
    ``PER_PAIR``: both fire together with probability eta, otherwise neither.
    ``ETA_CORRECTED``: no channel; selects the closed-form eta-corrected fidelities.
    """

    kind: ConversionKind = ConversionKind.IDEAL
    eta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ConversionKind(self.kind))
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError(f"eta={self.eta!r} outside [0, 1]")
        if self.kind is ConversionKind.IDEAL and self.eta != 1.0:
            raise ValueError("ideal conversion has eta = 1")

    @property
    def is_ideal(self) -> bool:
        return self.kind is ConversionKind.IDEAL or self.eta == 1.0

    def branches(self) -> list[tuple[str, float, bool, bool]]:
        """Conversion sub-branches as ``(name, probability, fires_A, fires_B)``.

        Zero-probability branches are dropped.
        """
        if self.kind is ConversionKind.ETA_CORRECTED:
            raise ModelMismatchError("eq9 is a closed form, not a conversion channel")
        eta = self.eta
        if self.is_ideal:
            out = [("both", 1.0, True, True)]
        elif self.kind is ConversionKind.PER_PAIR:
            out = [("both", eta, True, True), ("none", 1.0 - eta, False, False)]
        else:
            out = [
                ("both", eta * eta, True, True),
                ("A", eta * (1.0 - eta), True, False),
                ("B", (1.0 - eta) * eta, False, True),
                ("none", (1.0 - eta) ** 2, False, False),
            ]
        return [b for b in out if b[1] > 0.0]


IDEAL = ConversionModel()


def _index(pA: int, fA: int, pB: int, fB: int) -> int:
    return 8 * pA + 4 * fA + 2 * pB + fB


def _bits(i: int) -> tuple[int, int, int, int]:
    return (i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1


def pol_freq_to_photon_order(vec_pol: np.ndarray, vec_freq: np.ndarray) -> np.ndarray:
    """Kron a polarization 4-vector with a frequency 4-vector into pA fA pB fB order."""
    v = np.kron(vec_pol, vec_freq).reshape(2, 2, 2, 2)  # pA pB fA fB
    return v.transpose(0, 2, 1, 3).reshape(16)


def product_bell_vector(p: PolBell, f: FreqBell) -> np.ndarray:
    return pol_freq_to_photon_order(pol_bell_vector(p), freq_bell_vector(f))


@lru_cache(maxsize=None)
def _bell_basis() -> np.ndarray:
    """16x16 matrix whose column 4*i+j is product_bell_vector(POL_BELLS[i], FREQ_BELLS[j])."""
    cols = [product_bell_vector(p, f) for p in POL_BELLS for f in FREQ_BELLS]
    return np.column_stack(cols)


def bell_basis() -> np.ndarray:
    return _bell_basis().copy()


def dm_from_hyper(h: HyperState) -> np.ndarray:
    if not isinstance(h, HyperState):
        raise TypeError("dm_from_hyper expects a HyperState")
    w = h.joint_weights().reshape(16)
    if abs(w.sum() - 1.0) > TRACE_TOL or (w < 0).any():
        raise ValueError("hyper state weights are not normalized")
    basis = _bell_basis()
    rho = (basis * w) @ basis.conj().T
    return rho


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


@lru_cache(maxsize=None)
def _cnot(side_a: bool, side_b: bool) -> np.ndarray:
    U = np.zeros((16, 16))
    for i in range(16):
        pA, fA, pB, fB = _bits(i)
        if side_a and pA:
            fA ^= 1
        if side_b and pB:
            fB ^= 1
        U[_index(pA, fA, pB, fB), i] = 1.0
    U.setflags(write=False)
    return U


def cnot_unitary() -> np.ndarray:
    """Both photons: flip frequency iff the photon is V polarized."""
    return _cnot(True, True).astype(complex)


def one_sided_cnot(side: str) -> np.ndarray:
    """Frequency flip on Alice's (``"A"``) or Bob's (``"B"``) photon only."""
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return _cnot(side == "A", side == "B").astype(complex)


def branch_unitary(fires_a: bool, fires_b: bool) -> np.ndarray:
    return _cnot(bool(fires_a), bool(fires_b)).astype(complex)


def conversion_channel(m: ConversionModel) -> list[np.ndarray]:
    """Kraus operators of the imperfect bilateral frequency converter."""
    return [np.sqrt(prob) * branch_unitary(fa, fb) for _, prob, fa, fb in m.branches()]


def apply_channel(rho: np.ndarray, kraus: list[np.ndarray]) -> np.ndarray:
    return sum(K @ rho @ K.conj().T for K in kraus)


def kraus_completeness(kraus: list[np.ndarray]) -> np.ndarray:
    return sum(K.conj().T @ K for K in kraus)


_HAD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_I2 = np.eye(2)


@lru_cache(maxsize=None)
def _hadamard_pol() -> np.ndarray:
    # single-photon factor acts on (p, f) with p the more significant bit
    local = np.kron(_HAD, _I2)
    return np.kron(local, local)


def hadamard_pol_unitary() -> np.ndarray:
    return _hadamard_pol().astype(complex)


def apply_hadamard_pol(rho: np.ndarray) -> np.ndarray:
    U = _hadamard_pol()
    return U @ rho @ U.conj().T


def postselect_equal_frequency(rho: np.ndarray, invert: bool = False) -> tuple[np.ndarray | None, float]:
    """Measure both photons' frequency and keep equal (or, with ``invert``, unequal) outcomes.

    Returns the conditional 4x4 polarization state and the keep probability.
    When less than 1e-15 is kept the state is ``None``.
    """
    r = np.asarray(rho).reshape(2, 2, 2, 2, 2, 2, 2, 2)  # pA fA pB fB, pA' fA' pB' fB'
    pol = np.zeros((2, 2, 2, 2), dtype=complex)
    for fA in (0, 1):
        for fB in (0, 1):
            if (fA == fB) == invert:
                continue
            pol += r[:, fA, :, fB, :, fA, :, fB]
    pol = pol.reshape(4, 4)
    p_keep = float(np.real(np.trace(pol)))
    if p_keep < NOTHING_KEPT:
        return None, max(p_keep, 0.0)
    return pol / p_keep, p_keep


def fidelity_to(b: PolBell, rho_pol: np.ndarray) -> float:
    v = pol_bell_vector(b)
    return float(np.real(v.conj() @ rho_pol @ v))


def bell_decomposition(vec: np.ndarray) -> np.ndarray:
    """Amplitudes of a 16-vector in the product Bell basis, shape (4, 4) [pol, freq]."""
    return (_bell_basis().conj().T @ np.asarray(vec)).reshape(4, 4)


def check_density_matrix(rho: np.ndarray, trace: float = 1.0) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, has the given trace and is PSD."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (4, 16):
        raise ValueError(f"bad density matrix shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - trace) > TRACE_TOL:
        raise ValueError(f"trace {np.trace(rho)!r} != {trace}")
    if np.linalg.eigvalsh(rho).min() < EIG_FLOOR:
        raise ValueError("density matrix has a negative eigenvalue")


def _fmt(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def dump_matrix(rho: np.ndarray) -> str:
    """Plain-text dump, one ``re+imj`` entry per cell, row-major."""
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    header = f"dim={n} basis=pAfApBfB" if n == 16 else f"dim={n} basis=pApB"
    rows = [" ".join(_fmt(z) for z in row) for row in rho]
    return "\n".join([header, *rows]) + "\n"


def load_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n = int(lines[0].split()[0].split("=")[1])
    rows = [[complex(tok) for tok in ln.split()] for ln in lines[1 : n + 1]]
    return np.array(rows, dtype=complex)


@dataclass(frozen=True)
class OracleResult:
    rho_pol: np.ndarray | None
    p_keep: float
    fidelity: float | None


def evolve(h: HyperState, model: ConversionModel = IDEAL, hadamard: bool = False) -> OracleResult:
    """Full pipeline: build, (Hadamard), convert, postselect, (undo Hadamard), read fidelity to Psi+."""
    rho = dm_from_hyper(h)
    if hadamard:
        rho = apply_hadamard_pol(rho)
    rho = apply_channel(rho, conversion_channel(model))
    rho_pol, p_keep = postselect_equal_frequency(rho, invert=hadamard)
    if rho_pol is None:
        return OracleResult(None, p_keep, None)
    if hadamard:
        had2 = np.kron(_HAD, _HAD)
        rho_pol = had2 @ rho_pol @ had2.conj().T
    return OracleResult(rho_pol, p_keep, fidelity_to(PolBell.PSI_PLUS, rho_pol))


def branch_transition_probs(fires_a: bool, fires_b: bool) -> np.ndarray:
    """|<out|U|in>|^2 over product Bell states, shape (4, 4, 4, 4) [in_p, in_f, out_p, out_f]."""
    B = _bell_basis()
    amp = B.conj().T @ branch_unitary(fires_a, fires_b) @ B  # [out, in]
    probs = np.abs(amp) ** 2
    probs[probs < 1e-15] = 0.0
    return probs.T.reshape(4, 4, 4, 4)
