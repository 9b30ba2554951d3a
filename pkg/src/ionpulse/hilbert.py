"""State representation for N two-level ions sharing one vibrational mode.

The joint basis is |s_1 ... s_N>|n>: an N-bit electronic configuration
(bit j-1 set means ion j is in |e>) together with a Fock level n of the
collective axial mode, truncated at n_max.  Amplitudes are stored flat,
Fock index major::

    flat = fock_n * 2**N + ion_bits

so each Fock level occupies one contiguous block of 2**N amplitudes and
pulse operators can act block by block without ever forming a matrix.

Global phases are physical here: intermediate states are checked against
closed-form expressions that include their free-evolution phase factors,
so nothing is re-normalized or phase-fixed behind the caller's back.
Comparisons that should ignore a global phase go through :func:`fidelity`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

__all__ = [
    "FRAME_R",
    "FRAME_R_PRIME",
    "NORM_TOL",
    "SimulationError",
    "TrapParams",
    "Frame",
    "BasisIndex",
    "StateVector",
    "flat_index",
    "split_index",
    "ground_state",
    "dicke_extreme",
    "target_ghz",
    "fidelity",
    "excited_population",
    "fock_populations",
]

FRAME_R = "R"
FRAME_R_PRIME = "Rprime"

#: Tolerance on |norm - 1| enforced after every state-changing operation.
NORM_TOL = 1e-12


class SimulationError(RuntimeError):
    """An operation violated one of the simulator's contracts."""


@dataclass(frozen=True)
class TrapParams:
    """Static trap and drive parameters shared by a simulation run.

    n_ions:      number of two-level ions in the string (N >= 1).
    trap_freq:   angular frequency nu of the collective axial mode (rad/s).
    lamb_dicke:  Lamb-Dicke parameter eta along the trap axis.
    base_rabi:   carrier Rabi frequency Omega_0 (rad/s); fixes the overall
                 scale of every pulse duration.
    fock_cutoff: highest Fock level n_max kept in the state.  The standard
                 protocol only populates n = 1, but leave headroom: leakage
                 into the top level is treated as an error (see pulses).
    """

    n_ions: int
    trap_freq: float
    lamb_dicke: float
    base_rabi: float
    fock_cutoff: int = 4

    def __post_init__(self) -> None:
        if self.n_ions < 1:
            raise ValueError(f"n_ions must be >= 1, got {self.n_ions}")
        if self.fock_cutoff < 1:
            raise ValueError(f"fock_cutoff must be >= 1, got {self.fock_cutoff}")
        if not (self.trap_freq > 0):
            raise ValueError(f"trap_freq must be positive, got {self.trap_freq}")
        if self.lamb_dicke < 0:
            raise ValueError(f"lamb_dicke must be >= 0, got {self.lamb_dicke}")
        if self.base_rabi < 0:
            raise ValueError(f"base_rabi must be >= 0, got {self.base_rabi}")

    @property
    def n_levels(self) -> int:
        """Number of Fock levels kept, n_max + 1."""
        return self.fock_cutoff + 1

    @property
    def n_configs(self) -> int:
        """Number of electronic configurations, 2**N."""
        return 1 << self.n_ions

    @property
    def dim(self) -> int:
        return self.n_levels * self.n_configs


@dataclass(frozen=True)
class Frame:
    """Rotating frame the state is expressed in.

    ``R`` rotates at the electronic transition frequency omega_0, so the
    detuning is identically zero.  ``Rprime`` rotates at the drive
    frequency omega; ``detuning`` = omega_0 - omega is then picked up as
    an extra phase per excited ion during free evolution.
    ``reference_freq`` (omega_0 for R, omega for Rprime) is optional and
    never used by the dynamics; it is carried for reporting only.
    """

    tag: str = FRAME_R
    detuning: float = 0.0
    reference_freq: float | None = None

    def __post_init__(self) -> None:
        if self.tag not in (FRAME_R, FRAME_R_PRIME):
            raise ValueError(f"frame tag must be {FRAME_R!r} or {FRAME_R_PRIME!r}, got {self.tag!r}")
        if self.tag == FRAME_R and self.detuning != 0.0:
            raise ValueError("frame R has zero detuning by definition")


class BasisIndex(NamedTuple):
    """One joint basis state: electronic bit word plus Fock level."""

    ion_bits: int
    fock_n: int


def flat_index(params: TrapParams, ion_bits: int, fock_n: int) -> int:
    """Flat array position of |ion_bits>|fock_n> (Fock-major layout)."""
    if not 0 <= ion_bits < params.n_configs:
        raise ValueError(f"ion_bits {ion_bits} out of range for {params.n_ions} ions")
    if not 0 <= fock_n <= params.fock_cutoff:
        raise ValueError(f"fock_n {fock_n} out of range [0, {params.fock_cutoff}]")
    return fock_n * params.n_configs + ion_bits


def split_index(params: TrapParams, flat: int) -> BasisIndex:
    """Inverse of :func:`flat_index`."""
    if not 0 <= flat < params.dim:
        raise ValueError(f"flat index {flat} out of range [0, {params.dim})")
    return BasisIndex(ion_bits=flat % params.n_configs, fock_n=flat // params.n_configs)


@lru_cache(maxsize=32)
def _popcounts(n_ions: int) -> np.ndarray:
    """Number of excited ions for every bit word 0 .. 2**N - 1."""
    return np.array([bin(b).count("1") for b in range(1 << n_ions)], dtype=np.int64)


class StateVector:
    """Complex amplitudes over the joint ion-motion basis.

    A mutable value type: pulse operations update ``amplitudes`` and
    ``clock`` in place and return the same object.  Use :meth:`copy`
    before branching, e.g. one clone per point of a parameter scan.
    ``clock`` is the absolute time since the common phase origin t = 0
    and never decreases.
    """

    __slots__ = ("amplitudes", "params", "frame", "clock")

    def __init__(
        self,
        amplitudes: np.ndarray,
        params: TrapParams,
        frame: Frame,
        clock: float = 0.0,
    ) -> None:
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (params.dim,):
            raise ValueError(
                f"amplitude array has shape {amplitudes.shape}, expected ({params.dim},)"
            )
        self.amplitudes = amplitudes
        self.params = params
        self.frame = frame
        self.clock = float(clock)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.params, self.frame, self.clock)

    @property
    def blocks(self) -> np.ndarray:
        """Writable (n_levels, 2**N) view: one row per Fock level."""
        return self.amplitudes.reshape(self.params.n_levels, self.params.n_configs)

    def amplitude(self, ion_bits: int, fock_n: int) -> complex:
        return complex(self.amplitudes[flat_index(self.params, ion_bits, fock_n)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_norm(self) -> None:
        """Raise if the norm drifted beyond NORM_TOL from unity."""
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOL:
            raise SimulationError(f"state norm drifted to {norm!r} (|norm - 1| > {NORM_TOL})")

    def to_dump(self) -> dict:
        """JSON-ready dict in the documented flat order (fock-major)."""
        return {
            "n_ions": self.params.n_ions,
            "n_max": self.params.fock_cutoff,
            "frame": {
                "tag": self.frame.tag,
                "detuning": self.frame.detuning,
                "reference_freq": self.frame.reference_freq,
            },
            "clock": self.clock,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    def dump_json(self) -> str:
        return json.dumps(self.to_dump())

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"StateVector(n_ions={self.params.n_ions}, n_max={self.params.fock_cutoff}, "
            f"frame={self.frame.tag}, clock={self.clock!r}, norm={self.norm():.12f})"
        )


def _default_frame(frame: Frame | None) -> Frame:
    return frame if frame is not None else Frame(FRAME_R)


def ground_state(params: TrapParams, frame: Frame | None = None) -> StateVector:
    """All ions in |g>, motion cooled to |0>, clock at the phase origin."""
    amplitudes = np.zeros(params.dim, dtype=np.complex128)
    amplitudes[flat_index(params, 0, 0)] = 1.0
    return StateVector(amplitudes, params, _default_frame(frame), clock=0.0)


def dicke_extreme(
    params: TrapParams,
    which: str,
    fock_n: int = 0,
    frame: Frame | None = None,
) -> StateVector:
    """Extremal collective state |J,-J> ("lowest") or |J,J> ("highest").

    These are the only two Dicke states the protocol visits: all ions in
    |g> or all ions in |e>, paired with the Fock level ``fock_n``.
    """
    if which == "lowest":
        bits = 0
    elif which == "highest":
        bits = params.n_configs - 1
    else:
        raise ValueError(f"which must be 'lowest' or 'highest', got {which!r}")
    amplitudes = np.zeros(params.dim, dtype=np.complex128)
    amplitudes[flat_index(params, bits, fock_n)] = 1.0
    return StateVector(amplitudes, params, _default_frame(frame), clock=0.0)


def target_ghz(params: TrapParams, phi: float = 0.0, frame: Frame | None = None) -> StateVector:
    """Maximally entangled target (|g..g> + e^{i phi}|e..e>)/sqrt(2) with motion in |0>."""
    amplitudes = np.zeros(params.dim, dtype=np.complex128)
    amplitudes[flat_index(params, 0, 0)] = 1.0 / math.sqrt(2.0)
    amplitudes[flat_index(params, params.n_configs - 1, 0)] = np.exp(1j * phi) / math.sqrt(2.0)
    return StateVector(amplitudes, params, _default_frame(frame), clock=0.0)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to a global phase of either state."""
    if a.params != b.params:
        raise ValueError("fidelity requires states with identical trap parameters")
    if a.frame != b.frame:
        raise ValueError("fidelity requires states expressed in the same frame")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def excited_population(state: StateVector, ion_index: int) -> float:
    """Probability of finding ion ``ion_index`` (1-based) in |e>."""
    n = state.params.n_ions
    if not 1 <= ion_index <= n:
        raise ValueError(f"ion_index must be in [1, {n}], got {ion_index}")
    bit = (np.arange(state.params.n_configs) >> (ion_index - 1)) & 1
    per_config = np.abs(state.blocks) ** 2
    return float(per_config.sum(axis=0) @ bit)


def fock_populations(state: StateVector) -> np.ndarray:
    """Marginal distribution over the Fock levels 0 .. n_max."""
    return (np.abs(state.blocks) ** 2).sum(axis=1)
