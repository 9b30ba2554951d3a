"""The four laser-pulse unitaries and free evolution.

All pulses drive the same |g> <-> |e> electronic transition and are
square; only which motional transition is resonant differs:

* carrier pi/2 pulse on one ion: |g> -> (|g> + |e>)/sqrt(2),
  |e> -> (|e> - |g>)/sqrt(2), Fock level untouched.
* red-sideband (Jaynes-Cummings) pi pulse on one ion: swaps the pair
  |g, n+1> <-> |e, n> with Rabi frequency Omega_0 * eta * sqrt(n+1)/sqrt(N).
* dispersive pi pulse on one ion: flips |g, n> <-> |e, n> with Rabi
  frequency Omega_0 * eta^2 * n / N.  The n = 0 coupling vanishes
  identically, which makes this a NOT on the ion conditioned on the
  motion not being in the ground state.
* collective dispersive pi pulse: the same flip applied to every ion
  simultaneously.

Every pulse exists in two modes.  ``ideal`` applies the exact closed-form
map on the targeted transition and gives every other basis state only the
free vibrational phase exp(-i nu m t_p) accumulated during the pulse.
``physical`` rotates every coupled two-level pair by the angle its own
n-dependent Rabi frequency dictates, theta_m = pi * Omega_m / Omega_target,
with phases anchored so that theta = pi reproduces the ideal map exactly.
Off-target Fock levels therefore see imperfect transfer in physical mode,
which is the honest picture of a square pulse.

Applications are matrix-free: per-Fock-block views of the flat amplitude
array, O(dim) per pulse.  :func:`dense_matrix` builds the same unitaries
as explicit matrices through an independent kron/loop construction and is
used by the test-suite to cross-check the fast path.

Phase origin: all drive fields are taken to be in phase at t = 0, so a
pulse's phase factors depend on the absolute start time t0 carried by the
state clock.  A per-pulse ``laser_phase`` offset multiplies the raising
part of the coupling by exp(i*phase).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .hilbert import (
    SimulationError,
    StateVector,
    TrapParams,
    _popcounts,
)

__all__ = [
    "PulseKind",
    "PulseMode",
    "PulseSpec",
    "PulseError",
    "LeakageError",
    "LEAKAGE_TOL",
    "RabiLaw",
    "pulse_duration",
    "validate_pulse_spec",
    "apply_carrier_pi_half",
    "apply_jc_pulse",
    "apply_dispersive_single",
    "apply_dispersive_collective",
    "free_evolve",
    "apply_pulse",
    "dense_matrix",
]


class PulseKind(enum.Enum):
    CARRIER_PI_HALF = "carrier_pi2"
    JC_PI = "jc_pi"
    DISPERSIVE_SINGLE_PI = "disp_pi"
    DISPERSIVE_COLLECTIVE_PI = "disp_pi_all"
    WAIT = "wait"


class PulseMode(enum.Enum):
    IDEAL = "ideal"
    PHYSICAL = "physical"


class PulseError(SimulationError):
    """A pulse was mis-specified or applied to an incompatible state."""


class LeakageError(SimulationError):
    """Population reached the top Fock level, so the cutoff is no longer honest."""


#: Population allowed at n = n_max after a pulse before the truncation is
#: considered dishonest and the run aborts.
LEAKAGE_TOL = 1e-10


@dataclass(frozen=True)
class RabiLaw:
    """n-dependent Rabi frequencies of the three coupling types.

    The sideband and dispersive couplings are leading order in the
    Lamb-Dicke parameter; the single overall scale is the carrier
    frequency Omega_0 from the trap parameters.
    """

    params: TrapParams

    def carrier(self) -> float:
        return self.params.base_rabi

    def jc(self, n: int) -> float:
        """Red-sideband rate on the |g,n+1> <-> |e,n> pair."""
        p = self.params
        return p.base_rabi * p.lamb_dicke * math.sqrt(n + 1) / math.sqrt(p.n_ions)

    def dispersive(self, n: int) -> float:
        """Dispersive flip rate on Fock level n; identically zero at n = 0."""
        p = self.params
        return p.base_rabi * p.lamb_dicke**2 * n / p.n_ions


@dataclass(frozen=True)
class PulseSpec:
    """One pulse of a sequence.

    ``target_ion`` is 1-based and ignored for collective and wait steps.
    ``target_n`` labels the resonant transition: the |g,n+1> <-> |e,n>
    pair for a sideband pulse, the Fock level n for a dispersive pulse;
    ignored for carrier and wait.  ``duration`` must be given for waits
    and left None for pulses (it is derived from the Rabi frequency).
    """

    kind: PulseKind
    target_ion: int = 0
    target_n: int = 0
    mode: PulseMode = PulseMode.IDEAL
    duration: float | None = None
    laser_phase: float = 0.0


def _check_ion(params: TrapParams, ion: int) -> None:
    if not 1 <= ion <= params.n_ions:
        raise PulseError(f"target ion {ion} out of range [1, {params.n_ions}]")


def _positive_rabi(value: float, label: str) -> float:
    if not value > 0:
        raise PulseError(f"{label} Rabi frequency must be positive, got {value!r}")
    return value


def pulse_duration(spec: PulseSpec, params: TrapParams) -> float:
    """Duration of the pulse: pi/(2 Omega) for the carrier, pi/Omega otherwise."""
    law = RabiLaw(params)
    if spec.kind is PulseKind.CARRIER_PI_HALF:
        return math.pi / (2.0 * _positive_rabi(law.carrier(), "carrier"))
    if spec.kind is PulseKind.JC_PI:
        return math.pi / _positive_rabi(law.jc(spec.target_n), "sideband")
    if spec.kind in (PulseKind.DISPERSIVE_SINGLE_PI, PulseKind.DISPERSIVE_COLLECTIVE_PI):
        return math.pi / _positive_rabi(law.dispersive(spec.target_n), "dispersive")
    if spec.kind is PulseKind.WAIT:
        if spec.duration is None or spec.duration < 0:
            raise PulseError(f"wait requires duration >= 0, got {spec.duration!r}")
        return spec.duration
    raise PulseError(f"unknown pulse kind {spec.kind!r}")


def validate_pulse_spec(spec: PulseSpec, params: TrapParams) -> None:
    """Raise PulseError if the spec cannot be applied under these parameters."""
    if spec.kind is PulseKind.WAIT:
        if spec.duration is None or spec.duration < 0:
            raise PulseError(f"wait requires duration >= 0, got {spec.duration!r}")
        return
    if spec.duration is not None:
        raise PulseError("pulse durations are derived from Rabi frequencies; leave duration unset")
    if spec.kind is not PulseKind.DISPERSIVE_COLLECTIVE_PI:
        _check_ion(params, spec.target_ion)
    if spec.kind is PulseKind.JC_PI:
        if spec.target_n < 0:
            raise PulseError(f"sideband target_n must be >= 0, got {spec.target_n}")
        if spec.target_n + 1 > params.fock_cutoff:
            raise PulseError(
                f"sideband pulse on n={spec.target_n} reaches Fock level "
                f"{spec.target_n + 1} beyond the cutoff {params.fock_cutoff}"
            )
    if spec.kind in (PulseKind.DISPERSIVE_SINGLE_PI, PulseKind.DISPERSIVE_COLLECTIVE_PI):
        if spec.target_n < 1:
            raise PulseError(
                "dispersive pulse requires target_n >= 1 (its Rabi frequency is zero at n = 0)"
            )
        if spec.target_n > params.fock_cutoff:
            raise PulseError(
                f"dispersive target_n {spec.target_n} beyond the cutoff {params.fock_cutoff}"
            )
    pulse_duration(spec, params)


def _start_time(state: StateVector, t0: float | None) -> float:
    if t0 is not None and not math.isclose(t0, state.clock, rel_tol=1e-12, abs_tol=1e-12):
        raise PulseError(f"pulse start time {t0!r} does not match state clock {state.clock!r}")
    return state.clock


def _ion_view(state: StateVector, ion: int) -> np.ndarray:
    """View (n_levels, high_bits, 2, low_bits) with the ion's bit on axis 2."""
    p = state.params
    bit = ion - 1
    return state.amplitudes.reshape(p.n_levels, 1 << (p.n_ions - 1 - bit), 2, 1 << bit)


def _apply_free_phases(state: StateVector, duration: float) -> None:
    """Multiply Fock level m by exp(-i nu m duration) for every m >= 1.

    Level 0 carries no phase and is deliberately not touched, so its
    amplitudes stay bit-identical.
    """
    p = state.params
    levels = np.arange(1, p.n_levels)
    state.blocks[1:] *= np.exp(-1j * p.trap_freq * levels * duration)[:, None]


def _half_angle(theta: float) -> tuple[float, float]:
    """(cos, sin) of theta/2, exact at theta = pi so a pi pulse is a clean flip."""
    if theta == math.pi:
        return 0.0, 1.0
    return math.cos(theta / 2.0), math.sin(theta / 2.0)


def _finish(state: StateVector, t0: float, duration: float, leakage_check: bool = True) -> StateVector:
    state.clock = t0 + duration
    state.check_norm()
    if leakage_check:
        top = float(np.sum(np.abs(state.blocks[-1]) ** 2))
        if top > LEAKAGE_TOL:
            raise LeakageError(
                f"population {top:.3e} at the Fock cutoff n={state.params.fock_cutoff}; "
                "raise fock_cutoff for a trustworthy simulation"
            )
    return state


def apply_carrier_pi_half(
    state: StateVector,
    ion: int,
    t0: float | None = None,
    *,
    laser_phase: float = 0.0,
    check_leakage: bool = True,
) -> StateVector:
    """Resonant pi/2 pulse on one ion.

    Maps |g> -> (|g> + e^{i phase}|e>)/sqrt(2) and
    |e> -> (|e> - e^{-i phase}|g>)/sqrt(2) on every Fock level, each level
    additionally picking up its free phase exp(-i nu m t_p).
    """
    p = state.params
    _check_ion(p, ion)
    t0 = _start_time(state, t0)
    duration = math.pi / (2.0 * _positive_rabi(RabiLaw(p).carrier(), "carrier"))
    up = np.exp(1j * laser_phase)
    view = _ion_view(state, ion)
    g = view[:, :, 0, :].copy()
    e = view[:, :, 1, :].copy()
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    view[:, :, 0, :] = (g - np.conj(up) * e) * inv_sqrt2
    view[:, :, 1, :] = (up * g + e) * inv_sqrt2
    _apply_free_phases(state, duration)
    return _finish(state, t0, duration, check_leakage)


def apply_jc_pulse(
    state: StateVector,
    ion: int,
    target_n: int,
    t0: float | None = None,
    mode: PulseMode | str = PulseMode.IDEAL,
    *,
    laser_phase: float = 0.0,
    check_leakage: bool = True,
) -> StateVector:
    """Red-sideband pi pulse on one ion, resonant with |g,n+1> <-> |e,n>.

    On the targeted pair the exact map is

        |e, n>   ->  i exp(-i nu [t0 + (n+1) t_p]) e^{-i phase} |g, n+1>
        |g, n+1> ->  i exp(+i nu [t0 - n t_p])     e^{+i phase} |e, n>

    with t_p = pi / Omega_jc(n).  |g, 0> is never coupled.  In physical
    mode every pair (|g,m+1>, |e,m>) rotates by
    theta_m = pi sqrt(m+1)/sqrt(n+1); the state |e, n_max> has no partner
    inside the cutoff and only free-evolves (the leakage guard keeps that
    honest).
    """
    p = state.params
    mode = PulseMode(mode)
    _check_ion(p, ion)
    if target_n < 0:
        raise PulseError(f"sideband target_n must be >= 0, got {target_n}")
    if target_n + 1 > p.fock_cutoff:
        raise PulseError(
            f"sideband pulse on n={target_n} reaches Fock level {target_n + 1} "
            f"beyond the cutoff {p.fock_cutoff}"
        )
    t0 = _start_time(state, t0)
    nu = p.trap_freq
    duration = math.pi / _positive_rabi(RabiLaw(p).jc(target_n), "sideband")
    view = _ion_view(state, ion)

    if mode is PulseMode.IDEAL:
        g_hi = view[target_n + 1, :, 0, :].copy()
        e_lo = view[target_n, :, 1, :].copy()
        _apply_free_phases(state, duration)
        down = 1j * np.exp(-1j * (nu * (t0 + (target_n + 1) * duration) + laser_phase))
        up = 1j * np.exp(1j * (nu * (t0 - target_n * duration) + laser_phase))
        view[target_n + 1, :, 0, :] = down * e_lo
        view[target_n, :, 1, :] = up * g_hi
    else:
        alpha = nu * t0 + laser_phase
        up = 1j * np.exp(1j * alpha)
        down = 1j * np.exp(-1j * alpha)
        for pair_n in range(p.fock_cutoff):
            theta = math.pi * math.sqrt(pair_n + 1) / math.sqrt(target_n + 1)
            c, s = _half_angle(theta)
            g_hi = view[pair_n + 1, :, 0, :].copy()
            e_lo = view[pair_n, :, 1, :].copy()
            view[pair_n + 1, :, 0, :] = c * g_hi + down * s * e_lo
            view[pair_n, :, 1, :] = c * e_lo + up * s * g_hi
        _apply_free_phases(state, duration)
    return _finish(state, t0, duration, check_leakage)


def _dispersive_rotation(view_level: np.ndarray, theta: float, laser_phase: float) -> None:
    """In-place g/e rotation on one (high, 2, low) Fock-level view.

    R(theta) = cos(theta/2) I + sin(theta/2) (e^{i phase}|e><g| - e^{-i phase}|g><e|),
    so theta = pi is the exact flip and theta = 2 pi the overall sign -1.
    """
    c, s = _half_angle(theta)
    up = np.exp(1j * laser_phase)
    g = view_level[:, 0, :].copy()
    e = view_level[:, 1, :].copy()
    view_level[:, 0, :] = c * g - s * np.conj(up) * e
    view_level[:, 1, :] = s * up * g + c * e


def apply_dispersive_single(
    state: StateVector,
    ion: int,
    target_n: int,
    t0: float | None = None,
    mode: PulseMode | str = PulseMode.IDEAL,
    *,
    laser_phase: float = 0.0,
    check_leakage: bool = True,
) -> StateVector:
    """Dispersive pi pulse on one ion, resonant on Fock level ``target_n``.

    Flips the ion's electronic state on the targeted level,
    |g> -> |e>, |e> -> -|g>, times exp(-i nu n t_p).  Fock level 0 is left
    exactly untouched (zero coupling, zero phase) in both modes, which is
    what makes this a motion-controlled NOT.  Physical mode rotates every
    level m by theta_m = pi m / n.
    """
    p = state.params
    mode = PulseMode(mode)
    _check_ion(p, ion)
    if target_n < 1:
        raise PulseError(
            "dispersive pulse requires target_n >= 1 (its Rabi frequency is zero at n = 0)"
        )
    if target_n > p.fock_cutoff:
        raise PulseError(f"dispersive target_n {target_n} beyond the cutoff {p.fock_cutoff}")
    t0 = _start_time(state, t0)
    duration = math.pi / _positive_rabi(RabiLaw(p).dispersive(target_n), "dispersive")
    view = _ion_view(state, ion)

    if mode is PulseMode.IDEAL:
        _dispersive_rotation(view[target_n], math.pi, laser_phase)
    else:
        for level in range(1, p.n_levels):
            _dispersive_rotation(view[level], math.pi * level / target_n, laser_phase)
    _apply_free_phases(state, duration)
    return _finish(state, t0, duration, check_leakage)


def apply_dispersive_collective(
    state: StateVector,
    target_n: int,
    t0: float | None = None,
    mode: PulseMode | str = PulseMode.IDEAL,
    *,
    laser_phase: float = 0.0,
    check_leakage: bool = True,
) -> StateVector:
    """Dispersive pi pulse applied to all ions at once.

    On the targeted Fock level every ion is flipped with the single-ion
    signs, i.e. the bit word b maps to its complement with amplitude
    factor (-1)^{popcount(b)} (times e^{i phase (N - 2 popcount)} for a
    nonzero laser phase), and the level phase exp(-i nu n t_p).  Level 0
    is exactly untouched.  Physical mode rotates every ion independently
    by theta_m = pi m / n on each level m.
    """
    p = state.params
    mode = PulseMode(mode)
    if target_n < 1:
        raise PulseError(
            "dispersive pulse requires target_n >= 1 (its Rabi frequency is zero at n = 0)"
        )
    if target_n > p.fock_cutoff:
        raise PulseError(f"dispersive target_n {target_n} beyond the cutoff {p.fock_cutoff}")
    t0 = _start_time(state, t0)
    duration = math.pi / _positive_rabi(RabiLaw(p).dispersive(target_n), "dispersive")
    blocks = state.blocks

    if mode is PulseMode.IDEAL:
        pc = _popcounts(p.n_ions)
        coef = np.where(pc % 2 == 0, 1.0, -1.0) * np.exp(1j * laser_phase * (p.n_ions - 2 * pc))
        # Reversing the config axis maps bit word b to its complement mask - b.
        blocks[target_n] = (coef * blocks[target_n])[::-1]
    else:
        for level in range(1, p.n_levels):
            theta = math.pi * level / target_n
            row = blocks[level]
            for bit in range(p.n_ions):
                view = row.reshape(1 << (p.n_ions - 1 - bit), 2, 1 << bit)
                _dispersive_rotation(view, theta, laser_phase)
    _apply_free_phases(state, duration)
    return _finish(state, t0, duration, check_leakage)


def free_evolve(state: StateVector, duration: float) -> StateVector:
    """Let the system evolve freely for ``duration``.

    Fock level m picks up exp(-i nu m T); in a detuned frame each basis
    state additionally picks up exp(-i Delta T) per excited ion.
    """
    if duration < 0:
        raise PulseError(f"free evolution requires duration >= 0, got {duration!r}")
    if duration > 0:
        _apply_free_phases(state, duration)
        delta = state.frame.detuning
        if delta != 0.0:
            pc = _popcounts(state.params.n_ions)
            state.blocks[:] *= np.exp(-1j * delta * duration * pc)[None, :]
    state.clock += duration
    state.check_norm()
    return state


def apply_pulse(
    state: StateVector,
    spec: PulseSpec,
    t0: float | None = None,
    *,
    check_leakage: bool = True,
) -> StateVector:
    """Apply one PulseSpec to the state (dispatch on kind).

    ``check_leakage=False`` skips the cutoff honesty guard; meant for
    unitary-equivalence checks on synthetic full-support states, not for
    simulations.
    """
    if spec.kind is PulseKind.CARRIER_PI_HALF:
        return apply_carrier_pi_half(
            state, spec.target_ion, t0, laser_phase=spec.laser_phase, check_leakage=check_leakage
        )
    if spec.kind is PulseKind.JC_PI:
        return apply_jc_pulse(
            state,
            spec.target_ion,
            spec.target_n,
            t0,
            spec.mode,
            laser_phase=spec.laser_phase,
            check_leakage=check_leakage,
        )
    if spec.kind is PulseKind.DISPERSIVE_SINGLE_PI:
        return apply_dispersive_single(
            state,
            spec.target_ion,
            spec.target_n,
            t0,
            spec.mode,
            laser_phase=spec.laser_phase,
            check_leakage=check_leakage,
        )
    if spec.kind is PulseKind.DISPERSIVE_COLLECTIVE_PI:
        return apply_dispersive_collective(
            state, spec.target_n, t0, spec.mode, laser_phase=spec.laser_phase, check_leakage=check_leakage
        )
    if spec.kind is PulseKind.WAIT:
        if spec.duration is None:
            raise PulseError("wait requires an explicit duration")
        return free_evolve(state, spec.duration)
    raise PulseError(f"unknown pulse kind {spec.kind!r}")


# --------------------------------------------------------------------------
# Dense oracle
# --------------------------------------------------------------------------

_DENSE_DIM_LIMIT = 4096


def _kron_all(ops: list[np.ndarray]) -> np.ndarray:
    """Kronecker product with ion N as the most significant factor."""
    return reduce(np.kron, ops)


def _ion_op(n_ions: int, ion: int, op: np.ndarray) -> np.ndarray:
    """Embed a 2x2 operator (basis order g, e) onto one ion of the register."""
    eye = np.eye(2, dtype=np.complex128)
    ops = [op if j == ion else eye for j in range(n_ions, 0, -1)]
    return _kron_all(ops)


def _rotation_2x2(theta: float, laser_phase: float) -> np.ndarray:
    c, s = _half_angle(theta)
    up = np.exp(1j * laser_phase)
    return np.array([[c, -s * np.conj(up)], [s * up, c]], dtype=np.complex128)


def dense_matrix(
    spec: PulseSpec,
    params: TrapParams,
    t0: float = 0.0,
    detuning: float = 0.0,
) -> np.ndarray:
    """Explicit unitary of the pulse, for cross-checks against the fast path.

    Built from per-level 2x2 blocks via Kronecker products and explicit
    pair stitching, deliberately sharing no code with the matrix-free
    application.  ``detuning`` only matters for wait steps.  Limited to
    dimension 4096.
    """
    if params.dim > _DENSE_DIM_LIMIT:
        raise PulseError(f"dense matrix limited to dimension {_DENSE_DIM_LIMIT}, got {params.dim}")
    validate_pulse_spec(spec, params)
    duration = pulse_duration(spec, params)
    nu = params.trap_freq
    nc = params.n_configs
    matrix = np.zeros((params.dim, params.dim), dtype=np.complex128)
    free = np.exp(-1j * nu * np.arange(params.n_levels) * duration)

    def block(level: int) -> slice:
        return slice(level * nc, (level + 1) * nc)

    if spec.kind is PulseKind.CARRIER_PI_HALF:
        rot = _rotation_2x2(math.pi / 2.0, spec.laser_phase)
        op = _ion_op(params.n_ions, spec.target_ion, rot)
        for level in range(params.n_levels):
            matrix[block(level), block(level)] = free[level] * op
        return matrix

    if spec.kind is PulseKind.JC_PI:
        bit = 1 << (spec.target_ion - 1)
        if spec.mode is PulseMode.IDEAL:
            n = spec.target_n
            down = 1j * np.exp(-1j * (nu * (t0 + (n + 1) * duration) + spec.laser_phase))
            up = 1j * np.exp(1j * (nu * (t0 - n * duration) + spec.laser_phase))
            for level in range(params.n_levels):
                for bits in range(nc):
                    row = level * nc + bits
                    if level == n + 1 and not bits & bit:
                        matrix[row, n * nc + (bits | bit)] = down
                    elif level == n and bits & bit:
                        matrix[row, (n + 1) * nc + (bits & ~bit)] = up
                    else:
                        matrix[row, row] = free[level]
            return matrix
        alpha = nu * t0 + spec.laser_phase
        for level in range(params.n_levels):
            for bits in range(nc):
                col = level * nc + bits
                if bits & bit and level < params.fock_cutoff:
                    pair = level
                elif not bits & bit and level >= 1:
                    pair = level - 1
                else:
                    matrix[col, col] = free[level]
                    continue
                theta = math.pi * math.sqrt(pair + 1) / math.sqrt(spec.target_n + 1)
                c, s = _half_angle(theta)
                if bits & bit:
                    # column |e, level>: stays or climbs to |g, level+1>
                    matrix[col, col] = free[level] * c
                    matrix[(level + 1) * nc + (bits & ~bit), col] = (
                        free[level + 1] * 1j * s * np.exp(-1j * alpha)
                    )
                else:
                    # column |g, level>: stays or drops to |e, level-1>
                    matrix[col, col] = free[level] * c
                    matrix[(level - 1) * nc + (bits | bit), col] = (
                        free[level - 1] * 1j * s * np.exp(1j * alpha)
                    )
        return matrix

    if spec.kind is PulseKind.DISPERSIVE_SINGLE_PI:
        for level in range(params.n_levels):
            if spec.mode is PulseMode.IDEAL:
                theta = math.pi if level == spec.target_n else 0.0
            else:
                theta = math.pi * level / spec.target_n
            op = _ion_op(params.n_ions, spec.target_ion, _rotation_2x2(theta, spec.laser_phase))
            matrix[block(level), block(level)] = free[level] * op
        return matrix

    if spec.kind is PulseKind.DISPERSIVE_COLLECTIVE_PI:
        for level in range(params.n_levels):
            if spec.mode is PulseMode.IDEAL:
                theta = math.pi if level == spec.target_n else 0.0
            else:
                theta = math.pi * level / spec.target_n
            rot = _rotation_2x2(theta, spec.laser_phase)
            op = _kron_all([rot] * params.n_ions)
            matrix[block(level), block(level)] = free[level] * op
        return matrix

    if spec.kind is PulseKind.WAIT:
        pc = _popcounts(params.n_ions)
        for level in range(params.n_levels):
            for bits in range(nc):
                idx = level * nc + bits
                matrix[idx, idx] = free[level] * np.exp(-1j * detuning * duration * pc[bits])
        return matrix

    raise PulseError(f"unknown pulse kind {spec.kind!r}")
