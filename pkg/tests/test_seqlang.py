
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ionpulse import (
    FRAME_R,
    FRAME_R_PRIME,
    Frame,
    PulseKind,
    PulseMode,
    PulseSpec,
    SequenceError,
    SequenceProgram,
    TrapParams,
    dicke_extreme,
    excited_population,
    fidelity,
    prepare_max_entangled,
    target_ghz,
)
from ionpulse.seqlang import DEFAULT_PARAMS, execute, format_program, parse
from conftest import make_params

CANONICAL_3 = """\
# build the entangled state on three ions
ions N=3
carrier_pi2 ion=3
jc_pi ion=3 n=0
disp_pi all n=1
disp_pi ion=3 n=1
jc_pi ion=3 n=0
"""


def errors_of(diags):
    return [d for d in diags if d.severity == "error"]


class TestParse:
    def test_canonical_program(self):
        program, diags = parse(CANONICAL_3)
        assert errors_of(diags) == []
        assert program.params.n_ions == 3
        assert program.frame == Frame(FRAME_R)
        kinds = [s.kind for s in program.steps]
        assert kinds == [
            PulseKind.CARRIER_PI_HALF,
            PulseKind.JC_PI,
            PulseKind.DISPERSIVE_COLLECTIVE_PI,
            PulseKind.DISPERSIVE_SINGLE_PI,
            PulseKind.JC_PI,
        ]
        assert [s.target_n for s in program.steps] == [0, 0, 1, 1, 0]
        assert program.steps[1].target_ion == 3
        assert program.source_spans[0] == (3, 1)

    def test_defaults_match_documented_values(self):
        program, diags = parse("carrier_pi2 ion=1\n")
        assert errors_of(diags) == []
        assert program.params == DEFAULT_PARAMS

    def test_header_overrides(self):
        program, _ = parse("ions N=2\ntrap nu=2.5 eta=0.2 rabi=3.0 nmax=6\nframe Rprime delta=0.001\nwait T=1.0\n")
        assert program.params == TrapParams(2, 2.5, 0.2, 3.0, 6)
        assert program.frame == Frame(FRAME_R_PRIME, detuning=0.001)

    def test_partial_trap_override(self):
        program, _ = parse("trap eta=0.3\nwait T=0.0\n")
        assert program.params.lamb_dicke == 0.3
        assert program.params.trap_freq == DEFAULT_PARAMS.trap_freq

    def test_empty_source_warns_no_steps(self):
        program, diags = parse("")
        assert program is not None and program.steps == []
        assert any(d.severity == "warning" and d.message == "no steps" for d in diags)

    def test_comments_only_warns_no_steps(self):
        program, diags = parse("# nothing here\n\n   # still nothing\n")
        assert program is not None and program.steps == []
        assert any(d.message == "no steps" for d in diags)

    def test_dispersive_n_zero_rejected_with_position(self):
        program, diags = parse("ions N=2\ndisp_pi all n=0\n")
        assert program is None
        err = errors_of(diags)[0]
        assert (err.line, err.column) == (2, 1)
        assert "n >= 1" in err.message and "zero" in err.message
        assert str(err).startswith("2:1: error:")

    def test_unknown_keyword(self):
        program, diags = parse("ions N=2\n  explode now\n")
        assert program is None
        err = errors_of(diags)[0]
        assert (err.line, err.column) == (2, 3)
        assert "unknown keyword" in err.message

    def test_malformed_number(self):
        program, diags = parse("wait T=banana\n")
        assert program is None
        err = errors_of(diags)[0]
        assert "malformed number" in err.message
        assert err.column == 6

    def test_non_finite_number_rejected(self):
        program, diags = parse("wait T=nan\n")
        assert program is None

    def test_malformed_integer(self):
        program, diags = parse("ions N=2.5\n")
        assert program is None
        assert "malformed integer" in errors_of(diags)[0].message

    def test_duplicate_header(self):
        program, diags = parse("ions N=2\nions N=3\n")
        assert program is None
        err = errors_of(diags)[0]
        assert err.line == 2 and "duplicate" in err.message

    def test_unknown_mode(self):
        program, diags = parse("ions N=1\njc_pi ion=1 n=0 mode=sloppy\n")
        assert program is None
        assert "unknown mode" in errors_of(diags)[0].message

    def test_ion_out_of_range(self):
        program, diags = parse("ions N=2\ncarrier_pi2 ion=5\n")
        assert program is None
        assert "out of range" in errors_of(diags)[0].message

    def test_sideband_beyond_cutoff(self):
        program, diags = parse("trap nmax=2\njc_pi ion=1 n=2\n")
        assert program is None
        assert "cutoff" in errors_of(diags)[0].message

    def test_missing_required_argument(self):
        program, diags = parse("jc_pi ion=1\n")
        assert program is None
        assert "requires" in errors_of(diags)[0].message

    def test_unknown_argument(self):
        program, diags = parse("wait T=1.0 speed=9\n")
        assert program is None
        assert "unknown argument" in errors_of(diags)[0].message

    def test_bare_word_rejected(self):
        program, diags = parse("carrier_pi2 ion\n")
        assert program is None
        assert "key=value" in errors_of(diags)[0].message

    def test_frame_r_takes_no_arguments(self):
        program, diags = parse("frame R delta=0.1\nwait T=1.0\n")
        assert program is None

    def test_multiple_errors_reported_in_order(self):
        program, diags = parse("bogus\nwait T=x\ndisp_pi all n=0\n")
        errs = errors_of(diags)
        assert program is None
        assert [e.line for e in errs] == [1, 2, 3]

    def test_wait_zero_allowed(self):
        program, diags = parse("wait T=0.0\n")
        assert errors_of(diags) == []
        assert program.steps[0].duration == 0.0

    def test_wait_negative_rejected(self):
        program, diags = parse("wait T=-2.0\n")
        assert program is None


class TestFormat:
    def test_canonical_round_trip(self):
        program, _ = parse(CANONICAL_3)
        text = format_program(program)
        assert "#" not in text
        reparsed, diags = parse(text)
        assert errors_of(diags) == []
        assert reparsed == program

    def test_idempotent(self):
        program, _ = parse(CANONICAL_3)
        text = format_program(program)
        assert format_program(parse(text)[0]) == text

    def test_carrier_phase_survives(self):
        program, _ = parse("ions N=2\ncarrier_pi2 ion=2 phase=-0.125\n")
        text = format_program(program)
        assert "phase=-0.125" in text
        assert parse(text)[0] == program

    def test_physical_mode_survives(self):
        program, _ = parse("ions N=2\ntrap nmax=3\njc_pi ion=1 n=1 mode=physical\n")
        text = format_program(program)
        assert "mode=physical" in text
        assert parse(text)[0] == program


def program_strategy():
    def build(draw):
        n_ions = draw(st.integers(1, 5))
        nmax = draw(st.integers(2, 6))
        positive = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)
        params = TrapParams(
            n_ions=n_ions,
            trap_freq=draw(positive),
            lamb_dicke=draw(st.floats(1e-3, 0.999, allow_nan=False)),
            base_rabi=draw(positive),
            fock_cutoff=nmax,
        )
        if draw(st.booleans()):
            frame = Frame(FRAME_R)
        else:
            frame = Frame(FRAME_R_PRIME, detuning=draw(st.floats(-1, 1, allow_nan=False)))
        steps = []
        for _ in range(draw(st.integers(0, 8))):
            kind = draw(st.sampled_from(list(PulseKind)))
            ion = draw(st.integers(1, n_ions))
            mode = draw(st.sampled_from(list(PulseMode)))
            if kind is PulseKind.CARRIER_PI_HALF:
                steps.append(
                    PulseSpec(kind, target_ion=ion, laser_phase=draw(st.floats(-10, 10, allow_nan=False)))
                )
            elif kind is PulseKind.JC_PI:
                steps.append(PulseSpec(kind, target_ion=ion, target_n=draw(st.integers(0, nmax - 1)), mode=mode))
            elif kind is PulseKind.DISPERSIVE_SINGLE_PI:
                steps.append(PulseSpec(kind, target_ion=ion, target_n=draw(st.integers(1, nmax)), mode=mode))
            elif kind is PulseKind.DISPERSIVE_COLLECTIVE_PI:
                steps.append(PulseSpec(kind, target_n=draw(st.integers(1, nmax)), mode=mode))
            else:
                steps.append(PulseSpec(kind, duration=draw(st.floats(0, 1e4, allow_nan=False))))
        return SequenceProgram(params, frame, steps, [])

    return st.composite(build)()


class TestRoundTripProperty:
    @settings(max_examples=150, deadline=None)
    @given(program_strategy())
    def test_parse_format_identity(self, program):
        text = format_program(program)
        reparsed, diags = parse(text)
        assert errors_of(diags) == []
        assert reparsed == program
        assert format_program(reparsed) == text

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=200))
    def test_parse_total_on_arbitrary_text(self, source):
        # every failure is a positioned diagnostic, never an exception
        program, diags = parse(source)
        if program is None:
            assert any(d.severity == "error" for d in diags)
        for d in diags:
            assert d.line >= 1 and d.column >= 1


class TestExecute:
    def test_canonical_equals_builtin_preparation(self):
        program, _ = parse(CANONICAL_3)
        final, trace = execute(program)
        report = prepare_max_entangled(program.params)
        assert np.max(np.abs(final.amplitudes - report.final_state.amplitudes)) <= 1e-12
        assert final.clock == report.final_state.clock
        assert fidelity(final, target_ghz(program.params)) >= 1 - 1e-12
        assert len(trace) == 5
        assert trace[-1].fock_populations[0] == pytest.approx(1.0, abs=1e-12)

    def test_trace_records_clock_norm_marginal(self):
        program, _ = parse(CANONICAL_3)
        _, trace = execute(program)
        clocks = [t.clock for t in trace]
        assert all(b > a for a, b in zip(clocks, clocks[1:]))
        for entry in trace:
            assert entry.norm == pytest.approx(1.0, abs=1e-12)
            assert len(entry.fock_populations) == program.params.n_levels

    def test_wait_only_program_is_pure_phase(self):
        # one vibrational quantum for time T = 1/nu: amplitude phase exp(-i)
        program, _ = parse("ions N=1\nwait T=1.0\n")
        initial = dicke_extreme(program.params, "lowest", 1)
        final, _ = execute(program, initial)
        assert final.amplitude(0, 1) == pytest.approx(np.exp(-1j), abs=1e-15)
        assert initial.amplitude(0, 1) == 1.0  # input not mutated

    def test_mirror_program_round_trip(self):
        source = """\
ions N=2
carrier_pi2 ion=2
jc_pi ion=2 n=0
disp_pi all n=1
disp_pi ion=2 n=1
jc_pi ion=2 n=0
wait T=0.0
jc_pi ion=2 n=0
disp_pi ion=2 n=1
disp_pi all n=1
jc_pi ion=2 n=0
carrier_pi2 ion=2
"""
        program, diags = parse(source)
        assert errors_of(diags) == []
        final, _ = execute(program)
        assert excited_population(final, 2) <= 1e-10
        assert excited_population(final, 1) <= 1e-10

    def test_initial_params_must_match(self):
        program, _ = parse(CANONICAL_3)
        with pytest.raises(ValueError):
            execute(program, dicke_extreme(make_params(2), "lowest", 0))

    def test_runtime_failure_carries_position(self):
        # pushing population into the top Fock level trips the honesty guard
        source = "ions N=1\ntrap nmax=4\njc_pi ion=1 n=3\n"
        program, diags = parse(source)
        assert errors_of(diags) == []
        seeded = dicke_extreme(program.params, "highest", 3)
        with pytest.raises(SequenceError) as info:
            execute(program, seeded)
        assert info.value.line == 3
        assert "3:1: error:" in str(info.value)
