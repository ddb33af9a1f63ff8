"""Numeric propagation against analytic oracles and its own invariants.

The two-state staying probability exp(-2 pi g^2) is the primary oracle.
Finite windows leave an oscillatory truncation residue with a 1/T
envelope (a few 1e-4 at T = 1000 for g = 0.3), so full-window results
are additionally pinned to frozen values that were cross-validated
against an independent integrator (scipy DOP853 agrees to 5e-8).
"""

import math

import numpy as np
import pytest

from mlz import (
    IntegratorConfig,
    MlzModel,
    NormDrift,
    NotConverged,
    PresetParams,
    StateVector,
    StepUnderflow,
    converged_probabilities,
    exact_matrix,
    interference_model,
    lz_probability,
    propagate,
    scattering_matrix,
    validate_model,
)

RNG = np.random.default_rng(5150)


def two_state(g=0.3, slopes=(1.0, 0.0)):
    c = np.array([[0.0, g], [np.conjugate(g), 0.0]], dtype=complex)
    return validate_model(
        MlzModel(n_states=2, slopes=slopes, offsets=(0.0, 0.0), couplings=c)
    )


def basis_state(n, k, t):
    amps = np.zeros(n, dtype=complex)
    amps[k] = 1.0
    return StateVector(amplitudes=amps, time=t)


class TestPropagate:
    def test_zero_coupling_is_phase_only(self):
        model = validate_model(
            MlzModel(n_states=3, slopes=(1.0, 0.0, -0.5), offsets=(0.2, 0.0, 0.1),
                     couplings=np.zeros((3, 3)))
        )
        for frame in ("interaction", "diabatic"):
            config = IntegratorConfig(t_start=-50.0, t_end=50.0, frame=frame)
            out = propagate(model, basis_state(3, 1, -50.0), config)
            assert abs(abs(out.amplitudes[1]) - 1.0) < 1e-9
            assert abs(out.amplitudes[0]) < 1e-9 and abs(out.amplitudes[2]) < 1e-9

    def test_two_state_full_window_survival(self):
        """At T=1000 the survival is 0.56827652..: within 3e-4 of the
        ideal exp(-2 pi 0.09) = 0.56808361 (the difference is the
        finite-window residue, not integration error)."""
        model = two_state(0.3)
        out = propagate(model, basis_state(2, 0, -1000.0), IntegratorConfig())
        survival = abs(out.amplitudes[0]) ** 2
        assert survival == pytest.approx(0.56827652, abs=1e-6)
        assert abs(survival - lz_probability(0.3, 1.0)) < 3e-4

    def test_frames_agree_on_moduli(self):
        model = two_state(0.3)
        kwargs = dict(abs_tol=1e-11, rel_tol=1e-11, t_start=-200.0, t_end=200.0)
        out_i = propagate(model, basis_state(2, 0, -200.0),
                          IntegratorConfig(frame="interaction", **kwargs))
        out_d = propagate(model, basis_state(2, 0, -200.0),
                          IntegratorConfig(frame="diabatic", **kwargs))
        assert np.abs(np.abs(out_i.amplitudes) - np.abs(out_d.amplitudes)).max() < 1e-6

    def test_single_path_transition_probability(self):
        """P(2->4) for the interference preset, a single-trajectory
        transition, matches the product p3 (1-p1) p2."""
        params = PresetParams(eps1=0.25, eps2=0.35, g1=0.255, g2=0.3, g3=0.345)
        model = interference_model(params)
        out = propagate(model, basis_state(6, 1, -1000.0), IntegratorConfig())
        expected = (
            lz_probability(params.g3, 1.0)
            * (1 - lz_probability(params.g1, 1.0))
            * lz_probability(params.g2, 1.0)
        )
        assert abs(abs(out.amplitudes[3]) ** 2 - expected) < 1e-3

    def test_initial_state_validation(self):
        model = two_state(0.3)
        with pytest.raises(ValueError):
            propagate(model, StateVector([1.0, 1.0], -10.0), IntegratorConfig())
        with pytest.raises(ValueError):
            propagate(model, StateVector([1.0, 0.0, 0.0], -10.0), IntegratorConfig())

    def test_deterministic(self):
        model = two_state(0.3)
        config = IntegratorConfig(t_start=-50.0, t_end=50.0)
        a = propagate(model, basis_state(2, 0, -50.0), config)
        b = propagate(model, basis_state(2, 0, -50.0), config)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_step_underflow(self):
        """Absurd slopes force sub-floor steps."""
        model = two_state(0.3, slopes=(1e18, 0.0))
        with pytest.raises(StepUnderflow):
            propagate(model, basis_state(2, 0, -1000.0), IntegratorConfig())

    def test_norm_drift_detected_at_loose_tolerance(self):
        model = two_state(0.3)
        config = IntegratorConfig(abs_tol=1e-6, rel_tol=1e-6)
        with pytest.raises(NormDrift):
            propagate(model, basis_state(2, 0, -1000.0), config)


class TestIntegratorConfig:
    @pytest.mark.parametrize("bad", [
        dict(abs_tol=0.0), dict(rel_tol=-1e-9), dict(max_step=0.0),
        dict(t_start=1.0, t_end=-1.0), dict(frame="adiabatic"),
    ])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            IntegratorConfig(**bad)


class TestScatteringMatrix:
    @pytest.fixture(scope="class")
    def preset_scattering(self):
        model = interference_model(PresetParams())
        config = IntegratorConfig(t_start=-50.0, t_end=50.0)
        return scattering_matrix(model, config, jobs=2)

    def test_zero_coupling_gives_identity(self):
        model = validate_model(
            MlzModel(n_states=3, slopes=(1.0, 0.0, -1.0), offsets=(0.0, 0.1, 0.0),
                     couplings=np.zeros((3, 3)))
        )
        result = scattering_matrix(model, IntegratorConfig(t_start=-30, t_end=30))
        assert np.abs(result.p_matrix - np.eye(3)).max() < 1e-9

    def test_unitary(self, preset_scattering):
        assert preset_scattering.unitarity_deviation() < 1e-6

    def test_doubly_stochastic(self, preset_scattering):
        p = preset_scattering.p_matrix
        assert np.abs(p.sum(axis=0) - 1).max() < 1e-6
        assert np.abs(p.sum(axis=1) - 1).max() < 1e-6

    def test_norm_conserved_along_propagation(self, preset_scattering):
        assert preset_scattering.integrator_stats.max_norm_drift < 1e-6

    def test_p_matrix_rows_are_initial_states(self, preset_scattering):
        s = preset_scattering.s_matrix
        p = preset_scattering.p_matrix
        assert p[1, 3] == abs(s[3, 1]) ** 2

    def test_threaded_equals_serial(self):
        model = interference_model(PresetParams())
        config = IntegratorConfig(t_start=-30.0, t_end=30.0)
        serial = scattering_matrix(model, config, jobs=1)
        threaded = scattering_matrix(model, config, jobs=3)
        assert np.array_equal(serial.s_matrix, threaded.s_matrix)

    def test_frame_equivalence_of_moduli(self):
        model = interference_model(PresetParams(g1=0.255, g2=0.3, g3=0.345))
        kwargs = dict(abs_tol=1e-11, rel_tol=1e-11, t_start=-100.0, t_end=100.0)
        s_i = scattering_matrix(model, IntegratorConfig(frame="interaction", **kwargs),
                                jobs=2)
        s_d = scattering_matrix(model, IntegratorConfig(frame="diabatic", **kwargs),
                                jobs=2)
        assert np.abs(np.abs(s_i.s_matrix) - np.abs(s_d.s_matrix)).max() < 1e-6

    def test_gauge_invariance(self):
        """Rephasing the basis (diagonal phase conjugation of the
        couplings) must leave P unchanged."""
        base = interference_model(PresetParams(g1=0.255, g2=0.3, g3=0.345))
        phases = np.exp(1j * RNG.uniform(0, 2 * np.pi, 6))
        c = np.conj(phases)[:, None] * np.array(base.couplings) * phases[None, :]
        gauged = validate_model(
            MlzModel(n_states=6, slopes=base.slopes, offsets=base.offsets,
                     couplings=c)
        )
        config = IntegratorConfig(t_start=-50.0, t_end=50.0)
        p_a = scattering_matrix(base, config, jobs=2).p_matrix
        p_b = scattering_matrix(gauged, config, jobs=2).p_matrix
        assert np.abs(p_a - p_b).max() < 1e-6

    def test_tolerance_scaling(self):
        """Halving the tolerances moves P by far less than the reported
        a-posteriori error estimate."""
        model = two_state(0.3)
        loose = scattering_matrix(
            model, IntegratorConfig(abs_tol=1e-8, rel_tol=1e-8,
                                    t_start=-200, t_end=200))
        tight = scattering_matrix(
            model, IntegratorConfig(abs_tol=5e-9, rel_tol=5e-9,
                                    t_start=-200, t_end=200))
        change = np.abs(loose.p_matrix - tight.p_matrix).max()
        assert change < loose.integrator_stats.error_estimate


class TestConvergedProbabilities:
    def test_two_state_truncation_estimate(self):
        """Window sequence 1000/1250/1562.5: successive differences stay
        below 1e-3 (measured 3.8e-4)."""
        model = two_state(0.3)
        conv = converged_probabilities(model, 1000.0, IntegratorConfig())
        assert conv.truncation_estimate < 1e-3
        assert conv.windows == (1000.0, 1250.0, 1562.5)
        assert abs(conv.p_matrix[0, 0] - lz_probability(0.3, 1.0)) < 5e-4

    def test_zero_coupling_estimate_is_zero(self):
        model = validate_model(
            MlzModel(n_states=2, slopes=(1.0, 0.0), offsets=(0.0, 0.0),
                     couplings=np.zeros((2, 2)))
        )
        conv = converged_probabilities(model, 100.0, IntegratorConfig())
        assert conv.truncation_estimate == 0.0
        assert np.array_equal(conv.p_matrix, np.eye(2))

    def test_interference_preset_estimate(self):
        """Full-window truncation control for the six-state preset
        (measured 7.2e-4); this is the slowest test in the suite."""
        model = interference_model(PresetParams(g1=0.255, g2=0.3, g3=0.345))
        conv = converged_probabilities(model, 1000.0, IntegratorConfig(), jobs=2)
        assert conv.truncation_estimate < 1e-3
        assert np.abs(
            conv.p_matrix
            - exact_matrix(PresetParams(g1=0.255, g2=0.3, g3=0.345))
        ).max() < 1e-3

    def test_base_window_must_clear_the_crossings(self):
        model = interference_model(PresetParams())
        with pytest.raises(ValueError):
            converged_probabilities(model, 5.0, IntegratorConfig())

    def test_not_converged_on_tight_window(self):
        model = interference_model(PresetParams())
        with pytest.raises(NotConverged):
            converged_probabilities(
                model, 10.0, IntegratorConfig(t_start=-10, t_end=10))
