import numpy as np
import pytest

from bbqubit.analytics import (
    SphereSampling,
    alpha_bb,
    alpha_dot0,
    alpha_dot0_small_phase,
    alpha_fe,
    asymptotic_value,
    axis_bb,
    axis_fe,
    bloch_average,
    first_order_infidelity,
    linearized_output,
    output_quantities,
    purity_closed_form,
    recompose,
    small_n_infidelity,
)
from bbqubit.cavity import CavityConfig, Mode, SpectrumModel, evolve, round_trip_unitary
from bbqubit.qubit import PolarizationState, angle_axis_of, equal_up_to_phase, purity

PAPER = SpectrumModel(phi0=0.2182, sigma_phi=0.0839)


def test_alpha_fe_examples():
    for phi in np.linspace(-np.pi, np.pi, 9):
        assert alpha_fe(phi, 0.0) == pytest.approx(phi, abs=1e-12)
    assert alpha_fe(1.3, np.pi) == pytest.approx(0.0, abs=1e-15)
    assert alpha_fe(0.2182, np.pi / 2) == pytest.approx(0.15414, abs=1e-5)
    a, _, _ = angle_axis_of(round_trip_unitary(0.2182, CavityConfig(Mode.FREE_SB, np.pi / 2)))
    assert alpha_fe(0.2182, np.pi / 2) == pytest.approx(a, abs=1e-12)


def test_alpha_bb_examples():
    assert alpha_bb(0.8, 0.0) == pytest.approx(np.pi / 2)
    assert alpha_bb(0.0, 1.2) == pytest.approx(np.pi / 2)
    assert alpha_bb(0.2182, np.pi / 2) == pytest.approx(1.67925, abs=1e-5)
    a, _, _ = angle_axis_of(round_trip_unitary(0.2182, CavityConfig(Mode.BB_SB, np.pi / 2)))
    assert alpha_bb(0.2182, np.pi / 2) == pytest.approx(a, abs=1e-12)


def test_axis_examples():
    np.testing.assert_allclose(axis_fe(0.3, 0.0).vector, [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(axis_bb(0.0, 0.7).vector, [0, 1, 0], atol=1e-15)
    _, s, _ = angle_axis_of(round_trip_unitary(0.2182, CavityConfig(Mode.BB_SB, np.pi / 2)))
    v = axis_bb(0.2182, np.pi / 2).vector
    assert abs(np.dot(v, s)) == pytest.approx(1.0, abs=1e-12)


def test_degenerate_axis_flagged():
    ax = axis_fe(0.0, 0.5)
    assert ax.degenerate
    np.testing.assert_array_equal(ax.vector, [0, 0, 1])
    assert not axis_bb(0.3, 0.5).degenerate


def test_closed_forms_recompose_round_trips():
    rng = np.random.default_rng(0)
    for _ in range(300):
        phi = rng.uniform(-np.pi, np.pi)
        theta = rng.uniform(0, 2 * np.pi)
        for kind, mode in (("fe", Mode.FREE_SB), ("bb", Mode.BB_SB)):
            u = round_trip_unitary(phi, CavityConfig(mode, theta))
            axis = (axis_fe if kind == "fe" else axis_bb)(phi, theta).vector
            assert np.linalg.norm(axis) == pytest.approx(1.0, abs=1e-10)
            assert equal_up_to_phase(recompose(kind, phi, theta), u) == pytest.approx(1.0, abs=1e-9)


def test_alpha_dot0_examples():
    assert alpha_dot0("fe", 0.0, PAPER) == pytest.approx(1.0, abs=1e-8)
    assert alpha_dot0("bb", 0.0, PAPER) == pytest.approx(0.0, abs=1e-8)
    v = alpha_dot0("fe", np.pi / 2, PAPER)
    assert v == pytest.approx(np.cos(np.pi / 4), rel=0.03)
    # finite-difference oracle on the implicit relation, wider step
    h = 1e-3
    fd = (alpha_fe(PAPER.phi0 + h, np.pi / 2) - alpha_fe(PAPER.phi0 - h, np.pi / 2)) / (2 * h)
    assert v == pytest.approx(fd, rel=1e-6)
    assert alpha_dot0_small_phase("bb", np.pi / 2) == pytest.approx(0.5)


def test_fe_rate_exceeds_bb_rate():
    thetas = np.linspace(0, np.pi, 102)[1:-1]
    for t in thetas:
        assert alpha_dot0("fe", t, PAPER) > alpha_dot0("bb", t, PAPER)


def test_purity_closed_form_examples():
    assert purity_closed_form(0, 0.0839) == 1.0
    assert purity_closed_form(1e6, 0.0839) == pytest.approx(0.5)
    assert purity_closed_form(10, 0.0839) == pytest.approx(0.622, abs=5e-4)


@pytest.mark.parametrize("label", ["D", "R"])
def test_purity_closed_form_matches_quadrature(label):
    s = PolarizationState.from_label(label)
    for n in range(31):
        assert purity(evolve(s, n, PAPER, CavityConfig())) == pytest.approx(float(purity_closed_form(n, PAPER.sigma_phi)), abs=1e-6)


def test_small_n_examples():
    rng = np.random.default_rng(1)
    for _ in range(5):
        v = rng.normal(size=3)
        assert small_n_infidelity(3, CavityConfig(Mode.BB), PAPER, v / np.linalg.norm(v)) == pytest.approx(0.0, abs=1e-12)
    assert small_n_infidelity(4, CavityConfig(), PAPER, [0, 0, 1]) == pytest.approx(0.0, abs=1e-15)
    d = PolarizationState.from_label("D")
    est = small_n_infidelity(3, CavityConfig(), PAPER, d)
    assert est == pytest.approx(0.0317, abs=1e-4)
    simulated = 1 - output_quantities([d], 3, PAPER, CavityConfig())["fidelity"][0]
    assert simulated == pytest.approx(est, rel=0.10)


@pytest.mark.parametrize("sigma,rel", [(0.0839, 0.07), (0.02, 0.01)])
def test_first_order_law_tracks_simulation(sigma, rel):
    # near-axis inputs have a tiny leading term, so the residual shrinks like sigma^2
    spec = SpectrumModel(0.2182, sigma)
    rng = np.random.default_rng(2)
    for _ in range(20):
        mode = (Mode.FREE_SB, Mode.BB_SB)[rng.integers(2)]
        cfg = CavityConfig(mode, rng.uniform(0.05, np.pi - 0.05))
        v = rng.normal(size=3)
        state = PolarizationState.from_bloch(v / np.linalg.norm(v))
        for n in (1, 2):
            sim = 1 - output_quantities([state], n, spec, cfg)["fidelity"][0]
            est = first_order_infidelity(n, cfg, spec, state)
            assert sim == pytest.approx(est, rel=rel)


def test_first_order_law_reduces_to_quadratic_law_at_theta_zero():
    d = PolarizationState.from_label("D")
    for n in (1, 2, 5):
        assert first_order_infidelity(n, CavityConfig(), PAPER, d) == pytest.approx(
            small_n_infidelity(n, CavityConfig(), PAPER, d), rel=1e-6)


def test_asymptotic_value():
    s = np.array([0.0, 0.6, 0.8])
    assert asymptotic_value(s, s) == pytest.approx(1.0)
    assert asymptotic_value(-s, s) == pytest.approx(1.0)
    assert asymptotic_value([1, 0, 0], s) == pytest.approx(0.5)
    vecs = SphereSampling(4096).vectors()
    assert np.mean([asymptotic_value(v, s) for v in vecs]) == pytest.approx(2 / 3, abs=1e-3)


def test_linearized_matches_quadrature_at_theta_zero():
    d = PolarizationState.from_label("D")
    for n in (0, 3, 10, 25):
        lin = linearized_output(n, CavityConfig(), PAPER, d)
        q = output_quantities([d], n, PAPER, CavityConfig())
        assert lin.purity == pytest.approx(q["purity"][0], abs=1e-10)
        assert lin.fidelity == pytest.approx(q["fidelity"][0], abs=1e-10)
        assert lin.fidelity_raw == pytest.approx(q["fidelity_raw"][0], abs=1e-10)


def test_sphere_sampling_is_balanced():
    v = SphereSampling(256).vectors()
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0)
    np.testing.assert_allclose(v.mean(axis=0), 0.0, atol=0.02)
    np.testing.assert_allclose(np.mean(v**2, axis=0), 1 / 3, atol=0.02)


def test_bloch_average_examples():
    for q in ("purity", "fidelity", "fidelity_raw"):
        assert bloch_average(q, 0, PAPER, CavityConfig(Mode.FREE_SB, 0.5)) == pytest.approx(1.0, abs=1e-12)
        for n in (2, 10, 20):
            assert bloch_average(q, n, PAPER, CavityConfig(Mode.BB_SB, 0.0)) == pytest.approx(1.0, abs=1e-12)
    big = bloch_average("purity", 3000, PAPER, CavityConfig(Mode.FREE_SB, np.pi / 4), method="linearized")
    assert big == pytest.approx(2 / 3, abs=0.01)
    with pytest.raises(ValueError):
        bloch_average("entropy", 2, PAPER, CavityConfig())


def test_bb_dominance_on_grid():
    for theta in (np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2):
        for n in range(2, 21, 6):
            for q in ("purity", "fidelity"):
                with_bb = bloch_average(q, n, PAPER, CavityConfig(Mode.BB_SB, theta), SphereSampling(64))
                without = bloch_average(q, n, PAPER, CavityConfig(Mode.FREE_SB, theta), SphereSampling(64))
                assert with_bb >= without
