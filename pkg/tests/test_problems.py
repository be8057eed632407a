import numpy as np
import pytest

from ikemo.problems import PlantedEquality, SteppedBeam, get_problem, problem_names, register


def uniform_beam(n_seg, section_cm=20.0, **kw):
    beam = SteppedBeam(n_seg=n_seg, **kw)
    x = np.full(2 * n_seg, section_cm)
    return beam, x


class TestBeamOracles:
    def test_volume_is_plain_sum(self):
        # b = h = 1 (native unit = metres here), l = 1: V = n_seg
        beam = SteppedBeam(n_seg=5, section_unit=1.0, segment_length=1.0,
                           section_range=(0.1, 40.0))
        f, _ = beam.evaluate(np.ones(10))
        assert f[0] == pytest.approx(5.0)

    @pytest.mark.parametrize("n_seg", [8, 12, 40])
    def test_even_segments_match_closed_forms_exactly(self, n_seg):
        beam, x = uniform_beam(n_seg)
        f, g = beam.evaluate(x)
        L = n_seg * beam.segment_length
        side = 0.2
        I = side**4 / 12.0
        delta = beam.load * L**3 / (48.0 * beam.elastic_modulus * I)
        sigma = (beam.load * L / 4.0) * (side / 2.0) / I
        assert f[1] == pytest.approx(delta, rel=1e-9)
        assert (g[0] + 1.0) * beam.sigma_max == pytest.approx(sigma, rel=1e-9)

    @pytest.mark.parametrize("n_seg", [39, 59])
    def test_odd_segments_deflection_within_half_percent(self, n_seg):
        beam, x = uniform_beam(n_seg)
        f, _ = beam.evaluate(x)
        L = n_seg * beam.segment_length
        I = 0.2**4 / 12.0
        delta = beam.load * L**3 / (48.0 * beam.elastic_modulus * I)
        assert abs(f[1] - delta) / delta < 0.005

    def test_volume_multilinear(self):
        beam, x = uniform_beam(10)
        f1, _ = beam.evaluate(x)
        x2 = x.copy()
        x2[:10] *= 2.0  # double all widths
        f2, _ = beam.evaluate(x2)
        assert f2[0] == pytest.approx(2.0 * f1[0], rel=1e-12)

    def test_mirror_symmetric_layout_gives_symmetric_deflections(self):
        rng = np.random.default_rng(0)
        n = 12
        beam = SteppedBeam(n_seg=n)
        half_b = rng.uniform(5, 30, n // 2)
        half_h = rng.uniform(5, 30, n // 2)
        b = np.concatenate([half_b, half_b[::-1]])
        h = np.concatenate([half_h, half_h[::-1]])
        w = beam.nodal_deflections(np.concatenate([b, h]))
        np.testing.assert_allclose(w, w[::-1], atol=1e-9)

    def test_stiffening_never_increases_deflection(self):
        rng = np.random.default_rng(1)
        beam = SteppedBeam(n_seg=10)
        for _ in range(20):
            x = rng.uniform(5, 30, 20)
            f, _ = beam.evaluate(x)
            i = int(rng.integers(10, 20))  # a height variable
            x2 = x.copy()
            x2[i] = min(40.0, x2[i] * 1.3)
            f2, _ = beam.evaluate(x2)
            assert f2[1] <= f[1] + 1e-15

    def test_constraint_vector_shape_and_aspect_fold(self):
        beam = SteppedBeam(n_seg=39)
        assert beam.n_var == 78 and beam.n_constraints == 41
        x = np.full(78, 20.0)
        x[39] = 5.0  # h_1 / b_1 = 0.25 < 0.5
        _, g = beam.evaluate(x)
        assert g.shape == (41,)
        assert g[2] == pytest.approx(0.5 - 0.25)
        assert (g[3:] == 0.0).all()

    def test_59_segment_table_values(self):
        beam = SteppedBeam(n_seg=59, delta_max=0.06, section_range=(0.1, 60.0))
        assert beam.n_var == 118 and beam.n_constraints == 61
        assert beam.specs[0].upper == 60.0

    def test_initial_samples_satisfy_aspect_bands(self):
        beam = SteppedBeam(n_seg=20)
        X = beam.sample_initial(np.random.default_rng(0), 100)
        b, h = X[:, :20], X[:, 20:]
        aspect = h / b
        assert (aspect >= 0.5 - 1e-12).all() and (aspect <= 2.0 + 1e-12).all()
        assert (X >= 0.1).all() and (X <= 40.0).all()


class TestPlanted:
    def test_diagonal_point(self):
        prob = PlantedEquality(10)
        f, g = prob.evaluate(np.full(10, 0.3))
        assert f[0] == pytest.approx(0.3)
        assert f[1] == pytest.approx(1.0 - np.sqrt(0.3))
        assert g.shape == (0,)

    def test_extreme_point(self):
        prob = PlantedEquality(10)
        f, _ = prob.evaluate(np.zeros(10))
        assert f[0] == 0.0 and f[1] == pytest.approx(1.0)

    def test_off_diagonal_dominated_by_projection(self):
        prob = PlantedEquality(8)
        rng = np.random.default_rng(2)
        for _ in range(50):
            x = rng.random(8)
            if np.allclose(x[1:], x[0]):
                continue
            f, _ = prob.evaluate(x)
            proj = np.full(8, x[0])
            fp, _ = prob.evaluate(proj)
            assert fp[0] == f[0] and fp[1] < f[1]

    def test_pareto_front_shape(self):
        prob = PlantedEquality(6)
        for t in np.linspace(0, 1, 11):
            f, _ = prob.evaluate(np.full(6, t))
            assert f[1] == pytest.approx(1.0 - np.sqrt(t), abs=1e-12)

    def test_needs_three_variables(self):
        with pytest.raises(ValueError):
            PlantedEquality(2)


class TestRegistry:
    def test_builtin_names(self):
        beam = get_problem("stepped_beam_39")
        assert beam.n_var == 78
        beam59 = get_problem("stepped_beam_59")
        assert beam59.n_var == 118 and beam59.delta_max == 0.06

    def test_planted_pattern(self):
        prob = get_problem("planted_eq_12")
        assert prob.n_var == 12

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            get_problem("knapsack_9000")

    def test_custom_plugin(self):
        sentinel = object()
        register("custom_thing", lambda **kw: sentinel)
        assert get_problem("custom_thing") is sentinel
        assert "custom_thing" in problem_names()
