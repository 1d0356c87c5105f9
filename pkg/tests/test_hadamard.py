import numpy as np
import pytest

from pjinv.hadamard import (BetaProfile, PreimageError, ball_inclusion_test,
                            beta_profile, compact_preimage_regularity,
                            hadamard_verdict, rho_at, write_profile_csv)
from pjinv.maps import exp1d_map, identity_map, linear_map, theta_map
from pjinv.pseudojac import parse_provider

SUM = parse_provider("sum")
EXACT = parse_provider("exact")


class TestBetaProfileType:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            BetaProfile([0.0], [1.0], "analytic")
        with pytest.raises(ValueError):
            BetaProfile([0.5, 1.0], [1.0, 1.0], "analytic")
        with pytest.raises(ValueError):
            BetaProfile([0.0, 1.0, 1.0], [1.0, 1.0, 1.0], "analytic")

    def test_monotone_enforcement(self):
        p = BetaProfile([0.0, 1.0, 2.0], [1.0, 2.0, 0.5], "sampled")
        assert np.all(np.diff(p.beta) <= 0)

    def test_rho_is_trapezoid_integral(self):
        grid = np.linspace(0.0, 2.0, 9)
        beta = 1.0 / (1.0 + grid)
        p = BetaProfile(grid, beta, "analytic")
        oracle = np.concatenate(
            [[0.0], np.cumsum(np.diff(grid) * (beta[1:] + beta[:-1]) / 2)])
        assert np.allclose(p.rho, oracle, atol=1e-15)
        assert p.rho[0] == 0.0
        assert np.all(np.diff(p.rho) >= 0)


class TestBetaProfileConstruction:
    def test_theta_c_analytic_integral(self):
        m = theta_map("c", 4)
        p = beta_profile(m, SUM, np.zeros(4), 2.0, grid_n=4097,
                         analytic_beta=m.analytic_beta)
        assert p.mode == "analytic"
        assert rho_at(p, 1.0) == pytest.approx(np.log(2.0), abs=1e-6)

    def test_theta_a_constant_profile(self):
        m = theta_map("a", 4, 0.5)
        p = beta_profile(m, SUM, np.zeros(4), 2.0, grid_n=65,
                         analytic_beta=m.analytic_beta)
        assert np.allclose(p.beta, 0.5)
        assert rho_at(p, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_theta_b_zero_profile(self):
        m = theta_map("b", 4)
        p = beta_profile(m, SUM, np.zeros(4), 1.0, grid_n=17,
                         analytic_beta=m.analytic_beta)
        assert np.all(p.beta == 0.0)
        assert np.all(p.rho == 0.0)

    def test_sampled_profile_tracks_analytic_bound(self):
        m = theta_map("c", 3)
        p = beta_profile(m, SUM, np.zeros(3), 1.0, grid_n=9,
                         samples_per_shell=16, rng=0)
        assert p.mode == "sampled"
        # sampled inf of 1/(1 + ||x|| + r) over each ball stays within it
        for t, b in zip(p.grid, p.beta):
            assert b <= 1.0 / (1.0 + 0.0) + 1e-9
            assert b >= 1.0 / (1.0 + t + 1e-2) - 1e-6

    def test_more_shell_samples_only_shrink(self):
        m = theta_map("c", 3)
        few = beta_profile(m, SUM, np.zeros(3), 1.0, grid_n=9,
                           samples_per_shell=8, rng=1)
        many = beta_profile(m, SUM, np.zeros(3), 1.0, grid_n=9,
                            samples_per_shell=32, rng=1)
        assert np.all(many.beta <= few.beta + 1e-9)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            beta_profile(identity_map(2), SUM, np.zeros(2), 0.0)
        with pytest.raises(ValueError):
            beta_profile(identity_map(2), SUM, np.zeros(2), 1.0, grid_n=1)


class TestVerdict:
    def test_analytic_divergent(self):
        m = theta_map("c", 3)
        p = beta_profile(m, SUM, np.zeros(3), 2.0, grid_n=33,
                         analytic_beta=m.analytic_beta)
        assert hadamard_verdict(p, analytic_divergent=True) \
            == "diverges_analytic"

    def test_zero_profile_fails(self):
        m = theta_map("b", 3)
        p = beta_profile(m, SUM, np.zeros(3), 1.0, grid_n=9,
                         analytic_beta=m.analytic_beta)
        assert hadamard_verdict(p, analytic_divergent=False) == "fails"

    def test_sampled_never_certifies_divergence(self):
        m = theta_map("a", 3, 0.5)
        p = beta_profile(m, SUM, np.zeros(3), 1.0, grid_n=5,
                         samples_per_shell=4, rng=2)
        assert hadamard_verdict(p, analytic_divergent=True) \
            == "inconclusive_growing"

    def test_decayed_profile_flat(self):
        p = BetaProfile([0.0, 1.0, 2.0], [1.0, 1e-3, 1e-3], "sampled")
        assert hadamard_verdict(p) == "inconclusive_flat"


class TestBallInclusion:
    def test_identity(self):
        m = identity_map(2)
        p = beta_profile(m, EXACT, np.zeros(2), 1.0, grid_n=9,
                         analytic_beta=m.analytic_beta)
        rate = ball_inclusion_test(m, EXACT, np.zeros(2), 1.0, p,
                                   samples=10, rng=0)
        assert rate == 1.0

    def test_linear_diag(self):
        m = linear_map(np.diag([2.0, 3.0]))
        p = beta_profile(m, EXACT, np.zeros(2), 1.0, grid_n=9,
                         analytic_beta=m.analytic_beta)
        assert rho_at(p, 1.0) == pytest.approx(2.0, abs=1e-12)
        rate = ball_inclusion_test(m, EXACT, np.zeros(2), 1.0, p,
                                   samples=20, rng=1)
        assert rate == 1.0

    def test_theta_a(self):
        m = theta_map("a", 5, 0.5)
        p = beta_profile(m, SUM, np.zeros(5), 1.0, grid_n=9,
                         analytic_beta=m.analytic_beta)
        rate = ball_inclusion_test(m, SUM, np.zeros(5), 1.0, p,
                                   samples=20, rng=2)
        assert rate == 1.0


class TestCompactPreimage:
    def test_identity(self):
        m = identity_map(2)
        k = [np.array([1.0, 0.0]), np.array([0.0, 2.0])]
        assert compact_preimage_regularity(m, EXACT, k, rng=0) \
            == pytest.approx(1.0, abs=1e-10)

    def test_linear(self):
        m = linear_map(np.diag([2.0, 3.0]))
        k = [np.array([4.0, 9.0]), np.array([-1.0, 1.0])]
        assert compact_preimage_regularity(m, EXACT, k, rng=1) \
            == pytest.approx(2.0, abs=1e-10)

    def test_theta_a_sphere(self):
        m = theta_map("a", 4, 0.5)
        rng = np.random.default_rng(2)
        k = []
        for _ in range(8):
            d = rng.standard_normal(4)
            k.append(5.0 * d / np.linalg.norm(d))
        assert compact_preimage_regularity(m, SUM, k, rng=3) \
            == pytest.approx(0.5, abs=1e-10)

    def test_failure_reports_witness(self):
        with pytest.raises(PreimageError) as err:
            compact_preimage_regularity(exp1d_map(), EXACT,
                                        [np.array([-1.0])], rng=4)
        assert np.allclose(err.value.target, [-1.0])


class TestCsvExport:
    def test_format(self, tmp_path):
        p = BetaProfile([0.0, 0.5, 1.0], [1.0, 0.8, 0.5], "analytic")
        out = tmp_path / "profile.csv"
        write_profile_csv(p, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "t,beta,rho"
        assert len(lines) == 4
        data = np.loadtxt(out, delimiter=",", skiprows=1)
        assert np.allclose(data[:, 0], p.grid)
        assert np.allclose(data[:, 1], p.beta)
        assert np.allclose(data[:, 2], p.rho)


def test_rho_at_rejects_out_of_range():
    p = BetaProfile([0.0, 1.0], [1.0, 1.0], "analytic")
    with pytest.raises(ValueError):
        rho_at(p, 2.0)
