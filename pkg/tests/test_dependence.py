"""The dependence measure I_n: exact stable path, ID quadrature, estimators."""

import math

import numpy as np
import pytest

from levyarma import (EstimationError, I_empirical, I_id, I_stable, ModelSpec,
                      ModelValidationError, StableSpec, codifference,
                      coefficients, compute_dependence, gauss_bump_id,
                      simulate_paths, stable_exponent, stable_to_id,
                      tempered_id)

AR1 = ModelSpec(phi=(0.5,))


class TestIStable:
    def test_ma_independence_exact_zero(self):
        ma1 = ModelSpec(theta=(0.5,))
        s = StableSpec(1.2, 0.4)
        for n in (2, 3, 8):
            assert I_stable(ma1, s, n, 1.0, 1.0).value == 0.0

    def test_marginal_cancellation(self):
        v = I_stable(AR1, StableSpec(1.5, 0.3), 1, 1.0, 0.0)
        assert v.value == 0.0 and v.err == 0.0

    def test_term_level_oracle(self):
        s = StableSpec(1.5, 0.3)
        c = 0.5 ** np.arange(2000)
        oracle = sum(stable_exponent(c[j], s) + stable_exponent(c[j + 1], s)
                     - stable_exponent(c[j] + c[j + 1], s) for j in range(1999))
        got = I_stable(AR1, s, 1, 1.0, 1.0)
        assert abs(got.value - oracle) < 1e-10

    def test_alpha1_term_level_oracle(self):
        s = StableSpec(1.0, 0.5)
        c = 0.5 ** np.arange(800)
        oracle = sum(stable_exponent(c[j], s) + stable_exponent(c[j + 2], s)
                     - stable_exponent(c[j] + c[j + 2], s) for j in range(798))
        got = I_stable(AR1, s, 2, 1.0, 1.0)
        assert abs(got.value - oracle) < 1e-12

    def test_location_mu_ignored(self):
        a = I_stable(AR1, StableSpec(1.5, 0.3, mu=0.0), 1, 1.0, 0.7)
        b = I_stable(AR1, StableSpec(1.5, 0.3, mu=2.5), 1, 1.0, 0.7)
        assert a.value == b.value

    def test_hermitian(self):
        for s in (StableSpec(0.7, -0.4), StableSpec(1.0, 0.5), StableSpec(1.5, 0.3)):
            for z1, z2 in ((1.0, 1.0), (0.7, -1.3), (2.0, 0.4)):
                a = I_stable(AR1, s, 2, z1, z2).value
                b = I_stable(AR1, s, 2, -z1, -z2).value
                assert b == pytest.approx(np.conj(a), abs=1e-14)

    def test_symmetric_real(self):
        for alpha in (0.7, 1.0, 1.5):
            v = I_stable(AR1, StableSpec(alpha, 0.0), 3, 1.0, 1.0)
            assert v.value.imag == 0.0

    def test_monotone_truncation_arma(self):
        s = StableSpec(1.5, 0.3)
        v1 = I_stable(AR1, s, 1, 1.0, 1.0, N=100)
        v2 = I_stable(AR1, s, 1, 1.0, 1.0, N=200)
        assert v2.err <= v1.err
        assert abs(v2.value - v1.value) <= v1.err

    def test_monotone_truncation_farima(self):
        m = ModelSpec(d=0.2)
        s = StableSpec(1.5, 0.0)
        v1 = I_stable(m, s, 20, 1.0, 1.0, N=2000)
        v2 = I_stable(m, s, 20, 1.0, 1.0, N=4000)
        assert v2.err <= v1.err
        assert abs(v2.value - v1.value) <= v1.err

    def test_farima_causality_gate(self):
        with pytest.raises(ModelValidationError):
            I_stable(ModelSpec(d=0.2), StableSpec(0.7, 0.0), 1, 1.0, 1.0)
        with pytest.raises(ModelValidationError):
            I_stable(ModelSpec(d=0.3), StableSpec(1.0, 0.5), 1, 1.0, 1.0)

    def test_gaussian_reduces_to_covariance(self):
        # alpha = 2: I_n = 2 z1 z2 sum c_j c_{j+n}
        v = I_stable(AR1, StableSpec(2.0, 0.0), 2, 0.7, 1.1)
        want = 2 * 0.7 * 1.1 * (0.25 * 4.0 / 3.0)
        assert v.value.real == pytest.approx(want, rel=1e-12)
        assert v.value.imag == 0.0


class TestIID:
    def test_z_zero_exact(self):
        spec = tempered_id(1.2, 1.0)
        assert I_id(AR1, spec, 1, 0.0, 1.0).value == 0.0
        assert I_id(AR1, spec, 1, 1.0, 0.0).value == 0.0

    def test_ma_independence_exact_zero(self):
        spec = tempered_id(1.2, 1.0)
        ma2 = ModelSpec(theta=(0.5, 0.2))
        for n in (3, 4):
            v = I_id(ma2, spec, n, 1.0, 1.0)
            assert v.value == 0.0 and v.err == 0.0

    def test_stable_like_matches_exact(self):
        s = StableSpec(0.7, 0.3)
        idspec, _ = stable_to_id(s)
        for n in (1, 4):
            vi = I_id(AR1, idspec, n, 1.0, 1.0)
            vs = I_stable(AR1, s, n, 1.0, 1.0)
            assert abs(vi.value - vs.value) <= 1e-5
            assert abs(vi.value - vs.value) <= vi.err + vs.err

    def test_compound_poisson_oracle_ma1(self):
        spec = gauss_bump_id(1.0, 0.004, 0.8)
        theta = 0.7
        z1, z2 = 0.4, 0.3
        got = I_id(ModelSpec(theta=(theta,)), spec, 1, z1, z2)
        # single shared innovation with pair (z1 c_0, z2 c_1) at x0 ~ 1
        want = (1 - np.exp(1j * z1)) * (np.exp(1j * z2 * theta) - 1) * 0.8
        assert got.value == pytest.approx(want, abs=2e-6)

    def test_hermitian(self):
        spec = tempered_id(1.2, 1.0)
        a = I_id(AR1, spec, 1, 0.8, -0.5).value
        b = I_id(AR1, spec, 1, -0.8, 0.5).value
        assert b == pytest.approx(np.conj(a), abs=1e-10)

    def test_value_stabilizes_in_N(self):
        spec = tempered_id(1.2, 1.0)
        v1 = I_id(AR1, spec, 1, 1.0, 1.0, N=20)
        v2 = I_id(AR1, spec, 1, 1.0, 1.0, N=40)
        assert abs(v2.value - v1.value) <= v1.err

    def test_farima_moment_gate(self):
        spec = tempered_id(1.2, 1.0, eta=2.0)
        with pytest.raises(ModelValidationError):
            I_id(ModelSpec(d=0.6), spec, 1, 1.0, 1.0)


class TestCodifference:
    def test_ma_zero(self):
        v = codifference(ModelSpec(theta=(0.5,)), StableSpec(1.5, 0.3), 2)
        assert v.value == 0.0

    def test_symmetric_real(self):
        v = codifference(AR1, StableSpec(1.5, 0.0), 1)
        assert v.value.imag == 0.0

    def test_direct_series_oracle(self):
        alpha = 1.5
        c = 0.5 ** np.arange(600)
        direct = -np.sum(np.abs(c[:-1] - c[1:]) ** alpha
                         - c[:-1] ** alpha - c[1:] ** alpha)
        v = codifference(AR1, StableSpec(alpha, 0.0), 1)
        assert v.value.real == pytest.approx(direct, rel=1e-12)

    def test_dispatches_id(self):
        v = codifference(AR1, tempered_id(1.2, 1.0), 1)
        assert v.n == 1 and v.z1 == 1.0 and v.z2 == -1.0


class TestSecondDerivativeLink:
    def test_covariance_link_quick(self):
        # finite-variance ID innovation: d2 I/dz1 dz2 at 0 = Var(eps) sum c_j c_{j+n}
        spec = tempered_id(1.2, 1.0, eta=2.0)
        from scipy.integrate import quad
        var, _ = quad(lambda x: x * x * spec.levy_density(x), 0, np.inf, limit=200)
        var *= 2.0
        n = 1
        cov = var * 0.5 ** n * 4.0 / 3.0
        h = 0.02
        def mixed(hh):
            quadv = (I_id(AR1, spec, n, hh, hh).value
                     - I_id(AR1, spec, n, hh, -hh).value
                     - I_id(AR1, spec, n, -hh, hh).value
                     + I_id(AR1, spec, n, -hh, -hh).value)
            return quadv.real / (4.0 * hh * hh)
        rich = (4.0 * mixed(h / 2) - mixed(h)) / 3.0
        assert rich == pytest.approx(cov, rel=1e-4)


class TestEmpirical:
    def test_white_noise_near_zero(self):
        batch = simulate_paths(ModelSpec(), StableSpec(1.5, 0.0),
                               replicates=20000, length=4, seed=5)
        v = I_empirical(batch, 1, 0.5, 0.5)
        assert abs(v.value) <= 3 * v.err

    def test_ar1_matches_exact(self):
        s = StableSpec(1.7, 0.0)
        batch = simulate_paths(AR1, s, replicates=30000, length=4, seed=6)
        for n in (1, 2):
            emp = I_empirical(batch, n, 0.5, 0.5)
            ex = I_stable(AR1, s, n, 0.5, 0.5)
            assert abs(emp.value - ex.value) <= 3 * emp.err

    def test_z_zero_exact(self):
        batch = simulate_paths(AR1, StableSpec(1.7, 0.0), replicates=100,
                               length=4, seed=7)
        v = I_empirical(batch, 1, 0.0, 0.5)
        assert v.value == 0.0 and v.err == 0.0

    def test_modulus_guard(self):
        # phases spread uniformly over the circle make the empirical CF
        # modulus collapse below the 1e-3 stability floor
        R = 10000
        mat = np.zeros((R, 2))
        mat[:, 0] = np.linspace(0.0, 2.0 * np.pi, R, endpoint=False)
        mat[:, 1] = mat[:, 0]
        with pytest.raises(EstimationError):
            I_empirical(mat, 1, 1.0, 1.0)

    def test_single_path_mode(self):
        batch = simulate_paths(AR1, StableSpec(1.7, 0.0), replicates=1,
                               length=50000, seed=9)
        v = I_empirical(batch, 1, 0.5, 0.5, single_path=True)
        ex = I_stable(AR1, StableSpec(1.7, 0.0), 1, 0.5, 0.5)
        assert abs(v.value - ex.value) <= 4 * v.err

    def test_json_shape(self):
        v = I_stable(AR1, StableSpec(1.5, 0.3), 1, 1.0, 1.0)
        d = v.to_dict()
        assert set(d) == {"n", "z1", "z2", "re", "im", "err"}


class TestDispatch:
    def test_compute_dependence_routes(self):
        a = compute_dependence(AR1, StableSpec(1.5, 0.0), 1, 1.0, 1.0)
        b = I_stable(AR1, StableSpec(1.5, 0.0), 1, 1.0, 1.0)
        assert a.value == b.value
        with pytest.raises(TypeError):
            compute_dependence(AR1, object(), 1, 1.0, 1.0)

    def test_cross_path_agreement_grid(self):
        # I_stable vs I_id(stable_to_id) within combined err over (alpha, n)
        for alpha, beta in ((0.7, 0.3), (1.2, -0.4)):
            s = StableSpec(alpha, beta)
            idspec, _ = stable_to_id(s)
            for n in (1, 3):
                vs = I_stable(AR1, s, n, 0.8, 1.1)
                vi = I_id(AR1, idspec, n, 0.8, 1.1)
                assert abs(vs.value - vi.value) <= vs.err + vi.err
