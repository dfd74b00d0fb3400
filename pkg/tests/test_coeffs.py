"""Coefficient engine: validation, streams, binomial weights, descriptors."""

import io
import json
import math

import numpy as np
import pytest
from scipy.signal import fftconvolve
from scipy.special import gammaln

from levyarma import (AsymDescriptor, ModelSpec, ModelValidationError,
                      arma_coeffs, asym_descriptor, binomial_weights,
                      farima_coeffs, farima_constant, validate_model)
from conftest import long_division, random_causal_model


class TestValidateModel:
    def test_causal_ar1_passes(self):
        assert validate_model(ModelSpec(phi=(0.5,))) == []

    def test_root_inside_disk(self):
        diags = validate_model(ModelSpec(phi=(1.5,)))
        assert len(diags) == 1
        assert "inside unit disk" in diags[0]
        assert "0.6666" in diags[0]

    def test_common_zero(self):
        diags = validate_model(ModelSpec(phi=(0.5,), theta=(-0.5,)))
        assert any("common zero" in d for d in diags)
        assert any("2" in d for d in diags)

    def test_borderline_root_is_flagged_not_passed(self):
        # unit root at z = 1 exactly
        diags = validate_model(ModelSpec(phi=(1.0,)))
        assert any("borderline" in d for d in diags)

    def test_non_finite_rejected(self):
        with pytest.raises(ModelValidationError):
            validate_model(ModelSpec(phi=(math.nan,)))
        with pytest.raises(ModelValidationError):
            validate_model(ModelSpec(theta=(math.inf,)))

    def test_json_round_trip(self):
        spec = ModelSpec(phi=(0.5, -0.1), theta=(0.3,), d=0.2)
        again = ModelSpec.from_json(spec.to_json())
        assert again == spec


class TestArmaCoeffs:
    def test_identity_filter(self):
        st = arma_coeffs(ModelSpec(), 3)
        np.testing.assert_array_equal(st.values, [1.0, 0.0, 0.0, 0.0])
        assert st.tail_bound == 0.0

    def test_geometric(self):
        st = arma_coeffs(ModelSpec(phi=(0.5,)), 3)
        np.testing.assert_allclose(st.values, [1.0, 0.5, 0.25, 0.125], rtol=0)

    def test_arma11_long_division(self):
        st = arma_coeffs(ModelSpec(phi=(0.5,), theta=(0.3,)), 60)
        oracle = long_division((0.3,), (0.5,), 60)
        np.testing.assert_allclose(st.values, oracle, atol=1e-14)

    def test_random_models_match_long_division(self, rng):
        for _ in range(25):
            spec = random_causal_model(rng)
            st = arma_coeffs(spec, 200)
            oracle = long_division(spec.theta, spec.phi, 200)
            scale = max(1.0, np.abs(oracle).max())
            assert np.max(np.abs(st.values - oracle)) <= 1e-12 * scale

    def test_rejects_invalid(self):
        with pytest.raises(ModelValidationError):
            arma_coeffs(ModelSpec(phi=(1.5,)), 10)

    def test_c0_is_one(self, rng):
        for _ in range(5):
            spec = random_causal_model(rng)
            assert arma_coeffs(spec, 10).values[0] == 1.0

    def test_tail_bound_envelope_holds(self):
        st = arma_coeffs(ModelSpec(phi=(0.5,)), 30)
        # true tail of sum |c_j| beyond N = 30 is 0.5^31 * 2
        assert st.tail_bound >= 0.5 ** 31 * 2.0
        assert st.tail_bound < 1e-7

    def test_csv_export(self):
        st = arma_coeffs(ModelSpec(phi=(0.5,)), 2)
        text = st.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "j,c_j"
        assert lines[1] == "0,1"
        assert float(lines[2].split(",")[1]) == 0.5


class TestBinomialWeights:
    def test_first_weights(self):
        b = binomial_weights(0.3, 2)
        assert b[0] == 1.0
        assert b[1] == pytest.approx(0.3, rel=0, abs=0)
        assert b[2] == pytest.approx(0.3 * 1.3 / 2.0)

    def test_log_gamma_oracle_at_100(self):
        d = 0.3
        b = binomial_weights(d, 100)
        want = math.exp(gammaln(100 + d) - gammaln(d) - gammaln(101))
        assert b[100] == pytest.approx(want, rel=1e-12)

    def test_rejects_d_ge_1(self):
        with pytest.raises(ModelValidationError):
            binomial_weights(1.0, 5)

    def test_negative_d_series_converges_absolutely(self):
        # sum b_j = (1-1)^{0.3} = 0; partial sums decay like N^{d}
        b = binomial_weights(-0.3, 10 ** 6)
        csum = np.cumsum(b)
        half = csum[len(csum) // 2]
        assert abs(csum[-1]) < abs(half)
        assert csum[-1] / half == pytest.approx(2.0 ** (-0.3), rel=0.02)
        # absolute summability: |b_j| tail increments shrink at the j^{d-1} rate
        tails = [np.abs(b[N:2 * N]).sum() for N in (10 ** 5, 25 * 10 ** 4)]
        assert tails[1] < tails[0]

    def test_no_overflow_huge_j(self):
        b = binomial_weights(0.45, 2 * 10 ** 5)
        assert np.all(np.isfinite(b))


class TestFarimaCoeffs:
    def test_pure_fractional_equals_binomial(self):
        st = farima_coeffs(ModelSpec(d=0.3), 50)
        np.testing.assert_array_equal(st.values, binomial_weights(0.3, 50))

    def test_convolution_consistency_fft_oracle(self, rng):
        for _ in range(8):
            spec = random_causal_model(rng, with_d=True)
            if spec.d == 0.0:
                continue
            N = 300
            st = farima_coeffs(spec, N)
            arma = arma_coeffs(ModelSpec(spec.phi, spec.theta, 0.0), N).values
            oracle = fftconvolve(arma, binomial_weights(spec.d, N))[: N + 1]
            scale = max(1.0, np.abs(oracle).max())
            assert np.max(np.abs(st.values - oracle)) <= 1e-12 * scale

    def test_tail_constant_small_scale(self):
        # c_j / j^{d-1} -> Theta(1)/(Phi(1) Gamma(d)) with O(1/j) error
        spec = ModelSpec(phi=(0.5,), theta=(0.3,), d=0.3)
        st = farima_coeffs(spec, 5000)
        A = farima_constant(spec)
        j = np.arange(1000, 5001)
        dev = j * np.abs(st.values[1000:] / j ** (spec.d - 1.0) - A)
        assert dev.max() < 10 * dev.min() + 1.0

    def test_consecutive_coefficient_ratios(self):
        # c_{j+n}/c_j -> 1 for FARIMA and e^{-lambda1 n} for ARMA (rho1 = 0);
        # the ARMA model needs lambda1 small enough that c_{10^4} is above the
        # underflow floor
        j, n = 10 ** 4, 3
        far = farima_coeffs(ModelSpec(d=0.3), j + n).values
        assert far[j + n] / far[j] == pytest.approx(1.0, abs=1e-3)
        arma = arma_coeffs(ModelSpec(phi=(0.995,)), j + n).values
        lam1 = -math.log(0.995)
        assert arma[j + n] / arma[j] == pytest.approx(math.exp(-lam1 * n), abs=1e-3)


class TestAsymDescriptor:
    def test_ar1(self):
        d = asym_descriptor(ModelSpec(phi=(0.5,)))
        assert d.lambda1 == pytest.approx(math.log(2))
        assert d.rho1 == 0.0
        assert d.l1 == 1
        assert d.h == pytest.approx(1.0, abs=1e-12)
        assert d.h_fit == pytest.approx(1.0, abs=1e-9)

    def test_two_real_roots_partial_fraction_vs_tail_fit(self):
        d = asym_descriptor(ModelSpec(phi=(0.75, -0.125)))
        assert d.lambda1 == pytest.approx(math.log(2))
        assert d.l1 == 1
        assert abs(d.h - d.h_fit) < 1e-6

    def test_double_root(self):
        d = asym_descriptor(ModelSpec(phi=(1.0, -0.25)))
        assert d.lambda1 == pytest.approx(math.log(2), abs=1e-6)
        assert d.l1 == 2

    def test_complex_pair(self):
        d = asym_descriptor(ModelSpec(phi=(0.8, -0.32)))
        assert d.rho1 > 0.0
        assert d.l1 == 1

    def test_ma_only_sentinel(self):
        d = asym_descriptor(ModelSpec(theta=(0.4, 0.1)))
        assert d.lambda1 == math.inf
        assert d.h == 0.0

    def test_farima_constant_present(self):
        d = asym_descriptor(ModelSpec(phi=(0.5,), theta=(0.3,), d=0.3))
        from scipy.special import gamma
        assert d.farima_const == pytest.approx(1.3 / (0.5 * gamma(0.3)))

    def test_dominant_root_envelope_shrinks(self):
        # sup_{j >= J} |c_j j^{-(l1-1)} e^{lambda1 j} - h| decreasing in J;
        # roots at 2 and 2.2 keep the second-root correction above the float
        # noise floor out to J = 200
        spec = ModelSpec(phi=(1.0 / 2.0 + 1.0 / 2.2, -1.0 / 4.4))
        d = asym_descriptor(spec)
        c = arma_coeffs(spec, 280).values
        sups = []
        for J in (50, 100, 200):
            j = np.arange(J, 281, dtype=float)
            vals = c[J:] * np.exp(d.lambda1 * j) / j ** (d.l1 - 1)
            sups.append(np.max(np.abs(vals - d.h)))
        assert sups[0] > sups[1] > sups[2]
