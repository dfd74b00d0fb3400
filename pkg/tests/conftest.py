"""Shared test helpers: independent oracles and random model generation."""

import numpy as np
import pytest

from levyarma import ModelSpec


def long_division(theta, phi, N):
    """Schoolbook power-series long division of Theta(z)/Phi(z).

    Maintains an explicit remainder polynomial and peels off one coefficient
    per step -- an independent arithmetic path from the filter recurrence.
    """
    theta = [1.0] + list(theta)
    phi = [1.0] + [-v for v in phi]
    rem = list(theta) + [0.0] * (N + len(phi) + 1 - len(theta))
    out = []
    for j in range(N + 1):
        c = rem[j] / phi[0]
        out.append(c)
        for k, pk in enumerate(phi):
            rem[j + k] -= c * pk
    return np.array(out)


def random_causal_model(rng, pmax=4, qmax=4, min_root=1.15, max_root=4.0,
                        with_d=False):
    """Random causal ARMA spec built from roots sampled outside the unit disk."""
    while True:
        p = rng.integers(0, pmax + 1)
        q = rng.integers(0, qmax + 1)
        phi = _poly_from_random_roots(rng, p, min_root, max_root, "ar")
        theta = _poly_from_random_roots(rng, q, min_root, max_root, "ma")
        d = float(rng.uniform(-0.4, 0.4)) if with_d else 0.0
        spec = ModelSpec(phi=phi, theta=theta, d=d)
        from levyarma import validate_model
        if not validate_model(spec):
            return spec


def _poly_from_random_roots(rng, degree, min_root, max_root, kind):
    """Phi/Theta coefficients built from random real roots and conjugate
    pairs outside the unit disk."""
    roots = []
    k = degree
    while k > 0:
        if k >= 2 and rng.random() < 0.4:
            r = rng.uniform(min_root, max_root)
            ang = rng.uniform(0.2, np.pi - 0.2)
            z = r * np.exp(1j * ang)
            roots += [z, np.conj(z)]
            k -= 2
        else:
            sign = -1.0 if rng.random() < 0.3 else 1.0
            roots.append(sign * rng.uniform(min_root, max_root))
            k -= 1
    poly = np.array([1.0])
    for z in roots:
        # multiply by (1 - x/z)
        poly = np.convolve(poly, np.array([1.0, -1.0 / z]))
    poly = np.real(poly)
    if not degree:
        return ()
    # Phi(z) = 1 - sum phi_k z^k, Theta(z) = 1 + sum theta_k z^k
    return tuple(-poly[1:]) if kind == "ar" else tuple(poly[1:])


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
