"""The characteristic-function dependence measure I(X_0, X_n; z1, z2).

For a causal linear process X_t = sum_j c_j eps_{t-j},

    I_n = log E e^{i z1 X_0} + log E e^{i z2 X_n} - log E e^{i(z1 X_0 + z2 X_n)}

collapses, innovation by innovation, to a sum over the shared indices:

    I_n = sum_{j>=0} [ psi(z1 c_j) + psi(z2 c_{j+n}) - psi(z1 c_j + z2 c_{j+n}) ]

with psi the innovation's log-characteristic function.  Computing I_n as
this term-by-term cumulant sum (never as a log of CF ratios) eliminates
complex-logarithm branch ambiguity outright.  Location parameters cancel
term-by-term and are ignored.

Stable innovations give closed-form terms built from the kernels module;
general infinitely divisible innovations are integrated term-by-term
against the Levy measure,

    V_j(n) = int (1 - e^{i z1 c_j x}) (e^{i z2 c_{j+n} x} - 1) nu(dx).

ARMA truncation follows the geometric term envelope.  FARIMA series decay
only polynomially, far too slowly to be summed to tolerance directly, so
the stable path sums an exact head block and replaces the tail with its
asymptotic integral (the coefficient tail is A j^{d-1} (1 + O(1/j)) with
A = Theta(1)/(Phi(1) Gamma(d)), which turns the tail into the same
g-integrals that govern the n -> infinity limits).  The substitution error
is tracked in ``err`` alongside the quadrature estimates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import kernels
from .coeffs import (CoeffStream, ModelSpec, arma_coeffs, asym_descriptor,
                     coefficients, farima_constant, validate_model)
from .errors import EstimationError, ModelValidationError, TruncationError
from .innovations import (IDSpec, StableSpec, levy_moments, validate_innovation,
                          vterm_integral)

__all__ = [
    "DependenceValue",
    "I_stable",
    "I_id",
    "codifference",
    "I_empirical",
    "compute_dependence",
]

TRUNCATION_CAP = 10 ** 7
_REL_TAIL_TARGET = 1e-12   # default envelope target, relative to |value|
_FARIMA_HEAD_FACTOR = 64   # head length = factor * n unless N given


@dataclass(frozen=True)
class DependenceValue:
    """Complex I(X_0, X_n; z1, z2) with an absolute error estimate."""

    value: complex
    n: int
    z1: float
    z2: float
    err: float

    def to_dict(self) -> dict:
        return {"n": self.n, "z1": self.z1, "z2": self.z2,
                "re": float(self.value.real), "im": float(self.value.imag),
                "err": self.err}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _require_causal(model: ModelSpec) -> None:
    diags = validate_model(model)
    if diags:
        raise ModelValidationError(diags)


def require_farima_moment_condition(model: ModelSpec, eta: float) -> None:
    """Existence gate for FARIMA: eta*(d-1) < -1 (strict)."""
    if model.d != 0.0 and eta * (model.d - 1.0) >= -1.0:
        raise ModelValidationError(
            f"FARIMA existence requires eta*(d-1) < -1; got eta={eta:g}, d={model.d:g} "
            f"(eta*(d-1) = {eta * (model.d - 1.0):g})")


def _stable_terms(c_head: np.ndarray, c_lag: np.ndarray, s: StableSpec,
                  z1: float, z2: float) -> np.ndarray:
    """V_j = psi(r)+psi(s)-psi(r+s) for stable psi, vectorized over j."""
    r = z1 * c_head
    t = z2 * c_lag
    a = s.alpha
    if a == 1.0:
        rv = kernels.abs_diff(r, t)
        if s.beta == 0.0:
            return rv + 0.0j
        iv = kernels.xlogx_diff(r, t)
        return rv + 1j * s.beta * (2.0 / math.pi) * iv
    rv = kernels.abs_pow_diff(r, t, a)
    if s.beta == 0.0 or a == 2.0:
        return rv + 0.0j
    tan_a = math.tan(math.pi * a / 2.0)
    iv = kernels.signed_pow_diff(r, t, a)
    return rv - 1j * s.beta * tan_a * iv


def _arma_term_envelope(desc, M_env: float, s_alpha: float, s_beta: float,
                        z1: float, z2: float, j: np.ndarray, n: int) -> np.ndarray:
    """Pointwise bound on |V_j| from the coefficient envelope
    |c_j| <= M j^(l1-1) rho^j and the two-point inequalities."""
    rho = math.exp(-desc.lambda1)
    l1 = desc.l1
    cj = M_env * np.maximum(j, 1.0) ** (l1 - 1) * rho ** j
    cjn = M_env * (j + n) ** (l1 - 1) * rho ** (j + n)
    r = abs(z1) * cj
    t = abs(z2) * cjn
    a = s_alpha
    if a == 1.0:
        # |RV| <= 2 t ; |IV| <= t (|log t| + |log r| + |log(r+s)| + 1)
        safe_t = np.where(t > 0, t, 1.0)
        safe_r = np.where(r > 0, r, 1.0)
        logs = np.abs(np.log(safe_t)) + 2.0 * np.abs(np.log(safe_r)) + 2.0
        return 2.0 * t + abs(s_beta) * (2.0 / math.pi) * t * logs
    scale = 1.0 + abs(s_beta * math.tan(math.pi * a / 2.0))
    if a <= 1.0:
        return scale * 2.0 * t ** a
    return scale * (a * t * r ** (a - 1.0) + (a + 1.0) * t ** a)


def _geometric_tail(bound_fn, N: int, rho_eff: float) -> float:
    """Sum bound_fn over j > N assuming eventual ratio <= rho_eff < 1."""
    if rho_eff >= 1.0:
        return math.inf
    b = float(bound_fn(np.array([N + 1.0]))[0])
    return b / (1.0 - rho_eff)


def I_stable(model: ModelSpec, s: StableSpec, n: int, z1: float, z2: float,
             N: int | None = None) -> DependenceValue:
    """Exact I_n for stable innovations (location mu cancels and is ignored)."""
    _require_causal(model)
    if n < 1:
        raise ValueError("lag n must be >= 1")
    if z1 == 0.0 or z2 == 0.0:
        return DependenceValue(0.0 + 0.0j, n, z1, z2, 0.0)
    if model.is_farima:
        require_farima_moment_condition(model, s.alpha)
        return _I_stable_farima(model, s, n, z1, z2, N)
    return _I_stable_arma(model, s, n, z1, z2, N)


def _I_stable_arma(model, s, n, z1, z2, N):
    if model.p == 0:
        # finite MA filter: the sum is exact; I_n = 0 identically for n > q
        stream = arma_coeffs(model, model.q + n)
        c = stream.values
        terms = _stable_terms(c[: model.q + 1], c[n: model.q + n + 1], s, z1, z2)
        value = complex(terms.sum())
        return DependenceValue(value, n, z1, z2, 5e-16 * float(np.abs(terms).sum()))

    desc = asym_descriptor(model, _fit_tail=False)
    rho_eff = math.exp(-desc.lambda1 * min(s.alpha, 1.0)) * 1.01
    n_head = N if N is not None else max(128, 8 * (model.p + model.q + n))
    while True:
        stream = arma_coeffs(model, n_head + n)
        c = stream.values
        M_env = _envelope_constant(stream, desc)
        bound_fn = lambda jj: _arma_term_envelope(desc, M_env, s.alpha, s.beta,
                                                  z1, z2, jj, n)
        tail = _geometric_tail(bound_fn, n_head, rho_eff)
        terms = _stable_terms(c[: n_head + 1], c[n: n_head + n + 1], s, z1, z2)
        value = complex(terms.sum())
        if N is not None or tail <= _REL_TAIL_TARGET * max(1.0, abs(value)):
            break
        if n_head >= TRUNCATION_CAP:
            raise TruncationError(
                f"envelope tail bound {tail:.3g} still above tolerance at the "
                f"{TRUNCATION_CAP} term cap; increase N explicitly",
                suggested_n=None)
        n_head = min(2 * n_head, TRUNCATION_CAP)
    err = tail + 5e-16 * float(np.abs(terms).sum())
    return DependenceValue(value, n, z1, z2, err)


def _envelope_constant(stream: CoeffStream, desc) -> float:
    env = stream._envelope
    if env[0] == "geometric":
        return env[1]
    values = stream.values
    j = np.arange(max(1, len(values) - 50), len(values), dtype=float)
    v = np.abs(values[int(j[0]):])
    keep = v > 0
    if not keep.any():
        return 0.0
    return float(np.max(v[keep] / (j[keep] ** (desc.l1 - 1)
                                   * np.exp(-desc.lambda1 * j[keep]))))


def _farima_tail_integral(gfun, x0: float, epsabs: float = 1e-12):
    """int_{x0}^infty g(x) dx via x = x0/t, t in (0,1]."""
    val, err = quad(lambda t: gfun(x0 / t) * x0 / t ** 2, 0.0, 1.0,
                    epsabs=epsabs, epsrel=1e-10, limit=400)
    return val, err


def _I_stable_farima(model, s, n, z1, z2, N):
    n_head = N if N is not None else min(max(_FARIMA_HEAD_FACTOR * n, 4096),
                                         TRUNCATION_CAP)
    stream = coefficients(model, n_head + n)
    c = stream.values
    terms = _stable_terms(c[: n_head + 1], c[n: n_head + n + 1], s, z1, z2)
    head = complex(terms.sum())

    a = s.alpha
    A = farima_constant(model)
    x0 = (n_head + 0.5) / n
    rate = a * (model.d - 1.0) + 1.0   # = d when a == 1
    scale = n ** rate
    if a == 1.0:
        g1 = lambda x: kernels.abs_diff(z1 * x ** (model.d - 1.0),
                                        z2 * (1.0 + x) ** (model.d - 1.0))
        t1, e1 = _farima_tail_integral(g1, x0)
        tail = abs(A) * scale * t1
        equad = abs(A) * scale * e1
        if s.beta != 0.0:
            g3 = lambda x: kernels.xlogx_diff(z1 * x ** (model.d - 1.0),
                                              z2 * (1.0 + x) ** (model.d - 1.0))
            t3, e3 = _farima_tail_integral(g3, x0)
            tail += 1j * s.beta * (2.0 / math.pi) * A * scale * t3
            equad += abs(A) * scale * e3
    else:
        g1 = lambda x: kernels.abs_pow_diff(z1 * x ** (model.d - 1.0),
                                            z2 * (1.0 + x) ** (model.d - 1.0), a)
        t1, e1 = _farima_tail_integral(g1, x0)
        tail = abs(A) ** a * scale * t1
        equad = abs(A) ** a * scale * e1
        if s.beta != 0.0 and a != 2.0:
            g2 = lambda x: kernels.signed_pow_diff(z1 * x ** (model.d - 1.0),
                                                   z2 * (1.0 + x) ** (model.d - 1.0), a)
            t2, e2 = _farima_tail_integral(g2, x0)
            signedA = math.copysign(abs(A) ** a, A)
            tail += -1j * s.beta * math.tan(math.pi * a / 2.0) * signedA * scale * t2
            equad += abs(A) ** a * scale * e2

    # error budget of the tail substitution:
    #   * coefficient tail is A j^{d-1} (1 + O(1/j)): relative eps_N at the head end
    #   * midpoint Euler-Maclaurin correction ~ |f'(x0)|/24 in series units
    jN = float(n_head)
    eps_N = abs(c[n_head] / (A * jN ** (model.d - 1.0)) - 1.0)
    sub_err = abs(tail) * (a + 1.0) * eps_N
    h = 0.5 / n
    em_err = abs(abs(A) ** min(a, 1.0) * scale
                 * (g1(x0 + h) - g1(x0 - h)) / (2.0 * h) / n) / 24.0
    err = equad + sub_err + em_err + 5e-16 * float(np.abs(terms).sum())
    return DependenceValue(head + tail, n, z1, z2, err)


# ---------------------------------------------------------------------------
# General infinitely divisible innovations

def I_id(model: ModelSpec, spec: IDSpec, n: int, z1: float, z2: float,
         N: int | None = None, term_tol: float = 1e-11) -> DependenceValue:
    """I_n by term-wise Levy quadrature: I_n = sum_j V_j(n).

    The Gaussian part is absent by assumption and the drift cancels inside
    V_j.  Terms whose envelope

        |V_j| <= |z1 c_j| |z2 c_{j+n}| E2  +  2^{2-eta} |z2 c_{j+n}|^eta E_eta

    (the |x| <= 1 region bounded through x^2, the |x| > 1 region through
    |x|^eta) are already negligible are skipped, with the envelope added
    to ``err``.
    """
    _require_causal(model)
    if n < 1:
        raise ValueError("lag n must be >= 1")
    diags = validate_innovation(spec)
    if diags:
        raise ModelValidationError(diags)
    if z1 == 0.0 or z2 == 0.0:
        return DependenceValue(0.0 + 0.0j, n, z1, z2, 0.0)
    require_farima_moment_condition(model, spec.eta)

    mom = levy_moments(spec)
    E2, E_eta = mom.x2_small, mom.eta_tail
    eta = spec.eta

    if N is None:
        if model.is_farima:
            # polynomial term decay: the series remainder lands in err via
            # the envelope either way, so a moderate default head suffices
            N = max(256, 8 * n)
        elif model.p == 0:
            N = model.q
        else:
            desc = asym_descriptor(model, _fit_tail=False)
            # geometric decay at rate eta*lambda1: enough terms for 1e-14 relative
            N = max(64, int(36.0 / (eta * desc.lambda1)) + 8 * (model.p + model.q + n))
        N = min(N, TRUNCATION_CAP)
    stream = coefficients(model, N + n)
    c = stream.values

    def envelope(j):
        cj, cjn = abs(c[j]), abs(c[j + n])
        return (abs(z1) * cj * abs(z2) * cjn * E2
                + 2.0 ** (2.0 - eta) * (abs(z2) * cjn) ** eta * E_eta)

    value = 0.0 + 0.0j
    err = 0.0
    env_err = 0.0
    cutoff_scale = 1.0
    mags: list = []
    for j in range(N + 1):
        a, b = z1 * c[j], z2 * c[j + n]
        if a == 0.0 or b == 0.0:
            continue
        env = envelope(j)
        if env < term_tol * 1e-2 * cutoff_scale:
            env_err += env
            continue
        v, e = vterm_integral(spec, a, b, tol=term_tol)
        value += v
        err += e
        cutoff_scale = max(cutoff_scale, abs(value))
        # empirical geometric stop: once several consecutive terms sit below
        # tolerance and keep shrinking fast, charge the fitted remainder to
        # err (with a 3x cushion) instead of integrating noise-level terms
        mags.append(abs(v))
        if len(mags) >= 4 and all(m < term_tol * cutoff_scale for m in mags[-3:]):
            r = max(mags[-1] / mags[-2], mags[-2] / mags[-3])
            if r < 0.9:
                err += 3.0 * mags[-1] * r / (1.0 - r)
                break
    # series remainder beyond N: the x^2 piece through sum |c_j c_{j+n}| <=
    # 2 sum c_j^2, the tail piece through sum |c_{j+n}|^eta; the eta moment's
    # own uncertainty scales the envelope-derived part of the budget
    env_err += abs(z1 * z2) * E2 * 2.0 * stream.tail_power_bound(2.0)
    env_err += (2.0 ** (2.0 - eta) * abs(z2) ** eta * E_eta
                * stream.tail_power_bound(eta))
    eta_rel = mom.eta_tail_err / E_eta if E_eta > 0.0 else 0.0
    err += env_err * (1.0 + eta_rel)
    return DependenceValue(value, n, z1, z2, err)


def compute_dependence(model: ModelSpec, innovation, n: int, z1: float,
                       z2: float, N: int | None = None) -> DependenceValue:
    """Dispatch on the innovation type (exact stable path vs ID quadrature)."""
    if isinstance(innovation, StableSpec):
        return I_stable(model, innovation, n, z1, z2, N)
    if isinstance(innovation, IDSpec):
        return I_id(model, innovation, n, z1, z2, N)
    raise TypeError(f"unsupported innovation spec {type(innovation).__name__}")


def codifference(model: ModelSpec, innovation, n: int,
                 N: int | None = None) -> DependenceValue:
    """-I(X_0, X_n; 1, -1), the classical codifference."""
    base = compute_dependence(model, innovation, n, 1.0, -1.0, N)
    return DependenceValue(-base.value, n, 1.0, -1.0, base.err)


# ---------------------------------------------------------------------------
# Empirical estimator

def I_empirical(paths, n: int, z1: float, z2: float,
                single_path: bool = False) -> DependenceValue:
    """Estimate I_n from simulated sample paths.

    Default mode pairs (X_0, X_n) across independent replicate paths, so the
    Monte-Carlo error of each log-CF term follows from i.i.d. theory; the
    reported ``err`` is the full delta-method standard error of the complex
    estimate (gradient through all three empirical CF terms with their joint
    covariance).  ``single_path=True`` instead uses all pairs (X_t, X_{t+n})
    of the first path with a delete-block jackknife error.
    """
    mat = np.asarray(getattr(paths, "paths", paths), dtype=float)
    if mat.ndim != 2:
        raise ValueError("paths must be a (replicates, length) matrix")
    if mat.shape[1] <= n:
        raise ValueError("path length must exceed the lag")
    if z1 == 0.0 or z2 == 0.0:
        # the log terms cancel algebraically before any estimation
        return DependenceValue(0.0 + 0.0j, n, z1, z2, 0.0)

    if single_path:
        x = mat[0]
        x0, xn = x[:-n], x[n:]
        val = _ecf_combination(x0, xn, z1, z2)
        nblocks = 20
        blocks = np.array_split(np.arange(x0.size), nblocks)
        jk = []
        for bl in blocks:
            keep = np.ones(x0.size, dtype=bool)
            keep[bl] = False
            jk.append(_ecf_combination(x0[keep], xn[keep], z1, z2))
        jk = np.array(jk)
        av = jk.mean()
        var = (nblocks - 1) / nblocks * np.sum(np.abs(jk - av) ** 2)
        return DependenceValue(val, n, z1, z2, math.sqrt(var))

    x0, xn = mat[:, 0], mat[:, n]
    val = _ecf_combination(x0, xn, z1, z2)
    err = _delta_method_err(x0, xn, z1, z2)
    return DependenceValue(val, n, z1, z2, err)


def _ecf_terms(x0, xn, z1, z2):
    e1 = np.exp(1j * z1 * x0)
    e2 = np.exp(1j * z2 * xn)
    e12 = np.exp(1j * (z1 * x0 + z2 * xn))
    return e1, e2, e12


def _ecf_combination(x0, xn, z1, z2):
    e1, e2, e12 = _ecf_terms(x0, xn, z1, z2)
    phis = np.array([e1.mean(), e2.mean(), e12.mean()])
    if np.min(np.abs(phis)) < 1e-3:
        raise EstimationError(
            "empirical CF modulus below 1e-3: argument too large for sample size")
    return complex(np.log(phis[0]) + np.log(phis[1]) - np.log(phis[2]))


def _delta_method_err(x0, xn, z1, z2):
    e1, e2, e12 = _ecf_terms(x0, xn, z1, z2)
    R = x0.size
    X = np.stack([e1.real, e1.imag, e2.real, e2.imag, e12.real, e12.imag])
    C = np.cov(X) / R
    phis = [e1.mean(), e2.mean(), e12.mean()]
    signs = [1.0, 1.0, -1.0]
    g = np.concatenate([[s / p] for s, p in zip(signs, phis)])
    # d(value) = sum_k g_k (dRe_k + i dIm_k)
    grad_re = np.empty(6)
    grad_im = np.empty(6)
    grad_re[0::2], grad_re[1::2] = np.real(g), -np.imag(g)
    grad_im[0::2], grad_im[1::2] = np.imag(g), np.real(g)
    var = grad_re @ C @ grad_re + grad_im @ C @ grad_im
    return math.sqrt(max(var, 0.0))
