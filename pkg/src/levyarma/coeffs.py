"""Causal MA(infinity) coefficients of ARMA and FARIMA filters.

An ARMA(p,q) model Phi_p(B) X = Theta_q(B) eps with

    Phi_p(z)   = 1 - phi_1 z - ... - phi_p z^p
    Theta_q(z) = 1 + theta_1 z + ... + theta_q z^q

has the causal representation X_n = sum_{j>=0} c_j eps_{n-j} where the c_j
are the power-series coefficients of Theta_q(z)/Phi_p(z).  The FARIMA(p,d,q)
filter multiplies in (1-z)^{-d}, whose coefficients are the binomial weights
b_j = Gamma(j+d) / (Gamma(d) Gamma(j+1)).

Besides computing the streams, this module extracts the dominant-root
descriptor (lambda_1, rho_1, l_1, h) that drives every asymptotic statement
downstream: writing the AR roots as exp(lambda_k +- i rho_k) with
multiplicities l_k and lambda_1 minimal,

    c_j * j^{-(l_1-1)} * exp(lambda_1 j)  ->  h        (rho_1 = 0)

with h = e_{1 l_1} exp(-lambda_1 l_1) / (l_1 - 1)! read off the partial
fraction expansion of B(z)/Phi_p(z), and for FARIMA

    c_j / j^{d-1}  ->  Theta_q(1) / (Phi_p(1) Gamma(d))   (rate O(1/j)).
"""

from __future__ import annotations

import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import signal
from scipy.special import gamma as _gamma

from .errors import ModelValidationError

__all__ = [
    "ModelSpec",
    "CoeffStream",
    "AsymDescriptor",
    "validate_model",
    "arma_coeffs",
    "binomial_weights",
    "farima_coeffs",
    "coefficients",
    "asym_descriptor",
]

# Numerical tolerances for the root-based validation (the causality
# assumptions are stated exactly; floating point needs margins).
ROOT_BOUNDARY_TOL = 1e-9      # |z| <= 1 + tol fails validation
ROOT_CLUSTER_RTOL = 1e-6      # roots closer than this merge into one cluster
COMMON_ZERO_TOL = 1e-8        # AR root this close to an MA root fails
_REAL_ARG_TOL = 1e-8          # |arg z| below this counts as a real root


@dataclass(frozen=True)
class ModelSpec:
    """AR/MA polynomial coefficients plus the fractional order d.

    ``phi`` are phi_1..phi_p, ``theta`` are theta_1..theta_q (the leading
    1's are implicit).  ``d`` = 0 selects a pure ARMA filter.
    """

    phi: tuple = ()
    theta: tuple = ()
    d: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))
        object.__setattr__(self, "d", float(self.d))

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.theta)

    @property
    def is_farima(self) -> bool:
        return self.d != 0.0

    def ar_poly(self) -> np.ndarray:
        """Ascending coefficients of Phi_p: [1, -phi_1, ..., -phi_p]."""
        return np.concatenate(([1.0], -np.asarray(self.phi, dtype=float)))

    def ma_poly(self) -> np.ndarray:
        """Ascending coefficients of Theta_q: [1, theta_1, ..., theta_q]."""
        return np.concatenate(([1.0], np.asarray(self.theta, dtype=float)))

    def to_dict(self) -> dict:
        return {"phi": list(self.phi), "theta": list(self.theta), "d": self.d}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelSpec":
        return cls(
            phi=tuple(obj.get("phi", ())),
            theta=tuple(obj.get("theta", ())),
            d=float(obj.get("d", 0.0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))


def _format_root(z: complex) -> str:
    if abs(z.imag) < 1e-12:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _ar_roots(spec: ModelSpec) -> np.ndarray:
    """Roots of Phi_p via the companion-matrix eigenvalue method."""
    phi = np.asarray(spec.phi, dtype=float)
    # drop trailing zero AR coefficients so np.roots sees the true degree
    nz = np.nonzero(phi)[0]
    if nz.size == 0:
        return np.array([], dtype=complex)
    phi = phi[: nz[-1] + 1]
    desc = np.concatenate((-phi[::-1], [1.0]))
    return np.roots(desc)


def _ma_roots(spec: ModelSpec) -> np.ndarray:
    th = np.asarray(spec.theta, dtype=float)
    nz = np.nonzero(th)[0]
    if nz.size == 0:
        return np.array([], dtype=complex)
    th = th[: nz[-1] + 1]
    desc = np.concatenate((th[::-1], [1.0]))
    return np.roots(desc)


def validate_model(spec: ModelSpec) -> list:
    """Check the causality assumptions; return a list of diagnostics.

    An empty list means the model passes.  Diagnostics name the violated
    assumption and the offending root(s).  Non-finite coefficients are a
    hard rejection (``ModelValidationError``) since no root computation is
    meaningful for them.
    """
    coeffs = list(spec.phi) + list(spec.theta) + [spec.d]
    if not all(math.isfinite(v) for v in coeffs):
        raise ModelValidationError("non-finite coefficient in model spec")

    diags = []
    ar = _ar_roots(spec)
    for z in ar:
        m = abs(z)
        if m <= 1.0 + ROOT_BOUNDARY_TOL:
            if abs(m - 1.0) <= ROOT_BOUNDARY_TOL:
                diags.append(f"borderline AR root on unit circle at z≈{_format_root(z)}")
            else:
                diags.append(f"AR root inside unit disk at z≈{_format_root(z)}")
    ma = _ma_roots(spec)
    for za in ar:
        for zm in ma:
            if abs(za - zm) <= COMMON_ZERO_TOL:
                diags.append(f"common zero at z≈{_format_root(za)}")
    if spec.d >= 1.0:
        diags.append(f"fractional order d={spec.d:g} >= 1 lies outside the causal regime")
    return diags


def _require_valid(spec: ModelSpec) -> None:
    diags = validate_model(spec)
    if diags:
        raise ModelValidationError(diags)


# ---------------------------------------------------------------------------
# Coefficient streams

@dataclass(frozen=True)
class CoeffStream:
    """Computed c_j, j = 0..N, with tail-envelope metadata.

    ``tail_bound`` bounds sum_{j>N} |c_j| (the eta = 1 case); use
    :meth:`tail_power_bound` for the sum of |c_j|^eta that the dependence
    computations need.  The envelope is fitted, not proved: causality
    guarantees summability but comes with no constructive constant.
    """

    values: np.ndarray
    N: int
    tail_bound: float
    _envelope: tuple = field(repr=False, default=("zero",))

    def tail_power_bound(self, eta: float) -> float:
        """Bound on sum_{j>N} |c_j|^eta from the fitted envelope."""
        kind = self._envelope[0]
        if kind == "zero":
            return 0.0
        if kind == "geometric":
            _, M, rho, l1 = self._envelope
            if M == 0.0:
                return 0.0
            j0 = self.N + 1
            term = (M * j0 ** (l1 - 1) * rho ** j0) ** eta
            ratio = rho ** eta * (1.0 + 1.0 / j0) ** (eta * (l1 - 1))
            if ratio >= 1.0:
                return math.inf
            return term / (1.0 - ratio)
        if kind == "polynomial":
            _, M, d = self._envelope
            expo = eta * (d - 1.0)
            if expo >= -1.0:
                return math.inf
            # integral comparison: sum_{j>N} j^expo <= N^(expo+1)/(-expo-1)
            return (M ** eta) * self.N ** (expo + 1.0) / (-expo - 1.0)
        raise ValueError(f"unknown envelope kind {kind!r}")

    def to_csv(self, path_or_buf=None):
        """Export as CSV with header ``j,c_j`` (17 significant digits)."""
        buf = io.StringIO()
        buf.write("j,c_j\n")
        for j, c in enumerate(self.values):
            buf.write(f"{j},{c:.17g}\n")
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)
        return None


def arma_coeffs(spec: ModelSpec, N: int) -> CoeffStream:
    """c_j for the pure ARMA filter via the linear recurrence
    c_j = theta_j + sum_{k=1..min(j,p)} phi_k c_{j-k}  (theta_0 = 1)."""
    if spec.d != 0.0:
        raise ValueError("arma_coeffs requires d = 0; use farima_coeffs")
    _require_valid(spec)
    if N < 0:
        raise ValueError("N must be >= 0")
    impulse = np.zeros(N + 1)
    impulse[0] = 1.0
    values = signal.lfilter(spec.ma_poly(), spec.ar_poly(), impulse)
    return _finish_arma_stream(spec, values, N)


def _finish_arma_stream(spec: ModelSpec, values: np.ndarray, N: int) -> CoeffStream:
    if spec.p == 0:
        # MA-only: c_j = 0 beyond q, tail exactly zero once N >= q
        tail = 0.0 if N >= spec.q else math.inf
        return CoeffStream(values=values, N=N, tail_bound=tail, _envelope=("zero",))
    desc = asym_descriptor(spec if spec.d == 0.0 else ModelSpec(spec.phi, spec.theta, 0.0),
                           _fit_tail=False)
    rho = math.exp(-desc.lambda1)
    M = _fit_envelope_constant(values, rho, desc.l1)
    env = ("geometric", M, rho, desc.l1)
    stream = CoeffStream(values=values, N=N, tail_bound=0.0, _envelope=env)
    object.__setattr__(stream, "tail_bound", stream.tail_power_bound(1.0))
    return stream


def _fit_envelope_constant(values: np.ndarray, rho: float, l1: int) -> float:
    """M such that |c_j| <= M j^(l1-1) rho^j over the last computed terms."""
    n = len(values)
    lo = max(1, n - 50)
    j = np.arange(lo, n, dtype=float)
    v = np.abs(values[lo:])
    keep = v > 0.0
    if not np.any(keep):
        return 0.0
    # fit in log space to avoid under/overflow of rho**j; clamp so machine
    # underflow of deep-tail values cannot blow the constant up
    logenv = (l1 - 1) * np.log(j[keep]) + np.log(rho) * j[keep]
    return float(np.exp(min(np.max(np.log(v[keep]) - logenv), 700.0)))


def binomial_weights(d: float, N: int) -> np.ndarray:
    """Binomial expansion coefficients of (1-z)^{-d}.

    b_0 = 1 and b_j = b_{j-1} (j-1+d)/j, the exact ratio recurrence of
    Gamma(j+d)/(Gamma(d) Gamma(j+1)); direct Gamma evaluation would
    overflow beyond j ~ 1e5.
    """
    if d >= 1.0:
        raise ModelValidationError(f"d={d:g} >= 1 is outside the causal regime")
    if N < 0:
        raise ValueError("N must be >= 0")
    b = np.empty(N + 1)
    b[0] = 1.0
    if N:
        j = np.arange(1.0, N + 1.0)
        b[1:] = np.cumprod((j - 1.0 + d) / j)
    return b


def farima_coeffs(spec: ModelSpec, N: int) -> CoeffStream:
    """c_j of the FARIMA filter: ARMA stream convolved with binomial weights."""
    if spec.d == 0.0:
        raise ValueError("farima_coeffs requires d != 0; use arma_coeffs")
    _require_valid(spec)
    if N < 0:
        raise ValueError("N must be >= 0")
    arma = arma_coeffs(ModelSpec(spec.phi, spec.theta, 0.0), N)
    av = arma.values
    # the ARMA part decays geometrically; drop the underflowed tail so the
    # convolution is O(N * L) instead of O(N^2)
    nz = np.nonzero(np.abs(av) > 1e-320)[0]
    av = av[: nz[-1] + 1] if nz.size else av[:1]
    b = binomial_weights(spec.d, N)
    values = np.convolve(b, av)[: N + 1]

    A = farima_constant(spec)
    j = np.arange(max(1, N - 50), N + 1, dtype=float)
    Mf = abs(A)
    if j.size and N >= 8:
        ratio = np.abs(values[int(j[0]):]) / j ** (spec.d - 1.0)
        Mf = float(max(Mf, ratio.max()))
    stream = CoeffStream(values=values, N=N, tail_bound=0.0,
                         _envelope=("polynomial", Mf * 1.05, spec.d))
    object.__setattr__(stream, "tail_bound", stream.tail_power_bound(1.0))
    return stream


def coefficients(spec: ModelSpec, N: int) -> CoeffStream:
    """Dispatch to :func:`arma_coeffs` or :func:`farima_coeffs` on d."""
    if spec.is_farima:
        return farima_coeffs(spec, N)
    return arma_coeffs(spec, N)


def farima_constant(spec: ModelSpec) -> float:
    """Theta_q(1) / (Phi_p(1) Gamma(d)), the FARIMA tail constant."""
    th1 = float(np.polyval(spec.ma_poly()[::-1], 1.0))
    ph1 = float(np.polyval(spec.ar_poly()[::-1], 1.0))
    return th1 / (ph1 * _gamma(spec.d))


# ---------------------------------------------------------------------------
# Dominant-root descriptor

@dataclass(frozen=True)
class AsymDescriptor:
    """Dominant AR root data (lambda_1, rho_1, l_1) and the limit constant h.

    ``h`` is the partial-fraction value; for complex dominant pairs
    (rho_1 != 0) only |h| is meaningful and the stored value is that
    magnitude.  ``h_fit`` is the empirical tail fit of
    c_j j^{-(l_1-1)} exp(lambda_1 j) (NaN when the tail oscillates).
    ``farima_const`` is Theta(1)/(Phi(1) Gamma(d)), present when d != 0.
    """

    lambda1: float
    rho1: float
    l1: int
    h: float
    h_fit: float = math.nan
    farima_const: float | None = None


def _cluster_roots(roots: np.ndarray) -> list:
    """Group near-identical roots; returns [(center, multiplicity), ...]."""
    clusters: list[list[complex]] = []
    for z in sorted(roots, key=lambda v: (abs(v), v.real, v.imag)):
        for cl in clusters:
            c = np.mean(cl)
            if abs(z - c) <= ROOT_CLUSTER_RTOL * max(1.0, abs(c)):
                cl.append(z)
                break
        else:
            clusters.append([z])
    return [(complex(np.mean(cl)), len(cl)) for cl in clusters]


def asym_descriptor(spec: ModelSpec, _fit_tail: bool = True) -> AsymDescriptor:
    """Extract (lambda_1, rho_1, l_1, h) from the AR polynomial.

    h is computed from the partial-fraction decomposition
    Theta/Phi = A(z) + B(z)/Phi(z): the top coefficient at the dominant
    root zeta_1 of multiplicity l_1 is

        e_{1 l_1} = (-1)^{l_1} B(zeta_1) l_1! / Phi^{(l_1)}(zeta_1),

    and h = e_{1 l_1} exp(-lambda_1 l_1)/(l_1-1)!.  A second, empirical
    estimate ``h_fit`` comes from the tail of the actual coefficient stream;
    the two agree for real dominant roots and cross-check each other.
    """
    _require_valid(spec)
    farima_const = farima_constant(spec) if spec.d != 0.0 else None
    if spec.p == 0 or np.count_nonzero(spec.phi) == 0:
        # MA-only: coefficients vanish beyond q ("super-exponential")
        return AsymDescriptor(lambda1=math.inf, rho1=0.0, l1=1, h=0.0,
                              h_fit=0.0, farima_const=farima_const)

    roots = _ar_roots(spec)
    clusters = _cluster_roots(roots)
    lam = np.array([math.log(abs(c)) for c, _ in clusters])
    lam1 = float(lam.min())
    dominant = [(c, m) for (c, m), lv in zip(clusters, lam) if lv <= lam1 + 1e-9]
    real_dom = [(c, m) for c, m in dominant if abs(np.angle(c)) < _REAL_ARG_TOL]
    if len(real_dom) == 1 and len(dominant) == 1:
        zeta1, l1 = real_dom[0]
        zeta1 = complex(zeta1.real, 0.0)
        rho1 = 0.0
    else:
        zeta1, l1 = max(dominant, key=lambda cm: abs(np.angle(cm[0])))
        rho1 = abs(float(np.angle(zeta1)))

    # Theta = A * Phi + B with deg B < p  (A = 0 when q < p)
    phi_desc = spec.ar_poly()[::-1]
    theta_desc = spec.ma_poly()[::-1]
    if spec.q >= spec.p:
        _, b_desc = np.polydiv(theta_desc, phi_desc)
    else:
        b_desc = theta_desc
    bz = complex(np.polyval(b_desc, zeta1))
    dphi = phi_desc
    for _ in range(l1):
        dphi = np.polyder(dphi)
    phider = complex(np.polyval(dphi, zeta1))
    e_top = (-1.0) ** l1 * bz * math.factorial(l1) / phider
    h_cplx = e_top * np.exp(-lam1 * l1) / math.factorial(l1 - 1)
    h = float(h_cplx.real) if rho1 == 0.0 else abs(h_cplx)

    h_fit = math.nan
    if _fit_tail and rho1 == 0.0 and spec.d == 0.0:
        h_fit = _fit_h_tail(spec, lam1, l1)
        if h != 0.0 and abs(h_fit - h) > 1e-2 * max(1.0, abs(h)):
            warnings.warn(
                f"partial-fraction h={h:.6g} and tail fit h_fit={h_fit:.6g} disagree; "
                "the coefficient tail may not have converged",
                stacklevel=2,
            )
    return AsymDescriptor(lambda1=lam1, rho1=rho1, l1=l1, h=h,
                          h_fit=h_fit, farima_const=farima_const)


def _fit_h_tail(spec: ModelSpec, lam1: float, l1: int) -> float:
    J = int(min(400, max(60, 650.0 / lam1)))
    J = max(J, spec.p + spec.q + 60)
    values = arma_coeffs(ModelSpec(spec.phi, spec.theta, 0.0), J).values
    lo = max(spec.p + spec.q + 10, J - 40)
    j = np.arange(lo, J + 1, dtype=float)
    v = values[lo:]
    keep = v != 0.0
    if not np.any(keep):
        return 0.0
    mag = np.exp(np.log(np.abs(v[keep])) + lam1 * j[keep] - (l1 - 1) * np.log(j[keep]))
    sign = np.sign(v[keep])
    if not np.all(sign == sign[0]):
        return math.nan
    return float(sign[0] * np.median(mag))
