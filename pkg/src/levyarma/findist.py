"""Bivariate law of (X_0, X_n): spectral measure and Levy decomposition.

Shared innovations pair the coefficients (c_j, c_{j+n}); the first n
innovations of X_n are not shared and sit on the second axis.  For stable
innovations the joint law is bivariate stable with the discrete spectral
measure

    Gamma = sum_{j>=0} (1 +- beta)/2 (c_j^2 + c_{j+n}^2)^{alpha/2}
                delta( +-(c_j, c_{j+n}) / sqrt(c_j^2 + c_{j+n}^2) )
          + sum_{j<n}  (1 +- beta)/2 |c_j|^alpha delta( (0, +-sgn c_j) ),

zero location for alpha != 1 and log-weighted location sums for alpha = 1.
For radially absolutely continuous (RAC) innovations the joint Levy measure
keeps one directional atom per term with the innovation's radial density
rescaled to the term's Euclidean scale w = sqrt(c_j^2 + c_{j+n}^2):

    lambda-weight lambda(+-1) w^eta,   radial density g(+-1, r/w) / w^{eta+1}.

The radial exponent eta+1 (not eta) is what makes the product
lambda-weight x density the exact pushforward of the innovation measure --
it is forced by the marginalization identity, and for the stable radial
density c r^{-alpha-1} it reproduces the spectral weights above exactly.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .coeffs import ModelSpec, coefficients, validate_model
from .dependence import require_farima_moment_condition
from .errors import ModelValidationError
from .innovations import RACSpec, StableSpec

__all__ = [
    "SpectralAtoms",
    "RACJointMeasure",
    "stable_spectral",
    "joint_cf_from_spectral",
    "rac_joint",
    "merge_atoms",
]

MERGE_DECIMALS = 10  # directions identical to this many decimals merge
_TINY_R = 1e-100     # radial integrands vanish like r^2 near 0; cut before
                     # heavy densities overflow


@dataclass(frozen=True)
class SpectralAtoms:
    """Discrete spectral measure on the unit circle plus location vector."""

    directions: np.ndarray   # (k, 2), unit rows
    weights: np.ndarray      # (k,), strictly positive
    location: np.ndarray     # (2,)
    alpha: float

    def total_mass(self) -> float:
        return float(self.weights.sum())

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "location": [float(v) for v in self.location],
            "atoms": [
                {"sx": float(d[0]), "sy": float(d[1]), "weight": float(w)}
                for d, w in zip(self.directions, self.weights)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self, path_or_buf=None):
        buf = io.StringIO()
        buf.write("sx,sy,weight\n")
        for d, w in zip(self.directions, self.weights):
            buf.write(f"{d[0]:.17g},{d[1]:.17g},{w:.17g}\n")
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)
        return None


def merge_atoms(directions: np.ndarray, weights: np.ndarray):
    """Merge coincident directions (adding weights) and drop zero weights.

    Coincidence is decided by rounding to ``MERGE_DECIMALS`` decimals, which
    collapses the exact duplicates repeated coefficients create while being
    deterministic and idempotent.
    """
    acc: dict = {}
    order: list = []
    for d, w in zip(directions, weights):
        if w == 0.0:
            continue
        key = (round(float(d[0]), MERGE_DECIMALS), round(float(d[1]), MERGE_DECIMALS))
        if key in acc:
            acc[key][1] += w
        else:
            acc[key] = [np.asarray(d, dtype=float), float(w)]
            order.append(key)
    if not order:
        return np.zeros((0, 2)), np.zeros(0)
    dirs = np.array([acc[k][0] for k in order])
    ws = np.array([acc[k][1] for k in order])
    return dirs, ws


def _paired_coefficients(model: ModelSpec, n: int, N: int | None):
    diags = validate_model(model)
    if diags:
        raise ModelValidationError(diags)
    if n < 1:
        raise ValueError("lag n must be >= 1")
    if N is None:
        N = 4096 if model.is_farima else max(512, 16 * (model.p + model.q + n) + 64)
    stream = coefficients(model, N + n)
    return stream.values, N


def stable_spectral(model: ModelSpec, s: StableSpec, n: int,
                    N: int | None = None) -> SpectralAtoms:
    """Spectral measure and location of the bivariate stable law of (X_0, X_n)."""
    if model.is_farima:
        require_farima_moment_condition(model, s.alpha)
    c, N = _paired_coefficients(model, n, N)
    a, b = s.alpha, s.beta

    dirs, ws = [], []
    cj = c[: N + 1]
    cjn = c[n: N + n + 1]
    w2 = cj ** 2 + cjn ** 2
    for j in np.nonzero(w2 > 0.0)[0]:
        norm = math.sqrt(w2[j])
        d = np.array([cj[j] / norm, cjn[j] / norm])
        scale = norm ** a
        dirs.append(d)
        ws.append(0.5 * (1.0 + b) * scale)
        dirs.append(-d)
        ws.append(0.5 * (1.0 - b) * scale)
    for j in range(n):
        if c[j] == 0.0:
            continue
        sgn = math.copysign(1.0, c[j])
        scale = abs(c[j]) ** a
        dirs.append(np.array([0.0, sgn]))
        ws.append(0.5 * (1.0 + b) * scale)
        dirs.append(np.array([0.0, -sgn]))
        ws.append(0.5 * (1.0 - b) * scale)
    directions, weights = merge_atoms(np.array(dirs), np.array(ws))

    location = np.zeros(2)
    if a == 1.0 and b != 0.0:
        # pushforward of the alpha=1 location of each term: the axis block
        # contributes with log(c_j^2), i.e. twice log|c_j|
        ov = w2 > 0.0
        logs = np.zeros_like(w2)
        logs[ov] = np.log(w2[ov])
        mu1 = -(b / math.pi) * float(np.sum(cj * logs))
        mu2 = -(b / math.pi) * float(np.sum(cjn * logs))
        for j in range(n):
            if c[j] != 0.0:
                mu2 += -(b / math.pi) * c[j] * math.log(c[j] ** 2)
        location = np.array([mu1, mu2])
    if s.mu != 0.0:
        # per-innovation location shifts both marginals by mu * sum c_j
        tot = float(np.sum(c))
        location = location + s.mu * np.array([tot, tot])
    return SpectralAtoms(directions=directions, weights=weights,
                         location=location, alpha=a)


def joint_cf_from_spectral(atoms: SpectralAtoms, z) -> complex:
    """Log-characteristic function of the bivariate stable law at z = (z1, z2)."""
    z = np.asarray(z, dtype=float)
    u = atoms.directions @ z
    a = atoms.alpha
    w = atoms.weights
    nz = u != 0.0
    u, w = u[nz], w[nz]
    if a == 1.0:
        core = np.abs(u) * (1.0 + 1j * (2.0 / math.pi) * np.sign(u) * np.log(np.abs(u)))
    elif a == 2.0:
        core = u.astype(complex) ** 2
    else:
        core = np.abs(u) ** a * (1.0 - 1j * np.sign(u) * math.tan(math.pi * a / 2.0))
    return complex(-np.sum(core * w) + 1j * float(z @ atoms.location))


# ---------------------------------------------------------------------------
# RAC joint measure

@dataclass(frozen=True)
class RACAtom:
    direction: np.ndarray     # unit 2-vector
    lam_weight: float         # lambda({direction})
    radial_density: object    # callable r -> transformed density
    scale: float              # w_j, the compensator window radius
    side: int                 # which innovation half-line it came from


@dataclass(frozen=True)
class RACJointMeasure:
    """Direction/radial decomposition of the joint Levy measure of (X_0, X_n)."""

    atoms: tuple
    gamma2: np.ndarray
    eta: float

    def exponent(self, z, epsabs: float = 1e-10) -> complex:
        """Joint log-CF by integrating the stored atoms.

        eta >= 1 uses the fully compensated representation (gamma2 = 0 with
        centered innovations); eta < 1 compensates on the unit ball with the
        drift gamma2 absorbing the window mismatch.
        """
        z = np.asarray(z, dtype=float)
        total = 1j * float(z @ self.gamma2)
        full = self.eta >= 1.0
        for atom in self.atoms:
            u = float(z @ atom.direction)
            total += atom.lam_weight * _radial_integral(atom.radial_density, u,
                                                        full, epsabs)
        return complex(total)

    def levy_mass_check(self, epsabs: float = 1e-9) -> float:
        """sum of lambda-weights times int min(1, r^2) g~(r) dr (must be finite)."""
        total = 0.0
        for atom in self.atoms:
            g = atom.radial_density

            def small(u, g=g):
                r = math.exp(u)
                return g(r) * r ** 3 if r > _TINY_R else 0.0

            v1, _ = quad(small, -np.inf, 0.0, epsabs=epsabs, limit=300)
            v2, _ = quad(g, 1.0, np.inf, epsabs=epsabs, limit=300)
            total += atom.lam_weight * (v1 + v2)
        return total


def _radial_integral(g, u: float, full_compensation: bool, epsabs: float) -> complex:
    """int_0^inf (e^{iur} - 1 - iur * comp(r)) g(r) dr with comp = 1 (full)
    or 1_{r<=1} (unit-ball window)."""
    if u == 0.0:
        return 0.0 + 0.0j

    # (0, 1]: always compensated; integrate on a log scale
    def inner_re(t):
        r = math.exp(t)
        return (math.cos(u * r) - 1.0) * g(r) * r if r > _TINY_R else 0.0

    def inner_im(t):
        r = math.exp(t)
        return (math.sin(u * r) - u * r) * g(r) * r if r > _TINY_R else 0.0

    vr, _ = quad(inner_re, -np.inf, 0.0, epsabs=epsabs, limit=300)
    vi, _ = quad(inner_im, -np.inf, 0.0, epsabs=epsabs, limit=300)
    total = complex(vr, vi)
    # [1, inf): oscillatory core via QAWF; at tiny frequencies the integrand
    # stops oscillating over g's decay range and plain adaptive quadrature
    # is the robust choice for light and heavy radial tails alike
    w = abs(u)
    if w >= 1e-3:
        m, _ = quad(g, 1.0, np.inf, epsabs=epsabs, limit=300)
        vc, _ = quad(g, 1.0, np.inf, weight="cos", wvar=w, epsabs=epsabs)
        vs, _ = quad(g, 1.0, np.inf, weight="sin", wvar=w, epsabs=epsabs)
        far = complex(vc - m, math.copysign(1.0, u) * vs)
    else:
        fr, _ = quad(lambda r: (math.cos(w * r) - 1.0) * g(r), 1.0, np.inf,
                     epsabs=epsabs, limit=300)
        fi, _ = quad(lambda r: math.sin(w * r) * g(r), 1.0, np.inf,
                     epsabs=epsabs, limit=300)
        far = complex(fr, math.copysign(1.0, u) * fi)
    total += far
    if full_compensation:
        m1, _ = quad(lambda r: g(r) * r, 1.0, np.inf, epsabs=epsabs, limit=300)
        total += -1j * u * m1
    return total


def rac_joint(model: ModelSpec, spec: RACSpec, n: int,
              N: int | None = None) -> RACJointMeasure:
    """Joint Levy decomposition of (X_0, X_n) for RAC innovations."""
    require_farima_moment_condition(model, spec.eta)
    c, N = _paired_coefficients(model, n, N)
    eta = spec.eta
    lam = {+1: spec.lambda_plus, -1: spec.lambda_minus}

    atoms = []
    cj = c[: N + 1]
    cjn = c[n: N + n + 1]
    w2 = cj ** 2 + cjn ** 2
    for j in np.nonzero(w2 > 0.0)[0]:
        w = math.sqrt(w2[j])
        base = np.array([cj[j] / w, cjn[j] / w])
        for side, direction in ((+1, base), (-1, -base)):
            if lam[side] == 0.0:
                continue
            atoms.append(RACAtom(
                direction=direction,
                lam_weight=lam[side] * w ** eta,
                radial_density=_scaled_radial(spec.g, side, w, eta),
                scale=w,
                side=side,
            ))
    for j in range(n):
        if c[j] == 0.0:
            continue
        sgn = math.copysign(1.0, c[j])
        w = abs(c[j])
        for side in (+1, -1):
            if lam[side] == 0.0:
                continue
            atoms.append(RACAtom(
                direction=np.array([0.0, side * sgn]),
                lam_weight=lam[side] * w ** eta,
                radial_density=_scaled_radial(spec.g, side, w, eta),
                scale=w,
                side=side,
            ))

    gamma2 = np.zeros(2)
    if eta < 1.0:
        for atom in atoms:
            gamma2 += atom.lam_weight * atom.direction * _window_mismatch(
                atom.radial_density, atom.scale)
    if spec.gamma != 0.0:
        total = float(np.sum(c))
        gamma2 = gamma2 + spec.gamma * np.array([total, total])
    return RACJointMeasure(atoms=tuple(atoms), gamma2=gamma2, eta=eta)


def _scaled_radial(g, side: int, w: float, eta: float):
    def density(r):
        return g(side, r / w) / w ** (eta + 1.0)
    return density


def _window_mismatch(g, w: float, epsabs: float = 1e-10) -> float:
    """int_0^inf r (1_{r<=1} - 1_{r<=w}) g~(r) dr."""
    if w == 1.0:
        return 0.0
    lo, hi = (w, 1.0) if w < 1.0 else (1.0, w)
    val, _ = quad(lambda r: r * g(r), lo, hi, epsabs=epsabs, limit=300)
    return val if w < 1.0 else -val
