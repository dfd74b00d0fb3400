"""Cancellation-free kernels for stable characteristic-exponent differences.

Every exact stable computation in the package reduces to sums of the four
two-point differences below, evaluated at r = z1*c_j, s = z2*c_{j+n}:

    abs_pow_diff    |r+s|^a - |r|^a - |s|^a
    signed_pow_diff |r+s|^<a> - |r|^<a> - |s|^<a>,  |x|^<a> = |x|^a sgn(x)
    abs_diff        |r+s| - |r| - |s|
    xlogx_diff      (r+s) log|r+s| - r log|r| - s log|s|,  0 log 0 := 0

At large lags one argument is exponentially smaller than the other and the
naive expressions lose all significant digits to cancellation.  Each kernel
therefore switches to an expm1/log1p form once |small| <= |big|/2, which keeps
the relative error of every term at a few ulp regardless of the ratio.

All kernels are symmetric in (r, s), vectorized over numpy arrays, and return
exact zeros when either argument is zero.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "signed_pow",
    "abs_pow_diff",
    "signed_pow_diff",
    "abs_diff",
    "xlogx_diff",
]


def signed_pow(x, a):
    """|x|^a * sgn(x), with 0 mapped to 0 for every a > 0."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** a


def _split(r, s):
    """Order the pair so |big| >= |small|; both kernels are symmetric."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    r, s = np.broadcast_arrays(r, s)
    swap = np.abs(s) > np.abs(r)
    big = np.where(swap, s, r)
    small = np.where(swap, r, s)
    return big, small


def abs_pow_diff(r, s, alpha):
    big, small = _split(r, s)
    out = np.zeros_like(big)
    nz = (big != 0.0) & (small != 0.0)
    if not np.any(nz):
        return out if out.ndim else float(out)

    b, t = big[nz], small[nz]
    w = t / b
    near = np.abs(w) <= 0.5
    res = np.empty_like(b)
    # |b|^a * ((1+w)^a - 1) - |t|^a, exact to ~ulp of the small result
    bw, ww, tw = b[near], w[near], t[near]
    res[near] = np.abs(bw) ** alpha * np.expm1(alpha * np.log1p(ww)) - np.abs(tw) ** alpha
    bf, tf = b[~near], t[~near]
    res[~near] = np.abs(bf + tf) ** alpha - np.abs(bf) ** alpha - np.abs(tf) ** alpha
    out[nz] = res
    return out if out.ndim else float(out)


def signed_pow_diff(r, s, alpha):
    big, small = _split(r, s)
    out = np.zeros_like(big)
    nz = (big != 0.0) & (small != 0.0)
    if not np.any(nz):
        return out if out.ndim else float(out)

    b, t = big[nz], small[nz]
    w = t / b
    near = np.abs(w) <= 0.5
    res = np.empty_like(b)
    bw, ww, tw = b[near], w[near], t[near]
    # sgn(b+t) = sgn(b) when |t| <= |b|/2
    res[near] = np.sign(bw) * np.abs(bw) ** alpha * np.expm1(alpha * np.log1p(ww)) - signed_pow(tw, alpha)
    bf, tf = b[~near], t[~near]
    res[~near] = signed_pow(bf + tf, alpha) - signed_pow(bf, alpha) - signed_pow(tf, alpha)
    out[nz] = res
    return out if out.ndim else float(out)


def abs_diff(r, s):
    big, small = _split(r, s)
    out = np.zeros_like(big)
    nz = (big != 0.0) & (small != 0.0)
    if not np.any(nz):
        return out if out.ndim else float(out)

    b, t = big[nz], small[nz]
    # |t| <= |b| means sgn(b+t) is sgn(b) unless b+t == 0 exactly, so
    # |b+t| - |b| = sgn(b)*t without any rounding.
    res = np.where(b + t == 0.0, -2.0 * np.abs(b), np.sign(b) * t - np.abs(t))
    out[nz] = res
    return out if out.ndim else float(out)


def _xlogabs(v):
    """v * log|v| with the 0 log 0 = 0 convention."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    nz = v != 0.0
    out[nz] = v[nz] * np.log(np.abs(v[nz]))
    return out


def xlogx_diff(r, s):
    big, small = _split(r, s)
    out = np.zeros_like(big)
    nz = (big != 0.0) & (small != 0.0)
    if not np.any(nz):
        return out if out.ndim else float(out)

    b, t = big[nz], small[nz]
    w = t / b
    near = np.abs(w) <= 0.5
    res = np.empty_like(b)
    bw, ww, tw = b[near], w[near], t[near]
    # t log|b/t| + (b+t) log1p(w); both pieces stay O(t)
    res[near] = tw * np.log(np.abs(bw / tw)) + (bw + tw) * np.log1p(ww)
    bf, tf = b[~near], t[~near]
    res[~near] = _xlogabs(bf + tf) - _xlogabs(bf) - _xlogabs(tf)
    out[nz] = res
    return out if out.ndim else float(out)
