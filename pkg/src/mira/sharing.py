"""Additive sharing with hypercube aggregation, and Shamir sharing.

A party's share of the MPC input tuple (x, beta, a, c) is one flat
coordinate row of length T = k + r*m + r*me + me over GF(q), in that
component order; a sharing is the (N, T) stack of rows.  The same layout
is the serialized party state, so commitment payloads are just row slices.

Additive sharings derive leaves 1..N-1 from their tree seeds and leaf N
carries explicit corrections making every component column sum to its
secret.  The hypercube identifies leaf i with the base-2 coordinate vector
of i-1 (least significant bit = dimension 1, bit b = side b+1); the main
party (k, j) is the sum of the leaves on side j of dimension k.

Shamir sharing evaluates an independent random degree-l polynomial per
coordinate at the public points e_i = i, which caps N at q - 1.
"""

from dataclasses import dataclass

import numpy as np

from .hashing import X_LEAF, FieldSampler, encode_u16


@dataclass(frozen=True)
class ShareDims:
    k: int
    r: int
    m: int
    me: int

    @property
    def total(self):
        return self.k + self.r * self.m + self.r * self.me + self.me

    def split(self, flat):
        """Views of a (..., T) array as (x, beta, a, c) component blocks."""
        k, r, m, me = self.k, self.r, self.m, self.me
        lead = flat.shape[:-1]
        x = flat[..., :k]
        beta = flat[..., k:k + r * m].reshape(lead + (r, m))
        a = flat[..., k + r * m:k + r * m + r * me].reshape(lead + (r, me))
        c = flat[..., k + r * m + r * me:]
        return x, beta, a, c


class InputShares:
    """(N, T) stack of per-party coordinate rows."""

    def __init__(self, dims, flat):
        self.dims = dims
        self.flat = flat

    @property
    def x(self):
        return self.dims.split(self.flat)[0]

    @property
    def beta(self):
        return self.dims.split(self.flat)[1]

    @property
    def a(self):
        return self.dims.split(self.flat)[2]

    @property
    def c(self):
        return self.dims.split(self.flat)[3]

    def state_bytes(self, field, i):
        """Serialized share of party i (1-based): x || beta || a || c."""
        return field.pack(self.flat[i - 1])


def leaf_stream(suite, salt, e, i, seed):
    return suite.xof(X_LEAF, salt, encode_u16(e), encode_u16(i), seed)


def _leaf_payload(suite, salt, e, i, seed, nbytes):
    pay = salt + encode_u16(e) + encode_u16(i) + seed
    return suite.xof_digest(X_LEAF, pay, nbytes)


def expand_leaf_shares(suite, salt, e, seeds, dims, field):
    """Expand per-leaf pseudorandom rows; the last leaf samples only ``a``.

    ``seeds`` lists all N leaf seeds; a None entry (hidden leaf) leaves its
    row zero.  Components are drawn in flat row order from each leaf's
    stream; leaf N's stream starts directly at the ``a`` block.
    """
    n = len(seeds)
    t = dims.total
    a_lo = dims.k + dims.r * dims.m
    a_hi = a_lo + dims.r * dims.me
    flat = np.zeros((n, t), np.uint8)
    q = field.q
    if q & (q - 1) == 0:
        nib = q == 16
        nbytes = (t + 1) // 2 if nib else t
        blobs = bytearray()
        live = []
        for i, seed in enumerate(seeds[:-1], start=1):
            if seed is None:
                continue
            blobs += _leaf_payload(suite, salt, e, i, seed, nbytes)
            live.append(i - 1)
        if live:
            raw = np.frombuffer(bytes(blobs), np.uint8).reshape(len(live), nbytes)
            if nib:
                vals = np.empty((len(live), 2 * nbytes), np.uint8)
                vals[:, 0::2] = raw & 0x0F
                vals[:, 1::2] = raw >> 4
                flat[live] = vals[:, :t]
            else:
                flat[live] = raw & np.uint8(q - 1)
        if seeds[-1] is not None:
            cnt = a_hi - a_lo
            nb = (cnt + 1) // 2 if nib else cnt
            raw = np.frombuffer(_leaf_payload(suite, salt, e, n, seeds[-1], nb), np.uint8)
            if nib:
                vals = np.empty(2 * nb, np.uint8)
                vals[0::2] = raw & 0x0F
                vals[1::2] = raw >> 4
                flat[n - 1, a_lo:a_hi] = vals[:cnt]
            else:
                flat[n - 1, a_lo:a_hi] = raw & np.uint8(q - 1)
    else:
        for i, seed in enumerate(seeds, start=1):
            if seed is None:
                continue
            sampler = FieldSampler(field, leaf_stream(suite, salt, e, i, seed))
            if i < n:
                flat[i - 1] = sampler.take(t)
            else:
                flat[i - 1, a_lo:a_hi] = sampler.take(a_hi - a_lo)
    return InputShares(dims, flat)


def additive_share(suite, salt, e, seeds, dims, field, ext_big, x, beta):
    """Full additive sharing with the aux correction leaf.

    a is the sum of the per-leaf pseudorandom draws (all N of them) and
    c = -<a, beta> is computed against that reconstructed a.  Returns
    (shares, a_plain, c_plain).
    """
    shares = expand_leaf_shares(suite, salt, e, seeds, dims, field)
    n = len(seeds)
    flat = shares.flat
    k, rm = dims.k, dims.r * dims.m
    a_hi = k + rm + dims.r * dims.me
    a_plain = field.axis_sum(shares.a, axis=0)
    c_plain = ext_big.neg(ext_big.dot(a_plain, np.asarray(beta, np.uint8), axis=0))
    head = field.axis_sum(flat[:n - 1], axis=0)
    secret_row = np.concatenate([np.asarray(x, np.uint8),
                                 np.asarray(beta, np.uint8).ravel(),
                                 np.zeros(dims.r * dims.me, np.uint8), c_plain])
    corr = field.sub(secret_row, head)
    flat[n - 1, :k + rm] = corr[:k + rm]
    flat[n - 1, a_hi:] = corr[a_hi:]
    return shares, a_plain, c_plain


def leaf_side(leaf, dim):
    """Side (1 or 2) of 1-based ``leaf`` along 1-based ``dim``."""
    return ((leaf - 1) >> (dim - 1) & 1) + 1


def hypercube_aggregate(field, arr, n_leaves=None):
    """Main shares per (dimension, side): (D, 2, ...) from (N, ...).

    Side 2 is derived as total - side 1, so a zeroed (hidden) leaf row
    simply drops out of whichever side it belongs to.
    """
    arr = np.asarray(arr, np.uint8)
    n = n_leaves or arr.shape[0]
    if n & (n - 1) or n < 2:
        raise ValueError("hypercube needs a power-of-two party count")
    d = (n - 1).bit_length()
    total = field.axis_sum(arr, axis=0)
    idx = np.arange(n)
    out = np.empty((d, 2) + arr.shape[1:], np.uint8)
    for kdim in range(d):
        side1 = field.axis_sum(arr[(idx >> kdim) & 1 == 0], axis=0)
        out[kdim, 0] = side1
        out[kdim, 1] = field.sub(total, side1)
    return out


# ---------------------------------------------------------------------------
# Shamir sharing over the base field, componentwise

def shamir_points(field, n_parties):
    if n_parties > field.q - 1:
        raise ValueError("Shamir sharing needs N <= q - 1 distinct nonzero points")
    return np.arange(1, n_parties + 1, dtype=np.uint8)


def shamir_share(field, secrets, ell, n_parties, rand):
    """Share a coordinate vector; share i = P(i) with P(0) = secret.

    ``rand`` supplies the ell higher coefficients per coordinate, shape
    (ell, ncoords).  Returns (N, ncoords).
    """
    secrets = np.asarray(secrets, np.uint8).ravel()
    rand = np.asarray(rand, np.uint8).reshape(ell, secrets.size)
    pts = shamir_points(field, n_parties)
    vand = np.empty((n_parties, ell + 1), np.uint8)
    acc = np.ones(n_parties, np.uint8)
    for j in range(ell + 1):
        vand[:, j] = acc
        acc = field.mul(acc, pts)
    coeffs = np.concatenate([secrets[None, :], rand], axis=0)
    return field.matmul(vand, coeffs)


def _lagrange_weights(field, points, at):
    """Coefficients w_j with P(at) = sum w_j P(points_j), |points| = deg+1."""
    pts = np.asarray(points, np.uint8)
    if len(set(int(p) for p in pts)) != len(pts):
        raise ValueError("duplicate interpolation points")
    w = np.empty(len(pts), np.uint8)
    for j, pj in enumerate(pts):
        num = np.uint8(1)
        den = np.uint8(1)
        for t, pt in enumerate(pts):
            if t == j:
                continue
            num = field.mul(num, field.sub(np.uint8(at), pt))
            den = field.mul(den, field.sub(pj, pt))
        w[j] = field.mul(num, field.inv(den))
    return w


def shamir_reconstruct(field, shares, points):
    """Interpolate at zero: shares (t, ncoords), points (t,) -> (ncoords,)."""
    w = _lagrange_weights(field, points, 0)
    return field.matmul(w[None, :], np.asarray(shares, np.uint8))[0]


def shamir_expand(field, shares, points, all_points):
    """Evaluate the unique interpolating polynomial at every given point."""
    shares = np.asarray(shares, np.uint8)
    rows = [_lagrange_weights(field, points, int(p)) for p in np.asarray(all_points)]
    return field.matmul(np.stack(rows), shares)
