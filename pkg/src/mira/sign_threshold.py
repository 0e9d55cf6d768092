"""Threshold-sharing signature over (l+1, N) Shamir shares.

Per round the signer Shamir-shares (x, beta, a, c) coordinatewise, commits
every party state under a Merkle root, and runs the rank check on the
public set S of the first l+1 parties only.  The second challenge picks an
l-subset I of all parties; the response opens those states with their
Merkle authentication paths and adds the alpha share of one deterministic
extra party i* = min(S \\ I), enough for the verifier to reconstruct the
degree-l broadcast sharings (using v(0) = 0 for the response values).

Shares of a low-threshold sharing are correlated, so no seed tree is used
and signature length varies with the authentication paths; every per-round
block starts with a 2-byte node count.
"""

from dataclasses import dataclass

import numpy as np

from .hashing import (H1, H2, X_SIGN, FieldSampler, commit,
                      derive_challenge1, derive_challenge2_threshold)
from .mpc import ChallengeBatch, PkOperand
from .sharing import ShareDims, shamir_expand, shamir_share
from .trees import H_MERKLE, merkle_auth, merkle_root, merkle_root_from_auth


class SignatureFormatError(ValueError):
    pass


@dataclass
class RoundResponse:
    auth: list                 # Merkle digests, bottom-up left-right
    opened: np.ndarray         # (ell, T) state rows, ascending party index
    alpha_star: np.ndarray     # (r, me)


@dataclass
class ThresholdSignature:
    salt: bytes
    h1: bytes
    h2: bytes
    rounds: list


def share_dims(tp):
    k, r, m, me = tp.share_dims
    return ShareDims(k=k, r=r, m=m, me=me)


def signature_size_bound_bits(tp, n_formula=None):
    """Upper bound: per-round field payload at log2(q) plus the auth bound."""
    import math
    k, r, m, me = tp.share_dims
    lam = tp.mr.lam
    n = n_formula or tp.n_parties
    elems = tp.ell * (k + r * m + (r + 1) * me) + r * me
    per_round = (elems * math.log2(tp.mr.q)
                 + 2 * lam * tp.ell * math.log2(n / tp.ell))
    return 6 * lam + tp.tau * per_round


def encode(tp, sig):
    base = tp.mr.base
    out = bytearray(sig.salt + sig.h1 + sig.h2)
    for rr in sig.rounds:
        out += len(rr.auth).to_bytes(2, "little")
        out += b"".join(rr.auth)
        out += base.pack(rr.opened)
        out += base.pack(rr.alpha_star)
    return bytes(out)


def _max_auth_nodes(tp):
    pad_depth = max(1, (tp.n_parties - 1).bit_length())
    return tp.ell * (pad_depth + 1)


def decode(tp, data):
    suite = tp.suite
    base = tp.mr.base
    dims = share_dims(tp)
    k, r, m, me = tp.share_dims
    db = suite.digest_bytes
    state_bytes = base.packed_size(dims.total)
    alpha_bytes = base.packed_size(r * me)
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(data):
            raise SignatureFormatError("truncated signature")
        out = data[pos:pos + n]
        pos += n
        return out

    try:
        salt = take(suite.salt_bytes)
        h1 = take(db)
        h2 = take(db)
        rounds = []
        for _ in range(tp.tau):
            count = int.from_bytes(take(2), "little")
            if count > _max_auth_nodes(tp):
                raise SignatureFormatError("authentication path too long")
            auth = [take(db) for _ in range(count)]
            opened = base.unpack(take(tp.ell * state_bytes), tp.ell * dims.total)
            alpha_star = base.unpack(take(alpha_bytes), r * me).reshape(r, me)
            rounds.append(RoundResponse(auth=auth,
                                        opened=opened.reshape(tp.ell, dims.total),
                                        alpha_star=alpha_star))
    except ValueError as exc:
        raise SignatureFormatError(str(exc)) from None
    if pos != len(data):
        raise SignatureFormatError("trailing data")
    return ThresholdSignature(salt=salt, h1=h1, h2=h2, rounds=rounds)


def sign(tp, pk, sk, message, entropy):
    """Serialized signature of ``message``; deterministic in all inputs."""
    from .matrices import columns_to_ext
    from .qpoly import annihilator

    x, e_mat = sk.witness()
    beta = annihilator(tp.mr.ext, columns_to_ext(e_mat), tp.mr.r).beta
    sig = _sign_core(tp, pk, x, beta, message, entropy)
    return encode(tp, sig)


def _sign_core(tp, pk, x, beta, message, entropy,
               ch1_override=None, ch2_override=None):
    mr = tp.mr
    base, ext = mr.base, tp.ext_big
    suite = tp.suite
    n_parties, ell, tau = tp.n_parties, tp.ell, tp.tau
    s_set = tp.opened_set
    dims = share_dims(tp)
    k, r, m, me = tp.share_dims
    pk_op = PkOperand.of(pk)
    pk_bytes = pk.body_bytes()
    x = np.asarray(x, np.uint8)
    beta = np.asarray(beta, np.uint8)

    rng = suite.xof(X_SIGN, entropy)
    salt = rng.read(suite.salt_bytes)
    sampler = FieldSampler(base, rng)

    shares_all = np.empty((tau, n_parties, dims.total), np.uint8)
    a_plains = np.empty((tau, r, me), np.uint8)
    c_plains = np.empty((tau, me), np.uint8)
    cmts_all, roots = [], []
    for e in range(1, tau + 1):
        a_e = sampler.take(r * me).reshape(r, me)
        c_e = ext.neg(ext.dot(beta, a_e, axis=0))
        rand = sampler.take(ell * dims.total).reshape(ell, dims.total)
        secrets = np.concatenate([x, beta.ravel(), a_e.ravel(), c_e])
        shares = shamir_share(base, secrets, ell, n_parties, rand)
        shares_all[e - 1] = shares
        a_plains[e - 1] = a_e
        c_plains[e - 1] = c_e
        cmts = [commit(suite, salt, e, i, base.pack(shares[i - 1]))
                for i in range(1, n_parties + 1)]
        cmts_all.append(cmts)
        roots.append(merkle_root(suite, cmts))

    h1 = suite.hash(H1, message, pk_bytes, salt, *roots)
    ch1 = ch1_override or derive_challenge1(suite, h1, ext, mr.n, tau)
    batch = ChallengeBatch(ext, r, ch1)

    # batch: row 0 = plaintext, rows 1..l+1 = the public parties of S
    s_idx = np.asarray(s_set) - 1
    plain_row = np.empty((tau, 1, dims.total), np.uint8)
    plain_row[:, 0, :k] = x
    plain_row[:, 0, k:k + r * m] = beta.ravel()
    plain_row[:, 0, k + r * m:k + r * m + r * me] = a_plains.reshape(tau, r * me)
    plain_row[:, 0, k + r * m + r * me:] = c_plains
    rows = np.concatenate([plain_row, shares_all[:, s_idx]], axis=1)
    rows_x, rows_beta, rows_a, rows_c = dims.split(rows)
    alphas, zs = batch.broadcast_alpha(pk_op, rows_x, rows_a,
                                       np.ones(ell + 2, bool))
    alpha_plain = alphas[:, 0]
    vs = batch.broadcast_v(zs, rows_beta, rows_c, alpha_plain[:, None])
    assert not vs[:, 0].any(), "witness does not satisfy the rank bound"
    alpha_s = alphas[:, 1:]
    v_s = vs[:, 1:]

    share_blobs = []
    for e in range(tau):
        for j in range(ell + 1):
            share_blobs.append(base.pack(alpha_s[e, j]))
            share_blobs.append(base.pack(v_s[e, j]))
    h2 = suite.hash(H2, message, pk_bytes, salt, h1, *share_blobs)
    ch2 = ch2_override or derive_challenge2_threshold(suite, h2, n_parties, ell, tau)

    rounds = []
    for e in range(1, tau + 1):
        subset = ch2[e - 1]
        istar = min(i for i in s_set if i not in subset)
        rounds.append(RoundResponse(
            auth=merkle_auth(suite, cmts_all[e - 1], subset),
            opened=shares_all[e - 1, np.asarray(subset) - 1],
            alpha_star=alpha_s[e - 1, s_set.index(istar)]))
    return ThresholdSignature(salt=salt, h1=h1, h2=h2, rounds=rounds)


def verify(tp, pk, message, data):
    """Accept/reject; malformed input rejects (CLI separates that case)."""
    try:
        sig = decode(tp, data)
    except SignatureFormatError:
        return False
    ok, _ = verify_decoded(tp, pk, message, sig)
    return ok


def verify_decoded(tp, pk, message, sig):
    mr = tp.mr
    base, ext = mr.base, tp.ext_big
    suite = tp.suite
    n_parties, ell, tau = tp.n_parties, tp.ell, tp.tau
    s_set = tp.opened_set
    s_pts = np.asarray(s_set, np.uint8)
    dims = share_dims(tp)
    k, r, m, me = tp.share_dims
    pk_op = PkOperand.of(pk)

    ch1 = derive_challenge1(suite, sig.h1, ext, mr.n, tau)
    ch2 = derive_challenge2_threshold(suite, sig.h2, n_parties, ell, tau)

    roots = []
    for e in range(1, tau + 1):
        rr = sig.rounds[e - 1]
        subset = ch2[e - 1]
        cmt_hashes = [suite.hash(H_MERKLE,
                                 commit(suite, sig.salt, e, i, base.pack(rr.opened[j])))
                      for j, i in enumerate(subset)]
        root = merkle_root_from_auth(suite, cmt_hashes, list(subset), rr.auth,
                                     n_parties)
        if root is None:
            return False, None
        roots.append(root)
    h1bar = suite.hash(H1, message, pk.body_bytes(), sig.salt, *roots)

    batch = ChallengeBatch(ext, r, ch1)
    opened = np.stack([rr.opened for rr in sig.rounds])      # (tau, ell, T)
    rows_x, rows_beta, rows_a, rows_c = dims.split(opened)
    alpha_i, zs = batch.broadcast_alpha(pk_op, rows_x, rows_a,
                                        np.ones(ell, bool))

    alpha_sharings = np.empty((tau, ell + 1, r * me), np.uint8)
    alpha_opens = np.empty((tau, r, me), np.uint8)
    for e in range(tau):
        subset = ch2[e]
        istar = min(i for i in s_set if i not in subset)
        pts = np.asarray(list(subset) + [istar], np.uint8)
        vals = np.concatenate([alpha_i[e].reshape(ell, r * me),
                               sig.rounds[e].alpha_star.reshape(1, r * me)])
        alpha_sharings[e] = shamir_expand(base, vals, pts, s_pts)
        alpha_opens[e] = shamir_expand(
            base, vals, pts, np.zeros(1, np.uint8))[0].reshape(r, me)
    v_i_all = batch.broadcast_v(zs, rows_beta, rows_c, alpha_opens[:, None])

    share_blobs = []
    details = []
    for e in range(tau):
        subset = ch2[e]
        v_pts = np.asarray(list(subset) + [0], np.uint8)
        v_vals = np.concatenate([v_i_all[e], np.zeros((1, me), np.uint8)])
        v_sharing = shamir_expand(base, v_vals, v_pts, s_pts)
        for j in range(ell + 1):
            share_blobs.append(base.pack(alpha_sharings[e, j]))
            share_blobs.append(base.pack(v_sharing[j]))
        details.append({"alpha_open": alpha_opens[e],
                        "alpha_sharing": alpha_sharings[e], "v_sharing": v_sharing})

    h2bar = suite.hash(H2, message, pk.body_bytes(), sig.salt, h1bar, *share_blobs)
    return h1bar == sig.h1 and h2bar == sig.h2, details
