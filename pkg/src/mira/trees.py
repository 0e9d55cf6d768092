"""Seed trees with sibling-path reveal, and Merkle commitment trees.

Seed tree: a complete binary tree of lambda-bit seeds, heap-indexed from 1
(children of node i are 2i and 2i+1).  Every expansion binds (salt, round,
parent node index), so seeds are never reused across rounds or positions.
Revealing the sibling path of one leaf lets a verifier recompute every
other leaf while the hidden one stays unreachable.

Merkle tree: leaf values are hashed once, the hashed level is padded with
all-zero digests up to a power of two, and parents hash left || right.
The empty-tree and padding conventions are part of the wire format.
"""

import numpy as np

from .hashing import H_MERKLE, X_TREE, encode_u16, encode_u32


class SeedTree:
    def __init__(self, suite, salt, round_index, n_leaves, nodes):
        self.suite = suite
        self.salt = salt
        self.round_index = round_index
        self.n_leaves = n_leaves
        self.depth = (n_leaves - 1).bit_length()
        self.nodes = nodes  # heap array, index 0 unused

    @classmethod
    def expand(cls, suite, root_seed, salt, round_index, n_leaves):
        if n_leaves < 2 or n_leaves & (n_leaves - 1):
            raise ValueError("seed tree size must be a power of two >= 2")
        nodes = [None] * (2 * n_leaves)
        nodes[1] = root_seed
        prefix = salt + encode_u16(round_index)
        sb = suite.seed_bytes
        xof = suite.xof_digest
        for i in range(1, n_leaves):
            both = xof(X_TREE, prefix + encode_u32(i) + nodes[i], 2 * sb)
            nodes[2 * i] = both[:sb]
            nodes[2 * i + 1] = both[sb:]
        return cls(suite, salt, round_index, n_leaves, nodes)

    def leaf(self, i):
        """Leaf seed, 1-based leaf index."""
        return self.nodes[self.n_leaves + i - 1]

    def leaves(self):
        return self.nodes[self.n_leaves:]

    def leaf_pair(self, i):
        """(seed_i, rho_i): the commitment randomness is one extra expansion."""
        seed = self.leaf(i)
        rho = self.suite.xof(X_TREE, self.salt, encode_u16(self.round_index),
                             encode_u32(0xFFFFFFFF), seed).read(self.suite.seed_bytes)
        return seed, rho

    def sibling_path(self, hidden):
        """Seeds revealing all leaves except ``hidden``; root side first."""
        if not 1 <= hidden <= self.n_leaves:
            raise ValueError("leaf index out of range")
        node = self.n_leaves + hidden - 1
        path = []
        while node > 1:
            path.append(self.nodes[node ^ 1])
            node >>= 1
        path.reverse()
        return path


def leaves_from_path(suite, path, hidden, salt, round_index, n_leaves):
    """Rebuild all leaf seeds except ``hidden`` from its sibling path.

    Returns a list of length n_leaves (1-based leaf i at slot i-1) with None
    at the hidden position.
    """
    if n_leaves < 2 or n_leaves & (n_leaves - 1):
        raise ValueError("seed tree size must be a power of two >= 2")
    depth = (n_leaves - 1).bit_length()
    if len(path) != depth:
        raise ValueError("sibling path length mismatch")
    prefix = salt + encode_u16(round_index)
    sb = suite.seed_bytes
    nodes = {}
    node = n_leaves + hidden - 1
    chain = []
    while node > 1:
        chain.append(node ^ 1)
        node >>= 1
    chain.reverse()
    for seed, idx in zip(path, chain):
        nodes[idx] = seed
    # expand every known subtree down to the leaves
    stack = list(nodes.keys())
    while stack:
        i = stack.pop()
        if i >= n_leaves:
            continue
        both = suite.xof_digest(X_TREE, prefix + encode_u32(i) + nodes[i], 2 * sb)
        nodes[2 * i] = both[:sb]
        nodes[2 * i + 1] = both[sb:]
        stack.append(2 * i)
        stack.append(2 * i + 1)
    out = [nodes.get(n_leaves + i) for i in range(n_leaves)]
    assert out[hidden - 1] is None
    return out


# ---------------------------------------------------------------------------
# Merkle trees

def _merkle_levels(suite, leaf_values):
    n = len(leaf_values)
    if n == 0:
        raise ValueError("empty Merkle tree")
    hashed = [suite.hash(H_MERKLE, v) for v in leaf_values]
    pad = 1 << max(0, (n - 1).bit_length())
    zero = bytes(suite.digest_bytes)
    level = hashed + [zero] * (pad - n)
    levels = [level]
    while len(level) > 1:
        level = [suite.hash(H_MERKLE, level[i] + level[i + 1])
                 for i in range(0, len(level), 2)]
        levels.append(level)
    return levels


def merkle_root(suite, leaf_values):
    return _merkle_levels(suite, leaf_values)[-1][0]


def merkle_auth(suite, leaf_values, indices):
    """Digests needed to recompute the root from leaves at ``indices``.

    1-based indices; output is ordered bottom-up, left to right within each
    level.  Size is at most |I| * log2(N/|I|) + |I| digests.
    """
    indices = sorted(set(indices))
    if not indices or indices[0] < 1 or indices[-1] > len(leaf_values):
        raise ValueError("bad auth indices")
    levels = _merkle_levels(suite, leaf_values)
    known = {i - 1 for i in indices}
    auth = []
    for level in levels[:-1]:
        parents = set()
        for pos in sorted(known):
            sib = pos ^ 1
            if sib not in known:
                auth.append(level[sib])
            parents.add(pos >> 1)
        known = parents
    return auth


def merkle_root_from_auth(suite, leaf_hashes, indices, auth, n_leaves):
    """Recompute the root from (already hashed) leaves at ``indices``.

    Returns None when the path has the wrong shape.  leaf_hashes[j] must be
    the level-0 digest H_M(v) for 1-based leaf index indices[j].
    """
    order = np.argsort(indices)
    pairs = [(indices[j] - 1, leaf_hashes[j]) for j in order]
    if not pairs or pairs[0][0] < 0 or pairs[-1][0] >= n_leaves:
        return None
    if len({p for p, _ in pairs}) != len(pairs):
        return None
    pad = 1 << max(0, (n_leaves - 1).bit_length())
    cur = dict(pairs)
    it = iter(auth)
    width = pad
    try:
        while width > 1:
            nxt = {}
            for pos in sorted(cur):
                par = pos >> 1
                if par in nxt:
                    continue
                sib = pos ^ 1
                left = cur[pos] if pos & 1 == 0 else cur.get(sib)
                right = cur[pos] if pos & 1 == 1 else cur.get(sib)
                if left is None:
                    left = next(it)
                if right is None:
                    right = next(it)
                nxt[par] = suite.hash(H_MERKLE, left + right)
            cur = nxt
            width >>= 1
    except StopIteration:
        return None
    if next(it, None) is not None:
        return None
    return cur[0]
