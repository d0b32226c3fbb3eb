"""Brute-force boson-sampling probabilities via matrix permanents (test-only)."""

import itertools
import math

import numpy as np

SQ = 1 / math.sqrt(2)
# columns: input ports a, b; rows: output ports c, d
REAL_BS = np.array([[SQ, SQ], [SQ, -SQ]])


def permanent(mat):
    n = mat.shape[0]
    if n == 0:
        return 1.0
    return sum(
        math.prod(mat[i, sigma[i]] for i in range(n)) for sigma in itertools.permutations(range(n))
    )


def fock_transition(unitary, n_in, n_out):
    """|Per(U[out, in])|^2 / (prod n_in! prod n_out!) for occupation tuples."""
    cols = [j for j, n in enumerate(n_in) for _ in range(n)]
    rows = [i for i, n in enumerate(n_out) for _ in range(n)]
    if len(rows) != len(cols):
        return 0.0
    sub = unitary[np.ix_(rows, cols)]
    norm = math.prod(math.factorial(n) for n in n_in) * math.prod(math.factorial(n) for n in n_out)
    return abs(permanent(sub)) ** 2 / norm


def dtype_port_probability(N, d, m, unitary=REAL_BS):
    """(N-m, m) probability of the d-type input: matched photons interfere,
    the d orthogonal ones split independently."""
    half = N // 2
    n_matched = N - d
    total = 0.0
    for k in range(d + 1):  # orthogonal photons ending in port d
        p_orth = math.comb(d, k) / 2**d
        md = m - k
        if 0 <= md <= n_matched:
            total += p_orth * fock_transition(unitary, (half, half - d), (n_matched - md, md))
    return total
