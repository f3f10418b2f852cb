import itertools
import random
from fractions import Fraction as F

from tropic2sdp import _psd_pure, kernels
from tropic2sdp.sdpcore import psd_exact


def principal_minor_psd(m):
    """Independent PSD oracle: every principal minor determinant >= 0."""
    n = len(m)

    def det(rows):
        k = len(rows)
        sub = [[F(m[r][c]) for c in rows] for r in rows]
        # cofactor expansion is fine at these sizes
        if k == 0:
            return F(1)
        if k == 1:
            return sub[0][0]
        total = F(0)
        for j in range(k):
            minor = [row[:j] + row[j + 1 :] for row in sub[1:]]
            sign = -1 if j % 2 else 1
            total += sign * sub[0][j] * _det_dense(minor)
        return total

    def _det_dense(a):
        k = len(a)
        if k == 0:
            return F(1)
        if k == 1:
            return a[0][0]
        total = F(0)
        for j in range(k):
            minor = [row[:j] + row[j + 1 :] for row in a[1:]]
            total += (-1 if j % 2 else 1) * a[0][j] * _det_dense(minor)
        return total

    for size in range(1, n + 1):
        for rows in itertools.combinations(range(n), size):
            if det(list(rows)) < 0:
                return False
    return True


def random_symmetric(rng, dim, lo=-5, hi=5):
    m = [[0] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i, dim):
            m[i][j] = m[j][i] = rng.randint(lo, hi)
    return m


def test_pure_and_active_agree_small():
    rng = random.Random(0)
    for _ in range(2000):
        dim = rng.randint(1, 5)
        m = random_symmetric(rng, dim)
        flat = [v for row in m for v in row]
        assert _psd_pure.psd_int(flat, dim) == kernels.psd_int(flat, dim)


def test_kernels_match_minor_oracle():
    rng = random.Random(1)
    for _ in range(400):
        dim = rng.randint(1, 4)
        m = random_symmetric(rng, dim, -3, 3)
        flat = [v for row in m for v in row]
        assert kernels.psd_int(flat, dim) == principal_minor_psd(m)


def test_overflow_falls_back_to_pure():
    # entries big enough to overflow any fixed-width intermediate
    big = 1 << 80
    m = [[big, 0], [0, big]]
    flat = [v for row in m for v in row]
    assert kernels.psd_int(flat, 2) is True
    m = [[big, 2 * big], [2 * big, big]]
    assert kernels.psd_int([v for row in m for v in row], 2) is False


def test_batch_matches_single():
    rng = random.Random(2)
    dim = 3
    mats = []
    for _ in range(200):
        m = random_symmetric(rng, dim)
        mats.append([v for row in m for v in row])
    batch = kernels.psd_int_many(mats, dim)
    assert batch == [kernels.psd_int(m, dim) for m in mats]


def test_psd_exact_routes_ints_through_kernel():
    rng = random.Random(3)
    for _ in range(300):
        dim = rng.randint(1, 4)
        m = random_symmetric(rng, dim)
        frac = [[F(v) for v in row] for row in m]
        assert psd_exact(m) == psd_exact(frac)
