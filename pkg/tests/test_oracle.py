from fractions import Fraction

import pytest

from dgva.zhu import r_algebra, zhu_quotient

import oracles


@pytest.fixture(scope="module")
def ref7():
    return oracles.Heisenberg(7)


def test_weight_space_dims_match_partition_numbers(heis6):
    p = oracles.partition_numbers(6)
    got = {}
    for b in heis6.space.basis:
        got[b.wt2 // 2] = got.get(b.wt2 // 2, 0) + 1
    assert [got[n] for n in range(7)] == p == [1, 1, 2, 3, 5, 7, 11]


def test_mode_table_matches_iterate_formula(heis6, ref7):
    sp = heis6.space
    lo, hi = heis6.n_range
    checked = 0
    for u in ref7.states:
        for v in ref7.states:
            for n in range(lo, hi + 1):
                if sum(u) + sum(v) - n - 1 > 6 or max(sum(u), sum(v)) > 6:
                    continue
                want = {oracles.name(l): c for l, c in oracles.mode(u, n, v)}
                row = heis6.modes.lookup(sp.pos(oracles.name(u)), n, sp.pos(oracles.name(v)))
                assert {sp.basis[k].id: c for k, c in row.items()} == want, (u, n, v)
                checked += 1
    assert checked >= 9000


def test_r_dims_against_oracle(heis6, ref7):
    r = r_algebra(heis6, 6, congruences=False)
    assert r.dims_by_weight() == {Fraction(n): d for n, d in ref7.r_dims(6).items()}


@pytest.mark.parametrize("N,M", [(2, 3), (3, 5), (4, 6)])
def test_zhu_w_dims_against_oracle(heis7, ref7, N, M):
    zp = zhu_quotient(heis7, N, M, checks=False)
    assert zp.w_dims() == {Fraction(n): d for n, d in ref7.zhu_w_dims(N, M).items()}
