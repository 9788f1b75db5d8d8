import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import best_subset, merge_intervals
from lampcs.errors import BadBand, ConfigInvalid, NotNormalized, RankDeficient
from lampcs.linalg import project_residue
from lampcs.recovery import (GroupRecord, LampConfig, StopReason,
                             bandlimit_filter, block_partition, bomp, bomp_mmv,
                             energy_band, findresidue, format_result,
                             lamp_mmv, lamp_smv, merge_rows, merge_supports,
                             ols, omp, omp_mmv, parse_result,
                             reconstruct_coeffs)
from lampcs.sensing import (coherence, gen_sensing, normalize_columns,
                            trial_stream)
from lampcs.signals import gaussian_monocycle

seeds = st.integers(0, 2**32 - 1)


def problem(seed, M=30, N=60, K=6, groups=2):
    """Random normalized A and a noiseless group-sparse x."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((M, N))
    A /= np.linalg.norm(A, axis=0)
    x = np.zeros(N)
    for start in rng.choice(N - K, size=groups, replace=False):
        x[start:start + K // groups] = rng.standard_normal(K // groups)
    return rng, A, x, A @ x


def assert_monotone(res):
    norms = np.array(res.residue_norms)
    assert np.all(np.diff(norms) <= 1e-12 * norms[0])


# ---------------------------------------------------------------- OMP / OLS

def test_omp_zero_input():
    A = normalize_columns(gen_sensing(10, 20, seed=0))
    res = omp(A, np.zeros(10), 3)
    assert res.support == [] and res.stop_reason == StopReason.RESIDUE_SMALL


def test_omp_identity_one_sparse():
    x = np.zeros(12)
    x[5] = 2.0
    res = omp(np.eye(12), x, 3)
    assert res.support == [5] and res.iterations == 1
    assert res.residue_norms[-1] == 0.0
    assert res.stop_reason == StopReason.RESIDUE_SMALL
    np.testing.assert_allclose(res.estimate(), x)


def test_omp_matches_best_subset_oracle():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((20, 40))
    A /= np.linalg.norm(A, axis=0)
    x = np.zeros(40)
    x[[4, 17, 33]] = [1.5, -1.0, 0.8]
    y = A @ x
    assert set(omp(A, y, 3).support) == best_subset(A, y, 3) == {4, 17, 33}


def test_omp_requires_normalized_columns():
    with pytest.raises(NotNormalized):
        omp(gen_sensing(5, 8, seed=0), np.ones(5), 2)


def test_ols_equals_omp_on_orthonormal_columns():
    Q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((16, 16)))
    y = Q @ np.random.default_rng(2).standard_normal(16)
    assert ols(Q, y, 6).order == omp(Q, y, 6).order
    assert ols(Q, np.zeros(16), 4).support == []


def test_ols_picks_largest_explicit_drop():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((15, 30))
    A /= np.linalg.norm(A, axis=0)
    y = rng.standard_normal(15)
    res = ols(A, y, 6)
    T = []
    for j in res.order:
        base = np.sum(project_residue(A, T, y) ** 2)
        drops = {i: base - np.sum(project_residue(A, T + [i], y) ** 2)
                 for i in range(30) if i not in T}
        assert drops[j] == pytest.approx(max(drops.values()), rel=1e-9)
        T.append(j)


def test_omp_residue_stop():
    rng, A, x, y = problem(4)
    res = omp(A, y, 20, residue_stop=0.5)
    assert res.stop_reason == StopReason.RESIDUE_SMALL
    assert res.residue_norms[-1] <= 0.5 * np.linalg.norm(y)
    assert res.residue_norms[-2] > 0.5 * np.linalg.norm(y)


def test_greedy_skips_duplicate_column():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((6, 8))
    A[:, 1] = A[:, 0]
    A /= np.linalg.norm(A, axis=0)
    y = A[:, 0] + 0.5 * A[:, 3]
    res = omp(A, y, 4)
    assert not {0, 1} <= set(res.support)
    assert len(res.support) == len(set(res.support))


# ---------------------------------------------------------------- BOMP

def test_block_partition_short_tail():
    blocks = block_partition(10, 4)
    assert [b.tolist() for b in blocks] == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9]]
    with pytest.raises(ValueError):
        block_partition(10, 0)


def test_bomp_single_block():
    A = normalize_columns(gen_sensing(12, 10, seed=1)).matrix
    y = A @ np.random.default_rng(0).standard_normal(10)
    res = bomp(A, y, 10, stop_blocks=1)
    assert res.support == list(range(10)) and res.iterations == 1


def test_bomp_aligned_block_selected_first():
    N, M, K = 400, 200, 50
    rng = trial_stream(2, M, 0)
    A = normalize_columns(gen_sensing(M, N, seed=rng)).matrix
    s = gaussian_monocycle(N, 150, K)
    res = bomp(A, A @ s.values, 50, K=K)
    assert res.order[:50] == list(range(150, 200))
    assert res.stop_reason == StopReason.MAX_GROUPS and res.seed_searches == 1
    # block scores computed directly: the true block dominates
    scores = [np.abs(A[:, b].T @ (A @ s.values)).sum() for b in block_partition(N, 50)]
    assert int(np.argmax(scores)) == 3


def test_bomp_norm_choice_and_validation():
    rng, A, x, y = problem(6)
    assert bomp(A, y, 3, K=6, norm="l2").iterations == 2
    with pytest.raises(ValueError):
        bomp(A, y, 3, K=6, norm="linf")
    with pytest.raises(ValueError):
        bomp(A, y, 3)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_bomp_d1_equals_omp(seed):
    rng, A, x, y = problem(seed)
    assert bomp(A, y, 1, K=6).order == omp(A, y, 6).order


# ---------------------------------------------------------------- LAMP

@settings(max_examples=40, deadline=None)
@given(seeds)
def test_lamp_infinite_epsilon_equals_omp(seed):
    rng, A, x, y = problem(seed)
    cfg = LampConfig(K=6, epsilon_mode="absolute", epsilon=math.inf)
    res = lamp_smv(A, y, cfg)
    assert res.order == omp(A, y, 6).order
    assert res.seed_searches == len(res.support)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from(["relative", "oracle"]))
def test_lamp_mmv_single_column_equals_smv(seed, mode):
    rng, A, x, y = problem(seed)
    cfg = LampConfig(K=6, epsilon_mode=mode, epsilon=0.05)
    a = lamp_smv(A, y, cfg, x_true=x)
    b = lamp_mmv(A, y[:, None], cfg, X_true=x[:, None])
    assert [j for j, _ in b.order] == a.order
    assert b.seed_searches == a.seed_searches and b.stop_reason == a.stop_reason


def test_lamp_single_group_one_seed_search():
    rng = trial_stream(4, 300, 0)
    A = normalize_columns(gen_sensing(300, 100, seed=rng)).matrix
    x = np.zeros(100)
    x[40:45] = [0.8, 1.2, 1.0, -0.9, 1.1]
    res = lamp_smv(A, A @ x, LampConfig(K=5, epsilon_mode="oracle"), x_true=x)
    assert res.support == list(range(40, 45))
    assert res.seed_searches == 1
    g = res.groups[0]
    assert g.members == list(range(g.seed - g.k_up + 1, g.seed + g.k_down))
    assert g.height == 5


def test_lamp_group_records_are_contiguous():
    rng, A, x, y = problem(7, M=40, N=80, K=10)
    res = lamp_smv(A, y, LampConfig(K=10, epsilon=0.02))
    assert sum(g.height for g in res.groups) == len(res.support)
    for g in res.groups:
        assert g.members == list(range(g.seed - g.k_up + 1, g.seed + g.k_down))
        assert g.width == 1


def test_lamp_scan_stops_at_edges():
    A = normalize_columns(gen_sensing(200, 40, seed=3)).matrix
    x = np.zeros(40)
    x[:3] = 1.0
    x[-3:] = -1.0
    res = lamp_smv(A, A @ x, LampConfig(K=6, epsilon_mode="oracle"), x_true=x)
    assert res.support == [0, 1, 2, 37, 38, 39]
    assert res.seed_searches == 2


def test_lamp_support_saturation():
    A = normalize_columns(gen_sensing(8, 40, seed=5)).matrix
    y = np.random.default_rng(0).standard_normal(8)
    res = lamp_smv(A, y, LampConfig(residue_stop=0.0, epsilon=0.0))
    assert len(res.support) <= 8
    assert res.stop_reason in (StopReason.SUPPORT_SATURATED, StopReason.RESIDUE_SMALL)


def test_lamp_max_groups_stop():
    rng, A, x, y = problem(8, M=40, N=80, K=12, groups=3)
    res = lamp_smv(A, y, LampConfig(max_groups=1, epsilon=0.01))
    assert res.seed_searches == 1 and res.stop_reason == StopReason.MAX_GROUPS


def test_lamp_oracle_needs_truth():
    rng, A, x, y = problem(9)
    with pytest.raises(ValueError):
        lamp_smv(A, y, LampConfig(K=6, epsilon_mode="oracle"))


def test_lamp_config_validation():
    with pytest.raises(ConfigInvalid):
        LampConfig()
    for bad in (dict(K=-1), dict(K=3, epsilon=-1), dict(K=3, merge_gap=-1),
                dict(K=3, residue_stop=-0.1), dict(K=3, epsilon_mode="fuzzy")):
        with pytest.raises((ConfigInvalid, ValueError)):
            LampConfig(**bad)
    assert LampConfig(K=3, epsilon=0.2).eps_prime == 0.2


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_all_algorithms_monotone_and_no_reselection(seed):
    rng, A, x, y = problem(seed, M=30, N=60, K=8)
    runs = [omp(A, y, 8), ols(A, y, 8), bomp(A, y, 4, K=8),
            lamp_smv(A, y, LampConfig(K=8, epsilon=0.01)),
            lamp_smv(A, y, LampConfig(K=8, epsilon_mode="oracle"), x_true=x)]
    for res in runs:
        assert_monotone(res)
        assert len(res.order) == len(set(res.order))
        assert len(res.support) <= min(8, 30)
        assert len(res.coefficients) == len(res.support)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_counter_law(seed):
    rng, A, x, y = problem(seed, M=30, N=60, K=8)
    r = omp(A, y, 8)
    assert r.seed_searches == len(r.support)
    b = bomp(A, y, 4, K=8)
    assert b.seed_searches == len(b.support) // 4
    lm = lamp_smv(A, y, LampConfig(K=8, epsilon=0.01))
    assert lm.seed_searches == len(lm.groups)


def test_determinism_bit_for_bit():
    rng, A, x, y = problem(10)
    a = lamp_smv(A, y, LampConfig(K=6, epsilon=0.01))
    b = lamp_smv(A, y, LampConfig(K=6, epsilon=0.01))
    assert a.order == b.order and a.coefficients.tobytes() == b.coefficients.tobytes()


def test_guard_sound_when_coherence_is_small():
    """Oracle guard admits nothing outside the support when delta < 1/(3 sqrt K)."""
    checked = failures = 0
    for t in range(60):
        rng = trial_stream(12, 300, t)
        A = normalize_columns(gen_sensing(300, 60, seed=rng)).matrix
        mu = coherence(A)
        K = 2 if mu < 1 / (3 * math.sqrt(2)) else 1
        if mu >= 1 / 3:
            continue
        x = np.zeros(60)
        start = int(rng.integers(0, 60 - K + 1))
        x[start:start + K] = rng.choice([-1, 1], K) * rng.uniform(0.5, 1.5, K)
        # a second isolated spike puts the guard under pressure from outside
        x[(start + 20) % 60] = rng.uniform(0.5, 1.5)
        res = lamp_smv(A, A @ x, LampConfig(K=K + 1, epsilon_mode="oracle"), x_true=x)
        failures += len(set(res.admitted) - set(np.flatnonzero(x).tolist()))
        checked += 1
    assert checked >= 40
    assert failures == 0


# ---------------------------------------------------------------- MMV

def test_mmv_rectangle_counters():
    rng = trial_stream(6, 150, 0)
    A = normalize_columns(gen_sensing(150, 200, seed=rng)).matrix
    X = np.zeros((200, 8))
    X[60:63, 2:6] = 1.0
    Y = A @ X
    truth = sorted((r, c) for r in range(60, 63) for c in range(2, 6))
    lm = lamp_mmv(A, Y, LampConfig(K=12, epsilon_mode="oracle"), X_true=X)
    assert lm.support == truth and lm.seed_searches == 1
    g = lm.groups[0]
    assert g.height * g.width == 12 and sorted(g.members) == truth
    o = omp_mmv(A, Y, 12)
    assert o.support == truth and o.seed_searches == 12
    b = bomp_mmv(A, Y, 3, K=12)
    assert b.support == truth and b.seed_searches == 4
    np.testing.assert_allclose(lm.estimate(), X, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_omp_mmv_equals_block_diagonal_omp(seed):
    rng = np.random.default_rng(seed)
    M, N, P = 12, 20, 3
    A = rng.standard_normal((M, N))
    A /= np.linalg.norm(A, axis=0)
    X = np.zeros((N, P))
    X[rng.choice(N, 4), rng.choice(P, 4)] = rng.standard_normal(4)
    Y = A @ X
    big = np.kron(np.eye(P), A)  # column p*N + j
    seq = omp(big, Y.T.ravel(), 4).order
    mmv = omp_mmv(A, Y, 4).order
    assert [(j % N, j // N) for j in seq] == mmv


def test_lamp_mmv_group_rectangles_and_monotone():
    rng = trial_stream(3, 40, 1)
    from lampcs.signals import synth_bscan
    A = normalize_columns(gen_sensing(40, 100, seed=rng)).matrix
    sc = synth_bscan(100, 8, [(20, 3, 0.1, 6, 1.0, "monocycle")])
    res = lamp_mmv(A, A @ sc.X, LampConfig(residue_stop=1e-6, epsilon=0.02, epsilon_prime=0.3))
    assert_monotone(res)
    for g in res.groups:
        assert len(g.members) == g.height * g.width
    assert len(res.order) == len(set(res.order))


# ---------------------------------------------------------------- post-processing

def test_findresidue_smv_examples():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((10, 20))
    y = 2 * A[:, 3] - A[:, 7]
    np.testing.assert_array_equal(findresidue(A, y, y, [], []), y)
    assert np.linalg.norm(findresidue(A, y, y, [7], [3])) <= 1e-8 * np.linalg.norm(y)
    S = np.random.default_rng(2).standard_normal((6, 6))
    v = S @ np.ones(6)
    assert np.linalg.norm(findresidue(S, v, v, [0, 1, 2], [3, 4, 5])) <= 1e-10 * np.linalg.norm(v)
    with pytest.raises(ValueError):
        findresidue(A, y, y, [3], [3])


def test_findresidue_mmv_touches_only_listed_columns():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((8, 15))
    Y = rng.standard_normal((8, 3))
    R = findresidue(A, Y, Y, [(2, 1), (3, 1)], [(5, 1), (0, 2)])
    np.testing.assert_array_equal(R[:, 0], Y[:, 0])
    np.testing.assert_array_equal(R[:, 2], Y[:, 2])
    np.testing.assert_allclose(R[:, 1], project_residue(A, [5, 2, 3], Y[:, 1]), atol=1e-12)


def test_merge_examples():
    g1 = GroupRecord(12, members=list(range(10, 20)))
    g2 = GroupRecord(25, members=list(range(22, 30)))
    assert merge_supports([g1, g2], 0) == list(range(10, 20)) + list(range(22, 30))
    assert merge_supports([g1, g2], 2) == list(range(10, 30))
    assert merge_supports([g1, g2], 1) == list(range(10, 20)) + list(range(22, 30))
    assert merge_supports([], 3) == []


def test_merge_limit_bridges_smallest_holes_first():
    assert merge_rows([0, 3, 5], 2, limit=5) == [0, 3, 4, 5]
    assert merge_rows([0, 3, 5], 2) == [0, 1, 2, 3, 4, 5]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 80), st.integers(1, 6)), max_size=6),
       st.integers(0, 5))
def test_merge_matches_interval_oracle(layout, gap):
    groups = [GroupRecord(s, members=list(range(s, s + n))) for s, n in layout]
    assert merge_supports(groups, gap) == merge_intervals([g.members for g in groups], gap)


def test_merge_mmv_per_column():
    g = GroupRecord((0, 0), members=[(1, 0), (4, 0), (1, 1), (9, 1)])
    assert merge_supports([g], 2) == sorted([(1, 0), (2, 0), (3, 0), (4, 0), (1, 1), (9, 1)])


def test_reconstruct_examples():
    rng, A, x, y = problem(13, M=30, N=60, K=6)
    T = np.flatnonzero(x).tolist()
    np.testing.assert_allclose(reconstruct_coeffs(A, T, y), x, atol=1e-8 * np.linalg.norm(x))
    assert not reconstruct_coeffs(A, [], y).any()
    extra = sorted(set(T) | {0, 1, 59})
    xh = reconstruct_coeffs(A, extra, y)
    np.testing.assert_allclose(xh, x, atol=1e-8 * np.linalg.norm(x))
    with pytest.raises(RankDeficient):
        reconstruct_coeffs(A, list(range(31)), y)


def test_bandlimit_trivial_bands():
    x = np.random.default_rng(0).standard_normal(64)
    np.testing.assert_allclose(bandlimit_filter(x, (0, 32)), x, atol=1e-12)
    np.testing.assert_allclose(bandlimit_filter(x, (0, 0)), np.full(64, x.mean()), atol=1e-12)
    X = np.column_stack([x, 2 * x])
    np.testing.assert_allclose(bandlimit_filter(X, (0, 32)), X, atol=1e-12)
    for band in ((-1, 3), (5, 2), (0, 33)):
        with pytest.raises(BadBand):
            bandlimit_filter(x, band)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(0, 50))
def test_bandlimit_output_energy_inside_band(seed, low):
    x = np.random.default_rng(seed).standard_normal(101)
    high = min(50, low + 10)
    out = bandlimit_filter(x, (low, high))
    F = np.abs(np.fft.rfft(out)) ** 2
    mask = np.zeros(F.size, bool)
    mask[low:high + 1] = True
    assert F[~mask].sum() <= 1e-10 * F.sum() + 1e-20
    assert np.isrealobj(out)


def test_energy_band_of_monocycle():
    m = gaussian_monocycle(400, 150, 50)
    low, high = energy_band(m.values)
    F = np.abs(np.fft.rfft(m.values)) ** 2
    w = np.full(F.size, 2.0)
    w[0] = w[-1] = 1.0
    assert (F * w)[low:high + 1].sum() >= 0.999 * (F * w).sum()
    assert low >= 1  # zero-mean pulse carries no DC
    assert energy_band(np.zeros(8)) == (0, 0)


def test_filtering_reduces_noise_error_on_monocycle():
    N, M = 400, 100
    m = gaussian_monocycle(N, 150, 100)
    band = energy_band(m.values)
    rng = trial_stream(21, M, 0)
    A = normalize_columns(gen_sensing(M, N, seed=rng)).matrix
    y = A @ m.values + 0.1 * rng.standard_normal(M)
    xh = reconstruct_coeffs(A, m.true_support, y)
    pre = np.mean((xh - m.values) ** 2)
    post = np.mean((bandlimit_filter(xh, band) - m.values) ** 2)
    assert post < pre


# ---------------------------------------------------------------- reports

def test_result_report_round_trip():
    rng, A, x, y = problem(14)
    res = lamp_smv(A, y, LampConfig(K=6, epsilon=0.01))
    back = parse_result(format_result(res))
    assert back.support == res.support and back.stop_reason == res.stop_reason
    assert back.seed_searches == res.seed_searches and back.iterations == res.iterations
    np.testing.assert_array_equal(back.coefficients, res.coefficients)
    text = format_result(lamp_mmv(A, y[:, None], LampConfig(K=6)))
    assert "SUPP2D" in text and parse_result(text).shape == (60, 1)
    with pytest.raises(ValueError):
        parse_result("RESULT omp\n")
