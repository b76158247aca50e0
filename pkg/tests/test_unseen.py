import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kendall_tau_by_pair_count
from x_extremes.embedding import NeighborhoodSpec
from x_extremes.errors import ValidationError
from x_extremes.tensor import EnsembleTensor, GridMeta
from x_extremes.unseen import (
    RandomProcessParams,
    RiskField,
    ThresholdMap,
    aggregate_country,
    analytic_fully_dependent_triplet,
    analytic_random_risks,
    analytic_random_triplet,
    build_thresholds,
    classify_hotspots,
    correlate_indicator,
    empirical_risks,
    hotspot_transition,
)

MOORE = NeighborhoodSpec()


def tensor_from(arr) -> EnsembleTensor:
    return EnsembleTensor(np.asarray(arr, dtype=np.float32))


def uniform_threshold_map(h, w, level, nb=MOORE, years=44) -> ThresholdMap:
    offsets = nb.offsets()
    alpha = np.full((h, w, len(offsets)), np.nan)
    rows, cols = np.divmod(np.arange(h * w), w)
    for k, (dy, dx) in enumerate(offsets):
        r2, c2 = rows + dy, cols + dx
        ok = (r2 >= 0) & (r2 < h) & (c2 >= 0) & (c2 < w)
        alpha[rows[ok], cols[ok], k] = level
    return ThresholdMap(
        alpha_target=np.full((h, w), level),
        alpha_neighbor=alpha,
        offsets=offsets,
        neighborhood=nb,
        record_years=years,
        target_exceed_prob=np.full((h, w), 1.0 / years),
    )


class TestBuildThresholds:
    def test_homogeneous_iid_neighbor_threshold_is_neighbor_max(self):
        rng = np.random.default_rng(0)
        ref = tensor_from(rng.random((5, 30, 3, 3)))
        thr = build_thresholds(ref, record_years=10)
        pooled = ref.pooled_matrix()
        # Unique maxima: rank 1 everywhere, so each neighbor threshold is
        # that neighbor's own record.
        for k, (dy, dx) in enumerate(thr.offsets):
            for r in range(3):
                for c in range(3):
                    r2, c2 = r + dy, c + dx
                    if 0 <= r2 < 3 and 0 <= c2 < 3:
                        assert thr.alpha_neighbor[r, c, k] == pooled[:, r2 * 3 + c2].max()
                    else:
                        assert np.isnan(thr.alpha_neighbor[r, c, k])

    def test_shift_equivariance_of_rank_matching(self):
        rng = np.random.default_rng(1)
        base = rng.random(120)
        vals = np.stack([base, base + 5.0], axis=1).reshape(1, 120, 1, 2)
        thr = build_thresholds(tensor_from(vals), record_years=10, nb=NeighborhoodSpec("von-neumann-4"))
        k_right = thr.offsets.index((0, 1))
        # float32 storage of the container is the comparison ground truth
        stored = np.asarray(vals, dtype=np.float32)
        assert thr.alpha_neighbor[0, 0, k_right] == pytest.approx(
            float(stored[0, :, 0, 1].max()), rel=1e-6
        )

    def test_unique_max_gives_one_over_n_probability(self):
        rng = np.random.default_rng(2)
        ref = tensor_from(rng.random((2, 50, 2, 2)))
        thr = build_thresholds(ref, record_years=10)
        assert np.allclose(thr.target_exceed_prob, 1.0 / 100)

    def test_constant_pixel_rejected(self):
        rng = np.random.default_rng(3)
        vals = rng.random((1, 40, 2, 2)).astype(np.float32)
        vals[:, :, 1, 1] = 2.0
        with pytest.raises(ValidationError, match=r"\(1,1\)"):
            build_thresholds(tensor_from(vals), record_years=10)

    def test_record_length_precondition(self):
        rng = np.random.default_rng(4)
        ref = tensor_from(rng.random((1, 10, 2, 2)))
        with pytest.raises(ValidationError):
            build_thresholds(ref, record_years=44)


class TestEmpiricalRisks:
    def test_target_always_exceeding_gives_pure_checkmate(self):
        rng = np.random.default_rng(5)
        vals = rng.random((4, 10, 3, 3)).astype(np.float32)
        vals[:, :, 1, 1] = 9.0  # center always at/above its record
        risks = empirical_risks(tensor_from(vals), uniform_threshold_map(3, 3, 5.0))
        # neighbors never reach 5.0, so only the center community fires
        assert risks.p_checkmate[1, 1] == 1.0
        assert risks.p_stalemate[1, 1] == 0.0
        assert risks.p_community[1, 1] == 1.0

    def test_no_community_hits_reported_missing(self):
        rng = np.random.default_rng(6)
        vals = rng.random((2, 10, 3, 3)).astype(np.float32)
        risks = empirical_risks(tensor_from(vals), uniform_threshold_map(3, 3, 5.0))
        assert not risks.defined.any()
        assert np.isnan(risks.p_checkmate).all()
        assert np.all(risks.p_community == 0.0)

    def test_normalized_identity_exact(self):
        rng = np.random.default_rng(7)
        vals = (rng.random((500, 4, 4, 4)) < 0.05).astype(np.float32)
        risks = empirical_risks(tensor_from(vals), uniform_threshold_map(4, 4, 0.5))
        both = risks.defined
        gap = np.abs(risks.p_checkmate[both] + risks.p_stalemate[both] - 1.0)
        assert gap.max() <= 1e-12

    def test_grid_mismatch_rejected(self):
        rng = np.random.default_rng(8)
        t = tensor_from(rng.random((1, 5, 2, 2)))
        with pytest.raises(ValidationError):
            empirical_risks(t, uniform_threshold_map(3, 3, 0.5))

    def test_neighborhood_mismatch_rejected(self):
        rng = np.random.default_rng(9)
        t = tensor_from(rng.random((1, 5, 3, 3)))
        thr = uniform_threshold_map(3, 3, 0.5)
        with pytest.raises(ValidationError):
            empirical_risks(t, thr, nb=NeighborhoodSpec("von-neumann-4"))

    def test_block_unit_uses_per_sample_maxima(self):
        vals = np.zeros((2, 3, 1, 2), dtype=np.float32)
        vals[0, 1, 0, 0] = 1.0  # sample 0 peaks once at the left pixel
        nb = NeighborhoodSpec("von-neumann-4")
        thr = uniform_threshold_map(1, 2, 1.0, nb=nb)
        snap = empirical_risks(tensor_from(vals), thr, unit="snapshot")
        block = empirical_risks(tensor_from(vals), thr, unit="block")
        assert snap.p_community[0, 0] == pytest.approx(1 / 6)
        assert block.p_community[0, 0] == pytest.approx(1 / 2)

    def test_matches_analytic_for_iid_exceedances(self):
        p = 1 / 44
        rng = np.random.default_rng(10)
        vals = (rng.random((100_000, 1, 3, 3)) < p).astype(np.float32)
        risks = empirical_risks(tensor_from(vals), uniform_threshold_map(3, 3, 0.5))
        comm, check, stale = analytic_random_triplet(p, p, 8)
        assert risks.p_community[1, 1] == pytest.approx(comm, abs=0.01)
        assert risks.p_checkmate[1, 1] == pytest.approx(check, abs=0.01)
        assert risks.p_stalemate[1, 1] == pytest.approx(stale, abs=0.01)

    def test_boundary_pixels_use_truncated_neighborhoods(self):
        p = 0.05
        rng = np.random.default_rng(11)
        vals = (rng.random((200_000, 1, 3, 3)) < p).astype(np.float32)
        risks = empirical_risks(tensor_from(vals), uniform_threshold_map(3, 3, 0.5))
        comm_corner, _, _ = analytic_random_triplet(p, p, 3)
        comm_edge, _, _ = analytic_random_triplet(p, p, 5)
        assert risks.p_community[0, 0] == pytest.approx(comm_corner, abs=0.01)
        assert risks.p_community[0, 1] == pytest.approx(comm_edge, abs=0.01)


class TestAnalyticBaselines:
    def test_published_rounded_values(self):
        comm, check, stale = analytic_random_triplet(1 / 44, 1 / 44, 8)
        assert round(comm, 4) == 0.1869
        assert round(check, 4) == 0.1216
        assert round(stale, 4) == 0.8784

    def test_normalization_exact(self):
        comm, check, stale = analytic_random_triplet(0.3, 0.2, 5)
        assert check + stale == pytest.approx(1.0, abs=1e-15)

    def test_certain_target_hit(self):
        comm, check, stale = analytic_random_triplet(1.0, 0.3, 4)
        assert comm == 1.0 and check == 1.0 and stale == 0.0

    def test_record_length_thirty_six(self):
        assert round(1 / 36, 3) == 0.028

    def test_fully_dependent(self):
        assert analytic_fully_dependent_triplet(1 / 44) == (1 / 44, 1.0, 0.0)

    def test_empty_neighborhood_rejected(self):
        with pytest.raises(ValidationError):
            analytic_random_triplet(0.1, 0.1, 0)

    def test_grid_variant_interior_matches_scalar(self):
        risks = analytic_random_risks(RandomProcessParams(p=1 / 44), 5, 5)
        comm, check, stale = analytic_random_triplet(1 / 44, 1 / 44, 8)
        assert risks.p_community[2, 2] == pytest.approx(comm, abs=1e-12)
        corner = analytic_random_triplet(1 / 44, 1 / 44, 3)
        assert risks.p_community[0, 0] == pytest.approx(corner[0], abs=1e-12)

    def test_monotone_in_synchronization(self):
        # Gaussian-copula exceedance indicators at fixed marginal p: raising
        # the latent correlation never lowers checkmate, never raises stalemate.
        from scipy.stats import norm

        p = 0.05
        z_crit = norm.ppf(1 - p)
        rng = np.random.default_rng(12)
        n = 400_000
        checks, stales = [], []
        for rho in (0.0, 0.25, 0.5, 0.75, 1.0):
            shared = rng.standard_normal((n, 1, 1, 1))
            own = rng.standard_normal((n, 1, 3, 3))
            latent = np.sqrt(rho) * shared + np.sqrt(1 - rho) * own
            vals = (latent > z_crit).astype(np.float32)
            risks = empirical_risks(tensor_from(vals), uniform_threshold_map(3, 3, 0.5))
            checks.append(risks.p_checkmate[1, 1])
            stales.append(risks.p_stalemate[1, 1])
        assert all(b >= a for a, b in zip(checks, checks[1:]))
        assert all(b <= a for a, b in zip(stales, stales[1:]))
        assert checks[-1] == pytest.approx(1.0)


class TestRiskFieldInvariants:
    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000), p=st.floats(0.01, 0.3))
    def test_identity_holds_for_random_ensembles(self, seed, p):
        rng = np.random.default_rng(seed)
        vals = (rng.random((400, 2, 3, 3)) < p).astype(np.float32)
        risks = empirical_risks(tensor_from(vals), uniform_threshold_map(3, 3, 0.5))
        both = risks.defined
        if both.any():
            gap = np.abs(risks.p_checkmate[both] + risks.p_stalemate[both] - 1.0)
            assert gap.max() <= 1e-12
        assert np.all((risks.p_community >= 0) & (risks.p_community <= 1))

    def test_inconsistent_construction_rejected(self):
        with pytest.raises(ValidationError):
            RiskField(
                p_community=np.array([[0.5]]),
                p_checkmate=np.array([[0.7]]),
                p_stalemate=np.array([[0.7]]),
                p_target_unnorm=np.array([[0.35]]),
                p_stalemate_unnorm=np.array([[0.35]]),
                community_counts=np.array([[10]]),
                n_snapshots=20,
            )


class TestHotspots:
    def _risk_like(self, p_comm, p_check):
        p_comm = np.asarray(p_comm, dtype=np.float64)
        p_check = np.asarray(p_check, dtype=np.float64)
        return RiskField(
            p_community=p_comm,
            p_checkmate=p_check,
            p_stalemate=1.0 - p_check,
            p_target_unnorm=p_check * p_comm,
            p_stalemate_unnorm=(1.0 - p_check) * p_comm,
            community_counts=np.full(p_comm.shape, 100),
            n_snapshots=1000,
        )

    def test_equal_to_baseline_flags_nothing(self):
        base = analytic_random_risks(RandomProcessParams(p=1 / 44), 4, 4)
        flags = classify_hotspots(base, 44, base)
        assert not flags.checkmate_above_random.any()
        # community exactly below/at 1/S stays unflagged for interior pixels?
        # p_comm = 0.1869 > 1/44, so community_high fires; that is expected.
        assert flags.community_high.all()

    def test_single_pixel_above_one_over_s(self):
        p = np.full((3, 3), 0.01)
        p[1, 1] = 0.5
        risks = self._risk_like(p, np.full((3, 3), 0.1))
        base = self._risk_like(np.full((3, 3), 0.01), np.full((3, 3), 0.1))
        flags = classify_hotspots(risks, 44, base)
        assert flags.community_high.sum() == 1
        assert flags.community_high[1, 1]

    def test_transition_overlap_fraction(self):
        old = np.zeros((10, 10), dtype=bool)
        new = np.zeros((10, 10), dtype=bool)
        old[:2, :] = True  # 20 old hotspots
        new[0, :9] = True  # 9 persist
        new[5:7, :5] = True  # 10 new hotspots outside the old set
        trans = hotspot_transition(old, new)
        assert trans.persistence == pytest.approx(9 / 20)
        assert trans.new_fraction == pytest.approx(10 / 19)

    def test_transition_known_45_percent(self):
        old = np.zeros((10, 10), dtype=bool)
        old.ravel()[:20] = True
        new = np.zeros((10, 10), dtype=bool)
        new.ravel()[:9] = True  # keep 9 of 20 = 45%
        new.ravel()[50:61] = True
        trans = hotspot_transition(old, new)
        assert trans.persistence == pytest.approx(0.45)


class TestCountryAggregation:
    def _grid_meta(self):
        labels = np.array(
            [["aa", "aa", "bb"], ["aa", "bb", "bb"], ["cc", None, "bb"]], dtype=object
        )
        return GridMeta(n_rows=3, n_cols=3, pixel_labels=labels)

    def _risks(self, p_comm, p_check):
        return RiskField(
            p_community=p_comm,
            p_checkmate=p_check,
            p_stalemate=np.where(np.isfinite(p_check), 1.0 - p_check, np.nan),
            p_target_unnorm=np.where(np.isfinite(p_check), p_check * p_comm, 0.0),
            p_stalemate_unnorm=np.where(np.isfinite(p_check), (1 - p_check) * p_comm, 0.0),
            community_counts=(p_comm * 100).astype(int),
            n_snapshots=100,
        )

    def test_uniform_country_mean(self):
        p = np.full((3, 3), 0.3)
        rows = aggregate_country(self._risks(p, np.full((3, 3), 0.5)), self._grid_meta())
        by_id = {r.country_id: r for r in rows}
        assert by_id["aa"].p_community == pytest.approx(0.3)
        assert by_id["aa"].n_pixels == 3

    def test_two_pixel_mean(self):
        p = np.zeros((3, 3))
        p[0, 0], p[0, 1], p[1, 0] = 0.2, 0.4, 0.3
        rows = aggregate_country(self._risks(p, np.full((3, 3), 0.5)), self._grid_meta())
        by_id = {r.country_id: r for r in rows}
        assert by_id["aa"].p_community == pytest.approx(0.3)

    def test_small_country_excluded_with_warning(self):
        p = np.full((3, 3), 0.1)
        with pytest.warns(UserWarning, match="cc"):
            rows = aggregate_country(self._risks(p, np.full((3, 3), 0.5)), self._grid_meta())
        assert "cc" not in {r.country_id for r in rows}

    def test_undefined_pixels_masked_from_checkmate_mean(self):
        p_check = np.full((3, 3), 0.5)
        p_check[0, 0] = np.nan  # one undefined pixel inside country aa
        p_check[1, 1] = 0.7
        with pytest.warns(UserWarning):
            rows = aggregate_country(
                self._risks(np.full((3, 3), 0.2), p_check), self._grid_meta()
            )
        by_id = {r.country_id: r for r in rows}
        assert by_id["aa"].n_defined == 2
        assert by_id["aa"].p_checkmate == pytest.approx(0.5)
        assert by_id["bb"].p_checkmate == pytest.approx((0.5 * 3 + 0.7) / 4)


class TestCorrelateIndicator:
    def test_identical_mapping_gives_one(self):
        risks = {f"c{i}": i * 0.01 for i in range(20)}
        res = correlate_indicator(risks, dict(risks), method="kendall")
        assert res.coefficient == pytest.approx(1.0)

    def test_negated_mapping_gives_minus_one(self):
        risks = {f"c{i}": i * 0.01 for i in range(20)}
        neg = {k: -v for k, v in risks.items()}
        res = correlate_indicator(risks, neg, method="spearman")
        assert res.coefficient == pytest.approx(-1.0)

    def test_monotone_plus_noise_near_oracle(self):
        # Population tau for y = x + noise estimated by a large MC oracle,
        # then the 77-country estimate must land within +-0.1 of it.
        rng = np.random.default_rng(13)
        big = 200_000
        xs = rng.random(big)
        ys = xs + rng.normal(0, 0.35, big)
        tau_oracle = kendall_tau_by_pair_count(xs[:2000:10], ys[:2000:10])
        x77 = rng.random(77)
        y77 = x77 + rng.normal(0, 0.35, 77)
        risks = {f"c{i}": float(x77[i]) for i in range(77)}
        inds = {f"c{i}": float(y77[i]) for i in range(77)}
        res = correlate_indicator(risks, inds, method="kendall")
        assert abs(res.coefficient - tau_oracle) <= 0.1
        assert res.p_value < 0.05

    def test_unmatched_countries_reported(self):
        risks = {f"c{i}": i * 0.01 for i in range(15)}
        inds = {f"c{i}": i * 0.02 for i in range(5, 25)}
        res = correlate_indicator(risks, inds)
        assert res.n_matched == 10
        assert set(res.unmatched_left) == {f"c{i}" for i in range(5)}

    def test_insufficient_overlap_rejected(self):
        risks = {f"c{i}": i * 0.01 for i in range(5)}
        with pytest.raises(ValidationError):
            correlate_indicator(risks, dict(risks))
