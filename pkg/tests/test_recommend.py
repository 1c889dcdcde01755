import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trendrec.catalog import Gender
from trendrec.errors import ConfigError, DimensionMismatch, UnknownItem
from trendrec.recommend import (
    RecommendationRow,
    ScoringWeights,
    ZeroVectorWarning,
    cosine_similarity,
    popularity_alignment,
    read_recommendations_csv,
    recommend_all,
    recommend_for_purchase,
    relevance,
    write_recommendations_csv,
)
from trendrec.simulate import UserProfile

from helpers import brute_force_topk, desk_run, make_catalog


class TestScoringWeights:
    def test_defaults(self):
        weights = ScoringWeights()
        assert (weights.w_v, weights.w_p, weights.w_c, weights.gamma) == (0.7, 0.3, 0.0, 2)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"w_v": -0.1},
            {"w_v": 0.0, "w_p": 0.0, "w_c": 0.0},
            {"gamma": 3},
            {"gamma": 0},
        ],
    )
    def test_invalid_weights_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            ScoringWeights(**kwargs)


class TestCosineSimilarity:
    def test_identical_vectors(self):
        v = np.array([0.3, -1.2, 4.0])
        assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_vectors(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_forty_five_degrees(self):
        # 1/sqrt(2)
        assert cosine_similarity([1.0, 1.0], [1.0, 0.0]) == pytest.approx(0.70711, abs=1e-5)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cosine_similarity([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_zero_vector_warns_and_returns_zero(self):
        with pytest.warns(ZeroVectorWarning):
            assert cosine_similarity([0.0, 0.0], [1.0, 0.0]) == 0.0

    @given(
        vec=st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=8).filter(
            lambda v: any(abs(x) > 1e-6 for x in v)
        ),
        other=st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=8).filter(
            lambda v: any(abs(x) > 1e-6 for x in v)
        ),
    )
    def test_bounded(self, vec, other):
        if len(vec) != len(other):
            return
        assert -1.0 <= cosine_similarity(vec, other) <= 1.0


class TestPopularityAlignment:
    def test_perfect_alignment(self):
        assert popularity_alignment(0.6, 0.6, 2) == 1.0

    def test_maximal_mismatch(self):
        assert popularity_alignment(1.0, 0.0, 2) == 0.0

    def test_partial_mismatch(self):
        # 1 - (0.2 - 0.8)^2 = 1 - 0.36
        assert popularity_alignment(0.2, 0.8, 2) == pytest.approx(0.64, abs=1e-12)

    @given(
        norm_pop=st.floats(min_value=0.0, max_value=1.0),
        t=st.floats(min_value=0.0, max_value=1.0),
        gamma=st.sampled_from([2, 4, 6]),
    )
    def test_peaks_at_matching_popularity(self, norm_pop, t, gamma):
        value = popularity_alignment(norm_pop, t, gamma)
        assert value <= popularity_alignment(t, t, gamma) == 1.0
        assert value >= 0.0


class TestRelevance:
    def test_maximal_active_terms(self):
        weights = ScoringWeights(w_v=0.7, w_p=0.3, w_c=0.0)
        breakdown = relevance(weights, vis_sim=1.0, norm_pop=0.4, t=0.4, cat_sim=1.0)
        assert breakdown.total == pytest.approx(1.0, abs=1e-12)

    def test_hand_computed_two_term(self):
        # 0.7*0.5 + 0.3*(1 - (0.2-0.8)^2) = 0.35 + 0.3*0.64 = 0.542
        weights = ScoringWeights(w_v=0.7, w_p=0.3, w_c=0.0)
        breakdown = relevance(weights, vis_sim=0.5, norm_pop=0.2, t=0.8, cat_sim=1.0)
        assert breakdown.total == pytest.approx(0.542, abs=1e-12)

    def test_hand_computed_three_term(self):
        # 0.5*0.6 + 0.3*1.0 + 0.2*0.8 = 0.30 + 0.30 + 0.16 = 0.76
        weights = ScoringWeights(w_v=0.5, w_p=0.3, w_c=0.2)
        breakdown = relevance(weights, vis_sim=0.6, norm_pop=0.5, t=0.5, cat_sim=0.8)
        assert breakdown.total == pytest.approx(0.76, abs=1e-12)

    @given(
        vis=st.floats(min_value=-1.0, max_value=1.0),
        norm_pop=st.floats(min_value=0.0, max_value=1.0),
        t=st.floats(min_value=0.0, max_value=1.0),
        cat=st.floats(min_value=0.1, max_value=1.0),
    )
    def test_breakdown_recomputes(self, vis, norm_pop, t, cat):
        weights = ScoringWeights(w_v=0.5, w_p=0.3, w_c=0.2)
        b = relevance(weights, vis, norm_pop, t, cat)
        recomputed = weights.w_v * b.vis_sim + weights.w_p * b.pop_term + weights.w_c * b.cat_sim
        assert abs(b.total - recomputed) <= 1e-12
        assert abs(b.pop_term - (1.0 - (b.norm_pop - t) ** weights.gamma)) <= 1e-12


def six_item_fixture():
    """Four women's items around a Sweater source plus two men's items.

    Hand-scored with weights (0.5, 0.3, 0.2), gamma 2, t = 0.5:
      c_twin  Cardigan [1,0]: vis 1.0,    pop 1-(0.5-0.5)^2=1.00, cat 0.8 -> 0.96
      c_diag  Skirt    [1,1]: vis 1/v2,   pop 1-(0.9-0.5)^2=0.84, cat 0.2 -> 0.5*0.70710678+0.252+0.04
      c_orth  Sweater  [0,1]: vis 0.0,    pop 1-(0.2-0.5)^2=0.91, cat 1.0 -> 0.473
    """
    catalog = make_catalog(
        [
            ("src", Gender.WOMEN, "Sweater"),
            ("c_twin", Gender.WOMEN, "Cardigan"),
            ("c_orth", Gender.WOMEN, "Sweater"),
            ("c_diag", Gender.WOMEN, "Skirt"),
            ("m_one", Gender.MEN, "Denim"),
            ("m_two", Gender.MEN, "Tees"),
        ],
        vectors={
            "src": [1.0, 0.0],
            "c_twin": [1.0, 0.0],
            "c_orth": [0.0, 1.0],
            "c_diag": [1.0, 1.0],
            "m_one": [1.0, 0.0],
            "m_two": [0.0, 1.0],
        },
    )
    pop_norm = {
        "src": 0.3,
        "c_twin": 0.5,
        "c_orth": 0.2,
        "c_diag": 0.9,
        "m_one": 0.4,
        "m_two": 0.6,
    }
    user = UserProfile(user_id="u0", trendiness=0.5, gender=Gender.WOMEN)
    weights = ScoringWeights(w_v=0.5, w_p=0.3, w_c=0.2)
    return catalog, pop_norm, user, weights


class TestRecommendForPurchase:
    def test_hand_scored_ordering(self, tax):
        catalog, pop_norm, user, weights = six_item_fixture()
        recs = recommend_for_purchase(
            catalog, tax, pop_norm, user, {"src"}, "src", weights, k=5
        )
        assert [r.candidate_item_id for r in recs] == ["c_twin", "c_diag", "c_orth"]
        assert [r.rank for r in recs] == [1, 2, 3]
        assert recs[0].breakdown.total == pytest.approx(0.96, abs=1e-12)
        assert recs[1].breakdown.total == pytest.approx(
            0.5 * (1.0 / math.sqrt(2.0)) + 0.3 * 0.84 + 0.2 * 0.2, abs=1e-12
        )
        assert recs[2].breakdown.total == pytest.approx(0.473, abs=1e-12)

    def test_k_larger_than_pool_returns_everything(self, tax):
        catalog, pop_norm, user, weights = six_item_fixture()
        recs = recommend_for_purchase(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=50)
        assert len(recs) == 3

    def test_equal_totals_break_by_item_id(self, tax):
        catalog = make_catalog(
            [
                ("src", Gender.WOMEN, "Sweater"),
                ("zz", Gender.WOMEN, "Cardigan"),
                ("aa", Gender.WOMEN, "Cardigan"),
            ],
            vectors={"src": [1.0, 0.0], "zz": [0.5, 0.5], "aa": [0.5, 0.5]},
        )
        pop_norm = {"src": 0.1, "zz": 0.4, "aa": 0.4}
        user = UserProfile("u0", 0.6, Gender.WOMEN)
        recs = recommend_for_purchase(
            catalog, tax, pop_norm, user, {"src"}, "src", ScoringWeights(), k=2
        )
        assert [r.candidate_item_id for r in recs] == ["aa", "zz"]
        assert recs[0].breakdown.total == recs[1].breakdown.total

    def test_matches_brute_force_oracle(self, tax):
        catalog, pop_norm, user, weights = six_item_fixture()
        recs = recommend_for_purchase(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=3)
        oracle = brute_force_topk(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=3)
        assert [r.candidate_item_id for r in recs] == [e.item_id for e in oracle]
        for rec, entry in zip(recs, oracle):
            assert abs(rec.breakdown.total - entry.total) <= 1e-12

    def test_source_without_embedding_rejected(self, tax):
        catalog, pop_norm, user, weights = six_item_fixture()
        del catalog.embeddings.rows["src"]
        with pytest.raises(UnknownItem):
            recommend_for_purchase(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=3)

    def test_source_must_be_purchased(self, tax):
        catalog, pop_norm, user, weights = six_item_fixture()
        with pytest.raises(ValueError):
            recommend_for_purchase(catalog, tax, pop_norm, user, set(), "src", weights, k=3)

    def test_bad_k_rejected(self, tax):
        catalog, pop_norm, user, weights = six_item_fixture()
        with pytest.raises(ConfigError):
            recommend_for_purchase(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=0)

    def test_empty_candidate_pool(self, tax):
        catalog = make_catalog(
            [("src", Gender.WOMEN, "Sweater"), ("m", Gender.MEN, "Denim")]
        )
        user = UserProfile("u0", 0.5, Gender.WOMEN)
        recs = recommend_for_purchase(
            catalog, tax, {"src": 0.5, "m": 0.5}, user, {"src"}, "src", ScoringWeights(), k=5
        )
        assert recs == []


class TestRecommendAll:
    def test_one_list_per_purchase(self, tax):
        run = desk_run(seed=7, n_items=60, dim=8)
        purchases = {}
        for event in run.events:
            purchases.setdefault(event.user_id, set()).add(event.item_id)
        for user in run.users:
            assert set(run.results[user.user_id]) == purchases[user.user_id]

    def test_purchased_items_never_recommended(self, tax):
        run = desk_run(seed=7, n_items=60, dim=8)
        purchases = {}
        for event in run.events:
            purchases.setdefault(event.user_id, set()).add(event.item_id)
        for user_id, per_source in run.results.items():
            for recs in per_source.values():
                for rec in recs:
                    assert rec.candidate_item_id not in purchases[user_id]

    def test_candidates_match_user_gender(self, tax):
        run = desk_run(seed=7, n_items=60, dim=8)
        by_id = run.users_by_id
        for user_id, per_source in run.results.items():
            for recs in per_source.values():
                for rec in recs:
                    assert run.catalog.items[rec.candidate_item_id].gender is by_id[user_id].gender

    def test_deterministic(self, tax):
        run = desk_run(seed=7, n_items=60, dim=8)
        again = recommend_all(
            run.catalog,
            tax,
            list(run.users),
            list(run.events),
            run.pop_table,
            ScoringWeights(),
            5,
        )
        assert again == run.results


class TestRankingInvariants:
    def test_scaling_embeddings_preserves_rankings(self, tax):
        catalog, pop_norm, user, weights = six_item_fixture()
        base = recommend_for_purchase(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=3)
        scaled = make_catalog(
            [(r.item_id, r.gender, r.category) for r in catalog.items.values()],
            vectors={iid: vec * 7.3 for iid, vec in catalog.embeddings.rows.items()},
        )
        rescored = recommend_for_purchase(scaled, tax, pop_norm, user, {"src"}, "src", weights, k=3)
        assert [r.candidate_item_id for r in base] == [r.candidate_item_id for r in rescored]

    @given(scale=st.floats(min_value=1e-3, max_value=1e3))
    def test_any_positive_scale_preserves_rankings(self, tax, scale):
        catalog, pop_norm, user, weights = six_item_fixture()
        base = recommend_for_purchase(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=3)
        scaled = make_catalog(
            [(r.item_id, r.gender, r.category) for r in catalog.items.values()],
            vectors={iid: vec * scale for iid, vec in catalog.embeddings.rows.items()},
        )
        rescored = recommend_for_purchase(scaled, tax, pop_norm, user, {"src"}, "src", weights, k=3)
        assert [r.candidate_item_id for r in base] == [r.candidate_item_id for r in rescored]

    def test_raising_vis_sim_never_hurts_rank(self, tax):
        rng = np.random.default_rng(5)
        for _ in range(20):
            specs = [("src", Gender.WOMEN, "Sweater")]
            vectors = {"src": rng.standard_normal(4)}
            for i in range(8):
                specs.append((f"c{i}", Gender.WOMEN, "Cardigan"))
                vectors[f"c{i}"] = rng.standard_normal(4)
            catalog = make_catalog(specs, dim=4, vectors=vectors)
            pop_norm = {iid: 0.5 for iid in vectors}
            user = UserProfile("u0", 0.5, Gender.WOMEN)
            weights = ScoringWeights(w_v=0.7, w_p=0.3)
            before = recommend_for_purchase(catalog, tax, pop_norm, user, {"src"}, "src", weights, k=8)
            target = before[-1].candidate_item_id
            vectors[target] = vectors["src"].copy()  # vis_sim becomes maximal
            boosted = make_catalog(specs, dim=4, vectors=vectors)
            after = recommend_for_purchase(boosted, tax, pop_norm, user, {"src"}, "src", weights, k=8)
            rank_before = next(r.rank for r in before if r.candidate_item_id == target)
            rank_after = next(r.rank for r in after if r.candidate_item_id == target)
            assert rank_after <= rank_before

    def test_pure_popularity_ranking_sorts_by_trend_gap(self, tax):
        rng = np.random.default_rng(17)
        weights = ScoringWeights(w_v=0.0, w_p=1.0, w_c=0.0)
        for _ in range(20):
            n = int(rng.integers(3, 20))
            specs = [("src", Gender.WOMEN, "Sweater")]
            specs += [(f"c{i:02d}", Gender.WOMEN, "Cardigan") for i in range(n)]
            catalog = make_catalog(specs)
            pop_norm = {iid: float(rng.random()) for iid, _, _ in specs}
            user = UserProfile("u0", float(rng.random()), Gender.WOMEN)
            recs = recommend_for_purchase(
                catalog, tax, pop_norm, user, {"src"}, "src", weights, k=n
            )
            expected = sorted(
                (iid for iid, _, _ in specs[1:]),
                key=lambda iid: (abs(pop_norm[iid] - user.trendiness), iid),
            )
            assert [r.candidate_item_id for r in recs] == expected


class TestRowsCsv:
    def test_flatten_and_round_trip(self, tmp_path, tax):
        run = desk_run(seed=7, n_items=60, dim=8)
        rows = list(run.rows)
        path = tmp_path / "recs.csv"
        write_recommendations_csv(rows, path)
        assert read_recommendations_csv(path) == rows

    def test_distance_column_round_trips_none(self, tmp_path):
        row = RecommendationRow(
            user_id="u0",
            source_item_id="a",
            rank=1,
            candidate_item_id="b",
            total=0.5,
            vis_sim=0.25,
            pop_term=0.75,
            cat_sim=0.8,
            distance_km=None,
        )
        path = tmp_path / "one.csv"
        write_recommendations_csv([row], path)
        assert read_recommendations_csv(path) == [row]
