#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brentlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace brentlab;

namespace {

double ref_pair_cost(std::uint64_t u, std::uint64_t v, const CostFunction& c,
                     std::uint64_t* gcd_out = nullptr) {
    const ReducedPair r = reduce_to_odd(u, v);
    std::uint64_t g = 0;
    const double cost = trace_cost(r.pair, c, &g);
    if (gcd_out)
        *gcd_out = g << r.shared_exponent;
    return cost;
}

struct BruteStats {
    std::uint64_t count = 0;
    double sum = 0, sumsq = 0;
};

BruteStats brute_stats(Ensemble e, std::uint64_t n, const CostFunction& c) {
    BruteStats s;
    for (std::uint64_t v = 2; v <= n; ++v)
        for (std::uint64_t u = 1; u < v; ++u) {
            if ((e == Ensemble::Odd || e == Ensemble::OddCoprime) && (!(u & 1) || !(v & 1)))
                continue;
            std::uint64_t g;
            const double cost = ref_pair_cost(u, v, c, &g);
            if ((e == Ensemble::Coprime || e == Ensemble::OddCoprime) && g != 1)
                continue;
            ++s.count;
            s.sum += cost;
            s.sumsq += cost * cost;
        }
    return s;
}

} // namespace

TEST_CASE("ensemble names") {
    CHECK(std::string(ensemble_name(Ensemble::OddCoprime)) == "odd-coprime");
    CHECK(std::string(ensemble_name(Ensemble::Odd)) == "odd");
    CHECK(std::string(ensemble_name(Ensemble::Coprime)) == "coprime");
    CHECK(std::string(ensemble_name(Ensemble::All)) == "all");
}

TEST_CASE("pair enumeration order and contents") {
    const auto oc10 = list_pairs(Ensemble::OddCoprime, 10);
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> expect = {
        {1, 3}, {1, 5}, {3, 5}, {1, 7}, {3, 7}, {5, 7}, {1, 9}, {5, 9}, {7, 9}};
    CHECK(oc10 == expect);

    CHECK(list_pairs(Ensemble::Odd, 9).size() == 10);
    CHECK(list_pairs(Ensemble::All, 5).size() == 10);
    CHECK(list_pairs(Ensemble::Coprime, 6).size() == 11);
    CHECK(list_pairs(Ensemble::All, 1).empty());

    for (const Ensemble e :
         {Ensemble::OddCoprime, Ensemble::Odd, Ensemble::Coprime, Ensemble::All}) {
        const auto pairs = list_pairs(e, 23);
        CHECK(std::is_sorted(pairs.begin(), pairs.end(),
                             [](const auto& a, const auto& b) {
                                 return a.second != b.second ? a.second < b.second
                                                             : a.first < b.first;
                             }));
        for (const auto& [u, v] : pairs) {
            CHECK(u >= 1);
            CHECK(u < v);
            CHECK(v <= 23);
        }
    }
}

TEST_CASE("census matches hand counts and sieve values") {
    const struct {
        std::uint64_t n;
        std::uint64_t expect[4]; // OddCoprime, Odd, Coprime, All
    } table[] = {
        {10, {9, 10, 31, 45}},
        {100, {1003, 1225, 3043, 4950}},
        {1000, {101330, 124750, 304191, 499500}},
    };
    for (const auto& row : table) {
        for (int e = 1; e <= 4; ++e) {
            const CensusResult r = ensemble_census(static_cast<Ensemble>(e), row.n);
            CHECK(r.count == row.expect[e - 1]);
            CHECK(r.n == row.n);
            CHECK(r.ratio == doctest::Approx(double(row.expect[e - 1]) /
                                             (double(row.n) * double(row.n)))
                                 .epsilon(1e-15));
        }
    }
    CHECK(ensemble_census(Ensemble::All, 0).count == 0);
    CHECK(ensemble_census(Ensemble::Odd, 1).count == 0);
    CHECK(ensemble_census(Ensemble::Coprime, 2).count == 1);
}

TEST_CASE("census agrees with direct enumeration") {
    for (int e = 1; e <= 4; ++e) {
        const auto kind = static_cast<Ensemble>(e);
        CHECK(ensemble_census(kind, 37).count == list_pairs(kind, 37).size());
    }
}

TEST_CASE("mean cost on the odd ensemble at n = 5") {
    const EnsembleStats s = mean_cost(Ensemble::Odd, 5, CostFunction::subtractions());
    CHECK(s.count == 3);
    CHECK(s.mean() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(mean_cost(Ensemble::Odd, 5, CostFunction::divisions()).mean() ==
          doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(mean_cost(Ensemble::Odd, 5, CostFunction::exchanges()).mean() ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("weighted counts agree with the census") {
    const CostFunction& c = CostFunction::subtractions();
    for (const std::uint64_t n : {4ull, 10ull, 100ull, 1000ull}) {
        CHECK(mean_cost(Ensemble::All, n, c).count == n * (n - 1) / 2);
        for (int e = 1; e <= 4; ++e) {
            const auto kind = static_cast<Ensemble>(e);
            CHECK(mean_cost(kind, n, c).count == ensemble_census(kind, n).count);
        }
    }
}

TEST_CASE("weighted totals equal brute force over all pairs") {
    const CostFunction table = CostFunction::from_table(
        "# cost-table C=4 extend=linear\n"
        "1 1 0.5\n1 2 3.0\n"
        "2 1 1.25\n2 2 2.5\n");
    for (const CostFunction* c :
         {&CostFunction::subtractions(), &CostFunction::divisions(),
          &CostFunction::exchanges(), &table}) {
        for (std::uint64_t n = 4; n <= 40; n += 9) {
            for (int e = 1; e <= 4; ++e) {
                const auto kind = static_cast<Ensemble>(e);
                const BruteStats want = brute_stats(kind, n, *c);
                const EnsembleStats got = mean_cost(kind, n, *c);
                CHECK(got.count == want.count);
                CHECK(got.sum_cost == doctest::Approx(want.sum).epsilon(1e-12));
                CHECK(got.sum_cost_sq == doctest::Approx(want.sumsq).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("sweep equals per-cost mean_cost exactly") {
    const SweepResult sw = ensemble_sweep(60);
    const CostFunction* costs[3] = {&CostFunction::subtractions(), &CostFunction::divisions(),
                                    &CostFunction::exchanges()};
    for (int e = 0; e < 4; ++e)
        for (int j = 0; j < 3; ++j) {
            const EnsembleStats want = mean_cost(static_cast<Ensemble>(e + 1), 60, *costs[j]);
            const EnsembleStats& got = sw.stats[e][j];
            CHECK(got.count == want.count);
            CHECK(got.sum_cost == want.sum_cost);
            CHECK(got.sum_cost_sq == want.sum_cost_sq);
            CHECK(got.cost_name == want.cost_name);
        }
}

TEST_CASE("sweep is exactly deterministic across thread counts") {
    const SweepResult a = ensemble_sweep(300, 1);
    const SweepResult b = ensemble_sweep(300, 5);
    for (int e = 0; e < 4; ++e)
        for (int j = 0; j < 3; ++j) {
            CHECK(a.stats[e][j].count == b.stats[e][j].count);
            CHECK(a.stats[e][j].sum_cost == b.stats[e][j].sum_cost);
            CHECK(a.stats[e][j].sum_cost_sq == b.stats[e][j].sum_cost_sq);
        }
}

TEST_CASE("census is deterministic across thread counts") {
    CHECK(ensemble_census(Ensemble::OddCoprime, 997, 1).count ==
          ensemble_census(Ensemble::OddCoprime, 997, 4).count);
    CHECK(ensemble_census(Ensemble::Coprime, 997, 1).count ==
          ensemble_census(Ensemble::Coprime, 997, 3).count);
}

TEST_CASE("cost tables reproduce the built-in costs through mean_cost") {
    const CostFunction t_like = CostFunction::from_table(
        "# cost-table C=1 extend=linear\n"
        "1 1 1\n2 1 1\n");
    const CostFunction s_like = CostFunction::from_table(
        "# cost-table C=1 extend=const\n"
        "1 1 1\n2 1 1\n");
    const EnsembleStats t1 = mean_cost(Ensemble::Odd, 200, t_like);
    const EnsembleStats t2 = mean_cost(Ensemble::Odd, 200, CostFunction::divisions());
    CHECK(t1.sum_cost == t2.sum_cost);
    CHECK(t1.sum_cost_sq == t2.sum_cost_sq);
    const EnsembleStats s1 = mean_cost(Ensemble::Coprime, 200, s_like);
    const EnsembleStats s2 = mean_cost(Ensemble::Coprime, 200, CostFunction::subtractions());
    CHECK(s1.sum_cost == s2.sum_cost);
    CHECK(s1.count == s2.count);
}

TEST_CASE("mean cost is linear in the cost function") {
    // c = 2 * subtractions + 3 * exchanges, constant in k
    const CostFunction combo = CostFunction::from_table(
        "# cost-table C=5 extend=const\n"
        "1 1 5\n2 1 2\n");
    for (int e = 1; e <= 4; ++e) {
        const auto kind = static_cast<Ensemble>(e);
        const double m = mean_cost(kind, 150, combo).mean();
        const double ms = mean_cost(kind, 150, CostFunction::subtractions()).mean();
        const double me = mean_cost(kind, 150, CostFunction::exchanges()).mean();
        CHECK(m == doctest::Approx(2 * ms + 3 * me).epsilon(1e-13));
    }
}

TEST_CASE("fit_line recovers exact lines and rejects degenerate input") {
    const SlopeFit f = fit_line({{1.0, 1.0}, {2.0, 3.0}, {3.0, 5.0}, {4.0, 7.0}});
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(f.rms_residual == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.points.size() == 4);

    CHECK_THROWS_AS(fit_line({{1, 1}, {2, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_line({{1, 1}, {1, 2}, {1, 3}}), std::invalid_argument);
}

TEST_CASE("slope_fit validates its ladder") {
    const CostFunction& c = CostFunction::subtractions();
    CHECK_THROWS_AS(slope_fit(Ensemble::Odd, c, {64}), std::invalid_argument);
    CHECK_THROWS_AS(slope_fit(Ensemble::Odd, c, {64, 128}), std::invalid_argument);
    CHECK_THROWS_AS(slope_fit(Ensemble::Odd, c, {128, 64, 256}), std::invalid_argument);
    CHECK_THROWS_AS(slope_fit(Ensemble::Odd, c, {64, 64, 128}), std::invalid_argument);
    CHECK_THROWS_AS(slope_fit(Ensemble::Odd, c, {2, 64, 128}), std::invalid_argument);

    const SlopeFit f = slope_fit(Ensemble::Odd, c, {64, 128, 256, 512});
    CHECK(f.slope > 0.8);
    CHECK(f.slope < 1.25);
    CHECK(f.rms_residual < 0.05);
}

TEST_CASE("branch-word sets match hand enumeration") {
    const auto t0 = theta_enumerate(0, 5, CostFunction::subtractions());
    REQUIRE(t0.size() == 1);
    CHECK(t0[0].u == 1);
    CHECK(t0[0].v == 1);
    CHECK(t0[0].cost == 0.0);

    const auto t1 = theta_enumerate(1, 10, CostFunction::subtractions());
    REQUIRE(t1.size() == 3);
    const std::uint64_t vs[3] = {3, 5, 9};
    for (int i = 0; i < 3; ++i) {
        CHECK(t1[i].u == 1);
        CHECK(t1[i].v == vs[i]);
        CHECK(t1[i].cost == 1.0);
    }

    const auto t2e = theta_enumerate(2, 9, CostFunction::exchanges());
    REQUIRE(t2e.size() == 5);
    const std::uint64_t expect_u[5] = {3, 1, 3, 5, 5};
    const std::uint64_t expect_v[5] = {5, 7, 7, 7, 9};
    const double expect_e[5] = {1, 0, 1, 1, 1};
    for (int i = 0; i < 5; ++i) {
        CHECK(t2e[i].u == expect_u[i]);
        CHECK(t2e[i].v == expect_v[i]);
        CHECK(t2e[i].cost == expect_e[i]);
    }

    const auto t2t = theta_enumerate(2, 9, CostFunction::divisions());
    const double expect_t[5] = {2, 2, 3, 3, 4};
    for (int i = 0; i < 5; ++i)
        CHECK(t2t[i].cost == expect_t[i]);
}

TEST_CASE("branch-word pairs are odd, coprime and trace back to themselves") {
    for (unsigned n = 1; n <= 4; ++n) {
        const auto level = theta_enumerate(n, 101, CostFunction::divisions());
        for (const auto& e : level) {
            CHECK((e.u & 1) == 1);
            CHECK((e.v & 1) == 1);
            CHECK(e.u < e.v);
            CHECK(e.v <= 101);
            const Trace t = binary_gcd_trace(e.u, e.v);
            CHECK(t.gcd == 1);
            CHECK(t.steps.size() == n);
            CHECK(total_cost(t, CostFunction::divisions()) ==
                  doctest::Approx(e.cost).epsilon(1e-12));
        }
        // no duplicates
        for (std::size_t i = 1; i < level.size(); ++i)
            CHECK((level[i - 1].v != level[i].v || level[i - 1].u != level[i].u));
    }
}

TEST_CASE("verify_theta cross-checks words against traces") {
    const ThetaReport r = verify_theta(2, 9, CostFunction::exchanges());
    CHECK(r.ok);
    CHECK(r.mismatches.empty());
    REQUIRE(r.levels.size() == 3);
    CHECK(r.levels[0].word_pairs == 1);
    CHECK(r.levels[1].word_pairs == 3);
    CHECK(r.levels[2].word_pairs == 5);
    for (const auto& lv : r.levels) {
        CHECK(lv.word_pairs == lv.trace_pairs);
        CHECK(lv.match);
    }

    const ThetaReport big = verify_theta(6, 500, CostFunction::subtractions());
    CHECK(big.ok);
    CHECK(big.mismatches.empty());
    CHECK(big.levels.size() == 7);
    for (const auto& lv : big.levels)
        CHECK(lv.word_pairs == lv.trace_pairs);
}

TEST_CASE("theta argument validation") {
    const CostFunction& c = CostFunction::subtractions();
    CHECK_THROWS_AS(theta_enumerate(1, 0, c), std::domain_error);
    CHECK_THROWS_AS(theta_enumerate(1, 2'000'000, c), std::domain_error);
    CHECK_THROWS_AS(theta_enumerate(65, 100, c), std::domain_error);
    CHECK_THROWS_AS(verify_theta(65, 100, c), std::domain_error);
    CHECK_THROWS_AS(verify_theta(2, 0, c), std::domain_error);
}

TEST_CASE("sampling is deterministic and thread-count independent") {
    const CostFunction& c = CostFunction::subtractions();
    const SampleStats a = sample_mean_cost(Ensemble::Odd, 1000, c, 5000, 42, 1);
    const SampleStats b = sample_mean_cost(Ensemble::Odd, 1000, c, 5000, 42, 3);
    CHECK(a.stats.sum_cost == b.stats.sum_cost);
    CHECK(a.stats.sum_cost_sq == b.stats.sum_cost_sq);
    CHECK(a.stats.count == 5000);
    const SampleStats d = sample_mean_cost(Ensemble::Odd, 1000, c, 5000, 43, 1);
    CHECK(d.stats.sum_cost != a.stats.sum_cost);
}

TEST_CASE("sampling estimates the exact mean within its error bar") {
    const CostFunction& c = CostFunction::subtractions();
    const double exact = mean_cost(Ensemble::Odd, 500, c).mean();
    const SampleStats s = sample_mean_cost(Ensemble::Odd, 500, c, 40000, 12345);
    CHECK(s.standard_error > 0.0);
    CHECK(std::abs(s.stats.mean() - exact) < 5 * s.standard_error + 1e-9);

    const double exact_cop = mean_cost(Ensemble::Coprime, 500, c).mean();
    const SampleStats sc = sample_mean_cost(Ensemble::Coprime, 500, c, 40000, 777);
    CHECK(std::abs(sc.stats.mean() - exact_cop) < 5 * sc.standard_error + 1e-9);
}

TEST_CASE("sampling argument validation") {
    const CostFunction& c = CostFunction::subtractions();
    CHECK_THROWS_AS(sample_mean_cost(Ensemble::Odd, 4, c, 100, 1), std::domain_error);
    CHECK_THROWS_AS(sample_mean_cost(Ensemble::Odd, 100, c, 1, 1), std::domain_error);
}
