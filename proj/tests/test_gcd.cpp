#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brentlab/gcd.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace brentlab;

TEST_CASE("strip_twos") {
    CHECK(strip_twos(96) == std::pair<std::uint64_t, unsigned>{3, 5});
    CHECK(strip_twos(1) == std::pair<std::uint64_t, unsigned>{1, 0});
    CHECK(strip_twos(7) == std::pair<std::uint64_t, unsigned>{7, 0});
    CHECK(strip_twos(std::uint64_t{1} << 40) == std::pair<std::uint64_t, unsigned>{1, 40});
    CHECK_THROWS_AS(strip_twos(0), std::domain_error);
}

TEST_CASE("reduce_to_odd") {
    const auto r = reduce_to_odd(40, 6);
    CHECK(r.pair == OddPair{3, 5});
    CHECK(r.shared_exponent == 1);
    CHECK(r.swapped);

    const auto s = reduce_to_odd(6, 20);
    CHECK(s.pair == OddPair{3, 5});
    CHECK(s.shared_exponent == 1);
    CHECK(!s.swapped);

    const auto t = reduce_to_odd(1, 1);
    CHECK(t.pair == OddPair{1, 1});
    CHECK(t.shared_exponent == 0);
    CHECK(!t.swapped);

    CHECK_THROWS_AS(reduce_to_odd(0, 5), std::domain_error);
    CHECK_THROWS_AS(reduce_to_odd(5, 0), std::domain_error);
    CHECK_THROWS_AS(reduce_to_odd(max_gcd_input, 3), std::domain_error);
}

TEST_CASE("binary_step") {
    auto [next, step] = binary_step({3, 5});
    CHECK(next == OddPair{1, 3});
    CHECK(step == StepRecord{Branch::Exchange, 1});

    std::tie(next, step) = binary_step({1, 3});
    CHECK(next == OddPair{1, 1});
    CHECK(step == StepRecord{Branch::NoExchange, 1});

    // tie w == u stays on the no-exchange branch
    std::tie(next, step) = binary_step({1, 9});
    CHECK(next == OddPair{1, 1});
    CHECK(step == StepRecord{Branch::NoExchange, 3});

    CHECK_THROWS_AS(binary_step({3, 3}), std::domain_error);
    CHECK_THROWS_AS(binary_step({2, 4}), std::domain_error);
    CHECK_THROWS_AS(binary_step({5, 3}), std::domain_error);
}

TEST_CASE("binary_gcd_trace examples") {
    auto t = binary_gcd_trace(3, 5);
    CHECK(t.gcd == 1);
    CHECK(t.steps == std::vector<StepRecord>{{Branch::Exchange, 1}, {Branch::NoExchange, 1}});
    CHECK(t.subtractions() == 2);
    CHECK(t.divisions() == 2);
    CHECK(t.exchanges() == 1);
    CHECK(to_string(t) == "(1,1);(2,1)");

    t = binary_gcd_trace(1, 7);
    CHECK(t.gcd == 1);
    CHECK(t.steps == std::vector<StepRecord>{{Branch::NoExchange, 1}, {Branch::NoExchange, 1}});

    t = binary_gcd_trace(1, 9);
    CHECK(t.gcd == 1);
    CHECK(t.steps == std::vector<StepRecord>{{Branch::NoExchange, 3}});

    t = binary_gcd_trace(3, 3);
    CHECK(t.gcd == 3);
    CHECK(t.steps.empty());
    CHECK(to_string(t).empty());

    // the trace of a general pair is the trace of its odd parts
    t = binary_gcd_trace(6, 20);
    CHECK(t.gcd == 2);
    CHECK(t.steps == binary_gcd_trace(3, 5).steps);

    CHECK_THROWS_AS(binary_gcd_trace(0, 5), std::domain_error);
    CHECK_THROWS_AS(binary_gcd_trace(5, max_gcd_input), std::domain_error);
}

TEST_CASE("built-in costs") {
    const auto t = binary_gcd_trace(3, 5);
    CHECK(total_cost(t, CostFunction::subtractions()) == 2.0);
    CHECK(total_cost(t, CostFunction::divisions()) == 2.0);
    CHECK(total_cost(t, CostFunction::exchanges()) == 1.0);

    const auto s = binary_gcd_trace(1, 9);
    CHECK(total_cost(s, CostFunction::subtractions()) == 1.0);
    CHECK(total_cost(s, CostFunction::divisions()) == 3.0);
    CHECK(total_cost(s, CostFunction::exchanges()) == 0.0);
}

TEST_CASE("regularity is validated lazily") {
    const CostFunction bad("bad", [](Branch, unsigned k) { return 3.0 * k; }, 1.0);
    CHECK_THROWS_AS(bad(Branch::Exchange, 1), std::logic_error);
    const CostFunction good("good", [](Branch, unsigned k) { return 3.0 * k; }, 3.0);
    CHECK(good(Branch::Exchange, 7) == 21.0);
    CHECK_THROWS_AS(good(Branch::Exchange, 0), std::domain_error);
    CHECK_THROWS_AS(CostFunction("neg", nullptr, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CostFunction("neg", [](Branch, unsigned) { return 1.0; }, -1.0),
                    std::invalid_argument);
}

TEST_CASE("cost tables") {
    const std::string text =
        "# cost-table C=2.0 extend=linear\n"
        "1 1 1.5\n"
        "1 2 3.0\n"
        "2 1 0.5\n";
    const auto c = CostFunction::from_table(text);
    CHECK(c.regularity() == 2.0);
    CHECK(c(Branch::Exchange, 1) == 1.5);
    CHECK(c(Branch::Exchange, 2) == 3.0);
    CHECK(c(Branch::Exchange, 4) == 6.0);  // linear extension: 3.0 * 4 / 2
    CHECK(c(Branch::NoExchange, 1) == 0.5);
    CHECK(c(Branch::NoExchange, 3) == 1.5); // 0.5 * 3 / 1

    const auto k = CostFunction::from_table(
        "# cost-table C=1.0 extend=const\n1 1 1.0\n2 1 0.25\n");
    CHECK(k(Branch::Exchange, 9) == 1.0);
    CHECK(k(Branch::NoExchange, 9) == 0.25);

    CHECK_THROWS_AS(CostFunction::from_table("1 1 1.0\n"), std::invalid_argument);
    CHECK_THROWS_AS(CostFunction::from_table("# cost-table C=1.0 extend=sideways\n1 1 1\n2 1 1\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(CostFunction::from_table("# cost-table C=1.0 extend=const\n1 2 1.0\n2 1 1\n"),
                    std::invalid_argument); // k gap
    CHECK_THROWS_AS(CostFunction::from_table("# cost-table C=1.0 extend=const\n1 1 5.0\n2 1 1\n"),
                    std::invalid_argument); // exceeds C*k
    CHECK_THROWS_AS(CostFunction::from_table("# cost-table C=1.0 extend=const\n1 1 0\n2 1 0\n"),
                    std::invalid_argument); // identically zero
    CHECK_THROWS_AS(CostFunction::from_table("# cost-table C=1.0 extend=const\n1 1 1\n"),
                    std::invalid_argument); // missing branch 2
}

TEST_CASE("count_steps and trace_cost agree with the trace") {
    std::mt19937_64 rng(20260819);
    std::uniform_int_distribution<std::uint64_t> dist(1, 1u << 20);
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t u = dist(rng) | 1, v = dist(rng) | 1;
        if (u > v)
            std::swap(u, v);
        const auto t = binary_gcd_trace(u, v);
        const auto c = count_steps({u, v});
        CHECK(c.subtractions == t.subtractions());
        CHECK(c.divisions == t.divisions());
        CHECK(c.exchanges == t.exchanges());
        CHECK(c.gcd == t.gcd);
        std::uint64_t g = 0;
        CHECK(trace_cost({u, v}, CostFunction::divisions(), &g) == double(t.divisions()));
        CHECK(g == t.gcd);
    }
}

TEST_CASE("trace structure invariants") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> dist(1, 1u << 24);
    for (int i = 0; i < 3000; ++i) {
        const std::uint64_t u = dist(rng), v = dist(rng);
        const auto t = binary_gcd_trace(u, v);

        // oracle: the classical gcd
        CHECK(t.gcd == std::gcd(u, v));
        CHECK(binary_gcd(u, v) == t.gcd);

        // E <= S <= T, and the product-halving bound 2^T <= u*v
        CHECK(t.exchanges() <= t.subtractions());
        CHECK(t.subtractions() <= t.divisions());
        CHECK(double(t.divisions()) <= std::log2(double(u)) + std::log2(double(v)) + 1e-9);

        if (!t.steps.empty()) {
            // every run ends on the no-exchange branch (tie rule)
            CHECK(t.steps.back().branch == Branch::NoExchange);
            for (const auto& s : t.steps)
                CHECK(s.k >= 1);
        }

        // replaying the recorded steps reproduces the descent
        auto r = reduce_to_odd(u, v);
        OddPair p = r.pair;
        for (const auto& s : t.steps) {
            auto [next, step] = binary_step(p);
            CHECK(step == s);
            p = next;
        }
        CHECK(p.u == p.v);
        CHECK((p.u << r.shared_exponent) == t.gcd);
    }
}

TEST_CASE("wide inputs") {
    const std::uint64_t big = max_gcd_input - 1;
    CHECK(binary_gcd(big, big - 2) == std::gcd(big, big - 2));
    const auto t = binary_gcd_trace(big, 3 * (std::uint64_t{1} << 40));
    CHECK(t.gcd == std::gcd(big, 3 * (std::uint64_t{1} << 40)));
}

TEST_CASE("small exhaustive oracle") {
    for (std::uint64_t u = 1; u <= 256; ++u)
        for (std::uint64_t v = 1; v <= 256; ++v)
            CHECK(binary_gcd(u, v) == std::gcd(u, v));
}
