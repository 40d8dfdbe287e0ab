#include <limits>
#include <stdexcept>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unb/assign.hpp"

using namespace unb;

namespace {

DecodeStats make_stats(int B, int M) {
    DecodeStats st;
    st.num_bs = B;
    st.num_bands = M;
    st.s = {std::vector<double>(static_cast<std::size_t>(B * M), 0.0),
            std::vector<std::int64_t>(static_cast<std::size_t>(B * M), 1)};
    st.r = {std::vector<double>(static_cast<std::size_t>(B * B * M), 0.0),
            std::vector<std::int64_t>(static_cast<std::size_t>(B * B * M), 1)};
    return st;
}

void set_R(DecodeStats& st, int b, int k, int m, double v) {
    st.r.value[st.r_index(b, k, m)] = v;
    st.r.value[st.r_index(k, b, m)] = v;
}

DecodeStats random_stats(int B, int M, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto st = make_stats(B, M);
    for (int m = 0; m < M; ++m) {
        for (int b = 0; b < B; ++b) st.s.value[st.s_index(b, m)] = u(rng);
        for (int b = 0; b < B; ++b) {
            set_R(st, b, b, m, st.S(b, m));
            for (int k = b + 1; k < B; ++k) set_R(st, b, k, m, u(rng) * std::min(st.S(b, m), st.S(k, m)));
        }
    }
    return st;
}

/// Objective written out from its definition, independent of the library.
double p3_value(const DecodeStats& st, const std::vector<int>& bands) {
    double v = 0;
    for (int b = 0; b < st.num_bs; ++b) {
        v += st.S(b, bands[static_cast<std::size_t>(b)]);
        for (int k = b + 1; k < st.num_bs; ++k) {
            if (bands[static_cast<std::size_t>(b)] == bands[static_cast<std::size_t>(k)]) {
                v -= st.R(b, k, bands[static_cast<std::size_t>(b)]);
            }
        }
    }
    return v;
}

std::vector<std::vector<int>> all_band_vectors(int B, int M) {
    std::vector<std::vector<int>> out;
    std::vector<int> v(static_cast<std::size_t>(B), 0);
    const auto total = static_cast<std::size_t>(std::pow(M, B));
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t code = i;
        for (int b = B - 1; b >= 0; --b) {
            v[static_cast<std::size_t>(b)] = static_cast<int>(code % static_cast<std::size_t>(M));
            code /= static_cast<std::size_t>(M);
        }
        out.push_back(v);
    }
    return out;
}

DecodeTable random_table(int B, int M, std::size_t packets, double p, Rng& rng) {
    std::bernoulli_distribution bit(p);
    std::uniform_int_distribution<int> band(0, M - 1);
    std::vector<std::uint64_t> masks;
    std::vector<int> bands;
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < packets; ++k) {
        for (int r = 0; r < 3; ++r) {
            std::uint64_t m = 0;
            for (int b = 0; b < B; ++b) m |= bit(rng) ? std::uint64_t{1} << b : 0;
            masks.push_back(m);
            bands.push_back(band(rng));
            ids.push_back(k);
        }
    }
    return DecodeTable(B, M, packets, masks, bands, ids);
}

}  // namespace

TEST_SUITE("assign") {

TEST_CASE("P3 with one BS picks the best band") {
    auto st = make_stats(1, 3);
    st.s.value = {0.1, 0.7, 0.2};
    const auto obj = build_p3_objective(st);
    const auto res = solve_enumeration(obj);
    CHECK(res.assignment.bands() == std::vector<int>{1});
    CHECK(res.value == doctest::Approx(0.7));
    CHECK(res.visited == 3);
}

TEST_CASE("P3 two-BS example") {
    auto st = make_stats(2, 2);
    st.s.value = {0.9, 0.5, 0.9, 0.5};
    set_R(st, 0, 1, 0, 0.81);
    set_R(st, 0, 1, 1, 0.25);
    const auto obj = build_p3_objective(st);
    CHECK(obj.sense == Sense::maximize);
    CHECK(obj.evaluate(std::vector<int>{0, 0}) == doctest::Approx(0.99));
    CHECK(obj.evaluate(std::vector<int>{1, 1}) == doctest::Approx(0.75));
    CHECK(obj.evaluate(std::vector<int>{0, 1}) == doctest::Approx(1.40));
    CHECK(obj.evaluate(std::vector<int>{1, 0}) == doctest::Approx(1.40));
    const auto res = solve_enumeration(obj);
    CHECK(format_assignment(res.assignment) == "1-2");  // lexicographically first of the tied splits
    CHECK(res.value == doctest::Approx(1.40));

    auto minimize = obj;
    minimize.sense = Sense::minimize;
    const auto worst = solve_enumeration(minimize);
    CHECK(format_assignment(worst.assignment) == "2-2");
    CHECK(worst.value == doctest::Approx(0.75));
}

TEST_CASE("correlated BSs are penalized more for sharing a band") {
    auto indep = make_stats(2, 1);
    indep.s.value = {0.6, 0.7};
    auto corr = indep;
    set_R(indep, 0, 1, 0, 0.6 * 0.7);
    set_R(corr, 0, 1, 0, 0.6);
    const std::vector<int> together = {0, 0};
    CHECK(build_p3_objective(corr).evaluate(together) < build_p3_objective(indep).evaluate(together));
    CHECK(build_p3_objective(corr).quadratic_at(0, 1, 0) < build_p3_objective(indep).quadratic_at(0, 1, 0));
}

TEST_CASE("P3 objective matches its definition") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const auto st = random_stats(4, 3, rng);
        const auto obj = build_p3_objective(st);
        for (const auto& v : all_band_vectors(4, 3)) {
            CHECK(obj.evaluate(v) == doctest::Approx(p3_value(st, v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("P4 examples") {
    const std::vector<Point2D> two = {{0, 0}, {100, 0}};
    const auto obj2 = build_p4_objective(two, 1.0, 2);
    CHECK(obj2.sense == Sense::minimize);
    CHECK(obj2.evaluate(std::vector<int>{0, 1}) == 0.0);
    CHECK(solve_enumeration(obj2).value == 0.0);

    const std::vector<Point2D> line = {{0, 0}, {1000, 0}, {10000, 0}};
    const auto obj3 = build_p4_objective(line, 1.0, 2);
    const auto res = solve_enumeration(obj3);
    const auto bands = res.assignment.bands();
    CHECK(bands[0] == bands[2]);
    CHECK(bands[1] != bands[0]);
    CHECK(res.value == doctest::Approx(1e-4));
    CHECK(res.visited == 8);
    for (const auto& v : all_band_vectors(3, 2)) CHECK(obj3.evaluate(v) >= res.value);

    const std::vector<Point2D> same = {{5, 5}, {5, 5}};
    CHECK(build_p4_objective(same, 2.0, 1).evaluate(std::vector<int>{0, 0}) == 1.0);
    CHECK_THROWS(build_p4_objective(two, 0.0, 2));
}

TEST_CASE("P4 closest co-band pair approaches the max-min separation") {
    Rng rng(2);
    std::uniform_real_distribution<double> u(0.0, 13000.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<Point2D> pts(5);
        for (auto& p : pts) p = {u(rng), u(rng)};
        auto min_sep = [&](const std::vector<int>& v) {
            double best = std::numeric_limits<double>::infinity();
            for (int b = 0; b < 5; ++b) {
                for (int k = b + 1; k < 5; ++k) {
                    if (v[static_cast<std::size_t>(b)] == v[static_cast<std::size_t>(k)]) {
                        best = std::min(best, distance(pts[static_cast<std::size_t>(b)], pts[static_cast<std::size_t>(k)]));
                    }
                }
            }
            return best;
        };
        double target = 0;
        for (const auto& v : all_band_vectors(5, 2)) target = std::max(target, min_sep(v));
        // The optimum costs at most 10 * target^-eta (10 co-band pairs at most),
        // so its own closest pair is no nearer than target * 10^(-1/eta).
        for (double eta : {1.0, 4.0, 8.0, 64.0}) {
            const auto r = solve_enumeration(build_p4_objective(pts, eta, 2));
            const double sep = min_sep(r.assignment.bands());
            CHECK(sep <= target);
            CHECK(sep >= target * std::pow(10.0, -1.0 / eta) * (1 - 1e-12));
        }
    }
}

TEST_CASE("P4 is invariant to rigid motions") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 5000.0);
    std::vector<Point2D> pts(5);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const double c = std::cos(0.7), s = std::sin(0.7);
    std::vector<Point2D> moved;
    for (auto p : pts) moved.push_back({c * p.x - s * p.y + 123.0, s * p.x + c * p.y - 4567.0});
    const auto a = build_p4_objective(pts, 1.5, 3);
    const auto b = build_p4_objective(moved, 1.5, 3);
    for (const auto& v : all_band_vectors(5, 3)) {
        CHECK(a.evaluate(v) == doctest::Approx(b.evaluate(v)).epsilon(1e-9));
    }
}

TEST_CASE("enumeration visits M^B assignments and respects the cap") {
    Rng rng(4);
    const auto obj = build_p3_objective(random_stats(6, 3, rng));
    CHECK(solve_enumeration(obj).visited == 729);
    CHECK(assignment_count(6, 3) == 729);
    CHECK_THROWS_AS(solve_enumeration(obj, 728), EnumerationCapExceeded);
    CHECK(assignment_count(64, 3) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("enumeration is equivariant under band relabeling") {
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        const auto st = random_stats(5, 3, rng);
        std::vector<int> perm = {0, 1, 2};
        std::shuffle(perm.begin(), perm.end(), rng);
        auto permuted = st;
        for (int m = 0; m < 3; ++m) {
            const int pm = perm[static_cast<std::size_t>(m)];
            for (int b = 0; b < 5; ++b) {
                permuted.s.value[st.s_index(b, pm)] = st.S(b, m);
                for (int k = 0; k < 5; ++k) permuted.r.value[st.r_index(b, k, pm)] = st.R(b, k, m);
            }
        }
        const auto base = solve_enumeration(build_p3_objective(st));
        const auto moved = solve_enumeration(build_p3_objective(permuted));
        CHECK(moved.value == doctest::Approx(base.value).epsilon(1e-12));
        // Up to ties, the optimum moves with the labels.
        std::vector<int> mapped;
        for (int b : base.assignment.bands()) mapped.push_back(perm[static_cast<std::size_t>(b)]);
        CHECK(p3_value(permuted, mapped) == doctest::Approx(moved.value).epsilon(1e-12));
    }
}

TEST_CASE("local search") {
    Rng rng(6);
    const auto one_band = build_p3_objective(random_stats(5, 1, rng));
    const auto forced = solve_local_search(one_band, 3, rng);
    CHECK(forced.assignment.bands() == std::vector<int>(5, 0));

    int matches = 0;
    std::uniform_int_distribution<int> pick_b(1, 6), pick_m(1, 3);
    for (int t = 0; t < 200; ++t) {
        const auto st = random_stats(pick_b(rng), pick_m(rng), rng);
        const auto obj = build_p3_objective(st);
        const auto ls = solve_local_search(obj, 20, rng);
        CHECK_FALSE(validate_assignment(ls.assignment, st.num_bs, st.num_bands).has_value());
        // Returned point is a local optimum: no single-BS move improves it.
        auto bands = ls.assignment.bands();
        for (int b = 0; b < st.num_bs; ++b) {
            for (int m = 0; m < st.num_bands; ++m) {
                auto moved = bands;
                moved[static_cast<std::size_t>(b)] = m;
                CHECK(obj.evaluate(moved) <= ls.value + 1e-12);
            }
        }
        if (std::abs(ls.value - solve_enumeration(obj).value) <= 1e-12) ++matches;
    }
    CHECK(matches >= 195);
    CHECK_THROWS(solve_local_search(one_band, 0, rng));
}

TEST_CASE("local search is deterministic given its stream") {
    Rng gen(7);
    const auto obj = build_p3_objective(random_stats(8, 3, gen));
    Rng a(8), b(8);
    const auto ra = solve_local_search(obj, 10, a);
    const auto rb = solve_local_search(obj, 10, b);
    CHECK(ra.assignment == rb.assignment);
    CHECK(ra.value == rb.value);
}

TEST_CASE("solve dispatches on the cap") {
    Rng rng(9);
    const auto obj = build_p3_objective(random_stats(6, 3, rng));
    CHECK(solve(obj, 1000, 5, rng).visited == 729);
    const auto ls = solve(obj, 100, 5, rng);
    CHECK(ls.value <= solve_enumeration(obj).value + 1e-12);
}

TEST_CASE("random assignment is uniform with independent rows") {
    Rng rng(10);
    CHECK(random_assignment(4, 1, rng).bands() == std::vector<int>(4, 0));
    const int n = 100000;
    std::vector<double> freq(3, 0);
    std::vector<std::vector<double>> joint(3, std::vector<double>(3, 0));
    for (int i = 0; i < n; ++i) {
        const auto x = random_assignment(3, 3, rng);
        CHECK_FALSE(validate_assignment(x, 3, 3).has_value());
        const auto v = x.bands();
        ++freq[static_cast<std::size_t>(v[2])];
        ++joint[static_cast<std::size_t>(v[0])][static_cast<std::size_t>(v[1])];
    }
    for (double f : freq) CHECK(std::abs(f / n - 1.0 / 3.0) <= 0.01);
    double chi2 = 0;
    for (const auto& row : joint) {
        for (double o : row) {
            const double e = n / 9.0;
            chi2 += (o - e) * (o - e) / e;
        }
    }
    CHECK(chi2 < 13.277);  // chi-square, 4 degrees of freedom, 0.01 level
}

TEST_CASE("oracle on degenerate tables") {
    Rng rng(11);
    const auto ones = random_table(4, 3, 30, 1.0, rng);
    const auto best = oracle_best_assignment(ones, OracleMetric::packet);
    CHECK(best.rate == 1.0);
    CHECK(format_assignment(best.assignment) == "1-1-2-3");  // first assignment covering every band
    CHECK(best.visited == 81);

    // Only BS 0 decodes anything, and only on band 1.
    std::vector<std::uint64_t> masks;
    std::vector<int> bands;
    std::vector<std::size_t> ids;
    for (std::size_t p = 0; p < 10; ++p) {
        for (int r = 0; r < 3; ++r) {
            const int band = static_cast<int>((p + static_cast<std::size_t>(r)) % 3);
            bands.push_back(band);
            masks.push_back(band == 1 ? 0b1 : 0);
            ids.push_back(p);
        }
    }
    const DecodeTable single(3, 3, 10, masks, bands, ids);
    for (auto metric : {OracleMetric::packet, OracleMetric::transmission}) {
        const auto r = oracle_best_assignment(single, metric);
        CHECK(r.assignment(0, 1) == 1);
    }
    CHECK_THROWS_AS(oracle_best_assignment(single, OracleMetric::packet, 26), EnumerationCapExceeded);
}

TEST_CASE("oracle dominance on random tables") {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const auto table = random_table(6, 3, 60, 0.15, rng);
        const auto packet = oracle_best_assignment(table, OracleMetric::packet);
        const auto trans = oracle_best_assignment(table, OracleMetric::transmission);
        CHECK(packet.rate >= metrics(trans.assignment, table).pdp);
        CHECK(trans.rate >= metrics(packet.assignment, table).transmission_rate);
        CHECK(packet.rate == metrics(packet.assignment, table).pdp);
        for (int i = 0; i < 20; ++i) {
            const auto x = random_assignment(6, 3, rng);
            CHECK(metrics(trans.assignment, table).pdp <= packet.rate);
            CHECK(metrics(x, table).pdp <= packet.rate);
            CHECK(metrics(x, table).transmission_rate <= trans.rate);
        }
        const MetricsEvaluator eval(table);
        const auto pair = oracle_best_assignments(eval, 6, 3);
        CHECK(pair.packet.assignment == packet.assignment);
        CHECK(pair.transmission.assignment == trans.assignment);
    }
}

}
