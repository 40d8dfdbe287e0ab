#include "unb/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace unb {

namespace {

bool better(double candidate, double incumbent, Sense sense) {
    return sense == Sense::maximize ? candidate > incumbent : candidate < incumbent;
}

QuadraticAssignmentObjective empty_objective(int num_bs, int num_bands, Sense sense) {
    if (num_bs < 1 || num_bands < 1) throw std::invalid_argument("objective: need B, M >= 1");
    QuadraticAssignmentObjective obj;
    obj.num_bs = num_bs;
    obj.num_bands = num_bands;
    obj.linear.assign(static_cast<std::size_t>(num_bs * num_bands), 0.0);
    obj.quadratic.assign(static_cast<std::size_t>(num_bs * num_bs * num_bands), 0.0);
    obj.sense = sense;
    return obj;
}

/// Contribution of BS b if it listened on band m, others fixed.
double row_value(const QuadraticAssignmentObjective& obj, std::span<const int> bands, int b,
                 int m) {
    double v = obj.linear_at(b, m);
    for (int k = 0; k < obj.num_bs; ++k) {
        if (k != b && bands[static_cast<std::size_t>(k)] == m) v += obj.quadratic_at(b, k, m);
    }
    return v;
}

}  // namespace

double QuadraticAssignmentObjective::evaluate(std::span<const int> bands) const {
    if (bands.size() != static_cast<std::size_t>(num_bs)) {
        throw std::invalid_argument("objective: assignment has wrong number of BSs");
    }
    double v = 0.0;
    for (int b = 0; b < num_bs; ++b) {
        const int m = bands[static_cast<std::size_t>(b)];
        v += linear_at(b, m);
        for (int k = b + 1; k < num_bs; ++k) {
            if (bands[static_cast<std::size_t>(k)] == m) v += quadratic_at(b, k, m);
        }
    }
    return v;
}

QuadraticAssignmentObjective build_p3_objective(const DecodeStats& stats) {
    auto obj = empty_objective(stats.num_bs, stats.num_bands, Sense::maximize);
    for (int m = 0; m < stats.num_bands; ++m) {
        for (int b = 0; b < stats.num_bs; ++b) {
            obj.linear[static_cast<std::size_t>(b * stats.num_bands + m)] = stats.S(b, m);
            for (int k = 0; k < stats.num_bs; ++k) {
                if (k == b) continue;
                obj.quadratic[static_cast<std::size_t>((m * stats.num_bs + b) * stats.num_bs + k)] =
                    -stats.R(b, k, m);
            }
        }
    }
    return obj;
}

QuadraticAssignmentObjective build_p4_objective(std::span<const Point2D> bs_locations, double eta,
                                                int num_bands) {
    if (!(eta > 0.0)) throw std::invalid_argument("build_p4_objective: eta must be positive");
    const int B = static_cast<int>(bs_locations.size());
    auto obj = empty_objective(B, num_bands, Sense::minimize);
    for (int b = 0; b < B; ++b) {
        for (int k = 0; k < B; ++k) {
            if (k == b) continue;
            const double d = std::max(
                distance(bs_locations[static_cast<std::size_t>(b)], bs_locations[static_cast<std::size_t>(k)]),
                1.0);
            const double c = std::pow(d, -eta);
            for (int m = 0; m < num_bands; ++m) {
                obj.quadratic[static_cast<std::size_t>((m * B + b) * B + k)] = c;
            }
        }
    }
    return obj;
}

std::uint64_t assignment_count(int num_bs, int num_bands) {
    std::uint64_t total = 1;
    for (int b = 0; b < num_bs; ++b) {
        if (total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(num_bands)) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= static_cast<std::uint64_t>(num_bands);
    }
    return total;
}

SolveResult solve_enumeration(const QuadraticAssignmentObjective& objective, std::uint64_t cap) {
    const auto total = assignment_count(objective.num_bs, objective.num_bands);
    if (total > cap) {
        throw EnumerationCapExceeded("solve_enumeration: " + std::to_string(objective.num_bands) +
                                     "^" + std::to_string(objective.num_bs) +
                                     " assignments exceed the cap; use solve_local_search");
    }
    std::vector<int> best;
    double best_value = 0.0;
    std::uint64_t visited = 0;
    for_each_assignment(objective.num_bs, objective.num_bands, [&](std::span<const int> bands) {
        ++visited;
        const double v = objective.evaluate(bands);
        if (best.empty() || better(v, best_value, objective.sense)) {
            best.assign(bands.begin(), bands.end());
            best_value = v;
        }
    });
    return SolveResult{Assignment::from_bands(best, objective.num_bands), best_value, visited};
}

SolveResult solve_local_search(const QuadraticAssignmentObjective& objective, int restarts,
                               Rng& rng) {
    if (restarts < 1) throw std::invalid_argument("solve_local_search: restarts must be >= 1");
    const int B = objective.num_bs;
    const int M = objective.num_bands;
    std::uniform_int_distribution<int> pick(0, M - 1);
    std::vector<int> best;
    double best_value = 0.0;
    std::uint64_t visited = 0;
    for (int r = 0; r < restarts; ++r) {
        std::vector<int> bands(static_cast<std::size_t>(B));
        for (auto& m : bands) m = pick(rng);
        bool improved = true;
        while (improved) {
            improved = false;
            for (int b = 0; b < B; ++b) {
                const int current = bands[static_cast<std::size_t>(b)];
                int target = current;
                double target_value = row_value(objective, bands, b, current);
                for (int m = 0; m < M; ++m) {
                    const double v = row_value(objective, bands, b, m);
                    ++visited;
                    if (better(v, target_value, objective.sense)) {
                        target = m;
                        target_value = v;
                    }
                }
                if (target != current) {
                    bands[static_cast<std::size_t>(b)] = target;
                    improved = true;
                }
            }
        }
        const double v = objective.evaluate(bands);
        if (best.empty() || better(v, best_value, objective.sense) ||
            (v == best_value && bands < best)) {
            best = bands;
            best_value = v;
        }
    }
    return SolveResult{Assignment::from_bands(best, M), best_value, visited};
}

SolveResult solve(const QuadraticAssignmentObjective& objective, std::uint64_t cap, int restarts,
                  Rng& rng) {
    if (assignment_count(objective.num_bs, objective.num_bands) <= cap) {
        return solve_enumeration(objective, cap);
    }
    return solve_local_search(objective, restarts, rng);
}

Assignment random_assignment(int num_bs, int num_bands, Rng& rng) {
    if (num_bs < 1 || num_bands < 1) throw std::invalid_argument("random_assignment: need B, M >= 1");
    std::uniform_int_distribution<int> pick(0, num_bands - 1);
    std::vector<int> bands(static_cast<std::size_t>(num_bs));
    for (auto& m : bands) m = pick(rng);
    return Assignment::from_bands(bands, num_bands);
}

OraclePair oracle_best_assignments(const MetricsEvaluator& evaluator, int num_bs, int num_bands,
                                   std::uint64_t cap) {
    const auto total = assignment_count(num_bs, num_bands);
    if (total > cap) {
        throw EnumerationCapExceeded("oracle: " + std::to_string(num_bands) + "^" +
                                     std::to_string(num_bs) + " assignments exceed the cap");
    }
    std::vector<int> best_packet;
    std::vector<int> best_trans;
    Metrics packet_metrics;
    Metrics trans_metrics;
    std::uint64_t visited = 0;
    std::vector<std::uint64_t> masks(static_cast<std::size_t>(num_bands));
    for_each_assignment(num_bs, num_bands, [&](std::span<const int> bands) {
        ++visited;
        std::fill(masks.begin(), masks.end(), 0);
        for (int b = 0; b < num_bs; ++b) {
            masks[static_cast<std::size_t>(bands[static_cast<std::size_t>(b)])] |= std::uint64_t{1} << b;
        }
        const Metrics m = evaluator.evaluate(masks);
        if (best_packet.empty() || m.pdp > packet_metrics.pdp) {
            best_packet.assign(bands.begin(), bands.end());
            packet_metrics = m;
        }
        if (best_trans.empty() || m.transmission_rate > trans_metrics.transmission_rate) {
            best_trans.assign(bands.begin(), bands.end());
            trans_metrics = m;
        }
    });
    return OraclePair{
        OracleResult{Assignment::from_bands(best_packet, num_bands), packet_metrics.pdp, visited},
        OracleResult{Assignment::from_bands(best_trans, num_bands), trans_metrics.transmission_rate,
                     visited}};
}

OracleResult oracle_best_assignment(const DecodeTable& table, OracleMetric metric,
                                    std::uint64_t cap) {
    const auto total = assignment_count(table.num_bs(), table.num_bands());
    if (total > cap) {
        throw EnumerationCapExceeded("oracle: assignment space exceeds the cap");
    }
    const MetricsEvaluator evaluator(table);
    auto pair = oracle_best_assignments(evaluator, table.num_bs(), table.num_bands(), cap);
    return metric == OracleMetric::packet ? pair.packet : pair.transmission;
}

}  // namespace unb
