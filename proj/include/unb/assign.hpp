#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "unb/core.hpp"
#include "unb/phy.hpp"
#include "unb/rng.hpp"
#include "unb/training.hpp"

namespace unb {

enum class Sense { maximize, minimize };

/// sum_m [ sum_b linear(b,m) X(b,m) + sum_{b<k} quadratic_m(b,k) X(b,m) X(k,m) ]
/// Coefficients carry their sign: the P3 objective stores -R(b,k,m).
struct QuadraticAssignmentObjective {
    int num_bs = 0;
    int num_bands = 0;
    std::vector<double> linear;     // b * M + m
    std::vector<double> quadratic;  // (m * B + b) * B + k, symmetric, zero diagonal
    Sense sense = Sense::maximize;

    double linear_at(int b, int m) const {
        return linear[static_cast<std::size_t>(b * num_bands + m)];
    }
    double quadratic_at(int b, int k, int m) const {
        return quadratic[static_cast<std::size_t>((m * num_bs + b) * num_bs + k)];
    }

    double evaluate(std::span<const int> bands) const;
    double evaluate(const Assignment& x) const { return evaluate(x.bands()); }
};

/// Linear term S, pairwise penalty R: the second-order inclusion-exclusion
/// (Bonferroni) lower bound on sum_m P(some listening BS decodes | band m).
QuadraticAssignmentObjective build_p3_objective(const DecodeStats& stats);

/// Minimize sum_m sum_{b<k} X(b,m) X(k,m) |p_b - p_k|^-eta. Coincident BSs
/// use a 1 m separation.
QuadraticAssignmentObjective build_p4_objective(std::span<const Point2D> bs_locations, double eta,
                                                int num_bands);

struct SolveResult {
    Assignment assignment;
    double value = 0.0;
    std::uint64_t visited = 0;  // assignments evaluated
};

class EnumerationCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// M^B, saturating at UINT64_MAX.
std::uint64_t assignment_count(int num_bs, int num_bands);

/// Visits assignments in lexicographic order of the band vector (BS 0 most
/// significant) and keeps the first optimum, so ties resolve to the
/// lexicographically smallest band vector.
template <typename Visit>
void for_each_assignment(int num_bs, int num_bands, Visit&& visit) {
    std::vector<int> bands(static_cast<std::size_t>(num_bs), 0);
    while (true) {
        visit(std::span<const int>(bands));
        int pos = num_bs - 1;
        while (pos >= 0 && ++bands[static_cast<std::size_t>(pos)] == num_bands) {
            bands[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) return;
    }
}

/// Exact optimum over all M^B assignments; throws EnumerationCapExceeded
/// when M^B > cap.
SolveResult solve_enumeration(const QuadraticAssignmentObjective& objective,
                              std::uint64_t cap = 1000000);

/// Best-improvement coordinate moves (one BS to its best band) from random
/// starts until a full pass finds no improving move.
SolveResult solve_local_search(const QuadraticAssignmentObjective& objective, int restarts,
                               Rng& rng);

/// Enumeration when M^B <= cap, local search otherwise.
SolveResult solve(const QuadraticAssignmentObjective& objective, std::uint64_t cap, int restarts,
                  Rng& rng);

Assignment random_assignment(int num_bs, int num_bands, Rng& rng);

enum class OracleMetric { packet, transmission };

struct OracleResult {
    Assignment assignment;
    double rate = 0.0;  // the maximized metric
    std::uint64_t visited = 0;
};

/// Best assignment for the given decode table by exhaustive evaluation.
OracleResult oracle_best_assignment(const DecodeTable& table, OracleMetric metric,
                                    std::uint64_t cap = 1000000);

/// Both oracles from one pass over the assignment space.
struct OraclePair {
    OracleResult packet;
    OracleResult transmission;
};
OraclePair oracle_best_assignments(const MetricsEvaluator& evaluator, int num_bs, int num_bands,
                                   std::uint64_t cap = 1000000);

}  // namespace unb
