#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "descore/decorrelate.hpp"

namespace descore {

struct GroupStatistic {
    double t_stat = 0.0;
    Matrix per_obs;         // n x d0 rows used for resampling (rescaled when requested)
    Vector per_coordinate;  // |T_j|
};

/// ||sqrt(n) S||_inf, or with each coordinate divided by sqrt(I_jj) when rescaled.
GroupStatistic group_statistic(const DecorrelatedFit& fit, Index n, bool rescaled = false);

/// Sorted sup-norms of N_e = n^{-1/2} sum_i e_i S_i over B independent N(0,1) multiplier draws.
/// Draw b uses its own generator seeded from (seed, b).
std::vector<double> multiplier_bootstrap(const Matrix& per_obs, int B, std::uint64_t seed,
                                         const std::optional<Vector>& rescale_diag = std::nullopt);

/// Smallest draw t with fraction(draws <= t) >= level.
double bootstrap_quantile(const std::vector<double>& sorted_draws, double level);

struct GroupTestResult {
    double t_stat = 0.0;
    double critical_value = 0.0;
    bool reject = false;
    double p_value_boot = 1.0;
    int B = 0;
    bool rescaled = false;
    Vector per_coordinate;
};

/// Rejects when the statistic reaches the (1 - alpha) bootstrap quantile.
GroupTestResult group_test(const DecorrelatedFit& fit, Index n, double alpha = 0.05, int B = 1000,
                           std::uint64_t seed = 0, bool rescaled = false);

/// SplitMix64 mixing of (seed, stream) used for reproducible substreams.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace descore
