#include "descore/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "descore/errors.hpp"

namespace descore {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    return mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

GroupStatistic group_statistic(const DecorrelatedFit& fit, Index n, bool rescaled) {
    GroupStatistic g;
    const double rn = std::sqrt(static_cast<double>(n));
    g.per_obs = fit.per_obs;
    Vector t = rn * fit.s_hat;
    if (rescaled) {
        Vector diag = fit.info_hat.diagonal();
        if (!(diag.array() > 0.0).all())
            throw NonPositiveInformation("rescaled group statistic needs positive information diagonal");
        Vector inv = diag.cwiseSqrt().cwiseInverse();
        t = t.cwiseProduct(inv);
        g.per_obs = g.per_obs * inv.asDiagonal();
    }
    g.per_coordinate = t.cwiseAbs();
    g.t_stat = g.per_coordinate.size() ? g.per_coordinate.maxCoeff() : 0.0;
    return g;
}

std::vector<double> multiplier_bootstrap(const Matrix& per_obs, int B, std::uint64_t seed,
                                         const std::optional<Vector>& rescale_diag) {
    if (B < 1) throw InvalidArgument("bootstrap needs B >= 1");
    const Index n = per_obs.rows();
    Matrix rows = per_obs;
    if (rescale_diag) {
        if (rescale_diag->size() != rows.cols()) throw DimensionMismatch("rescale_diag length mismatch");
        if (!(rescale_diag->array() > 0.0).all()) throw NonPositiveInformation("rescale_diag must be positive");
        rows = rows * rescale_diag->cwiseSqrt().cwiseInverse().asDiagonal();
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> draws(static_cast<std::size_t>(B));
    Vector e(n);
    for (int b = 0; b < B; ++b) {
        std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(b)));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index i = 0; i < n; ++i) e(i) = normal(rng);
        Vector N = rows.transpose() * e * scale;
        draws[static_cast<std::size_t>(b)] = N.size() ? N.cwiseAbs().maxCoeff() : 0.0;
    }
    std::sort(draws.begin(), draws.end());
    return draws;
}

double bootstrap_quantile(const std::vector<double>& sorted_draws, double level) {
    if (sorted_draws.empty()) throw InvalidArgument("no bootstrap draws");
    if (!(level > 0.0 && level <= 1.0)) throw InvalidArgument("quantile level must lie in (0, 1]");
    const double B = static_cast<double>(sorted_draws.size());
    double k = std::ceil(B * level - 1e-9);
    auto idx = static_cast<std::size_t>(std::clamp(k, 1.0, B)) - 1;
    return sorted_draws[idx];
}

GroupTestResult group_test(const DecorrelatedFit& fit, Index n, double alpha, int B, std::uint64_t seed,
                           bool rescaled) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    GroupStatistic g = group_statistic(fit, n, rescaled);
    std::vector<double> draws = multiplier_bootstrap(g.per_obs, B, seed);
    GroupTestResult r;
    r.t_stat = g.t_stat;
    r.critical_value = bootstrap_quantile(draws, 1.0 - alpha);
    r.reject = r.t_stat >= r.critical_value;
    auto ge = static_cast<double>(draws.end() - std::lower_bound(draws.begin(), draws.end(), r.t_stat));
    r.p_value_boot = (1.0 + ge) / (static_cast<double>(B) + 1.0);
    r.B = B;
    r.rescaled = rescaled;
    r.per_coordinate = std::move(g.per_coordinate);
    return r;
}

}  // namespace descore
