#include "descore/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "descore/bootstrap.hpp"
#include "descore/errors.hpp"

namespace descore {

std::string sim_statistic_name(SimStatistic s) {
    switch (s) {
        case SimStatistic::ModelInfo: return "model_info";
        case SimStatistic::PluginSigma: return "plugin_sigma";
        case SimStatistic::Sandwich: return "sandwich";
        case SimStatistic::Bootstrap: return "bootstrap";
    }
    return "unknown";
}

void SimConfig::validate() const {
    if (n < 2) throw InvalidArgument("simulation needs n >= 2");
    if (d < 1) throw InvalidArgument("simulation needs d >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
    if (s < 0 || s > d) throw InvalidArgument("sparsity s must lie in [0, d]");
    if (d0 < 1 || d0 > d) throw InvalidArgument("d0 must lie in [1, d]");
    if (support_start() < 0 || support_start() + s > d) throw InvalidArgument("support does not fit inside [0, d)");
    if (reps < 1) throw InvalidArgument("reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (pattern == BetaPattern::Uniform && !(uniform_lo <= uniform_hi))
        throw InvalidArgument("uniform range must satisfy lo <= hi");
    if (noise == NoiseKind::Heteroscedastic && (hetero_column < 0 || hetero_column >= d))
        throw InvalidArgument("heteroscedastic column out of range");
    if (bootstrap_B < 1) throw InvalidArgument("bootstrap_B must be >= 1");
    if (d0 > 1 && statistic != SimStatistic::Bootstrap)
        throw InvalidArgument("multi-coordinate nulls are tested with the bootstrap statistic");
    if (family == SimFamily::Logistic && statistic == SimStatistic::PluginSigma)
        throw InvalidArgument("the plug-in sigma statistic applies to the linear model only");
}

Matrix toeplitz_cholesky(Index d, double rho) {
    Matrix S(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k) S(j, k) = std::pow(rho, static_cast<double>(std::abs(j - k)));
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) throw NumericalError("Toeplitz covariance is not positive definite");
    return llt.matrixL();
}

namespace {

SimDataset generate_with_factor(const SimConfig& cfg, const Matrix& L, std::uint64_t rep_seed) {
    std::mt19937_64 rng(rep_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix G(cfg.n, cfg.d);
    for (Index i = 0; i < cfg.n; ++i)
        for (Index j = 0; j < cfg.d; ++j) G(i, j) = normal(rng);
    Matrix Q = G * L.transpose();

    Vector beta = Vector::Zero(cfg.d);
    for (Index k = 0; k < cfg.d0; ++k) beta(k) = cfg.theta_true;
    std::uniform_real_distribution<double> unif(cfg.uniform_lo, cfg.uniform_hi);
    for (Index k = 0; k < cfg.s; ++k)
        beta(cfg.support_start() + k) = cfg.pattern == BetaPattern::Dirac ? 1.0 : unif(rng);

    Vector eta = Q * beta;
    Vector y(cfg.n);
    if (cfg.family == SimFamily::Linear) {
        for (Index i = 0; i < cfg.n; ++i) {
            double e = normal(rng);
            if (cfg.noise == NoiseKind::Heteroscedastic) e *= 0.5 + std::abs(Q(i, cfg.hetero_column));
            y(i) = eta(i) + e;
        }
    } else {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (Index i = 0; i < cfg.n; ++i) {
            double p = 1.0 / (1.0 + std::exp(-eta(i)));
            y(i) = u01(rng) < p ? 1.0 : 0.0;
        }
    }
    IndexList interest(static_cast<std::size_t>(cfg.d0));
    for (Index k = 0; k < cfg.d0; ++k) interest[static_cast<std::size_t>(k)] = k;
    return SimDataset{Dataset(std::move(y), std::move(Q), std::move(interest)), std::move(beta)};
}

}  // namespace

SimDataset generate_dataset(const SimConfig& cfg, std::uint64_t rep_seed) {
    cfg.validate();
    return generate_with_factor(cfg, toeplitz_cholesky(cfg.d, cfg.rho), rep_seed);
}

RepOutcome run_replication(const SimConfig& cfg, const SimDataset& sim, std::uint64_t rep_seed) {
    const Dataset& data = sim.data;
    const ModelFamily family = cfg.family == SimFamily::Linear ? ModelFamily::gaussian(1.0) : ModelFamily::logistic();
    TuningPolicy tuning = cfg.tuning;
    tuning.seed = substream_seed(rep_seed, 1);
    PenaltyConfig pen;
    pen.kind = cfg.penalty;

    RepOutcome out;
    DecorrelatedFit fit = build_decorrelated_fit(data, family, pen, cfg.method, tuning, NuisanceSource::FullFit,
                                                 std::nullopt, cfg.solver);
    if (!fit.fit_converged) {
        out.error = "penalized fit did not converge";
        return out;
    }
    const Index n = data.n();
    auto record = [&](SimStatistic s, double stat, double p, bool reject) {
        out.rejects[sim_statistic_name(s)] = reject;
        if (s == cfg.statistic) {
            out.statistic = stat;
            out.p_value = p;
        }
    };
    auto wanted = [&](SimStatistic s) { return cfg.compute_all || cfg.statistic == s; };

    if (data.d0() == 1) {
        if (wanted(SimStatistic::ModelInfo)) {
            TestResult t = score_test(fit, n, cfg.alpha);
            record(SimStatistic::ModelInfo, t.statistic, t.p_value, t.reject);
        }
        if (cfg.family == SimFamily::Linear && wanted(SimStatistic::PluginSigma)) {
            TestResult t = score_test_unknown_sigma(data, fit, cfg.alpha);
            record(SimStatistic::PluginSigma, t.statistic, t.p_value, t.reject);
        }
        if (wanted(SimStatistic::Sandwich)) {
            TestResult t = sandwich_test(data, family, fit, cfg.alpha);
            record(SimStatistic::Sandwich, t.statistic, t.p_value, t.reject);
        }
        if (cfg.compute_ci) {
            OneStepEstimate est = one_step(fit, n, 1.0 - cfg.alpha);
            out.covered = est.ci_lower <= cfg.theta_true && cfg.theta_true <= est.ci_upper;
            out.ci_width = est.ci_upper - est.ci_lower;
        }
    }
    if (wanted(SimStatistic::Bootstrap)) {
        GroupTestResult g = group_test(fit, n, cfg.alpha, cfg.bootstrap_B, substream_seed(rep_seed, 2),
                                       cfg.bootstrap_rescaled);
        record(SimStatistic::Bootstrap, g.t_stat, g.p_value_boot, g.reject);
    }
    out.ok = true;
    return out;
}

SimulationReport run_size_power(const SimConfig& cfg, const RepFunction& rep) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const Matrix L = toeplitz_cholesky(cfg.d, cfg.rho);
    const auto reps = static_cast<std::size_t>(cfg.reps);

    SimulationReport report;
    report.config = cfg;
    report.rep_seeds.resize(reps);
    for (std::size_t r = 0; r < reps; ++r) report.rep_seeds[r] = substream_seed(cfg.seed, r);

    std::vector<RepOutcome> outcomes(reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t r = next++; r < reps; r = next++) {
            try {
                SimDataset sim = generate_with_factor(cfg, L, report.rep_seeds[r]);
                outcomes[r] = rep ? rep(cfg, sim, report.rep_seeds[r]) : run_replication(cfg, sim, report.rep_seeds[r]);
            } catch (const std::exception& e) {
                outcomes[r] = RepOutcome{};
                outcomes[r].error = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(cfg.threads, cfg.reps));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::map<std::string, int> counts;
    int covered = 0;
    double width = 0.0;
    for (const RepOutcome& o : outcomes) {
        if (!o.ok) {
            ++report.failure_count;
            continue;
        }
        ++report.reps_ok;
        for (const auto& [k, v] : o.rejects) counts[k] += v ? 1 : 0;
        covered += o.covered ? 1 : 0;
        width += o.ci_width;
        report.p_values.push_back(o.p_value);
    }
    if (report.failure_count * 10 > cfg.reps || report.reps_ok == 0) {
        std::string first;
        for (const RepOutcome& o : outcomes)
            if (!o.ok) {
                first = o.error;
                break;
            }
        throw TooManyFailures(std::to_string(report.failure_count) + " of " + std::to_string(cfg.reps) +
                              " replications failed; first error: " + first);
    }
    const double ok = static_cast<double>(report.reps_ok);
    for (const auto& [k, c] : counts) report.rates[k] = static_cast<double>(c) / ok;
    auto it = report.rates.find(sim_statistic_name(cfg.statistic));
    report.rejection_rate = it == report.rates.end() ? 0.0 : it->second;
    report.mc_se = std::sqrt(report.rejection_rate * (1.0 - report.rejection_rate) / ok);
    if (cfg.compute_ci) {
        report.coverage_rate = covered / ok;
        report.mean_ci_width = width / ok;
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

double population_partial_information(Index d, double rho) {
    Matrix L = toeplitz_cholesky(d, rho);
    Vector e0 = Vector::Zero(d);
    e0(0) = 1.0;
    Vector x = L.triangularView<Eigen::Lower>().solve(e0);
    // (Sigma^{-1})_00 = ||L^{-1} e0||^2
    return 1.0 / x.squaredNorm();
}

LocalPowerCheck run_local_power_check(const SimConfig& cfg, double c_tilde) {
    if (cfg.family != SimFamily::Linear) throw InvalidArgument("local power check is defined for the linear model");
    if (cfg.d0 != 1) throw InvalidArgument("local power check needs a single interest coordinate");
    SimConfig c = cfg;
    c.theta_true = c_tilde / std::sqrt(static_cast<double>(cfg.n));
    LocalPowerCheck out;
    out.c_tilde = c_tilde;
    out.info = population_partial_information(cfg.d, cfg.rho);
    out.report = run_size_power(c);
    out.empirical_power = out.report.rejection_rate;
    out.predicted_power = local_power(cfg.alpha, c_tilde, out.info);
    return out;
}

}  // namespace descore
