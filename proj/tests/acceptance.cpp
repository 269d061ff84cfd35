// Acceptance runs. One PASS/FAIL line per criterion; exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <descore/bootstrap.hpp>
#include <descore/decorrelate.hpp>
#include <descore/inference.hpp>
#include <descore/penalties.hpp>
#include <descore/simulation.hpp>
#include <descore/solvers.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "helpers.hpp"

using namespace descore;
using namespace testutil;

namespace {

// Tolerances and bands.
constexpr double kSizeLo = 0.026, kSizeHi = 0.074;         // 1, 3
constexpr double kLargeDLo = 0.020, kLargeDHi = 0.080;     // 2
constexpr double kMinutes2 = 30.0, kMinutes3 = 20.0;
constexpr double kPowerAtHalf = 0.5, kMonotoneSlack = 0.03;  // 4
constexpr double kLocalPowerOracle = 0.79955687143565137;    // psi_0.05 at c = 2.8, I = 1
constexpr double kLocalPowerTol = 0.05;                      // 5
constexpr double kCoverLo = 0.925, kCoverHi = 0.975;          // 6
constexpr double kEquivTol = 1e-10;                           // 7
constexpr double kGroupLo = 0.02, kGroupHi = 0.085;           // 8
constexpr double kSandwichLo = 0.02, kSandwichHi = 0.09;      // 9
constexpr double kPropertySeconds = 120.0;                    // 10

int g_threads = 1;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

SimConfig table1() {
    SimConfig c;
    c.n = 200;
    c.d = 100;
    c.rho = 0.25;
    c.s = 2;
    c.pattern = BetaPattern::Dirac;
    c.reps = 500;
    c.alpha = 0.05;
    c.seed = 101;
    c.threads = g_threads;
    c.statistic = SimStatistic::ModelInfo;
    return c;
}

std::string failures(const SimulationReport& r) {
    return r.failure_count ? fmt(", %d failed reps", r.failure_count) : std::string();
}

// Shared runs, computed on first use.
std::optional<SimulationReport> g_table1;
std::vector<SimulationReport> g_grid;

const SimulationReport& table1_run() {
    if (!g_table1) {
        SimConfig c = table1();
        c.compute_ci = true;
        g_table1 = run_size_power(c);
    }
    return *g_table1;
}

const std::vector<double> kGrid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};

const std::vector<SimulationReport>& grid_runs() {
    if (g_grid.empty()) {
        for (double theta : kGrid) {
            SimConfig c = table1();
            c.theta_true = theta;
            c.compute_all = false;
            c.compute_ci = theta == 0.5;
            g_grid.push_back(run_size_power(c));
        }
    }
    return g_grid;
}

Outcome criterion1() {
    const SimulationReport& r = table1_run();
    std::ostringstream others;
    for (const auto& [k, v] : r.rates)
        if (k != "model_info") others << ' ' << k << '=' << v;
    return {within(r.rejection_rate, kSizeLo, kSizeHi),
            fmt("size %.3f in [%.3f, %.3f] (%d reps, %.0f s%s; also%s)", r.rejection_rate, kSizeLo, kSizeHi,
                r.reps_ok, r.wall_time, failures(r).c_str(), others.str().c_str())};
}

Outcome criterion2() {
    SimConfig c = table1();
    c.d = 500;
    c.s = 3;
    c.seed = 102;
    c.compute_all = false;
    SimulationReport r = run_size_power(c);
    double minutes = r.wall_time / 60.0;
    return {within(r.rejection_rate, kLargeDLo, kLargeDHi) && minutes <= kMinutes2,
            fmt("size %.3f in [%.3f, %.3f], %.1f min <= %.0f (%d reps%s)", r.rejection_rate, kLargeDLo, kLargeDHi,
                minutes, kMinutes2, r.reps_ok, failures(r).c_str())};
}

Outcome criterion3() {
    SimConfig c = table1();
    c.family = SimFamily::Logistic;
    c.tuning.cv_lambda_prime = true;
    c.seed = 103;
    c.compute_all = false;
    SimulationReport r = run_size_power(c);
    double minutes = r.wall_time / 60.0;
    return {within(r.rejection_rate, kSizeLo, kSizeHi) && minutes <= kMinutes3,
            fmt("size %.3f in [%.3f, %.3f], %.1f min <= %.0f (%d reps%s)", r.rejection_rate, kSizeLo, kSizeHi,
                minutes, kMinutes3, r.reps_ok, failures(r).c_str())};
}

Outcome criterion4() {
    const auto& runs = grid_runs();
    const SimulationReport& size = table1_run();
    std::vector<double> p;
    for (const auto& r : runs) p.push_back(r.rejection_rate);
    bool equal0 = p.front() == size.rejection_rate;
    bool high = p.back() > kPowerAtHalf;
    bool mono = true;
    std::vector<double> smooth;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) smooth.push_back(0.5 * (p[k] + p[k + 1]));
    for (std::size_t k = 1; k < smooth.size(); ++k)
        if (smooth[k] < smooth[k - 1] - kMonotoneSlack) mono = false;
    std::ostringstream curve;
    for (std::size_t k = 0; k < p.size(); ++k) curve << (k ? " " : "") << kGrid[k] << ':' << p[k];
    return {equal0 && high && mono,
            fmt("power {%s}; at 0 equals size %s; at 0.5 > %.1f %s; smoothed nondecreasing (+-%.2f) %s",
                curve.str().c_str(), equal0 ? "yes" : "no", kPowerAtHalf, high ? "yes" : "no", kMonotoneSlack,
                mono ? "yes" : "no")};
}

Outcome criterion5() {
    SimConfig c = table1();
    c.rho = 0.0;
    c.n = 400;
    c.seed = 105;
    c.compute_all = false;
    LocalPowerCheck lp = run_local_power_check(c, 2.8);
    double formula = local_power(0.05, 2.8, 1.0);
    bool formula_ok = std::abs(formula - kLocalPowerOracle) < 1e-12 && lp.info == 1.0;
    bool ok = formula_ok && std::abs(lp.empirical_power - kLocalPowerOracle) <= kLocalPowerTol;
    return {ok, fmt("power %.3f vs psi %.6f (+-%.2f); formula matches oracle %s (%d reps%s)", lp.empirical_power,
                    kLocalPowerOracle, kLocalPowerTol, formula_ok ? "yes" : "no", lp.report.reps_ok,
                    failures(lp.report).c_str())};
}

Outcome criterion6() {
    double c0 = table1_run().coverage_rate;
    double c5 = grid_runs().back().coverage_rate;
    return {within(c0, kCoverLo, kCoverHi) && within(c5, kCoverLo, kCoverHi),
            fmt("coverage %.3f at theta=0, %.3f at theta=0.5, band [%.3f, %.3f]", c0, c5, kCoverLo, kCoverHi)};
}

Outcome criterion7() {
    std::mt19937_64 rng(107);
    std::uniform_int_distribution<int> nd(30, 200), dd(3, 150);
    double worst = 0.0;
    int done = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Index n = nd(rng), d = dd(rng);
        Matrix Q = random_matrix(n, d, rng);
        Vector beta = Vector::Zero(d);
        for (Index j = 1; j < std::min<Index>(d, 4); ++j) beta(j) = 1.0 / static_cast<double>(j);
        Vector y = draw_response("gaussian", Q, beta, rng);
        Dataset ds(y, Q, {0});
        TuningPolicy t;
        t.seed = static_cast<std::uint64_t>(rep);
        DirectionMethod m = rep % 2 ? DirectionMethod::Dantzig : DirectionMethod::LassoQuadratic;
        DecorrelatedFit fit = build_decorrelated_fit(ds, ModelFamily::gaussian(1.0), PenaltyConfig{}, m, t);
        double tilde = score_test_unknown_sigma(ds, fit).statistic;
        double s2 = residual_variance(ds, fit.beta_hat);
        double hat = score_test(reevaluate_fit(ds, ModelFamily::gaussian(s2), fit), n).statistic;
        worst = std::max(worst, std::abs(tilde - hat));
        ++done;
    }
    return {done == 100 && worst < kEquivTol, fmt("max |U~ - U^(sigma-hat)| = %.2e < %.0e over %d instances", worst,
                                                  kEquivTol, done)};
}

Outcome criterion8() {
    SimConfig c = table1();
    c.d0 = 10;
    c.reps = 300;
    c.seed = 108;
    c.statistic = SimStatistic::Bootstrap;
    c.bootstrap_B = 1000;
    c.compute_all = false;
    SimulationReport r = run_size_power(c);
    return {within(r.rejection_rate, kGroupLo, kGroupHi),
            fmt("family-wise size %.3f in [%.3f, %.3f] (%d reps, B=1000, %.0f s%s)", r.rejection_rate, kGroupLo,
                kGroupHi, r.reps_ok, r.wall_time, failures(r).c_str())};
}

Outcome criterion9() {
    SimConfig c = table1();
    c.noise = NoiseKind::Heteroscedastic;
    c.hetero_column = 1;
    c.seed = 109;
    c.statistic = SimStatistic::Sandwich;
    SimulationReport r = run_size_power(c);
    double model = r.rates.count("model_info") ? r.rates.at("model_info") : std::nan("");
    return {within(r.rejection_rate, kSandwichLo, kSandwichHi),
            fmt("sandwich size %.3f in [%.3f, %.3f]; model-based size %.3f (reported only; %d reps%s)",
                r.rejection_rate, kSandwichLo, kSandwichHi, model, r.reps_ok, failures(r).c_str())};
}

// Property suite --------------------------------------------------------------

struct Suite {
    std::vector<std::string> failed;
    void check(bool ok, const std::string& what) {
        if (!ok) failed.push_back(what);
    }
};

void lasso_kkt(Suite& s) {
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> nd(20, 80), dd(5, 120);
    for (int rep = 0; rep < 100; ++rep) {
        Index n = nd(rng), d = dd(rng);
        Matrix Q = random_matrix(n, d, rng);
        Vector beta = Vector::Zero(d);
        for (Index j = 0; j < std::min<Index>(3, d); ++j) beta(j) = 1.0;
        Vector y = draw_response("gaussian", Q, beta, rng);
        Dataset ds(y, Q, {0});
        ModelFamily f = ModelFamily::gaussian(1.0);
        double lmax = (Q.transpose() * y).lpNorm<Eigen::Infinity>() / static_cast<double>(n);
        double lambda = lmax * std::pow(0.03, (rep % 10) / 9.0);
        SolverConfig cfg;
        cfg.tol = 1e-10;
        cfg.max_iter = 100000;
        PenalizedFit fit = fit_lasso(ds, f, PenaltyConfig::l1(lambda), cfg);
        s.check(fit.converged && lasso_kkt_violation(Q, y, f, fit.beta, lambda) < 1e-7,
                fmt("lasso KKT instance %d", rep));
    }
}

void dantzig_feasibility(Suite& s) {
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<int> md(5, 60);
    std::uniform_real_distribution<double> frac(0.05, 0.9);
    for (int rep = 0; rep < 100; ++rep) {
        Index m = md(rng);
        Matrix X = random_matrix(80, m, rng);
        Matrix A = X.transpose() * X / 80.0;
        Vector b = A * random_vector(m, rng) * 0.2 + random_vector(m, rng) * 0.05;
        double lambda = frac(rng) * b.lpNorm<Eigen::Infinity>();
        DantzigFit f = fit_dantzig(A, b, lambda);
        double gap = (b - A * f.w).lpNorm<Eigen::Infinity>();
        s.check(f.converged && gap <= lambda + 1e-7 && f.duality_gap < 1e-6, fmt("Dantzig instance %d", rep));
    }
}

void finite_differences(Suite& s) {
    std::mt19937_64 rng(1003);
    const std::pair<ModelFamily, const char*> fams[] = {{ModelFamily::gaussian(1.7), "gaussian"},
                                                        {ModelFamily::logistic(), "logistic"},
                                                        {ModelFamily::poisson(), "poisson"}};
    for (int rep = 0; rep < 10; ++rep) {
        for (const auto& [f, name] : fams) {
            Matrix Q = random_matrix(25, 5, rng, 0.5);
            Vector beta = random_vector(5, rng, 0.4);
            Dataset ds(draw_response(name, Q, beta, rng), Q, {0});
            Vector b0 = beta + random_vector(5, rng, 0.1);
            Vector g = score(ds, f, b0), gfd(5);
            Matrix H = hessian(ds, f, b0), Hfd(5, 5);
            for (Index j = 0; j < 5; ++j) {
                Vector up = b0, dn = b0;
                up(j) += 1e-6;
                dn(j) -= 1e-6;
                gfd(j) = (neg_log_likelihood(ds, f, up) - neg_log_likelihood(ds, f, dn)) / 2e-6;
                up = b0;
                dn = b0;
                up(j) += 1e-5;
                dn(j) -= 1e-5;
                Hfd.col(j) = (score(ds, f, up) - score(ds, f, dn)) / 2e-5;
            }
            s.check((g - gfd).norm() / std::max(1e-3, g.norm()) < 1e-5, fmt("gradient %s rep %d", name, rep));
            s.check((H - Hfd).norm() / std::max(1e-3, H.norm()) < 1e-4, fmt("hessian %s rep %d", name, rep));
        }
    }
}

void prox_grid(Suite& s) {
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> zd(-4.0, 4.0), cd(0.2, 3.0), ld(0.1, 1.5);
    auto obj = [](const PenaltyConfig& c, double z, double curv, double t) {
        return 0.5 * curv * t * t - z * t + penalty_value(c, t);
    };
    for (int rep = 0; rep < 40; ++rep) {
        double lam = ld(rng), z = zd(rng), curv = cd(rng);
        for (const PenaltyConfig& c :
             {PenaltyConfig::l1(lam), PenaltyConfig::scad(lam, 3.7), PenaltyConfig::mcp(lam, 2.0)}) {
            double hi = std::max(2.0 * std::abs(z) / curv, 1e-3), best = obj(c, z, curv, 0.0);
            for (double t = -hi; t <= hi; t += 1e-5) best = std::min(best, obj(c, z, curv, t));
            double t = univariate_prox(c, z, curv);
            s.check(obj(c, z, curv, t) <= best + 1e-8, fmt("prox rep %d", rep));
        }
    }
}

void profile_score(Suite& s) {
    std::mt19937_64 rng(1005);
    for (const char* fam : {"gaussian", "logistic"}) {
        Matrix Q = random_matrix(150, 5, rng);
        Vector beta(5);
        beta << 0.2, 0.5, -0.4, 0.0, 0.3;
        Vector y = draw_response(fam, Q, beta, rng);
        Dataset ds(y, Q, {0});
        ModelFamily f = family_from_name(fam);
        Vector theta = Vector::Constant(1, 0.1);
        SolverConfig cfg;
        cfg.tol = 1e-14;
        cfg.max_iter = 100000;
        FitOptions opts;
        opts.offset = ds.interest_columns() * theta;
        Vector gamma = fit_penalized(ds.nuisance_columns(), y, f, PenaltyConfig::l1(0.0), cfg, opts).beta;
        // Profile score: d/dtheta of the loss at (theta, gamma(theta)).
        double profile = score(ds, f, ds.assemble(theta, gamma))(0);
        for (int k = 0; k < 3; ++k) {
            Vector sc = decorrelated_score(ds, f, theta, gamma, random_matrix(4, 1, rng));
            s.check(std::abs(sc(0) - profile) < 1e-8, fmt("profile score %s", fam));
        }
    }
}

void one_step_forms(Suite& s) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(2000 + seed);
        Matrix Q = random_matrix(100, 20, rng);
        Vector beta = Vector::Zero(20);
        beta(0) = 0.4;
        beta(1) = 1.0;
        beta(2) = -0.5;
        Dataset ds(draw_response("gaussian", Q, beta, rng), Q, {0});
        TuningPolicy t;
        t.seed = seed;
        DecorrelatedFit fit = build_decorrelated_fit(ds, ModelFamily::gaussian(1.0), PenaltyConfig{},
                                                     DirectionMethod::LassoQuadratic, t);
        double generic = one_step(fit, 100).theta_tilde;
        double closed = one_step_linear_closed_form(ds, ds.gamma_of(fit.beta_hat), fit.w.col(0));
        s.check(rel_err(generic, closed) < 1e-10, fmt("one-step seed %d", static_cast<int>(seed)));
    }
}

void bootstrap_d0_one(Suite& s) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(3000 + seed);
        Matrix Q = random_matrix(120, 30, rng);
        Vector beta = Vector::Zero(30);
        beta(1) = 1.0;
        Dataset ds(draw_response("gaussian", Q, beta, rng), Q, {0});
        TuningPolicy t;
        t.seed = seed;
        DecorrelatedFit fit = build_decorrelated_fit(ds, ModelFamily::gaussian(1.0), PenaltyConfig{},
                                                     DirectionMethod::LassoQuadratic, t);
        double u = score_test(fit, 120).statistic;
        double tg = group_statistic(fit, 120, true).t_stat;
        s.check(std::abs(tg - std::abs(u)) < 1e-10, fmt("d0=1 bootstrap seed %d", static_cast<int>(seed)));
        GroupTestResult g = group_test(fit, 120, 0.05, 200, seed, true);
        s.check(std::abs(g.t_stat - std::abs(u)) < 1e-10, fmt("d0=1 group test seed %d", static_cast<int>(seed)));
    }
}

void determinism(Suite& s) {
    SimConfig c = table1();
    c.n = 80;
    c.d = 40;
    c.reps = 12;
    c.seed = 1010;
    c.compute_all = true;
    c.threads = 1;
    SimulationReport a = run_size_power(c);
    c.threads = 3;
    SimulationReport b = run_size_power(c);
    s.check(a.p_values == b.p_values && a.rates == b.rates, "simulation determinism across thread counts");

    std::mt19937_64 rng(1011);
    Matrix Q = random_matrix(60, 30, rng);
    Vector beta = Vector::Zero(30);
    beta(0) = 1.0;
    Dataset ds(draw_response("gaussian", Q, beta, rng), Q, {0});
    TuningPolicy t;
    t.seed = 5;
    t.cv_lambda_prime = true;
    auto fit = [&] {
        return build_decorrelated_fit(ds, ModelFamily::gaussian(1.0), PenaltyConfig{}, DirectionMethod::Dantzig, t);
    };
    DecorrelatedFit f1 = fit(), f2 = fit();
    s.check(f1.s_hat == f2.s_hat && f1.w == f2.w && f1.lambda == f2.lambda, "fit determinism");
    s.check(multiplier_bootstrap(f1.per_obs, 50, 9) == multiplier_bootstrap(f1.per_obs, 50, 9),
            "bootstrap determinism");
}

Outcome criterion10() {
    const auto t0 = std::chrono::steady_clock::now();
    Suite s;
    const std::pair<const char*, std::function<void(Suite&)>> parts[] = {
        {"lasso KKT", lasso_kkt},
        {"Dantzig feasibility", dantzig_feasibility},
        {"finite differences", finite_differences},
        {"prox grid", prox_grid},
        {"profile score", profile_score},
        {"one-step forms", one_step_forms},
        {"d0=1 bootstrap", bootstrap_d0_one},
        {"determinism", determinism},
    };
    for (const auto& [name, run] : parts) {
        try {
            run(s);
        } catch (const std::exception& e) {
            s.failed.push_back(std::string(name) + " threw: " + e.what());
        }
    }
    double secs = seconds_since(t0);
    std::string detail = fmt("8 suites in %.1f s (limit %.0f s)", secs, kPropertySeconds);
    if (!s.failed.empty()) detail += fmt("; %zu failures, first: %s", s.failed.size(), s.failed.front().c_str());
    return {s.failed.empty() && secs < kPropertySeconds, detail};
}

}  // namespace

int main(int argc, char** argv) {
    unsigned hw = std::thread::hardware_concurrency();
    g_threads = hw ? static_cast<int>(hw) : 1;
    if (const char* env = std::getenv("DESCORE_THREADS")) g_threads = std::max(1, std::atoi(env));

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"linear size (n=200, d=100)", criterion1},
        {"linear size (d=500, s=3)", criterion2},
        {"logistic size", criterion3},
        {"power curve", criterion4},
        {"local power", criterion5},
        {"one-step CI coverage", criterion6},
        {"unknown-variance equivalence", criterion7},
        {"group bootstrap size (d0=10)", criterion8},
        {"sandwich under heteroscedasticity", criterion9},
        {"property suites", criterion10},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        int k = std::atoi(argv[i]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 2;
        }
        selected.insert(k);
    }

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
