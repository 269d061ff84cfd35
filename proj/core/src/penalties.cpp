#include "descore/penalties.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "descore/errors.hpp"

namespace descore {

PenaltyConfig PenaltyConfig::l1(double lambda) {
    PenaltyConfig c;
    c.kind = PenaltyKind::L1;
    c.lambda = lambda;
    c.validate();
    return c;
}

PenaltyConfig PenaltyConfig::scad(double lambda, double a) {
    PenaltyConfig c;
    c.kind = PenaltyKind::SCAD;
    c.lambda = lambda;
    c.a = a;
    c.validate();
    return c;
}

PenaltyConfig PenaltyConfig::mcp(double lambda, double b) {
    PenaltyConfig c;
    c.kind = PenaltyKind::MCP;
    c.lambda = lambda;
    c.b = b;
    c.validate();
    return c;
}

PenaltyConfig PenaltyConfig::with_lambda(double l) const {
    PenaltyConfig c = *this;
    c.lambda = l;
    c.validate();
    return c;
}

void PenaltyConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("penalty lambda must be finite and >= 0");
    if (kind == PenaltyKind::SCAD && !(a > 2.0)) throw InvalidArgument("SCAD requires a > 2");
    if (kind == PenaltyKind::MCP && !(b > 0.0)) throw InvalidArgument("MCP requires b > 0");
}

PenaltyKind penalty_kind_from_name(const std::string& name) {
    if (name == "l1" || name == "lasso") return PenaltyKind::L1;
    if (name == "scad") return PenaltyKind::SCAD;
    if (name == "mcp") return PenaltyKind::MCP;
    throw InvalidArgument("unknown penalty '" + name + "'");
}

std::string penalty_kind_name(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::L1: return "l1";
        case PenaltyKind::SCAD: return "scad";
        case PenaltyKind::MCP: return "mcp";
    }
    return "unknown";
}

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

double penalty_value(const PenaltyConfig& cfg, double t) {
    const double x = std::abs(t);
    const double l = cfg.lambda;
    switch (cfg.kind) {
        case PenaltyKind::L1: return l * x;
        case PenaltyKind::SCAD:
            if (x <= l) return l * x;
            if (x <= cfg.a * l) return (2.0 * cfg.a * l * x - x * x - l * l) / (2.0 * (cfg.a - 1.0));
            return 0.5 * l * l * (cfg.a + 1.0);
        case PenaltyKind::MCP:
            if (x <= cfg.b * l) return l * x - x * x / (2.0 * cfg.b);
            return 0.5 * cfg.b * l * l;
    }
    return 0.0;
}

namespace {

// Penalty restricted to [lo, hi] as p2 t^2 + p1 t + p0.
struct Piece {
    double lo, hi, p2, p1, p0;
};

}  // namespace

double univariate_prox(const PenaltyConfig& cfg, double z, double curvature) {
    if (!(curvature > 0.0)) throw InvalidArgument("prox curvature must be positive");
    if (cfg.kind == PenaltyKind::L1) return soft_threshold(z, cfg.lambda) / curvature;

    const double az = std::abs(z);
    const double l = cfg.lambda;
    const double inf = std::numeric_limits<double>::infinity();
    std::array<Piece, 3> pieces{};
    std::size_t count = 0;
    if (cfg.kind == PenaltyKind::SCAD) {
        const double a = cfg.a;
        pieces[count++] = {0.0, l, 0.0, l, 0.0};
        pieces[count++] = {l, a * l, -1.0 / (2.0 * (a - 1.0)), a * l / (a - 1.0), -l * l / (2.0 * (a - 1.0))};
        pieces[count++] = {a * l, inf, 0.0, 0.0, 0.5 * l * l * (a + 1.0)};
    } else {
        const double b = cfg.b;
        pieces[count++] = {0.0, b * l, -1.0 / (2.0 * b), l, 0.0};
        pieces[count++] = {b * l, inf, 0.0, 0.0, 0.5 * b * l * l};
    }

    auto objective = [&](double t) { return 0.5 * curvature * t * t - az * t + penalty_value(cfg, t); };

    std::array<double, 9> cand{};
    std::size_t nc = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const Piece& p = pieces[k];
        cand[nc++] = p.lo;
        if (std::isfinite(p.hi)) cand[nc++] = p.hi;
        double q = 0.5 * curvature + p.p2;
        if (q > 0.0) {
            double t = (az - p.p1) / (2.0 * q);
            if (t > p.lo && t < p.hi) cand[nc++] = t;
        }
    }
    std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(nc));

    double best_t = 0.0;
    double best_f = objective(0.0);
    for (std::size_t k = 0; k < nc; ++k) {
        double f = objective(cand[k]);
        double slack = 1e-14 * std::max(1.0, std::abs(best_f));
        if (f < best_f - slack) {
            best_f = f;
            best_t = cand[k];
        }
    }
    return z < 0.0 ? -best_t : best_t;
}

}  // namespace descore
