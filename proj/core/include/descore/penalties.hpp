#pragma once

#include <string>

namespace descore {

enum class PenaltyKind { L1, SCAD, MCP };

struct PenaltyConfig {
    PenaltyKind kind = PenaltyKind::L1;
    double lambda = 0.0;
    double a = 3.7;  // SCAD shape, a > 2
    double b = 2.0;  // MCP shape, b > 0

    static PenaltyConfig l1(double lambda);
    static PenaltyConfig scad(double lambda, double a = 3.7);
    static PenaltyConfig mcp(double lambda, double b = 2.0);

    PenaltyConfig with_lambda(double l) const;
    void validate() const;
    bool convex() const { return kind == PenaltyKind::L1; }
};

PenaltyKind penalty_kind_from_name(const std::string& name);
std::string penalty_kind_name(PenaltyKind kind);

/// p_lambda(|t|) in closed form.
double penalty_value(const PenaltyConfig& cfg, double t);

/// argmin_t 0.5 * curvature * t^2 - z * t + p_lambda(t).
/// Equivalent to 0.5 * curvature * (t - z / curvature)^2 + p_lambda(t).
/// Ties between candidate minimizers go to the smaller |t|.
double univariate_prox(const PenaltyConfig& cfg, double z, double curvature);

double soft_threshold(double z, double lambda);

}  // namespace descore
