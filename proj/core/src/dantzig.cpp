#include <algorithm>
#include <cmath>
#include <limits>

#include "descore/errors.hpp"
#include "descore/solvers.hpp"

namespace descore {

namespace {

// Largest step in (0, 1] keeping v + alpha * dv >= 0.
double max_step(const Vector& v, const Vector& dv) {
    double a = 1.0;
    for (Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
}

// Vertex refinement: re-solve the equality system implied by the support and
// the active constraints; keep the result only if it is feasible and no worse.
Vector polish(const Matrix& A, const Vector& b, double lambda, const Vector& w) {
    const Index m = A.rows();
    const double scale = std::max(1.0, w.lpNorm<Eigen::Infinity>());
    IndexList T, C;
    for (Index j = 0; j < m; ++j)
        if (std::abs(w(j)) > 1e-9 * scale) T.push_back(j);
    if (T.empty()) return w;
    Vector r = A * w - b;
    std::vector<double> sign;
    for (Index i = 0; i < m; ++i) {
        if (std::abs(r(i)) >= lambda - 1e-7 * std::max(1.0, lambda)) {
            C.push_back(i);
            sign.push_back(r(i) > 0.0 ? 1.0 : -1.0);
        }
    }
    if (C.size() < T.size()) return w;
    Matrix sub(static_cast<Index>(C.size()), static_cast<Index>(T.size()));
    Vector rhs(static_cast<Index>(C.size()));
    for (std::size_t a = 0; a < C.size(); ++a) {
        rhs(static_cast<Index>(a)) = b(C[a]) + lambda * sign[a];
        for (std::size_t k = 0; k < T.size(); ++k) sub(static_cast<Index>(a), static_cast<Index>(k)) = A(C[a], T[k]);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(sub);
    if (qr.rank() < static_cast<Index>(T.size())) return w;
    Vector wt = qr.solve(rhs);
    Vector cand = Vector::Zero(m);
    for (std::size_t k = 0; k < T.size(); ++k) {
        double v = wt(static_cast<Index>(k));
        if (v * w(T[k]) < 0.0) return w;
        cand(T[k]) = v;
    }
    double viol = (b - A * cand).lpNorm<Eigen::Infinity>();
    double base = (b - A * w).lpNorm<Eigen::Infinity>();
    if (viol > std::max(lambda, base) + 1e-12 * std::max(1.0, lambda)) return w;
    if (cand.lpNorm<1>() > w.lpNorm<1>() + 1e-12) return w;
    return cand;
}

}  // namespace

DantzigFit fit_dantzig(const Matrix& A, const Vector& b, double lambda, const DantzigOptions& opts) {
    const Index m = A.rows();
    if (A.cols() != m || b.size() != m) throw DimensionMismatch("Dantzig: A must be square and match b");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("Dantzig: lambda' must be >= 0");
    if (!A.allFinite() || !b.allFinite()) throw DataError("Dantzig: non-finite input");

    DantzigFit out;
    out.lambda_prime = lambda;
    if (m == 0 || b.lpNorm<Eigen::Infinity>() <= lambda) {
        out.w = Vector::Zero(m);
        out.feasibility_gap = m == 0 ? 0.0 : b.lpNorm<Eigen::Infinity>();
        out.converged = true;
        return out;
    }

    // LP: min 1^T (p + q) s.t. A(p - q) <= b + lambda, -A(p - q) <= lambda - b, p, q >= 0.
    const Index rows = 4 * m;
    Vector h(rows);
    h << (b.array() + lambda).matrix(), (lambda - b.array()).matrix(), Vector::Zero(2 * m);
    Vector p = Vector::Ones(m), q = Vector::Ones(m);
    Vector s(rows), z = Vector::Ones(rows);

    auto apply_G = [&](const Vector& xp, const Vector& xq) {
        Vector Au = A * (xp - xq);
        Vector g(rows);
        g << Au, -Au, -xp, -xq;
        return g;
    };
    auto apply_Gt = [&](const Vector& v, Vector& gp, Vector& gq) {
        Vector Ad = A * (v.segment(0, m) - v.segment(m, m));
        gp = Ad - v.segment(2 * m, m);
        gq = -Ad - v.segment(3 * m, m);
    };

    s = (h - apply_G(p, q)).cwiseMax(1.0);
    const double hnorm = 1.0 + h.lpNorm<Eigen::Infinity>();

    bool done = false;
    double best_merit = std::numeric_limits<double>::infinity();
    Vector best_p = p, best_q = q, best_z = z;
    for (int it = 1; it <= opts.max_iter; ++it) {
        out.iterations = it;
        Vector rp = apply_G(p, q) + s - h;
        Vector gp, gq;
        apply_Gt(z, gp, gq);
        Vector rdp = Vector::Ones(m) + gp;
        Vector rdq = Vector::Ones(m) + gq;
        double mu = s.dot(z) / static_cast<double>(rows);

        double pres = rp.lpNorm<Eigen::Infinity>() / hnorm;
        double dres = std::max(rdp.lpNorm<Eigen::Infinity>(), rdq.lpNorm<Eigen::Infinity>());
        double gap = s.dot(z) / (1.0 + (p + q).sum());
        double merit = std::max({pres, dres, gap});
        if (!std::isfinite(merit)) break;
        if (merit < best_merit) {
            best_merit = merit;
            best_p = p;
            best_q = q;
            best_z = z;
        }
        if (pres < 1e-10 && dres < 1e-10 && gap < 1e-10) {
            done = true;
            break;
        }

        // Primal infeasibility certificate: z >= 0, G^T z ~ 0, h^T z < 0.
        double hz = h.dot(z);
        if (hz < 0.0) {
            double gt = std::max(gp.lpNorm<Eigen::Infinity>(), gq.lpNorm<Eigen::Infinity>());
            if (gt <= 1e-8 * -hz) {
                Vector muv = z.segment(0, m) - z.segment(m, m);
                double l1 = muv.lpNorm<1>();
                double bound = l1 > 0.0 ? -b.dot(muv) / l1 : lambda;
                throw Infeasible("Dantzig: no w satisfies ||b - A w||_inf <= lambda'", std::max(0.0, bound - lambda));
            }
        }

        Vector W = z.cwiseQuotient(s);
        Vector D = W.segment(0, m) + W.segment(m, m);
        Matrix M = A * D.asDiagonal() * A;
        Matrix H(2 * m, 2 * m);
        H << M, -M, -M, M;
        H.diagonal().head(m) += W.segment(2 * m, m);
        H.diagonal().tail(m) += W.segment(3 * m, m);
        Eigen::LDLT<Matrix> ldlt(H);
        if (ldlt.info() != Eigen::Success) break;

        auto solve = [&](const Vector& rc, Vector& dp, Vector& dq, Vector& ds, Vector& dz) {
            Vector rt = W.cwiseProduct(rp) + rc.cwiseQuotient(s);
            Vector tp, tq;
            apply_Gt(rt, tp, tq);
            Vector r(2 * m);
            r << -rdp - tp, -rdq - tq;
            Vector x = ldlt.solve(r);
            x += ldlt.solve(r - H * x);
            dp = x.head(m);
            dq = x.tail(m);
            dz = W.cwiseProduct(apply_G(dp, dq) + rp) + rc.cwiseQuotient(s);
            ds = (rc - s.cwiseProduct(dz)).cwiseQuotient(z);
        };

        Vector dp, dq, ds, dz;
        Vector rc = -s.cwiseProduct(z);
        solve(rc, dp, dq, ds, dz);
        double a_aff = std::min(max_step(s, ds), max_step(z, dz));
        double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(rows);
        double sigma = std::pow(mu_aff / mu, 3.0);

        rc = -s.cwiseProduct(z) - ds.cwiseProduct(dz) + Vector::Constant(rows, sigma * mu);
        solve(rc, dp, dq, ds, dz);
        double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
        p += alpha * dp;
        q += alpha * dq;
        s += alpha * ds;
        z += alpha * dz;
    }

    p = best_p;
    q = best_q;
    z = best_z;
    Vector w = p - q;
    for (Index j = 0; j < m; ++j)
        if (std::abs(w(j)) < 1e-10 * std::max(1.0, w.lpNorm<Eigen::Infinity>())) w(j) = 0.0;
    if ((b - A * w).lpNorm<Eigen::Infinity>() > (b - A * (p - q)).lpNorm<Eigen::Infinity>() + 1e-12)
        w = p - q;
    w = polish(A, b, lambda, w);

    Vector muv = z.segment(0, m) - z.segment(m, m);
    double dual_scale = std::max(1.0, (A * muv).lpNorm<Eigen::Infinity>());
    muv /= dual_scale;
    double dual = -b.dot(muv) - lambda * muv.lpNorm<1>();

    out.w = std::move(w);
    out.feasibility_gap = (b - A * out.w).lpNorm<Eigen::Infinity>();
    out.duality_gap = std::max(0.0, out.w.lpNorm<1>() - dual);
    out.converged = (done || best_merit < 1e-8) && out.duality_gap <= opts.tol && out.feasibility_gap <= lambda + opts.tol;
    return out;
}

}  // namespace descore
