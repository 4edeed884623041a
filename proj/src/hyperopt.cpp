#include "intel/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace intel {
namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Objective {
    Eigen::Map<const Eigen::VectorXd> ts;
    Eigen::Map<const Eigen::VectorXd> ys;
    MeanFunction<double> mean;
    KernelKind kind;
    double bound;

    bool inside(const Vec3& p) const { return (p.array().abs() <= bound).all(); }

    // Returns false when the point is infeasible or the factorization fails.
    bool eval(const Vec3& p, double& value, Vec3& grad) const {
        if (!inside(p)) return false;
        try {
            const auto r = lml_value_and_gradient(Hyperparameters<double>::from_log(kind, p), mean,
                                                  Eigen::Ref<const Eigen::VectorXd>(ts),
                                                  Eigen::Ref<const Eigen::VectorXd>(ys));
            if (!std::isfinite(r.value) || !r.gradient.allFinite()) return false;
            value = r.value;
            grad = r.gradient;
            return true;
        } catch (const NumericalFailure&) {
            return false;
        }
    }
};

double sample_std(std::span<const double> ys) {
    const double n = static_cast<double>(ys.size());
    const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double ss = 0.0;
    for (double y : ys) ss += (y - mean) * (y - mean);
    return std::sqrt(ss / std::max(1.0, n - 1.0));
}

}  // namespace

Hyperparameters<double> heuristic_start(std::span<const double> ts, std::span<const double> ys, KernelKind kind) {
    double sd = sample_std(ys);
    if (!(sd > 0.0)) sd = 1e-3;
    const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
    double span = *hi - *lo;
    if (!(span > 0.0)) span = 10.0;
    Hyperparameters<double> h;
    h.kernel.kind = kind;
    h.kernel.signal_scale = sd;
    h.kernel.length_scale = span / 10.0;
    h.noise_scale = 0.1 * sd;
    return h;
}

FitResult maximize_lml(std::span<const double> ts, std::span<const double> ys, double mean_const,
                       const Hyperparameters<double>& start, const FitOptions& options) {
    const Objective obj{Eigen::Map<const Eigen::VectorXd>(ts.data(), static_cast<Eigen::Index>(ts.size())),
                        Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())),
                        MeanFunction<double>{mean_const}, options.kernel, options.log_bound};

    Vec3 p = start.log_params().cwiseMax(-options.log_bound).cwiseMin(options.log_bound);
    double f = 0.0;
    Vec3 g;
    if (!obj.eval(p, f, g)) throw NumericalFailure("lml evaluation failed at the start point");

    FitResult result;
    result.trace.push_back(f);
    // Inverse Hessian approximation of -LML.
    Mat3 h_inv = Mat3::Identity();
    bool scaled = false;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (g.norm() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        Vec3 dir = h_inv * g;
        if (dir.dot(g) <= 0.0) {
            h_inv.setIdentity();
            dir = g;
        }
        double step = scaled ? 1.0 : std::min(1.0, 1.0 / g.norm());

        // Backtracking with the Armijo condition on the ascent objective.
        const double slope = g.dot(dir);
        Vec3 p_new;
        Vec3 g_new;
        double f_new = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
            p_new = p + step * dir;
            if (obj.eval(p_new, f_new, g_new) && f_new >= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        result.iterations = iter + 1;
        if (!accepted) {
            result.converged = g.norm() < 1e-4;
            break;
        }

        const Vec3 s = p_new - p;
        // curvature pair for the minimization of -LML
        const Vec3 y = g - g_new;
        const double improvement = f_new - f;
        p = p_new;
        f = f_new;
        g = g_new;
        result.trace.push_back(f);

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                h_inv = Mat3::Identity() * (sy / y.squaredNorm());
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Mat3 left = Mat3::Identity() - rho * s * y.transpose();
            h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
        }

        if (g.norm() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        if (improvement < options.improvement_tolerance) {
            result.converged = g.norm() < 1e-4;
            break;
        }
    }

    result.hyper = Hyperparameters<double>::from_log(options.kernel, p);
    result.lml = log_marginal_likelihood(result.hyper, MeanFunction<double>{mean_const},
                                         Eigen::Ref<const Eigen::VectorXd>(obj.ts),
                                         Eigen::Ref<const Eigen::VectorXd>(obj.ys));
    return result;
}

FitResult fit_template(std::span<const double> ts, std::span<const double> ys, double mean_const,
                       const FitOptions& options) {
    if (ts.size() != ys.size()) throw std::invalid_argument("fit_template: ts and ys differ in length");
    if (ts.size() < 8) throw std::invalid_argument("fit_template: need at least 8 points");
    if (options.starts < 1) throw std::invalid_argument("fit_template: need at least one start");

    const Hyperparameters<double> base = heuristic_start(ts, ys, options.kernel);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);

    FitResult best;
    bool have_best = false;
    for (int s = 0; s < options.starts; ++s) {
        Vec3 p = base.log_params();
        if (s > 0) {
            for (int k = 0; k < 3; ++k) p(k) += jitter(rng);
        }
        try {
            FitResult r = maximize_lml(ts, ys, mean_const, Hyperparameters<double>::from_log(options.kernel, p), options);
            if (!have_best || r.lml > best.lml) {
                best = std::move(r);
                have_best = true;
            }
        } catch (const NumericalFailure&) {
            continue;
        }
    }
    if (!have_best) throw FitFailure("every optimizer start failed numerically");
    return best;
}

}  // namespace intel
