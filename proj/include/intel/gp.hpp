#ifndef INTEL_GP_HPP
#define INTEL_GP_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "intel/kernel.hpp"

namespace intel {

/// Raised when a covariance matrix cannot be factorized even after jitter escalation.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kVarFloor = 1e-12;

/// Kernel hyperparameters plus observation noise scale.
template <typename Scalar = double>
struct Hyperparameters {
    KernelSpec<Scalar> kernel;
    Scalar noise_scale = Scalar(0.1);

    bool valid() const { return kernel.valid() && noise_scale > Scalar(0); }

    /// (log signal, log length, log noise)
    Eigen::Matrix<Scalar, 3, 1> log_params() const {
        using std::log;
        return {log(kernel.signal_scale), log(kernel.length_scale), log(noise_scale)};
    }

    static Hyperparameters from_log(KernelKind kind, const Eigen::Matrix<Scalar, 3, 1>& p) {
        using std::exp;
        Hyperparameters h;
        h.kernel.kind = kind;
        h.kernel.signal_scale = exp(p(0));
        h.kernel.length_scale = exp(p(1));
        h.noise_scale = exp(p(2));
        return h;
    }

    friend bool operator==(const Hyperparameters& a, const Hyperparameters& b) {
        return a.kernel.kind == b.kernel.kind && a.kernel.signal_scale == b.kernel.signal_scale &&
               a.kernel.length_scale == b.kernel.length_scale && a.noise_scale == b.noise_scale;
    }
};

/// Constant mean function.
template <typename Scalar = double>
struct MeanFunction {
    Scalar constant = Scalar(0);
    Scalar operator()(Scalar /*t*/) const { return constant; }
};

/// Gaussian one-step forecast.
template <typename Scalar = double>
struct PredictiveDistribution {
    Scalar mean = Scalar(0);
    Scalar variance = Scalar(1);

    Scalar stddev() const {
        using std::sqrt;
        return sqrt(variance);
    }
};

/// Cholesky factor of a symmetric positive definite matrix together with the
/// diagonal jitter that was needed to obtain it.
template <typename Scalar>
struct JitteredCholesky {
    Eigen::LLT<Matrix<Scalar>> llt;
    Scalar jitter = Scalar(0);
};

/// Factorizes `v`, adding diagonal jitter 1e-10, 1e-9, ..., 1e-6 on successive
/// failures. Throws NumericalFailure if all attempts fail.
template <typename Scalar>
JitteredCholesky<Scalar> jittered_cholesky(const Matrix<Scalar>& v) {
    JitteredCholesky<Scalar> out;
    out.llt.compute(v);
    if (out.llt.info() == Eigen::Success) return out;
    Scalar jitter = Scalar(1e-10);
    for (int attempt = 0; attempt < 5; ++attempt, jitter *= Scalar(10)) {
        Matrix<Scalar> vj = v;
        vj.diagonal().array() += jitter;
        out.llt.compute(vj);
        if (out.llt.info() == Eigen::Success) {
            out.jitter = jitter;
            return out;
        }
    }
    throw NumericalFailure("cholesky factorization failed after jitter escalation (n=" +
                           std::to_string(v.rows()) + ")");
}

/**
 * One-step predictive distribution of a noisy observation at `t_star`.
 *
 * The returned variance is that of the observation y*, i.e. it includes the
 * noise term. With no training data this is the prior N(C, k(t*,t*) + sn^2).
 * The variance is floored at kVarFloor.
 */
template <typename Scalar>
PredictiveDistribution<Scalar> gp_predict(const Eigen::Ref<const Vector<Scalar>>& train_t,
                                          const Eigen::Ref<const Vector<Scalar>>& train_y,
                                          const MeanFunction<Scalar>& mean,
                                          const Hyperparameters<Scalar>& hyper, Scalar t_star) {
    if (train_t.size() != train_y.size()) {
        throw std::invalid_argument("gp_predict: train_t and train_y differ in length");
    }
    const Scalar noise2 = hyper.noise_scale * hyper.noise_scale;
    const Scalar prior = kernel_eval(hyper.kernel, t_star, t_star);
    PredictiveDistribution<Scalar> out{mean(t_star), prior + noise2};
    if (train_t.size() > 0) {
        const auto chol = jittered_cholesky<Scalar>(noisy_covariance(hyper.kernel, train_t, hyper.noise_scale));
        const Vector<Scalar> k_star = cross_covariance(hyper.kernel, train_t, t_star);
        const Vector<Scalar> resid = train_y.array() - mean.constant;
        out.mean += k_star.dot(chol.llt.solve(resid));
        // k*^T V^-1 k* = |L^-1 k*|^2
        const Vector<Scalar> half = chol.llt.matrixL().solve(k_star);
        out.variance = prior - half.squaredNorm() + noise2;
    }
    if (!(out.variance > Scalar(kVarFloor))) out.variance = Scalar(kVarFloor);
    return out;
}

/// Log marginal likelihood of (ys - C) under N(0, K + sn^2 I).
template <typename Scalar>
Scalar log_marginal_likelihood(const Hyperparameters<Scalar>& hyper, const MeanFunction<Scalar>& mean,
                               const Eigen::Ref<const Vector<Scalar>>& ts,
                               const Eigen::Ref<const Vector<Scalar>>& ys) {
    using std::log;
    if (ts.size() == 0 || ts.size() != ys.size()) {
        throw std::invalid_argument("log_marginal_likelihood: need matching non-empty inputs");
    }
    const auto chol = jittered_cholesky<Scalar>(noisy_covariance(hyper.kernel, ts, hyper.noise_scale));
    const Vector<Scalar> resid = ys.array() - mean.constant;
    const Vector<Scalar> half = chol.llt.matrixL().solve(resid);
    const Scalar log_det = Scalar(2) * chol.llt.matrixLLT().diagonal().array().log().sum();
    const Scalar n = Scalar(ts.size());
    return Scalar(-0.5) * half.squaredNorm() - Scalar(0.5) * log_det -
           Scalar(0.5) * n * log(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
struct LmlWithGradient {
    Scalar value;
    /// d/d(log signal, log length, log noise)
    Eigen::Matrix<Scalar, 3, 1> gradient;
};

template <typename Scalar>
LmlWithGradient<Scalar> lml_value_and_gradient(const Hyperparameters<Scalar>& hyper,
                                               const MeanFunction<Scalar>& mean,
                                               const Eigen::Ref<const Vector<Scalar>>& ts,
                                               const Eigen::Ref<const Vector<Scalar>>& ys) {
    using std::log;
    if (ts.size() == 0 || ts.size() != ys.size()) {
        throw std::invalid_argument("lml_gradient: need matching non-empty inputs");
    }
    const Eigen::Index n = ts.size();
    const Matrix<Scalar> k = covariance_matrix(hyper.kernel, ts);
    Matrix<Scalar> v = k;
    const Scalar noise2 = hyper.noise_scale * hyper.noise_scale;
    v.diagonal().array() += noise2;
    const auto chol = jittered_cholesky<Scalar>(v);

    const Vector<Scalar> resid = ys.array() - mean.constant;
    const Vector<Scalar> alpha = chol.llt.solve(resid);
    const Matrix<Scalar> v_inv = chol.llt.solve(Matrix<Scalar>::Identity(n, n));
    const Matrix<Scalar> w = alpha * alpha.transpose() - v_inv;

    Matrix<Scalar> dk_dlen(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            dk_dlen(i, j) = kernel_dlog_length(hyper.kernel, Scalar(ts(i)), Scalar(ts(j)));
            dk_dlen(j, i) = dk_dlen(i, j);
        }
    }

    LmlWithGradient<Scalar> out;
    const Scalar log_det = Scalar(2) * chol.llt.matrixLLT().diagonal().array().log().sum();
    out.value = Scalar(-0.5) * resid.dot(alpha) - Scalar(0.5) * log_det -
                Scalar(0.5) * Scalar(n) * log(Scalar(2) * std::numbers::pi_v<Scalar>);
    // dL/dp = 1/2 tr(W dV/dp)
    out.gradient(0) = (w.array() * k.array()).sum();
    out.gradient(1) = Scalar(0.5) * (w.array() * dk_dlen.array()).sum();
    out.gradient(2) = noise2 * w.trace();
    return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> lml_gradient(const Hyperparameters<Scalar>& hyper, const MeanFunction<Scalar>& mean,
                                         const Eigen::Ref<const Vector<Scalar>>& ts,
                                         const Eigen::Ref<const Vector<Scalar>>& ys) {
    return lml_value_and_gradient(hyper, mean, ts, ys).gradient;
}

}  // namespace intel

#endif  // INTEL_GP_HPP
