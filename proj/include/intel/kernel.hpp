#ifndef INTEL_KERNEL_HPP
#define INTEL_KERNEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace intel {

enum class KernelKind { Matern52, SquaredExponential };

inline std::string_view to_string(KernelKind kind) {
    return kind == KernelKind::Matern52 ? "matern52" : "se";
}

inline KernelKind kernel_kind_from_string(std::string_view name) {
    if (name == "matern52" || name == "matern") return KernelKind::Matern52;
    if (name == "se" || name == "squared_exponential") return KernelKind::SquaredExponential;
    throw std::invalid_argument("unknown kernel kind: " + std::string(name));
}

/**
 * Stationary covariance function over a scalar input.
 *
 * Matern52: k(r) = s^2 (1 + sqrt5 r/l + 5 r^2 / (3 l^2)) exp(-sqrt5 r/l)
 * SquaredExponential: k(r) = s^2 exp(-(r/l)^2)
 *
 * where s is signal_scale and l is length_scale. Note the SE form carries no
 * factor of 1/2 in the exponent.
 */
template <typename Scalar = double>
struct KernelSpec {
    KernelKind kind = KernelKind::Matern52;
    Scalar signal_scale = Scalar(1);
    Scalar length_scale = Scalar(1);

    bool valid() const { return signal_scale > Scalar(0) && length_scale > Scalar(0); }
};

template <typename Scalar>
Scalar kernel_eval(const KernelSpec<Scalar>& spec, Scalar xi, Scalar xj) {
    using std::abs;
    using std::exp;
    using std::sqrt;
    const Scalar s2 = spec.signal_scale * spec.signal_scale;
    const Scalar r = abs(xi - xj);
    if (spec.kind == KernelKind::SquaredExponential) {
        const Scalar u = r / spec.length_scale;
        return s2 * exp(-u * u);
    }
    const Scalar a = sqrt(Scalar(5)) * r / spec.length_scale;
    return s2 * (Scalar(1) + a + a * a / Scalar(3)) * exp(-a);
}

/// Derivative of kernel_eval with respect to log(length_scale).
template <typename Scalar>
Scalar kernel_dlog_length(const KernelSpec<Scalar>& spec, Scalar xi, Scalar xj) {
    using std::abs;
    using std::exp;
    using std::sqrt;
    const Scalar s2 = spec.signal_scale * spec.signal_scale;
    const Scalar r = abs(xi - xj);
    if (spec.kind == KernelKind::SquaredExponential) {
        const Scalar u = r / spec.length_scale;
        return s2 * exp(-u * u) * Scalar(2) * u * u;
    }
    const Scalar a = sqrt(Scalar(5)) * r / spec.length_scale;
    return s2 * exp(-a) * a * a * (Scalar(1) + a) / Scalar(3);
}

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar, typename Derived>
Matrix<Scalar> covariance_matrix(const KernelSpec<Scalar>& spec,
                                 const Eigen::MatrixBase<Derived>& xs) {
    const Eigen::Index n = xs.size();
    Matrix<Scalar> k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = kernel_eval(spec, Scalar(xs(j)), Scalar(xs(j)));
        for (Eigen::Index i = j + 1; i < n; ++i) {
            k(i, j) = kernel_eval(spec, Scalar(xs(i)), Scalar(xs(j)));
            k(j, i) = k(i, j);
        }
    }
    return k;
}

/// Covariance between every entry of xs and a single point.
template <typename Scalar, typename Derived>
Vector<Scalar> cross_covariance(const KernelSpec<Scalar>& spec,
                                const Eigen::MatrixBase<Derived>& xs, Scalar x_star) {
    Vector<Scalar> k(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) k(i) = kernel_eval(spec, Scalar(xs(i)), x_star);
    return k;
}

/// K + noise^2 I
template <typename Scalar, typename Derived>
Matrix<Scalar> noisy_covariance(const KernelSpec<Scalar>& spec,
                                const Eigen::MatrixBase<Derived>& xs, Scalar noise_scale) {
    Matrix<Scalar> v = covariance_matrix(spec, xs);
    v.diagonal().array() += noise_scale * noise_scale;
    return v;
}

}  // namespace intel

#endif  // INTEL_KERNEL_HPP
