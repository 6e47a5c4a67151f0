#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpomdp {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Tolerances shared across modules.
namespace tol {
inline constexpr double probability_row = 1e-9;     // stored rows sum to 1 within this
inline constexpr double renormalize = 1e-6;         // parsed rows within this are rescaled
inline constexpr double belief_equal = 1e-9;        // L-inf belief identity
inline constexpr double zero_observation = 1e-12;   // p(z|x,u) at or below is "impossible"
inline constexpr double argmin = 1e-9;              // action ties
inline constexpr double modified_row = 1e-8;        // modified MDP rows
}  // namespace tol

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Raised when asked to condition on an observation of (numerically) zero probability.
class ZeroProbabilityObservation : public Error {
  public:
    using Error::Error;
};

class SingularSystemError : public Error {
  public:
    using Error::Error;
};

class ConvergenceError : public Error {
  public:
    using Error::Error;
};

template <typename DA, typename DB>
auto l1_distance(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    return (a - b).template lpNorm<1>();
}

template <typename DA, typename DB>
auto linf_distance(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    return (a - b).template lpNorm<Eigen::Infinity>();
}

/// True when every entry is in [0,1] (up to `slack`) and the entries sum to one within `tolerance`.
template <typename Derived>
bool is_probability_vector(const Eigen::MatrixBase<Derived>& v, double tolerance = tol::probability_row,
                           double slack = 0.0) {
    if (v.size() == 0) return false;
    for (Index i = 0; i < v.size(); ++i) {
        const double p = static_cast<double>(v(i));
        if (!std::isfinite(p) || p < -slack || p > 1.0 + slack) return false;
    }
    return std::abs(static_cast<double>(v.sum()) - 1.0) <= tolerance;
}

/// Indices whose value is within `tolerance` of the minimum, in increasing index order.
template <typename Derived>
std::vector<int> argmin_set(const Eigen::MatrixBase<Derived>& values, double tolerance = tol::argmin) {
    std::vector<int> out;
    if (values.size() == 0) return out;
    const double best = values.minCoeff();
    for (Index i = 0; i < values.size(); ++i)
        if (values(i) <= best + tolerance) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace dpomdp
