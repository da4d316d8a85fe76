#ifndef KARNET_LINALG_HPP
#define KARNET_LINALG_HPP

#include <cstdint>
#include <optional>

#include "karnet/matrix.hpp"

namespace karnet {

/// How the Moore-Penrose pseudo-inverse is realized.
///
/// svd_truncation: singular values sigma_i <= rcond * sigma_max are dropped.
///   Robust for rank-deficient systems and the default everywhere.
/// ridge_limit: the closed forms A^T (A A^T + lambda I)^-1 (rows <= cols) or
///   (A^T A + lambda I)^-1 A^T (rows > cols). Exact only in the lambda -> 0
///   limit; kept as an explicit mode for fidelity checks against the
///   kernel/range-space derivation.
struct PinvConfig {
    enum class Mode { svd_truncation, ridge_limit };

    Mode mode = Mode::svd_truncation;

    /// Relative singular-value cutoff. Unset means the per-matrix default
    /// machine_epsilon * max(rows, cols). Must be > 0 when set.
    std::optional<double> rcond{};

    /// Ridge parameter, used only in ridge_limit mode. Must be >= 0.
    double lambda = 1e-8;

    double effective_rcond(std::size_t rows, std::size_t cols) const;
    void validate() const;
};

/// Moore-Penrose pseudo-inverse A+ of shape cols x rows.
Matrix pinv(const Matrix& a, const PinvConfig& cfg = {});

/// Minimum-norm least-squares solution W = X+ Y of X W = Y.
///
/// W minimizes trace((XW - Y)^T (XW - Y)) and, among all minimizers, has the
/// smallest Frobenius norm. Counts as one pseudo-inverse application.
Matrix solve_min_norm(const Matrix& x, const Matrix& y, const PinvConfig& cfg = {});

/// Sum of squared errors trace((XW - Y)^T (XW - Y)).
double sse(const Matrix& x, const Matrix& w, const Matrix& y);

/// Number of pseudo-inverse applications performed on the calling thread
/// since the last reset. Both pinv() and solve_min_norm() increment it.
std::uint64_t pinv_call_count();
void reset_pinv_call_count();

}  // namespace karnet

#endif
