#include "karnet/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SVD>

#include <limits>
#include <string>

#include "karnet/errors.hpp"

namespace karnet {

namespace {

thread_local std::uint64_t g_pinv_calls = 0;

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return e;
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j)
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
    return m;
}

void check_solver_input(const Matrix& a, const char* who) {
    if (a.rows() == 0 || a.cols() == 0)
        throw DegenerateShape(std::string(who) + ": zero-sized matrix");
    if (!a.all_finite())
        throw NonFiniteInput(std::string(who) + ": input contains NaN or Inf");
}

// Truncated SVD solve: returns V S+ U^T B without materializing the inverse.
Eigen::MatrixXd svd_apply(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double rcond) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() ? rcond * sv(0) : 0.0;
    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    return svd.matrixV() * (inv_sv.asDiagonal() * (svd.matrixU().transpose() * b));
}

// Ridge form of the pseudo-inverse applied to B. The side of the Gram matrix
// follows the shape: rows <= cols uses A^T (A A^T + lambda I)^-1, otherwise
// (A^T A + lambda I)^-1 A^T.
Eigen::MatrixXd ridge_apply(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            double lambda) {
    if (a.rows() <= a.cols()) {
        Eigen::MatrixXd gram = a * a.transpose();
        gram.diagonal().array() += lambda;
        return a.transpose() * gram.ldlt().solve(b);
    }
    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += lambda;
    return gram.ldlt().solve(a.transpose() * b);
}

}  // namespace

double PinvConfig::effective_rcond(std::size_t rows, std::size_t cols) const {
    if (rcond) return *rcond;
    return std::numeric_limits<double>::epsilon() *
           static_cast<double>(std::max(rows, cols));
}

void PinvConfig::validate() const {
    if (rcond && *rcond <= 0.0)
        throw InvalidArgument("PinvConfig: rcond must be > 0");
    if (lambda < 0.0)
        throw InvalidArgument("PinvConfig: lambda must be >= 0");
}

Matrix pinv(const Matrix& a, const PinvConfig& cfg) {
    cfg.validate();
    check_solver_input(a, "pinv");
    ++g_pinv_calls;

    const Eigen::MatrixXd ea = to_eigen(a);
    if (cfg.mode == PinvConfig::Mode::ridge_limit) {
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.rows());
        return from_eigen(ridge_apply(ea, id, cfg.lambda));
    }
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.rows());
    return from_eigen(svd_apply(ea, id, cfg.effective_rcond(a.rows(), a.cols())));
}

Matrix solve_min_norm(const Matrix& x, const Matrix& y, const PinvConfig& cfg) {
    cfg.validate();
    check_solver_input(x, "solve_min_norm");
    check_solver_input(y, "solve_min_norm");
    if (x.rows() != y.rows())
        throw ShapeMismatch("solve_min_norm: X has " + std::to_string(x.rows()) +
                            " rows but Y has " + std::to_string(y.rows()));
    ++g_pinv_calls;

    const Eigen::MatrixXd ex = to_eigen(x);
    const Eigen::MatrixXd ey = to_eigen(y);
    if (cfg.mode == PinvConfig::Mode::ridge_limit)
        return from_eigen(ridge_apply(ex, ey, cfg.lambda));
    return from_eigen(svd_apply(ex, ey, cfg.effective_rcond(x.rows(), x.cols())));
}

double sse(const Matrix& x, const Matrix& w, const Matrix& y) {
    if (x.cols() != w.rows() || x.rows() != y.rows() || w.cols() != y.cols())
        throw ShapeMismatch("sse: shapes not conformable");
    const Matrix r = x * w - y;
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.data()[i] * r.data()[i];
    return s;
}

std::uint64_t pinv_call_count() { return g_pinv_calls; }

void reset_pinv_call_count() { g_pinv_calls = 0; }

}  // namespace karnet
