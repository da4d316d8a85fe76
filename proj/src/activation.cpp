#include "karnet/activation.hpp"

#include <cmath>
#include <string>

#include "karnet/errors.hpp"

namespace karnet {

double Activation::range_min() const { return std::log(shift); }

void Activation::validate() const {
    if (!(shift > 0.0 && shift < 1.0))
        throw InvalidArgument("Activation: shift must lie in (0, 1)");
    if (!(clip_epsilon > 0.0))
        throw InvalidArgument("Activation: clip_epsilon must be > 0");
}

double act(const Activation& a, double x) {
    if (!std::isfinite(x)) throw NonFiniteInput("act: non-finite input");
    // ln(shift + e^x) = x + ln(1 + shift e^-x) for x > 0 avoids overflow.
    if (x > 0.0) return x + std::log1p(a.shift * std::exp(-x));
    return std::log(a.shift + std::exp(x));
}

Matrix act(const Activation& a, const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = act(a, x.data()[i]);
    return out;
}

namespace {

double inv_core(const Activation& a, double y) {
    // ln(e^y - shift) = y + ln(1 - shift e^-y) for y > 0 avoids overflow.
    if (y > 0.0) return y + std::log1p(-a.shift * std::exp(-y));
    return std::log(std::exp(y) - a.shift);
}

}  // namespace

double act_inv(const Activation& a, double y, bool clip, std::size_t* clip_count) {
    if (!std::isfinite(y)) throw NonFiniteInput("act_inv: non-finite input");
    const double lo = a.range_min() + a.clip_epsilon;
    if (clip) {
        if (y < lo) {
            if (clip_count) ++*clip_count;
            y = lo;
        }
    } else if (y <= a.range_min()) {
        throw DomainViolation(y, "act_inv: value " + std::to_string(y) +
                                     " is not above ln(shift) = " +
                                     std::to_string(a.range_min()));
    }
    return inv_core(a, y);
}

Matrix act_inv(const Activation& a, const Matrix& y, bool clip, std::size_t* clip_count) {
    if (!y.all_finite()) throw NonFiniteInput("act_inv: non-finite input");
    if (!clip) {
        // Report the worst offender, not the first.
        double worst = a.range_min();
        bool violated = false;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y.data()[i] <= a.range_min() && (!violated || y.data()[i] < worst)) {
                worst = y.data()[i];
                violated = true;
            }
        }
        if (violated)
            throw DomainViolation(worst, "act_inv: minimum value " + std::to_string(worst) +
                                             " is not above ln(shift) = " +
                                             std::to_string(a.range_min()));
    }
    Matrix out(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.size(); ++i)
        out.data()[i] = act_inv(a, y.data()[i], clip, clip_count);
    return out;
}

}  // namespace karnet
