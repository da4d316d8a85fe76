#ifndef KARNET_ACTIVATION_HPP
#define KARNET_ACTIVATION_HPP

#include <cstddef>

#include "karnet/matrix.hpp"

namespace karnet {

/// Invertible layer activation: the shifted softplus f(x) = ln(shift + e^x),
/// strictly increasing with range (ln shift, inf) and exact inverse
/// f^-1(y) = ln(e^y - shift).
struct Activation {
    enum class Kind { modified_softplus };

    Kind kind = Kind::modified_softplus;
    double shift = 0.8;
    double clip_epsilon = 1e-6;

    /// Infimum of f; inputs to the inverse must stay above this.
    double range_min() const;

    void validate() const;
};

double act(const Activation& a, double x);
Matrix act(const Activation& a, const Matrix& x);

/// Exact inverse ln(e^y - shift).
///
/// With clip = true, elements y <= range_min + clip_epsilon are first raised
/// to range_min + clip_epsilon, and the number of raised elements is added to
/// *clip_count when given. With clip = false such elements raise
/// DomainViolation reporting the offending extremum.
double act_inv(const Activation& a, double y, bool clip = false,
               std::size_t* clip_count = nullptr);
Matrix act_inv(const Activation& a, const Matrix& y, bool clip = false,
               std::size_t* clip_count = nullptr);

}  // namespace karnet

#endif
