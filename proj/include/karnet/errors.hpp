#ifndef KARNET_ERRORS_HPP
#define KARNET_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace karnet {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- numeric / shape errors -------------------------------------------------

struct ShapeMismatch : Error {
    using Error::Error;
};

struct DegenerateShape : Error {
    using Error::Error;
};

struct NonFiniteInput : Error {
    using Error::Error;
};

struct NonFiniteIntermediate : Error {
    NonFiniteIntermediate(std::size_t layer_index, const std::string& what)
        : Error(what), layer(layer_index) {}
    std::size_t layer;
};

/// Value outside the invertible range of an activation (clip disabled).
struct DomainViolation : Error {
    DomainViolation(double offending_value, const std::string& what)
        : Error(what), offending(offending_value) {}
    double offending;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

// --- data ingestion errors --------------------------------------------------

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(std::size_t row_index, std::size_t col_index, const std::string& what)
        : Error(what), row(row_index), col(col_index) {}
    std::size_t row;
    std::size_t col;
};

struct UnknownCategory : Error {
    UnknownCategory(std::size_t row_index, std::size_t col_index, const std::string& what)
        : Error(what), row(row_index), col(col_index) {}
    std::size_t row;
    std::size_t col;
};

struct UnknownLabel : Error {
    using Error::Error;
};

/// A class has fewer members than the requested fold count.
struct ClassTooSmall : Error {
    ClassTooSmall(std::string class_name_, std::size_t count_, std::size_t folds_,
                  const std::string& what)
        : Error(what), class_name(std::move(class_name_)), count(count_), folds(folds_) {}
    std::string class_name;
    std::size_t count;
    std::size_t folds;
};

}  // namespace karnet

#endif
