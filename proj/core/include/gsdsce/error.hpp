#pragma once

#include <stdexcept>
#include <string>

namespace gsdsce {

enum class ErrorKind {
    dimension,
    insufficient_samples,
    degenerate_polynomial,
    convergence,
    rank_deficient,
    detection_failure,
    degenerate_geometry,
    undefined_metric,
    invalid_argument,
    parse,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace gsdsce
