#include "gsdsce/error.hpp"

namespace gsdsce {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::insufficient_samples: return "insufficient-samples";
        case ErrorKind::degenerate_polynomial: return "degenerate-polynomial";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::rank_deficient: return "rank-deficient";
        case ErrorKind::detection_failure: return "detection-failure";
        case ErrorKind::degenerate_geometry: return "degenerate-geometry";
        case ErrorKind::undefined_metric: return "undefined-metric";
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::parse: return "parse";
    }
    return "unknown";
}

}  // namespace gsdsce
