#pragma once

#include <stdexcept>
#include <string>

namespace varma {

// Base class for all toolkit errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent dimensions between series, coefficient matrices or specs.
struct dimension_error : error {
    explicit dimension_error(const std::string& what) : error(what) {}
};

// Model fails a structural requirement (non-causal, non-invertible,
// non-PSD innovation covariance, unit-root propagation).
struct model_error : error {
    explicit model_error(const std::string& what) : error(what) {}
};

// Criterion or scale matrix is singular / not evaluable.
struct degenerate_error : error {
    explicit degenerate_error(const std::string& what) : error(what) {}
};

// Retained subset shrank below the size needed to identify the parameters.
struct selection_collapse_error : error {
    explicit selection_collapse_error(const std::string& what) : error(what) {}
};

// Malformed configuration file, CSV input or CLI arguments.
struct config_error : error {
    explicit config_error(const std::string& what) : error(what) {}
};

}  // namespace varma
