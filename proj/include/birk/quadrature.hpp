#pragma once

#include <functional>
#include <stdexcept>

namespace birk {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive Simpson quadrature of f over [a, b] (a > b allowed). Throws
/// QuadratureError if an interval still misses its share of `tol` after
/// `max_depth` bisections.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int max_depth = 40);

}  // namespace birk
