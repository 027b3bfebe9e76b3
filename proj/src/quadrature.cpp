#include "birk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

namespace birk {

namespace {

struct Simpson {
    const std::function<double(double)>& f;
    int max_depth;

    double recurse(double a, double fa, double m, double fm, double b, double fb, double whole, double tol,
                   int depth) const {
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = f(lm), frm = f(rm);
        double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        double delta = left + right - whole;
        // Floor the tolerance at a few ulps of the partial sum; below that the
        // error estimate is rounding noise.
        double floor = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
        if (std::abs(delta) <= 15.0 * std::max(tol, floor)) return left + right + delta / 15.0;
        if (depth >= max_depth)
            throw QuadratureError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                                  std::to_string(b) + "]");
        return recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Simpson{f, max_depth}.recurse(a, fa, m, fm, b, fb, whole, tol, 0);
}

}  // namespace birk
