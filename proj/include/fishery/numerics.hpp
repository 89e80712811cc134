#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fishery/errors.hpp"

namespace fishery {

using ScalarFn = std::function<double(double)>;

// Brent's method on [a, b]. Requires f(a) and f(b) of opposite sign (zero at
// an endpoint is accepted). Iterates until the bracket is narrower than xtol
// or f hits ftol exactly; both stopping values are returned to the caller via
// the root itself, so callers that need the residual re-evaluate f.
double brent_root(const ScalarFn& f, double a, double b, double xtol,
                  int max_iter = 200);

// Uniform sign scan of [a, b] with n cells followed by Brent refinement of
// the first bracketed root. Throws NoRoot if no cell changes sign.
double scan_root(const ScalarFn& f, double a, double b, int n, double xtol);

// Bisection on a boolean predicate over [lo, hi] where pred(lo) is true and
// pred(hi) is false. Returns the midpoint of the final bracket of width tol.
double bisect_predicate(const std::function<bool(double)>& pred, double lo,
                        double hi, double tol, int max_iter = 200);

std::vector<double> linspace(double a, double b, int n);

// Shape-preserving piecewise-cubic interpolant (Fritsch-Carlson slopes) on
// strictly increasing breakpoints. Queries outside the breakpoint range throw
// std::domain_error; there is no extrapolation.
class MonotoneMap {
  public:
    MonotoneMap() = default;
    MonotoneMap(std::string name, std::vector<double> xs,
                std::vector<double> ys);

    double operator()(double x) const;
    double derivative(double x) const;

    bool empty() const { return xs_.empty(); }
    double front_x() const { return xs_.front(); }
    double back_x() const { return xs_.back(); }
    double front_y() const { return ys_.front(); }
    double back_y() const { return ys_.back(); }
    bool contains(double x) const {
        return !xs_.empty() && x >= xs_.front() && x <= xs_.back();
    }
    std::size_t size() const { return xs_.size(); }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    const std::string& name() const { return name_; }

    // True if the ordinate sequence is strictly increasing (+1) or strictly
    // decreasing (-1) across all breakpoints.
    bool values_strictly(int direction) const;

  private:
    std::size_t cell(double x) const;

    std::string name_;
    std::vector<double> xs_, ys_, slopes_;
};

} // namespace fishery
