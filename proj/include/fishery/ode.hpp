#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "fishery/errors.hpp"

namespace fishery {

// Right-hand side f(t, y, dy) for a first-order system of size dim.
using OdeRhs = std::function<void(double, const double*, double*)>;

struct OdeSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_max = std::numeric_limits<double>::infinity();
    double h_init = 0.0; // 0 = choose automatically
    std::size_t max_steps = 2'000'000;
};

// One accepted step. Component i is interpolated on t0 <= t <= t0+h by
//   y_i(t0 + s h) = y0_i + h (q1 s + q2 s^2 + q3 s^3 + q4 s^4),  s in [0, 1].
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> y0;
    std::vector<std::array<double, 4>> q;

    void eval(double t, double* out) const;
    double eval_component(double t, std::size_t i) const;
};

// Contiguous dense solution over [t_begin, t_end].
class DenseSpan {
  public:
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    std::size_t dimension() const { return dim_; }

    void eval(double t, double* out) const;
    double eval_component(double t, std::size_t i) const;
    std::vector<double> eval(double t) const;

    const std::vector<DenseStep>& steps() const { return steps_; }
    std::vector<double> step_times() const;

  private:
    friend class Dp5Integrator;
    double t_begin_ = 0.0, t_end_ = 0.0;
    std::size_t dim_ = 0;
    std::vector<DenseStep> steps_;
};

// Scalar event g(t, y). A root is reported when g changes sign across an
// accepted step in the admissible direction (+1 rising, -1 falling, 0 both)
// and, if arm_threshold > 0, only after g has first reached the opposite
// side by at least arm_threshold. The arming rule makes roots at degenerate
// starts (g(t0) = 0 with vanishing derivatives) well defined.
struct EventSpec {
    std::function<double(double, const double*)> fn;
    int direction = 0;
    double arm_threshold = 0.0;
};

struct EventResult {
    bool hit = false;
    int which = -1;
    double t = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> y;
};

// Integrate from (t0, y0) to t1 (t1 > t0). Throws StepFailure when the step
// size underflows or the step budget runs out.
DenseSpan ode_integrate(const OdeRhs& f, std::size_t dim, double t0, double t1,
                        const std::vector<double>& y0,
                        const OdeSettings& settings = {});

// As above but stops at the first event root, located on the dense output to
// time tolerance t_tol. When no event fires the span runs to t1 and
// result.hit is false.
DenseSpan ode_integrate_events(const OdeRhs& f, std::size_t dim, double t0,
                               double t1, const std::vector<double>& y0,
                               const std::vector<EventSpec>& events,
                               EventResult& result,
                               const OdeSettings& settings = {},
                               double t_tol = 1e-12);

} // namespace fishery
