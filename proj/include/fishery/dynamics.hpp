#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fishery/model.hpp"
#include "fishery/ode.hpp"

namespace fishery {

struct State {
    double x = 0.0; // fish stock
    double K = 0.0; // harvesting capital
};

enum class ControlMode { Zero, One, Singular };

const char* control_mode_name(ControlMode mode);

// One piece of the utilization schedule.  Singular segments hold the stock at
// x_ref by matching the catch to the growth there: u = F(x_ref) / (x_ref K),
// clamped to [0, 1].
struct ControlSegment {
    double t0 = 0.0;
    double t1 = 0.0;
    ControlMode mode = ControlMode::Zero;
    double x_ref = 0.0;
};

// Piecewise control u(t) on a contiguous time span.
class ControlTrace {
public:
    ControlTrace() = default;
    explicit ControlTrace(std::vector<ControlSegment> segments);

    // Appends one segment; its t0 must meet the current end.  Zero-length
    // segments are dropped.
    void append(ControlSegment seg);

    double u(double t, double K, const ModelParams& m) const;
    const ControlSegment& segment_at(double t) const;

    bool empty() const { return segments_.empty(); }
    double t0() const;
    double t1() const;
    const std::vector<ControlSegment>& segments() const { return segments_; }

private:
    std::vector<ControlSegment> segments_;
};

// Investment measure: point masses plus a piecewise-constant density.
struct Atom {
    double t = 0.0;
    double h = 0.0;
};

struct DensitySegment {
    double t0 = 0.0;
    double t1 = 0.0;
    double rate = 0.0;
};

struct ImpulseMeasure {
    std::vector<Atom> atoms;                // sorted by time, h >= 0
    std::vector<DensitySegment> densities;  // sorted, non-overlapping

    void validate() const;
    double rate_at(double t) const;
    double mass(double a, double b) const; // total measure of [a, b]
};

struct JumpRecord {
    double t = 0.0;
    double K_minus = 0.0;
    double K_plus = 0.0;
};

// Integrated path of (x, K, J) under a control trace and investment measure,
// with optional adjoint channels (z, lambda) attached afterwards.  State
// queries are right-continuous at jump times; K_left gives the left limit.
// J is the running discounted cost
//     J(t) = int_0^t e^{-delta s} (r dmu + (c - p x) u K ds).
class Trajectory {
public:
    double t0() const { return t0_; }
    double t1() const { return t1_; }
    const ModelParams& params() const { return m_; }
    const ControlTrace& control() const { return trace_; }
    const ImpulseMeasure& measure() const { return measure_; }
    const std::vector<JumpRecord>& jumps() const { return jumps_; }

    double x_at(double t) const;
    double K_at(double t) const;
    double K_left(double t) const;
    double J_at(double t) const;
    double u_at(double t) const;
    State state_at(double t) const { return {x_at(t), K_at(t)}; }

    bool has_adjoint(double t) const;
    double z_at(double t) const;
    double lambda_at(double t) const;

    // Pins z and lambda to constants on [t_from, t1]; used for phases where
    // the multipliers are known in closed form.
    void attach_adjoint_constants(double t_from, double z, double lambda);
    void clear_adjoints();

    // Integration mesh: every span boundary, including jump times.
    std::vector<double> mesh_times() const;

private:
    ModelParams m_;
    ControlTrace trace_;
    ImpulseMeasure measure_;
    std::vector<DenseSpan> spans_; // channels x, K, J
    std::vector<JumpRecord> jumps_;
    double t0_ = 0.0, t1_ = 0.0;
    double x0_pre_ = 0.0, K0_pre_ = 0.0;
    double xf_ = 0.0, Kf_ = 0.0, Jf_ = 0.0;

    std::vector<DenseSpan> adj_spans_; // channels z, lambda
    bool pinned_ = false;
    double pinned_from_ = 0.0, pinned_z_ = 0.0, pinned_lambda_ = 0.0;

    const DenseSpan& span_right(double t) const;
    const DenseSpan& span_left(double t) const;

    friend Trajectory integrate_state(const ModelParams&, State,
                                      const ControlTrace&,
                                      const ImpulseMeasure&, double,
                                      const OdeSettings&);
    friend void integrate_adjoint(Trajectory&, double, double, double, double,
                                  const OdeSettings&);
};

// Integrates x' = F(x) - u K x, K' = -gamma K + density, with K jumping by h
// at each atom.  The state must stay inside [0, x_bar]; overshoot beyond
// 1e-9 relative is an error.
Trajectory integrate_state(const ModelParams& m, State s0,
                           const ControlTrace& trace,
                           const ImpulseMeasure& measure, double t_end,
                           const OdeSettings& settings = {});

// Integrates z' = z g(x(t)) - psi(x(t)), lambda' = kappa lambda - z u(t)
// along an existing trajectory and stores the result on it.  Consecutive
// calls must be contiguous in time.
void integrate_adjoint(Trajectory& traj, double t_from, double z0,
                       double lambda0, double t_to,
                       const OdeSettings& settings = {});

// First root of fn(t, state(t)) in [a, b], located to tol.
double detect_event(const Trajectory& traj,
                    const std::function<double(double, const State&)>& fn,
                    double a, double b, double tol = 1e-12);

// Value of the path beyond the integration horizon.  Zero: all activity
// stops, the tail is exactly zero.  Stationary: the terminal state is held
// forever (it must be an equilibrium within eps).
enum class TailKind { Zero, Stationary };

struct TailRule {
    TailKind kind = TailKind::Zero;
    double eps = 1e-6;
};

struct ObjectiveBreakdown {
    double running = 0.0;
    double tail = 0.0;
    double tail_bound = 0.0; // bound on any admissible held-state tail

    double total() const { return running + tail; }
};

ObjectiveBreakdown evaluate_objective(const Trajectory& traj,
                                      const TailRule& rule);

// Columns t,x,K,u,z,lambda,J_running on a dt grid merged with the mesh
// times; z and lambda print as nan where not attached.
void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          double dt = 0.01);

nlohmann::json jumps_to_json(const Trajectory& traj);

} // namespace fishery
