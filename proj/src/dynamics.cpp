#include "fishery/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "fishery/errors.hpp"
#include "fishery/numerics.hpp"

namespace fishery {

namespace {

double time_tol(double t) { return 1e-12 * std::max(1.0, std::fabs(t)); }

} // namespace

const char* control_mode_name(ControlMode mode) {
    switch (mode) {
    case ControlMode::Zero: return "zero";
    case ControlMode::One: return "one";
    case ControlMode::Singular: return "singular";
    }
    return "?";
}

ControlTrace::ControlTrace(std::vector<ControlSegment> segments) {
    for (auto& seg : segments) append(seg);
}

void ControlTrace::append(ControlSegment seg) {
    if (seg.mode == ControlMode::Singular && !(seg.x_ref > 0.0))
        throw std::invalid_argument("singular segment needs x_ref > 0");
    if (!segments_.empty()) {
        const double end = segments_.back().t1;
        if (std::fabs(seg.t0 - end) > 1e-9 * std::max(1.0, std::fabs(end)))
            throw std::invalid_argument("control segments must be contiguous");
        seg.t0 = end;
    }
    if (!(seg.t1 > seg.t0)) return;
    segments_.push_back(seg);
}

const ControlSegment& ControlTrace::segment_at(double t) const {
    if (segments_.empty())
        throw std::domain_error("control trace is empty");
    if (t < segments_.front().t0 - time_tol(t) ||
        t > segments_.back().t1 + time_tol(t))
        throw std::domain_error("control query outside trace span");
    auto it = std::upper_bound(
        segments_.begin(), segments_.end(), t,
        [](double v, const ControlSegment& s) { return v < s.t0; });
    if (it != segments_.begin()) --it;
    return *it;
}

double ControlTrace::u(double t, double K, const ModelParams& m) const {
    const ControlSegment& seg = segment_at(t);
    switch (seg.mode) {
    case ControlMode::Zero: return 0.0;
    case ControlMode::One: return 1.0;
    case ControlMode::Singular: {
        if (!(K > 0.0)) return 0.0;
        const double u = m.production->value(seg.x_ref) / (seg.x_ref * K);
        return std::clamp(u, 0.0, 1.0);
    }
    }
    return 0.0;
}

double ControlTrace::t0() const {
    if (segments_.empty()) throw std::domain_error("control trace is empty");
    return segments_.front().t0;
}

double ControlTrace::t1() const {
    if (segments_.empty()) throw std::domain_error("control trace is empty");
    return segments_.back().t1;
}

void ImpulseMeasure::validate() const {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].h < 0.0)
            throw std::invalid_argument("atom mass must be nonnegative");
        if (i > 0 && atoms[i].t < atoms[i - 1].t)
            throw std::invalid_argument("atoms must be sorted by time");
    }
    for (std::size_t i = 0; i < densities.size(); ++i) {
        const auto& d = densities[i];
        if (!(d.t1 > d.t0))
            throw std::invalid_argument("density segment needs t1 > t0");
        if (d.rate < 0.0)
            throw std::invalid_argument("density rate must be nonnegative");
        if (i > 0 && d.t0 < densities[i - 1].t1 - time_tol(d.t0))
            throw std::invalid_argument("density segments overlap");
    }
}

double ImpulseMeasure::rate_at(double t) const {
    auto it = std::upper_bound(
        densities.begin(), densities.end(), t,
        [](double v, const DensitySegment& d) { return v < d.t0; });
    if (it == densities.begin()) return 0.0;
    --it;
    return t < it->t1 ? it->rate : 0.0;
}

double ImpulseMeasure::mass(double a, double b) const {
    double m = 0.0;
    for (const auto& atom : atoms)
        if (atom.t >= a && atom.t <= b) m += atom.h;
    for (const auto& d : densities) {
        const double lo = std::max(a, d.t0);
        const double hi = std::min(b, d.t1);
        if (hi > lo) m += d.rate * (hi - lo);
    }
    return m;
}

const DenseSpan& Trajectory::span_right(double t) const {
    auto it = std::upper_bound(
        spans_.begin(), spans_.end(), t,
        [](double v, const DenseSpan& s) { return v < s.t_begin(); });
    if (it != spans_.begin()) --it;
    return *it;
}

const DenseSpan& Trajectory::span_left(double t) const {
    auto it = std::lower_bound(
        spans_.begin(), spans_.end(), t,
        [](const DenseSpan& s, double v) { return s.t_end() < v; });
    if (it == spans_.end()) --it;
    return *it;
}

double Trajectory::x_at(double t) const {
    if (t > t1_ + time_tol(t) || t < t0_ - time_tol(t))
        throw std::domain_error("trajectory query outside [t0, t1]");
    if (spans_.empty() || t >= t1_) return xf_;
    return span_right(t).eval_component(t, 0);
}

double Trajectory::K_at(double t) const {
    if (t > t1_ + time_tol(t) || t < t0_ - time_tol(t))
        throw std::domain_error("trajectory query outside [t0, t1]");
    if (spans_.empty() || t >= t1_) return Kf_;
    return span_right(t).eval_component(t, 1);
}

double Trajectory::K_left(double t) const {
    if (t > t1_ + time_tol(t) || t < t0_ - time_tol(t))
        throw std::domain_error("trajectory query outside [t0, t1]");
    if (spans_.empty()) return K0_pre_;
    if (t <= t0_) return K0_pre_;
    return span_left(t).eval_component(t, 1);
}

double Trajectory::J_at(double t) const {
    if (t > t1_ + time_tol(t) || t < t0_ - time_tol(t))
        throw std::domain_error("trajectory query outside [t0, t1]");
    if (spans_.empty() || t >= t1_) return Jf_;
    return span_right(t).eval_component(t, 2);
}

double Trajectory::u_at(double t) const { return trace_.u(t, K_at(t), m_); }

bool Trajectory::has_adjoint(double t) const {
    if (pinned_ && t >= pinned_from_ - time_tol(t)) return true;
    for (const auto& s : adj_spans_)
        if (t >= s.t_begin() - time_tol(t) && t <= s.t_end() + time_tol(t))
            return true;
    return false;
}

double Trajectory::z_at(double t) const {
    for (const auto& s : adj_spans_)
        if (t >= s.t_begin() - time_tol(t) && t <= s.t_end() + time_tol(t))
            return s.eval_component(t, 0);
    if (pinned_ && t >= pinned_from_ - time_tol(t)) return pinned_z_;
    throw TailUnavailable("no adjoint data at t=" + std::to_string(t));
}

double Trajectory::lambda_at(double t) const {
    for (const auto& s : adj_spans_)
        if (t >= s.t_begin() - time_tol(t) && t <= s.t_end() + time_tol(t))
            return s.eval_component(t, 1);
    if (pinned_ && t >= pinned_from_ - time_tol(t)) return pinned_lambda_;
    throw TailUnavailable("no adjoint data at t=" + std::to_string(t));
}

void Trajectory::attach_adjoint_constants(double t_from, double z,
                                          double lambda) {
    if (t_from < t0_ - time_tol(t_from) || t_from > t1_ + time_tol(t_from))
        throw std::domain_error("adjoint pin outside [t0, t1]");
    pinned_ = true;
    pinned_from_ = t_from;
    pinned_z_ = z;
    pinned_lambda_ = lambda;
}

void Trajectory::clear_adjoints() {
    adj_spans_.clear();
    pinned_ = false;
}

std::vector<double> Trajectory::mesh_times() const {
    std::vector<double> ts{t0_};
    for (const auto& s : spans_) ts.push_back(s.t_end());
    if (ts.back() != t1_) ts.push_back(t1_);
    return ts;
}

Trajectory integrate_state(const ModelParams& m, State s0,
                           const ControlTrace& trace,
                           const ImpulseMeasure& measure, double t_end,
                           const OdeSettings& settings) {
    if (!m.production) throw std::invalid_argument("missing production");
    if (trace.empty()) throw std::invalid_argument("empty control trace");
    measure.validate();
    const double xb = m.x_bar();
    if (!(s0.x > 0.0) || s0.x > xb * (1.0 + 1e-12))
        throw std::invalid_argument("initial stock outside (0, x_bar]");
    if (s0.K < 0.0) throw std::invalid_argument("initial capital < 0");
    const double tb = trace.t0();
    if (t_end < tb - time_tol(tb) || t_end > trace.t1() + time_tol(t_end))
        throw std::invalid_argument("t_end outside control trace span");
    t_end = std::min(t_end, trace.t1());

    Trajectory traj;
    traj.m_ = m;
    traj.trace_ = trace;
    traj.measure_ = measure;
    traj.t0_ = tb;
    traj.t1_ = t_end;
    traj.x0_pre_ = s0.x;
    traj.K0_pre_ = s0.K;

    // Breakpoints: control switches, density edges, atom times.
    std::vector<double> bps{tb, t_end};
    for (const auto& seg : trace.segments()) {
        bps.push_back(seg.t0);
        bps.push_back(seg.t1);
    }
    for (const auto& d : measure.densities) {
        bps.push_back(d.t0);
        bps.push_back(d.t1);
    }
    for (const auto& a : measure.atoms) bps.push_back(a.t);
    std::sort(bps.begin(), bps.end());
    std::vector<double> mesh;
    for (double t : bps) {
        if (t < tb - time_tol(t) || t > t_end + time_tol(t)) continue;
        const double tc = std::clamp(t, tb, t_end);
        if (mesh.empty() || tc - mesh.back() > time_tol(tc))
            mesh.push_back(tc);
    }
    if (mesh.size() == 1) mesh.push_back(t_end);

    const auto& e = m.econ;
    const auto& prod = *m.production;
    const double x_slack = 1e-9 * std::max(1.0, xb);
    std::vector<double> y{s0.x, s0.K, 0.0};

    // Each atom is consumed once, at the first mesh point at or after it.
    std::size_t ai = 0;
    auto apply_atoms_at = [&](double t) {
        while (ai < measure.atoms.size() &&
               measure.atoms[ai].t <=
                   t + 1e-9 * std::max(1.0, std::fabs(t))) {
            const Atom& a = measure.atoms[ai++];
            if (a.h == 0.0) continue;
            traj.jumps_.push_back({t, y[1], y[1] + a.h});
            y[1] += a.h;
            y[2] += e.r * a.h * std::exp(-e.delta * t);
        }
    };

    if (mesh.size() == 1 || t_end - tb <= time_tol(t_end)) {
        apply_atoms_at(mesh.front());
        traj.xf_ = y[0];
        traj.Kf_ = y[1];
        traj.Jf_ = y[2];
        return traj;
    }

    apply_atoms_at(mesh.front());
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        const double a = mesh[i];
        const double b = mesh[i + 1];
        if (b - a > time_tol(b)) {
            const ControlSegment seg = trace.segment_at(0.5 * (a + b));
            const double rate = measure.rate_at(0.5 * (a + b));
            const double u_fixed =
                seg.mode == ControlMode::One ? 1.0 : 0.0;
            const bool singular = seg.mode == ControlMode::Singular;
            const double x_ref = seg.x_ref;
            auto rhs = [&, u_fixed, singular, x_ref, rate](double t,
                                                           const double* yv,
                                                           double* dy) {
                const double x = std::clamp(yv[0], 0.0, xb);
                const double K = std::max(yv[1], 0.0);
                double u = u_fixed;
                if (singular && K > 0.0)
                    u = std::clamp(prod.value(x_ref) / (x_ref * K), 0.0, 1.0);
                dy[0] = prod.value(x) - u * K * x;
                dy[1] = -e.gamma * K + rate;
                dy[2] = std::exp(-e.delta * t) *
                        (e.r * rate + (e.c - e.p * x) * u * K);
            };
            DenseSpan span = ode_integrate(rhs, 3, a, b, y, settings);
            for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const double xs = span.eval_component(a + s * (b - a), 0);
                if (xs < -x_slack || xs > xb + x_slack)
                    throw ConstraintBreach(
                        "stock left [0, x_bar]: x=" + std::to_string(xs) +
                        " at t=" + std::to_string(a + s * (b - a)));
            }
            y = span.eval(b);
            y[0] = std::clamp(y[0], 0.0, xb);
            traj.spans_.push_back(std::move(span));
        }
        apply_atoms_at(b);
    }

    traj.xf_ = y[0];
    traj.Kf_ = y[1];
    traj.Jf_ = y[2];
    return traj;
}

void integrate_adjoint(Trajectory& traj, double t_from, double z0,
                       double lambda0, double t_to,
                       const OdeSettings& settings) {
    if (t_from < traj.t0_ - time_tol(t_from) ||
        t_to > traj.t1_ + time_tol(t_to) || !(t_to > t_from))
        throw std::invalid_argument("adjoint span outside trajectory");
    if (!traj.adj_spans_.empty()) {
        const double end = traj.adj_spans_.back().t_end();
        if (std::fabs(t_from - end) > 1e-9 * std::max(1.0, std::fabs(end)))
            throw std::invalid_argument("adjoint pieces must be contiguous");
        t_from = end;
    }
    const ModelParams& m = traj.m_;
    const double xb = m.x_bar();
    const double kappa = m.kappa();

    std::vector<double> mesh{t_from};
    for (const auto& s : traj.spans_) {
        const double t = s.t_end();
        if (t > t_from + time_tol(t) && t < t_to - time_tol(t))
            mesh.push_back(t);
    }
    mesh.push_back(t_to);

    std::vector<double> y{z0, lambda0};
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        const double a = mesh[i];
        const double b = mesh[i + 1];
        if (b - a <= time_tol(b)) continue;
        const DenseSpan& sp = traj.span_right(0.5 * (a + b));
        const ControlSegment seg = traj.trace_.segment_at(0.5 * (a + b));
        const double u_fixed = seg.mode == ControlMode::One ? 1.0 : 0.0;
        const bool singular = seg.mode == ControlMode::Singular;
        const double x_ref = seg.x_ref;
        auto rhs = [&, u_fixed, singular, x_ref](double t, const double* yv,
                                                 double* dy) {
            const double x =
                std::clamp(sp.eval_component(t, 0), 1e-12 * xb, xb);
            double u = u_fixed;
            if (singular) {
                const double K = sp.eval_component(t, 1);
                if (K > 0.0)
                    u = std::clamp(
                        m.production->value(x_ref) / (x_ref * K), 0.0, 1.0);
                else
                    u = 0.0;
            }
            dy[0] = yv[0] * eval_g(m, x) - eval_psi(m, x);
            dy[1] = kappa * yv[1] - yv[0] * u;
        };
        DenseSpan span = ode_integrate(rhs, 2, a, b, y, settings);
        y = span.eval(b);
        traj.adj_spans_.push_back(std::move(span));
    }
}

double detect_event(const Trajectory& traj,
                    const std::function<double(double, const State&)>& fn,
                    double a, double b, double tol) {
    if (!(b > a)) throw std::invalid_argument("detect_event needs b > a");
    auto g = [&](double t) { return fn(t, traj.state_at(t)); };
    const int n = 4096;
    double tp = a;
    double gp = g(tp);
    if (gp == 0.0) return tp;
    for (int i = 1; i <= n; ++i) {
        const double tc = a + (b - a) * static_cast<double>(i) / n;
        const double gc = g(tc);
        if (gc == 0.0) return tc;
        if ((gp < 0.0) != (gc < 0.0))
            return brent_root(g, tp, tc, tol);
        tp = tc;
        gp = gc;
    }
    throw NoCrossing("no event in [" + std::to_string(a) + ", " +
                     std::to_string(b) + "]");
}

ObjectiveBreakdown evaluate_objective(const Trajectory& traj,
                                      const TailRule& rule) {
    ObjectiveBreakdown out;
    const double H = traj.t1();
    out.running = traj.J_at(H);
    if (rule.kind == TailKind::Zero) return out;

    const ModelParams& m = traj.params();
    const auto& e = m.econ;
    const double x = traj.x_at(H);
    const double K = traj.K_at(H);
    const double disc = std::exp(-e.delta * H);
    // Holding (x, K): density gamma K keeps K level, u = F(x)/(x K) keeps x.
    out.tail = disc * K * (e.r * e.gamma + e.c - e.p * x) / e.delta;
    out.tail_bound =
        disc * ((e.p * m.x_bar() + e.c) * K + e.r * e.gamma * K) / e.delta;
    return out;
}

namespace {

void append_g17(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

} // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double t0 = traj.t0(), t1 = traj.t1();
    std::vector<double> ts;
    for (std::size_t i = 0;; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        if (t >= t1) break;
        ts.push_back(t);
    }
    for (double t : traj.mesh_times()) ts.push_back(t);
    ts.push_back(t1);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double a, double b) {
                             return std::fabs(a - b) <= time_tol(b);
                         }),
             ts.end());

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,x,K,u,z,lambda,J_running\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double t : ts) {
        std::string line;
        append_g17(line, t);
        line += ',';
        append_g17(line, traj.x_at(t));
        line += ',';
        append_g17(line, traj.K_at(t));
        line += ',';
        append_g17(line, traj.u_at(t));
        line += ',';
        const bool adj = traj.has_adjoint(t);
        append_g17(line, adj ? traj.z_at(t) : nan);
        line += ',';
        append_g17(line, adj ? traj.lambda_at(t) : nan);
        line += ',';
        append_g17(line, traj.J_at(t));
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json jumps_to_json(const Trajectory& traj) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& j : traj.jumps())
        arr.push_back(
            {{"t", j.t}, {"K_minus", j.K_minus}, {"K_plus", j.K_plus}});
    return arr;
}

} // namespace fishery
