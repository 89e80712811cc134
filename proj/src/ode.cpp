#include "fishery/ode.hpp"

#include <algorithm>
#include <cmath>

#include "fishery/numerics.hpp"

namespace fishery {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

// Quartic dense-output weights: stage j contributes
// h k_j (P[j][0] s + P[j][1] s^2 + P[j][2] s^3 + P[j][3] s^4) on s in [0,1].
constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0}};

double error_norm(const std::vector<double>& err, const std::vector<double>& y0,
                  const std::vector<double>& y1, double atol, double rtol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc =
            atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
        const double e = err[i] / sc;
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

struct EventState {
    double prev_f = 0.0;
    bool armed = false;
};

void update_arming(const EventSpec& ev, EventState& st, double f) {
    if (ev.direction > 0) {
        if (f < -ev.arm_threshold && (ev.arm_threshold > 0.0 || f < 0.0))
            st.armed = true;
    } else if (ev.direction < 0) {
        if (f > ev.arm_threshold && (ev.arm_threshold > 0.0 || f > 0.0))
            st.armed = true;
    }
}

} // namespace

void DenseStep::eval(double t, double* out) const {
    const double s = (h == 0.0) ? 0.0 : (t - t0) / h;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        const auto& c = q[i];
        out[i] = y0[i] + h * s * (c[0] + s * (c[1] + s * (c[2] + s * c[3])));
    }
}

double DenseStep::eval_component(double t, std::size_t i) const {
    const double s = (h == 0.0) ? 0.0 : (t - t0) / h;
    const auto& c = q[i];
    return y0[i] + h * s * (c[0] + s * (c[1] + s * (c[2] + s * c[3])));
}

void DenseSpan::eval(double t, double* out) const {
    if (steps_.empty()) throw NumericsError("DenseSpan: empty");
    const double tc = std::clamp(t, t_begin_, t_end_);
    std::size_t lo = 0, hi = steps_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (steps_[mid].t0 <= tc)
            lo = mid;
        else
            hi = mid - 1;
    }
    steps_[lo].eval(tc, out);
}

double DenseSpan::eval_component(double t, std::size_t i) const {
    if (steps_.empty()) throw NumericsError("DenseSpan: empty");
    const double tc = std::clamp(t, t_begin_, t_end_);
    std::size_t lo = 0, hi = steps_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (steps_[mid].t0 <= tc)
            lo = mid;
        else
            hi = mid - 1;
    }
    return steps_[lo].eval_component(tc, i);
}

std::vector<double> DenseSpan::eval(double t) const {
    std::vector<double> out(dim_);
    eval(t, out.data());
    return out;
}

std::vector<double> DenseSpan::step_times() const {
    std::vector<double> ts;
    ts.reserve(steps_.size() + 1);
    for (const auto& st : steps_) ts.push_back(st.t0);
    ts.push_back(t_end_);
    return ts;
}

class Dp5Integrator {
  public:
    Dp5Integrator(const OdeRhs& f, std::size_t dim, const OdeSettings& s)
        : f_(f), dim_(dim), s_(s) {
        for (auto& v : k_) v.assign(dim, 0.0);
        y_tmp_.assign(dim, 0.0);
        y_new_.assign(dim, 0.0);
        err_.assign(dim, 0.0);
    }

    DenseSpan run(double t0, double t1, const std::vector<double>& y0,
                  const std::vector<EventSpec>* events, EventResult* result,
                  double t_tol) {
        if (!(t1 > t0))
            throw std::invalid_argument("ode_integrate: need t1 > t0");
        if (y0.size() != dim_)
            throw std::invalid_argument("ode_integrate: state size mismatch");

        DenseSpan span;
        span.dim_ = dim_;
        span.t_begin_ = t0;
        span.t_end_ = t0;

        std::vector<double> y = y0;
        double t = t0;
        f_(t, y.data(), k_[0].data());

        std::vector<EventState> estate;
        if (events) {
            estate.resize(events->size());
            for (std::size_t j = 0; j < events->size(); ++j) {
                estate[j].prev_f = (*events)[j].fn(t, y.data());
                update_arming((*events)[j], estate[j], estate[j].prev_f);
            }
        }

        double h = (s_.h_init > 0.0)
                       ? std::min({s_.h_init, t1 - t0, s_.h_max})
                       : initial_step(t, y, t1 - t0);

        std::size_t n_steps = 0;
        while (t < t1) {
            if (++n_steps > s_.max_steps)
                throw StepFailure("ode_integrate: step budget exhausted");
            h = std::min({h, t1 - t, s_.h_max});
            const double h_floor =
                16.0 * std::numeric_limits<double>::epsilon() *
                std::max(std::fabs(t), 1.0);
            if (h < h_floor)
                throw StepFailure("ode_integrate: step size underflow at t=" +
                                  std::to_string(t));

            double h_next = 0.0;
            if (!attempt(t, y, h, h_next)) {
                h = h_next;
                continue;
            }

            DenseStep step;
            step.t0 = t;
            step.h = h;
            step.y0 = y;
            step.q.resize(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
                for (int m = 0; m < 4; ++m) {
                    double acc = 0.0;
                    for (int j = 0; j < 7; ++j) acc += k_[j][i] * P[j][m];
                    step.q[i][m] = acc;
                }
            }
            span.steps_.push_back(std::move(step));
            const double t_new = t + h;

            if (events &&
                locate_event(span.steps_.back(), *events, estate, t, t_new,
                             y_new_, t_tol, result)) {
                span.t_end_ = result->t;
                return span;
            }

            std::swap(k_[0], k_[6]); // FSAL
            y = y_new_;
            t = t_new;
            span.t_end_ = t;
            h = h_next;
        }
        if (result) result->hit = false;
        return span;
    }

  private:
    double initial_step(double t0, const std::vector<double>& y0,
                        double t_span) {
        auto scaled_norm = [&](const std::vector<double>& v,
                               const std::vector<double>& ref) {
            double sum = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                const double sc =
                    s_.abs_tol + s_.rel_tol * std::fabs(ref[i]);
                const double e = v[i] / sc;
                sum += e * e;
            }
            return std::sqrt(sum / static_cast<double>(dim_));
        };
        const std::vector<double>& f0 = k_[0];
        const double d0 = scaled_norm(y0, y0);
        const double d1 = scaled_norm(f0, y0);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, 0.1 * t_span);
        std::vector<double> y1(dim_), f1(dim_), df(dim_);
        for (std::size_t i = 0; i < dim_; ++i) y1[i] = y0[i] + h0 * f0[i];
        f_(t0 + h0, y1.data(), f1.data());
        for (std::size_t i = 0; i < dim_; ++i) df[i] = f1[i] - f0[i];
        const double d2 = scaled_norm(df, y0) / h0;
        double h1;
        if (std::max(d1, d2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
        return std::min({100.0 * h0, h1, t_span, s_.h_max});
    }

    bool attempt(double t, const std::vector<double>& y, double h,
                 double& h_next) {
        auto& k = k_;
        auto& yt = y_tmp_;
        const std::size_t n = dim_;

        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * A21 * k[0][i];
        f_(t + C2 * h, yt.data(), k[1].data());
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        f_(t + C3 * h, yt.data(), k[2].data());
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        f_(t + C4 * h, yt.data(), k[3].data());
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] +
                                A53 * k[2][i] + A54 * k[3][i]);
        f_(t + C5 * h, yt.data(), k[4].data());
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] +
                                A64 * k[3][i] + A65 * k[4][i]);
        f_(t + h, yt.data(), k[5].data());
        for (std::size_t i = 0; i < n; ++i)
            y_new_[i] = y[i] + h * (B1 * k[0][i] + B3 * k[2][i] +
                                    B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        f_(t + h, y_new_.data(), k[6].data());
        for (std::size_t i = 0; i < n; ++i)
            err_[i] = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] +
                           E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);

        const double err = error_norm(err_, y, y_new_, s_.abs_tol, s_.rel_tol);
        if (err <= 1.0) {
            h_next = (err == 0.0)
                         ? 10.0 * h
                         : h * std::min(10.0,
                                        std::max(0.2, 0.9 * std::pow(err,
                                                                     -0.2)));
            return true;
        }
        h_next = h * std::max(0.1, 0.9 * std::pow(err, -0.2));
        return false;
    }

    bool locate_event(const DenseStep& step, const std::vector<EventSpec>& evs,
                      std::vector<EventState>& st, double t_a, double t_b,
                      const std::vector<double>& y_b, double t_tol,
                      EventResult* result) {
        double best_t = std::numeric_limits<double>::infinity();
        int best_j = -1;
        std::vector<double> buf(dim_);
        for (std::size_t j = 0; j < evs.size(); ++j) {
            const EventSpec& ev = evs[j];
            const double fa = st[j].prev_f;
            const double fb = ev.fn(t_b, y_b.data());
            update_arming(ev, st[j], fa);

            bool crossing = false;
            if (ev.direction > 0)
                crossing = st[j].armed && fa <= 0.0 && fb > 0.0;
            else if (ev.direction < 0)
                crossing = st[j].armed && fa >= 0.0 && fb < 0.0;
            else
                crossing = (fa < 0.0 && fb >= 0.0) || (fa > 0.0 && fb <= 0.0);

            if (crossing) {
                double root;
                if (fa == 0.0) {
                    root = t_a;
                } else {
                    auto g = [&](double tt) {
                        step.eval(tt, buf.data());
                        return ev.fn(tt, buf.data());
                    };
                    try {
                        root = brent_root(g, t_a, t_b, t_tol);
                    } catch (const NoSignChange&) {
                        root = t_b;
                    }
                }
                if (root < best_t) {
                    best_t = root;
                    best_j = static_cast<int>(j);
                }
            }

            st[j].prev_f = fb;
            update_arming(ev, st[j], fb);
        }
        if (best_j >= 0 && result) {
            result->hit = true;
            result->which = best_j;
            result->t = best_t;
            result->y.assign(dim_, 0.0);
            step.eval(best_t, result->y.data());
            return true;
        }
        return false;
    }

    const OdeRhs& f_;
    std::size_t dim_;
    OdeSettings s_;
    std::vector<double> k_[7];
    std::vector<double> y_tmp_, y_new_, err_;
};

DenseSpan ode_integrate(const OdeRhs& f, std::size_t dim, double t0, double t1,
                        const std::vector<double>& y0,
                        const OdeSettings& settings) {
    Dp5Integrator integ(f, dim, settings);
    return integ.run(t0, t1, y0, nullptr, nullptr, 1e-12);
}

DenseSpan ode_integrate_events(const OdeRhs& f, std::size_t dim, double t0,
                               double t1, const std::vector<double>& y0,
                               const std::vector<EventSpec>& events,
                               EventResult& result, const OdeSettings& settings,
                               double t_tol) {
    Dp5Integrator integ(f, dim, settings);
    result = EventResult{};
    return integ.run(t0, t1, y0, &events, &result, t_tol);
}

} // namespace fishery
