#include "fishery/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fishery {

double brent_root(const ScalarFn& f, double a, double b, double xtol,
                  int max_iter) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NoSignChange("brent_root: f(a) and f(b) have the same sign");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 =
            2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) +
            0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double rr = fb / fc;
                p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
            const double min2 = std::fabs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > tol1)
            b += d;
        else
            b += (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

double scan_root(const ScalarFn& f, double a, double b, int n, double xtol) {
    double x_prev = a;
    double f_prev = f(a);
    if (f_prev == 0.0) return a;
    for (int i = 1; i <= n; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / n;
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((f_prev > 0.0) != (fx > 0.0))
            return brent_root(f, x_prev, x, xtol);
        x_prev = x;
        f_prev = fx;
    }
    throw NoRoot("scan_root: no sign change on the interval");
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo,
                        double hi, double tol, int max_iter) {
    if (!pred(lo))
        throw SweepFailure("bisect_predicate: predicate false at lower end");
    if (pred(hi))
        throw SweepFailure("bisect_predicate: predicate true at upper end");
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    if (n == 1) {
        out.push_back(a);
        return out;
    }
    for (int i = 0; i < n; ++i)
        out.push_back(a + (b - a) * static_cast<double>(i) / (n - 1));
    return out;
}

MonotoneMap::MonotoneMap(std::string name, std::vector<double> xs,
                         std::vector<double> ys)
    : name_(std::move(name)), xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.size() < 2)
        throw std::invalid_argument("MonotoneMap: need >= 2 matched points");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i] > xs_[i - 1]))
            throw std::invalid_argument("MonotoneMap '" + name_ +
                                        "': abscissae not increasing");

    const std::size_t n = xs_.size();
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs_[i + 1] - xs_[i];
        del[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }
    slopes_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] == 0.0 || del[i] == 0.0 ||
            (del[i - 1] > 0.0) != (del[i] > 0.0)) {
            slopes_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            slopes_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    // Non-centered three-point endpoint slopes, clamped to preserve shape.
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if ((s > 0.0) != (d0 > 0.0) || d0 == 0.0)
            s = 0.0;
        else if ((d0 > 0.0) != (d1 > 0.0) && std::fabs(s) > 3.0 * std::fabs(d0))
            s = 3.0 * d0;
        return s;
    };
    if (n == 2) {
        slopes_[0] = slopes_[1] = del[0];
    } else {
        slopes_[0] = endpoint(h[0], h[1], del[0], del[1]);
        slopes_[n - 1] = endpoint(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }
}

std::size_t MonotoneMap::cell(double x) const {
    if (xs_.empty() || x < xs_.front() || x > xs_.back())
        throw std::domain_error("MonotoneMap '" + name_ + "': query " +
                                std::to_string(x) + " outside [" +
                                std::to_string(xs_.empty() ? 0.0 : xs_.front()) +
                                ", " +
                                std::to_string(xs_.empty() ? 0.0 : xs_.back()) +
                                "]");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (i > 0) --i;
    if (i + 1 >= xs_.size()) i = xs_.size() - 2;
    return i;
}

double MonotoneMap::operator()(double x) const {
    const std::size_t i = cell(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * ys_[i] + h * h10 * slopes_[i] + h01 * ys_[i + 1] +
           h * h11 * slopes_[i + 1];
}

double MonotoneMap::derivative(double x) const {
    const std::size_t i = cell(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    const double d00 = (6.0 * t2 - 6.0 * t) / h;
    const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double d01 = (-6.0 * t2 + 6.0 * t) / h;
    const double d11 = 3.0 * t2 - 2.0 * t;
    return d00 * ys_[i] + d10 * slopes_[i] + d01 * ys_[i + 1] +
           d11 * slopes_[i + 1];
}

bool MonotoneMap::values_strictly(int direction) const {
    for (std::size_t i = 1; i < ys_.size(); ++i) {
        if (direction > 0 && !(ys_[i] > ys_[i - 1])) return false;
        if (direction < 0 && !(ys_[i] < ys_[i - 1])) return false;
    }
    return true;
}

} // namespace fishery
