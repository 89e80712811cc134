#include "fishery/model.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "fishery/numerics.hpp"

namespace fishery {

double ProductionFunction::per_capita(double x) const {
    if (x == 0.0) return per_capita_limit0();
    return value(x) / x;
}

double ProductionFunction::per_capita_diff(double x, double h) const {
    return per_capita(x + h) - per_capita(x);
}

double ProductionFunction::d1_diff(double x, double h) const {
    return d1(x + h) - d1(x);
}

LogisticProduction::LogisticProduction(double a, double k) : a_(a), k_(k) {
    if (!(a > 0.0) || !(k > 0.0))
        throw std::invalid_argument("logistic production needs a > 0, k > 0");
}

double LogisticProduction::value(double x) const {
    return a_ * x * (1.0 - x / k_);
}

double LogisticProduction::d1(double x) const {
    return a_ * (1.0 - 2.0 * x / k_);
}

double LogisticProduction::d2(double x) const {
    (void)x;
    return -2.0 * a_ / k_;
}

double LogisticProduction::per_capita(double x) const {
    return a_ * (1.0 - x / k_);
}

double LogisticProduction::per_capita_diff(double x, double h) const {
    (void)x;
    return -a_ * h / k_;
}

double LogisticProduction::d1_diff(double x, double h) const {
    (void)x;
    return -2.0 * a_ * h / k_;
}

nlohmann::json LogisticProduction::to_json() const {
    return {{"type", "logistic"}, {"a", a_}, {"k", k_}};
}

double eval_g(const ModelParams& m, double x) {
    if (!(x > 0.0) || x > m.x_bar())
        throw std::domain_error("eval_g: x outside (0, x_bar]");
    const auto& F = *m.production;
    return m.econ.delta - F.d1(x) + F.per_capita(x);
}

double eval_g_limit0(const ModelParams& m) {
    const auto& F = *m.production;
    return m.econ.delta - F.d1(0.0) + F.per_capita_limit0();
}

double eval_psi(const ModelParams& m, double x) {
    if (!(x > 0.0) || x > m.x_bar())
        throw std::domain_error("eval_psi: x outside (0, x_bar]");
    const auto& F = *m.production;
    return (m.econ.p * x - m.econ.c) * (m.econ.delta - F.d1(x)) -
           m.econ.c * F.per_capita(x);
}

double eval_psi_star(const ModelParams& m, double x) {
    if (!(x > 0.0) || x > m.x_bar())
        throw std::domain_error("eval_psi_star: x outside (0, x_bar]");
    const auto& F = *m.production;
    const double cs = m.c_star();
    return (m.econ.p * x - cs) * (m.econ.delta - F.d1(x)) -
           cs * F.per_capita(x);
}

double psi_star_diff(const ModelParams& m, double x0, double h) {
    const auto& F = *m.production;
    const double cs = m.c_star();
    return m.econ.p * h * (m.econ.delta - F.d1(x0 + h)) -
           (m.econ.p * x0 - cs) * F.d1_diff(x0, h) -
           cs * F.per_capita_diff(x0, h);
}

nlohmann::json DerivedConstants::to_json() const {
    return {{"kappa", kappa},     {"r_prime", r_prime},
            {"c_star", c_star},   {"x_bar", x_bar},
            {"x_tilde", x_tilde}, {"K_tilde", K_tilde},
            {"x_star", x_star},   {"K_star", K_star},
            {"stationary_value", stationary_value}};
}

namespace {

// Scan + Brent, then polish the bracket until |f| < 1e-12 and the bracket is
// narrower than 1e-13.
double sharp_root(const ScalarFn& f, double a, double b, int n,
                  const char* what) {
    double x0;
    try {
        x0 = scan_root(f, a, b, n, 1e-15);
    } catch (const NoRoot&) {
        throw NoRoot(std::string("derive_constants: no root of ") + what +
                     " inside (0, x_bar)");
    }
    if (std::fabs(f(x0)) > 1e-12)
        throw NoRoot(std::string("derive_constants: root of ") + what +
                     " did not converge");
    return x0;
}

} // namespace

DerivedConstants derive_constants(const ModelParams& m) {
    const double xb = m.x_bar();
    DerivedConstants d{};
    d.kappa = m.kappa();
    d.r_prime = m.r_prime();
    d.c_star = m.c_star();
    d.x_bar = xb;

    const double lo = 1e-9 * xb;
    d.x_tilde =
        sharp_root([&](double x) { return eval_psi(m, x); }, lo, xb, 1024,
                   "psi");
    d.x_star =
        sharp_root([&](double x) { return eval_psi_star(m, x); }, lo, xb, 1024,
                   "psi*");
    d.K_tilde = m.production->per_capita(d.x_tilde);
    d.K_star = m.production->per_capita(d.x_star);

    if (!(d.x_tilde < d.x_star) || !(d.K_tilde > d.K_star))
        throw SweepFailure("derive_constants: x_tilde < x_star < x_bar with "
                           "K_tilde > K_star failed");

    const auto& e = m.econ;
    d.stationary_value =
        d.K_star * (e.r * e.gamma + e.c - e.p * d.x_star) / e.delta;
    return d;
}

bool AssumptionReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::json AssumptionReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"id", c.id}, {"pass", c.pass}, {"message", c.message}});
    return {{"all_pass", all_pass()},
            {"grid_size", grid_size},
            {"conditions", arr}};
}

AssumptionReport verify_assumptions(const ModelParams& m, int grid_size) {
    if (grid_size < 100)
        throw std::invalid_argument("verify_assumptions: grid_size >= 100");
    AssumptionReport rep;
    rep.grid_size = grid_size;
    const auto& F = *m.production;
    const double xb = m.x_bar();
    const double fd = 1e-6 * xb;

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(grid_size));
    for (int i = 1; i <= grid_size; ++i)
        grid.push_back(xb * static_cast<double>(i) / (grid_size + 1));

    // V1: F vanishes at 0 and x_bar, is positive between, strictly concave
    // up to and including the endpoints.
    {
        bool ok = std::fabs(F.value(0.0)) <= 1e-12 &&
                  std::fabs(F.value(xb)) <= 1e-12 * std::max(1.0, xb) &&
                  F.d2(0.0) < 0.0 && F.d2(xb) < 0.0;
        std::string msg = ok ? "" : "F'' >= 0 at an endpoint";
        for (double x : grid) {
            if (!msg.empty()) break;
            if (!(F.value(x) > 0.0)) {
                ok = false;
                msg = "F <= 0 at x=" + std::to_string(x);
                break;
            }
            if (!(F.d2(x) < 0.0)) {
                ok = false;
                msg = "F'' >= 0 at x=" + std::to_string(x);
                break;
            }
        }
        rep.checks.push_back({"V1", ok, ok ? "F(0)=F(x_bar)=0, F>0, F''<0"
                                           : msg});
    }
    // V2: positive economic constants.
    {
        const auto& e = m.econ;
        const bool ok =
            e.delta > 0.0 && e.gamma > 0.0 && e.c > 0.0 && e.r > 0.0;
        rep.checks.push_back(
            {"V2", ok,
             ok ? "delta, gamma, c, r > 0" : "a rate or cost is <= 0"});
    }
    // V3: effective cost stays below revenue at carrying capacity.
    {
        const double v = m.c_star() - m.econ.p * xb;
        const bool ok = v < 0.0;
        rep.checks.push_back({"V3", ok,
                              "c* - p x_bar = " + std::to_string(v)});
    }
    // V4: psi and psi* each cross zero exactly once, negative then positive.
    {
        bool ok = true;
        std::string msg = "single sign change for psi and psi*";
        using PsiFn = double (*)(const ModelParams&, double);
        const std::array<std::pair<PsiFn, const char*>, 2> fns{
            {{&eval_psi, "psi"}, {&eval_psi_star, "psi*"}}};
        for (const auto& [fn, name] : fns) {
            int changes = 0;
            double prev = fn(m, grid.front());
            for (std::size_t i = 1; i < grid.size(); ++i) {
                const double v = fn(m, grid[i]);
                if ((prev > 0.0) != (v > 0.0)) ++changes;
                prev = v;
            }
            if (changes != 1 || fn(m, grid.front()) >= 0.0 ||
                fn(m, grid.back()) <= 0.0) {
                ok = false;
                msg = std::string(name) + " does not cross from - to + once";
                break;
            }
        }
        rep.checks.push_back({"V4", ok, msg});
    }
    // V5: psi strictly increasing below its zero, psi* strictly increasing
    // between that zero and x_bar (central differences).
    {
        bool ok = true;
        std::string msg = "psi' > 0 below zero of psi, psi*' > 0 above";
        double xt = 0.0;
        try {
            xt = scan_root([&m](double x) { return eval_psi(m, x); },
                           1e-9 * xb, xb * (1.0 - 1e-9), 1024, 1e-14 * xb);
        } catch (const NumericsError&) {
            ok = false;
            msg = "psi has no zero in (0, x_bar)";
        }
        if (ok) {
            for (double x : grid) {
                if (x < xt - fd) {
                    const double d =
                        (eval_psi(m, x + fd) - eval_psi(m, x - fd)) /
                        (2.0 * fd);
                    if (!(d > 0.0)) {
                        ok = false;
                        msg = "psi nonincreasing at x=" + std::to_string(x);
                        break;
                    }
                } else if (x > xt + fd) {
                    const double d =
                        (eval_psi_star(m, x + fd) -
                         eval_psi_star(m, x - fd)) /
                        (2.0 * fd);
                    if (!(d > 0.0)) {
                        ok = false;
                        msg = "psi* nonincreasing at x=" + std::to_string(x);
                        break;
                    }
                }
            }
        }
        rep.checks.push_back({"V5", ok, msg});
    }
    // V6: g strictly increasing.
    {
        bool ok = true;
        std::string msg = "g' > 0";
        for (double x : grid) {
            const double dg = (eval_g(m, x + fd) - eval_g(m, x - fd)) /
                              (2.0 * fd);
            if (!(dg > 0.0)) {
                ok = false;
                msg = "g nonincreasing at x=" + std::to_string(x);
                break;
            }
        }
        rep.checks.push_back({"V6", ok, msg});
    }
    return rep;
}

ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams m;
    const auto& prod = j.at("production");
    const std::string type = prod.at("type").get<std::string>();
    if (type == "logistic") {
        m.production = std::make_shared<LogisticProduction>(
            prod.at("a").get<double>(), prod.at("k").get<double>());
    } else {
        throw std::invalid_argument("unknown production type: " + type);
    }
    m.econ.delta = j.at("delta").get<double>();
    m.econ.gamma = j.at("gamma").get<double>();
    m.econ.p = j.at("p").get<double>();
    m.econ.c = j.at("c").get<double>();
    m.econ.r = j.at("r").get<double>();
    return m;
}

nlohmann::json params_to_json(const ModelParams& m) {
    return {{"production", m.production->to_json()},
            {"delta", m.econ.delta},
            {"gamma", m.econ.gamma},
            {"p", m.econ.p},
            {"c", m.econ.c},
            {"r", m.econ.r}};
}

} // namespace fishery
