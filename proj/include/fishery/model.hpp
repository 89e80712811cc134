#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "fishery/errors.hpp"

namespace fishery {

// Stock production function F. Required shape: F(0) = F(x_bar) = 0 with
// x_bar > 0, F > 0 and strictly concave in between.
class ProductionFunction {
  public:
    virtual ~ProductionFunction() = default;

    virtual double value(double x) const = 0;
    virtual double d1(double x) const = 0;
    virtual double d2(double x) const = 0;

    // F(x)/x, with the analytic continuation at x = 0.
    virtual double per_capita(double x) const;
    virtual double per_capita_limit0() const = 0;

    // Differences F(x+h)/(x+h) - F(x)/x and F'(x+h) - F'(x). The defaults
    // subtract the two evaluations; concrete shapes can cancel the common
    // terms analytically so the result stays accurate for tiny h.
    virtual double per_capita_diff(double x, double h) const;
    virtual double d1_diff(double x, double h) const;

    virtual double x_bar() const = 0;
    virtual std::string type() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

// F(x) = a x (1 - x/k), the only shape the loader currently accepts.
class LogisticProduction final : public ProductionFunction {
  public:
    LogisticProduction(double a, double k);

    double value(double x) const override;
    double d1(double x) const override;
    double d2(double x) const override;
    double per_capita(double x) const override;
    double per_capita_limit0() const override { return a_; }
    double per_capita_diff(double x, double h) const override;
    double d1_diff(double x, double h) const override;
    double x_bar() const override { return k_; }
    std::string type() const override { return "logistic"; }
    nlohmann::json to_json() const override;

    double a() const { return a_; }
    double k() const { return k_; }

  private:
    double a_, k_;
};

struct EconomicParams {
    double delta;  // discount rate
    double gamma;  // capital depreciation rate
    double p;      // unit price of catch
    double c;      // unit cost of effort
    double r;      // unit price of capital
};

struct ModelParams {
    std::shared_ptr<const ProductionFunction> production;
    EconomicParams econ{};

    double x_bar() const { return production->x_bar(); }
    double kappa() const { return econ.delta + econ.gamma; }
    double r_prime() const { return econ.r * kappa(); }
    double c_star() const { return econ.c + r_prime(); }
};

// g(x) = delta - F'(x) + F(x)/x on (0, x_bar].
double eval_g(const ModelParams& m, double x);
// Analytic limit of g as x -> 0.
double eval_g_limit0(const ModelParams& m);

// psi(x)  = (p x - c)(delta - F'(x)) - c F(x)/x
double eval_psi(const ModelParams& m, double x);
// psi*(x) = (p x - c*)(delta - F'(x)) - c* F(x)/x, c* = c + r kappa
double eval_psi_star(const ModelParams& m, double x);
// psi*(x0 + h) - psi*(x0), assembled from the production-function
// difference helpers so it vanishes exactly at h = 0.
double psi_star_diff(const ModelParams& m, double x0, double h);

struct DerivedConstants {
    double kappa;
    double r_prime;
    double c_star;
    double x_bar;
    double x_tilde; // root of psi in (0, x_bar)
    double K_tilde; // F(x_tilde)/x_tilde
    double x_star;  // root of psi* in (0, x_bar)
    double K_star;  // F(x_star)/x_star

    // Discounted value of holding (x_star, K_star) forever.
    double stationary_value = 0.0;

    nlohmann::json to_json() const;
};

// Root-finds x_tilde and x_star (scan + Brent to |f| < 1e-12, bracket
// < 1e-13) and assembles the constants. Throws NoRoot when a root is
// missing, SweepFailure when the expected ordering fails.
DerivedConstants derive_constants(const ModelParams& m);

struct AssumptionCheck {
    std::string id;
    bool pass;
    std::string message;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    int grid_size = 0;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

// Evaluates the six model assumptions on a uniform grid over (0, x_bar).
// Derivatives of psi, psi*, g are taken by central differences with step
// 1e-6 * x_bar.
AssumptionReport verify_assumptions(const ModelParams& m, int grid_size = 256);

// JSON round-trip for the parameter file format:
// {"production":{"type":"logistic","a":..,"k":..},
//  "delta":..,"gamma":..,"p":..,"c":..,"r":..}
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& m);

} // namespace fishery
