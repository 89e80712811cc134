#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fishery/model.hpp"
#include "fishery/numerics.hpp"
#include "fishery/ode.hpp"

namespace fishery {

// Sampled planar curve in the (x, K) plane with the sweep parameter that
// produced each sample.
struct CurveSample {
    double x = 0.0;
    double K = 0.0;
    double param = 0.0;
};

struct Curve {
    std::string name;
    std::vector<CurveSample> samples;

    nlohmann::json to_json() const;
};

// Entry/exit data for one member of the switching-surface sweep: start
// capital K1, switch time sigma, state and multipliers at the switch.
struct SweepMember {
    double K1 = 0.0;
    double sigma = 0.0;
    double x_sigma = 0.0;
    double z_sigma = 0.0;
    double lambda_sigma = 0.0;
};

// Landmark values of the portrait.
struct Specials {
    double x_tilde = 0.0;
    double K_tilde = 0.0;
    double x_star = 0.0;
    double K_star = 0.0;
    double K_tilde1 = 0.0;   // largest start capital whose z-arc stays positive
    double K_dtilde = 0.0;   // capital at the tangential switch, K_tilde1 e^{gamma sigma*}
    double sigma_star = 0.0; // switch time of the tangential member
    double x_breve = 0.0;    // stock reached from K1 = 0 at its switch
    double x_hat = 0.0;      // stock where the swept switch capitals meet F(x)/x
    double K_hat = 0.0;
    double lambda_tilde = 0.0; // lambda at the tangential switch
    double x_s = 0.0;          // right end of the dominated-start boundary
    double K_bar = 0.0;        // its capital there
    bool xs_equals_xbar = false;
    double x_floor = 0.0; // left cutoff for the no-harvest separatrix

    nlohmann::json to_json() const;
};

struct PortraitDiagnostics {
    double gamma2_landing_gap = 0.0; // |K - K_tilde1| where the arc from
                                     // (x_tilde, K_dtilde) meets x_star
    double sigma_s_junction_gap = 0.0; // distance from the last dominated-start
                                       // sample to the no-investment arc
    bool hs_pruned = false; // dominated-start boundary lost samples to
                            // enforce monotone abscissae
    int sigma0_members = 0;
    int sigma_s_members = 0;

    nlohmann::json to_json() const;
};

// Full curve family for one parameter set: switching surfaces, separatrices,
// and the interpolating maps the classifier uses.
class PhasePortrait {
public:
    PhasePortrait(ModelParams m, DerivedConstants d);

    const ModelParams& params() const { return m_; }
    const DerivedConstants& constants() const { return d_; }
    const Specials& specials() const { return sp_; }
    const PortraitDiagnostics& diagnostics() const { return diag_; }

    // Sampled curves, each at least 400 points: gamma1, sigma0, gamma2,
    // gamma3, gamma4, sigma_s.
    const std::vector<Curve>& curves() const { return curves_; }
    const Curve& curve(const std::string& name) const;

    // Interpolants.  h1: K on gamma1 over [x_star, x_bar].  h0: K on sigma0
    // over [x_hat, x_tilde].  hs: K on sigma_s over [x_star, x_s].
    // gamma3/gamma4: K by x.  s0_by_K: x on sigma0 by K over [0, K_tilde1].
    // l_by_K1: switch time by start capital.  Lambda_by_K1: lambda at the
    // switch for dominated starts.
    const MonotoneMap& h1() const { return h1_; }
    const MonotoneMap& h0() const { return h0_; }
    const MonotoneMap& hs() const { return hs_; }
    const MonotoneMap& gamma3_by_x() const { return gamma3_by_x_; }
    const MonotoneMap& gamma4_by_x() const { return gamma4_by_x_; }
    const MonotoneMap& s0_by_K() const { return s0_by_K_; }
    const MonotoneMap& l_by_K1() const { return l_by_K1_; }
    double Lambda_of_K1(double K1) const; // closed form, K1 in (0, K_star]

    const std::vector<SweepMember>& sigma0_sweep() const { return sweep0_; }
    const std::vector<SweepMember>& sigma_s_sweep() const { return sweeps_; }

    nlohmann::json to_json() const;

private:
    ModelParams m_;
    DerivedConstants d_;
    Specials sp_;
    PortraitDiagnostics diag_;
    std::vector<Curve> curves_;
    MonotoneMap h1_, h0_, hs_, gamma3_by_x_, gamma4_by_x_, s0_by_K_, l_by_K1_;
    std::vector<SweepMember> sweep0_, sweeps_;

    void build_gamma1();
    void build_sigma0();
    void build_gamma2_3(); // gamma3 and the cross-check arc gamma2
    void build_gamma4();
    void build_sigma_s();
};

// Standalone pieces, exposed for tests.

// No-investment separatrix from (x_star, K_star) run backward to x_bar:
// x' = -F(x) + K x, K' = gamma K.
Curve trace_gamma1(const ModelParams& m, const DerivedConstants& d,
                   int min_samples = 400);

// One member of the pre-harvest sweep: from (x1, 0) with capital K1 e^{gamma t}
// and no harvest, multipliers started at (z, lambda) = (0, lambda1).
// Integrates x' = F(x), z' = z g(x) - psi(x), lambda' = kappa lambda until
// the stopping function fires.
struct Sigma0Member {
    double K1 = 0.0;
    double sigma = 0.0;
    DenseSpan span; // channels x, z, lambda
};

// Switch data for a dominated start: time tau at which lambda returns to r.
struct SigmaSMember {
    double K1 = 0.0;
    double tau = 0.0;
    double x_tau = 0.0;
    double z_tau = 0.0;
};

// Scaled sweep step used near K_star, exposed for the asymptotic tests:
// s = K_star - K1.
SigmaSMember sigma_s_switch(const ModelParams& m, const DerivedConstants& d,
                            double K1);

} // namespace fishery
