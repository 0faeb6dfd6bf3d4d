#pragma once

#include <map>
#include <string>

#include "sigmak/conformal.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/sphere.hpp"

namespace sigmak {

/// Residual record of one identity across grid refinements.
struct IdentityReport {
    std::string id;
    std::vector<double> hs;        // spacing per level, coarse to fine
    std::vector<double> residuals; // max pointwise residual per level
    std::vector<double> orders;    // log2(res[i-1]/res[i]); needs two h values
    std::map<std::string, double> info;

    void push(double h, double residual);
    double final_order() const; // NaN when fewer than two levels
};

using ScalarFn = std::function<double(const double*)>;

/// function with an analytic gradient, used where FD of the weight would
/// pollute a quadrature check
struct SmoothFn {
    ScalarFn f;
    std::function<void(const double*, double*)> grad;
};

// ---- divergence identities of the Newton tensors --------------------------
// Residuals are max over (a deterministic sample of) interior nodes with
// margin 4; sample_target 0 visits every interior node. A caller may pin the
// evaluation nodes explicitly (refinement studies keep the same physical
// points across levels so the observed order is clean).

using SampleSet = std::vector<std::vector<int>>;

/// | div T_l  -  (n-2l) T_l grad psi + (n-l) sigma_l(F) grad psi |_inf
double check_divergence_residual(const FieldView& psi, int ell, std::int64_t sample_target = 0,
                                 const SampleSet* samples = nullptr);

/// weighted variant with weight e^{-q psi} |grad psi|^p
double check_weighted_divergence_residual(const FieldView& psi, int ell, double p, double q,
                                          std::int64_t sample_target = 0,
                                          const SampleSet* samples = nullptr);

/// summed identity with rising-factorial coefficients t^(j) / (2^j s^(j))
double check_summed_identity_residual(const FieldView& psi, int k, double q, double t, double s,
                                      std::int64_t sample_target = 0,
                                      const SampleSet* samples = nullptr);

/// coefficients of the delta-term in the (t,s) = (n-k+1, k+1+delta)
/// specialization: delta (n-k+1)^(j+1) / (2^{j+1} (k+1+delta)^(j+1)), j=0..k-1
std::vector<double> summed_specialization_coeffs(int n, int k, double delta);

// refinement drivers: psi evaluated analytically on centered cubes of the
// given half-width, baseN nodes per axis, halving h per level
IdentityReport divergence_study(int n, const ScalarFn& psi, int ell, double width, int baseN,
                                int levels, std::int64_t sample_target = 20000);
IdentityReport weighted_study(int n, const ScalarFn& psi, int ell, double p, double q, double width,
                              int baseN, int levels, std::int64_t sample_target = 20000);
IdentityReport summed_study(int n, const ScalarFn& psi, int k, double q, double t, double s,
                            double width, int baseN, int levels,
                            std::int64_t sample_target = 20000);

// ---- Cacciopoli-type integrands -------------------------------------------

struct CacciopoliReport {
    double lhs = 0;          // integral of weight * |grad psi|^{2k} over B_r
    double sigma_side = 0;   // integral of weight * sigma_k(F) over B_R
    double weight_side = 0;  // (R-r)^{-2k} * integral of weight over B_R
    double pointwise_residual = 0; // max(div X - admissible bound), FD-sized when q admissible
    double delta = 0;
    double q = 0;
    bool negative_exponent = false; // weight e^{s psi} instead of e^{-q psi}
};

/// Both integral sides of the Cacciopoli-type inequality plus the pointwise
/// residual of the divergence bound for the given delta. Requires
/// lambda(F[psi]) in the closed cone Gamma_k-bar at every sampled node.
/// For the negative-exponent variant pass the weight exponent via q (= s > 0).
CacciopoliReport cacciopoli_sides(const FieldView& psi, int k, double q, double r, double R,
                                  double delta, bool negative_exponent = false,
                                  std::int64_t sample_target = 0);

// ---- Kazdan-Warner / Pohozaev integrals ------------------------------------

/// vector of integrals of dK/dy_l * u^{2n/(n-2)} over |y| <= radius; zero on
/// exact solutions with curvature K. Throws NumericError when the outermost
/// shell contributes more than tail_tol * mass.
std::vector<double> kazdan_warner(const FieldView& u, const SmoothFn& K, double radius,
                                  double tail_tol = 1e-3);

/// integral of y . grad K * u^{2n/(n-2)}
double pohozaev(const FieldView& u, const SmoothFn& K, double radius, double tail_tol = 1e-3);

/// sphere version for axisymmetric data: the e_{n+1} component of
/// int < grad K, grad x_i > v^{2n/(n-2)} dv_{g0} (other components vanish)
double kazdan_warner_axisym(const SphereAxisymField& v,
                            const std::function<double(double)>& dK_dtheta);

// ---- moments ---------------------------------------------------------------

struct MomentSet {
    double M = 0;               // mass of u^{2n/(n-2)} over |y| <= r0
    std::vector<double> mu_p;   // first moments / M
    std::vector<double> mu_lp;  // second moments / M, row-major n x n
    double r0 = 0;
};
MomentSet moments(const FieldView& u, double r0);

/// lam^d * int_{|y|<=r0} q(y) bubble_lam(y)^{2n/(n-2)} dy for homogeneous q of
/// degree d in [0, n); converges to int q(z) (1+|z|^2)^{-n} dz as lam grows.
double moment_limit(const ScalarFn& q, double d, double lam, int n, double r0);

// ---- convexity of the conformal Hessian ------------------------------------

struct ConvexityReport {
    double min_eigenvalue = 0;   // over all sampled nodes
    std::int64_t nodes = 0;
};

/// min eigenvalue of A_{(w1+w2)/2} - (A_{w1}+A_{w2})/2 with
/// A_w = Hess w - |grad w|^2/(2w) I, over interior nodes
ConvexityReport check_convexity(const FieldView& w1, const FieldView& w2,
                                std::int64_t sample_target = 0);

// ---- small-energy profile ----------------------------------------------------

struct DeltaEnergyReport {
    double T = 0;      // sup dist(x, boundary)^{(n-2)/2} u(x)
    double energy = 0; // int u^{2n/(n-2)} over the domain
};

/// domain is the ball |x| <= r_out (r_in = 0) or the annulus r_in <= |x| <= r_out
DeltaEnergyReport delta_energy_profile(const FieldView& u, double r_in, double r_out);

} // namespace sigmak
