#pragma once

#include "sigmak/kspec.hpp"
#include "sigmak/sphere.hpp"

namespace sigmak {

struct StepUnderflow : ConvergenceError {
    using ConvergenceError::ConvergenceError;
};

struct HomotopyConfig {
    int n = 4, k = 2;
    int N = 256;            // colatitude subdivisions
    double tol = 1e-8;      // acceptance residual (sup norm)
    double inner_tol = 1e-11; // Newton target (deeper, so solutions are sharp)
    double mu_first = 0.05;
    double mu_step_min = 1e-4, mu_step_max = 0.1;
    int newton_max = 40;
    double reduced_tol = 1e-9; // projected-residual target of reduced solves
    double xi_scan = 0.8;      // scan range for the initial Lambda root
};

/// K_mu offset: sigma_k of the round sphere, 2^{-k} binom(n,k)
double round_sigma_k(int n, int k);

/// F_mu[v] = sigma_k(lambda(A_{g_v})) - (mu K + (1-mu) round); throws
/// ConeError (listing nodes) when lambda(A_{g_v}) leaves Gamma_k anywhere.
std::vector<double> residual_field(const SphereAxisymField& v, const AxisymK& K, double mu, int k);

/// min over nodes of min_{j<=k} sigma_j(lambda)^{1/j} (negative branch kept
/// sign-symmetric so violations show as negative margins)
double cone_margin(const SphereAxisymField& v, int k);

/// dense Jacobian d sigma_k(lambda(A_{g_v}))_i / d v_m, (N+1)^2 row-major;
/// assembled analytically through dsigma_dA and the stencil weights
std::vector<double> linearize_sigma(const SphereAxisymField& v, int k);

/// discrete projection removing the first-harmonic component:
/// f - cos(theta) <f, cos>_w / <cos, cos>_w  (idempotent by construction)
std::vector<double> project_Pi(const std::vector<double>& f, int n, int N);

/// pi(w, xi) = T_{phi_{P,t}^{-1}} w with P = sign(xi) e_{n+1},
/// t = (1-|xi|)^{-1}; xi = 0 is the identity. |xi| < 1 required.
SphereAxisymField pi_parametrize(const SphereAxisymField& w, double xi);

/// the same linear map as a dense (N+1)^2 matrix acting on node values
std::vector<double> pi_matrix(int n, int N, double xi);

/// dense matrix of T_{phi_{P,t}} on node values (pole = +1 or -1)
std::vector<double> mobius_matrix(int n, int N, double t, int pole);

struct ReducedSolution {
    double xi = 0;
    double mu = 0;
    SphereAxisymField w;         // S_0 part, = T_{phi_{P,t}} v
    SphereAxisymField v;         // the field pi(w, xi) actually solved for
    std::vector<double> Lambda;  // R^{n+1}; only the last component can be nonzero
    double proj_residual = 0;    // sup |Pi F_mu[pi(w, xi)]|
    double center_mass = 0;      // <x_{n+1}, w^{2n/(n-2)}>_w, ~0 in S_0
    int newton_steps = 0;
};

/// Solve Pi(F_mu[pi(w, xi)]) = 0 for w in the discrete S_0 slice by damped
/// projected Newton. The iteration runs on v = pi(w, xi) (the Jacobian stays
/// a local stencil operator there; the interpolation of the Mobius map enters
/// only through the scalar S_0 constraint), w is recovered at the end.
ReducedSolution solve_reduced(const AxisymK& K, double xi, double mu,
                              const HomotopyConfig& cfg = {});

struct ConsistencyReport {
    double lambda_def = 0;  // Lambda_{n+1} from the definition
    double lambda_kw = 0;   // mu * (KW quadrature) / Gram, the Kazdan-Warner route
    double rel_gap = 0;
};
/// compare the reduced-map value with the independently quadratured linear
/// system coming from the Kazdan-Warner identity
ConsistencyReport reduced_consistency(const AxisymK& K, double xi, double mu,
                                      const HomotopyConfig& cfg = {});

struct HomotopyState {
    double mu = 0;
    double residual_norm = 0; // sup norm after the solve at this mu
    double cone_margin = 0;
    int newton_steps = 0;
};

struct HomotopyResult {
    SphereAxisymField v;
    std::vector<HomotopyState> trace;
    double xi = 0;        // reduced-stage position of the initial bubble parameter
    double kw_norm = 0;   // |Kazdan-Warner integral| of the final solution
    double residual = 0;  // final sup-norm residual at mu = 1
    double margin = 0;    // final cone margin
};

/// Homotopy continuation from the round curvature to K: bootstrap at
/// mu_first through the reduced map (root of Lambda in xi), then damped
/// Newton continuation in mu with cone guard. Throws ConeError,
/// ConvergenceError, StepUnderflow.
HomotopyResult solve_homotopy(const AxisymK& K, const HomotopyConfig& cfg = {});

} // namespace sigmak
