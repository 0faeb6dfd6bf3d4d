#pragma once

#include <map>

#include "sigmak/kspec.hpp"
#include "sigmak/sphere.hpp"

namespace sigmak {

struct CriticalPointRecord {
    std::vector<double> x;             // unit vector in R^{n+1}
    double grad_norm = 0;              // |P_x grad K|
    double laplacian = 0;              // Laplace-Beltrami of K at x
    std::vector<double> hess_spectrum; // intrinsic Hessian eigenvalues, ascending
    int morse_index = 0;               // count of negative eigenvalues
    bool minus_class = false;          // laplacian < 0
    bool hess_degenerate = false;      // an eigenvalue within 1e-8*scale of zero
};

struct CriticalPointOptions {
    int seed_level = 6;        // sphere_rule level used for Newton seeds
    double newton_tol = 1e-12; // |tangent gradient| target
    int max_iter = 60;
    double dedup_dist = 1e-6;     // geodesic
    double nondegeneracy_tol = 1e-8; // |grad| + |lap| must exceed this
};

/// All critical points of K on S^n reachable from a quasi-uniform seed grid,
/// deduplicated; throws NondegeneracyViolation when a converged point has
/// |grad| + |laplacian| below tolerance.
std::vector<CriticalPointRecord> find_critical_points(const KFunction& K,
                                                      const CriticalPointOptions& opts = {});

/// sum over minus-class records of (-1)^{morse index}; minus-class records
/// must have nondegenerate Hessians
int deg_crit_minus(const std::vector<CriticalPointRecord>& records);

/// sum of (-1)^{morse index} over all records (equals the Euler
/// characteristic 1 + (-1)^n for Morse data); throws DegenerateZeroError on
/// degenerate Hessians
int morse_euler_sum(const std::vector<CriticalPointRecord>& records);

/// existence criterion of the prescribed-curvature problem
inline bool existence_criterion(int deg_minus, int n) {
    return deg_minus != ((n % 2 == 0) ? 1 : -1);
}

using VecMap = std::function<std::vector<double>(const std::vector<double>&)>;

struct BrouwerOptions {
    double zero_tol = 1e-10;       // |map| at an accepted zero
    double boundary_tol = 1e-8;    // min |map| on |xi| = s
    double det_tol = 1e-8;         // |det J| below this -> DegenerateZeroError
    double dedup_dist = 1e-6;
    int max_iter = 60;
    int boundary_level = 6;        // sphere rule level for the boundary scan
    int random_starts = 32;
    std::uint64_t seed = 20240811;
};

struct BrouwerResult {
    int degree = 0;
    std::vector<std::vector<double>> zeros;
    std::vector<int> signs;
};

/// Brouwer degree of map over the ball |xi| < s in R^dim by multistart
/// damped Newton with finite-difference Jacobians; zeros validated by
/// |det J| > det_tol, boundary scanned for zeros first.
BrouwerResult brouwer_degree(const VecMap& map, int dim, double s,
                             const std::vector<std::vector<double>>& extra_seeds = {},
                             const BrouwerOptions& opts = {});

struct GOptions {
    int level = 20;          // initial sphere-rule level
    int max_level = 64;
    double stabilize_tol = 1e-8; // refine until |G| change is below this
    bool adaptive = true;
};

/// G_i(xi) = int_{S^n} (K o phi_{P,t}) x_i dv,  P = xi/|xi|, t = (1-|xi|)^{-1};
/// xi = 0 uses phi = id. Throws NumericError when the quadrature cannot be
/// stabilized within max_level (integrand concentrating as |xi| -> 1).
std::vector<double> G_of_xi(const KFunction& K, const std::vector<double>& xi,
                            const GOptions& opts = {});

/// fixed-level evaluation (used inside Newton loops after calibration)
std::vector<double> G_of_xi_level(const KFunction& K, const std::vector<double>& xi, int level);

/// smallest level whose refinement changes |G| by less than tol at probe
/// points with |xi| = s_max
int calibrate_G_level(const KFunction& K, double s_max, double tol, const GOptions& opts = {});

struct DegreeAnalysis {
    std::vector<CriticalPointRecord> records;
    int deg_minus = 0;
    bool criterion = false;               // deg_minus != (-1)^n
    std::map<double, int> degG_by_s;      // Brouwer degree of G per scanned s
    bool s_scan_consistent = true;
    int euler_sum = 0;                    // only valid when all points nondegenerate
    bool morse = true;                    // all Hessians nondegenerate
};

/// full pipeline: critical points, deg(grad K, Crit_-), deg(G, B_s, 0) for the
/// requested s values (zeros seeded from scaled critical directions)
DegreeAnalysis analyze_K(const KFunction& K, const std::vector<double>& s_values,
                         const CriticalPointOptions& copts = {}, const BrouwerOptions& bopts = {},
                         const GOptions& gopts = {});

} // namespace sigmak
