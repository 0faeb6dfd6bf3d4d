#include "sigmak/degree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace sigmak {

namespace {

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
    double r = norm(v);
    if (r == 0) throw NumericError("normalize: zero vector");
    for (double& x : v) x /= r;
}

double geodesic(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
    return std::acos(std::clamp(d, -1.0, 1.0));
}

} // namespace

std::vector<CriticalPointRecord> find_critical_points(const KFunction& K,
                                                      const CriticalPointOptions& opts) {
    const int n = K.n();
    const int d = n + 1;
    SphereRule seeds = sphere_rule(n, opts.seed_level);
    std::vector<CriticalPointRecord> records;

    for (std::int64_t si = 0; si < seeds.size(); ++si) {
        std::vector<double> x(seeds.node(si), seeds.node(si) + d);
        bool converged = false;
        for (int it = 0; it < opts.max_iter; ++it) {
            auto frame = frame_with_last_axis(x);
            auto g = K.sphere_grad(x);
            std::vector<double> gf(n);
            for (int a = 0; a < n; ++a) {
                double s = 0;
                for (int i = 0; i < d; ++i) s += frame[i * d + a] * g[i];
                gf[a] = s;
            }
            double gn = norm(gf);
            if (gn < opts.newton_tol) {
                converged = true;
                break;
            }
            auto H = K.intrinsic_hessian(x, frame);
            std::vector<double> step;
            try {
                step = lu_solve(H, gf, n);
            } catch (const NumericError&) {
                break; // singular Hessian along the way; drop this seed
            }
            double sn = norm(step);
            if (sn > 0.5) // keep Newton steps local on the sphere
                for (double& s : step) s *= 0.5 / sn;
            for (int i = 0; i < d; ++i) {
                double dx = 0;
                for (int a = 0; a < n; ++a) dx += frame[i * d + a] * step[a];
                x[i] -= dx;
            }
            normalize(x);
        }
        if (!converged) continue;
        bool dup = false;
        for (const auto& r : records)
            if (geodesic(r.x, x) < opts.dedup_dist) {
                dup = true;
                break;
            }
        if (dup) continue;

        CriticalPointRecord rec;
        rec.x = x;
        rec.grad_norm = norm(K.sphere_grad(x));
        rec.laplacian = K.sphere_laplacian(x);
        if (rec.grad_norm + std::fabs(rec.laplacian) <= opts.nondegeneracy_tol)
            throw NondegeneracyViolation(
                "find_critical_points: |grad K| + |lap K| <= tol at a critical point "
                "(non-degeneracy condition fails)");
        auto frame = frame_with_last_axis(x);
        auto H = K.intrinsic_hessian(x, frame);
        SymMat Hm(n);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) Hm.set(a, b, 0.5 * (H[a * n + b] + H[b * n + a]));
        rec.hess_spectrum = eigenvalues_sym(Hm);
        double scale = 0;
        for (double ev : rec.hess_spectrum) scale = std::max(scale, std::fabs(ev));
        for (double ev : rec.hess_spectrum) {
            if (ev < 0) ++rec.morse_index;
            if (std::fabs(ev) <= 1e-8 * std::max(scale, 1.0)) rec.hess_degenerate = true;
        }
        rec.minus_class = rec.laplacian < 0;
        records.push_back(std::move(rec));
    }
    // deterministic order: lexicographic by position
    std::sort(records.begin(), records.end(),
              [](const CriticalPointRecord& a, const CriticalPointRecord& b) { return a.x < b.x; });
    return records;
}

int deg_crit_minus(const std::vector<CriticalPointRecord>& records) {
    int deg = 0;
    for (const auto& r : records) {
        if (!r.minus_class) continue;
        if (r.hess_degenerate)
            throw DegenerateZeroError("deg_crit_minus: degenerate Hessian in Crit_-");
        deg += (r.morse_index % 2 == 0) ? 1 : -1;
    }
    return deg;
}

int morse_euler_sum(const std::vector<CriticalPointRecord>& records) {
    int s = 0;
    for (const auto& r : records) {
        if (r.hess_degenerate)
            throw DegenerateZeroError("morse_euler_sum: function is not Morse");
        s += (r.morse_index % 2 == 0) ? 1 : -1;
    }
    return s;
}

namespace {

// forward differences anchored at a cached f(x); quadrature error in the map
// is smooth in x, so the systematic part cancels in the difference
std::vector<double> fd_jacobian(const VecMap& map, const std::vector<double>& xi,
                                const std::vector<double>& fx, double step) {
    const int d = (int)xi.size();
    std::vector<double> J(d * d);
    auto x = xi;
    for (int c = 0; c < d; ++c) {
        double h = step * std::max(1.0, std::fabs(xi[c]));
        x[c] = xi[c] + h;
        auto fp = map(x);
        x[c] = xi[c];
        for (int r = 0; r < d; ++r) J[r * d + c] = (fp[r] - fx[r]) / h;
    }
    return J;
}

double det_and_sign(std::vector<double> J, int d, double* absdet) {
    // LU with partial pivoting, track sign and |det|
    double sign = 1.0, logdet = 0.0;
    for (int c = 0; c < d; ++c) {
        int p = c;
        double best = std::fabs(J[c * d + c]);
        for (int r = c + 1; r < d; ++r)
            if (std::fabs(J[r * d + c]) > best) {
                best = std::fabs(J[r * d + c]);
                p = r;
            }
        if (best == 0.0) {
            *absdet = 0.0;
            return 0.0;
        }
        if (p != c) {
            for (int j = 0; j < d; ++j) std::swap(J[p * d + j], J[c * d + j]);
            sign = -sign;
        }
        if (J[c * d + c] < 0) sign = -sign;
        logdet += std::log(std::fabs(J[c * d + c]));
        for (int r = c + 1; r < d; ++r) {
            double f = J[r * d + c] / J[c * d + c];
            for (int j = c + 1; j < d; ++j) J[r * d + j] -= f * J[c * d + j];
        }
    }
    *absdet = std::exp(logdet);
    return sign;
}

} // namespace

BrouwerResult brouwer_degree(const VecMap& map, int dim, double s,
                             const std::vector<std::vector<double>>& extra_seeds,
                             const BrouwerOptions& opts) {
    if (!(s > 0)) throw std::invalid_argument("brouwer_degree: s must be positive");
    // no zeros on the boundary sphere
    SphereRule bd = sphere_rule(dim - 1, opts.boundary_level);
    double bmin = 1e300;
    std::vector<double> xi(dim);
    for (std::int64_t i = 0; i < bd.size(); ++i) {
        for (int c = 0; c < dim; ++c) xi[c] = s * bd.node(i)[c];
        bmin = std::min(bmin, norm(map(xi)));
    }
    if (bmin <= opts.boundary_tol)
        throw BoundaryZeroError("brouwer_degree: |map| = " + std::to_string(bmin) +
                                " on the boundary sphere |xi| = " + std::to_string(s));

    std::vector<std::vector<double>> starts = extra_seeds;
    starts.push_back(std::vector<double>(dim, 0.0));
    Rng rng(opts.seed);
    for (int i = 0; i < opts.random_starts; ++i) {
        std::vector<double> p(dim);
        for (;;) {
            double r2 = 0;
            for (int c = 0; c < dim; ++c) {
                p[c] = rng.uniform(-1.0, 1.0);
                r2 += p[c] * p[c];
            }
            if (r2 <= 1.0) break;
        }
        for (int c = 0; c < dim; ++c) p[c] *= 0.95 * s;
        starts.push_back(p);
    }

    // independent Newton runs (parallel map), then a deterministic serial
    // dedup/validation pass in start order
    std::vector<std::vector<double>> found(starts.size());
    parallel_for((std::int64_t)starts.size(), [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t si = lo; si < hi; ++si) {
            auto x = starts[si];
            if (norm(x) >= s) continue;
            bool converged = false;
            auto f = map(x);
            double fn = norm(f);
            for (int it = 0; it < opts.max_iter; ++it) {
                if (fn < opts.zero_tol) {
                    converged = true;
                    break;
                }
                auto J = fd_jacobian(map, x, f, 1e-6);
                std::vector<double> step;
                try {
                    step = lu_solve(J, f, dim);
                } catch (const NumericError&) {
                    break;
                }
                double alpha = 1.0;
                bool accepted = false;
                for (int bt = 0; bt < 30; ++bt) {
                    auto xt = x;
                    for (int c = 0; c < dim; ++c) xt[c] -= alpha * step[c];
                    if (norm(xt) < 0.999) { // stay inside the open unit ball domain
                        auto ft = map(xt);
                        double ftn = norm(ft);
                        if (ftn < fn) {
                            x = xt;
                            f = ft;
                            fn = ftn;
                            accepted = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if (!accepted) break;
            }
            if (converged && norm(x) < s) found[si] = x;
        }
    });

    BrouwerResult result;
    for (const auto& x : found) {
        if (x.empty()) continue;
        bool dup = false;
        for (const auto& z : result.zeros) {
            double d2 = 0;
            for (int c = 0; c < dim; ++c) d2 += (z[c] - x[c]) * (z[c] - x[c]);
            if (std::sqrt(d2) < opts.dedup_dist) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        auto J = fd_jacobian(map, x, map(x), 1e-6);
        double absdet = 0;
        double sign = det_and_sign(J, dim, &absdet);
        if (absdet <= opts.det_tol)
            throw DegenerateZeroError("brouwer_degree: |det J| = " + std::to_string(absdet) +
                                      " at a zero (suspected degenerate zero)");
        result.zeros.push_back(x);
        result.signs.push_back(sign > 0 ? 1 : -1);
        result.degree += sign > 0 ? 1 : -1;
    }
    return result;
}

namespace {

std::vector<double> G_eval(const KFunction& K, const std::vector<double>& xi, const SphereRule& rule) {
    const int n = K.n();
    const int d = n + 1;
    const double r = norm(xi);
    if (r >= 1.0) throw std::domain_error("G_of_xi: |xi| must be < 1");
    std::vector<double> P(d, 0.0), Q;
    double t = 1.0;
    if (r > 0.0) {
        for (int c = 0; c < d; ++c) P[c] = xi[c] / r;
        t = 1.0 / (1.0 - r);
        Q = frame_with_last_axis(P); // columns; last column = P
    }
    const int nthreads = std::max(1, env_threads());
    std::vector<std::vector<double>> partial(nthreads, std::vector<double>(d, 0.0));
    std::int64_t per = (rule.size() + nthreads - 1) / nthreads;
    parallel_for(nthreads, [&](std::int64_t tlo, std::int64_t thi) {
        for (std::int64_t slot = tlo; slot < thi; ++slot) {
            std::int64_t lo = slot * per, hi = std::min<std::int64_t>(rule.size(), lo + per);
            double xpt[16], ypt[16];
            double last_ct = 2.0, scale = 0.0, ctp = 0.0;
            std::vector<double>& G = partial[slot];
            if (r == 0.0) {
                for (std::int64_t q = lo; q < hi; ++q) {
                    const double* nd = rule.node(q);
                    double Kv = K.value_flat(nd);
                    for (int c = 0; c < d; ++c) G[c] += rule.weights[q] * Kv * nd[c];
                }
                continue;
            }
            for (std::int64_t q = lo; q < hi; ++q) {
                const double* nd = rule.node(q); // frame coords, last = cos(theta from P)
                double ct = nd[n];
                if (ct != last_ct) { // nodes are colatitude-major
                    last_ct = ct;
                    double theta = std::acos(std::clamp(ct, -1.0, 1.0));
                    double thp = mobius_theta(theta, t);
                    double st = std::sin(theta);
                    ctp = std::cos(thp);
                    scale = st > 1e-14 ? std::sin(thp) / st : 0.0;
                }
                // one rotation: W = Q (tangential); x = W + ct P, phi(x) = scale W + ctp P
                for (int i = 0; i < d; ++i) {
                    double w = 0;
                    for (int c = 0; c < n; ++c) w += Q[i * d + c] * nd[c];
                    xpt[i] = w + Q[i * d + n] * ct;
                    ypt[i] = scale * w + Q[i * d + n] * ctp;
                }
                double Kv = K.value_flat(ypt);
                for (int c = 0; c < d; ++c) G[c] += rule.weights[q] * Kv * xpt[c];
            }
        }
    }, nthreads);
    std::vector<double> G(d, 0.0);
    for (const auto& p : partial)
        for (int c = 0; c < d; ++c) G[c] += p[c];
    return G;
}

} // namespace

namespace {

const SphereRule& cached_rule(int m, int level) {
    static std::map<std::pair<int, int>, SphereRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(m, level);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, sphere_rule(m, level)).first;
    return it->second;
}

} // namespace

std::vector<double> G_of_xi_level(const KFunction& K, const std::vector<double>& xi, int level) {
    return G_eval(K, xi, cached_rule(K.n(), level));
}

std::vector<double> G_of_xi(const KFunction& K, const std::vector<double>& xi, const GOptions& opts) {
    std::vector<double> prev = G_of_xi_level(K, xi, opts.level);
    if (!opts.adaptive) return prev;
    for (int L = opts.level * 3 / 2; L <= opts.max_level; L = L * 3 / 2) {
        auto cur = G_of_xi_level(K, xi, L);
        double diff = 0;
        for (size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::fabs(cur[i] - prev[i]));
        if (diff <= opts.stabilize_tol) return cur;
        prev = std::move(cur);
    }
    throw NumericError("G_of_xi: quadrature did not stabilize to tolerance; integrand too "
                       "concentrated (|xi| close to 1) - refine max_level");
}

int calibrate_G_level(const KFunction& K, double s_max, double tol, const GOptions& opts) {
    const int d = K.n() + 1;
    std::vector<std::vector<double>> probes;
    for (int axis = 0; axis < d; ++axis) {
        std::vector<double> p(d, 0.0);
        p[axis] = s_max;
        probes.push_back(p);
        p[axis] = -s_max;
        probes.push_back(p);
    }
    for (int L = opts.level; L <= opts.max_level; L = L * 3 / 2) {
        double worst = 0;
        for (const auto& p : probes) {
            auto a = G_of_xi_level(K, p, L);
            auto b = G_of_xi_level(K, p, L * 3 / 2);
            for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
        }
        if (worst <= tol) return L * 3 / 2;
    }
    throw NumericError("calibrate_G_level: no stable level within max_level");
}

DegreeAnalysis analyze_K(const KFunction& K, const std::vector<double>& s_values,
                         const CriticalPointOptions& copts, const BrouwerOptions& bopts,
                         const GOptions& gopts) {
    DegreeAnalysis out;
    out.records = find_critical_points(K, copts);
    out.deg_minus = deg_crit_minus(out.records);
    out.criterion = existence_criterion(out.deg_minus, K.n());
    for (const auto& r : out.records)
        if (r.hess_degenerate) out.morse = false;
    if (out.morse) out.euler_sum = morse_euler_sum(out.records);

    double s_max = *std::max_element(s_values.begin(), s_values.end());
    // search at a level calibrated on a moderate probe radius: zero locations
    // only need a few digits, signs are validated on a refined rule below
    int level = 14;
    double noise = 1e300;
    {
        std::vector<double> probe(K.n() + 1, 0.0);
        const double sp = std::min(0.7, s_max);
        while (level <= gopts.max_level) {
            noise = 0;
            for (int axis = 0; axis <= K.n(); ++axis) {
                probe.assign(K.n() + 1, 0.0);
                probe[axis] = sp;
                auto a = G_of_xi_level(K, probe, level);
                auto b = G_of_xi_level(K, probe, level * 3 / 2);
                for (size_t i = 0; i < a.size(); ++i)
                    noise = std::max(noise, std::fabs(a[i] - b[i]));
            }
            if (noise <= 1e-5) break;
            level = level * 3 / 2;
        }
        if (noise > 1e-5)
            throw NumericError("analyze_K: G quadrature does not stabilize at the probe radius");
    }
    VecMap Gmap = [&K, level](const std::vector<double>& xi) {
        return G_of_xi_level(K, xi, level);
    };
    // locate all zeros once inside the widest ball, seeded near scaled
    // critical directions; per-s degrees then come from the located zeros
    std::vector<std::vector<double>> seeds;
    for (const auto& r : out.records)
        for (double rho : {0.2, 0.55}) {
            if (rho >= s_max) continue;
            auto p = r.x;
            for (double& c : p) c *= rho;
            seeds.push_back(p);
        }
    BrouwerOptions bsearch = bopts;
    bsearch.random_starts = 6;
    bsearch.max_iter = 15;
    bsearch.zero_tol = std::max(1e-9, 3.0 * noise); // quadrature noise floor
    auto res = brouwer_degree(Gmap, K.n() + 1, s_max, seeds, bsearch);

    // validate zeros at a refined level: re-converge and recompute signs
    const int fine = std::max(level * 3 / 2, 24);
    VecMap Gfine = [&K, fine](const std::vector<double>& xi) {
        return G_of_xi_level(K, xi, fine);
    };
    std::vector<std::vector<double>> zeros;
    std::vector<int> signs;
    for (size_t z = 0; z < res.zeros.size(); ++z) {
        auto x = res.zeros[z];
        auto f = Gfine(x);
        for (int it = 0; it < 8 && norm(f) > 1e-10; ++it) {
            auto J = fd_jacobian(Gfine, x, f, 1e-6);
            auto step = lu_solve(J, f, K.n() + 1);
            for (size_t c = 0; c < x.size(); ++c) x[c] -= step[c];
            f = Gfine(x);
        }
        if (norm(f) > 1e-7)
            throw NumericError("analyze_K: zero of G did not survive quadrature refinement");
        // dedup against zeros already refined (coarse duplicates can merge)
        bool dup = false;
        for (const auto& zz : zeros) {
            double d2 = 0;
            for (size_t c = 0; c < x.size(); ++c) d2 += (zz[c] - x[c]) * (zz[c] - x[c]);
            if (std::sqrt(d2) < bopts.dedup_dist) dup = true;
        }
        if (dup) continue;
        auto J = fd_jacobian(Gfine, x, f, 1e-6);
        double absdet = 0;
        double sign = det_and_sign(J, K.n() + 1, &absdet);
        if (absdet <= bopts.det_tol)
            throw DegenerateZeroError("analyze_K: degenerate zero of G");
        zeros.push_back(x);
        signs.push_back(sign > 0 ? 1 : -1);
    }

    int first = 0;
    bool first_set = false;
    SphereRule bd = sphere_rule(K.n(), 3);
    for (double s : s_values) {
        // no zeros on |xi| = s: sparse scan plus distance to located zeros
        double bmin = 1e300;
        std::vector<double> probe(K.n() + 1);
        for (std::int64_t i = 0; i < bd.size(); ++i) {
            for (int c = 0; c <= K.n(); ++c) probe[c] = s * bd.node(i)[c];
            bmin = std::min(bmin, norm(Gmap(probe)));
        }
        if (bmin <= bopts.boundary_tol)
            throw BoundaryZeroError("analyze_K: |G| ~ 0 on the s-scan sphere");
        int deg = 0;
        for (size_t z = 0; z < zeros.size(); ++z) {
            double r = norm(zeros[z]);
            if (std::fabs(r - s) < 1e-6)
                throw BoundaryZeroError("analyze_K: zero of G on the scan sphere");
            if (r < s) deg += signs[z];
        }
        out.degG_by_s[s] = deg;
        if (!first_set) {
            first = deg;
            first_set = true;
        } else if (deg != first) {
            out.s_scan_consistent = false;
        }
    }
    return out;
}

} // namespace sigmak
