#include "sigmak/identities.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace sigmak {

void IdentityReport::push(double h, double residual) {
    if (!hs.empty()) {
        double prev = residuals.back();
        orders.push_back(std::log2(prev / residual));
    }
    hs.push_back(h);
    residuals.push_back(residual);
}

double IdentityReport::final_order() const {
    return orders.empty() ? std::nan("") : orders.back();
}

namespace {

struct NodeData {
    double grad[kMaxDim];
    double g2 = 0;
    SymMat F;
    NewtonChain chain; // T_0..T_maxl, sigma_0..sigma_{maxl+1}
    NodeData(const FieldView& psi, const int* idx, int maxl) : F(psi.grid().n) {
        F = f_of_psi_at(psi, idx);
        stencil::gradient(psi, idx, grad);
        const int n = psi.grid().n;
        for (int d = 0; d < n; ++d) g2 += grad[d] * grad[d];
        chain = newton_chain(F, maxl);
    }
    // (T_l grad psi)_b
    void T_grad(int l, double* out) const {
        const int n = F.dim();
        for (int b = 0; b < n; ++b) {
            double s = 0;
            for (int a = 0; a < n; ++a) s += chain.T[l](a, b) * grad[a];
            out[b] = s;
        }
    }
    double T_grad_grad(int l) const {
        const int n = F.dim();
        double s = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += chain.T[l](a, b) * grad[a] * grad[b];
        return s;
    }
};

constexpr int kDivMargin = 4;
const int kOff[4] = {-2, -1, 1, 2};
const double kW[4] = {1.0, -8.0, 8.0, -1.0};

// divergence of a vector field given by an evaluator idx -> component along
// requested axis
template <class VecEval>
double divergence_at(const BoxGrid& g, const int* idx, VecEval&& component) {
    int j[kMaxDim];
    for (int d = 0; d < g.n; ++d) j[d] = idx[d];
    double acc = 0;
    for (int a = 0; a < g.n; ++a) {
        double da = 0;
        for (int s = 0; s < 4; ++s) {
            j[a] = idx[a] + kOff[s];
            da += kW[s] * component(static_cast<const int*>(j), a);
        }
        j[a] = idx[a];
        acc += da / (12.0 * g.h);
    }
    return acc;
}

std::vector<std::vector<int>> collect_samples(const BoxGrid& g, int margin, std::int64_t target) {
    std::vector<std::vector<int>> out;
    auto add = [&](const int* idx) { out.emplace_back(idx, idx + g.n); };
    if (target <= 0)
        for_each_interior(g, margin, add);
    else
        for_each_interior_sample(g, margin, target, add);
    return out;
}

double max_over_samples(const BoxGrid& g, int margin, std::int64_t target,
                        const std::function<double(const int*)>& node_fn,
                        const std::vector<std::vector<int>>* pinned = nullptr) {
    auto samples = pinned ? *pinned : collect_samples(g, margin, target);
    if (samples.empty()) throw StencilError("identity check: grid too small for margin 4");
    double global = 0;
    std::mutex mu;
    parallel_for((std::int64_t)samples.size(), [&](std::int64_t lo, std::int64_t hi) {
        double w = 0;
        for (std::int64_t i = lo; i < hi; ++i) w = std::max(w, node_fn(samples[i].data()));
        std::lock_guard<std::mutex> lock(mu);
        global = std::max(global, w);
    });
    return global;
}

} // namespace

double check_divergence_residual(const FieldView& psi, int ell, std::int64_t sample_target,
                                 const SampleSet* samples) {
    const BoxGrid& g = psi.grid();
    const int n = g.n;
    if (ell < 0 || ell > n) throw std::domain_error("check_divergence: ell out of range 0..n");
    return max_over_samples(g, kDivMargin, sample_target, [&](const int* idx) {
        double lhs[kMaxDim] = {0};
        int j[kMaxDim];
        for (int d = 0; d < n; ++d) j[d] = idx[d];
        for (int a = 0; a < n; ++a) {
            for (int s = 0; s < 4; ++s) {
                j[a] = idx[a] + kOff[s];
                SymMat T = newton_tensor(f_of_psi_at(psi, j), ell);
                for (int b = 0; b < n; ++b) lhs[b] += kW[s] * T(a, b) / (12.0 * g.h);
            }
            j[a] = idx[a];
        }
        NodeData nd(psi, idx, ell);
        double Tg[kMaxDim];
        nd.T_grad(ell, Tg);
        double worst = 0;
        for (int b = 0; b < n; ++b) {
            double rhs = (n - 2.0 * ell) * Tg[b] - (n - ell) * nd.chain.sig[ell] * nd.grad[b];
            worst = std::max(worst, std::fabs(lhs[b] - rhs));
        }
        return worst;
    }, samples);
}

double check_weighted_divergence_residual(const FieldView& psi, int ell, double p, double q,
                                          std::int64_t sample_target,
                                          const SampleSet* samples) {
    const BoxGrid& g = psi.grid();
    const int n = g.n;
    if (ell < 0 || ell > n - 1)
        throw std::domain_error("check_weighted_divergence: ell out of range 0..n-1");
    if (p < 0) throw std::domain_error("check_weighted_divergence: p must be >= 0");
    auto W = [&](const int* idx, int axis) {
        NodeData nd(psi, idx, ell);
        double Tg[kMaxDim];
        nd.T_grad(ell, Tg);
        double pw = p == 0 ? 1.0 : std::pow(nd.g2, 0.5 * p);
        return std::exp(-q * psi.value(idx)) * pw * Tg[axis];
    };
    return max_over_samples(g, kDivMargin, sample_target, [&](const int* idx) {
        double lhs = divergence_at(g, idx, W);
        NodeData nd(psi, idx, ell + 1);
        const double w = std::exp(-q * psi.value(idx));
        const double pw = p == 0 ? 1.0 : std::pow(nd.g2, 0.5 * p);
        double rhs = (p + ell + 1) * w * nd.chain.sig[ell + 1] * pw;
        if (p > 0) {
            double pw2 = nd.g2 == 0 ? 0.0 : std::pow(nd.g2, 0.5 * p - 1.0);
            rhs -= p * w * pw2 * nd.T_grad_grad(ell + 1);
        }
        rhs += (n - 2.0 * ell - q - 0.5 * p - 1.0) * w * pw * nd.T_grad_grad(ell);
        rhs -= 0.5 * (n - ell) * w * nd.chain.sig[ell] * nd.g2 * pw;
        return std::fabs(lhs - rhs);
    }, samples);
}

namespace {

std::vector<double> summed_coeffs_c(int k, double t, double s) {
    std::vector<double> c(k);
    for (int j = 0; j < k; ++j) c[j] = rising(t, j) / (std::pow(2.0, j) * rising(s, j));
    return c;
}

} // namespace

double check_summed_identity_residual(const FieldView& psi, int k, double q, double t, double s,
                                      std::int64_t sample_target,
                                      const SampleSet* samples) {
    const BoxGrid& g = psi.grid();
    const int n = g.n;
    if (k < 1 || k > n) throw std::domain_error("check_summed_identity: k out of range 1..n");
    if (!(t > 0) || !(s > 0)) throw std::domain_error("check_summed_identity: t,s must be positive");
    auto c = summed_coeffs_c(k, t, s);
    auto X = [&](const int* idx, int axis) {
        NodeData nd(psi, idx, k - 1);
        double acc = 0, Tg[kMaxDim];
        for (int j = 0; j < k; ++j) {
            nd.T_grad(k - 1 - j, Tg);
            acc += c[j] * std::pow(nd.g2, j) * Tg[axis];
        }
        return std::exp(-q * psi.value(idx)) * acc;
    };
    return max_over_samples(g, kDivMargin, sample_target, [&](const int* idx) {
        double lhs = divergence_at(g, idx, X);
        NodeData nd(psi, idx, k - 1);
        const double w = std::exp(-q * psi.value(idx));
        double rhs = k * w * nd.chain.sig[k];
        for (int j = 0; j < k; ++j) {
            double mid = n - 2.0 * k + (j + 1.0) * (s - t) / (s + j) - q;
            rhs += w * c[j] * mid * std::pow(nd.g2, j) * nd.T_grad_grad(k - 1 - j);
            double coef = (n - k + 1.0) * s - (k + 1.0) * t + (n - 2.0 * k + s - t) * j;
            rhs -= w * rising(t, j) / (std::pow(2.0, j + 1) * rising(s, j + 1)) * coef *
                   std::pow(nd.g2, j + 1) * nd.chain.sig[k - 1 - j];
        }
        return std::fabs(lhs - rhs);
    }, samples);
}

std::vector<double> summed_specialization_coeffs(int n, int k, double delta) {
    std::vector<double> d(k);
    for (int j = 0; j < k; ++j)
        d[j] = delta * rising(n - k + 1.0, j + 1) /
               (std::pow(2.0, j + 1) * rising(k + 1.0 + delta, j + 1));
    return d;
}

namespace {

IdentityReport run_study(const std::string& id, int n, const ScalarFn& psi, double width, int baseN,
                         int levels, std::int64_t sample_target,
                         const std::function<double(const FieldView&, const SampleSet&)>& resid) {
    IdentityReport rep;
    rep.id = id;
    SampleSet base;
    {
        BoxGrid g0 = BoxGrid::centered_cube(n, width, baseN);
        for_each_interior_sample(g0, 4, sample_target,
                                 [&](const int* idx) { base.emplace_back(idx, idx + n); });
        if (base.empty()) throw StencilError(id + ": coarsest grid has no margin-4 interior");
    }
    for (int l = 0; l < levels; ++l) {
        int N = (baseN - 1) * (1 << l) + 1;
        AnalyticField f(BoxGrid::centered_cube(n, width, N), psi);
        SampleSet scaled = base;
        for (auto& s : scaled)
            for (int& c : s) c <<= l;
        rep.push(f.grid().h, resid(view(f), scaled));
    }
    return rep;
}

} // namespace

IdentityReport divergence_study(int n, const ScalarFn& psi, int ell, double width, int baseN,
                                int levels, std::int64_t sample_target) {
    return run_study("divergence[n=" + std::to_string(n) + ",l=" + std::to_string(ell) + "]", n,
                     psi, width, baseN, levels, sample_target,
                     [&](const FieldView& v, const SampleSet& s) {
                         return check_divergence_residual(v, ell, 0, &s);
                     });
}

IdentityReport weighted_study(int n, const ScalarFn& psi, int ell, double p, double q, double width,
                              int baseN, int levels, std::int64_t sample_target) {
    return run_study("weighted_divergence[n=" + std::to_string(n) + ",l=" + std::to_string(ell) +
                         ",p=" + std::to_string(p) + ",q=" + std::to_string(q) + "]",
                     n, psi, width, baseN, levels, sample_target,
                     [&](const FieldView& v, const SampleSet& s) {
                         return check_weighted_divergence_residual(v, ell, p, q, 0, &s);
                     });
}

IdentityReport summed_study(int n, const ScalarFn& psi, int k, double q, double t, double s,
                            double width, int baseN, int levels, std::int64_t sample_target) {
    return run_study("summed_identity[n=" + std::to_string(n) + ",k=" + std::to_string(k) + "]", n,
                     psi, width, baseN, levels, sample_target,
                     [&](const FieldView& v, const SampleSet& smp) {
                         return check_summed_identity_residual(v, k, q, t, s, 0, &smp);
                     });
}

namespace {

bool in_gamma_k_closed(const Spectrum& lam, int k, double slack) {
    auto e = sigma_all(lam);
    for (int j = 1; j <= k; ++j)
        if (e[j] < -slack) return false;
    return true;
}

} // namespace

CacciopoliReport cacciopoli_sides(const FieldView& psi, int k, double q, double r, double R,
                                  double delta, bool negative_exponent,
                                  std::int64_t sample_target) {
    const BoxGrid& g = psi.grid();
    const int n = g.n;
    if (!(0 < r && r < R)) throw std::invalid_argument("cacciopoli_sides: need 0 < r < R");
    if (k < 1 || k > n) throw std::domain_error("cacciopoli_sides: k out of range");
    const double sgn = negative_exponent ? -1.0 : 1.0; // weight exp(-sgn*q*psi)

    // cone precondition + integrals over margin-2 nodes
    double lhs = 0, sigma_side = 0, weight_int = 0;
    std::string offending;
    int bad = 0;
    double x[kMaxDim];
    const double cell = std::pow(g.h, n);
    for_each_interior(g, 2, [&](const int* idx) {
        g.point(idx, x);
        double r2 = 0;
        for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
        if (r2 > R * R) return;
        SymMat F = f_of_psi_at(psi, idx);
        Spectrum lam = eigenvalues_sym(F);
        if (!in_gamma_k_closed(lam, k, 1e-9)) {
            if (bad < 5) {
                offending += " node(";
                for (int d = 0; d < n; ++d) offending += std::to_string(idx[d]) + (d + 1 < n ? "," : ")");
            }
            ++bad;
            return;
        }
        NodeData nd(psi, idx, k - 1);
        double w = std::exp(-sgn * q * psi.value(idx));
        sigma_side += cell * w * nd.chain.sig[k];
        weight_int += cell * w;
        if (r2 <= r * r) lhs += cell * w * std::pow(nd.g2, k);
    });
    if (bad > 0)
        throw ConeError("cacciopoli_sides: lambda(F[psi]) leaves closed Gamma_" +
                        std::to_string(k) + " at " + std::to_string(bad) + " nodes:" + offending);

    CacciopoliReport rep;
    rep.lhs = lhs;
    rep.sigma_side = sigma_side;
    rep.weight_side = weight_int / std::pow(R - r, 2.0 * k);
    rep.delta = delta;
    rep.q = q;
    rep.negative_exponent = negative_exponent;

    // pointwise divergence bound with the (t,s) = (n-k+1, k+1 +/- delta) choice
    const double t = n - k + 1.0;
    const double s = k + 1.0 + sgn * delta;
    auto c = summed_coeffs_c(k, t, s);
    auto X = [&](const int* idx, int axis) {
        NodeData nd(psi, idx, k - 1);
        double acc = 0, Tg[kMaxDim];
        for (int j = 0; j < k; ++j) {
            nd.T_grad(k - 1 - j, Tg);
            acc += c[j] * std::pow(nd.g2, j) * Tg[axis];
        }
        return std::exp(-sgn * q * psi.value(idx)) * acc;
    };
    rep.pointwise_residual = max_over_samples(g, kDivMargin, sample_target, [&](const int* idx) {
        g.point(idx, x);
        double r2 = 0;
        for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
        if (r2 > R * R) return 0.0;
        double div = divergence_at(g, idx, X);
        NodeData nd(psi, idx, k - 1);
        double w = std::exp(-sgn * q * psi.value(idx));
        double good = 0;
        for (int j = 0; j < k; ++j)
            good += delta * rising(t, j + 1) / (std::pow(2.0, j + 1) * rising(s, j + 1)) *
                    std::pow(nd.g2, j + 1) * nd.chain.sig[k - 1 - j];
        if (!negative_exponent)
            return div - (k * w * nd.chain.sig[k] - w * good); // should be <= FD error
        return w * good - div;                                 // Prop 4.6 direction
    });
    return rep;
}

namespace {

struct BallIntegrals {
    double mass = 0, shell = 0;
};

template <class Acc>
BallIntegrals integrate_ball(const FieldView& u, double radius, Acc&& acc) {
    const BoxGrid& g = u.grid();
    const int n = g.n;
    const double cell = std::pow(g.h, n);
    const double shell_lo = 0.85 * radius;
    BallIntegrals bi;
    double x[kMaxDim];
    int idx[kMaxDim];
    for (std::int64_t f = 0; f < g.size(); ++f) {
        g.unflat(f, idx);
        g.point(idx, x);
        double r2 = 0;
        for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
        if (r2 > radius * radius) continue;
        double uv = u.value(idx);
        double dens = cell * std::pow(uv, 2.0 * n / (n - 2.0));
        bi.mass += dens;
        if (r2 > shell_lo * shell_lo) bi.shell += dens;
        acc(x, dens);
    }
    return bi;
}

} // namespace

std::vector<double> kazdan_warner(const FieldView& u, const SmoothFn& K, double radius,
                                  double tail_tol) {
    const int n = u.grid().n;
    std::vector<double> out(n, 0.0);
    double gk[kMaxDim];
    auto bi = integrate_ball(u, radius, [&](const double* x, double dens) {
        K.grad(x, gk);
        for (int d = 0; d < n; ++d) out[d] += gk[d] * dens;
    });
    if (bi.shell > tail_tol * bi.mass)
        throw NumericError("kazdan_warner: outermost shell carries " + std::to_string(bi.shell) +
                           " of mass " + std::to_string(bi.mass) + "; increase truncation radius");
    return out;
}

double pohozaev(const FieldView& u, const SmoothFn& K, double radius, double tail_tol) {
    const int n = u.grid().n;
    double out = 0;
    double gk[kMaxDim];
    auto bi = integrate_ball(u, radius, [&](const double* x, double dens) {
        K.grad(x, gk);
        double ydot = 0;
        for (int d = 0; d < n; ++d) ydot += x[d] * gk[d];
        out += ydot * dens;
    });
    if (bi.shell > tail_tol * bi.mass)
        throw NumericError("pohozaev: integrand tail exceeds tolerance; increase radius");
    return out;
}

double kazdan_warner_axisym(const SphereAxisymField& v,
                            const std::function<double(double)>& dK_dtheta) {
    auto w = axisym_quad_weights(v.n(), v.N());
    const double p = 2.0 * v.n() / (v.n() - 2.0);
    double s = 0;
    for (int j = 0; j <= v.N(); ++j) {
        double th = v.theta(j);
        // <grad K, grad x_{n+1}> = K'(theta) * d(cos theta)/d theta = -K' sin
        s += w[j] * (-dK_dtheta(th) * std::sin(th)) * std::pow(v[j], p);
    }
    return s;
}

MomentSet moments(const FieldView& u, double r0) {
    const int n = u.grid().n;
    MomentSet m;
    m.r0 = r0;
    m.mu_p.assign(n, 0.0);
    m.mu_lp.assign(n * n, 0.0);
    auto bi = integrate_ball(u, r0, [&](const double* x, double dens) {
        for (int a = 0; a < n; ++a) {
            m.mu_p[a] += x[a] * dens;
            for (int b = 0; b < n; ++b) m.mu_lp[a * n + b] += x[a] * x[b] * dens;
        }
    });
    m.M = bi.mass;
    if (!(m.M > 0)) throw PreconditionError("moments: zero mass in ball");
    for (double& v : m.mu_p) v /= m.M;
    for (double& v : m.mu_lp) v /= m.M;
    return m;
}

double moment_limit(const ScalarFn& q, double d, double lam, int n, double r0) {
    if (d < 0 || d >= n) throw std::domain_error("moment_limit: need 0 <= d < n");
    if (!(lam > 0) || !(r0 > 0)) throw std::domain_error("moment_limit: lam, r0 must be positive");
    SphereRule ang = sphere_rule(n - 1, 12);
    std::vector<double> gx, gw;
    gauss_legendre(16, gx, gw);
    double total = 0;
    double a = std::min(1.0 / lam, r0);
    double lo = 0;
    std::vector<double> x(n);
    while (lo < r0) {
        double hi = lo == 0 ? a : std::min(2.0 * lo, r0);
        for (int i = 0; i < 16; ++i) {
            double rr = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gx[i];
            double wr = 0.5 * (hi - lo) * gw[i];
            double dens = std::pow(lam / (1.0 + lam * lam * rr * rr), n); // bubble^{2n/(n-2)}
            double asum = 0;
            for (std::int64_t j = 0; j < ang.size(); ++j) {
                const double* om = ang.node(j);
                for (int c = 0; c < n; ++c) x[c] = rr * om[c];
                asum += ang.weights[j] * q(x.data());
            }
            total += wr * std::pow(rr, n - 1.0) * dens * asum;
        }
        lo = hi;
    }
    return std::pow(lam, d) * total;
}

namespace {

class HalfSumView final : public FieldView {
  public:
    HalfSumView(const FieldView& a, const FieldView& b) : a_(&a), b_(&b) {
        if (!a.grid().same_layout(b.grid()))
            throw std::invalid_argument("check_convexity: fields on different grids");
    }
    const BoxGrid& grid() const override { return a_->grid(); }
    double value(const int* idx) const override {
        return 0.5 * (a_->value(idx) + b_->value(idx));
    }

  private:
    const FieldView *a_, *b_;
};

SymMat conformal_hessian_Aw(const FieldView& w, const int* idx) {
    const BoxGrid& g = w.grid();
    const int n = g.n;
    const double wv = w.value(idx);
    if (!(wv > 0)) throw PreconditionError("check_convexity: fields must be positive");
    double gr[kMaxDim];
    stencil::gradient(w, idx, gr);
    double g2 = 0;
    for (int d = 0; d < n; ++d) g2 += gr[d] * gr[d];
    SymMat A(n);
    for (int i = 0; i < n; ++i) {
        A.set(i, i, stencil::d2(w, idx, i) - 0.5 * g2 / wv);
        for (int j = i + 1; j < n; ++j) A.set(i, j, stencil::d1d1(w, idx, i, j));
    }
    return A;
}

} // namespace

ConvexityReport check_convexity(const FieldView& w1, const FieldView& w2,
                                std::int64_t sample_target) {
    HalfSumView mid(w1, w2);
    ConvexityReport rep;
    rep.min_eigenvalue = 1e300;
    auto samples = collect_samples(w1.grid(), 2, sample_target);
    for (auto& s : samples) {
        SymMat D = conformal_hessian_Aw(mid, s.data());
        D -= 0.5 * (conformal_hessian_Aw(w1, s.data()) + conformal_hessian_Aw(w2, s.data()));
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, eigenvalues_sym(D).front());
        ++rep.nodes;
    }
    if (rep.nodes == 0) throw StencilError("check_convexity: no interior nodes");
    return rep;
}

DeltaEnergyReport delta_energy_profile(const FieldView& u, double r_in, double r_out) {
    const BoxGrid& g = u.grid();
    const int n = g.n;
    if (!(r_out > r_in) || r_in < 0)
        throw std::invalid_argument("delta_energy_profile: need 0 <= r_in < r_out");
    const double cell = std::pow(g.h, n);
    DeltaEnergyReport rep;
    int idx[kMaxDim];
    double x[kMaxDim];
    for (std::int64_t f = 0; f < g.size(); ++f) {
        g.unflat(f, idx);
        g.point(idx, x);
        double r = 0;
        for (int d = 0; d < n; ++d) r += x[d] * x[d];
        r = std::sqrt(r);
        if (r > r_out || r < r_in) continue;
        double dist = r_in > 0 ? std::min(r - r_in, r_out - r) : r_out - r;
        double uv = u.value(idx);
        if (!(uv > 0)) throw PreconditionError("delta_energy_profile: u must be positive");
        rep.T = std::max(rep.T, std::pow(dist, 0.5 * (n - 2)) * uv);
        rep.energy += cell * std::pow(uv, 2.0 * n / (n - 2.0));
    }
    return rep;
}

} // namespace sigmak
