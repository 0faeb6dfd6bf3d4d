#include "sigmak/kspec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace sigmak {

Poly Poly::constant(int nvars, double c) {
    Poly p(nvars);
    if (c != 0.0) p.terms_[std::vector<int>(nvars, 0)] = c;
    return p;
}

Poly Poly::var(int nvars, int i) {
    Poly p(nvars);
    std::vector<int> e(nvars, 0);
    e[i] = 1;
    p.terms_[e] = 1.0;
    return p;
}

void Poly::add_term(const std::vector<int>& exps, double c) {
    auto it = terms_.find(exps);
    double v = (it == terms_.end() ? 0.0 : it->second) + c;
    if (v == 0.0) {
        if (it != terms_.end()) terms_.erase(it);
    } else {
        terms_[exps] = v;
    }
}

double Poly::eval(const double* x) const {
    double s = 0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int i = 0; i < nvars_; ++i)
            for (int p = 0; p < e[i]; ++p) t *= x[i];
        s += t;
    }
    return s;
}

Poly Poly::deriv(int i) const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        auto e2 = e;
        e2[i] -= 1;
        r.add_term(e2, c * e[i]);
    }
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r(nvars_);
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) {
            std::vector<int> e(nvars_);
            for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    return r;
}

Poly Poly::pow(int p) const {
    if (p < 0) throw std::invalid_argument("Poly::pow: negative exponent");
    Poly r = Poly::constant(nvars_, 1.0);
    for (int i = 0; i < p; ++i) r = r * (*this);
    return r;
}

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    int nvars;

    void skip() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("K expression: " + what + " at position " +
                                    std::to_string(pos) + " of '" + s + "'");
    }

    Poly expr() {
        skip();
        bool neg = eat('-');
        if (!neg) eat('+');
        Poly acc = term();
        if (neg) acc = Poly::constant(nvars, 0.0) - acc;
        for (;;) {
            skip();
            if (eat('+')) acc = acc + term();
            else if (eat('-')) acc = acc - term();
            else break;
        }
        return acc;
    }
    Poly term() {
        Poly acc = factor();
        for (;;) {
            skip();
            if (eat('*')) acc = acc * factor();
            else break;
        }
        return acc;
    }
    Poly factor() {
        Poly b = base();
        skip();
        if (eat('^')) {
            skip();
            size_t start = pos;
            while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            if (pos == start) fail("expected integer exponent");
            return b.pow(std::stoi(s.substr(start, pos - start)));
        }
        return b;
    }
    Poly base() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        if (eat('(')) {
            Poly inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        char c = s[pos];
        if (c == 'x' || c == 'X') {
            ++pos;
            size_t start = pos;
            while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            if (pos == start) fail("expected variable index after 'x'");
            int i = std::stoi(s.substr(start, pos - start));
            if (i < 1 || i > nvars)
                fail("variable x" + std::to_string(i) + " out of range 1.." + std::to_string(nvars));
            return Poly::var(nvars, i - 1);
        }
        if (std::isdigit((unsigned char)c) || c == '.') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit((unsigned char)s[pos]) || s[pos] == '.' || s[pos] == 'e' ||
                    s[pos] == 'E' ||
                    ((s[pos] == '+' || s[pos] == '-') && (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
                ++pos;
            return Poly::constant(nvars, std::stod(s.substr(start, pos - start)));
        }
        fail("unexpected character");
    }
};

} // namespace

Poly parse_poly(const std::string& expr, int nvars) {
    Parser p{expr, 0, nvars};
    Poly out = p.expr();
    p.skip();
    if (p.pos != expr.size()) p.fail("trailing input");
    return out;
}

void PolyFlat::build(const Poly& p) {
    nvars = p.nvars();
    coef.clear();
    exps.clear();
    for (const auto& [e, c] : p.terms()) {
        coef.push_back(c);
        for (int i = 0; i < nvars; ++i) exps.push_back((signed char)e[i]);
    }
}

KFunction::KFunction(Poly p, int n) : n_(n), p_(std::move(p)) {
    if (p_.nvars() != n + 1) throw std::invalid_argument("KFunction: polynomial must have n+1 variables");
    pf_.build(p_);
    for (int i = 0; i <= n; ++i) dp_.push_back(p_.deriv(i));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) ddp_.push_back(dp_[i].deriv(j));
}

KFunction KFunction::parse(const std::string& expr, int n) {
    return KFunction(parse_poly(expr, n + 1), n);
}

double KFunction::value(const std::vector<double>& x) const { return p_.eval(x.data()); }

std::vector<double> KFunction::ambient_grad(const std::vector<double>& x) const {
    std::vector<double> g(n_ + 1);
    for (int i = 0; i <= n_; ++i) g[i] = dp_[i].eval(x.data());
    return g;
}

std::vector<double> KFunction::ambient_hess(const std::vector<double>& x) const {
    std::vector<double> h((n_ + 1) * (n_ + 1));
    for (size_t i = 0; i < h.size(); ++i) h[i] = ddp_[i].eval(x.data());
    return h;
}

std::vector<double> KFunction::sphere_grad(const std::vector<double>& x) const {
    auto g = ambient_grad(x);
    double xg = 0;
    for (int i = 0; i <= n_; ++i) xg += x[i] * g[i];
    for (int i = 0; i <= n_; ++i) g[i] -= xg * x[i];
    return g;
}

double KFunction::sphere_laplacian(const std::vector<double>& x) const {
    auto g = ambient_grad(x);
    auto h = ambient_hess(x);
    const int d = n_ + 1;
    double mu = 0, tr = 0, xhx = 0;
    for (int i = 0; i < d; ++i) {
        mu += x[i] * g[i];
        tr += h[i * d + i];
        for (int j = 0; j < d; ++j) xhx += x[i] * h[i * d + j] * x[j];
    }
    return tr - xhx - n_ * mu;
}

std::vector<double> KFunction::intrinsic_hessian(const std::vector<double>& x,
                                                 const std::vector<double>& frame) const {
    auto g = ambient_grad(x);
    auto h = ambient_hess(x);
    const int d = n_ + 1;
    double mu = 0;
    for (int i = 0; i < d; ++i) mu += x[i] * g[i];
    std::vector<double> H(n_ * n_);
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            double s = 0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) s += frame[i * d + a] * h[i * d + j] * frame[j * d + b];
            H[a * n_ + b] = s - (a == b ? mu : 0.0);
        }
    return H;
}

AxisymK AxisymK::constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }};
}

AxisymK AxisymK::from_poly(const Poly& p_in_cos) {
    if (p_in_cos.nvars() != 1) throw std::invalid_argument("AxisymK: expected 1-variable polynomial");
    Poly dp = p_in_cos.deriv(0);
    Poly p = p_in_cos;
    return {[p](double th) {
                double c = std::cos(th);
                return p.eval(&c);
            },
            [dp](double th) {
                double c = std::cos(th);
                return -std::sin(th) * dp.eval(&c);
            }};
}

AxisymK AxisymK::from_samples(const std::vector<double>& theta, const std::vector<double>& Kv) {
    if (theta.size() != Kv.size() || theta.size() < 4)
        throw std::invalid_argument("AxisymK: need >= 4 samples");
    for (size_t i = 1; i < theta.size(); ++i)
        if (theta[i] <= theta[i - 1])
            throw std::invalid_argument("AxisymK: theta samples must be increasing");
    auto th = theta;
    auto kv = Kv;
    auto locate = [th](double t) {
        int lo = 0, hi = (int)th.size() - 1;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (th[mid] <= t ? lo : hi) = mid;
        }
        return std::clamp(lo, 1, (int)th.size() - 3);
    };
    auto lagrange = [th, kv, locate](double t, bool want_deriv) {
        int i = locate(t);
        double num = 0;
        for (int a = -1; a <= 2; ++a) {
            int ja = i + a;
            double term = kv[ja], dterm = 0;
            for (int b = -1; b <= 2; ++b) {
                int jb = i + b;
                if (jb == ja) continue;
                double denom = th[ja] - th[jb];
                if (want_deriv) {
                    double prod = kv[ja] / denom;
                    for (int c = -1; c <= 2; ++c) {
                        int jc = i + c;
                        if (jc == ja || jc == jb) continue;
                        prod *= (t - th[jc]) / (th[ja] - th[jc]);
                    }
                    dterm += prod;
                }
                term *= (t - th[jb]) / denom;
            }
            num += want_deriv ? dterm : term;
        }
        return num;
    };
    return {[lagrange](double t) { return lagrange(t, false); },
            [lagrange](double t) { return lagrange(t, true); }};
}

} // namespace sigmak
