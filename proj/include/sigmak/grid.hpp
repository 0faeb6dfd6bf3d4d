#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "sigmak/util.hpp"

namespace sigmak {

constexpr int kMaxDim = 8;

/// Axis-aligned box grid with the same uniform spacing h on every axis.
struct BoxGrid {
    int n = 0;               // dimension, 1..kMaxDim
    std::vector<int> shape;  // nodes per axis, each >= 5
    std::vector<double> lo;  // lower corner
    double h = 0;

    BoxGrid() = default;
    BoxGrid(int n_, std::vector<int> shape_, std::vector<double> lo_, double h_);

    /// cube grid centered at the origin with half-width w and N nodes per axis
    static BoxGrid centered_cube(int n, double w, int N);

    std::int64_t size() const {
        std::int64_t s = 1;
        for (int d : shape) s *= d;
        return s;
    }
    void point(const int* idx, double* x) const {
        for (int d = 0; d < n; ++d) x[d] = lo[d] + h * idx[d];
    }
    bool in_range(const int* idx) const {
        for (int d = 0; d < n; ++d)
            if (idx[d] < 0 || idx[d] >= shape[d]) return false;
        return true;
    }
    bool interior(const int* idx, int margin) const {
        for (int d = 0; d < n; ++d)
            if (idx[d] < margin || idx[d] >= shape[d] - margin) return false;
        return true;
    }
    std::int64_t flat(const int* idx) const {
        std::int64_t f = 0;
        for (int d = 0; d < n; ++d) f = f * shape[d] + idx[d];
        return f;
    }
    void unflat(std::int64_t f, int* idx) const {
        for (int d = n - 1; d >= 0; --d) {
            idx[d] = int(f % shape[d]);
            f /= shape[d];
        }
    }
    bool same_layout(const BoxGrid& o) const;
};

/// Field stored node by node (row-major, last axis fastest).
class GridField {
  public:
    GridField() = default;
    GridField(BoxGrid g, std::vector<double> vals);
    GridField(BoxGrid g, const std::function<double(const double*)>& f);

    const BoxGrid& grid() const { return g_; }
    double value(const int* idx) const { return v_[g_.flat(idx)]; }
    double& at(const int* idx) { return v_[g_.flat(idx)]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    /// conformal-factor invariant: all node values strictly positive
    void require_positive(const char* what) const;

  private:
    BoxGrid g_;
    std::vector<double> v_;
};

/// Field evaluated on demand from a closed-form function of the coordinates.
/// Grid metadata drives the same stencils as stored fields; node values are
/// identical to what a stored field would hold, so FD results agree bit for
/// bit at equal grids.
class AnalyticField {
  public:
    AnalyticField(BoxGrid g, std::function<double(const double*)> f)
        : g_(std::move(g)), f_(std::move(f)) {}
    const BoxGrid& grid() const { return g_; }
    double value(const int* idx) const {
        double x[kMaxDim];
        g_.point(idx, x);
        return f_(x);
    }

  private:
    BoxGrid g_;
    std::function<double(const double*)> f_;
};

/// Type-erased read access to a field on a BoxGrid; lets the identity
/// harness run the same stencils over stored and analytic fields.
class FieldView {
  public:
    virtual ~FieldView() = default;
    virtual const BoxGrid& grid() const = 0;
    virtual double value(const int* idx) const = 0;
};

template <class F>
class ViewOf final : public FieldView {
  public:
    explicit ViewOf(const F& f) : f_(&f) {}
    const BoxGrid& grid() const override { return f_->grid(); }
    double value(const int* idx) const override { return f_->value(idx); }

  private:
    const F* f_;
};

template <class F>
ViewOf<F> view(const F& f) {
    return ViewOf<F>(f);
}

namespace stencil {

inline void require_margin(const BoxGrid& g, const int* idx, int margin) {
    if (!g.interior(idx, margin))
        throw StencilError("stencil: node closer than " + std::to_string(margin) +
                           " nodes to the grid boundary");
}

// 4th-order central first derivative along one axis
template <class F>
double d1(const F& f, const int* idx, int axis) {
    int j[kMaxDim];
    for (int d = 0; d < f.grid().n; ++d) j[d] = idx[d];
    const double h = f.grid().h;
    j[axis] = idx[axis] - 2; double m2 = f.value(j);
    j[axis] = idx[axis] - 1; double m1 = f.value(j);
    j[axis] = idx[axis] + 1; double p1 = f.value(j);
    j[axis] = idx[axis] + 2; double p2 = f.value(j);
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
}

// 4th-order central second derivative along one axis
template <class F>
double d2(const F& f, const int* idx, int axis) {
    int j[kMaxDim];
    for (int d = 0; d < f.grid().n; ++d) j[d] = idx[d];
    const double h = f.grid().h;
    double c0 = f.value(j);
    j[axis] = idx[axis] - 2; double m2 = f.value(j);
    j[axis] = idx[axis] - 1; double m1 = f.value(j);
    j[axis] = idx[axis] + 1; double p1 = f.value(j);
    j[axis] = idx[axis] + 2; double p2 = f.value(j);
    return (-m2 + 16.0 * m1 - 30.0 * c0 + 16.0 * p1 - p2) / (12.0 * h * h);
}

// 4th-order mixed derivative: d1 along ax1 of d1 along ax2
template <class F>
double d1d1(const F& f, const int* idx, int ax1, int ax2) {
    static const int off[4] = {-2, -1, 1, 2};
    static const double w[4] = {1.0, -8.0, 8.0, -1.0};
    int j[kMaxDim];
    for (int d = 0; d < f.grid().n; ++d) j[d] = idx[d];
    const double h = f.grid().h;
    double acc = 0;
    for (int a = 0; a < 4; ++a) {
        j[ax1] = idx[ax1] + off[a];
        double inner = 0;
        for (int b = 0; b < 4; ++b) {
            j[ax2] = idx[ax2] + off[b];
            inner += w[b] * f.value(j);
        }
        j[ax2] = idx[ax2];
        acc += w[a] * inner;
    }
    return acc / (144.0 * h * h);
}

template <class F>
void gradient(const F& f, const int* idx, double* g) {
    for (int d = 0; d < f.grid().n; ++d) g[d] = d1(f, idx, d);
}

} // namespace stencil

/// Visit every node with the given interior margin (all axes), in row-major
/// order. fn receives the multi-index.
template <class Fn>
void for_each_interior(const BoxGrid& g, int margin, Fn&& fn) {
    int idx[kMaxDim];
    for (int d = 0; d < g.n; ++d) {
        idx[d] = margin;
        if (g.shape[d] - 2 * margin <= 0) return; // no interior
    }
    for (;;) {
        fn(static_cast<const int*>(idx));
        int d = g.n - 1;
        for (;;) {
            if (++idx[d] < g.shape[d] - margin) break;
            idx[d] = margin;
            if (--d < 0) return;
        }
    }
}

/// Deterministic subsample of interior nodes: strides chosen so at most
/// `target` nodes are visited (all interior nodes when fewer).
template <class Fn>
void for_each_interior_sample(const BoxGrid& g, int margin, std::int64_t target, Fn&& fn) {
    std::int64_t total = 1;
    std::vector<int> span(g.n);
    for (int d = 0; d < g.n; ++d) {
        span[d] = g.shape[d] - 2 * margin;
        if (span[d] <= 0) return;
        total *= span[d];
    }
    double shrink = total > target ? std::pow(double(total) / double(target), 1.0 / g.n) : 1.0;
    std::vector<int> stride(g.n);
    for (int d = 0; d < g.n; ++d) stride[d] = std::max(1, (int)std::floor(shrink));
    int idx[kMaxDim];
    for (int d = 0; d < g.n; ++d) idx[d] = margin;
    for (;;) {
        fn(static_cast<const int*>(idx));
        int d = g.n - 1;
        for (;;) {
            idx[d] += stride[d];
            if (idx[d] < g.shape[d] - margin) break;
            idx[d] = margin;
            if (--d < 0) return;
        }
    }
}

/// n-dimensional tensor-product cubic (4-point Lagrange) interpolation of a
/// stored field at an arbitrary point inside the grid. Throws NumericError
/// when the 4-point stencil does not fit.
double interp_cubic(const GridField& f, const double* x);

} // namespace sigmak
