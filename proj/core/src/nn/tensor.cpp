// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/nn/tensor.hpp"

#include <cmath>
#include <string>

#include "gmot/errors.hpp"

namespace gmot::nn {

namespace {
[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes (" + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + ") vs (" + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols) + ")");
}
}  // namespace

Tensor Tensor::from_vector(const std::vector<double>& vals, int r, int c) {
    if (static_cast<size_t>(r) * c != vals.size()) {
        throw ShapeError("Tensor::from_vector: element count does not match shape");
    }
    Tensor t(r, c);
    t.data = vals;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool approx_equal(const Tensor& a, const Tensor& b, double tol) {
    if (!a.same_shape(b)) return false;
    for (size_t i = 0; i < a.data.size(); ++i) {
        if (std::abs(a.data[i] - b.data[i]) > tol) return false;
    }
    return true;
}

namespace kern {

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows) shape_fail("matmul", a, b);
    Tensor y(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        double* yi = y.row_ptr(i);
        const double* ai = a.row_ptr(i);
        for (int k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row_ptr(k);
            for (int j = 0; j < b.cols; ++j) yi[j] += aik * bk[j];
        }
    }
    return y;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    if (a.cols != b.cols) shape_fail("matmul_nt", a, b);
    Tensor y(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row_ptr(i);
        double* yi = y.row_ptr(i);
        for (int j = 0; j < b.rows; ++j) {
            const double* bj = b.row_ptr(j);
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
            yi[j] = s;
        }
    }
    return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) shape_fail("add", a, b);
    Tensor y = a;
    for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += b.data[i];
    return y;
}

Tensor add_rowvec(const Tensor& x, const Tensor& bias) {
    if (bias.rows != 1 || bias.cols != x.cols) shape_fail("add_rowvec", x, bias);
    Tensor y = x;
    for (int i = 0; i < y.rows; ++i) {
        double* yi = y.row_ptr(i);
        for (int j = 0; j < y.cols; ++j) yi[j] += bias.data[j];
    }
    return y;
}

Tensor scale(const Tensor& x, double c) {
    Tensor y = x;
    for (double& v : y.data) v *= c;
    return y;
}

Tensor hstack(const std::vector<const Tensor*>& parts) {
    if (parts.empty()) return Tensor();
    int rows = parts[0]->rows;
    int cols = 0;
    for (const Tensor* p : parts) {
        if (p->rows != rows) shape_fail("hstack", *parts[0], *p);
        cols += p->cols;
    }
    Tensor y(rows, cols);
    int off = 0;
    for (const Tensor* p : parts) {
        for (int i = 0; i < rows; ++i) {
            const double* src = p->row_ptr(i);
            double* dst = y.row_ptr(i) + off;
            for (int j = 0; j < p->cols; ++j) dst[j] = src[j];
        }
        off += p->cols;
    }
    return y;
}

Tensor vstack(const std::vector<const Tensor*>& parts) {
    if (parts.empty()) return Tensor();
    int cols = parts[0]->cols;
    int rows = 0;
    for (const Tensor* p : parts) {
        if (p->cols != cols) shape_fail("vstack", *parts[0], *p);
        rows += p->rows;
    }
    Tensor y(rows, cols);
    int off = 0;
    for (const Tensor* p : parts) {
        for (int i = 0; i < p->rows; ++i) {
            const double* src = p->row_ptr(i);
            double* dst = y.row_ptr(off + i);
            for (int j = 0; j < cols; ++j) dst[j] = src[j];
        }
        off += p->rows;
    }
    return y;
}

Tensor gather_rows(const Tensor& x, const std::vector<int>& idx) {
    Tensor y(static_cast<int>(idx.size()), x.cols);
    for (size_t r = 0; r < idx.size(); ++r) {
        const double* src = x.row_ptr(idx[r]);
        double* dst = y.row_ptr(static_cast<int>(r));
        for (int j = 0; j < x.cols; ++j) dst[j] = src[j];
    }
    return y;
}

Tensor scatter_sum_rows(const Tensor& x, const std::vector<int>& idx, int out_rows) {
    if (static_cast<size_t>(x.rows) != idx.size()) {
        throw ShapeError("scatter_sum_rows: index count does not match row count");
    }
    Tensor y(out_rows, x.cols);
    for (int r = 0; r < x.rows; ++r) {
        const double* src = x.row_ptr(r);
        double* dst = y.row_ptr(idx[r]);
        for (int j = 0; j < x.cols; ++j) dst[j] += src[j];
    }
    return y;
}

Tensor scale_rows(const Tensor& x, const Tensor& s) {
    if (s.rows != x.rows || s.cols != 1) shape_fail("scale_rows", x, s);
    Tensor y = x;
    for (int i = 0; i < y.rows; ++i) {
        double* yi = y.row_ptr(i);
        const double si = s.data[i];
        for (int j = 0; j < y.cols; ++j) yi[j] *= si;
    }
    return y;
}

Tensor softmax_rows(const Tensor& x) {
    Tensor y = x;
    for (int i = 0; i < x.rows; ++i) {
        double* yi = y.row_ptr(i);
        double mx = yi[0];
        for (int j = 1; j < x.cols; ++j) mx = std::max(mx, yi[j]);
        double sum = 0.0;
        for (int j = 0; j < x.cols; ++j) {
            yi[j] = std::exp(yi[j] - mx);
            sum += yi[j];
        }
        for (int j = 0; j < x.cols; ++j) yi[j] /= sum;
    }
    return y;
}

Tensor segment_softmax(const Tensor& x, const std::vector<int>& offsets) {
    if (x.cols != 1) throw ShapeError("segment_softmax: expects a column vector");
    Tensor y = x;
    for (size_t s = 0; s + 1 < offsets.size(); ++s) {
        const int lo = offsets[s];
        const int hi = offsets[s + 1];
        if (lo >= hi) continue;
        double mx = y.data[lo];
        for (int i = lo + 1; i < hi; ++i) mx = std::max(mx, y.data[i]);
        double sum = 0.0;
        for (int i = lo; i < hi; ++i) {
            y.data[i] = std::exp(y.data[i] - mx);
            sum += y.data[i];
        }
        for (int i = lo; i < hi; ++i) y.data[i] /= sum;
    }
    return y;
}

void acc_matmul(Tensor& dst, const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows || dst.rows != a.rows || dst.cols != b.cols) {
        shape_fail("acc_matmul", a, b);
    }
    for (int i = 0; i < a.rows; ++i) {
        double* di = dst.row_ptr(i);
        const double* ai = a.row_ptr(i);
        for (int k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row_ptr(k);
            for (int j = 0; j < b.cols; ++j) di[j] += aik * bk[j];
        }
    }
}

void acc_matmul_nt(Tensor& dst, const Tensor& a, const Tensor& b) {
    if (a.cols != b.cols || dst.rows != a.rows || dst.cols != b.rows) {
        shape_fail("acc_matmul_nt", a, b);
    }
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row_ptr(i);
        double* di = dst.row_ptr(i);
        for (int j = 0; j < b.rows; ++j) {
            const double* bj = b.row_ptr(j);
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
            di[j] += s;
        }
    }
}

void acc_matmul_tn(Tensor& dst, const Tensor& a, const Tensor& b) {
    if (a.rows != b.rows || dst.rows != a.cols || dst.cols != b.cols) {
        shape_fail("acc_matmul_tn", a, b);
    }
    for (int k = 0; k < a.rows; ++k) {
        const double* ak = a.row_ptr(k);
        const double* bk = b.row_ptr(k);
        for (int i = 0; i < a.cols; ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* di = dst.row_ptr(i);
            for (int j = 0; j < b.cols; ++j) di[j] += aki * bk[j];
        }
    }
}

void acc(Tensor& dst, const Tensor& g) {
    if (!dst.same_shape(g)) shape_fail("acc", dst, g);
    for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
}

void acc_scaled(Tensor& dst, const Tensor& g, double c) {
    if (!dst.same_shape(g)) shape_fail("acc_scaled", dst, g);
    for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += c * g.data[i];
}

void acc_colsum(Tensor& dst, const Tensor& g) {
    if (dst.rows != 1 || dst.cols != g.cols) shape_fail("acc_colsum", dst, g);
    for (int i = 0; i < g.rows; ++i) {
        const double* gi = g.row_ptr(i);
        for (int j = 0; j < g.cols; ++j) dst.data[j] += gi[j];
    }
}

}  // namespace kern
}  // namespace gmot::nn
