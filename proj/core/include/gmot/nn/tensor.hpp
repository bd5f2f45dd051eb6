// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace gmot::nn {

// Dense row-major matrix of 64-bit reals. Row vectors are 1 x c, column
// vectors n x 1, scalars 1 x 1. Tensors are plain values; ops never alias.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    static Tensor zeros(int r, int c) { return Tensor(r, c); }
    static Tensor full(int r, int c, double v) {
        Tensor t(r, c);
        for (double& x : t.data) x = v;
        return t;
    }
    static Tensor row(std::initializer_list<double> vals) {
        Tensor t(1, static_cast<int>(vals.size()));
        int j = 0;
        for (double v : vals) t.data[j++] = v;
        return t;
    }
    static Tensor column(std::initializer_list<double> vals) {
        Tensor t(static_cast<int>(vals.size()), 1);
        int i = 0;
        for (double v : vals) t.data[i++] = v;
        return t;
    }
    static Tensor from_vector(const std::vector<double>& vals, int r, int c);
    static Tensor identity(int n) {
        Tensor t(n, n);
        for (int i = 0; i < n; ++i) t(i, i) = 1.0;
        return t;
    }

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    double* row_ptr(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const double* row_ptr(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
    bool all_finite() const;
};

bool approx_equal(const Tensor& a, const Tensor& b, double tol);

namespace kern {

// Fresh-result kernels.
Tensor matmul(const Tensor& a, const Tensor& b);       // a(n,m) * b(m,p)
Tensor matmul_nt(const Tensor& a, const Tensor& b);    // a(n,m) * b(p,m)^T
Tensor add(const Tensor& a, const Tensor& b);
Tensor add_rowvec(const Tensor& x, const Tensor& bias);  // bias: 1 x c
Tensor scale(const Tensor& x, double c);
Tensor hstack(const std::vector<const Tensor*>& parts);
Tensor vstack(const std::vector<const Tensor*>& parts);
Tensor gather_rows(const Tensor& x, const std::vector<int>& idx);
Tensor scatter_sum_rows(const Tensor& x, const std::vector<int>& idx, int out_rows);
Tensor scale_rows(const Tensor& x, const Tensor& s);   // s: n x 1
Tensor softmax_rows(const Tensor& x);
Tensor segment_softmax(const Tensor& x, const std::vector<int>& offsets);  // x: n x 1

// Accumulating kernels used by backward passes: dst += f(a, b).
void acc_matmul(Tensor& dst, const Tensor& a, const Tensor& b);     // += a * b
void acc_matmul_nt(Tensor& dst, const Tensor& a, const Tensor& b);  // += a * b^T
void acc_matmul_tn(Tensor& dst, const Tensor& a, const Tensor& b);  // += a^T * b
void acc(Tensor& dst, const Tensor& g);
void acc_scaled(Tensor& dst, const Tensor& g, double c);
void acc_colsum(Tensor& dst, const Tensor& g);  // dst: 1 x c += column sums

}  // namespace kern
}  // namespace gmot::nn
