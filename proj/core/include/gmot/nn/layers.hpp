// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gmot/nn/tape.hpp"
#include "gmot/nn/tensor.hpp"
#include "gmot/rng.hpp"

namespace gmot::nn {

enum class Act { Identity, Relu, LeakyRelu, Sigmoid };

struct MlpLayer {
    Tensor w;  // in x out
    Tensor b;  // 1 x out
    Act act = Act::Identity;
    double slope = 0.2;  // LeakyRelu only
};

struct Mlp {
    std::vector<MlpLayer> layers;

    int in_width() const { return layers.empty() ? 0 : layers.front().w.rows; }
    int out_width() const { return layers.empty() ? 0 : layers.back().w.cols; }

    // widths = {in, h1, ..., out}; acts has widths.size()-1 entries.
    static Mlp make(const std::vector<int>& widths, const std::vector<Act>& acts, Rng& rng);
};

// Fan-balanced symmetric uniform init: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(int rows, int cols, Rng& rng);

Tensor mlp_forward(const Mlp& m, const Tensor& x);
Var mlp_forward(Tape& t, const std::string& prefix, const Mlp& m, Var x);

struct MhaParams {
    int heads = 1;
    std::vector<Tensor> wq, wk, wv;  // per head: d_in x d_k
    Tensor wo;                       // (heads * d_k) x d_out

    int key_width() const { return wq.empty() ? 0 : wq.front().cols; }
    static MhaParams make(int d_in, int heads, int d_out, Rng& rng);
};

// Concat(head_1..head_h) W^O with head_u = Softmax(Q W_u^Q (K W_u^K)^T / sqrt(d_k)) V W_u^V.
Tensor multihead_attention(const MhaParams& p, const Tensor& q, const Tensor& k, const Tensor& v);
Var multihead_attention(Tape& t, const std::string& prefix, const MhaParams& p, Var q, Var k, Var v);

// velocity <- momentum * velocity + grad; param <- param - lr * velocity.
void sgd_step(Tensor& param, const Tensor& grad, Tensor& velocity, double lr, double momentum);

using ParamRefs = std::vector<std::pair<std::string, Tensor*>>;

struct SgdMomentum {
    double lr = 1e-4;
    double momentum = 0.9;
    std::map<std::string, Tensor> velocity;

    // Missing grad entries are treated as zero (parameter unused this step).
    void step(const ParamRefs& params, const std::map<std::string, Tensor>& grads);
};

struct FdReport {
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    std::string worst_param;
    int worst_entry = -1;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

// Central finite differences of a scalar function against analytic grads.
// Entries where both sides fall below atol are counted as matching: f64
// central differences carry an absolute noise floor (truncation plus
// roundoff) that makes sub-atol gradients unresolvable at any step.
// entries_per_tensor < 0 checks every entry; otherwise a seeded random
// subset of that size per tensor.
FdReport finite_difference_check(const std::function<double()>& f, const ParamRefs& params,
                                 const std::map<std::string, Tensor>& analytic, double step = 1e-5,
                                 int entries_per_tensor = -1, uint64_t seed = 7,
                                 double atol = 1e-5);

}  // namespace gmot::nn
