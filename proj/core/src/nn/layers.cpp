// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "gmot/errors.hpp"

namespace gmot::nn {

Tensor glorot_uniform(int rows, int cols, Rng& rng) {
    Tensor t(rows, cols);
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& v : t.data) v = rng.uniform(-a, a);
    return t;
}

Mlp Mlp::make(const std::vector<int>& widths, const std::vector<Act>& acts, Rng& rng) {
    if (widths.size() < 2 || acts.size() != widths.size() - 1) {
        throw ShapeError("Mlp::make: widths/activations mismatch");
    }
    Mlp m;
    for (size_t i = 0; i + 1 < widths.size(); ++i) {
        MlpLayer layer;
        layer.w = glorot_uniform(widths[i], widths[i + 1], rng);
        // Small random biases keep zero-input rows (empty neighborhood
        // sums) away from the exact ReLU kink.
        layer.b = Tensor(1, widths[i + 1]);
        for (double& v : layer.b.data) v = rng.uniform(-0.1, 0.1);
        layer.act = acts[i];
        m.layers.push_back(std::move(layer));
    }
    return m;
}

namespace {
Tensor apply_act(Tensor x, Act act, double slope) {
    switch (act) {
        case Act::Identity:
            return x;
        case Act::Relu:
            for (double& v : x.data) v = v > 0.0 ? v : 0.0;
            return x;
        case Act::LeakyRelu:
            for (double& v : x.data) v = v > 0.0 ? v : slope * v;
            return x;
        case Act::Sigmoid:
            for (double& v : x.data) v = 1.0 / (1.0 + std::exp(-v));
            return x;
    }
    return x;
}

Var apply_act(Tape& t, Var x, Act act, double slope) {
    switch (act) {
        case Act::Identity:
            return x;
        case Act::Relu:
            return relu(t, x);
        case Act::LeakyRelu:
            return leaky_relu(t, x, slope);
        case Act::Sigmoid:
            return sigmoid(t, x);
    }
    return x;
}
}  // namespace

Tensor mlp_forward(const Mlp& m, const Tensor& x) {
    Tensor h = x;
    for (const MlpLayer& layer : m.layers) {
        h = apply_act(kern::add_rowvec(kern::matmul(h, layer.w), layer.b), layer.act, layer.slope);
    }
    return h;
}

Var mlp_forward(Tape& t, const std::string& prefix, const Mlp& m, Var x) {
    Var h = x;
    for (size_t i = 0; i < m.layers.size(); ++i) {
        const MlpLayer& layer = m.layers[i];
        Var w = t.param(prefix + ".w" + std::to_string(i), layer.w);
        Var b = t.param(prefix + ".b" + std::to_string(i), layer.b);
        h = apply_act(t, add_rowvec(t, matmul(t, h, w), b), layer.act, layer.slope);
    }
    return h;
}

MhaParams MhaParams::make(int d_in, int heads, int d_out, Rng& rng) {
    if (heads < 1 || d_in % heads != 0) {
        throw ShapeError("MhaParams::make: input width must divide evenly across heads");
    }
    const int d_k = d_in / heads;
    MhaParams p;
    p.heads = heads;
    for (int u = 0; u < heads; ++u) {
        p.wq.push_back(glorot_uniform(d_in, d_k, rng));
        p.wk.push_back(glorot_uniform(d_in, d_k, rng));
        p.wv.push_back(glorot_uniform(d_in, d_k, rng));
    }
    p.wo = glorot_uniform(heads * d_k, d_out, rng);
    return p;
}

Tensor multihead_attention(const MhaParams& p, const Tensor& q, const Tensor& k, const Tensor& v) {
    if (k.rows != v.rows) throw ShapeError("multihead_attention: key/value row counts differ");
    std::vector<Tensor> heads;
    heads.reserve(p.heads);
    for (int u = 0; u < p.heads; ++u) {
        Tensor qp = kern::matmul(q, p.wq[u]);
        Tensor kp = kern::matmul(k, p.wk[u]);
        Tensor vp = kern::matmul(v, p.wv[u]);
        const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(p.wq[u].cols));
        Tensor att = kern::softmax_rows(kern::scale(kern::matmul_nt(qp, kp), inv_sqrt_dk));
        heads.push_back(kern::matmul(att, vp));
    }
    std::vector<const Tensor*> ptrs;
    for (const Tensor& h : heads) ptrs.push_back(&h);
    return kern::matmul(kern::hstack(ptrs), p.wo);
}

Var multihead_attention(Tape& t, const std::string& prefix, const MhaParams& p, Var q, Var k,
                        Var v) {
    if (t.val(k).rows != t.val(v).rows) {
        throw ShapeError("multihead_attention: key/value row counts differ");
    }
    std::vector<Var> heads;
    for (int u = 0; u < p.heads; ++u) {
        const std::string h = prefix + ".h" + std::to_string(u);
        Var wq = t.param(h + ".wq", p.wq[u]);
        Var wk = t.param(h + ".wk", p.wk[u]);
        Var wv = t.param(h + ".wv", p.wv[u]);
        Var qp = matmul(t, q, wq);
        Var kp = matmul(t, k, wk);
        Var vp = matmul(t, v, wv);
        const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(p.wq[u].cols));
        Var att = softmax_rows(t, scale(t, matmul_nt(t, qp, kp), inv_sqrt_dk));
        heads.push_back(matmul(t, att, vp));
    }
    Var wo = t.param(prefix + ".wo", p.wo);
    return matmul(t, concat_cols(t, heads), wo);
}

void sgd_step(Tensor& param, const Tensor& grad, Tensor& velocity, double lr, double momentum) {
    if (!param.same_shape(grad) || !param.same_shape(velocity)) {
        throw ShapeError("sgd_step: param/grad/velocity shapes differ");
    }
    for (size_t i = 0; i < param.data.size(); ++i) {
        velocity.data[i] = momentum * velocity.data[i] + grad.data[i];
        param.data[i] -= lr * velocity.data[i];
    }
}

void SgdMomentum::step(const ParamRefs& params, const std::map<std::string, Tensor>& grads) {
    for (const auto& [name, tensor] : params) {
        auto vit = velocity.find(name);
        if (vit == velocity.end()) {
            vit = velocity.emplace(name, Tensor(tensor->rows, tensor->cols)).first;
        }
        auto git = grads.find(name);
        if (git != grads.end()) {
            sgd_step(*tensor, git->second, vit->second, lr, momentum);
        } else {
            // Unused this step: momentum keeps decaying the velocity.
            Tensor zero(tensor->rows, tensor->cols);
            sgd_step(*tensor, zero, vit->second, lr, momentum);
        }
    }
}

FdReport finite_difference_check(const std::function<double()>& f, const ParamRefs& params,
                                 const std::map<std::string, Tensor>& analytic, double step,
                                 int entries_per_tensor, uint64_t seed, double atol) {
    FdReport rep;
    Rng rng(seed);
    for (const auto& [name, tensor] : params) {
        auto it = analytic.find(name);
        std::vector<size_t> entries;
        const size_t n = tensor->data.size();
        if (entries_per_tensor < 0 || static_cast<size_t>(entries_per_tensor) >= n) {
            entries.resize(n);
            for (size_t i = 0; i < n; ++i) entries[i] = i;
        } else {
            for (int i = 0; i < entries_per_tensor; ++i) {
                entries.push_back(static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(n) - 1)));
            }
        }
        for (size_t e : entries) {
            const double saved = tensor->data[e];
            tensor->data[e] = saved + step;
            const double fp = f();
            tensor->data[e] = saved - step;
            const double fm = f();
            tensor->data[e] = saved;
            const double numeric = (fp - fm) / (2.0 * step);
            const double an = it != analytic.end() ? it->second.data[e] : 0.0;
            const double abs_err = std::abs(an - numeric);
            const double scale = std::max(std::abs(an), std::abs(numeric));
            const double rel = scale < atol ? 0.0 : abs_err / scale;
            if (rel > rep.max_rel_err) {
                rep.max_rel_err = rel;
                rep.worst_param = name;
                rep.worst_entry = static_cast<int>(e);
                rep.worst_analytic = an;
                rep.worst_numeric = numeric;
            }
            rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
        }
    }
    return rep;
}

}  // namespace gmot::nn
