// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gmot/nn/tensor.hpp"

namespace gmot::nn {

class Tape;

// Handle to a tape node. Only meaningful together with the tape that
// produced it.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Records one forward pass as a straight-line program. Node creation order
// is a topological order, so reversing it visits every op exactly once with
// all downstream gradients already accumulated. A non-recording tape runs
// the same value computations but stores no backward closures; backward()
// is then a state error.
class Tape {
public:
    using BackFn = std::function<void(Tape&, int)>;

    explicit Tape(bool recording = true) : recording_(recording) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const { return recording_; }
    size_t size() const { return nodes_.size(); }

    Var constant(Tensor value);
    // Leases a named parameter onto the tape; repeated leases of the same
    // name return the same leaf so gradients accumulate in one place.
    Var param(const std::string& name, const Tensor& value);

    const Tensor& val(Var v) const { return nodes_[v.id].value; }
    const Tensor& grad(Var v) const;

    // Seeds d(loss)/d(loss) = seed and sweeps the tape in reverse.
    void backward(Var loss, double seed = 1.0);
    bool backward_done() const { return backward_done_; }

    // Gradients of every leased parameter, keyed by name. Parameters that
    // did not participate in any op report zeros of their own shape.
    std::map<std::string, Tensor> param_grads() const;

    // Op-construction interface (used by the free functions below).
    Var emit(Tensor value, BackFn back);
    Tensor& grad_mut(int id) { return nodes_[id].grad; }
    const Tensor& val_at(int id) const { return nodes_[id].value; }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        BackFn back;
    };
    std::vector<Node> nodes_;
    std::map<std::string, int> param_index_;
    bool recording_;
    bool backward_done_ = false;
};

// Differentiable ops. All shapes are validated; failures throw ShapeError.
Var matmul(Tape& t, Var a, Var b);
Var matmul_nt(Tape& t, Var a, Var b);  // a * b^T
Var add(Tape& t, Var a, Var b);
Var add_rowvec(Tape& t, Var x, Var bias);
Var scale(Tape& t, Var x, double c);
Var concat_cols(Tape& t, const std::vector<Var>& parts);
Var concat_rows(Tape& t, const std::vector<Var>& parts);
Var relu(Tape& t, Var x);
Var leaky_relu(Tape& t, Var x, double slope);
Var sigmoid(Tape& t, Var x);
Var softmax_rows(Tape& t, Var x);
Var gather_rows(Tape& t, Var x, std::vector<int> idx);
Var scatter_sum_rows(Tape& t, Var x, std::vector<int> idx, int out_rows);
Var scale_rows(Tape& t, Var x, Var s);
Var segment_softmax(Tape& t, Var x, std::vector<int> offsets);
Var sum_all(Tape& t, Var x);
Var mean_all(Tape& t, Var x);

// Mean over edges of w_e * BCE(p_e, y_e) with the logs clamped at 1e-12.
// An empty edge set yields the constant 0.
Var weighted_bce_mean(Tape& t, Var p, std::vector<double> labels, std::vector<double> weights);

}  // namespace gmot::nn
