// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/nn/tape.hpp"

#include <cmath>

#include "gmot/errors.hpp"

namespace gmot::nn {

Var Tape::constant(Tensor value) { return emit(std::move(value), BackFn{}); }

Var Tape::param(const std::string& name, const Tensor& value) {
    auto it = param_index_.find(name);
    if (it != param_index_.end()) return Var{it->second};
    Var v = emit(value, BackFn{});
    param_index_.emplace(name, v.id);
    return v;
}

Var Tape::emit(Tensor value, BackFn back) {
    Node n;
    n.value = std::move(value);
    if (recording_) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Tape::grad(Var v) const {
    if (!backward_done_) throw StateError("Tape::grad: backward has not been run");
    return nodes_[v.id].grad;
}

void Tape::backward(Var loss, double seed) {
    if (!recording_) throw StateError("Tape::backward: tape is not recording");
    if (backward_done_) throw StateError("Tape::backward: backward already ran on this tape");
    if (!loss.valid() || static_cast<size_t>(loss.id) >= nodes_.size()) {
        throw StateError("Tape::backward: no recorded loss");
    }
    const Tensor& lv = nodes_[loss.id].value;
    if (lv.rows != 1 || lv.cols != 1) {
        throw StateError("Tape::backward: loss must be a 1x1 scalar");
    }
    for (Node& n : nodes_) n.grad = Tensor(n.value.rows, n.value.cols);
    nodes_[loss.id].grad(0, 0) = seed;
    for (int id = loss.id; id >= 0; --id) {
        if (nodes_[id].back) nodes_[id].back(*this, id);
    }
    backward_done_ = true;
}

std::map<std::string, Tensor> Tape::param_grads() const {
    if (!backward_done_) throw StateError("Tape::param_grads: backward has not been run");
    std::map<std::string, Tensor> out;
    for (const auto& [name, id] : param_index_) out.emplace(name, nodes_[id].grad);
    return out;
}

// ---- ops ----

Var matmul(Tape& t, Var a, Var b) {
    Tensor y = kern::matmul(t.val(a), t.val(b));
    return t.emit(std::move(y), [ia = a.id, ib = b.id](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        kern::acc_matmul_nt(tp.grad_mut(ia), g, tp.val_at(ib));  // dA += G B^T
        kern::acc_matmul_tn(tp.grad_mut(ib), tp.val_at(ia), g);  // dB += A^T G
    });
}

Var matmul_nt(Tape& t, Var a, Var b) {
    Tensor y = kern::matmul_nt(t.val(a), t.val(b));
    return t.emit(std::move(y), [ia = a.id, ib = b.id](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        kern::acc_matmul(tp.grad_mut(ia), g, tp.val_at(ib));     // dA += G B
        kern::acc_matmul_tn(tp.grad_mut(ib), g, tp.val_at(ia));  // dB += G^T A
    });
}

Var add(Tape& t, Var a, Var b) {
    Tensor y = kern::add(t.val(a), t.val(b));
    return t.emit(std::move(y), [ia = a.id, ib = b.id](Tape& tp, int self) {
        kern::acc(tp.grad_mut(ia), tp.grad_mut(self));
        kern::acc(tp.grad_mut(ib), tp.grad_mut(self));
    });
}

Var add_rowvec(Tape& t, Var x, Var bias) {
    Tensor y = kern::add_rowvec(t.val(x), t.val(bias));
    return t.emit(std::move(y), [ix = x.id, ib = bias.id](Tape& tp, int self) {
        kern::acc(tp.grad_mut(ix), tp.grad_mut(self));
        kern::acc_colsum(tp.grad_mut(ib), tp.grad_mut(self));
    });
}

Var scale(Tape& t, Var x, double c) {
    Tensor y = kern::scale(t.val(x), c);
    return t.emit(std::move(y), [ix = x.id, c](Tape& tp, int self) {
        kern::acc_scaled(tp.grad_mut(ix), tp.grad_mut(self), c);
    });
}

Var concat_cols(Tape& t, const std::vector<Var>& parts) {
    std::vector<const Tensor*> ptrs;
    std::vector<int> ids;
    ptrs.reserve(parts.size());
    for (Var p : parts) {
        ptrs.push_back(&t.val(p));
        ids.push_back(p.id);
    }
    Tensor y = kern::hstack(ptrs);
    return t.emit(std::move(y), [ids = std::move(ids)](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        int off = 0;
        for (int id : ids) {
            Tensor& d = tp.grad_mut(id);
            for (int i = 0; i < d.rows; ++i) {
                const double* gi = g.row_ptr(i) + off;
                double* di = d.row_ptr(i);
                for (int j = 0; j < d.cols; ++j) di[j] += gi[j];
            }
            off += d.cols;
        }
    });
}

Var concat_rows(Tape& t, const std::vector<Var>& parts) {
    std::vector<const Tensor*> ptrs;
    std::vector<int> ids;
    for (Var p : parts) {
        ptrs.push_back(&t.val(p));
        ids.push_back(p.id);
    }
    Tensor y = kern::vstack(ptrs);
    return t.emit(std::move(y), [ids = std::move(ids)](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        int off = 0;
        for (int id : ids) {
            Tensor& d = tp.grad_mut(id);
            for (int i = 0; i < d.rows; ++i) {
                const double* gi = g.row_ptr(off + i);
                double* di = d.row_ptr(i);
                for (int j = 0; j < d.cols; ++j) di[j] += gi[j];
            }
            off += d.rows;
        }
    });
}

Var relu(Tape& t, Var x) {
    Tensor y = t.val(x);
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    return t.emit(std::move(y), [ix = x.id](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        const Tensor& xin = tp.val_at(ix);
        Tensor& d = tp.grad_mut(ix);
        for (size_t i = 0; i < d.data.size(); ++i) {
            if (xin.data[i] > 0.0) d.data[i] += g.data[i];
        }
    });
}

Var leaky_relu(Tape& t, Var x, double slope) {
    Tensor y = t.val(x);
    for (double& v : y.data) v = v > 0.0 ? v : slope * v;
    return t.emit(std::move(y), [ix = x.id, slope](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        const Tensor& xin = tp.val_at(ix);
        Tensor& d = tp.grad_mut(ix);
        for (size_t i = 0; i < d.data.size(); ++i) {
            d.data[i] += (xin.data[i] > 0.0 ? 1.0 : slope) * g.data[i];
        }
    });
}

Var sigmoid(Tape& t, Var x) {
    Tensor y = t.val(x);
    for (double& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
    return t.emit(std::move(y), [ix = x.id](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        const Tensor& yv = tp.val_at(self);
        Tensor& d = tp.grad_mut(ix);
        for (size_t i = 0; i < d.data.size(); ++i) {
            d.data[i] += yv.data[i] * (1.0 - yv.data[i]) * g.data[i];
        }
    });
}

Var softmax_rows(Tape& t, Var x) {
    Tensor y = kern::softmax_rows(t.val(x));
    return t.emit(std::move(y), [ix = x.id](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        const Tensor& yv = tp.val_at(self);
        Tensor& d = tp.grad_mut(ix);
        for (int i = 0; i < yv.rows; ++i) {
            const double* gi = g.row_ptr(i);
            const double* yi = yv.row_ptr(i);
            double dot = 0.0;
            for (int j = 0; j < yv.cols; ++j) dot += gi[j] * yi[j];
            double* di = d.row_ptr(i);
            for (int j = 0; j < yv.cols; ++j) di[j] += yi[j] * (gi[j] - dot);
        }
    });
}

Var gather_rows(Tape& t, Var x, std::vector<int> idx) {
    Tensor y = kern::gather_rows(t.val(x), idx);
    return t.emit(std::move(y), [ix = x.id, idx = std::move(idx)](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        Tensor& d = tp.grad_mut(ix);
        for (size_t r = 0; r < idx.size(); ++r) {
            const double* gr = g.row_ptr(static_cast<int>(r));
            double* dr = d.row_ptr(idx[r]);
            for (int j = 0; j < d.cols; ++j) dr[j] += gr[j];
        }
    });
}

Var scatter_sum_rows(Tape& t, Var x, std::vector<int> idx, int out_rows) {
    Tensor y = kern::scatter_sum_rows(t.val(x), idx, out_rows);
    return t.emit(std::move(y), [ix = x.id, idx = std::move(idx)](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        Tensor& d = tp.grad_mut(ix);
        for (int r = 0; r < d.rows; ++r) {
            const double* gr = g.row_ptr(idx[r]);
            double* dr = d.row_ptr(r);
            for (int j = 0; j < d.cols; ++j) dr[j] += gr[j];
        }
    });
}

Var scale_rows(Tape& t, Var x, Var s) {
    Tensor y = kern::scale_rows(t.val(x), t.val(s));
    return t.emit(std::move(y), [ix = x.id, is = s.id](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        const Tensor& xv = tp.val_at(ix);
        const Tensor& sv = tp.val_at(is);
        Tensor& dx = tp.grad_mut(ix);
        Tensor& ds = tp.grad_mut(is);
        for (int i = 0; i < xv.rows; ++i) {
            const double* gi = g.row_ptr(i);
            const double* xi = xv.row_ptr(i);
            double* di = dx.row_ptr(i);
            double dsi = 0.0;
            for (int j = 0; j < xv.cols; ++j) {
                di[j] += sv.data[i] * gi[j];
                dsi += gi[j] * xi[j];
            }
            ds.data[i] += dsi;
        }
    });
}

Var segment_softmax(Tape& t, Var x, std::vector<int> offsets) {
    Tensor y = kern::segment_softmax(t.val(x), offsets);
    return t.emit(std::move(y), [ix = x.id, offsets = std::move(offsets)](Tape& tp, int self) {
        const Tensor& g = tp.grad_mut(self);
        const Tensor& yv = tp.val_at(self);
        Tensor& d = tp.grad_mut(ix);
        for (size_t s = 0; s + 1 < offsets.size(); ++s) {
            const int lo = offsets[s];
            const int hi = offsets[s + 1];
            double dot = 0.0;
            for (int i = lo; i < hi; ++i) dot += g.data[i] * yv.data[i];
            for (int i = lo; i < hi; ++i) d.data[i] += yv.data[i] * (g.data[i] - dot);
        }
    });
}

Var sum_all(Tape& t, Var x) {
    double s = 0.0;
    for (double v : t.val(x).data) s += v;
    return t.emit(Tensor::full(1, 1, s), [ix = x.id](Tape& tp, int self) {
        const double g = tp.grad_mut(self)(0, 0);
        for (double& v : tp.grad_mut(ix).data) v += g;
    });
}

Var mean_all(Tape& t, Var x) {
    const size_t n = t.val(x).size();
    double s = 0.0;
    for (double v : t.val(x).data) s += v;
    const double inv = n ? 1.0 / static_cast<double>(n) : 0.0;
    return t.emit(Tensor::full(1, 1, s * inv), [ix = x.id, inv](Tape& tp, int self) {
        const double g = tp.grad_mut(self)(0, 0) * inv;
        for (double& v : tp.grad_mut(ix).data) v += g;
    });
}

Var weighted_bce_mean(Tape& t, Var p, std::vector<double> labels, std::vector<double> weights) {
    static constexpr double kLogClamp = 1e-12;
    const Tensor& pv = t.val(p);
    if (pv.cols != 1 || static_cast<size_t>(pv.rows) != labels.size() ||
        labels.size() != weights.size()) {
        throw ShapeError("weighted_bce_mean: scores/labels/weights misaligned");
    }
    const int n = pv.rows;
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double pi = pv.data[i];
        const double yi = labels[i];
        loss -= weights[i] * (yi * std::log(std::max(pi, kLogClamp)) +
                              (1.0 - yi) * std::log(std::max(1.0 - pi, kLogClamp)));
    }
    if (n > 0) loss /= n;
    return t.emit(Tensor::full(1, 1, loss),
                  [ip = p.id, labels = std::move(labels), weights = std::move(weights)](Tape& tp, int self) {
                      const double g = tp.grad_mut(self)(0, 0);
                      const Tensor& pv2 = tp.val_at(ip);
                      Tensor& d = tp.grad_mut(ip);
                      const int m = pv2.rows;
                      if (m == 0) return;
                      const double inv = 1.0 / m;
                      for (int i = 0; i < m; ++i) {
                          const double pi = pv2.data[i];
                          double dp = 0.0;
                          if (pi > kLogClamp) dp -= labels[i] / pi;
                          if (1.0 - pi > kLogClamp) dp += (1.0 - labels[i]) / (1.0 - pi);
                          d.data[i] += g * inv * weights[i] * dp;
                      }
                  });
}

}  // namespace gmot::nn
