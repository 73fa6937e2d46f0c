#include "gsum/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

#include "gsum/kernels.hpp"

namespace gsum {

namespace {

thread_local bool g_grad_enabled = true;

size_t shape_numel(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw std::invalid_argument("negative dimension");
        n *= static_cast<size_t>(d);
    }
    return n;
}

std::string shape_to_str(const std::vector<int>& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(op + ": shape mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
}

// Builds the result node and wires the graph when gradients are on.
TensorPtr make_node(std::vector<int> shape, std::vector<TensorPtr> parents,
                    std::function<void(Tensor&)> backward_fn) {
    auto out = std::make_shared<Tensor>();
    out->shape = std::move(shape);
    out->value.resize(shape_numel(out->shape));
    if (g_grad_enabled) {
        bool needs = false;
        for (const auto& p : parents)
            if (p && p->requires_grad) needs = true;
        if (needs) {
            out->requires_grad = true;
            out->parents = std::move(parents);
            out->backward_fn = std::move(backward_fn);
        }
    }
    return out;
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : saved_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = saved_; }

GradModeScope::GradModeScope(bool enabled) : saved_(g_grad_enabled) {
    g_grad_enabled = enabled;
}
GradModeScope::~GradModeScope() { g_grad_enabled = saved_; }

TensorPtr Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->value.assign(shape_numel(t->shape), 0.0);
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Tensor::from_values(std::vector<int> shape, std::vector<double> values,
                              bool requires_grad) {
    if (shape_numel(shape) != values.size())
        throw std::invalid_argument("from_values: " + shape_to_str(shape) + " needs " +
                                    std::to_string(shape_numel(shape)) + " values, got " +
                                    std::to_string(values.size()));
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->value = std::move(values);
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Tensor::scalar(double v, bool requires_grad) {
    return from_values({1}, {v}, requires_grad);
}

int Tensor::rows() const {
    if (shape.size() != 2) throw std::logic_error("rows(): tensor is not 2-D " + shape_str());
    return shape[0];
}

int Tensor::cols() const {
    if (shape.size() != 2) throw std::logic_error("cols(): tensor is not 2-D " + shape_str());
    return shape[1];
}

double Tensor::item() const {
    if (!is_scalar()) throw std::logic_error("item(): tensor is not scalar " + shape_str());
    return value[0];
}

void Tensor::ensure_grad() {
    if (grad.empty()) grad.assign(numel(), 0.0);
}

std::string Tensor::shape_str() const { return shape_to_str(shape); }

// ---------------------------------------------------------------------------

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    if (a->shape != b->shape) shape_error("add", *a, *b);
    auto out = make_node(a->shape, {a, b}, [a, b](Tensor& self) {
        if (a->requires_grad) {
            a->ensure_grad();
            kernels::axpy(self.grad.data(), 1.0, a->grad.data(), self.numel());
        }
        if (b->requires_grad) {
            b->ensure_grad();
            kernels::axpy(self.grad.data(), 1.0, b->grad.data(), self.numel());
        }
    });
    kernels::add(a->value.data(), b->value.data(), out->value.data(), out->numel());
    return out;
}

TensorPtr add_rowvec(const TensorPtr& x, const TensorPtr& b) {
    if (x->shape.size() != 2 || b->shape.size() != 1 || b->shape[0] != x->shape[1])
        shape_error("add_rowvec", *x, *b);
    const int m = x->rows(), n = x->cols();
    auto out = make_node(x->shape, {x, b}, [x, b, m, n](Tensor& self) {
        if (x->requires_grad) {
            x->ensure_grad();
            kernels::axpy(self.grad.data(), 1.0, x->grad.data(), self.numel());
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    b->grad[j] += self.grad[static_cast<size_t>(i) * n + j];
        }
    });
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out->value[static_cast<size_t>(i) * n + j] =
                x->value[static_cast<size_t>(i) * n + j] + b->value[j];
    return out;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
    if (a->shape != b->shape) shape_error("mul", *a, *b);
    auto out = make_node(a->shape, {a, b}, [a, b](Tensor& self) {
        if (a->requires_grad) {
            a->ensure_grad();
            for (size_t i = 0; i < self.numel(); ++i) a->grad[i] += self.grad[i] * b->value[i];
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (size_t i = 0; i < self.numel(); ++i) b->grad[i] += self.grad[i] * a->value[i];
        }
    });
    for (size_t i = 0; i < out->numel(); ++i) out->value[i] = a->value[i] * b->value[i];
    return out;
}

TensorPtr scale(const TensorPtr& a, double c) {
    auto out = make_node(a->shape, {a}, [a, c](Tensor& self) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        kernels::axpy(self.grad.data(), c, a->grad.data(), self.numel());
    });
    kernels::scale(a->value.data(), c, out->value.data(), out->numel());
    return out;
}

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b) {
    if (a->shape.size() != 2 || b->shape.size() != 2 || a->shape[1] != b->shape[0])
        shape_error("matmul", *a, *b);
    const int m = a->shape[0], k = a->shape[1], n = b->shape[1];
    auto out = make_node({m, n}, {a, b}, [a, b, m, k, n](Tensor& self) {
        if (a->requires_grad) {
            a->ensure_grad();
            // dA += dY * B^T
            kernels::matmul_nt(self.grad.data(), b->value.data(), a->grad.data(), m, n, k,
                               true);
        }
        if (b->requires_grad) {
            b->ensure_grad();
            // dB += A^T * dY
            kernels::matmul_tn(a->value.data(), self.grad.data(), b->grad.data(), k, m, n,
                               true);
        }
    });
    kernels::matmul(a->value.data(), b->value.data(), out->value.data(), m, k, n);
    return out;
}

TensorPtr matmul_nt(const TensorPtr& a, const TensorPtr& b) {
    if (a->shape.size() != 2 || b->shape.size() != 2 || a->shape[1] != b->shape[1])
        shape_error("matmul_nt", *a, *b);
    const int m = a->shape[0], k = a->shape[1], n = b->shape[0];
    auto out = make_node({m, n}, {a, b}, [a, b, m, k, n](Tensor& self) {
        if (a->requires_grad) {
            a->ensure_grad();
            // dA += dY * B
            kernels::matmul(self.grad.data(), b->value.data(), a->grad.data(), m, n, k, true);
        }
        if (b->requires_grad) {
            b->ensure_grad();
            // dB += dY^T * A
            kernels::matmul_tn(self.grad.data(), a->value.data(), b->grad.data(), n, m, k,
                               true);
        }
    });
    kernels::matmul_nt(a->value.data(), b->value.data(), out->value.data(), m, k, n);
    return out;
}

TensorPtr transpose(const TensorPtr& a) {
    if (a->shape.size() != 2)
        throw std::invalid_argument("transpose: tensor is not 2-D " + a->shape_str());
    const int m = a->shape[0], n = a->shape[1];
    auto out = make_node({n, m}, {a}, [a, m, n](Tensor& self) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                a->grad[static_cast<size_t>(j) * n + i] +=
                    self.grad[static_cast<size_t>(i) * m + j];
    });
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out->value[static_cast<size_t>(j) * m + i] = a->value[static_cast<size_t>(i) * n + j];
    return out;
}

TensorPtr concat(const std::vector<TensorPtr>& parts, int axis) {
    if (parts.empty()) throw std::invalid_argument("concat: no inputs");
    if (axis != 0 && axis != 1) throw std::invalid_argument("concat: axis must be 0 or 1");
    for (const auto& p : parts)
        if (p->shape.size() != 2)
            throw std::invalid_argument("concat: tensor is not 2-D " + p->shape_str());
    const int fixed = axis == 0 ? parts[0]->cols() : parts[0]->rows();
    int total = 0;
    for (const auto& p : parts) {
        const int f = axis == 0 ? p->cols() : p->rows();
        if (f != fixed) shape_error("concat", *parts[0], *p);
        total += axis == 0 ? p->rows() : p->cols();
    }
    const int m = axis == 0 ? total : fixed;
    const int n = axis == 0 ? fixed : total;
    auto out = make_node({m, n}, std::vector<TensorPtr>(parts),
                         [parts, axis, n](Tensor& self) {
                             int off = 0;
                             for (const auto& p : parts) {
                                 const int pm = p->rows(), pn = p->cols();
                                 if (p->requires_grad) p->ensure_grad();
                                 if (axis == 0) {
                                     if (p->requires_grad)
                                         kernels::axpy(self.grad.data() +
                                                           static_cast<size_t>(off) * n,
                                                       1.0, p->grad.data(), p->numel());
                                     off += pm;
                                 } else {
                                     if (p->requires_grad)
                                         for (int i = 0; i < pm; ++i)
                                             for (int j = 0; j < pn; ++j)
                                                 p->grad[static_cast<size_t>(i) * pn + j] +=
                                                     self.grad[static_cast<size_t>(i) * n +
                                                               off + j];
                                     off += pn;
                                 }
                             }
                         });
    int off = 0;
    for (const auto& p : parts) {
        const int pm = p->rows(), pn = p->cols();
        if (axis == 0) {
            std::memcpy(out->value.data() + static_cast<size_t>(off) * n, p->value.data(),
                        sizeof(double) * p->numel());
            off += pm;
        } else {
            for (int i = 0; i < pm; ++i)
                for (int j = 0; j < pn; ++j)
                    out->value[static_cast<size_t>(i) * n + off + j] =
                        p->value[static_cast<size_t>(i) * pn + j];
            off += pn;
        }
    }
    return out;
}

TensorPtr slice_cols(const TensorPtr& x, int start, int len) {
    if (x->shape.size() != 2 || start < 0 || len < 1 || start + len > x->cols())
        throw std::invalid_argument("slice_cols: invalid range [" + std::to_string(start) +
                                    ", +" + std::to_string(len) + ") for " + x->shape_str());
    const int m = x->rows(), n = x->cols();
    auto out = make_node({m, len}, {x}, [x, start, len, m, n](Tensor& self) {
        if (!x->requires_grad) return;
        x->ensure_grad();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < len; ++j)
                x->grad[static_cast<size_t>(i) * n + start + j] +=
                    self.grad[static_cast<size_t>(i) * len + j];
    });
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < len; ++j)
            out->value[static_cast<size_t>(i) * len + j] =
                x->value[static_cast<size_t>(i) * n + start + j];
    return out;
}

TensorPtr embedding_lookup(const TensorPtr& table, const std::vector<int>& ids) {
    if (table->shape.size() != 2)
        throw std::invalid_argument("embedding_lookup: table is not 2-D " + table->shape_str());
    const int v = table->rows(), d = table->cols();
    for (int id : ids)
        if (id < 0 || id >= v)
            throw std::invalid_argument("embedding_lookup: id " + std::to_string(id) +
                                        " outside table " + table->shape_str());
    const int len = static_cast<int>(ids.size());
    auto out = make_node({len, d}, {table}, [table, ids, d](Tensor& self) {
        if (!table->requires_grad) return;
        table->ensure_grad();
        for (size_t t = 0; t < ids.size(); ++t)
            kernels::axpy_serial(self.grad.data() + t * d, 1.0,
                                 table->grad.data() + static_cast<size_t>(ids[t]) * d,
                                 static_cast<size_t>(d));
    });
    for (size_t t = 0; t < ids.size(); ++t)
        std::memcpy(out->value.data() + t * d,
                    table->value.data() + static_cast<size_t>(ids[t]) * d, sizeof(double) * d);
    return out;
}

TensorPtr linear(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
    return add_rowvec(matmul(x, w), b);
}

TensorPtr relu(const TensorPtr& x) {
    auto out = make_node(x->shape, {x}, [x](Tensor& self) {
        if (!x->requires_grad) return;
        x->ensure_grad();
        for (size_t i = 0; i < self.numel(); ++i)
            if (x->value[i] > 0.0) x->grad[i] += self.grad[i];
    });
    kernels::relu(x->value.data(), out->value.data(), out->numel());
    return out;
}

TensorPtr sum(const TensorPtr& x) {
    auto out = make_node({1}, {x}, [x](Tensor& self) {
        if (!x->requires_grad) return;
        x->ensure_grad();
        const double g = self.grad[0];
        for (size_t i = 0; i < x->numel(); ++i) x->grad[i] += g;
    });
    double acc = 0.0;
    for (double v : x->value) acc += v;
    out->value[0] = acc;
    return out;
}

TensorPtr softmax(const TensorPtr& x, int axis) {
    if (x->shape.size() != 2)
        throw std::invalid_argument("softmax: tensor is not 2-D " + x->shape_str());
    if (axis == 0) return transpose(softmax(transpose(x), 1));
    if (axis != 1 && axis != -1) throw std::invalid_argument("softmax: bad axis");
    const int m = x->rows(), n = x->cols();
    auto out = make_node(x->shape, {x}, [x, m, n](Tensor& self) {
        if (!x->requires_grad) return;
        x->ensure_grad();
        // dx = y .* (dy - sum(dy .* y) per row)
        for (int i = 0; i < m; ++i) {
            const double* y = self.value.data() + static_cast<size_t>(i) * n;
            const double* dy = self.grad.data() + static_cast<size_t>(i) * n;
            double dot = 0.0;
            for (int j = 0; j < n; ++j) dot += dy[j] * y[j];
            double* dx = x->grad.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) dx[j] += y[j] * (dy[j] - dot);
        }
    });
    kernels::softmax_rows(x->value.data(), out->value.data(), m, n);
    return out;
}

TensorPtr layer_norm(const TensorPtr& x, const TensorPtr& gain, const TensorPtr& bias,
                     double eps) {
    if (x->shape.size() != 2)
        throw std::invalid_argument("layer_norm: tensor is not 2-D " + x->shape_str());
    if (gain->shape.size() != 1 || gain->shape[0] != x->shape[1])
        shape_error("layer_norm gain", *x, *gain);
    if (bias->shape != gain->shape) shape_error("layer_norm bias", *gain, *bias);
    const int m = x->rows(), n = x->cols();
    auto mean = std::make_shared<std::vector<double>>(m);
    auto rstd = std::make_shared<std::vector<double>>(m);
    auto out = make_node(x->shape, {x, gain, bias}, [x, gain, bias, mean, rstd, m,
                                                     n](Tensor& self) {
        if (x->requires_grad) x->ensure_grad();
        if (gain->requires_grad) gain->ensure_grad();
        if (bias->requires_grad) bias->ensure_grad();
        std::vector<double> xhat(n), dxhat(n);
        for (int i = 0; i < m; ++i) {
            const double mu = (*mean)[i], rs = (*rstd)[i];
            const double* xr = x->value.data() + static_cast<size_t>(i) * n;
            const double* dy = self.grad.data() + static_cast<size_t>(i) * n;
            double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
            for (int j = 0; j < n; ++j) {
                xhat[j] = (xr[j] - mu) * rs;
                dxhat[j] = dy[j] * gain->value[j];
                mean_dxhat += dxhat[j];
                mean_dxhat_xhat += dxhat[j] * xhat[j];
            }
            mean_dxhat /= n;
            mean_dxhat_xhat /= n;
            if (x->requires_grad) {
                double* dx = x->grad.data() + static_cast<size_t>(i) * n;
                for (int j = 0; j < n; ++j)
                    dx[j] += rs * (dxhat[j] - mean_dxhat - xhat[j] * mean_dxhat_xhat);
            }
            if (gain->requires_grad)
                for (int j = 0; j < n; ++j) gain->grad[j] += dy[j] * xhat[j];
            if (bias->requires_grad)
                for (int j = 0; j < n; ++j) bias->grad[j] += dy[j];
        }
    });
    kernels::layer_norm_rows(x->value.data(), gain->value.data(), bias->value.data(), eps,
                             out->value.data(), mean->data(), rstd->data(), m, n);
    return out;
}

TensorPtr attention(const TensorPtr& q, const TensorPtr& k, const TensorPtr& v,
                    const TensorPtr& mask) {
    if (q->shape.size() != 2 || k->shape.size() != 2 || q->shape[1] != k->shape[1])
        shape_error("attention q/k", *q, *k);
    if (v->shape.size() != 2 || v->shape[0] != k->shape[0]) shape_error("attention k/v", *k, *v);
    const int dk = q->shape[1];
    auto scores = scale(matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(dk)));
    if (mask) {
        if (mask->shape != scores->shape) shape_error("attention mask", *scores, *mask);
        scores = add(scores, mask);
    }
    return matmul(softmax(scores, -1), v);
}

TensorPtr dropout(const TensorPtr& x, double rate, std::mt19937_64& rng) {
    if (rate <= 0.0) return x;
    if (rate >= 1.0) throw std::invalid_argument("dropout: rate must be < 1");
    const double keep = 1.0 - rate;
    auto mask = std::make_shared<std::vector<double>>(x->numel());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& m : *mask) m = unif(rng) < keep ? 1.0 / keep : 0.0;
    auto out = make_node(x->shape, {x}, [x, mask](Tensor& self) {
        if (!x->requires_grad) return;
        x->ensure_grad();
        for (size_t i = 0; i < self.numel(); ++i) x->grad[i] += self.grad[i] * (*mask)[i];
    });
    for (size_t i = 0; i < x->numel(); ++i) out->value[i] = x->value[i] * (*mask)[i];
    return out;
}

TensorPtr token_nll(const TensorPtr& logits, const std::vector<int>& targets,
                    double label_smoothing) {
    if (logits->shape.size() != 2)
        throw std::invalid_argument("token_nll: logits not 2-D " + logits->shape_str());
    const int t = logits->rows(), v = logits->cols();
    if (static_cast<int>(targets.size()) != t)
        throw std::invalid_argument("token_nll: " + std::to_string(targets.size()) +
                                    " targets for " + std::to_string(t) + " rows");
    for (int id : targets)
        if (id < 0 || id >= v)
            throw std::invalid_argument("token_nll: target " + std::to_string(id) +
                                        " outside vocab of " + std::to_string(v));
    const double eps = label_smoothing;
    auto probs = std::make_shared<std::vector<double>>(static_cast<size_t>(t) * v);
    kernels::softmax_rows(logits->value.data(), probs->data(), t, v);

    auto out = make_node({1}, {logits}, [logits, targets, probs, eps, t, v](Tensor& self) {
        if (!logits->requires_grad) return;
        logits->ensure_grad();
        const double g = self.grad[0];
        const double unif = eps / v;
        for (int i = 0; i < t; ++i) {
            const double* p = probs->data() + static_cast<size_t>(i) * v;
            double* dl = logits->grad.data() + static_cast<size_t>(i) * v;
            for (int j = 0; j < v; ++j) dl[j] += g * (p[j] - unif);
            dl[targets[i]] -= g * (1.0 - eps);
        }
    });
    double total = 0.0;
    for (int i = 0; i < t; ++i) {
        const double* row = logits->value.data() + static_cast<size_t>(i) * v;
        double mx = row[0];
        for (int j = 1; j < v; ++j) mx = row[j] > mx ? row[j] : mx;
        double lse = 0.0, zsum = 0.0;
        for (int j = 0; j < v; ++j) {
            lse += std::exp(row[j] - mx);
            zsum += row[j];
        }
        lse = mx + std::log(lse);
        total += (1.0 - eps) * (lse - row[targets[i]]) + eps * (lse - zsum / v);
    }
    out->value[0] = total;
    return out;
}

void backward(const TensorPtr& loss) {
    if (!loss->is_scalar())
        throw std::invalid_argument("backward: loss is not scalar " + loss->shape_str());
    if (loss->backward_done)
        throw std::logic_error("backward: graph already consumed; rebuild the forward pass");
    if (!loss->requires_grad)
        throw std::logic_error("backward: loss does not require gradients");

    // Iterative DFS post-order: every node lands after all of its parents,
    // so the reversed list runs consumers before producers.
    std::vector<Tensor*> order;
    std::unordered_set<Tensor*> seen;
    std::vector<std::pair<Tensor*, size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    seen.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Tensor* p = node->parents[next++].get();
            if (p && !seen.count(p) && p->requires_grad) {
                seen.insert(p);
                stack.emplace_back(p, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->ensure_grad();
    loss->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor* node = *it;
        if (node->backward_fn) {
            node->ensure_grad();
            node->backward_fn(*node);
        }
        node->backward_done = true;
    }
}

}  // namespace gsum
