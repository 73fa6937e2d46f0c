#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace gsum {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// Dense f64 tensor doubling as a node of the reverse-mode graph. Ops are
// eager: the forward value is computed on construction and the node keeps
// the closure that routes gradients to its parents. With gradients disabled
// (NoGradGuard) no graph is recorded and nodes are plain values.
class Tensor {
public:
    std::vector<int> shape;
    std::vector<double> value;
    std::vector<double> grad;  // allocated on first accumulation
    bool requires_grad = false;

    std::vector<TensorPtr> parents;
    std::function<void(Tensor&)> backward_fn;
    bool backward_done = false;

    static TensorPtr zeros(std::vector<int> shape, bool requires_grad = false);
    static TensorPtr from_values(std::vector<int> shape, std::vector<double> values,
                                 bool requires_grad = false);
    static TensorPtr scalar(double v, bool requires_grad = false);

    size_t numel() const { return value.size(); }
    int rows() const;
    int cols() const;
    bool is_scalar() const { return value.size() == 1; }
    double item() const;

    void ensure_grad();
    void zero_grad() { grad.clear(); }

    std::string shape_str() const;
};

bool grad_enabled();

struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool saved_;
};

// Pins this thread's grad mode to an explicit value; grad mode is
// thread-local, so worker threads must inherit the caller's mode through
// one of these.
struct GradModeScope {
    explicit GradModeScope(bool enabled);
    ~GradModeScope();
    GradModeScope(const GradModeScope&) = delete;
    GradModeScope& operator=(const GradModeScope&) = delete;

private:
    bool saved_;
};

// Core ops. Shape mismatches throw std::invalid_argument naming both shapes.
TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr add_rowvec(const TensorPtr& x, const TensorPtr& b);  // b broadcast over rows
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);         // elementwise
TensorPtr scale(const TensorPtr& a, double c);
TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
TensorPtr matmul_nt(const TensorPtr& a, const TensorPtr& b);  // a * b^T
TensorPtr transpose(const TensorPtr& a);
TensorPtr concat(const std::vector<TensorPtr>& parts, int axis);
TensorPtr slice_cols(const TensorPtr& x, int start, int len);
TensorPtr embedding_lookup(const TensorPtr& table, const std::vector<int>& ids);
TensorPtr linear(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);
TensorPtr relu(const TensorPtr& x);
TensorPtr sum(const TensorPtr& x);  // scalar

// Row softmax for axis=1 (or -1); axis=0 goes through transposes.
TensorPtr softmax(const TensorPtr& x, int axis = -1);

// Per-row normalization over the last dimension, then affine.
TensorPtr layer_norm(const TensorPtr& x, const TensorPtr& gain, const TensorPtr& bias,
                     double eps = 1e-6);

// softmax(q k^T / sqrt(d_k) + mask) v for one head. mask (q_len x k_len),
// when present, is added to the scores; masked entries hold kMaskValue.
TensorPtr attention(const TensorPtr& q, const TensorPtr& k, const TensorPtr& v,
                    const TensorPtr& mask);

inline constexpr double kMaskValue = -1e9;

// Inverted dropout; rate 0 returns x itself.
TensorPtr dropout(const TensorPtr& x, double rate, std::mt19937_64& rng);

// Sum over rows of the smoothed negative log-likelihood of `targets` under
// row-wise softmax(logits). Label smoothing mixes an eps-weighted uniform
// distribution over the whole vocabulary into the one-hot target.
TensorPtr token_nll(const TensorPtr& logits, const std::vector<int>& targets,
                    double label_smoothing = 0.0);

// Accumulates gradients into every requires_grad tensor reachable from
// `loss`. Running it twice on the same graph throws std::logic_error.
void backward(const TensorPtr& loss);

}  // namespace gsum
