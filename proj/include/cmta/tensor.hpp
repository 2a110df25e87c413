#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace cmta::nn {

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IndivisibleLength : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename S>
struct Node {
    std::vector<int> shape;
    std::vector<S> data;
    std::vector<S> grad;  // allocated lazily; persists on leaves for accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node<S>>> parents;
    std::function<void(Node<S>&)> backward_fn;

    size_t size() const { return data.size(); }
    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), S(0));
    }
};

inline size_t shape_numel(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    return n;
}

// Value-semantics handle over a shared autodiff node.
template <typename S>
class TensorT {
public:
    TensorT() = default;
    explicit TensorT(std::shared_ptr<Node<S>> n) : n_(std::move(n)) {}

    static TensorT zeros(std::vector<int> shape, bool requires_grad = false) {
        auto n = std::make_shared<Node<S>>();
        n->data.assign(shape_numel(shape), S(0));
        n->shape = std::move(shape);
        n->requires_grad = requires_grad;
        return TensorT(std::move(n));
    }
    static TensorT full(std::vector<int> shape, S value, bool requires_grad = false) {
        TensorT t = zeros(std::move(shape), requires_grad);
        std::fill(t.data().begin(), t.data().end(), value);
        return t;
    }
    static TensorT from(std::vector<int> shape, std::vector<S> values,
                        bool requires_grad = false) {
        if (values.size() != shape_numel(shape))
            throw ShapeMismatch("data length does not match shape");
        auto n = std::make_shared<Node<S>>();
        n->shape = std::move(shape);
        n->data = std::move(values);
        n->requires_grad = requires_grad;
        return TensorT(std::move(n));
    }
    static TensorT scalar(S value, bool requires_grad = false) {
        return from({1}, {value}, requires_grad);
    }
    static TensorT randn(std::vector<int> shape, S stddev, std::mt19937_64& rng,
                         bool requires_grad = false) {
        TensorT t = zeros(std::move(shape), requires_grad);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (auto& v : t.data()) v = static_cast<S>(dist(rng)) * stddev;
        return t;
    }

    bool defined() const { return n_ != nullptr; }
    const std::vector<int>& shape() const { return n_->shape; }
    int rank() const { return static_cast<int>(n_->shape.size()); }
    int dim(int i) const { return n_->shape[static_cast<size_t>(i)]; }
    size_t size() const { return n_->size(); }
    std::vector<S>& data() { return n_->data; }
    const std::vector<S>& data() const { return n_->data; }
    std::vector<S>& grad() {
        n_->ensure_grad();
        return n_->grad;
    }
    bool requires_grad() const { return n_->requires_grad; }
    void set_requires_grad(bool v) { n_->requires_grad = v; }
    S item() const {
        if (size() != 1) throw ShapeMismatch("item() on non-scalar tensor");
        return n_->data[0];
    }
    void zero_grad() { n_->grad.assign(n_->data.size(), S(0)); }

    std::shared_ptr<Node<S>> node() const { return n_; }

    // Reverse-mode sweep from this (scalar) tensor; each node visited once.
    void backward(S seed = S(1)) {
        if (size() != 1) throw ShapeMismatch("backward() root must be scalar");
        std::vector<Node<S>*> order;
        std::unordered_set<Node<S>*> visited;
        std::vector<std::pair<Node<S>*, size_t>> stack;
        stack.push_back({n_.get(), 0});
        visited.insert(n_.get());
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next < node->parents.size()) {
                Node<S>* p = node->parents[next++].get();
                if (visited.insert(p).second) stack.push_back({p, 0});
            } else {
                order.push_back(node);
                stack.pop_back();
            }
        }
        for (Node<S>* node : order) node->ensure_grad();
        n_->grad[0] += seed;
        for (auto it = order.rbegin(); it != order.rend(); ++it)
            if ((*it)->backward_fn) (*it)->backward_fn(**it);
    }

private:
    std::shared_ptr<Node<S>> n_;
};

namespace detail {

// C[m,n] += A[m,k] * B[k,n]
template <typename S>
void gemm_nn(int m, int k, int n, const S* A, const S* B, S* C) {
    for (int i = 0; i < m; ++i) {
        S* rc = C + static_cast<size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const S a = A[static_cast<size_t>(i) * k + p];
            const S* rb = B + static_cast<size_t>(p) * n;
            for (int j = 0; j < n; ++j) rc[j] += a * rb[j];
        }
    }
}

// C[m,n] += A[m,k] * B[n,k]^T
template <typename S>
void gemm_nt(int m, int k, int n, const S* A, const S* B, S* C) {
    for (int i = 0; i < m; ++i) {
        const S* ra = A + static_cast<size_t>(i) * k;
        S* rc = C + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const S* rb = B + static_cast<size_t>(j) * k;
            S acc = 0;
            for (int p = 0; p < k; ++p) acc += ra[p] * rb[p];
            rc[j] += acc;
        }
    }
}

// C[k,n] += A[m,k]^T * B[m,n]
template <typename S>
void gemm_tn(int m, int k, int n, const S* A, const S* B, S* C) {
    for (int p = 0; p < m; ++p) {
        const S* ra = A + static_cast<size_t>(p) * k;
        const S* rb = B + static_cast<size_t>(p) * n;
        for (int i = 0; i < k; ++i) {
            const S a = ra[i];
            S* rc = C + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) rc[j] += a * rb[j];
        }
    }
}

template <typename S>
TensorT<S> make_op(std::vector<int> shape, std::vector<TensorT<S>> parents,
                   std::vector<S> data, std::function<void(Node<S>&)> backward_fn) {
    auto n = std::make_shared<Node<S>>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backward_fn = std::move(backward_fn);
    return TensorT<S>(std::move(n));
}

}  // namespace detail

template <typename S>
TensorT<S> add(const TensorT<S>& a, const TensorT<S>& b) {
    if (a.shape() != b.shape()) throw ShapeMismatch("add: shapes differ");
    std::vector<S> out(a.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    auto pa = a.node(), pb = b.node();
    return detail::make_op<S>(a.shape(), {a, b}, std::move(out), [pa, pb](Node<S>& n) {
        pa->ensure_grad();
        pb->ensure_grad();
        for (size_t i = 0; i < n.grad.size(); ++i) {
            pa->grad[i] += n.grad[i];
            pb->grad[i] += n.grad[i];
        }
    });
}

template <typename S>
TensorT<S> scale(const TensorT<S>& a, S c) {
    std::vector<S> out(a.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * c;
    auto pa = a.node();
    return detail::make_op<S>(a.shape(), {a}, std::move(out), [pa, c](Node<S>& n) {
        pa->ensure_grad();
        for (size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i] * c;
    });
}

// x [R,C] + b [C], broadcast over rows.
template <typename S>
TensorT<S> add_row_broadcast(const TensorT<S>& x, const TensorT<S>& b) {
    if (x.rank() != 2 || b.rank() != 1 || x.dim(1) != b.dim(0))
        throw ShapeMismatch("add_row_broadcast: want [R,C] + [C]");
    const int R = x.dim(0), C = x.dim(1);
    std::vector<S> out(x.size());
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            out[static_cast<size_t>(i) * C + j] =
                x.data()[static_cast<size_t>(i) * C + j] + b.data()[static_cast<size_t>(j)];
    auto px = x.node(), pb = b.node();
    return detail::make_op<S>(x.shape(), {x, b}, std::move(out), [px, pb, R, C](Node<S>& n) {
        px->ensure_grad();
        pb->ensure_grad();
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j) {
                const S g = n.grad[static_cast<size_t>(i) * C + j];
                px->grad[static_cast<size_t>(i) * C + j] += g;
                pb->grad[static_cast<size_t>(j)] += g;
            }
    });
}

template <typename S>
TensorT<S> matmul(const TensorT<S>& a, const TensorT<S>& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
        throw ShapeMismatch("matmul: inner dimensions disagree");
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<S> out(static_cast<size_t>(m) * n, S(0));
    detail::gemm_nn(m, k, n, a.data().data(), b.data().data(), out.data());
    auto pa = a.node(), pb = b.node();
    return detail::make_op<S>({m, n}, {a, b}, std::move(out), [pa, pb, m, k, n](Node<S>& nd) {
        pa->ensure_grad();
        pb->ensure_grad();
        // dA = dY * B^T ; dB = A^T * dY
        detail::gemm_nt(m, n, k, nd.grad.data(), pb->data.data(), pa->grad.data());
        detail::gemm_tn(m, k, n, pa->data.data(), nd.grad.data(), pb->grad.data());
    });
}

template <typename S>
TensorT<S> transpose(const TensorT<S>& x) {
    if (x.rank() != 2) throw ShapeMismatch("transpose: rank-2 only");
    const int R = x.dim(0), C = x.dim(1);
    std::vector<S> out(x.size());
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            out[static_cast<size_t>(j) * R + i] = x.data()[static_cast<size_t>(i) * C + j];
    auto px = x.node();
    return detail::make_op<S>({C, R}, {x}, std::move(out), [px, R, C](Node<S>& n) {
        px->ensure_grad();
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j)
                px->grad[static_cast<size_t>(i) * C + j] +=
                    n.grad[static_cast<size_t>(j) * R + i];
    });
}

template <typename S>
TensorT<S> slice_cols(const TensorT<S>& x, int start, int count) {
    if (x.rank() != 2 || start < 0 || count <= 0 || start + count > x.dim(1))
        throw ShapeMismatch("slice_cols: bad range");
    const int R = x.dim(0), C = x.dim(1);
    std::vector<S> out(static_cast<size_t>(R) * count);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < count; ++j)
            out[static_cast<size_t>(i) * count + j] =
                x.data()[static_cast<size_t>(i) * C + start + j];
    auto px = x.node();
    return detail::make_op<S>({R, count}, {x}, std::move(out),
                              [px, R, C, start, count](Node<S>& n) {
                                  px->ensure_grad();
                                  for (int i = 0; i < R; ++i)
                                      for (int j = 0; j < count; ++j)
                                          px->grad[static_cast<size_t>(i) * C + start + j] +=
                                              n.grad[static_cast<size_t>(i) * count + j];
                              });
}

template <typename S>
TensorT<S> concat_cols(const std::vector<TensorT<S>>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_cols: no inputs");
    const int R = parts[0].dim(0);
    int C = 0;
    for (const auto& p : parts) {
        if (p.rank() != 2 || p.dim(0) != R) throw ShapeMismatch("concat_cols: row mismatch");
        C += p.dim(1);
    }
    std::vector<S> out(static_cast<size_t>(R) * C);
    int off = 0;
    for (const auto& p : parts) {
        const int c = p.dim(1);
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < c; ++j)
                out[static_cast<size_t>(i) * C + off + j] =
                    p.data()[static_cast<size_t>(i) * c + j];
        off += c;
    }
    std::vector<std::shared_ptr<Node<S>>> pnodes;
    std::vector<int> widths;
    for (const auto& p : parts) {
        pnodes.push_back(p.node());
        widths.push_back(p.dim(1));
    }
    return detail::make_op<S>({R, C}, parts, std::move(out),
                              [pnodes, widths, R, C](Node<S>& n) {
                                  int off = 0;
                                  for (size_t pi = 0; pi < pnodes.size(); ++pi) {
                                      pnodes[pi]->ensure_grad();
                                      const int c = widths[pi];
                                      for (int i = 0; i < R; ++i)
                                          for (int j = 0; j < c; ++j)
                                              pnodes[pi]->grad[static_cast<size_t>(i) * c + j] +=
                                                  n.grad[static_cast<size_t>(i) * C + off + j];
                                      off += c;
                                  }
                              });
}

template <typename S>
TensorT<S> relu(const TensorT<S>& x) {
    std::vector<S> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] > 0 ? x.data()[i] : S(0);
    auto px = x.node();
    return detail::make_op<S>(x.shape(), {x}, std::move(out), [px](Node<S>& n) {
        px->ensure_grad();
        for (size_t i = 0; i < n.grad.size(); ++i)
            if (px->data[i] > 0) px->grad[i] += n.grad[i];
    });
}

// Exact GELU: 0.5 x (1 + erf(x/sqrt(2))).
template <typename S>
TensorT<S> gelu(const TensorT<S>& x) {
    const double inv_sqrt2 = 0.7071067811865475244;
    std::vector<S> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) {
        const double v = static_cast<double>(x.data()[i]);
        out[i] = static_cast<S>(0.5 * v * (1.0 + std::erf(v * inv_sqrt2)));
    }
    auto px = x.node();
    return detail::make_op<S>(x.shape(), {x}, std::move(out), [px, inv_sqrt2](Node<S>& n) {
        px->ensure_grad();
        const double inv_sqrt2pi = 0.3989422804014326779;
        for (size_t i = 0; i < n.grad.size(); ++i) {
            const double v = static_cast<double>(px->data[i]);
            const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
            const double pdf = inv_sqrt2pi * std::exp(-0.5 * v * v);
            px->grad[i] += n.grad[i] * static_cast<S>(cdf + v * pdf);
        }
    });
}

// Layer norm over the last axis of [R,C], with per-feature gain/bias.
template <typename S>
TensorT<S> layernorm(const TensorT<S>& x, const TensorT<S>& gamma, const TensorT<S>& beta,
                     S eps = S(1e-5)) {
    if (x.rank() != 2 || gamma.rank() != 1 || beta.rank() != 1 || gamma.dim(0) != x.dim(1) ||
        beta.dim(0) != x.dim(1))
        throw ShapeMismatch("layernorm: want x[R,C], gamma[C], beta[C]");
    const int R = x.dim(0), C = x.dim(1);
    std::vector<S> out(x.size());
    auto xhat = std::make_shared<std::vector<S>>(x.size());
    auto inv_std = std::make_shared<std::vector<S>>(static_cast<size_t>(R));
    for (int i = 0; i < R; ++i) {
        const S* row = x.data().data() + static_cast<size_t>(i) * C;
        S mean = 0;
        for (int j = 0; j < C; ++j) mean += row[j];
        mean /= static_cast<S>(C);
        S var = 0;
        for (int j = 0; j < C; ++j) var += (row[j] - mean) * (row[j] - mean);
        var /= static_cast<S>(C);
        const S istd = S(1) / std::sqrt(var + eps);
        (*inv_std)[static_cast<size_t>(i)] = istd;
        for (int j = 0; j < C; ++j) {
            const S h = (row[j] - mean) * istd;
            (*xhat)[static_cast<size_t>(i) * C + j] = h;
            out[static_cast<size_t>(i) * C + j] =
                gamma.data()[static_cast<size_t>(j)] * h + beta.data()[static_cast<size_t>(j)];
        }
    }
    auto px = x.node(), pg = gamma.node(), pb = beta.node();
    return detail::make_op<S>(
        x.shape(), {x, gamma, beta}, std::move(out),
        [px, pg, pb, xhat, inv_std, R, C](Node<S>& n) {
            px->ensure_grad();
            pg->ensure_grad();
            pb->ensure_grad();
            for (int i = 0; i < R; ++i) {
                const size_t base = static_cast<size_t>(i) * C;
                S sum_g = 0, sum_gh = 0;
                for (int j = 0; j < C; ++j) {
                    const S gy = n.grad[base + j] * pg->data[static_cast<size_t>(j)];
                    sum_g += gy;
                    sum_gh += gy * (*xhat)[base + j];
                    pg->grad[static_cast<size_t>(j)] += n.grad[base + j] * (*xhat)[base + j];
                    pb->grad[static_cast<size_t>(j)] += n.grad[base + j];
                }
                const S istd = (*inv_std)[static_cast<size_t>(i)];
                for (int j = 0; j < C; ++j) {
                    const S gy = n.grad[base + j] * pg->data[static_cast<size_t>(j)];
                    px->grad[base + j] += istd * (gy - (sum_g + (*xhat)[base + j] * sum_gh) /
                                                           static_cast<S>(C));
                }
            }
        });
}

// Row-wise softmax over [R,C]; key positions with mask 0 get probability 0.
template <typename S>
TensorT<S> row_softmax(const TensorT<S>& x, const std::vector<int>& key_mask = {}) {
    if (x.rank() != 2) throw ShapeMismatch("row_softmax: rank-2 only");
    const int R = x.dim(0), C = x.dim(1);
    if (!key_mask.empty() && static_cast<int>(key_mask.size()) != C)
        throw ShapeMismatch("row_softmax: mask length != columns");
    std::vector<S> out(x.size());
    for (int i = 0; i < R; ++i) {
        const S* row = x.data().data() + static_cast<size_t>(i) * C;
        S mx = -std::numeric_limits<S>::infinity();
        for (int j = 0; j < C; ++j)
            if ((key_mask.empty() || key_mask[static_cast<size_t>(j)]) && row[j] > mx) mx = row[j];
        S denom = 0;
        for (int j = 0; j < C; ++j) {
            if (!key_mask.empty() && !key_mask[static_cast<size_t>(j)]) {
                out[static_cast<size_t>(i) * C + j] = 0;
                continue;
            }
            if (!std::isfinite(static_cast<double>(row[j])))
                throw NonFiniteInput("row_softmax: non-finite logit");
            const S e = std::exp(row[j] - mx);
            out[static_cast<size_t>(i) * C + j] = e;
            denom += e;
        }
        for (int j = 0; j < C; ++j) out[static_cast<size_t>(i) * C + j] /= denom;
    }
    auto px = x.node();
    auto saved = std::make_shared<std::vector<S>>(out);
    return detail::make_op<S>(x.shape(), {x}, std::move(out), [px, saved, R, C](Node<S>& n) {
        px->ensure_grad();
        for (int i = 0; i < R; ++i) {
            const size_t base = static_cast<size_t>(i) * C;
            S dot = 0;
            for (int j = 0; j < C; ++j) dot += n.grad[base + j] * (*saved)[base + j];
            for (int j = 0; j < C; ++j)
                px->grad[base + j] += (*saved)[base + j] * (n.grad[base + j] - dot);
        }
    });
}

// Vector softmax with max-subtraction.
template <typename S>
TensorT<S> softmax(const TensorT<S>& logits) {
    if (logits.rank() != 1) throw ShapeMismatch("softmax: rank-1 only");
    for (S v : logits.data())
        if (!std::isfinite(static_cast<double>(v))) throw NonFiniteInput("softmax: non-finite");
    const int C = logits.dim(0);
    TensorT<S> as_row = detail::make_op<S>(
        {1, C}, {logits}, std::vector<S>(logits.data()), [p = logits.node()](Node<S>& n) {
            p->ensure_grad();
            for (size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i];
        });
    TensorT<S> sm = row_softmax(as_row);
    return detail::make_op<S>({C}, {sm}, std::vector<S>(sm.data()),
                              [p = sm.node()](Node<S>& n) {
                                  p->ensure_grad();
                                  for (size_t i = 0; i < n.grad.size(); ++i)
                                      p->grad[i] += n.grad[i];
                              });
}

// -log(probs[gold]) with epsilon clamping; for probability inputs.
template <typename S>
TensorT<S> cross_entropy(const TensorT<S>& probs, int gold) {
    if (probs.rank() != 1) throw ShapeMismatch("cross_entropy: rank-1 only");
    if (gold < 0 || gold >= probs.dim(0)) throw IndexOutOfRange("cross_entropy: gold index");
    const S eps = S(1e-12);
    const S p = std::max(probs.data()[static_cast<size_t>(gold)], eps);
    auto pn = probs.node();
    return detail::make_op<S>({1}, {probs}, {static_cast<S>(-std::log(static_cast<double>(p)))},
                              [pn, gold, p](Node<S>& n) {
                                  pn->ensure_grad();
                                  pn->grad[static_cast<size_t>(gold)] += -n.grad[0] / p;
                              });
}

// Fused softmax + cross-entropy on raw logits; backward is probs - onehot.
template <typename S>
TensorT<S> softmax_cross_entropy(const TensorT<S>& logits, int gold) {
    if (logits.rank() != 1) throw ShapeMismatch("softmax_cross_entropy: rank-1 only");
    const int C = logits.dim(0);
    if (gold < 0 || gold >= C) throw IndexOutOfRange("softmax_cross_entropy: gold index");
    S mx = -std::numeric_limits<S>::infinity();
    for (S v : logits.data()) {
        if (!std::isfinite(static_cast<double>(v)))
            throw NonFiniteInput("softmax_cross_entropy: non-finite logit");
        mx = std::max(mx, v);
    }
    S denom = 0;
    auto probs = std::make_shared<std::vector<S>>(static_cast<size_t>(C));
    for (int j = 0; j < C; ++j) {
        (*probs)[static_cast<size_t>(j)] = std::exp(logits.data()[static_cast<size_t>(j)] - mx);
        denom += (*probs)[static_cast<size_t>(j)];
    }
    for (auto& p : *probs) p /= denom;
    const double logp =
        std::log(std::max(static_cast<double>((*probs)[static_cast<size_t>(gold)]), 1e-300));
    auto pl = logits.node();
    return detail::make_op<S>({1}, {logits}, {static_cast<S>(-logp)},
                              [pl, probs, gold, C](Node<S>& n) {
                                  pl->ensure_grad();
                                  for (int j = 0; j < C; ++j) {
                                      S g = (*probs)[static_cast<size_t>(j)];
                                      if (j == gold) g -= S(1);
                                      pl->grad[static_cast<size_t>(j)] += n.grad[0] * g;
                                  }
                              });
}

// Gather rows of an embedding table; backward scatter-adds.
template <typename S>
TensorT<S> embedding_rows(const TensorT<S>& table, const std::vector<int>& ids) {
    if (table.rank() != 2) throw ShapeMismatch("embedding_rows: table must be [V,H]");
    const int V = table.dim(0), H = table.dim(1);
    for (int id : ids)
        if (id < 0 || id >= V) throw IndexOutOfRange("embedding id out of range");
    const int L = static_cast<int>(ids.size());
    std::vector<S> out(static_cast<size_t>(L) * H);
    for (int i = 0; i < L; ++i)
        std::copy_n(table.data().data() + static_cast<size_t>(ids[static_cast<size_t>(i)]) * H, H,
                    out.data() + static_cast<size_t>(i) * H);
    auto pt = table.node();
    return detail::make_op<S>({L, H}, {table}, std::move(out), [pt, ids, H](Node<S>& n) {
        pt->ensure_grad();
        for (size_t i = 0; i < ids.size(); ++i)
            for (int j = 0; j < H; ++j)
                pt->grad[static_cast<size_t>(ids[i]) * H + j] +=
                    n.grad[i * static_cast<size_t>(H) + j];
    });
}

// Zeroes rows whose mask entry is 0; [R,C] with mask length R.
template <typename S>
TensorT<S> mask_rows(const TensorT<S>& x, const std::vector<int>& row_mask) {
    if (x.rank() != 2 || static_cast<int>(row_mask.size()) != x.dim(0))
        throw ShapeMismatch("mask_rows: mask length != rows");
    const int R = x.dim(0), C = x.dim(1);
    std::vector<S> out(x.size(), S(0));
    for (int i = 0; i < R; ++i)
        if (row_mask[static_cast<size_t>(i)])
            std::copy_n(x.data().data() + static_cast<size_t>(i) * C, C,
                        out.data() + static_cast<size_t>(i) * C);
    auto px = x.node();
    return detail::make_op<S>(x.shape(), {x}, std::move(out), [px, row_mask, C](Node<S>& n) {
        px->ensure_grad();
        for (size_t i = 0; i < row_mask.size(); ++i)
            if (row_mask[i])
                for (int j = 0; j < C; ++j)
                    px->grad[i * static_cast<size_t>(C) + j] +=
                        n.grad[i * static_cast<size_t>(C) + j];
    });
}

// Cross-correlation along the sequence axis with zero 'same' padding.
// input [seq, c_in], kernels [k, c_in, c_out], bias [c_out] -> [seq, c_out].
template <typename S>
TensorT<S> conv1d(const TensorT<S>& input, const TensorT<S>& kernels, const TensorT<S>& bias) {
    if (input.rank() != 2 || kernels.rank() != 3 || bias.rank() != 1)
        throw ShapeMismatch("conv1d: want input[seq,cin], kernels[k,cin,cout], bias[cout]");
    const int seq = input.dim(0), cin = input.dim(1);
    const int k = kernels.dim(0), cout = kernels.dim(2);
    if (kernels.dim(1) != cin || bias.dim(0) != cout)
        throw ShapeMismatch("conv1d: channel dimensions disagree");
    if (k % 2 == 0) throw ShapeMismatch("conv1d: kernel width must be odd");
    const int pad = k / 2;
    std::vector<S> out(static_cast<size_t>(seq) * cout);
    for (int t = 0; t < seq; ++t)
        for (int co = 0; co < cout; ++co) out[static_cast<size_t>(t) * cout + co] =
            bias.data()[static_cast<size_t>(co)];
    for (int t = 0; t < seq; ++t) {
        for (int dk = 0; dk < k; ++dk) {
            const int ti = t + dk - pad;
            if (ti < 0 || ti >= seq) continue;
            const S* in_row = input.data().data() + static_cast<size_t>(ti) * cin;
            const S* k_slab = kernels.data().data() + static_cast<size_t>(dk) * cin * cout;
            S* out_row = out.data() + static_cast<size_t>(t) * cout;
            for (int ci = 0; ci < cin; ++ci) {
                const S v = in_row[ci];
                const S* k_row = k_slab + static_cast<size_t>(ci) * cout;
                for (int co = 0; co < cout; ++co) out_row[co] += v * k_row[co];
            }
        }
    }
    auto pi = input.node(), pk = kernels.node(), pb = bias.node();
    return detail::make_op<S>(
        {seq, cout}, {input, kernels, bias}, std::move(out),
        [pi, pk, pb, seq, cin, k, cout, pad](Node<S>& n) {
            pi->ensure_grad();
            pk->ensure_grad();
            pb->ensure_grad();
            for (int t = 0; t < seq; ++t) {
                const S* g_row = n.grad.data() + static_cast<size_t>(t) * cout;
                for (int co = 0; co < cout; ++co) pb->grad[static_cast<size_t>(co)] += g_row[co];
                for (int dk = 0; dk < k; ++dk) {
                    const int ti = t + dk - pad;
                    if (ti < 0 || ti >= seq) continue;
                    const S* in_row = pi->data.data() + static_cast<size_t>(ti) * cin;
                    S* gin_row = pi->grad.data() + static_cast<size_t>(ti) * cin;
                    const size_t slab = static_cast<size_t>(dk) * cin * cout;
                    for (int ci = 0; ci < cin; ++ci) {
                        const S* k_row = pk->data.data() + slab + static_cast<size_t>(ci) * cout;
                        S* gk_row = pk->grad.data() + slab + static_cast<size_t>(ci) * cout;
                        S acc = 0;
                        for (int co = 0; co < cout; ++co) {
                            acc += g_row[co] * k_row[co];
                            gk_row[co] += g_row[co] * in_row[ci];
                        }
                        gin_row[ci] += acc;
                    }
                }
            }
        });
}

// Non-overlapping window mean; stride == pool.
template <typename S>
TensorT<S> avg_pool1d(const TensorT<S>& x, int pool) {
    if (x.rank() != 2) throw ShapeMismatch("avg_pool1d: rank-2 only");
    const int seq = x.dim(0), c = x.dim(1);
    if (pool <= 0 || seq % pool != 0)
        throw IndivisibleLength("avg_pool1d: sequence length not divisible by pool size");
    const int out_seq = seq / pool;
    std::vector<S> out(static_cast<size_t>(out_seq) * c, S(0));
    for (int t = 0; t < seq; ++t)
        for (int j = 0; j < c; ++j)
            out[static_cast<size_t>(t / pool) * c + j] += x.data()[static_cast<size_t>(t) * c + j];
    for (auto& v : out) v /= static_cast<S>(pool);
    auto px = x.node();
    return detail::make_op<S>({out_seq, c}, {x}, std::move(out), [px, seq, c, pool](Node<S>& n) {
        px->ensure_grad();
        for (int t = 0; t < seq; ++t)
            for (int j = 0; j < c; ++j)
                px->grad[static_cast<size_t>(t) * c + j] +=
                    n.grad[static_cast<size_t>(t / pool) * c + j] / static_cast<S>(pool);
    });
}

// Non-overlapping window max; gradient routes to the first argmax on ties.
template <typename S>
TensorT<S> max_pool1d(const TensorT<S>& x, int pool) {
    if (x.rank() != 2) throw ShapeMismatch("max_pool1d: rank-2 only");
    const int seq = x.dim(0), c = x.dim(1);
    if (pool <= 0 || seq % pool != 0)
        throw IndivisibleLength("max_pool1d: sequence length not divisible by pool size");
    const int out_seq = seq / pool;
    std::vector<S> out(static_cast<size_t>(out_seq) * c);
    auto argmax = std::make_shared<std::vector<int>>(static_cast<size_t>(out_seq) * c);
    for (int w = 0; w < out_seq; ++w)
        for (int j = 0; j < c; ++j) {
            int best_t = w * pool;
            S best = x.data()[static_cast<size_t>(best_t) * c + j];
            for (int t = w * pool + 1; t < (w + 1) * pool; ++t) {
                const S v = x.data()[static_cast<size_t>(t) * c + j];
                if (v > best) {
                    best = v;
                    best_t = t;
                }
            }
            out[static_cast<size_t>(w) * c + j] = best;
            (*argmax)[static_cast<size_t>(w) * c + j] = best_t;
        }
    auto px = x.node();
    return detail::make_op<S>({out_seq, c}, {x}, std::move(out),
                              [px, argmax, out_seq, c](Node<S>& n) {
                                  px->ensure_grad();
                                  for (int w = 0; w < out_seq; ++w)
                                      for (int j = 0; j < c; ++j) {
                                          const int t =
                                              (*argmax)[static_cast<size_t>(w) * c + j];
                                          px->grad[static_cast<size_t>(t) * c + j] +=
                                              n.grad[static_cast<size_t>(w) * c + j];
                                      }
                              });
}

// Channel-wise mean over the sequence axis: [seq,c] -> [c].
template <typename S>
TensorT<S> global_avg_pool(const TensorT<S>& x) {
    if (x.rank() != 2 || x.dim(0) < 1) throw ShapeMismatch("global_avg_pool: want [seq,c]");
    const int seq = x.dim(0), c = x.dim(1);
    std::vector<S> out(static_cast<size_t>(c), S(0));
    for (int t = 0; t < seq; ++t)
        for (int j = 0; j < c; ++j) out[static_cast<size_t>(j)] +=
            x.data()[static_cast<size_t>(t) * c + j];
    for (auto& v : out) v /= static_cast<S>(seq);
    auto px = x.node();
    return detail::make_op<S>({c}, {x}, std::move(out), [px, seq, c](Node<S>& n) {
        px->ensure_grad();
        for (int t = 0; t < seq; ++t)
            for (int j = 0; j < c; ++j)
                px->grad[static_cast<size_t>(t) * c + j] +=
                    n.grad[static_cast<size_t>(j)] / static_cast<S>(seq);
    });
}

enum class DropoutMode { Train, Eval };

// Inverted dropout: train zeroes with probability p and scales by 1/(1-p);
// eval is the identity. Mask order is the RNG stream order.
template <typename S>
TensorT<S> dropout(const TensorT<S>& x, double p, DropoutMode mode, std::mt19937_64& rng) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout: p must be in [0,1)");
    if (mode == DropoutMode::Eval || p == 0.0) {
        auto px = x.node();
        return detail::make_op<S>(x.shape(), {x}, std::vector<S>(x.data()), [px](Node<S>& n) {
            px->ensure_grad();
            for (size_t i = 0; i < n.grad.size(); ++i) px->grad[i] += n.grad[i];
        });
    }
    const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
    auto mask = std::make_shared<std::vector<uint8_t>>(x.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<S> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) {
        const bool keep = unit(rng) >= p;
        (*mask)[i] = keep;
        out[i] = keep ? x.data()[i] * keep_scale : S(0);
    }
    auto px = x.node();
    return detail::make_op<S>(x.shape(), {x}, std::move(out), [px, mask, keep_scale](Node<S>& n) {
        px->ensure_grad();
        for (size_t i = 0; i < n.grad.size(); ++i)
            if ((*mask)[i]) px->grad[i] += n.grad[i] * keep_scale;
    });
}

// Same data, new shape; backward is the identity.
template <typename S>
TensorT<S> reshape(const TensorT<S>& x, std::vector<int> new_shape) {
    if (shape_numel(new_shape) != x.size()) throw ShapeMismatch("reshape: element count differs");
    auto px = x.node();
    return detail::make_op<S>(std::move(new_shape), {x}, std::vector<S>(x.data()),
                              [px](Node<S>& n) {
                                  px->ensure_grad();
                                  for (size_t i = 0; i < n.grad.size(); ++i)
                                      px->grad[i] += n.grad[i];
                              });
}

template <typename S>
TensorT<S> sum(const TensorT<S>& x) {
    S acc = 0;
    for (S v : x.data()) acc += v;
    auto px = x.node();
    return detail::make_op<S>({1}, {x}, {acc}, [px](Node<S>& n) {
        px->ensure_grad();
        for (auto& g : px->grad) g += n.grad[0];
    });
}

using Tensor = TensorT<float>;

}  // namespace cmta::nn
