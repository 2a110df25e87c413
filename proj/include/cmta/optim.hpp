#pragma once

#include <cmath>
#include <vector>

#include "cmta/tensor.hpp"

namespace cmta::nn {

template <typename S>
struct AdamWConfig {
    S lr = S(1e-4);
    S beta1 = S(0.9);
    S beta2 = S(0.999);
    S eps = S(1e-8);
    S weight_decay = S(0.01);
};

// Adam with decoupled weight decay:
//   theta <- theta - lr * ( m_hat / (sqrt(v_hat) + eps) + wd * theta )
template <typename S>
class AdamW {
public:
    AdamW(AdamWConfig<S> cfg, std::vector<TensorT<S>> params)
        : cfg_(cfg), params_(std::move(params)) {
        slots_.resize(params_.size());
        for (size_t i = 0; i < params_.size(); ++i) {
            slots_[i].m.assign(params_[i].size(), S(0));
            slots_[i].v.assign(params_[i].size(), S(0));
        }
    }

    long step_count() const { return t_; }
    const AdamWConfig<S>& config() const { return cfg_; }

    void zero_grad() {
        for (auto& p : params_) p.zero_grad();
    }

    void step() {
        ++t_;
        const S bc1 = S(1) - static_cast<S>(std::pow(static_cast<double>(cfg_.beta1), t_));
        const S bc2 = S(1) - static_cast<S>(std::pow(static_cast<double>(cfg_.beta2), t_));
        for (size_t pi = 0; pi < params_.size(); ++pi) {
            auto& theta = params_[pi].data();
            auto& g = params_[pi].grad();
            if (g.size() != theta.size()) throw ShapeMismatch("adamw: grad shape mismatch");
            auto& m = slots_[pi].m;
            auto& v = slots_[pi].v;
            for (size_t i = 0; i < theta.size(); ++i) {
                m[i] = cfg_.beta1 * m[i] + (S(1) - cfg_.beta1) * g[i];
                v[i] = cfg_.beta2 * v[i] + (S(1) - cfg_.beta2) * g[i] * g[i];
                const S m_hat = m[i] / bc1;
                const S v_hat = v[i] / bc2;
                theta[i] -= cfg_.lr * (m_hat / (std::sqrt(v_hat) + cfg_.eps) +
                                       cfg_.weight_decay * theta[i]);
            }
        }
    }

private:
    struct Slot {
        std::vector<S> m, v;
    };
    AdamWConfig<S> cfg_;
    std::vector<TensorT<S>> params_;
    std::vector<Slot> slots_;
    long t_ = 0;
};

}  // namespace cmta::nn
