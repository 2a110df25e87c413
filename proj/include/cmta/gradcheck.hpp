#pragma once

#include <functional>
#include <vector>

#include "cmta/tensor.hpp"

namespace cmta::nn {

using GradCheckFn =
    std::function<TensorT<double>(const std::vector<TensorT<double>>&)>;

// Central-difference check of reverse-mode gradients for a scalar-valued
// function of the given inputs. Returns the max over all input coordinates of
// |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
inline double grad_check(const GradCheckFn& fn, std::vector<TensorT<double>> inputs,
                         double eps = 1e-4) {
    for (auto& t : inputs) {
        t.set_requires_grad(true);
        t.zero_grad();
    }
    TensorT<double> loss = fn(inputs);
    loss.backward(1.0);

    double max_rel = 0.0;
    for (auto& t : inputs) {
        const std::vector<double> analytic = t.grad();
        for (size_t i = 0; i < t.size(); ++i) {
            const double orig = t.data()[i];
            t.data()[i] = orig + eps;
            const double up = fn(inputs).item();
            t.data()[i] = orig - eps;
            const double down = fn(inputs).item();
            t.data()[i] = orig;
            const double numeric = (up - down) / (2.0 * eps);
            const double denom = std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
            max_rel = std::max(max_rel, std::abs(analytic[i] - numeric) / denom);
        }
    }
    return max_rel;
}

}  // namespace cmta::nn
