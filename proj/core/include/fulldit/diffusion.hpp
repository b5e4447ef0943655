#pragma once

#include <cstdint>
#include <functional>

#include "fulldit/errors.hpp"
#include "fulldit/rng.hpp"
#include "fulldit/tensor.hpp"

namespace fulldit::diffusion {

struct FlowConfig {
    double sigma_min = 1e-5;
    size_t n_steps = 50;
    double cfg_scale = 5.0;

    void validate() const;
};

// x_t = t*x1 + (1-(1-sigma_min)*t)*x0
template <typename T>
Tensor<T> noisy_sample(const Tensor<T>& x0, const Tensor<T>& x1, T t, T sigma_min) {
    if (!x0.same_shape(x1)) throw ShapeError("noisy_sample: shape mismatch");
    Tensor<T> out = x0;
    const T noise_coeff = T(1) - (T(1) - sigma_min) * t;
    for (size_t i = 0; i < out.size(); ++i) out[i] = t * x1[i] + noise_coeff * x0[i];
    return out;
}

// V = dx_t/dt = x1 - (1-sigma_min)*x0, independent of t
template <typename T>
Tensor<T> velocity_target(const Tensor<T>& x0, const Tensor<T>& x1, T sigma_min) {
    if (!x0.same_shape(x1)) throw ShapeError("velocity_target: shape mismatch");
    Tensor<T> out = x0;
    const T c = T(1) - sigma_min;
    for (size_t i = 0; i < out.size(); ++i) out[i] = x1[i] - c * x0[i];
    return out;
}

// Mean squared error over loss-masked-in rows only.
template <typename T>
T fm_loss(const Tensor<T>& pred, const Tensor<T>& target, const std::vector<uint8_t>& loss_mask) {
    if (!pred.same_shape(target)) throw ShapeError("fm_loss: shape mismatch");
    const size_t rows = pred.ndim() ? pred.dim(0) : 0;
    const size_t cols = rows ? pred.size() / rows : 0;
    if (loss_mask.size() != rows) throw ShapeError("fm_loss: mask length mismatch");
    size_t active = 0;
    for (auto m : loss_mask) active += m ? 1 : 0;
    if (active == 0) throw EmptyLossMask("loss mask selects no rows");
    T sum = T(0);
    for (size_t i = 0; i < rows; ++i) {
        if (!loss_mask[i]) continue;
        const T* a = pred.data() + i * cols;
        const T* b = target.data() + i * cols;
        for (size_t j = 0; j < cols; ++j) {
            const T diff = a[j] - b[j];
            sum += diff * diff;
        }
    }
    return sum / T(active * cols);
}

// v = v_uncond + scale * (v_cond - v_uncond)
template <typename T>
Tensor<T> cfg_combine(const Tensor<T>& v_uncond, const Tensor<T>& v_cond, T scale) {
    if (!v_uncond.same_shape(v_cond)) throw ShapeError("cfg_combine: shape mismatch");
    Tensor<T> out = v_uncond;
    for (size_t i = 0; i < out.size(); ++i) out[i] += scale * (v_cond[i] - v_uncond[i]);
    return out;
}

template <typename T>
using VelocityField = std::function<Tensor<T>(const Tensor<T>& x, T t)>;

template <typename T>
Tensor<T> gaussian_tensor(std::vector<size_t> shape, uint64_t seed) {
    Tensor<T> out(std::move(shape));
    Rng rng(seed);
    for (auto& v : out.raw()) v = T(rng.normal());
    return out;
}

// Explicit Euler over the uniform grid t_i = i/n, i = 0..n-1, starting from
// seeded standard normal noise. The field is expected to already include any
// guidance combination.
template <typename T>
Tensor<T> euler_sample(const VelocityField<T>& field, const std::vector<size_t>& shape,
                       const FlowConfig& cfg, uint64_t seed) {
    cfg.validate();
    Tensor<T> x = gaussian_tensor<T>(shape, seed);
    const T dt = T(1) / T(cfg.n_steps);
    for (size_t i = 0; i < cfg.n_steps; ++i) {
        const T t = T(i) / T(cfg.n_steps);
        const Tensor<T> v = field(x, t);
        if (!v.same_shape(x)) throw ShapeError("euler_sample: field changed the shape");
        for (size_t j = 0; j < x.size(); ++j) x[j] += dt * v[j];
    }
    return x;
}

}  // namespace fulldit::diffusion
