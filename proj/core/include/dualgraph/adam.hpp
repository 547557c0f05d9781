#pragma once

#include <cstdint>
#include <vector>

#include "dualgraph/parameters.hpp"

namespace dualgraph {

template <typename T>
struct AdamState {
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Parallel to the parameter store's insertion order; allocated on the
  // first step.
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;
};

inline constexpr double kDefaultLearningRate = 0.001;

// One bias-corrected Adam update using the gradients held in `params`.
// Parameters whose gradient was never allocated count as zero-gradient.
template <typename T>
void adam_step(ParameterStore<T>& params, AdamState<T>& state, double lr = kDefaultLearningRate);

// Rescales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
template <typename T>
double clip_grad_norm(ParameterStore<T>& params, double max_norm);

template <typename T>
double grad_norm(const ParameterStore<T>& params);

}  // namespace dualgraph
