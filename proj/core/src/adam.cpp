#include "dualgraph/adam.hpp"

#include <cmath>

namespace dualgraph {

template <typename T>
void adam_step(ParameterStore<T>& params, AdamState<T>& state, double lr) {
  if (!(lr > 0.0)) throw UsageError("adam_step: learning rate must be positive");
  if (state.first_moment.empty() && state.step == 0) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.value.shape());
      state.second_moment.emplace_back(p.value.shape());
    }
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                     " tensors but the store has " + std::to_string(params.size()));
  }
  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  std::size_t k = 0;
  for (auto& p : params) {
    Tensor<T>& m = state.first_moment[k];
    Tensor<T>& v = state.second_moment[k];
    ++k;
    if (m.shape() != p.value.shape() || v.shape() != p.value.shape()) {
      throw ShapeError("adam_step: moment shape " + m.shape_string() + " does not match parameter '" + p.name +
                       "' " + p.value.shape_string());
    }
    const bool has_grad = !p.grad.empty();
    if (has_grad && p.grad.shape() != p.value.shape()) {
      throw ShapeError("adam_step: gradient shape " + p.grad.shape_string() + " does not match parameter '" +
                       p.name + "' " + p.value.shape_string());
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const T g = has_grad ? p.grad[i] : T(0);
      m[i] = static_cast<T>(b1 * m[i] + (1.0 - b1) * g);
      v[i] = static_cast<T>(b2 * v[i] + (1.0 - b2) * g * g);
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p.value[i] = static_cast<T>(p.value[i] - lr * m_hat / (std::sqrt(v_hat) + state.epsilon));
    }
  }
}

template <typename T>
double grad_norm(const ParameterStore<T>& params) {
  double total = 0;
  for (const auto& p : params) {
    for (const T& g : p.grad.values()) total += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(total);
}

template <typename T>
double clip_grad_norm(ParameterStore<T>& params, double max_norm) {
  const double norm = grad_norm(params);
  if (norm > max_norm && norm > 0) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      for (T& g : p.grad.values()) g *= scale;
    }
  }
  return norm;
}

template void adam_step(ParameterStore<float>&, AdamState<float>&, double);
template void adam_step(ParameterStore<double>&, AdamState<double>&, double);
template double clip_grad_norm(ParameterStore<float>&, double);
template double clip_grad_norm(ParameterStore<double>&, double);
template double grad_norm(const ParameterStore<float>&);
template double grad_norm(const ParameterStore<double>&);

}  // namespace dualgraph
