#include "dualgraph/parameters.hpp"

#include <cmath>

namespace dualgraph {

template <typename T>
Parameter<T>& ParameterStore<T>::add(std::string name, Tensor<T> value) {
  if (index_.count(name)) throw UsageError("duplicate parameter name '" + name + "'");
  index_.emplace(name, params_.size());
  params_.push_back(Parameter<T>{std::move(name), std::move(value), Tensor<T>()});
  return params_.back();
}

template <typename T>
Parameter<T>& ParameterStore<T>::add_uniform(std::string name, std::vector<std::size_t> shape, T scale,
                                             std::mt19937_64& rng) {
  Tensor<T> value(std::move(shape));
  std::uniform_real_distribution<double> dist(-static_cast<double>(scale), static_cast<double>(scale));
  for (auto& x : value.values()) x = static_cast<T>(dist(rng));
  return add(std::move(name), std::move(value));
}

template <typename T>
Parameter<T>& ParameterStore<T>::add_glorot(std::string name, std::size_t fan_in, std::size_t fan_out,
                                            std::mt19937_64& rng) {
  const T scale = static_cast<T>(std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)));
  return add_uniform(std::move(name), {fan_in, fan_out}, scale, rng);
}

template <typename T>
Parameter<T>& ParameterStore<T>::add_zeros(std::string name, std::vector<std::size_t> shape) {
  return add(std::move(name), Tensor<T>(std::move(shape)));
}

template <typename T>
Parameter<T>& ParameterStore<T>::get(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw UsageError("unknown parameter '" + std::string(name) + "'");
  return params_[it->second];
}

template <typename T>
const Parameter<T>& ParameterStore<T>::get(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw UsageError("unknown parameter '" + std::string(name) + "'");
  return params_[it->second];
}

template <typename T>
std::vector<std::string> ParameterStore<T>::names() const {
  std::vector<std::string> out;
  for (const auto& p : params_) out.push_back(p.name);
  return out;
}

template <typename T>
std::vector<std::string> ParameterStore<T>::names_with_prefix(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& p : params_) {
    if (std::string_view(p.name).substr(0, prefix.size()) == prefix) out.push_back(p.name);
  }
  return out;
}

template <typename T>
void ParameterStore<T>::zero_grad() {
  for (auto& p : params_) {
    if (p.grad.empty() || p.grad.shape() != p.value.shape()) {
      p.grad = Tensor<T>(p.value.shape());
    } else {
      p.grad.fill(T(0));
    }
  }
}

template <typename T>
std::size_t ParameterStore<T>::scalar_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.value.size();
  return total;
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace dualgraph
