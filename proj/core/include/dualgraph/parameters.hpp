#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dualgraph/tape.hpp"

namespace dualgraph {

// Named parameter collection. Insertion order is preserved and defines
// checkpoint order; references stay valid as parameters are added.
template <typename T>
class ParameterStore {
 public:
  Parameter<T>& add(std::string name, Tensor<T> value);
  // Uniform(-scale, scale) initialization.
  Parameter<T>& add_uniform(std::string name, std::vector<std::size_t> shape, T scale, std::mt19937_64& rng);
  // Glorot-uniform for a [fan_in, fan_out] matrix.
  Parameter<T>& add_glorot(std::string name, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);
  Parameter<T>& add_zeros(std::string name, std::vector<std::size_t> shape);

  bool contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }
  Parameter<T>& get(std::string_view name);
  const Parameter<T>& get(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  // Names in insertion order.
  std::vector<std::string> names() const;
  // Names starting with `prefix`.
  std::vector<std::string> names_with_prefix(std::string_view prefix) const;

  void zero_grad();
  std::size_t scalar_count() const;

  template <typename U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const auto& p : params_) out.add(p.name, p.value.template cast<U>());
    return out;
  }

 private:
  std::deque<Parameter<T>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Total number of scalars across all tensors, embeddings included.
template <typename T>
std::size_t count_parameters(const ParameterStore<T>& params) {
  return params.scalar_count();
}

}  // namespace dualgraph
