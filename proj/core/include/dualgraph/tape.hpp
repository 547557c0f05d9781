#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dualgraph/tensor.hpp"

namespace dualgraph {

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  // Same shape as value once any backward pass has touched it.
  Tensor<T> grad;
};

template <typename T>
class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; the tape owns the
// data and must outlive every handle into it.
template <typename T>
class Expr {
 public:
  Expr() = default;
  Expr(Tape<T>* tape, int id) : tape_(tape), id_(id) {}

  Tape<T>& tape() const { return *tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor<T>& value() const { return tape_->value(id_); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  // Value of a 1x1 expression.
  T scalar() const { return value()[0]; }

 private:
  Tape<T>* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode differentiation record. Nodes are appended in evaluation
// order, which is a topological order, so backward simply walks the list
// from the end. A tape built with record = false evaluates values only.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(const Tensor<T>& output_grad)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  Expr<T> constant(Tensor<T> value);
  // Leaf bound to a parameter; backward accumulates into parameter.grad.
  // The parameter must outlive the tape.
  Expr<T> param(Parameter<T>& parameter);

  const Tensor<T>& value(int id) const {
    const Node& node = nodes_[id];
    return node.external ? node.external->value : node.value;
  }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }

  // Gradient buffer of a node, zero-initialized on first access.
  Tensor<T>& grad(int id);

  // Seeds d(loss)/d(loss) = 1 and propagates to every reachable node.
  void backward(Expr<T> loss);

  // Piecewise primitives (relu, leaky_relu, minimum, floored log) fold the
  // side of every kink they evaluate into this hash. Two evaluations with
  // equal signatures took the same smooth branch everywhere.
  std::uint64_t branch_signature() const { return branch_signature_; }
  void note_branch(bool side) {
    branch_signature_ = (branch_signature_ ^ (side ? 0x9e3779b97f4a7c15ULL : 0x5851f42d4c957f2dULL)) *
                        0x100000001b3ULL;
  }

  // Used by primitives: records a node computed from `inputs`.
  Expr<T> push(const char* op, Tensor<T> value, std::initializer_list<Expr<T>> inputs,
               BackwardFn backward);
  Expr<T> push(const char* op, Tensor<T> value, const std::vector<Expr<T>>& inputs,
               BackwardFn backward);

 private:
  struct Node {
    const char* op = "";
    Tensor<T> value;
    Tensor<T> grad;
    Parameter<T>* external = nullptr;
    bool needs_grad = false;
    BackwardFn backward;
  };

  template <typename Range>
  Expr<T> push_impl(const char* op, Tensor<T> value, const Range& inputs, BackwardFn backward);

  bool record_;
  std::vector<Node> nodes_;
  std::uint64_t branch_signature_ = 0xcbf29ce484222325ULL;
};

// Primitives. Binary elementwise ops accept an identical shape, a 1xC row
// broadcast over every row, or a 1x1 scalar broadcast, always on the
// second operand. Shape errors name the primitive and both shapes.
template <typename T> Expr<T> matmul(Expr<T> a, Expr<T> b);
template <typename T> Expr<T> add(Expr<T> a, Expr<T> b);
template <typename T> Expr<T> sub(Expr<T> a, Expr<T> b);
template <typename T> Expr<T> mul(Expr<T> a, Expr<T> b);
template <typename T> Expr<T> minimum(Expr<T> a, Expr<T> b);
// alpha * a + beta
template <typename T> Expr<T> affine(Expr<T> a, T alpha, T beta);
template <typename T> Expr<T> tanh(Expr<T> a);
template <typename T> Expr<T> sigmoid(Expr<T> a);
template <typename T> Expr<T> relu(Expr<T> a);
template <typename T> Expr<T> leaky_relu(Expr<T> a, T slope);
// log(max(a, floor)); the gradient is zero where the floor applies.
template <typename T> Expr<T> log(Expr<T> a, T floor = T(1e-12));
template <typename T> Expr<T> softmax(Expr<T> a);
// Elementwise product with a fixed mask (see dropout_mask).
template <typename T> Expr<T> dropout(Expr<T> a, const Tensor<T>& mask);
template <typename T> Expr<T> concat_cols(const std::vector<Expr<T>>& parts);
template <typename T> Expr<T> concat_rows(const std::vector<Expr<T>>& parts);
template <typename T> Expr<T> slice_cols(Expr<T> a, std::size_t start, std::size_t width);
// Row gather; also serves as embedding lookup.
template <typename T> Expr<T> select_rows(Expr<T> a, const std::vector<int>& rows);
template <typename T> Expr<T> transpose(Expr<T> a);
template <typename T> Expr<T> sum(Expr<T> a);
template <typename T> Expr<T> mean(Expr<T> a);
template <typename T> Expr<T> pick(Expr<T> a, std::size_t row, std::size_t col);
// out[0, index[i]] += a[0, i] for a 1xN row, out is 1 x size.
template <typename T> Expr<T> scatter_add(Expr<T> a, const std::vector<int>& index, std::size_t size);

// Inverted-dropout mask: entries are 0 with probability `rate`, else
// 1 / (1 - rate). rate == 0 yields all ones.
template <typename T>
Tensor<T> dropout_mask(const std::vector<std::size_t>& shape, double rate, std::mt19937_64& rng);

template <typename T> Expr<T> operator+(Expr<T> a, Expr<T> b) { return add(a, b); }
template <typename T> Expr<T> operator-(Expr<T> a, Expr<T> b) { return sub(a, b); }
template <typename T> Expr<T> operator*(Expr<T> a, Expr<T> b) { return mul(a, b); }

}  // namespace dualgraph
