#include "dualgraph/tape.hpp"

#include <cmath>

namespace dualgraph {

template <typename T>
Expr<T> Tape<T>::constant(Tensor<T> value) {
  Node node;
  node.op = "constant";
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Expr<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Expr<T> Tape<T>::param(Parameter<T>& parameter) {
  Node node;
  node.op = "param";
  node.external = &parameter;
  node.needs_grad = record_;
  nodes_.push_back(std::move(node));
  return Expr<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Tensor<T>& Tape<T>::grad(int id) {
  Node& node = nodes_[id];
  Tensor<T>& g = node.external ? node.external->grad : node.grad;
  const Tensor<T>& v = value(id);
  if (g.empty() || g.shape() != v.shape()) g = Tensor<T>(v.shape());
  return g;
}

template <typename T>
template <typename Range>
Expr<T> Tape<T>::push_impl(const char* op, Tensor<T> value, const Range& inputs, BackwardFn backward) {
#ifndef NDEBUG
  for (const T& x : value.values()) {
    if (!std::isfinite(x)) throw std::runtime_error(std::string("non-finite value produced by ") + op);
  }
#endif
  Node node;
  node.op = op;
  node.value = std::move(value);
  if (record_) {
    for (const auto& in : inputs) {
      if (in.valid() && nodes_[in.id()].needs_grad) {
        node.needs_grad = true;
        break;
      }
    }
    if (node.needs_grad) node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Expr<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Expr<T> Tape<T>::push(const char* op, Tensor<T> value, std::initializer_list<Expr<T>> inputs,
                      BackwardFn backward) {
  return push_impl(op, std::move(value), inputs, std::move(backward));
}

template <typename T>
Expr<T> Tape<T>::push(const char* op, Tensor<T> value, const std::vector<Expr<T>>& inputs,
                      BackwardFn backward) {
  return push_impl(op, std::move(value), inputs, std::move(backward));
}

template <typename T>
void Tape<T>::backward(Expr<T> loss) {
  if (loss.valid() && &loss.tape() != this) throw UsageError("backward: loss belongs to another tape");
  if (value(loss.id()).size() != 1) {
    throw UsageError("backward: loss must be scalar, got shape " + value(loss.id()).shape_string());
  }
  if (!record_ || !nodes_[loss.id()].needs_grad) return;
  grad(loss.id())[0] += T(1);
  for (int id = loss.id(); id >= 0; --id) {
    Node& node = nodes_[id];
    if (!node.backward || node.grad.empty()) continue;
    node.backward(node.grad);
  }
}

namespace {

template <typename T>
[[noreturn]] void shape_mismatch(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                   b.shape_string());
}

enum class Broadcast { none, row, scalar };

template <typename T>
Broadcast broadcast_kind(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() == b.shape()) return Broadcast::none;
  if (b.size() == 1) return Broadcast::scalar;
  if (b.rows() == 1 && b.cols() == a.cols() && a.size() % b.cols() == 0) return Broadcast::row;
  shape_mismatch(op, a, b);
}

inline std::size_t b_index(Broadcast kind, std::size_t i, std::size_t cols) {
  switch (kind) {
    case Broadcast::none: return i;
    case Broadcast::row: return i % cols;
    case Broadcast::scalar: return 0;
  }
  return i;
}

template <typename T>
void check_same_tape(const char* op, Expr<T> a, Expr<T> b) {
  if (!a.valid() || !b.valid() || &a.tape() != &b.tape()) {
    throw UsageError(std::string(op) + ": operands must live on the same tape");
  }
}

// y = f(x) elementwise; `derivative(x, y)` gives dy/dx.
template <typename T, typename F, typename D>
Expr<T> elementwise(const char* op, Expr<T> a, F f, D derivative) {
  Tape<T>* tape = &a.tape();
  const Tensor<T>& av = a.value();
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const int a_id = a.id();
  const int out_id = static_cast<int>(tape->size());
  return tape->push(op, std::move(out), {a}, [tape, a_id, out_id, derivative](const Tensor<T>& g) {
    if (!tape->needs_grad(a_id)) return;
    const Tensor<T>& x = tape->value(a_id);
    const Tensor<T>& y = tape->value(out_id);
    Tensor<T>& ga = tape->grad(a_id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * derivative(x[i], y[i]);
  });
}

// Accumulates a gradient for the (possibly broadcast) second operand.
template <typename T>
void accumulate_broadcast(Tensor<T>& gb, Broadcast kind, std::size_t i, std::size_t cols, T value) {
  gb[b_index(kind, i, cols)] += value;
}

}  // namespace

template <typename T>
Expr<T> matmul(Expr<T> a, Expr<T> b) {
  check_same_tape("matmul", a, b);
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  if (av.cols() != bv.rows()) shape_mismatch("matmul", av, bv);
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  Tensor<T> out = Tensor<T>::matrix(n, m);
  const T* A = av.data();
  const T* B = bv.data();
  T* C = out.data();
  for (std::size_t i = 0; i < n; ++i) {
    T* crow = C + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = A[i * k + p];
      if (aip == T(0)) continue;
      const T* brow = B + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
    }
  }
  Tape<T>* tape = &a.tape();
  const int a_id = a.id(), b_id = b.id();
  return tape->push("matmul", std::move(out), {a, b}, [tape, a_id, b_id, n, k, m](const Tensor<T>& g) {
    const T* G = g.data();
    const T* A = tape->value(a_id).data();
    const T* B = tape->value(b_id).data();
    if (tape->needs_grad(a_id)) {
      T* GA = tape->grad(a_id).data();
      // dA = G * B^T
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const T* brow = B + p * m;
          const T* grow = G + i * m;
          T acc = 0;
          for (std::size_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
          GA[i * k + p] += acc;
        }
      }
    }
    if (tape->needs_grad(b_id)) {
      T* GB = tape->grad(b_id).data();
      // dB = A^T * G
      for (std::size_t i = 0; i < n; ++i) {
        const T* grow = G + i * m;
        for (std::size_t p = 0; p < k; ++p) {
          const T aip = A[i * k + p];
          if (aip == T(0)) continue;
          T* gbrow = GB + p * m;
          for (std::size_t j = 0; j < m; ++j) gbrow[j] += aip * grow[j];
        }
      }
    }
  });
}

template <typename T>
Expr<T> add(Expr<T> a, Expr<T> b) {
  check_same_tape("add", a, b);
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  const Broadcast kind = broadcast_kind("add", av, bv);
  const std::size_t cols = av.cols();
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[b_index(kind, i, cols)];
  Tape<T>* tape = &a.tape();
  const int a_id = a.id(), b_id = b.id();
  return tape->push("add", std::move(out), {a, b}, [tape, a_id, b_id, kind, cols](const Tensor<T>& g) {
    if (tape->needs_grad(a_id)) {
      Tensor<T>& ga = tape->grad(a_id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (tape->needs_grad(b_id)) {
      Tensor<T>& gb = tape->grad(b_id);
      for (std::size_t i = 0; i < g.size(); ++i) accumulate_broadcast(gb, kind, i, cols, g[i]);
    }
  });
}

template <typename T>
Expr<T> sub(Expr<T> a, Expr<T> b) {
  check_same_tape("sub", a, b);
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  const Broadcast kind = broadcast_kind("sub", av, bv);
  const std::size_t cols = av.cols();
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[b_index(kind, i, cols)];
  Tape<T>* tape = &a.tape();
  const int a_id = a.id(), b_id = b.id();
  return tape->push("sub", std::move(out), {a, b}, [tape, a_id, b_id, kind, cols](const Tensor<T>& g) {
    if (tape->needs_grad(a_id)) {
      Tensor<T>& ga = tape->grad(a_id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (tape->needs_grad(b_id)) {
      Tensor<T>& gb = tape->grad(b_id);
      for (std::size_t i = 0; i < g.size(); ++i) accumulate_broadcast(gb, kind, i, cols, -g[i]);
    }
  });
}

template <typename T>
Expr<T> mul(Expr<T> a, Expr<T> b) {
  check_same_tape("mul", a, b);
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  const Broadcast kind = broadcast_kind("mul", av, bv);
  const std::size_t cols = av.cols();
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[b_index(kind, i, cols)];
  Tape<T>* tape = &a.tape();
  const int a_id = a.id(), b_id = b.id();
  return tape->push("mul", std::move(out), {a, b}, [tape, a_id, b_id, kind, cols](const Tensor<T>& g) {
    const Tensor<T>& av = tape->value(a_id);
    const Tensor<T>& bv = tape->value(b_id);
    if (tape->needs_grad(a_id)) {
      Tensor<T>& ga = tape->grad(a_id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[b_index(kind, i, cols)];
    }
    if (tape->needs_grad(b_id)) {
      Tensor<T>& gb = tape->grad(b_id);
      for (std::size_t i = 0; i < g.size(); ++i) accumulate_broadcast(gb, kind, i, cols, g[i] * av[i]);
    }
  });
}

template <typename T>
Expr<T> minimum(Expr<T> a, Expr<T> b) {
  check_same_tape("minimum", a, b);
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  if (av.shape() != bv.shape()) shape_mismatch("minimum", av, bv);
  Tensor<T> out(av.shape());
  Tape<T>* tape = &a.tape();
  for (std::size_t i = 0; i < av.size(); ++i) {
    out[i] = std::min(av[i], bv[i]);
    tape->note_branch(av[i] <= bv[i]);
  }
  const int a_id = a.id(), b_id = b.id();
  return tape->push("minimum", std::move(out), {a, b}, [tape, a_id, b_id](const Tensor<T>& g) {
    const Tensor<T>& av = tape->value(a_id);
    const Tensor<T>& bv = tape->value(b_id);
    // Ties route the gradient to the first operand.
    if (tape->needs_grad(a_id)) {
      Tensor<T>& ga = tape->grad(a_id);
      for (std::size_t i = 0; i < g.size(); ++i) if (av[i] <= bv[i]) ga[i] += g[i];
    }
    if (tape->needs_grad(b_id)) {
      Tensor<T>& gb = tape->grad(b_id);
      for (std::size_t i = 0; i < g.size(); ++i) if (bv[i] < av[i]) gb[i] += g[i];
    }
  });
}

template <typename T>
Expr<T> affine(Expr<T> a, T alpha, T beta) {
  return elementwise(
      "affine", a, [alpha, beta](T x) { return alpha * x + beta; },
      [alpha](T, T) { return alpha; });
}

template <typename T>
Expr<T> tanh(Expr<T> a) {
  return elementwise(
      "tanh", a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Expr<T> sigmoid(Expr<T> a) {
  return elementwise(
      "sigmoid", a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

namespace {

template <typename T, typename Pred>
void note_branches(Expr<T> a, Pred pred) {
  for (T x : a.value().values()) a.tape().note_branch(pred(x));
}

}  // namespace

template <typename T>
Expr<T> relu(Expr<T> a) {
  note_branches(a, [](T x) { return x > T(0); });
  return elementwise(
      "relu", a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Expr<T> leaky_relu(Expr<T> a, T slope) {
  note_branches(a, [](T x) { return x > T(0); });
  return elementwise(
      "leaky_relu", a, [slope](T x) { return x > T(0) ? x : slope * x; },
      [slope](T x, T) { return x > T(0) ? T(1) : slope; });
}

template <typename T>
Expr<T> log(Expr<T> a, T floor) {
  note_branches(a, [floor](T x) { return x > floor; });
  return elementwise(
      "log", a, [floor](T x) { return std::log(std::max(x, floor)); },
      [floor](T x, T) { return x > floor ? T(1) / x : T(0); });
}

template <typename T>
Expr<T> softmax(Expr<T> a) {
  const Tensor<T>& av = a.value();
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor<T> out(av.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = av.data() + r * cols;
    T* y = out.data() + r * cols;
    T peak = x[0];
    for (std::size_t c = 1; c < cols; ++c) peak = std::max(peak, x[c]);
    T total = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - peak);
      total += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  Tape<T>* tape = &a.tape();
  const int a_id = a.id();
  const int out_id = static_cast<int>(tape->size());
  return tape->push("softmax", std::move(out), {a}, [tape, a_id, out_id, rows, cols](const Tensor<T>& g) {
    if (!tape->needs_grad(a_id)) return;
    const Tensor<T>& y = tape->value(out_id);
    Tensor<T>& ga = tape->grad(a_id);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t base = r * cols;
      T dot = 0;
      for (std::size_t c = 0; c < cols; ++c) dot += g[base + c] * y[base + c];
      for (std::size_t c = 0; c < cols; ++c) ga[base + c] += y[base + c] * (g[base + c] - dot);
    }
  });
}

template <typename T>
Expr<T> dropout(Expr<T> a, const Tensor<T>& mask) {
  Tape<T>& tape = a.tape();
  if (mask.shape() != a.value().shape()) shape_mismatch("dropout", a.value(), mask);
  return mul(a, tape.constant(mask));
}

template <typename T>
Expr<T> concat_cols(const std::vector<Expr<T>>& parts) {
  if (parts.empty()) throw UsageError("concat_cols: no operands");
  Tape<T>* tape = &parts.front().tape();
  const std::size_t rows = parts.front().rows();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const auto& p : parts) {
    check_same_tape("concat_cols", parts.front(), p);
    if (p.rows() != rows) shape_mismatch("concat_cols", parts.front().value(), p.value());
    offsets.push_back(total);
    total += p.cols();
  }
  Tensor<T> out = Tensor<T>::matrix(rows, total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& v = parts[k].value();
    const std::size_t w = v.cols();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * w, w, out.data() + r * total + offsets[k]);
    }
  }
  std::vector<int> ids;
  for (const auto& p : parts) ids.push_back(p.id());
  return tape->push("concat_cols", std::move(out), parts, [tape, ids, offsets, rows, total](const Tensor<T>& g) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!tape->needs_grad(ids[k])) continue;
      Tensor<T>& gp = tape->grad(ids[k]);
      const std::size_t w = gp.cols();
      for (std::size_t r = 0; r < rows; ++r) {
        const T* src = g.data() + r * total + offsets[k];
        T* dst = gp.data() + r * w;
        for (std::size_t c = 0; c < w; ++c) dst[c] += src[c];
      }
    }
  });
}

template <typename T>
Expr<T> concat_rows(const std::vector<Expr<T>>& parts) {
  if (parts.empty()) throw UsageError("concat_rows: no operands");
  Tape<T>* tape = &parts.front().tape();
  const std::size_t cols = parts.front().cols();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const auto& p : parts) {
    check_same_tape("concat_rows", parts.front(), p);
    if (p.cols() != cols) shape_mismatch("concat_rows", parts.front().value(), p.value());
    offsets.push_back(total);
    total += p.value().size();
  }
  Tensor<T> out = Tensor<T>::matrix(total / cols, cols);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& v = parts[k].value();
    std::copy(v.values().begin(), v.values().end(), out.data() + offsets[k]);
  }
  std::vector<int> ids;
  for (const auto& p : parts) ids.push_back(p.id());
  return tape->push("concat_rows", std::move(out), parts, [tape, ids, offsets](const Tensor<T>& g) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!tape->needs_grad(ids[k])) continue;
      Tensor<T>& gp = tape->grad(ids[k]);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[offsets[k] + i];
    }
  });
}

template <typename T>
Expr<T> slice_cols(Expr<T> a, std::size_t start, std::size_t width) {
  const Tensor<T>& av = a.value();
  const std::size_t rows = av.rows(), cols = av.cols();
  if (width == 0 || start + width > cols) {
    throw ShapeError("slice_cols: columns [" + std::to_string(start) + ", " + std::to_string(start + width) +
                     ") out of range for shape " + av.shape_string());
  }
  Tensor<T> out = Tensor<T>::matrix(rows, width);
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(av.data() + r * cols + start, width, out.data() + r * width);
  Tape<T>* tape = &a.tape();
  const int a_id = a.id();
  return tape->push("slice_cols", std::move(out), {a}, [tape, a_id, rows, cols, start, width](const Tensor<T>& g) {
    if (!tape->needs_grad(a_id)) return;
    Tensor<T>& ga = tape->grad(a_id);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < width; ++c) ga[r * cols + start + c] += g[r * width + c];
    }
  });
}

template <typename T>
Expr<T> select_rows(Expr<T> a, const std::vector<int>& rows) {
  const Tensor<T>& av = a.value();
  const std::size_t cols = av.cols();
  if (rows.empty()) throw ShapeError("select_rows: empty row list for shape " + av.shape_string());
  for (int r : rows) {
    if (r < 0 || static_cast<std::size_t>(r) >= av.rows()) {
      throw ShapeError("select_rows: row " + std::to_string(r) + " out of range for shape " + av.shape_string());
    }
  }
  Tensor<T> out = Tensor<T>::matrix(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(av.data() + static_cast<std::size_t>(rows[i]) * cols, cols, out.data() + i * cols);
  }
  Tape<T>* tape = &a.tape();
  const int a_id = a.id();
  return tape->push("select_rows", std::move(out), {a}, [tape, a_id, rows, cols](const Tensor<T>& g) {
    if (!tape->needs_grad(a_id)) return;
    Tensor<T>& ga = tape->grad(a_id);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      T* dst = ga.data() + static_cast<std::size_t>(rows[i]) * cols;
      const T* src = g.data() + i * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

template <typename T>
Expr<T> transpose(Expr<T> a) {
  const Tensor<T>& av = a.value();
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor<T> out = Tensor<T>::matrix(cols, rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(c, r) = av[r * cols + c];
  Tape<T>* tape = &a.tape();
  const int a_id = a.id();
  return tape->push("transpose", std::move(out), {a}, [tape, a_id, rows, cols](const Tensor<T>& g) {
    if (!tape->needs_grad(a_id)) return;
    Tensor<T>& ga = tape->grad(a_id);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += g[c * rows + r];
  });
}

template <typename T>
Expr<T> sum(Expr<T> a) {
  const Tensor<T>& av = a.value();
  T total = 0;
  for (const T& x : av.values()) total += x;
  Tape<T>* tape = &a.tape();
  const int a_id = a.id();
  return tape->push("sum", Tensor<T>::scalar(total), {a}, [tape, a_id](const Tensor<T>& g) {
    if (!tape->needs_grad(a_id)) return;
    Tensor<T>& ga = tape->grad(a_id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
  });
}

template <typename T>
Expr<T> mean(Expr<T> a) {
  const T n = static_cast<T>(a.value().size());
  return affine(sum(a), T(1) / n, T(0));
}

template <typename T>
Expr<T> pick(Expr<T> a, std::size_t row, std::size_t col) {
  const Tensor<T>& av = a.value();
  if (row >= av.rows() || col >= av.cols()) {
    throw ShapeError("pick: (" + std::to_string(row) + ", " + std::to_string(col) + ") out of range for shape " +
                     av.shape_string());
  }
  const std::size_t index = row * av.cols() + col;
  Tape<T>* tape = &a.tape();
  const int a_id = a.id();
  return tape->push("pick", Tensor<T>::scalar(av[index]), {a}, [tape, a_id, index](const Tensor<T>& g) {
    if (tape->needs_grad(a_id)) tape->grad(a_id)[index] += g[0];
  });
}

template <typename T>
Expr<T> scatter_add(Expr<T> a, const std::vector<int>& index, std::size_t size) {
  const Tensor<T>& av = a.value();
  if (av.rows() != 1 || av.cols() != index.size()) {
    throw ShapeError("scatter_add: input shape " + av.shape_string() + " does not match index length " +
                     std::to_string(index.size()));
  }
  Tensor<T> out = Tensor<T>::matrix(1, size);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || static_cast<std::size_t>(index[i]) >= size) {
      throw ShapeError("scatter_add: index " + std::to_string(index[i]) + " out of range for size " +
                       std::to_string(size));
    }
    out[index[i]] += av[i];
  }
  Tape<T>* tape = &a.tape();
  const int a_id = a.id();
  return tape->push("scatter_add", std::move(out), {a}, [tape, a_id, index](const Tensor<T>& g) {
    if (!tape->needs_grad(a_id)) return;
    Tensor<T>& ga = tape->grad(a_id);
    for (std::size_t i = 0; i < index.size(); ++i) ga[i] += g[index[i]];
  });
}

template <typename T>
Tensor<T> dropout_mask(const std::vector<std::size_t>& shape, double rate, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw UsageError("dropout rate must be in [0, 1)");
  Tensor<T> mask(shape, T(1));
  if (rate == 0.0) return mask;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::bernoulli_distribution drop(rate);
  for (auto& m : mask.values()) m = drop(rng) ? T(0) : keep_scale;
  return mask;
}

#define DUALGRAPH_INSTANTIATE_TAPE(T)                                                          \
  template class Tape<T>;                                                                      \
  template Expr<T> matmul(Expr<T>, Expr<T>);                                                   \
  template Expr<T> add(Expr<T>, Expr<T>);                                                      \
  template Expr<T> sub(Expr<T>, Expr<T>);                                                      \
  template Expr<T> mul(Expr<T>, Expr<T>);                                                      \
  template Expr<T> minimum(Expr<T>, Expr<T>);                                                  \
  template Expr<T> affine(Expr<T>, T, T);                                                      \
  template Expr<T> tanh(Expr<T>);                                                              \
  template Expr<T> sigmoid(Expr<T>);                                                           \
  template Expr<T> relu(Expr<T>);                                                              \
  template Expr<T> leaky_relu(Expr<T>, T);                                                     \
  template Expr<T> log(Expr<T>, T);                                                            \
  template Expr<T> softmax(Expr<T>);                                                           \
  template Expr<T> dropout(Expr<T>, const Tensor<T>&);                                         \
  template Expr<T> concat_cols(const std::vector<Expr<T>>&);                                   \
  template Expr<T> concat_rows(const std::vector<Expr<T>>&);                                   \
  template Expr<T> slice_cols(Expr<T>, std::size_t, std::size_t);                              \
  template Expr<T> select_rows(Expr<T>, const std::vector<int>&);                              \
  template Expr<T> transpose(Expr<T>);                                                         \
  template Expr<T> sum(Expr<T>);                                                               \
  template Expr<T> mean(Expr<T>);                                                              \
  template Expr<T> pick(Expr<T>, std::size_t, std::size_t);                                    \
  template Expr<T> scatter_add(Expr<T>, const std::vector<int>&, std::size_t);                 \
  template Tensor<T> dropout_mask(const std::vector<std::size_t>&, double, std::mt19937_64&);

DUALGRAPH_INSTANTIATE_TAPE(float)
DUALGRAPH_INSTANTIATE_TAPE(double)

}  // namespace dualgraph
