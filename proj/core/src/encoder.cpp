#include "dualgraph/encoder.hpp"

#include <cmath>

#include "dualgraph/errors.hpp"
#include "dualgraph/vocab.hpp"

namespace dualgraph {

std::string to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::ggnn: return "ggnn";
    case EncoderKind::gat: return "gat";
    case EncoderKind::gin: return "gin";
  }
  return "?";
}

std::string to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::bilstm_only: return "bilstm_only";
    case AblationMode::td_only: return "td_only";
    case AblationMode::bu_only: return "bu_only";
    case AblationMode::dual: return "dual";
  }
  return "?";
}

EncoderKind parse_encoder_kind(std::string_view text) {
  if (text == "ggnn") return EncoderKind::ggnn;
  if (text == "gat") return EncoderKind::gat;
  if (text == "gin") return EncoderKind::gin;
  throw UsageError("unknown encoder kind '" + std::string(text) + "' (expected ggnn, gat or gin)");
}

AblationMode parse_ablation_mode(std::string_view text) {
  if (text == "bilstm_only") return AblationMode::bilstm_only;
  if (text == "td_only") return AblationMode::td_only;
  if (text == "bu_only") return AblationMode::bu_only;
  if (text == "dual") return AblationMode::dual;
  throw UsageError("unknown ablation mode '" + std::string(text) + "'");
}

EncoderConfig EncoderConfig::defaults_for(EncoderKind kind) {
  EncoderConfig config;
  config.kind = kind;
  config.num_layers = kind == EncoderKind::gin ? 2 : 5;
  return config;
}

void EncoderConfig::validate() const {
  if (num_layers <= 0 || graph_hidden <= 0 || embedding_dim <= 0 || lstm_hidden_per_direction <= 0 ||
      gat_heads <= 0) {
    throw UsageError("encoder dimensions and layer counts must be positive");
  }
  if (graph_hidden % gat_heads != 0) throw UsageError("graph_hidden must be divisible by gat_heads");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw UsageError("dropout_rate must be in [0, 1)");
}

std::size_t fused_width(const EncoderConfig& config, AblationMode mode) {
  const std::size_t gh = config.graph_hidden, emb = config.embedding_dim;
  switch (mode) {
    case AblationMode::bilstm_only: return emb;
    case AblationMode::td_only:
    case AblationMode::bu_only: return gh + emb;
    case AblationMode::dual: return 2 * gh + emb;
  }
  return emb;
}

template <typename T>
Tensor<T> incoming_matrix(const std::vector<std::vector<int>>& in_neighbors) {
  const std::size_t n = in_neighbors.size();
  Tensor<T> a = Tensor<T>::matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : in_neighbors[i]) a(i, static_cast<std::size_t>(j)) += T(1);
  }
  return a;
}

namespace {

template <typename T>
class Binder {
 public:
  Binder(Tape<T>& tape, ParameterStore<T>& store, const std::string& prefix)
      : tape_(tape), store_(store), prefix_(prefix) {}

  Expr<T> operator()(const std::string& name) const { return tape_.param(store_.get(prefix_ + "." + name)); }

 private:
  Tape<T>& tape_;
  ParameterStore<T>& store_;
  const std::string& prefix_;
};

template <typename T>
void check_states(const char* op, Expr<T> states, const std::vector<std::vector<int>>& in_neighbors,
                  std::size_t hidden) {
  if (states.rows() != in_neighbors.size() || states.cols() != hidden) {
    throw ShapeError(std::string(op) + ": states " + states.value().shape_string() + " do not match " +
                     std::to_string(in_neighbors.size()) + " nodes x " + std::to_string(hidden) + " hidden");
  }
}

template <typename T>
Expr<T> affine_map(Expr<T> x, Expr<T> weight, Expr<T> bias) {
  return add(matmul(x, weight), bias);
}

}  // namespace

template <typename T>
void add_ggnn_layer_params(ParameterStore<T>& store, const std::string& prefix, std::size_t hidden,
                           std::mt19937_64& rng) {
  store.add_glorot(prefix + ".msg.W", hidden, hidden, rng);
  for (const char* gate : {"z", "r", "c"}) {
    const std::string g = prefix + "." + gate;
    store.add_glorot(g + ".Wx", hidden, hidden, rng);
    store.add_glorot(g + ".Wh", hidden, hidden, rng);
    store.add_zeros(g + ".b", {1, hidden});
  }
}

template <typename T>
void add_gat_layer_params(ParameterStore<T>& store, const std::string& prefix, std::size_t hidden,
                          std::size_t heads, std::mt19937_64& rng) {
  const std::size_t width = hidden / heads;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string p = prefix + ".head" + std::to_string(h);
    store.add_glorot(p + ".W", hidden, width, rng);
    store.add_glorot(p + ".a_self", width, 1, rng);
    store.add_glorot(p + ".a_neighbor", width, 1, rng);
  }
}

template <typename T>
void add_gin_layer_params(ParameterStore<T>& store, const std::string& prefix, std::size_t hidden,
                          std::mt19937_64& rng) {
  store.add_glorot(prefix + ".mlp1.W", hidden, hidden, rng);
  store.add_zeros(prefix + ".mlp1.b", {1, hidden});
  store.add_glorot(prefix + ".mlp2.W", hidden, hidden, rng);
  store.add_zeros(prefix + ".mlp2.b", {1, hidden});
}

template <typename T>
void add_graph_encoder_params(ParameterStore<T>& store, const std::string& prefix, const EncoderConfig& config,
                              std::mt19937_64& rng) {
  config.validate();
  const std::size_t hidden = config.graph_hidden;
  store.add_glorot(prefix + ".proj.W", config.embedding_dim, hidden, rng);
  store.add_zeros(prefix + ".proj.b", {1, hidden});
  for (int l = 0; l < config.num_layers; ++l) {
    const std::string layer = prefix + ".l" + std::to_string(l);
    switch (config.kind) {
      case EncoderKind::ggnn: add_ggnn_layer_params(store, layer, hidden, rng); break;
      case EncoderKind::gat: add_gat_layer_params(store, layer, hidden, config.gat_heads, rng); break;
      case EncoderKind::gin: add_gin_layer_params(store, layer, hidden, rng); break;
    }
  }
}

template <typename T>
void add_lstm_params(ParameterStore<T>& store, const std::string& prefix, std::size_t input, std::size_t hidden,
                     std::mt19937_64& rng) {
  store.add_glorot(prefix + ".Wx", input, 4 * hidden, rng);
  store.add_glorot(prefix + ".Wh", hidden, 4 * hidden, rng);
  Tensor<T> bias = Tensor<T>::matrix(1, 4 * hidden);
  // Forget gate starts open.
  for (std::size_t i = hidden; i < 2 * hidden; ++i) bias[i] = T(1);
  store.add(prefix + ".b", std::move(bias));
}

template <typename T>
void add_encoder_params(ParameterStore<T>& store, const EncoderConfig& config, AblationMode mode,
                        std::size_t source_vocab_size, std::mt19937_64& rng) {
  config.validate();
  Tensor<T> table = Tensor<T>::matrix(source_vocab_size, config.embedding_dim);
  std::uniform_real_distribution<double> init(-0.1, 0.1);
  for (std::size_t r = 1; r < source_vocab_size; ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) table(r, c) = static_cast<T>(init(rng));
  }
  store.add("embed.src", std::move(table));
  if (mode == AblationMode::td_only || mode == AblationMode::dual) add_graph_encoder_params(store, "ge_t", config, rng);
  if (mode == AblationMode::bu_only || mode == AblationMode::dual) add_graph_encoder_params(store, "ge_b", config, rng);
  const std::size_t input = fused_width(config, mode);
  add_lstm_params(store, "bilstm.fwd", input, config.lstm_hidden_per_direction, rng);
  add_lstm_params(store, "bilstm.bwd", input, config.lstm_hidden_per_direction, rng);
}

template <typename T>
Expr<T> ggnn_layer(Expr<T> states, const std::vector<std::vector<int>>& in_neighbors, ParameterStore<T>& store,
                   const std::string& prefix) {
  Tape<T>& tape = states.tape();
  const Binder<T> p(tape, store, prefix);
  const Expr<T> msg_w = p("msg.W");
  check_states("ggnn_layer", states, in_neighbors, msg_w.rows());
  const Expr<T> adjacency = tape.constant(incoming_matrix<T>(in_neighbors));
  const Expr<T> message = matmul(adjacency, matmul(states, msg_w));
  const Expr<T> z = sigmoid(add(add(matmul(message, p("z.Wx")), matmul(states, p("z.Wh"))), p("z.b")));
  const Expr<T> r = sigmoid(add(add(matmul(message, p("r.Wx")), matmul(states, p("r.Wh"))), p("r.b")));
  const Expr<T> candidate =
      tanh(add(add(matmul(message, p("c.Wx")), matmul(mul(r, states), p("c.Wh"))), p("c.b")));
  // (1 - z) * h + z * candidate
  return add(states, mul(z, sub(candidate, states)));
}

template <typename T>
Expr<T> gat_layer(Expr<T> states, const std::vector<std::vector<int>>& in_neighbors, ParameterStore<T>& store,
                  const std::string& prefix, std::size_t heads, std::vector<Expr<T>>* attention) {
  Tape<T>& tape = states.tape();
  const Binder<T> p(tape, store, prefix);
  const std::size_t n = in_neighbors.size();
  check_states("gat_layer", states, in_neighbors, store.get(prefix + ".head0.W").value.rows());

  // Additive mask: 0 on {i} and N(i), effectively -inf elsewhere.
  Tensor<T> mask = Tensor<T>::matrix(n, n, T(-1e30));
  for (std::size_t i = 0; i < n; ++i) {
    mask(i, i) = T(0);
    for (int j : in_neighbors[i]) mask(i, static_cast<std::size_t>(j)) = T(0);
  }
  const Expr<T> mask_expr = tape.constant(std::move(mask));
  const Expr<T> ones_row = tape.constant(Tensor<T>::matrix(1, n, T(1)));
  const Expr<T> ones_col = tape.constant(Tensor<T>::matrix(n, 1, T(1)));

  std::vector<Expr<T>> outputs;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string head = "head" + std::to_string(h);
    const Expr<T> projected = matmul(states, p(head + ".W"));
    const Expr<T> self_score = matmul(projected, p(head + ".a_self"));
    const Expr<T> neighbor_score = matmul(projected, p(head + ".a_neighbor"));
    // scores(i, j) = a_self . W h_i + a_neighbor . W h_j
    const Expr<T> scores = add(matmul(self_score, ones_row), matmul(ones_col, transpose(neighbor_score)));
    const Expr<T> alpha = softmax(add(leaky_relu(scores, T(0.2)), mask_expr));
    if (attention) attention->push_back(alpha);
    outputs.push_back(matmul(alpha, projected));
  }
  return outputs.size() == 1 ? outputs.front() : concat_cols(outputs);
}

template <typename T>
Expr<T> gin_layer(Expr<T> states, const std::vector<std::vector<int>>& in_neighbors, ParameterStore<T>& store,
                  const std::string& prefix) {
  Tape<T>& tape = states.tape();
  const Binder<T> p(tape, store, prefix);
  const Expr<T> w1 = p("mlp1.W");
  check_states("gin_layer", states, in_neighbors, w1.rows());
  const Expr<T> adjacency = tape.constant(incoming_matrix<T>(in_neighbors));
  const Expr<T> pooled = add(states, matmul(adjacency, states));
  const Expr<T> hidden = relu(affine_map(pooled, w1, p("mlp1.b")));
  return affine_map(hidden, p("mlp2.W"), p("mlp2.b"));
}

template <typename T>
LstmState<T> lstm_cell(Expr<T> input, const LstmState<T>& previous, ParameterStore<T>& store,
                       const std::string& prefix) {
  Tape<T>& tape = input.tape();
  const Binder<T> p(tape, store, prefix);
  const Expr<T> wx = p("Wx");
  if (input.cols() != wx.rows()) {
    throw ShapeError("lstm_cell: input " + input.value().shape_string() + " does not match " +
                     wx.value().shape_string());
  }
  const std::size_t hidden = previous.hidden.cols();
  const Expr<T> gates = add(add(matmul(input, wx), matmul(previous.hidden, p("Wh"))), p("b"));
  const Expr<T> in_gate = sigmoid(slice_cols(gates, 0, hidden));
  const Expr<T> forget_gate = sigmoid(slice_cols(gates, hidden, hidden));
  const Expr<T> candidate = tanh(slice_cols(gates, 2 * hidden, hidden));
  const Expr<T> out_gate = sigmoid(slice_cols(gates, 3 * hidden, hidden));
  const Expr<T> cell = add(mul(forget_gate, previous.cell), mul(in_gate, candidate));
  return LstmState<T>{mul(out_gate, tanh(cell)), cell};
}

template <typename T>
LstmState<T> zero_lstm_state(Tape<T>& tape, std::size_t hidden) {
  const Expr<T> zeros = tape.constant(Tensor<T>::matrix(1, hidden));
  return LstmState<T>{zeros, zeros};
}

template <typename T>
Expr<T> embed_nodes(Tape<T>& tape, const GraphView& view, const Vocabulary& vocab, ParameterStore<T>& store,
                    const std::string& table) {
  std::vector<int> ids;
  ids.reserve(view.node_count());
  for (const auto& label : view.node_labels) ids.push_back(vocab.id(label));
  return select_rows(tape.param(store.get(table)), ids);
}

template <typename T>
Expr<T> graph_encode(Expr<T> embeddings, const std::vector<std::vector<int>>& in_neighbors,
                     const EncoderConfig& config, ParameterStore<T>& store, const std::string& prefix,
                     const ForwardOptions& options) {
  Tape<T>& tape = embeddings.tape();
  const Binder<T> p(tape, store, prefix);
  Expr<T> states = affine_map(embeddings, p("proj.W"), p("proj.b"));
  const bool drop = options.training && config.dropout_rate > 0.0;
  if (drop && !options.rng) throw UsageError("graph_encode: dropout requires an rng");
  for (int l = 0; l < config.num_layers; ++l) {
    const std::string layer = prefix + ".l" + std::to_string(l);
    switch (config.kind) {
      case EncoderKind::ggnn: states = ggnn_layer(states, in_neighbors, store, layer); break;
      case EncoderKind::gat:
        states = gat_layer(states, in_neighbors, store, layer, static_cast<std::size_t>(config.gat_heads));
        break;
      case EncoderKind::gin: states = gin_layer(states, in_neighbors, store, layer); break;
    }
    if (drop) states = dropout(states, dropout_mask<T>(states.value().shape(), config.dropout_rate, *options.rng));
  }
  return states;
}

template <typename T>
NodeStates<T> dual_encode(Expr<T> embeddings, const GraphView& top_down, const GraphView& bottom_up,
                          const EncoderConfig& config, AblationMode mode, ParameterStore<T>& store,
                          const ForwardOptions& options, const EncoderPrefixes& prefixes) {
  if (top_down.node_count() != bottom_up.node_count() || embeddings.rows() != top_down.node_count()) {
    throw ShapeError("dual_encode: views have " + std::to_string(top_down.node_count()) + " and " +
                     std::to_string(bottom_up.node_count()) + " nodes, embeddings have " +
                     std::to_string(embeddings.rows()) + " rows");
  }
  NodeStates<T> out;
  out.embeddings = embeddings;
  std::vector<Expr<T>> parts;
  if (mode == AblationMode::td_only || mode == AblationMode::dual) {
    out.top_down = graph_encode(embeddings, top_down.in_neighbors, config, store, prefixes.top_down, options);
    parts.push_back(out.top_down);
  }
  if (mode == AblationMode::bu_only || mode == AblationMode::dual) {
    out.bottom_up = graph_encode(embeddings, bottom_up.in_neighbors, config, store, prefixes.bottom_up, options);
    parts.push_back(out.bottom_up);
  }
  parts.push_back(embeddings);
  out.fused = parts.size() == 1 ? embeddings : concat_cols(parts);
  return out;
}

template <typename T>
Expr<T> bilstm_encode(Expr<T> sequence, ParameterStore<T>& store, const std::string& prefix) {
  Tape<T>& tape = sequence.tape();
  const std::size_t n = sequence.rows();
  if (n == 0) throw UsageError("bilstm_encode: empty sequence");
  const std::size_t hidden = store.get(prefix + ".fwd.Wh").value.rows();
  std::vector<Expr<T>> steps(n);
  for (std::size_t i = 0; i < n; ++i) steps[i] = select_rows(sequence, {static_cast<int>(i)});

  std::vector<Expr<T>> forward(n), backward(n);
  LstmState<T> state = zero_lstm_state(tape, hidden);
  for (std::size_t i = 0; i < n; ++i) {
    state = lstm_cell(steps[i], state, store, prefix + ".fwd");
    forward[i] = state.hidden;
  }
  state = zero_lstm_state(tape, hidden);
  for (std::size_t i = n; i-- > 0;) {
    state = lstm_cell(steps[i], state, store, prefix + ".bwd");
    backward[i] = state.hidden;
  }
  return concat_cols<T>({concat_rows(forward), concat_rows(backward)});
}

#define DUALGRAPH_INSTANTIATE_ENCODER(T)                                                                      \
  template Tensor<T> incoming_matrix<T>(const std::vector<std::vector<int>>&);                                \
  template void add_ggnn_layer_params(ParameterStore<T>&, const std::string&, std::size_t, std::mt19937_64&); \
  template void add_gat_layer_params(ParameterStore<T>&, const std::string&, std::size_t, std::size_t,        \
                                     std::mt19937_64&);                                                       \
  template void add_gin_layer_params(ParameterStore<T>&, const std::string&, std::size_t, std::mt19937_64&);  \
  template void add_graph_encoder_params(ParameterStore<T>&, const std::string&, const EncoderConfig&,        \
                                         std::mt19937_64&);                                                   \
  template void add_lstm_params(ParameterStore<T>&, const std::string&, std::size_t, std::size_t,             \
                                std::mt19937_64&);                                                            \
  template void add_encoder_params(ParameterStore<T>&, const EncoderConfig&, AblationMode, std::size_t,       \
                                   std::mt19937_64&);                                                         \
  template Expr<T> ggnn_layer(Expr<T>, const std::vector<std::vector<int>>&, ParameterStore<T>&,              \
                              const std::string&);                                                            \
  template Expr<T> gat_layer(Expr<T>, const std::vector<std::vector<int>>&, ParameterStore<T>&,               \
                             const std::string&, std::size_t, std::vector<Expr<T>>*);                         \
  template Expr<T> gin_layer(Expr<T>, const std::vector<std::vector<int>>&, ParameterStore<T>&,               \
                             const std::string&);                                                             \
  template LstmState<T> lstm_cell(Expr<T>, const LstmState<T>&, ParameterStore<T>&, const std::string&);      \
  template LstmState<T> zero_lstm_state(Tape<T>&, std::size_t);                                               \
  template Expr<T> embed_nodes(Tape<T>&, const GraphView&, const Vocabulary&, ParameterStore<T>&,             \
                               const std::string&);                                                           \
  template Expr<T> graph_encode(Expr<T>, const std::vector<std::vector<int>>&, const EncoderConfig&,          \
                                ParameterStore<T>&, const std::string&, const ForwardOptions&);               \
  template NodeStates<T> dual_encode(Expr<T>, const GraphView&, const GraphView&, const EncoderConfig&,       \
                                     AblationMode, ParameterStore<T>&, const ForwardOptions&,                 \
                                     const EncoderPrefixes&);                                                 \
  template Expr<T> bilstm_encode(Expr<T>, ParameterStore<T>&, const std::string&);

DUALGRAPH_INSTANTIATE_ENCODER(float)
DUALGRAPH_INSTANTIATE_ENCODER(double)

}  // namespace dualgraph
