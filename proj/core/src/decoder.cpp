#include "dualgraph/decoder.hpp"

#include <algorithm>
#include <numeric>

#include "dualgraph/errors.hpp"

namespace dualgraph {

void DecoderConfig::validate() const {
  if (hidden <= 0 || embedding_dim <= 0 || attention_dim <= 0) {
    throw UsageError("decoder dimensions must be positive");
  }
}

ExtendedVocab::ExtendedVocab(const Vocabulary& base, const std::vector<std::string>& source_labels)
    : base_(&base) {
  source_ids_.reserve(source_labels.size());
  for (const auto& label : source_labels) {
    if (base.contains(label)) {
      source_ids_.push_back(base.id(label));
      continue;
    }
    auto it = std::find(extra_.begin(), extra_.end(), label);
    if (it == extra_.end()) {
      extra_.push_back(label);
      it = extra_.end() - 1;
    }
    source_ids_.push_back(static_cast<int>(base.size() + static_cast<std::size_t>(it - extra_.begin())));
  }
}

int ExtendedVocab::id(const std::string& token) const {
  if (base_->contains(token)) return base_->id(token);
  auto it = std::find(extra_.begin(), extra_.end(), token);
  if (it != extra_.end()) return static_cast<int>(base_->size() + static_cast<std::size_t>(it - extra_.begin()));
  return Vocabulary::kUnk;
}

const std::string& ExtendedVocab::token(int id) const {
  if (id >= 0 && static_cast<std::size_t>(id) < base_->size()) return base_->token(id);
  const std::size_t extra = static_cast<std::size_t>(id) - base_->size();
  if (id < 0 || extra >= extra_.size()) throw UsageError("extended id " + std::to_string(id) + " out of range");
  return extra_[extra];
}

template <typename T>
void add_decoder_params(ParameterStore<T>& store, const DecoderConfig& config, std::size_t target_vocab_size,
                        std::size_t memory_width, std::mt19937_64& rng) {
  config.validate();
  const std::size_t hidden = config.hidden, emb = config.embedding_dim, att = config.attention_dim;
  store.add_uniform("decoder.embed", {target_vocab_size, emb}, T(0.1), rng);
  add_lstm_params(store, "decoder.l0", emb + memory_width, hidden, rng);
  add_lstm_params(store, "decoder.l1", hidden, hidden, rng);
  store.add_glorot("decoder.att.Wh", memory_width, att, rng);
  store.add_glorot("decoder.att.Ws", hidden, att, rng);
  store.add_glorot("decoder.att.wc", 1, att, rng);
  store.add_zeros("decoder.att.b", {1, att});
  store.add_glorot("decoder.att.v", att, 1, rng);
  store.add_glorot("decoder.out.W", hidden + memory_width, target_vocab_size, rng);
  store.add_zeros("decoder.out.b", {1, target_vocab_size});
  store.add_glorot("decoder.gen.W", memory_width + hidden + emb, 1, rng);
  store.add_zeros("decoder.gen.b", {1, 1});
}

template <typename T>
AttentionMemory<T> make_attention_memory(Expr<T> states, ParameterStore<T>& store, const std::string& prefix) {
  Tape<T>& tape = states.tape();
  return AttentionMemory<T>{states, matmul(states, tape.param(store.get(prefix + ".Wh")))};
}

template <typename T>
AttentionResult<T> attention(Expr<T> query, const AttentionMemory<T>& memory, Expr<T> coverage,
                             ParameterStore<T>& store, const std::string& prefix) {
  Tape<T>& tape = query.tape();
  const std::size_t n = memory.states.rows();
  if (coverage.rows() != 1 || coverage.cols() != n) {
    throw ShapeError("attention: coverage " + coverage.value().shape_string() + " does not match " +
                     std::to_string(n) + " memory rows");
  }
  auto p = [&](const char* name) { return tape.param(store.get(prefix + "." + name)); };
  const Expr<T> query_term = matmul(query, p("Ws"));
  const Expr<T> coverage_term = matmul(transpose(coverage), p("wc"));
  const Expr<T> hidden = tanh(add(add(add(memory.projected, coverage_term), query_term), p("b")));
  const Expr<T> weights = softmax(transpose(matmul(hidden, p("v"))));
  return AttentionResult<T>{weights, matmul(weights, memory.states)};
}

template <typename T>
Expr<T> copy_distribution(Expr<T> p_vocab, Expr<T> attention_weights, Expr<T> p_gen,
                          const std::vector<int>& source_ids, std::size_t extended_size) {
  if (p_vocab.rows() != 1 || p_vocab.cols() > extended_size) {
    throw ShapeError("copy_distribution: vocabulary distribution " + p_vocab.value().shape_string() +
                     " does not fit extended size " + std::to_string(extended_size));
  }
  if (p_gen.value().size() != 1) throw ShapeError("copy_distribution: p_gen must be 1x1");
  std::vector<int> base_ids(p_vocab.cols());
  std::iota(base_ids.begin(), base_ids.end(), 0);
  const Expr<T> generated = mul(scatter_add(p_vocab, base_ids, extended_size), p_gen);
  const Expr<T> copied =
      mul(scatter_add(attention_weights, source_ids, extended_size), affine(p_gen, T(-1), T(1)));
  return add(generated, copied);
}

template <typename T>
DecoderState<T> initial_decoder_state(Tape<T>& tape, const DecoderConfig& config, std::size_t source_length,
                                      std::size_t memory_width) {
  DecoderState<T> state;
  state.layers = {zero_lstm_state(tape, config.hidden), zero_lstm_state(tape, config.hidden)};
  state.context = tape.constant(Tensor<T>::matrix(1, memory_width));
  state.coverage = tape.constant(Tensor<T>::matrix(1, source_length));
  return state;
}

template <typename T>
StepResult<T> decode_step(int previous_token, const DecoderState<T>& state, const AttentionMemory<T>& memory,
                          const ExtendedVocab& vocab, ParameterStore<T>& store) {
  Tape<T>& tape = state.context.tape();
  auto p = [&](const char* name) { return tape.param(store.get(name)); };
  const int embed_id = (previous_token < 0 || vocab.is_copy_only(previous_token)) ? Vocabulary::kUnk : previous_token;
  const Expr<T> embedded = select_rows(p("decoder.embed"), {embed_id});

  StepResult<T> out;
  out.state.layers.resize(state.layers.size());
  out.state.layers[0] = lstm_cell(concat_cols<T>({embedded, state.context}), state.layers[0], store, "decoder.l0");
  out.state.layers[1] = lstm_cell(out.state.layers[0].hidden, state.layers[1], store, "decoder.l1");
  const Expr<T> query = out.state.layers[1].hidden;

  const AttentionResult<T> att = attention(query, memory, state.coverage, store);
  const Expr<T> logits = add(matmul(concat_cols<T>({query, att.context}), p("decoder.out.W")), p("decoder.out.b"));
  const Expr<T> p_vocab = softmax(logits);
  out.p_gen = sigmoid(
      add(matmul(concat_cols<T>({att.context, query, embedded}), p("decoder.gen.W")), p("decoder.gen.b")));
  out.distribution = copy_distribution(p_vocab, att.weights, out.p_gen, vocab.source_ids(), vocab.size());
  out.attention = att.weights;
  out.state.context = att.context;
  out.state.coverage = add(state.coverage, att.weights);
  return out;
}

template <typename T>
Expr<T> nll_loss(const std::vector<Expr<T>>& distributions, const std::vector<int>& targets, std::size_t* clamped) {
  if (distributions.size() != targets.size()) {
    throw UsageError("nll_loss: " + std::to_string(distributions.size()) + " distributions for " +
                     std::to_string(targets.size()) + " targets");
  }
  if (targets.empty()) throw UsageError("nll_loss: empty target sequence");
  constexpr T kFloor = T(1e-12);
  std::vector<Expr<T>> picked;
  picked.reserve(targets.size());
  std::size_t floored = 0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Expr<T> prob = pick(distributions[t], 0, static_cast<std::size_t>(targets[t]));
    if (prob.scalar() <= kFloor) ++floored;
    picked.push_back(log(prob, kFloor));
  }
  if (clamped) *clamped = floored;
  return affine(sum(concat_cols(picked)), T(-1), T(0));
}

#define DUALGRAPH_INSTANTIATE_DECODER(T)                                                                   \
  template void add_decoder_params(ParameterStore<T>&, const DecoderConfig&, std::size_t, std::size_t,     \
                                   std::mt19937_64&);                                                      \
  template AttentionMemory<T> make_attention_memory(Expr<T>, ParameterStore<T>&, const std::string&);      \
  template AttentionResult<T> attention(Expr<T>, const AttentionMemory<T>&, Expr<T>, ParameterStore<T>&,   \
                                        const std::string&);                                               \
  template Expr<T> copy_distribution(Expr<T>, Expr<T>, Expr<T>, const std::vector<int>&, std::size_t);     \
  template DecoderState<T> initial_decoder_state(Tape<T>&, const DecoderConfig&, std::size_t, std::size_t); \
  template StepResult<T> decode_step(int, const DecoderState<T>&, const AttentionMemory<T>&,               \
                                     const ExtendedVocab&, ParameterStore<T>&);                            \
  template Expr<T> nll_loss(const std::vector<Expr<T>>&, const std::vector<int>&, std::size_t*);

DUALGRAPH_INSTANTIATE_DECODER(float)
DUALGRAPH_INSTANTIATE_DECODER(double)

}  // namespace dualgraph
