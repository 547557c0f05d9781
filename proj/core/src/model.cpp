#include "dualgraph/model.hpp"

#include <cmath>

#include "dualgraph/errors.hpp"

namespace dualgraph {

ModelConfig ModelConfig::defaults_for(EncoderKind kind) {
  ModelConfig config;
  config.encoder = EncoderConfig::defaults_for(kind);
  return config;
}

void ModelConfig::validate() const {
  encoder.validate();
  decoder.validate();
}

PreparedExample prepare_example(const AmrGraph& graph, const std::vector<std::string>& tokens,
                                const Vocabulary& target_vocab) {
  PreparedExample ex;
  ex.top_down = levi_transform(graph);
  ex.bottom_up = reverse_view(ex.top_down);
  ex.order = dfs_order(ex.top_down);
  ex.source_labels.reserve(ex.order.size());
  for (int node : ex.order) ex.source_labels.push_back(ex.top_down.node_labels[node]);
  ex.tokens = tokens;
  const ExtendedVocab ext(target_vocab, ex.source_labels);
  ex.extra_tokens = ext.extra_tokens();
  ex.targets.reserve(tokens.size() + 1);
  for (const auto& tok : tokens) ex.targets.push_back(ext.id(tok));
  ex.targets.push_back(Vocabulary::kEos);
  return ex;
}

PreparedExample prepare_example(const AmrInstance& instance, const Vocabulary& target_vocab) {
  return prepare_example(instance.graph, instance.tokens(), target_vocab);
}

template <typename T>
void init_model_params(ParameterStore<T>& store, const ModelConfig& config, std::size_t source_vocab_size,
                       std::size_t target_vocab_size, std::mt19937_64& rng) {
  config.validate();
  add_encoder_params(store, config.encoder, config.ablation, source_vocab_size, rng);
  add_decoder_params(store, config.decoder, target_vocab_size, config.memory_width(), rng);
}

template <typename T>
EncodedExample<T> encode_example(Tape<T>& tape, ParameterStore<T>& store, const ModelConfig& config,
                                 const PreparedExample& example, const Vocabulary& source_vocab,
                                 const ForwardOptions& options) {
  EncodedExample<T> out;
  const Expr<T> embeddings = embed_nodes(tape, example.top_down, source_vocab, store);
  out.nodes = dual_encode(embeddings, example.top_down, example.bottom_up, config.encoder, config.ablation, store,
                          options);
  out.states = bilstm_encode(select_rows(out.nodes.fused, example.order), store);
  out.memory = make_attention_memory(out.states, store);
  return out;
}

template <typename T>
ExampleLoss<T> example_loss(Tape<T>& tape, ParameterStore<T>& store, const ModelConfig& config,
                            const PreparedExample& example, const Vocabulary& source_vocab,
                            const Vocabulary& target_vocab, const ForwardOptions& options) {
  const EncodedExample<T> encoded = encode_example(tape, store, config, example, source_vocab, options);
  const ExtendedVocab ext(target_vocab, example.source_labels);
  DecoderState<T> state =
      initial_decoder_state(tape, config.decoder, example.order.size(), config.memory_width());
  ExampleLoss<T> out;
  std::vector<Expr<T>> penalties;
  int previous = Vocabulary::kBos;
  for (int target : example.targets) {
    StepResult<T> step = decode_step(previous, state, encoded.memory, ext, store);
    if (config.decoder.coverage_penalty) penalties.push_back(sum(minimum(step.attention, state.coverage)));
    out.distributions.push_back(step.distribution);
    out.attention.push_back(step.attention);
    state = step.state;
    previous = target;
  }
  out.tokens = example.targets.size();
  out.loss = nll_loss(out.distributions, example.targets, &out.clamped);
  if (!penalties.empty()) {
    const T weight = static_cast<T>(config.decoder.coverage_weight);
    out.loss = add(out.loss, affine(sum(concat_cols(penalties)), weight, T(0)));
  }
  return out;
}

template <typename T>
std::vector<int> greedy_decode(ParameterStore<T>& store, const ModelConfig& config, const PreparedExample& example,
                               const Vocabulary& source_vocab, const Vocabulary& target_vocab, int max_len) {
  if (max_len < 1) throw UsageError("greedy_decode: max_len must be at least 1");
  Tape<T> tape(false);
  const EncodedExample<T> encoded = encode_example(tape, store, config, example, source_vocab, {});
  const ExtendedVocab ext(target_vocab, example.source_labels);
  DecoderState<T> state = initial_decoder_state(tape, config.decoder, example.order.size(), config.memory_width());
  std::vector<int> output;
  int previous = Vocabulary::kBos;
  for (int t = 0; t < max_len; ++t) {
    StepResult<T> step = decode_step(previous, state, encoded.memory, ext, store);
    const auto& dist = step.distribution.value();
    int best = 0;
    for (std::size_t i = 1; i < dist.size(); ++i) {
      if (dist[i] > dist[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    if (best == Vocabulary::kEos) break;
    output.push_back(best);
    state = step.state;
    previous = best;
  }
  return output;
}

template <typename T>
std::vector<int> beam_decode(ParameterStore<T>& store, const ModelConfig& config, const PreparedExample& example,
                             const Vocabulary& source_vocab, const Vocabulary& target_vocab, int beam_size,
                             int max_len) {
  Tape<T> tape(false);
  const EncodedExample<T> encoded = encode_example(tape, store, config, example, source_vocab, {});
  const ExtendedVocab ext(target_vocab, example.source_labels);
  DecoderState<T> initial =
      initial_decoder_state(tape, config.decoder, example.order.size(), config.memory_width());
  auto step = [&](const DecoderState<T>& state, int previous) {
    StepResult<T> result = decode_step(previous, state, encoded.memory, ext, store);
    const auto& dist = result.distribution.value();
    std::vector<double> log_probs(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) log_probs[i] = std::log(std::max(static_cast<double>(dist[i]), 1e-30));
    return std::make_pair(std::move(log_probs), result.state);
  };
  BeamOptions options;
  options.beam_size = beam_size;
  options.max_len = max_len;
  options.bos = Vocabulary::kBos;
  options.eos = Vocabulary::kEos;
  auto best = beam_search(initial, step, options);
  if (!best.tokens.empty() && best.tokens.back() == Vocabulary::kEos) best.tokens.pop_back();
  return best.tokens;
}

std::vector<std::string> ids_to_tokens(const std::vector<int>& ids, const PreparedExample& example,
                                       const Vocabulary& target_vocab) {
  const ExtendedVocab ext(target_vocab, example.source_labels);
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(ext.token(id));
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string Model::generate(const AmrGraph& graph, int beam_size, int max_len) {
  const PreparedExample ex = prepare_example(graph, {}, target_vocab);
  const auto ids = beam_size <= 1 ? greedy_decode(params, config, ex, source_vocab, target_vocab, max_len)
                                  : beam_decode(params, config, ex, source_vocab, target_vocab, beam_size, max_len);
  return join_tokens(ids_to_tokens(ids, ex, target_vocab));
}

Model create_model(const ModelConfig& config, Vocabulary source_vocab, Vocabulary target_vocab, std::uint64_t seed) {
  Model model{config, std::move(source_vocab), std::move(target_vocab), {}};
  std::mt19937_64 rng(seed);
  init_model_params(model.params, config, model.source_vocab.size(), model.target_vocab.size(), rng);
  return model;
}

#define DUALGRAPH_INSTANTIATE_MODEL(T)                                                                         \
  template void init_model_params(ParameterStore<T>&, const ModelConfig&, std::size_t, std::size_t,            \
                                  std::mt19937_64&);                                                           \
  template EncodedExample<T> encode_example(Tape<T>&, ParameterStore<T>&, const ModelConfig&,                  \
                                            const PreparedExample&, const Vocabulary&, const ForwardOptions&); \
  template ExampleLoss<T> example_loss(Tape<T>&, ParameterStore<T>&, const ModelConfig&,                       \
                                       const PreparedExample&, const Vocabulary&, const Vocabulary&,           \
                                       const ForwardOptions&);                                                 \
  template std::vector<int> greedy_decode(ParameterStore<T>&, const ModelConfig&, const PreparedExample&,      \
                                          const Vocabulary&, const Vocabulary&, int);                          \
  template std::vector<int> beam_decode(ParameterStore<T>&, const ModelConfig&, const PreparedExample&,        \
                                        const Vocabulary&, const Vocabulary&, int, int);

DUALGRAPH_INSTANTIATE_MODEL(float)
DUALGRAPH_INSTANTIATE_MODEL(double)

}  // namespace dualgraph
