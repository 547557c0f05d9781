#pragma once

#include <random>
#include <string>
#include <vector>

#include "dualgraph/amr_graph.hpp"
#include "dualgraph/beam_search.hpp"
#include "dualgraph/corpus.hpp"
#include "dualgraph/decoder.hpp"
#include "dualgraph/encoder.hpp"
#include "dualgraph/vocab.hpp"

namespace dualgraph {

struct ModelConfig {
  EncoderConfig encoder;
  AblationMode ablation = AblationMode::dual;
  DecoderConfig decoder;

  // Encoder-kind layer counts, 300-wide graph states and embeddings, 900-wide
  // BiLSTM output and decoder.
  static ModelConfig defaults_for(EncoderKind kind);
  void validate() const;
  std::size_t memory_width() const { return 2 * static_cast<std::size_t>(encoder.lstm_hidden_per_direction); }
};

// Everything about one AMR/sentence pair that does not depend on parameters.
struct PreparedExample {
  GraphView top_down;
  GraphView bottom_up;
  std::vector<int> order;                   // DFS order over view nodes
  std::vector<std::string> source_labels;   // view labels in DFS order
  std::vector<std::string> tokens;          // reference tokens
  std::vector<int> targets;                 // extended ids, EOS-terminated
  std::vector<std::string> extra_tokens;    // copy-only tokens of this example
};

PreparedExample prepare_example(const AmrGraph& graph, const std::vector<std::string>& tokens,
                                const Vocabulary& target_vocab);
PreparedExample prepare_example(const AmrInstance& instance, const Vocabulary& target_vocab);

// Parameter set of a full model: embed.*, ge_t.*, ge_b.*, bilstm.*, decoder.*.
template <typename T>
void init_model_params(ParameterStore<T>& store, const ModelConfig& config, std::size_t source_vocab_size,
                       std::size_t target_vocab_size, std::mt19937_64& rng);

template <typename T>
struct EncodedExample {
  NodeStates<T> nodes;
  Expr<T> states;  // BiLSTM output, one row per view node in DFS order
  AttentionMemory<T> memory;
};

template <typename T>
EncodedExample<T> encode_example(Tape<T>& tape, ParameterStore<T>& store, const ModelConfig& config,
                                 const PreparedExample& example, const Vocabulary& source_vocab,
                                 const ForwardOptions& options);

template <typename T>
struct ExampleLoss {
  Expr<T> loss;  // summed over time
  std::size_t tokens = 0;
  std::size_t clamped = 0;
  std::vector<Expr<T>> distributions;
  std::vector<Expr<T>> attention;
};

// Teacher-forced negative log-likelihood of the example's targets.
template <typename T>
ExampleLoss<T> example_loss(Tape<T>& tape, ParameterStore<T>& store, const ModelConfig& config,
                            const PreparedExample& example, const Vocabulary& source_vocab,
                            const Vocabulary& target_vocab, const ForwardOptions& options);

// Extended ids without the terminating EOS.
template <typename T>
std::vector<int> greedy_decode(ParameterStore<T>& store, const ModelConfig& config, const PreparedExample& example,
                               const Vocabulary& source_vocab, const Vocabulary& target_vocab,
                               int max_len = kDefaultMaxDecodeLength);

template <typename T>
std::vector<int> beam_decode(ParameterStore<T>& store, const ModelConfig& config, const PreparedExample& example,
                             const Vocabulary& source_vocab, const Vocabulary& target_vocab, int beam_size,
                             int max_len = kDefaultMaxDecodeLength);

std::vector<std::string> ids_to_tokens(const std::vector<int>& ids, const PreparedExample& example,
                                       const Vocabulary& target_vocab);
std::string join_tokens(const std::vector<std::string>& tokens);

// A trained model with its vocabularies, in training precision.
struct Model {
  ModelConfig config;
  Vocabulary source_vocab;
  Vocabulary target_vocab;
  ParameterStore<float> params;

  // Detokenized (space-joined) output sentence.
  std::string generate(const AmrGraph& graph, int beam_size, int max_len = kDefaultMaxDecodeLength);
};

Model create_model(const ModelConfig& config, Vocabulary source_vocab, Vocabulary target_vocab,
                   std::uint64_t seed);

}  // namespace dualgraph
