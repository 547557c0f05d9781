#pragma once

#include <random>
#include <string>
#include <vector>

#include "dualgraph/encoder.hpp"
#include "dualgraph/parameters.hpp"
#include "dualgraph/tape.hpp"
#include "dualgraph/vocab.hpp"

namespace dualgraph {

inline constexpr int kDefaultMaxDecodeLength = 250;

struct DecoderConfig {
  int hidden = 900;
  int embedding_dim = 300;
  // Width of the additive-attention hidden layer.
  int attention_dim = 900;
  // Adds sum_t sum_i min(a_t_i, coverage_i) to the loss when set.
  bool coverage_penalty = false;
  double coverage_weight = 1.0;

  void validate() const;
};

// Target vocabulary extended with the source labels of one example that
// the base vocabulary lacks. Base ids are stable across examples.
class ExtendedVocab {
 public:
  ExtendedVocab(const Vocabulary& base, const std::vector<std::string>& source_labels);

  std::size_t size() const { return base_->size() + extra_.size(); }
  std::size_t base_size() const { return base_->size(); }
  // Base id, else copy-only id, else UNK.
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  bool is_copy_only(int id) const { return static_cast<std::size_t>(id) >= base_->size(); }
  // Extended id of every source position, in source order.
  const std::vector<int>& source_ids() const { return source_ids_; }
  const std::vector<std::string>& extra_tokens() const { return extra_; }

 private:
  const Vocabulary* base_;
  std::vector<std::string> extra_;
  std::vector<int> source_ids_;
};

template <typename T>
void add_decoder_params(ParameterStore<T>& store, const DecoderConfig& config, std::size_t target_vocab_size,
                        std::size_t memory_width, std::mt19937_64& rng);

// Encoder states with the W_h projection applied once per example.
template <typename T>
struct AttentionMemory {
  Expr<T> states;     // n x d
  Expr<T> projected;  // n x attention_dim
};

template <typename T>
AttentionMemory<T> make_attention_memory(Expr<T> states, ParameterStore<T>& store,
                                         const std::string& prefix = "decoder.att");

template <typename T>
struct AttentionResult {
  Expr<T> weights;  // 1 x n, a softmax
  Expr<T> context;  // 1 x d
};

// e_i = v . tanh(W_h h_i + W_s s_t + w_c c_i + b), a = softmax(e),
// context = sum_i a_i h_i.
template <typename T>
AttentionResult<T> attention(Expr<T> query, const AttentionMemory<T>& memory, Expr<T> coverage,
                             ParameterStore<T>& store, const std::string& prefix = "decoder.att");

// P(w) = p_gen p_vocab(w) + (1 - p_gen) sum_{i: src(i) = w} a_i over the
// extended vocabulary. `source_ids` maps each attention position to its
// extended id.
template <typename T>
Expr<T> copy_distribution(Expr<T> p_vocab, Expr<T> attention_weights, Expr<T> p_gen,
                          const std::vector<int>& source_ids, std::size_t extended_size);

template <typename T>
struct DecoderState {
  std::vector<LstmState<T>> layers;
  Expr<T> context;   // previous attention context, fed with the next input
  Expr<T> coverage;  // sum of all previous attention distributions, 1 x n
};

template <typename T>
DecoderState<T> initial_decoder_state(Tape<T>& tape, const DecoderConfig& config, std::size_t source_length,
                                      std::size_t memory_width);

template <typename T>
struct StepResult {
  Expr<T> distribution;  // 1 x extended size
  Expr<T> attention;     // 1 x n
  Expr<T> p_gen;         // 1 x 1
  DecoderState<T> state;
};

// One decoder step. `previous_token` is an extended id; copy-only ids are
// embedded as UNK.
template <typename T>
StepResult<T> decode_step(int previous_token, const DecoderState<T>& state, const AttentionMemory<T>& memory,
                          const ExtendedVocab& vocab, ParameterStore<T>& store);

// -sum_t log p_t(y_t). Probabilities are floored at 1e-12 before the log;
// `clamped` (optional) receives how many targets hit the floor.
template <typename T>
Expr<T> nll_loss(const std::vector<Expr<T>>& distributions, const std::vector<int>& targets,
                 std::size_t* clamped = nullptr);

}  // namespace dualgraph
