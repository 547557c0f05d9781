#pragma once

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dualgraph/amr_graph.hpp"
#include "dualgraph/parameters.hpp"
#include "dualgraph/tape.hpp"

namespace dualgraph {

class Vocabulary;

enum class EncoderKind { ggnn, gat, gin };
enum class AblationMode { bilstm_only, td_only, bu_only, dual };

std::string to_string(EncoderKind kind);
std::string to_string(AblationMode mode);
EncoderKind parse_encoder_kind(std::string_view text);
AblationMode parse_ablation_mode(std::string_view text);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::ggnn;
  int num_layers = 5;
  int graph_hidden = 300;
  int embedding_dim = 300;
  int lstm_hidden_per_direction = 450;
  double dropout_rate = 0.3;
  int gat_heads = 1;

  // Layer counts 2 (GIN), 5 (GAT), 5 (GGNN); everything else default.
  static EncoderConfig defaults_for(EncoderKind kind);
  void validate() const;
};

// Width of r_i for the given ablation mode.
std::size_t fused_width(const EncoderConfig& config, AblationMode mode);

// Dense incoming-adjacency matrix: entry (i, j) counts edges j -> i.
template <typename T>
Tensor<T> incoming_matrix(const std::vector<std::vector<int>>& in_neighbors);

// --- parameter creation -------------------------------------------------

template <typename T>
void add_ggnn_layer_params(ParameterStore<T>& store, const std::string& prefix, std::size_t hidden,
                           std::mt19937_64& rng);
template <typename T>
void add_gat_layer_params(ParameterStore<T>& store, const std::string& prefix, std::size_t hidden,
                          std::size_t heads, std::mt19937_64& rng);
template <typename T>
void add_gin_layer_params(ParameterStore<T>& store, const std::string& prefix, std::size_t hidden,
                          std::mt19937_64& rng);
// Input projection plus num_layers layers of the configured kind.
template <typename T>
void add_graph_encoder_params(ParameterStore<T>& store, const std::string& prefix, const EncoderConfig& config,
                              std::mt19937_64& rng);
template <typename T>
void add_lstm_params(ParameterStore<T>& store, const std::string& prefix, std::size_t input, std::size_t hidden,
                     std::mt19937_64& rng);
// embed.src, ge_t.* / ge_b.* as the mode requires, bilstm.*.
template <typename T>
void add_encoder_params(ParameterStore<T>& store, const EncoderConfig& config, AblationMode mode,
                        std::size_t source_vocab_size, std::mt19937_64& rng);

// --- layers ---------------------------------------------------------------

struct ForwardOptions {
  bool training = false;
  std::mt19937_64* rng = nullptr;  // required when training with dropout
};

// h_i' = GRU(h_i, sum_{j in N(i)} W1 h_j)
template <typename T>
Expr<T> ggnn_layer(Expr<T> states, const std::vector<std::vector<int>>& in_neighbors, ParameterStore<T>& store,
                   const std::string& prefix);

// h_i' = a_ii W2 h_i + sum_j a_ij W2 h_j, softmax over {i} and N(i) of
// LeakyReLU(a^T [W2 h_i || W2 h_j]). Heads are concatenated. When
// `attention` is given it receives one n x n coefficient matrix per head.
template <typename T>
Expr<T> gat_layer(Expr<T> states, const std::vector<std::vector<int>>& in_neighbors, ParameterStore<T>& store,
                  const std::string& prefix, std::size_t heads, std::vector<Expr<T>>* attention = nullptr);

// h_i' = MLP(h_i + sum_{j in N(i)} h_j)
template <typename T>
Expr<T> gin_layer(Expr<T> states, const std::vector<std::vector<int>>& in_neighbors, ParameterStore<T>& store,
                  const std::string& prefix);

template <typename T>
struct LstmState {
  Expr<T> hidden;
  Expr<T> cell;
};

// Gates ordered input, forget, candidate, output.
template <typename T>
LstmState<T> lstm_cell(Expr<T> input, const LstmState<T>& previous, ParameterStore<T>& store,
                       const std::string& prefix);

template <typename T>
LstmState<T> zero_lstm_state(Tape<T>& tape, std::size_t hidden);

// --- encoder --------------------------------------------------------------

// Row i is the embedding of view-node i's label (UNK if unknown).
template <typename T>
Expr<T> embed_nodes(Tape<T>& tape, const GraphView& view, const Vocabulary& vocab, ParameterStore<T>& store,
                    const std::string& table = "embed.src");

// Runs one graph encoder (projection plus stacked layers) over a view's
// incoming neighborhoods.
template <typename T>
Expr<T> graph_encode(Expr<T> embeddings, const std::vector<std::vector<int>>& in_neighbors,
                     const EncoderConfig& config, ParameterStore<T>& store, const std::string& prefix,
                     const ForwardOptions& options);

template <typename T>
struct NodeStates {
  Expr<T> embeddings;   // e_i, view order
  Expr<T> top_down;     // h^t_i, invalid when the mode has no GE_t
  Expr<T> bottom_up;    // h^b_i, invalid when the mode has no GE_b
  Expr<T> fused;        // r_i = [h^t_i || h^b_i || e_i], view order
};

struct EncoderPrefixes {
  std::string top_down = "ge_t";
  std::string bottom_up = "ge_b";
};

template <typename T>
NodeStates<T> dual_encode(Expr<T> embeddings, const GraphView& top_down, const GraphView& bottom_up,
                          const EncoderConfig& config, AblationMode mode, ParameterStore<T>& store,
                          const ForwardOptions& options, const EncoderPrefixes& prefixes = {});

// BiLSTM over the rows of `sequence` (already in traversal order). Row i
// of the result is [forward_i || backward_i].
template <typename T>
Expr<T> bilstm_encode(Expr<T> sequence, ParameterStore<T>& store, const std::string& prefix = "bilstm");

}  // namespace dualgraph
