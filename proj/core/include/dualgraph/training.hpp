#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dualgraph/adam.hpp"
#include "dualgraph/corpus.hpp"
#include "dualgraph/model.hpp"
#include "dualgraph/vocab.hpp"

namespace dualgraph {

struct TrainConfig {
  ModelConfig model = ModelConfig::defaults_for(EncoderKind::ggnn);
  int epochs = 30;
  int batch_size = 20;
  double lr = kDefaultLearningRate;
  // Dev-BLEU drops tolerated before stopping; a tie is neither an
  // improvement nor a drop.
  int patience = 5;
  double clip_norm = 2.0;
  std::uint64_t seed = 1;
  std::size_t vocab_size = kDefaultVocabSize;
  int max_decode_length = kDefaultMaxDecodeLength;
  int beam_size = 5;

  std::string train_path;
  std::string dev_path;
  std::string output_dir;
  std::string embeddings_path;

  void validate() const;
};

// Flat `key = value` lines; `#` starts a comment. Unknown keys are errors.
// DUALGRAPH_SEED, when set, overrides the seed.
TrainConfig parse_train_config(std::string_view text);
TrainConfig load_train_config(const std::filesystem::path& path);
std::string format_train_config(const TrainConfig& config);
void apply_seed_override(TrainConfig& config);

struct Batch {
  std::vector<std::size_t> indices;
};

// Splits `permutation` into batches of similar size. Pools of
// 10 * batch_size consecutive entries are sorted by size (stable) and cut;
// inside a batch, indices keep their permutation order.
std::vector<Batch> make_batches(const std::vector<std::size_t>& permutation, const std::vector<std::size_t>& sizes,
                                std::size_t batch_size);

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, std::size_t batch, std::int64_t step)
      : std::runtime_error("training diverged: loss is not finite in epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch) + ", optimizer step " + std::to_string(step)),
        batch_(batch),
        step_(step) {}
  std::size_t batch() const { return batch_; }
  std::int64_t step() const { return step_; }

 private:
  std::size_t batch_;
  std::int64_t step_;
};

// Dev-BLEU bookkeeping: an improvement resets the drop count, a score
// below the best increments it, a tie changes nothing.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}
  // True when `score` is a new best.
  bool update(double score);
  bool should_stop() const { return drops_ > patience_; }
  double best() const { return best_; }
  int drops() const { return drops_; }

 private:
  int patience_;
  int drops_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;  // per target token
  double dev_bleu = 0;
  double seconds = 0;
  double best_so_far = 0;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  int best_epoch = 0;
  double best_bleu = 0;
  bool stopped_early = false;
  std::filesystem::path checkpoint;  // empty without an output directory
};

// Training state for one configuration.
class Trainer {
 public:
  Trainer(TrainConfig config, std::vector<AmrInstance> train, std::vector<AmrInstance> dev,
          std::optional<VocabPair> vocabs = std::nullopt);

  // One pass over a fresh shuffle; returns the mean per-token loss.
  double train_epoch();
  // Corpus BLEU of greedy decodes of the dev set.
  double dev_bleu();
  // Teacher-forced per-token loss over the training set, no dropout.
  double evaluate_train_loss();
  std::vector<std::string> decode(const std::vector<AmrInstance>& corpus, int beam_size);

  // Full loop with early stopping. With an output directory, writes
  // model.ckpt (best epoch), config.txt, src_vocab.txt, tgt_vocab.txt and
  // metrics.tsv. The model is left holding the best parameters.
  TrainResult run(const std::function<void(const EpochRecord&)>& on_epoch = {});

  Model& model() { return model_; }
  const TrainConfig& config() const { return config_; }
  int epochs_done() const { return epoch_; }

 private:
  TrainConfig config_;
  std::vector<AmrInstance> train_;
  std::vector<AmrInstance> dev_;
  Model model_;
  std::vector<PreparedExample> prepared_;
  AdamState<float> adam_;
  std::mt19937_64 shuffle_rng_;
  std::mt19937_64 dropout_rng_;
  int epoch_ = 0;
};

void write_metrics_tsv(const std::vector<EpochRecord>& log, const std::filesystem::path& path);

// Loads a directory written by Trainer::run.
Model load_model_dir(const std::filesystem::path& checkpoint);

struct AblationRow {
  AblationMode mode;
  std::size_t parameters = 0;
  double dev_bleu = 0;
};

inline constexpr AblationMode kAblationOrder[] = {AblationMode::bilstm_only, AblationMode::td_only,
                                                  AblationMode::bu_only, AblationMode::dual};

std::size_t model_parameter_count(const ModelConfig& config, std::size_t source_vocab_size,
                                  std::size_t target_vocab_size);

}  // namespace dualgraph
