#include "dualgraph/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "dualgraph/bleu.hpp"
#include "dualgraph/checkpoint.hpp"
#include "dualgraph/embeddings.hpp"
#include "dualgraph/errors.hpp"

namespace dualgraph {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename N>
N parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    N out{};
    if constexpr (std::is_floating_point_v<N>) {
      out = static_cast<N>(std::stod(value, &used));
    } else if constexpr (std::is_unsigned_v<N>) {
      if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
      out = static_cast<N>(std::stoull(value, &used));
    } else {
      out = static_cast<N>(std::stoll(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw UsageError("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config: '" + key + "' expects true or false, got '" + value + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  if (epochs < 1) throw UsageError("config: epochs must be positive");
  if (batch_size < 1) throw UsageError("config: batch_size must be positive");
  if (!(lr > 0)) throw UsageError("config: lr must be positive");
  if (patience < 0) throw UsageError("config: patience must be non-negative");
  if (!(clip_norm > 0)) throw UsageError("config: clip_norm must be positive");
  if (vocab_size < 1) throw UsageError("config: vocab_size must be positive");
  if (max_decode_length < 1) throw UsageError("config: max_decode_length must be positive");
  if (beam_size < 1) throw UsageError("config: beam_size must be positive");
}

TrainConfig parse_train_config(std::string_view text) {
  std::map<std::string, std::string> values;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    values[trim(std::string_view(stripped).substr(0, eq))] = trim(std::string_view(stripped).substr(eq + 1));
  }

  // The encoder kind fixes layer-count defaults, so it is read first.
  TrainConfig c;
  if (auto it = values.find("encoder"); it != values.end()) {
    c.model = ModelConfig::defaults_for(parse_encoder_kind(it->second));
    values.erase(it);
  }
  for (const auto& [key, value] : values) {
    auto& enc = c.model.encoder;
    auto& dec = c.model.decoder;
    if (key == "layers") enc.num_layers = parse_number<int>(key, value);
    else if (key == "graph_hidden") enc.graph_hidden = parse_number<int>(key, value);
    else if (key == "embedding_dim") enc.embedding_dim = parse_number<int>(key, value);
    else if (key == "lstm_hidden_per_direction") enc.lstm_hidden_per_direction = parse_number<int>(key, value);
    else if (key == "dropout") enc.dropout_rate = parse_number<double>(key, value);
    else if (key == "gat_heads") enc.gat_heads = parse_number<int>(key, value);
    else if (key == "ablation") c.model.ablation = parse_ablation_mode(value);
    else if (key == "decoder_hidden") dec.hidden = parse_number<int>(key, value);
    else if (key == "decoder_embedding_dim") dec.embedding_dim = parse_number<int>(key, value);
    else if (key == "attention_dim") dec.attention_dim = parse_number<int>(key, value);
    else if (key == "coverage_penalty") dec.coverage_penalty = parse_bool(key, value);
    else if (key == "coverage_weight") dec.coverage_weight = parse_number<double>(key, value);
    else if (key == "epochs") c.epochs = parse_number<int>(key, value);
    else if (key == "batch_size") c.batch_size = parse_number<int>(key, value);
    else if (key == "lr") c.lr = parse_number<double>(key, value);
    else if (key == "patience") c.patience = parse_number<int>(key, value);
    else if (key == "clip_norm") c.clip_norm = parse_number<double>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "vocab_size") c.vocab_size = parse_number<std::size_t>(key, value);
    else if (key == "max_decode_length") c.max_decode_length = parse_number<int>(key, value);
    else if (key == "beam_size") c.beam_size = parse_number<int>(key, value);
    else if (key == "train") c.train_path = value;
    else if (key == "dev") c.dev_path = value;
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "embeddings") c.embeddings_path = value;
    else throw UsageError("config: unknown key '" + key + "'");
  }
  apply_seed_override(c);
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  TrainConfig c = parse_train_config(read_text_file(path));
  // Relative corpus paths are taken relative to the config file.
  const auto base = path.parent_path();
  for (std::string* p : {&c.train_path, &c.dev_path, &c.output_dir, &c.embeddings_path}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
  return c;
}

void apply_seed_override(TrainConfig& config) {
  if (const char* env = std::getenv("DUALGRAPH_SEED"); env != nullptr && *env != '\0') {
    config.seed = parse_number<std::uint64_t>("DUALGRAPH_SEED", env);
  }
}

std::string format_train_config(const TrainConfig& c) {
  std::ostringstream out;
  const auto& enc = c.model.encoder;
  const auto& dec = c.model.decoder;
  out << "encoder = " << to_string(enc.kind) << '\n'
      << "layers = " << enc.num_layers << '\n'
      << "graph_hidden = " << enc.graph_hidden << '\n'
      << "embedding_dim = " << enc.embedding_dim << '\n'
      << "lstm_hidden_per_direction = " << enc.lstm_hidden_per_direction << '\n'
      << "dropout = " << format_double(enc.dropout_rate) << '\n'
      << "gat_heads = " << enc.gat_heads << '\n'
      << "ablation = " << to_string(c.model.ablation) << '\n'
      << "decoder_hidden = " << dec.hidden << '\n'
      << "decoder_embedding_dim = " << dec.embedding_dim << '\n'
      << "attention_dim = " << dec.attention_dim << '\n'
      << "coverage_penalty = " << (dec.coverage_penalty ? "true" : "false") << '\n'
      << "coverage_weight = " << format_double(dec.coverage_weight) << '\n'
      << "epochs = " << c.epochs << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "lr = " << format_double(c.lr) << '\n'
      << "patience = " << c.patience << '\n'
      << "clip_norm = " << format_double(c.clip_norm) << '\n'
      << "seed = " << c.seed << '\n'
      << "vocab_size = " << c.vocab_size << '\n'
      << "max_decode_length = " << c.max_decode_length << '\n'
      << "beam_size = " << c.beam_size << '\n';
  if (!c.train_path.empty()) out << "train = " << c.train_path << '\n';
  if (!c.dev_path.empty()) out << "dev = " << c.dev_path << '\n';
  if (!c.output_dir.empty()) out << "output_dir = " << c.output_dir << '\n';
  if (!c.embeddings_path.empty()) out << "embeddings = " << c.embeddings_path << '\n';
  return out.str();
}

std::vector<Batch> make_batches(const std::vector<std::size_t>& permutation, const std::vector<std::size_t>& sizes,
                                std::size_t batch_size) {
  if (batch_size == 0) throw UsageError("make_batches: batch_size must be positive");
  std::vector<std::size_t> position(sizes.size(), 0);
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    if (permutation[i] >= sizes.size()) throw UsageError("make_batches: index out of range");
    position[permutation[i]] = i;
  }
  std::vector<Batch> batches;
  const std::size_t pool_size = 10 * batch_size;
  for (std::size_t start = 0; start < permutation.size(); start += pool_size) {
    const std::size_t end = std::min(permutation.size(), start + pool_size);
    std::vector<std::size_t> pool(permutation.begin() + static_cast<std::ptrdiff_t>(start),
                                  permutation.begin() + static_cast<std::ptrdiff_t>(end));
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return sizes[a] < sizes[b]; });
    for (std::size_t b = 0; b < pool.size(); b += batch_size) {
      Batch batch;
      batch.indices.assign(pool.begin() + static_cast<std::ptrdiff_t>(b),
                           pool.begin() + static_cast<std::ptrdiff_t>(std::min(pool.size(), b + batch_size)));
      std::sort(batch.indices.begin(), batch.indices.end(),
                [&](std::size_t x, std::size_t y) { return position[x] < position[y]; });
      batches.push_back(std::move(batch));
    }
  }
  return batches;
}

Trainer::Trainer(TrainConfig config, std::vector<AmrInstance> train, std::vector<AmrInstance> dev,
                 std::optional<VocabPair> vocabs)
    : config_(std::move(config)),
      train_(std::move(train)),
      dev_(std::move(dev)),
      shuffle_rng_(config_.seed + 1),
      dropout_rng_(config_.seed + 2) {
  config_.validate();
  if (train_.empty()) throw UsageError("train: training corpus is empty");
  if (dev_.empty()) throw UsageError("train: dev corpus is empty");
  VocabPair v = vocabs ? std::move(*vocabs) : build_vocab(train_, config_.vocab_size);
  model_ = create_model(config_.model, std::move(v.source), std::move(v.target), config_.seed);
  if (!config_.embeddings_path.empty()) {
    auto pretrained = load_pretrained_embeddings(config_.embeddings_path, model_.source_vocab,
                                                 static_cast<std::size_t>(config_.model.encoder.embedding_dim),
                                                 config_.seed);
    model_.params.get("embed.src").value = std::move(pretrained.table);
  }
  prepared_.reserve(train_.size());
  for (const auto& inst : train_) prepared_.push_back(prepare_example(inst, model_.target_vocab));
}

double Trainer::train_epoch() {
  ++epoch_;
  std::vector<std::size_t> permutation(prepared_.size());
  std::iota(permutation.begin(), permutation.end(), std::size_t{0});
  std::shuffle(permutation.begin(), permutation.end(), shuffle_rng_);
  std::vector<std::size_t> sizes(prepared_.size());
  for (std::size_t i = 0; i < prepared_.size(); ++i) sizes[i] = prepared_[i].top_down.node_count();
  const auto batches = make_batches(permutation, sizes, static_cast<std::size_t>(config_.batch_size));

  ForwardOptions options;
  options.training = true;
  options.rng = &dropout_rng_;
  double total_loss = 0;
  std::size_t total_tokens = 0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    Tape<float> tape;
    std::vector<Expr<float>> losses;
    std::size_t tokens = 0;
    for (std::size_t index : batches[b].indices) {
      auto loss = example_loss(tape, model_.params, model_.config, prepared_[index], model_.source_vocab,
                               model_.target_vocab, options);
      losses.push_back(loss.loss);
      tokens += loss.tokens;
    }
    Expr<float> batch_loss = affine(sum(concat_cols(losses)), 1.0f / static_cast<float>(tokens), 0.0f);
    const double value = static_cast<double>(batch_loss.scalar());
    if (!std::isfinite(value)) throw TrainingDiverged(epoch_, b, adam_.step + 1);
    model_.params.zero_grad();
    tape.backward(batch_loss);
    clip_grad_norm(model_.params, config_.clip_norm);
    adam_step(model_.params, adam_, config_.lr);
    total_loss += value * static_cast<double>(tokens);
    total_tokens += tokens;
  }
  return total_loss / static_cast<double>(total_tokens);
}

double Trainer::evaluate_train_loss() {
  double total = 0;
  std::size_t tokens = 0;
  for (const auto& ex : prepared_) {
    Tape<float> tape(false);
    auto loss = example_loss(tape, model_.params, model_.config, ex, model_.source_vocab, model_.target_vocab, {});
    total += static_cast<double>(loss.loss.scalar());
    tokens += loss.tokens;
  }
  return total / static_cast<double>(tokens);
}

std::vector<std::string> Trainer::decode(const std::vector<AmrInstance>& corpus, int beam_size) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& inst : corpus) out.push_back(model_.generate(inst.graph, beam_size, config_.max_decode_length));
  return out;
}

double Trainer::dev_bleu() {
  std::vector<std::string> refs;
  refs.reserve(dev_.size());
  for (const auto& inst : dev_) refs.push_back(inst.sentence);
  return corpus_bleu(refs, decode(dev_, 1)).score;
}

void write_metrics_tsv(const std::vector<EpochRecord>& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch\ttrain_loss\tdev_bleu\tseconds\tbest_so_far\n";
  char buf[256];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d\t%.6f\t%.2f\t%.3f\t%.2f\n", r.epoch, r.train_loss, r.dev_bleu, r.seconds,
                  r.best_so_far);
    out << buf;
  }
}

bool EarlyStopping::update(double score) {
  if (score > best_) {
    best_ = score;
    drops_ = 0;
    return true;
  }
  if (score < best_) ++drops_;
  return false;
}

TrainResult Trainer::run(const std::function<void(const EpochRecord&)>& on_epoch) {
  TrainResult result;
  std::filesystem::path dir;
  if (!config_.output_dir.empty()) {
    dir = config_.output_dir;
    std::filesystem::create_directories(dir);
    model_.source_vocab.save(dir / "src_vocab.txt");
    model_.target_vocab.save(dir / "tgt_vocab.txt");
    std::ofstream(dir / "config.txt") << format_train_config(config_);
    result.checkpoint = dir / "model.ckpt";
  }

  EarlyStopping stopping(config_.patience);
  std::vector<Tensor<float>> best_values;
  for (int e = 0; e < config_.epochs; ++e) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord record;
    record.train_loss = train_epoch();
    record.epoch = epoch_;
    record.dev_bleu = dev_bleu();
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (stopping.update(record.dev_bleu)) {
      result.best_epoch = record.epoch;
      best_values.clear();
      for (const auto& p : model_.params) best_values.push_back(p.value);
      if (!dir.empty()) save_checkpoint(model_.params, result.checkpoint);
    }
    record.best_so_far = stopping.best();
    result.log.push_back(record);
    if (!dir.empty()) write_metrics_tsv(result.log, dir / "metrics.tsv");
    if (on_epoch) on_epoch(record);
    if (stopping.should_stop()) {
      result.stopped_early = true;
      break;
    }
  }
  std::size_t i = 0;
  for (auto& p : model_.params) p.value = best_values[i++];
  result.best_bleu = stopping.best();
  return result;
}

Model load_model_dir(const std::filesystem::path& checkpoint) {
  const auto dir = checkpoint.parent_path();
  const auto config_path = dir / "config.txt";
  if (!std::filesystem::exists(config_path)) throw DataError("missing " + config_path.string());
  TrainConfig config = parse_train_config(read_text_file(config_path));
  Model model{config.model, Vocabulary::load(dir / "src_vocab.txt"), Vocabulary::load(dir / "tgt_vocab.txt"), {}};
  ParameterStore<float> loaded = load_checkpoint(checkpoint);
  // Shapes and names must agree with a freshly built model.
  Model reference = create_model(config.model, model.source_vocab, model.target_vocab, 0);
  if (reference.params.names() != loaded.names()) {
    throw DataError("checkpoint " + checkpoint.string() + " does not match config.txt");
  }
  for (const auto& p : reference.params) {
    if (loaded.get(p.name).value.shape() != p.value.shape()) {
      throw DataError("checkpoint tensor " + p.name + " has shape " + loaded.get(p.name).value.shape_string() +
                      ", expected " + p.value.shape_string());
    }
  }
  model.params = std::move(loaded);
  return model;
}

std::size_t model_parameter_count(const ModelConfig& config, std::size_t source_vocab_size,
                                  std::size_t target_vocab_size) {
  ParameterStore<float> store;
  std::mt19937_64 rng(0);
  init_model_params(store, config, source_vocab_size, target_vocab_size, rng);
  return count_parameters(store);
}

}  // namespace dualgraph
