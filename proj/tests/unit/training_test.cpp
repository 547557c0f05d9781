#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dualgraph/checkpoint.hpp"
#include "dualgraph/embeddings.hpp"
#include "dualgraph/errors.hpp"
#include "dualgraph/training.hpp"
#include "test_paths.hpp"

namespace dg = dualgraph;
using testing_support::data_dir;
using testing_support::golden_dir;

namespace {

std::vector<dg::AmrInstance> corpus_of(const std::string& text) { return dg::parse_amr_corpus(text); }

dg::TrainConfig tiny_train_config() {
  dg::TrainConfig c;
  auto& m = c.model;
  m = dg::ModelConfig::defaults_for(dg::EncoderKind::ggnn);
  m.encoder.num_layers = 2;
  m.encoder.graph_hidden = 6;
  m.encoder.embedding_dim = 5;
  m.encoder.lstm_hidden_per_direction = 4;
  m.encoder.dropout_rate = 0.3;
  m.decoder.hidden = 8;
  m.decoder.embedding_dim = 5;
  m.decoder.attention_dim = 6;
  c.batch_size = 4;
  c.seed = 3;
  c.max_decode_length = 20;
  return c;
}

// Closed-form scalar count of one graph encoder (projection plus layers).
std::size_t graph_encoder_tally(const dg::EncoderConfig& c) {
  const std::size_t h = static_cast<std::size_t>(c.graph_hidden), e = static_cast<std::size_t>(c.embedding_dim);
  std::size_t per_layer = 0;
  switch (c.kind) {
    case dg::EncoderKind::ggnn:
      per_layer = h * h + 3 * (2 * h * h + h);  // message matrix, three GRU gates
      break;
    case dg::EncoderKind::gat: {
      const std::size_t heads = static_cast<std::size_t>(c.gat_heads), w = h / heads;
      per_layer = heads * (h * w + 2 * w);
      break;
    }
    case dg::EncoderKind::gin:
      per_layer = 2 * (h * h + h);
      break;
  }
  return e * h + h + static_cast<std::size_t>(c.num_layers) * per_layer;
}

}  // namespace

TEST(Vocab, FiveDistinctTokens) {
  const auto v = dg::build_vocab(corpus_of("# ::snt a b c d e\n(x / y)\n"));
  EXPECT_EQ(v.target.size(), 9u);
  EXPECT_EQ(v.target.token(0), "<pad>");
  EXPECT_EQ(v.target.token(3), "</s>");
  EXPECT_EQ(v.source.size(), 5u);
}

TEST(Vocab, TiesBrokenLexicographically) {
  const auto v = dg::build_frequency_vocab({{"zeta", "alpha", "mid", "mid"}}, 100);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"<pad>", "<unk>", "<s>", "</s>", "mid", "alpha", "zeta"}));
  const auto cut = dg::build_frequency_vocab({{"zeta", "alpha", "mid", "mid"}}, 2);
  EXPECT_EQ(cut.size(), 6u);
  EXPECT_FALSE(cut.contains("zeta"));
  EXPECT_EQ(cut.id("zeta"), dg::Vocabulary::kUnk);
}

TEST(Vocab, MiniCorpusMatchesIndependentRecount) {
  const auto v = dg::build_vocab(dg::read_amr_corpus(data_dir() / "mini.amr"));
  EXPECT_EQ(v.source.tokens(), dg::read_lines(golden_dir() / "src_vocab.txt"));
  EXPECT_EQ(v.target.tokens(), dg::read_lines(golden_dir() / "tgt_vocab.txt"));
}

TEST(Vocab, SaveLoadAndErrors) {
  testing_support::TempDir tmp;
  const auto v = dg::Vocabulary::from_tokens({"x", ":ARG0"});
  v.save(tmp.path() / "v.txt");
  EXPECT_EQ(dg::Vocabulary::load(tmp.path() / "v.txt"), v);
  EXPECT_THROW(dg::Vocabulary::from_tokens({"x", "x"}), dg::DataError);
  EXPECT_THROW(dg::Vocabulary::from_tokens({"<unk>"}), dg::DataError);
  EXPECT_THROW(dg::build_vocab({}), dg::UsageError);
}

TEST(PretrainedEmbeddings, EmptyFile) {
  const auto vocab = dg::Vocabulary::from_tokens({"the", "cat"});
  const auto e = dg::parse_pretrained_embeddings("", vocab, 3, 7);
  EXPECT_EQ(e.found, 0u);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(e.table(dg::Vocabulary::kPad, c), 0.0f);
  for (std::size_t r = 1; r < vocab.size(); ++r) {
    bool nonzero = false;
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_LE(std::abs(e.table(r, c)), 0.1f);
      nonzero |= e.table(r, c) != 0.0f;
    }
    EXPECT_TRUE(nonzero);
  }
  EXPECT_EQ(dg::parse_pretrained_embeddings("", vocab, 3, 7).table, e.table);
}

TEST(PretrainedEmbeddings, RowCopiedVerbatim) {
  const auto vocab = dg::Vocabulary::from_tokens({"the", "cat"});
  const auto e = dg::parse_pretrained_embeddings("the 0.1 0.2 -0.3\ndog 1 2 3\nthe 9 9 9\n", vocab, 3, 1);
  const int id = vocab.id("the");
  EXPECT_EQ(e.table(id, 0), 0.1f);
  EXPECT_EQ(e.table(id, 1), 0.2f);
  EXPECT_EQ(e.table(id, 2), -0.3f);
  EXPECT_EQ(e.found, 1u);
}

TEST(PretrainedEmbeddings, CoverageMatchesSetIntersection) {
  const auto corpus = dg::read_amr_corpus(data_dir() / "mini.amr");
  const auto vocab = dg::build_vocab(corpus).source;
  std::mt19937_64 rng(4);
  std::ostringstream file;
  std::set<std::string> written;
  std::bernoulli_distribution keep(0.5);
  for (const auto& t : vocab.tokens())
    if (keep(rng)) {
      file << t << " 0.5 0.25\n";
      written.insert(t);
    }
  file << "unrelated 1 1\n";
  written.insert("unrelated");
  std::set<std::string> in_vocab(vocab.tokens().begin(), vocab.tokens().end());
  in_vocab.erase("<pad>");
  std::size_t expected = 0;
  for (const auto& t : written) expected += in_vocab.count(t);
  const auto e = dg::parse_pretrained_embeddings(file.str(), vocab, 2, 1);
  EXPECT_EQ(e.found, expected);
  EXPECT_DOUBLE_EQ(e.coverage, static_cast<double>(expected) / static_cast<double>(vocab.size()));
}

TEST(PretrainedEmbeddings, MalformedRowNamesLine) {
  const auto vocab = dg::Vocabulary::from_tokens({"a"});
  try {
    dg::parse_pretrained_embeddings("a 1 2\nb 1\n", vocab, 2, 1);
    FAIL();
  } catch (const dg::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(dg::parse_pretrained_embeddings("a 1 x\n", vocab, 2, 1), dg::DataError);
}

TEST(Batching, PreservesPermutationOrderInsideBatches) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 80, batch = 1 + rng() % 7;
    std::vector<std::size_t> perm(n), sizes(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto& s : sizes) s = 1 + rng() % 30;
    const auto batches = dg::make_batches(perm, sizes, batch);
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) position[perm[i]] = i;
    std::multiset<std::size_t> seen;
    for (const auto& b : batches) {
      ASSERT_FALSE(b.indices.empty());
      ASSERT_LE(b.indices.size(), batch);
      for (std::size_t k = 1; k < b.indices.size(); ++k)
        ASSERT_LT(position[b.indices[k - 1]], position[b.indices[k]]);
      seen.insert(b.indices.begin(), b.indices.end());
    }
    ASSERT_EQ(seen, std::multiset<std::size_t>(perm.begin(), perm.end()));
  }
}

TEST(Batching, GroupsSimilarSizes) {
  const std::vector<std::size_t> perm = {0, 1, 2, 3, 4, 5};
  const std::vector<std::size_t> sizes = {9, 1, 8, 2, 7, 3};
  const auto batches = dg::make_batches(perm, sizes, 2);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].indices, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(batches[1].indices, (std::vector<std::size_t>{4, 5}));
  EXPECT_EQ(batches[2].indices, (std::vector<std::size_t>{0, 2}));
}

TEST(Trainer, IdenticalSeedsGiveIdenticalFirstEpoch) {
  const auto corpus = dg::read_amr_corpus(data_dir() / "mini.amr");
  dg::Trainer a(tiny_train_config(), corpus, corpus), b(tiny_train_config(), corpus, corpus);
  const double la = a.train_epoch(), lb = b.train_epoch();
  EXPECT_EQ(la, lb);
  EXPECT_TRUE(std::isfinite(la));
  EXPECT_EQ(dg::serialize_checkpoint(a.model().params), dg::serialize_checkpoint(b.model().params));
  auto other = tiny_train_config();
  other.seed = 4;
  dg::Trainer c(other, corpus, corpus);
  EXPECT_NE(c.train_epoch(), la);
}

TEST(Trainer, LossDecreasesOnTinyCorpus) {
  const auto corpus = dg::read_amr_corpus(data_dir() / "mini.amr");
  auto cfg = tiny_train_config();
  cfg.model.encoder.dropout_rate = 0;
  cfg.lr = 0.01;
  dg::Trainer t(cfg, corpus, corpus);
  const double before = t.evaluate_train_loss();
  for (int e = 0; e < 40; ++e) t.train_epoch();
  EXPECT_LT(t.evaluate_train_loss(), before * 0.7);
}

TEST(EarlyStopping, PatienceZeroStopsAtFirstDrop) {
  dg::EarlyStopping s(0);
  EXPECT_TRUE(s.update(10));
  EXPECT_FALSE(s.should_stop());
  EXPECT_FALSE(s.update(10));  // tie
  EXPECT_FALSE(s.should_stop());
  EXPECT_TRUE(s.update(12));
  EXPECT_FALSE(s.update(11.9));
  EXPECT_TRUE(s.should_stop());
}

TEST(EarlyStopping, ImprovementResetsDrops) {
  dg::EarlyStopping s(2);
  s.update(5);
  s.update(4);
  s.update(3);
  EXPECT_EQ(s.drops(), 2);
  EXPECT_FALSE(s.should_stop());
  s.update(6);
  EXPECT_EQ(s.drops(), 0);
  s.update(1), s.update(1), s.update(1);
  EXPECT_TRUE(s.should_stop());
  EXPECT_EQ(s.best(), 6);
}

TEST(Trainer, RunWritesArtifactsAndHonorsPatience) {
  testing_support::TempDir tmp;
  const auto corpus = dg::read_amr_corpus(data_dir() / "mini.amr");
  auto cfg = tiny_train_config();
  cfg.patience = 0;
  cfg.epochs = 6;
  cfg.output_dir = (tmp.path() / "out").string();
  dg::Trainer t(cfg, corpus, corpus);
  std::vector<dg::EpochRecord> seen;
  const auto result = t.run([&](const dg::EpochRecord& r) { seen.push_back(r); });
  ASSERT_EQ(seen.size(), result.log.size());
  // Replay the log: training ends exactly at the first drop below the best.
  double best = -INFINITY;
  for (std::size_t i = 0; i < result.log.size(); ++i) {
    const bool drop = result.log[i].dev_bleu < best;
    best = std::max(best, result.log[i].dev_bleu);
    EXPECT_EQ(result.log[i].best_so_far, best);
    if (drop) {
      EXPECT_EQ(i + 1, result.log.size());
      EXPECT_TRUE(result.stopped_early);
    }
  }
  if (!result.stopped_early) EXPECT_EQ(result.log.size(), 6u);
  EXPECT_EQ(result.best_bleu, best);
  for (const char* f : {"model.ckpt", "config.txt", "src_vocab.txt", "tgt_vocab.txt", "metrics.tsv"})
    EXPECT_TRUE(std::filesystem::exists(tmp.path() / "out" / f)) << f;
  const auto metrics = dg::read_lines(tmp.path() / "out" / "metrics.tsv");
  EXPECT_EQ(metrics[0], "epoch\ttrain_loss\tdev_bleu\tseconds\tbest_so_far");
  EXPECT_EQ(metrics.size(), result.log.size() + 1);
  // The checkpoint holds the best epoch, which the model now holds too.
  EXPECT_EQ(dg::serialize_checkpoint(dg::load_checkpoint(result.checkpoint)),
            dg::serialize_checkpoint(t.model().params));
  const auto loaded = dg::load_model_dir(result.checkpoint);
  EXPECT_EQ(loaded.source_vocab, t.model().source_vocab);
}

TEST(Ablation, BilstmOnlyHasNoGraphEncoder) {
  testing_support::TempDir tmp;
  const auto corpus = dg::read_amr_corpus(data_dir() / "mini.amr");
  auto cfg = tiny_train_config();
  cfg.model.ablation = dg::AblationMode::bilstm_only;
  cfg.epochs = 1;
  cfg.output_dir = tmp.path().string();
  dg::Trainer t(cfg, corpus, corpus);
  const auto result = t.run();
  for (const auto& name : dg::load_checkpoint(result.checkpoint).names()) {
    EXPECT_FALSE(name.starts_with("ge_t.")) << name;
    EXPECT_FALSE(name.starts_with("ge_b.")) << name;
  }
}

TEST(Ablation, ParameterDifferenceMatchesClosedForm) {
  for (auto kind : {dg::EncoderKind::ggnn, dg::EncoderKind::gat, dg::EncoderKind::gin}) {
    auto cfg = dg::ModelConfig::defaults_for(kind);
    if (kind == dg::EncoderKind::gat) cfg.encoder.gat_heads = 3;
    std::map<dg::AblationMode, std::size_t> count;
    for (auto mode : dg::kAblationOrder) {
      auto c = cfg;
      c.ablation = mode;
      count[mode] = dg::model_parameter_count(c, 1234, 567);
    }
    const std::size_t ge = graph_encoder_tally(cfg.encoder);
    // Each graph view also widens the BiLSTM input by graph_hidden columns
    // in both directions' 4-gate input matrices.
    const std::size_t lstm_in = 2 * 4 * static_cast<std::size_t>(cfg.encoder.lstm_hidden_per_direction) *
                                static_cast<std::size_t>(cfg.encoder.graph_hidden);
    EXPECT_EQ(count[dg::AblationMode::dual] - count[dg::AblationMode::bilstm_only], 2 * (ge + lstm_in));
    EXPECT_EQ(count[dg::AblationMode::td_only], count[dg::AblationMode::bu_only]);

    std::mt19937_64 rng(1);
    dg::ParameterStore<float> store;
    auto small = cfg;
    small.encoder.graph_hidden = 6;
    small.encoder.embedding_dim = 4;
    dg::init_model_params(store, small, 10, 10, rng);
    std::size_t ge_scalars = 0;
    for (const auto& p : store)
      if (p.name.starts_with("ge_")) ge_scalars += p.value.size();
    EXPECT_EQ(ge_scalars, 2 * graph_encoder_tally(small.encoder));
  }
}

TEST(TrainConfig, ParseAndFormatRoundTrip) {
  const auto c = dg::parse_train_config(
      "# comment\nencoder = gat\nlayers = 3\ngat_heads = 2\nablation = td_only\nlr = 0.005\nbatch_size = 7\n"
      "patience = 1\ntrain = a.amr\n");
  EXPECT_EQ(c.model.encoder.kind, dg::EncoderKind::gat);
  EXPECT_EQ(c.model.encoder.num_layers, 3);
  EXPECT_EQ(c.model.encoder.gat_heads, 2);
  EXPECT_EQ(c.model.ablation, dg::AblationMode::td_only);
  EXPECT_EQ(c.lr, 0.005);
  EXPECT_EQ(c.batch_size, 7);
  EXPECT_EQ(c.epochs, 30);
  EXPECT_EQ(c.train_path, "a.amr");
  const auto again = dg::parse_train_config(dg::format_train_config(c));
  EXPECT_EQ(dg::format_train_config(again), dg::format_train_config(c));
  EXPECT_THROW(dg::parse_train_config("bogus = 1\n"), dg::UsageError);
  EXPECT_THROW(dg::parse_train_config("epochs = -2\n"), dg::UsageError);
  EXPECT_THROW(dg::parse_train_config("epochs = many\n"), dg::UsageError);
}

TEST(TrainConfig, Defaults) {
  const dg::TrainConfig c;
  EXPECT_EQ(c.epochs, 30);
  EXPECT_EQ(c.batch_size, 20);
  EXPECT_EQ(c.lr, 0.001);
  EXPECT_EQ(c.vocab_size, 20000u);
  EXPECT_EQ(c.beam_size, 5);
  EXPECT_EQ(c.model.decoder.hidden, 900);
  EXPECT_EQ(c.model.memory_width(), 900u);
  EXPECT_DOUBLE_EQ(c.model.encoder.dropout_rate, 0.3);
}
