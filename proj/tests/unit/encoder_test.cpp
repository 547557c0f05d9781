#include <gtest/gtest.h>

#include <cmath>

#include <algorithm>
#include <random>

#include "dualgraph/encoder.hpp"
#include "dualgraph/finite_difference.hpp"
#include "dualgraph/model.hpp"
#include "dualgraph/vocab.hpp"
#include "scalar_reference.hpp"

namespace dg = dualgraph;
using Td = dg::Tensor<double>;
using Neighbors = std::vector<std::vector<int>>;

namespace {

Td random_states(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Td t = Td::matrix(n, d);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

void jitter(dg::ParameterStore<double>& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (auto& p : s)
    for (auto& v : p.value.values()) v += u(rng);
}

}  // namespace

TEST(Embeddings, LookupAndUnknown) {
  std::mt19937_64 rng(1);
  const auto g = dg::parse_penman("(a / and :op1 (b / boy) :op2 (c / boy) :mod (d / zebra))");
  const auto v = dg::levi_transform(g);
  const auto vocab = dg::Vocabulary::from_tokens({"and", "boy", ":op1", ":mod"});
  dg::ParameterStore<double> s;
  s.add_uniform("embed.src", {vocab.size(), 3}, 1.0, rng);
  dg::Tape<double> tape(false);
  const auto e = dg::embed_nodes(tape, v, vocab, s).value();
  const auto row = [&](std::size_t r) { return std::vector<double>{e(r, 0), e(r, 1), e(r, 2)}; };
  const auto table = s.get("embed.src").value;
  const auto table_row = [&](int id) {
    return std::vector<double>{table(id, 0), table(id, 1), table(id, 2)};
  };
  EXPECT_EQ(row(1), row(2));                                  // two boys
  EXPECT_EQ(row(3), table_row(dg::Vocabulary::kUnk));         // zebra
  EXPECT_EQ(row(4), table_row(vocab.id(":op1")));             // relation token
  EXPECT_EQ(row(6), table_row(vocab.id(":mod")));
}

TEST(Ggnn, ClosedUpdateGateKeepsState) {
  std::mt19937_64 rng(2);
  dg::ParameterStore<double> s;
  dg::add_ggnn_layer_params(s, "l", 3, rng);
  for (auto& v : s.get("l.z.b").value.values()) v = -1000.0;
  const Td h = random_states(1, 3, rng);
  dg::Tape<double> tape(false);
  EXPECT_EQ(dg::ggnn_layer(tape.constant(h), Neighbors{{}}, s, "l").value(), h);
}

TEST(Ggnn, SingleEdgeOnlyTargetAggregates) {
  const auto a = dg::incoming_matrix<double>(Neighbors{{}, {0}});
  EXPECT_EQ(a, Td({2, 2}, std::vector<double>{0, 0, 1, 0}));
}

TEST(Ggnn, PathMatchesReference) {
  std::mt19937_64 rng(3);
  dg::ParameterStore<double> s;
  dg::add_ggnn_layer_params(s, "l", 4, rng);
  jitter(s, rng);
  const Td h = random_states(3, 4, rng);
  const Neighbors in{{}, {0}, {1}};
  dg::Tape<double> tape(false);
  const auto out = dg::ggnn_layer(tape.constant(h), in, s, "l").value();
  EXPECT_LT(reference::max_abs_diff(reference::to_mat(out), reference::ggnn(reference::to_mat(h), in, s, "l")),
            1e-12);
}

TEST(Gat, IsolatedNodeAttendsToItself) {
  std::mt19937_64 rng(4);
  dg::ParameterStore<double> s;
  dg::add_gat_layer_params(s, "l", 3, 1, rng);
  const Td h = random_states(1, 3, rng);
  dg::Tape<double> tape(false);
  std::vector<dg::Expr<double>> att;
  const auto out = dg::gat_layer(tape.constant(h), Neighbors{{}}, s, "l", 1, &att).value();
  ASSERT_EQ(att.size(), 1u);
  EXPECT_EQ(att[0].value()(0, 0), 1.0);
  const auto wh = reference::row_times(reference::to_mat(h)[0], reference::param(s, "l.head0.W"));
  EXPECT_LT(reference::max_abs_diff(reference::to_mat(out)[0], wh), 1e-12);
}

TEST(Gat, IdenticalNeighborSplitsEvenly) {
  std::mt19937_64 rng(5);
  dg::ParameterStore<double> s;
  dg::add_gat_layer_params(s, "l", 3, 1, rng);
  Td h = random_states(2, 3, rng);
  for (std::size_t c = 0; c < 3; ++c) h(1, c) = h(0, c);
  dg::Tape<double> tape(false);
  std::vector<dg::Expr<double>> att;
  dg::gat_layer(tape.constant(h), Neighbors{{1}, {}}, s, "l", 1, &att);
  EXPECT_NEAR(att[0].value()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(att[0].value()(0, 1), 0.5, 1e-15);
}

TEST(Gat, StarMatchesReferenceAndRowsSumToOne) {
  std::mt19937_64 rng(6);
  for (std::size_t heads : {1u, 3u}) {
    dg::ParameterStore<double> s;
    dg::add_gat_layer_params(s, "l", 6, heads, rng);
    const Td h = random_states(3, 6, rng);
    const Neighbors in{{1, 2}, {0}, {0}};
    dg::Tape<double> tape(false);
    std::vector<dg::Expr<double>> att;
    const auto out = dg::gat_layer(tape.constant(h), in, s, "l", heads, &att).value();
    EXPECT_LT(reference::max_abs_diff(reference::to_mat(out),
                                      reference::gat(reference::to_mat(h), in, s, "l", heads)),
              1e-12);
    for (const auto& a : att)
      for (std::size_t i = 0; i < 3; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < 3; ++j) row += a.value()(i, j);
        EXPECT_NEAR(row, 1.0, 1e-6);
      }
  }
}

TEST(Gin, IdentityMlpKeepsIsolatedNode) {
  std::mt19937_64 rng(7);
  dg::ParameterStore<double> s;
  dg::add_gin_layer_params(s, "l", 3, rng);
  for (const char* w : {"l.mlp1.W", "l.mlp2.W"}) {
    auto& t = s.get(w).value;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) t(r, c) = r == c ? 1.0 : 0.0;
  }
  Td h = random_states(1, 3, rng);
  for (auto& v : h.values()) v = std::abs(v);  // ReLU is the identity on positives
  dg::Tape<double> tape(false);
  EXPECT_EQ(dg::gin_layer(tape.constant(h), Neighbors{{}}, s, "l").value(), h);
}

TEST(Gin, NeighborOrderDoesNotMatter) {
  std::mt19937_64 rng(8);
  dg::ParameterStore<double> s;
  dg::add_gin_layer_params(s, "l", 4, rng);
  const Td h = random_states(4, 4, rng);
  dg::Tape<double> tape(false);
  const auto a = dg::gin_layer(tape.constant(h), Neighbors{{1, 2, 3}, {}, {}, {}}, s, "l").value();
  const auto b = dg::gin_layer(tape.constant(h), Neighbors{{3, 1, 2}, {}, {}, {}}, s, "l").value();
  EXPECT_LT(reference::max_abs_diff(reference::to_mat(a), reference::to_mat(b)), 1e-14);
}

TEST(Gin, CliqueMatchesReference) {
  std::mt19937_64 rng(9);
  dg::ParameterStore<double> s;
  dg::add_gin_layer_params(s, "l", 5, rng);
  jitter(s, rng);
  const Td h = random_states(4, 5, rng);
  const Neighbors in{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  dg::Tape<double> tape(false);
  const auto out = dg::gin_layer(tape.constant(h), in, s, "l").value();
  EXPECT_LT(reference::max_abs_diff(reference::to_mat(out), reference::gin(reference::to_mat(h), in, s, "l")), 1e-12);
}

// A node without incoming edges depends only on itself.
TEST(Layers, EmptyNeighborhoodIgnoresOtherNodes) {
  std::mt19937_64 rng(10);
  dg::ParameterStore<double> s;
  dg::add_ggnn_layer_params(s, "ggnn", 4, rng);
  dg::add_gat_layer_params(s, "gat", 4, 2, rng);
  dg::add_gin_layer_params(s, "gin", 4, rng);
  const Neighbors in{{}, {0}, {0, 1}};
  Td h = random_states(3, 4, rng);
  Td h2 = h;
  for (std::size_t c = 0; c < 4; ++c) h2(1, c) += 1.0, h2(2, c) -= 2.0;
  dg::Tape<double> tape(false);
  auto first_row = [](const Td& t) { return std::vector<double>(t.data(), t.data() + t.cols()); };
  EXPECT_EQ(first_row(dg::ggnn_layer(tape.constant(h), in, s, "ggnn").value()),
            first_row(dg::ggnn_layer(tape.constant(h2), in, s, "ggnn").value()));
  EXPECT_EQ(first_row(dg::gat_layer(tape.constant(h), in, s, "gat", 2).value()),
            first_row(dg::gat_layer(tape.constant(h2), in, s, "gat", 2).value()));
  EXPECT_EQ(first_row(dg::gin_layer(tape.constant(h), in, s, "gin").value()),
            first_row(dg::gin_layer(tape.constant(h2), in, s, "gin").value()));
}

TEST(BiLstm, LengthOneSeesSameInput) {
  std::mt19937_64 rng(11);
  dg::ParameterStore<double> s;
  dg::add_lstm_params(s, "b.fwd", 3, 2, rng);
  dg::add_lstm_params(s, "b.bwd", 3, 2, rng);
  const Td x = random_states(1, 3, rng);
  dg::Tape<double> tape(false);
  const auto out = dg::bilstm_encode(tape.constant(x), s, "b").value();
  const auto xr = reference::to_mat(x)[0];
  const reference::LstmState zero{{0, 0}, {0, 0}};
  const auto f = reference::lstm_cell(xr, zero, s, "b.fwd");
  const auto b = reference::lstm_cell(xr, zero, s, "b.bwd");
  EXPECT_LT(reference::max_abs_diff(reference::to_mat(out)[0], reference::concat(f.h, b.h)), 1e-14);
}

TEST(BiLstm, ReversalSwapsDirections) {
  std::mt19937_64 rng(12);
  dg::ParameterStore<double> s;
  dg::add_lstm_params(s, "b.fwd", 3, 2, rng);
  // Backward direction shares the forward weights so the roles can swap.
  for (const auto& p : std::vector<std::string>{"Wx", "Wh", "b"}) s.add("b.bwd." + p, s.get("b.fwd." + p).value);
  const Td x = random_states(4, 3, rng);
  Td rev = Td::matrix(4, 3);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) rev(r, c) = x(3 - r, c);
  dg::Tape<double> tape(false);
  const auto a = dg::bilstm_encode(tape.constant(x), s, "b").value();
  const auto b = dg::bilstm_encode(tape.constant(rev), s, "b").value();
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(b(r, c), a(3 - r, 2 + c));
}

TEST(BiLstm, MatchesReference) {
  std::mt19937_64 rng(13);
  dg::ParameterStore<double> s;
  dg::add_lstm_params(s, "b.fwd", 3, 4, rng);
  dg::add_lstm_params(s, "b.bwd", 3, 4, rng);
  const Td x = random_states(3, 3, rng);
  dg::Tape<double> tape(false);
  const auto out = dg::bilstm_encode(tape.constant(x), s, "b").value();
  EXPECT_LT(reference::max_abs_diff(reference::to_mat(out), reference::bilstm(reference::to_mat(x), s, "b")), 1e-12);
}

TEST(DualEncoder, SingleNodeWithSharedParameters) {
  std::mt19937_64 rng(14);
  auto cfg = dg::EncoderConfig::defaults_for(dg::EncoderKind::ggnn);
  cfg.num_layers = 2;
  cfg.graph_hidden = 4;
  cfg.embedding_dim = 3;
  cfg.dropout_rate = 0;
  dg::ParameterStore<double> s;
  dg::add_graph_encoder_params(s, "shared", cfg, rng);
  const auto td = dg::levi_transform(dg::parse_penman("(w / want-01)"));
  const auto bu = dg::reverse_view(td);
  dg::Tape<double> tape(false);
  const auto r = dg::dual_encode(tape.constant(random_states(1, 3, rng)), td, bu, cfg, dg::AblationMode::dual, s,
                                 {}, dg::EncoderPrefixes{"shared", "shared"});
  EXPECT_EQ(r.top_down.value(), r.bottom_up.value());
}

TEST(DualEncoder, RootAndLeafAsymmetry) {
  std::mt19937_64 rng(15);
  auto cfg = dg::EncoderConfig::defaults_for(dg::EncoderKind::ggnn);
  cfg.graph_hidden = 4;
  cfg.embedding_dim = 4;
  dg::ParameterStore<double> s;
  dg::add_graph_encoder_params(s, "ge_t", cfg, rng);
  dg::add_graph_encoder_params(s, "ge_b", cfg, rng);
  const auto td = dg::levi_transform(dg::parse_penman("(a / x :r (b / y :r (c / z)))"));
  const auto bu = dg::reverse_view(td);
  const Td e = random_states(td.node_count(), 4, rng);
  Td e2 = e;
  // Perturb everything except a (id 0) and c (id 2).
  for (std::size_t c = 0; c < 4; ++c) e2(1, c) += 1, e2(3, c) += 1, e2(4, c) += 1;
  dg::Tape<double> tape(false);
  const auto r1 = dg::dual_encode(tape.constant(e), td, bu, cfg, dg::AblationMode::dual, s, {});
  const auto r2 = dg::dual_encode(tape.constant(e2), td, bu, cfg, dg::AblationMode::dual, s, {});
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(r1.top_down.value()(0, c), r2.top_down.value()(0, c));
    EXPECT_EQ(r1.bottom_up.value()(2, c), r2.bottom_up.value()(2, c));
  }
  double td_change = 0, bu_change = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    td_change += std::abs(r1.top_down.value()(2, c) - r2.top_down.value()(2, c));
    bu_change += std::abs(r1.bottom_up.value()(0, c) - r2.bottom_up.value()(0, c));
  }
  EXPECT_GT(td_change, 0.0);
  EXPECT_GT(bu_change, 0.0);
}

TEST(DualEncoder, SwappingViewsAndParametersSwapsStates) {
  std::mt19937_64 rng(16);
  auto cfg = dg::EncoderConfig::defaults_for(dg::EncoderKind::gat);
  cfg.num_layers = 2;
  cfg.graph_hidden = 4;
  cfg.embedding_dim = 3;
  cfg.gat_heads = 2;
  dg::ParameterStore<double> s;
  dg::add_graph_encoder_params(s, "ge_t", cfg, rng);
  dg::add_graph_encoder_params(s, "ge_b", cfg, rng);
  auto td = dg::levi_transform(dg::parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-01 :ARG0 b))"));
  auto bu = dg::reverse_view(td);
  const Td e = random_states(td.node_count(), 3, rng);
  dg::Tape<double> tape(false);
  const auto a = dg::dual_encode(tape.constant(e), td, bu, cfg, dg::AblationMode::dual, s, {});
  const auto b = dg::dual_encode(tape.constant(e), bu, td, cfg, dg::AblationMode::dual, s, {},
                                 dg::EncoderPrefixes{"ge_b", "ge_t"});
  EXPECT_EQ(a.top_down.value(), b.bottom_up.value());
  EXPECT_EQ(a.bottom_up.value(), b.top_down.value());
}

TEST(DualEncoder, FusedSlicesRecoverParts) {
  const auto cfg = dg::EncoderConfig::defaults_for(dg::EncoderKind::ggnn);
  EXPECT_EQ(dg::fused_width(cfg, dg::AblationMode::dual), 900u);
  EXPECT_EQ(dg::fused_width(cfg, dg::AblationMode::td_only), 600u);
  EXPECT_EQ(dg::fused_width(cfg, dg::AblationMode::bilstm_only), 300u);

  std::mt19937_64 rng(17);
  auto small = cfg;
  small.num_layers = 1;
  small.graph_hidden = 3;
  small.embedding_dim = 2;
  dg::ParameterStore<double> s;
  dg::add_graph_encoder_params(s, "ge_t", small, rng);
  dg::add_graph_encoder_params(s, "ge_b", small, rng);
  const auto td = dg::levi_transform(dg::parse_penman("(s / semester :mod (t / that))"));
  dg::Tape<double> tape(false);
  const auto r =
      dg::dual_encode(tape.constant(random_states(3, 2, rng)), td, dg::reverse_view(td), small, dg::AblationMode::dual, s, {});
  ASSERT_EQ(r.fused.cols(), 8u);
  EXPECT_EQ(dg::slice_cols(r.fused, 0, 3).value(), r.top_down.value());
  EXPECT_EQ(dg::slice_cols(r.fused, 3, 3).value(), r.bottom_up.value());
  EXPECT_EQ(dg::slice_cols(r.fused, 6, 2).value(), r.embeddings.value());
}

TEST(DualEncoder, FullEncoderGradientOnFourNodeGraph) {
  std::mt19937_64 rng(18);
  auto cfg = dg::EncoderConfig::defaults_for(dg::EncoderKind::ggnn);
  cfg.num_layers = 2;
  cfg.graph_hidden = 3;
  cfg.embedding_dim = 3;
  cfg.lstm_hidden_per_direction = 2;
  cfg.dropout_rate = 0;
  const auto vocab = dg::Vocabulary::from_tokens({"a", "b", ":r"});
  dg::ParameterStore<double> s;
  dg::add_encoder_params(s, cfg, dg::AblationMode::dual, vocab.size(), rng);
  jitter(s, rng);
  const auto td = dg::levi_transform(dg::parse_penman("(x / a :r (y / b :r (z / c)) :r y)"));
  ASSERT_EQ(td.concept_count, 3u);
  const auto bu = dg::reverse_view(td);
  const auto order = dg::dfs_order(td);
  Td weights = random_states(td.node_count(), 4, rng);
  const dg::LossBuilder build = [&](dg::Tape<double>& t, dg::ParameterStore<double>& p) {
    const auto e = dg::embed_nodes(t, td, vocab, p);
    const auto nodes = dg::dual_encode(e, td, bu, cfg, dg::AblationMode::dual, p, {});
    const auto h = dg::bilstm_encode(dg::select_rows(nodes.fused, order), p);
    return dg::sum(h * t.constant(weights));
  };
  EXPECT_LT(dg::max_relative_error(dg::gradient_check(build, s, 1e-3)), 1e-3);
}

TEST(DualEncoder, AblationParameterSets) {
  std::mt19937_64 rng(19);
  auto cfg = dg::EncoderConfig::defaults_for(dg::EncoderKind::gin);
  cfg.graph_hidden = 4;
  cfg.embedding_dim = 4;
  cfg.lstm_hidden_per_direction = 3;
  for (auto mode : {dg::AblationMode::bilstm_only, dg::AblationMode::td_only, dg::AblationMode::bu_only,
                    dg::AblationMode::dual}) {
    dg::ParameterStore<float> s;
    dg::add_encoder_params(s, cfg, mode, 10, rng);
    const bool t = !s.names_with_prefix("ge_t.").empty(), b = !s.names_with_prefix("ge_b.").empty();
    EXPECT_EQ(t, mode == dg::AblationMode::td_only || mode == dg::AblationMode::dual);
    EXPECT_EQ(b, mode == dg::AblationMode::bu_only || mode == dg::AblationMode::dual);
    EXPECT_EQ(s.get("bilstm.fwd.Wx").value.rows(), dg::fused_width(cfg, mode));
  }
  EXPECT_EQ(dg::parse_ablation_mode("td_only"), dg::AblationMode::td_only);
  EXPECT_EQ(dg::to_string(dg::EncoderKind::gat), "gat");
  EXPECT_EQ(dg::EncoderConfig::defaults_for(dg::EncoderKind::gin).num_layers, 2);
  EXPECT_EQ(dg::EncoderConfig::defaults_for(dg::EncoderKind::gat).num_layers, 5);
}
