#include "dualgraph/gradient_suite.hpp"

#include <random>
#include <vector>

#include "dualgraph/decoder.hpp"
#include "dualgraph/encoder.hpp"
#include "dualgraph/errors.hpp"
#include "dualgraph/finite_difference.hpp"
#include "dualgraph/model.hpp"

namespace dualgraph {

namespace {

using Store = ParameterStore<double>;

Tensor<double> random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor<double> t = Tensor<double>::matrix(rows, cols);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

// Random incoming neighborhoods over n nodes; node 0 never has any.
std::vector<std::vector<int>> random_neighbors(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::vector<int>> in(n);
  std::bernoulli_distribution edge(0.4);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && edge(rng)) in[i].push_back(static_cast<int>(j));
    }
  }
  return in;
}

Expr<double> weighted(Expr<double> out, const Tensor<double>& weights) {
  return sum(mul(out, out.tape().constant(weights)));
}

GradientSuiteResult finish(GradientTarget target, std::uint64_t seed, const LossBuilder& build, Store& store,
                           double eps) {
  const auto checks = gradient_check(build, store, eps);
  GradientSuiteResult result;
  result.target = target;
  result.seed = seed;
  result.parameters = store.scalar_count();
  for (const auto& c : checks) {
    result.excluded += c.excluded;
    if (c.relative_error >= result.max_relative_error) {
      result.max_relative_error = c.relative_error;
      result.worst_parameter = c.parameter;
    }
  }
  return result;
}

}  // namespace

std::string to_string(GradientTarget target) {
  switch (target) {
    case GradientTarget::ggnn: return "ggnn";
    case GradientTarget::gat: return "gat";
    case GradientTarget::gin: return "gin";
    case GradientTarget::bilstm: return "bilstm";
    case GradientTarget::attention: return "attention";
    case GradientTarget::copy: return "copy";
    case GradientTarget::end_to_end: return "end_to_end";
  }
  return "?";
}

GradientTarget parse_gradient_target(std::string_view text) {
  for (GradientTarget t : kGradientTargets) {
    if (to_string(t) == text) return t;
  }
  throw UsageError("unknown gradient check target '" + std::string(text) + "'");
}

GradientSuiteResult run_gradient_check(GradientTarget target, std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  Store store;
  constexpr std::size_t n = 5;
  constexpr std::size_t hidden = 4;

  switch (target) {
    case GradientTarget::ggnn:
    case GradientTarget::gat:
    case GradientTarget::gin: {
      const auto in = random_neighbors(n, rng);
      store.add("input", random_tensor(n, hidden, rng));
      const std::size_t heads = 2;
      if (target == GradientTarget::ggnn) add_ggnn_layer_params(store, "layer", hidden, rng);
      if (target == GradientTarget::gat) add_gat_layer_params(store, "layer", hidden, heads, rng);
      if (target == GradientTarget::gin) add_gin_layer_params(store, "layer", hidden, rng);
      const Tensor<double> w = random_tensor(n, hidden, rng);
      LossBuilder build = [=](Tape<double>& tape, Store& s) {
        Expr<double> x = tape.param(s.get("input"));
        Expr<double> y;
        if (target == GradientTarget::ggnn) y = ggnn_layer(x, in, s, "layer");
        if (target == GradientTarget::gat) y = gat_layer(x, in, s, "layer", heads);
        if (target == GradientTarget::gin) y = gin_layer(x, in, s, "layer");
        return weighted(y, w);
      };
      return finish(target, seed, build, store, eps);
    }
    case GradientTarget::bilstm: {
      const std::size_t input = 3;
      store.add("input", random_tensor(n, input, rng));
      add_lstm_params(store, "bilstm.fwd", input, hidden, rng);
      add_lstm_params(store, "bilstm.bwd", input, hidden, rng);
      const Tensor<double> w = random_tensor(n, 2 * hidden, rng);
      LossBuilder build = [=](Tape<double>& tape, Store& s) {
        return weighted(bilstm_encode(tape.param(s.get("input")), s), w);
      };
      return finish(target, seed, build, store, eps);
    }
    case GradientTarget::attention: {
      DecoderConfig config;
      config.hidden = 3;
      config.embedding_dim = 2;
      config.attention_dim = 4;
      const std::size_t width = 4;
      store.add("memory", random_tensor(n, width, rng));
      store.add("query", random_tensor(1, static_cast<std::size_t>(config.hidden), rng));
      std::uniform_real_distribution<double> cov(0.0, 2.0);
      Tensor<double> coverage = Tensor<double>::matrix(1, n);
      for (auto& v : coverage.values()) v = cov(rng);
      store.add("coverage", coverage);
      add_decoder_params(store, config, 6, width, rng);
      const Tensor<double> w_weights = random_tensor(1, n, rng);
      const Tensor<double> w_context = random_tensor(1, width, rng);
      LossBuilder build = [=](Tape<double>& tape, Store& s) {
        const auto memory = make_attention_memory(tape.param(s.get("memory")), s);
        const auto att = attention(tape.param(s.get("query")), memory, tape.param(s.get("coverage")), s);
        return add(weighted(att.weights, w_weights), weighted(att.context, w_context));
      };
      return finish(target, seed, build, store, eps);
    }
    case GradientTarget::copy: {
      const std::size_t vocab = 7, extended = 9;
      store.add("vocab_logits", random_tensor(1, vocab, rng, 2.0));
      store.add("attention_logits", random_tensor(1, n, rng, 2.0));
      store.add("gen_logit", random_tensor(1, 1, rng));
      std::uniform_int_distribution<int> pick_id(0, static_cast<int>(extended) - 1);
      std::vector<int> source_ids(n);
      for (auto& id : source_ids) id = pick_id(rng);
      const Tensor<double> w = random_tensor(1, extended, rng);
      LossBuilder build = [=](Tape<double>& tape, Store& s) {
        const auto dist = copy_distribution(softmax(tape.param(s.get("vocab_logits"))),
                                            softmax(tape.param(s.get("attention_logits"))),
                                            sigmoid(tape.param(s.get("gen_logit"))), source_ids, extended);
        return weighted(dist, w);
      };
      return finish(target, seed, build, store, eps);
    }
    case GradientTarget::end_to_end: {
      const AmrGraph graph = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-01 :ARG0 b :mod (f / fast)))");
      const std::vector<std::string> tokens = {"the", "boy", "wants", "to", "go", "very", "fast", "now"};
      const Vocabulary source =
          Vocabulary::from_tokens({"want-01", "boy", "go-01", ":ARG0", ":ARG1"});  // fast and :mod are UNK
      const Vocabulary target_vocab = Vocabulary::from_tokens({"the", "boy", "to", "go", "now"});
      ModelConfig config;
      const EncoderKind kinds[] = {EncoderKind::ggnn, EncoderKind::gat, EncoderKind::gin};
      config.encoder.kind = kinds[seed % 3];
      config.encoder.num_layers = 2;
      config.encoder.graph_hidden = 3;
      config.encoder.embedding_dim = 3;
      config.encoder.lstm_hidden_per_direction = 2;
      config.encoder.dropout_rate = 0.0;
      config.decoder.hidden = 3;
      config.decoder.embedding_dim = 2;
      config.decoder.attention_dim = 3;
      config.decoder.coverage_penalty = true;
      init_model_params(store, config, source.size(), target_vocab.size(), rng);
      // Zero-initialized biases would put ReLU inputs exactly on the kink.
      std::uniform_real_distribution<double> jitter(-0.2, 0.2);
      for (auto& p : store) {
        for (auto& v : p.value.values()) v += jitter(rng);
      }
      const PreparedExample example = prepare_example(graph, tokens, target_vocab);
      LossBuilder build = [=](Tape<double>& tape, Store& s) {
        return example_loss(tape, s, config, example, source, target_vocab, ForwardOptions{}).loss;
      };
      return finish(target, seed, build, store, eps);
    }
  }
  throw UsageError("unknown gradient check target");
}

}  // namespace dualgraph
