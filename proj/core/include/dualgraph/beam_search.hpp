#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dualgraph/errors.hpp"

namespace dualgraph {

struct BeamOptions {
  int beam_size = 5;
  int max_len = 250;
  int bos = 2;
  int eos = 3;
};

template <typename State>
struct Hypothesis {
  std::vector<int> tokens;  // emitted so far, EOS included once finished
  double score = 0;         // sum of log-probabilities
  State state;
  bool finished = false;

  double normalized_score() const {
    return tokens.empty() ? score : score / static_cast<double>(tokens.size());
  }
};

// Beam search over `step(state, previous_token) -> {log_probs, next_state}`.
// Each live hypothesis proposes its 2k best tokens; candidates are ranked
// by score and EOS candidates are set aside as finished until either k
// hypotheses finished or max_len steps ran. The finished hypothesis with
// the best length-normalized score wins; without any, the best live one.
// Ties go to the lower token id.
template <typename State, typename Step>
Hypothesis<State> beam_search(State initial, Step&& step, const BeamOptions& options) {
  if (options.beam_size < 1) throw UsageError("beam_search: beam_size must be at least 1");
  if (options.max_len < 1) throw UsageError("beam_search: max_len must be at least 1");
  const std::size_t k = static_cast<std::size_t>(options.beam_size);

  std::vector<Hypothesis<State>> live;
  live.push_back(Hypothesis<State>{{}, 0.0, std::move(initial), false});
  std::vector<Hypothesis<State>> finished;

  for (int t = 0; t < options.max_len && !live.empty() && finished.size() < k; ++t) {
    std::vector<Hypothesis<State>> candidates;
    for (const auto& hyp : live) {
      const int previous = hyp.tokens.empty() ? options.bos : hyp.tokens.back();
      auto [log_probs, next] = step(hyp.state, previous);
      std::vector<int> ids(log_probs.size());
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
      const std::size_t keep = std::min(ids.size(), 2 * k);
      std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(keep), ids.end(),
                        [&](int a, int b) {
                          if (log_probs[a] != log_probs[b]) return log_probs[a] > log_probs[b];
                          return a < b;
                        });
      for (std::size_t i = 0; i < keep; ++i) {
        Hypothesis<State> c{hyp.tokens, hyp.score + log_probs[ids[i]], next, false};
        c.tokens.push_back(ids[i]);
        candidates.push_back(std::move(c));
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    live.clear();
    for (auto& c : candidates) {
      if (c.tokens.back() == options.eos) {
        c.finished = true;
        finished.push_back(std::move(c));
      } else {
        live.push_back(std::move(c));
      }
      if (live.size() == k || finished.size() == k) break;
    }
  }

  auto& pool = finished.empty() ? live : finished;
  if (pool.empty()) throw UsageError("beam_search: no hypotheses survived");
  auto best = std::max_element(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    return a.normalized_score() < b.normalized_score();
  });
  return *best;
}

}  // namespace dualgraph
