#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dualgraph {

// Clipped n-gram counts accumulated over a corpus, n = 1..4.
struct BleuStats {
  std::array<std::int64_t, 4> matches{};
  std::array<std::int64_t, 4> totals{};
  std::int64_t hypothesis_length = 0;
  std::int64_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

struct BleuResult {
  double score = 0;  // 0..100
  std::array<double, 4> precisions{};  // 0..100
  double brevity_penalty = 0;
  double ratio = 0;
  std::int64_t hypothesis_length = 0;
  std::int64_t reference_length = 0;

  // BLEU = 26.33, 60.1/33.2/20.0/12.5 (BP=1.000, ratio=1.012, hyp_len=..., ref_len=...)
  std::string summary() const;
};

BleuStats sentence_stats(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);
BleuResult bleu_from_stats(const BleuStats& stats);

// Corpus BLEU-4, single reference, whitespace-tokenized lines. Lowercases
// both sides unless `cased`. Any zero n-gram precision gives 0.
BleuResult corpus_bleu(const std::vector<std::string>& references, const std::vector<std::string>& hypotheses,
                       bool cased = false);
BleuResult corpus_bleu_tokens(const std::vector<std::vector<std::string>>& references,
                              const std::vector<std::vector<std::string>>& hypotheses);

}  // namespace dualgraph
