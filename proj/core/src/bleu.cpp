#include "dualgraph/bleu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "dualgraph/corpus.hpp"
#include "dualgraph/errors.hpp"

namespace dualgraph {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::int64_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::vector<std::string> prepare(const std::string& line, bool cased) {
  std::string text = line;
  if (!cased) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  return tokenize(text);
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats sentence_stats(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis) {
  BleuStats stats;
  stats.hypothesis_length = static_cast<std::int64_t>(hypothesis.size());
  stats.reference_length = static_cast<std::int64_t>(reference.size());
  for (std::size_t n = 1; n <= 4; ++n) {
    const NgramCounts ref = count_ngrams(reference, n);
    const NgramCounts hyp = count_ngrams(hypothesis, n);
    std::int64_t matched = 0;
    for (const auto& [gram, count] : hyp) {
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    stats.matches[n - 1] = matched;
    stats.totals[n - 1] = std::max<std::int64_t>(0, static_cast<std::int64_t>(hypothesis.size()) -
                                                        static_cast<std::int64_t>(n) + 1);
  }
  return stats;
}

BleuResult bleu_from_stats(const BleuStats& stats) {
  BleuResult result;
  result.hypothesis_length = stats.hypothesis_length;
  result.reference_length = stats.reference_length;
  bool any_zero = false;
  double log_sum = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (stats.totals[n] == 0 || stats.matches[n] == 0) {
      any_zero = true;
      result.precisions[n] = 0;
      continue;
    }
    const double p = static_cast<double>(stats.matches[n]) / static_cast<double>(stats.totals[n]);
    result.precisions[n] = 100.0 * p;
    log_sum += std::log(p);
  }
  if (stats.reference_length > 0) {
    result.ratio = static_cast<double>(stats.hypothesis_length) / static_cast<double>(stats.reference_length);
  }
  if (stats.hypothesis_length == 0) {
    result.brevity_penalty = 0;
  } else if (stats.hypothesis_length < stats.reference_length) {
    result.brevity_penalty = std::exp(1.0 - static_cast<double>(stats.reference_length) /
                                                static_cast<double>(stats.hypothesis_length));
  } else {
    result.brevity_penalty = 1.0;
  }
  result.score = any_zero ? 0.0 : 100.0 * result.brevity_penalty * std::exp(log_sum / 4.0);
  return result;
}

std::string BleuResult::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "BLEU = %.2f, %.1f/%.1f/%.1f/%.1f (BP=%.3f, ratio=%.3f, hyp_len=%lld, ref_len=%lld)",
                score, precisions[0], precisions[1], precisions[2], precisions[3], brevity_penalty, ratio,
                static_cast<long long>(hypothesis_length), static_cast<long long>(reference_length));
  return buf;
}

BleuResult corpus_bleu_tokens(const std::vector<std::vector<std::string>>& references,
                              const std::vector<std::vector<std::string>>& hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw UsageError("bleu: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                     std::to_string(references.size()) + " references");
  }
  BleuStats total;
  for (std::size_t i = 0; i < references.size(); ++i) total += sentence_stats(references[i], hypotheses[i]);
  return bleu_from_stats(total);
}

BleuResult corpus_bleu(const std::vector<std::string>& references, const std::vector<std::string>& hypotheses,
                       bool cased) {
  if (references.size() != hypotheses.size()) {
    throw UsageError("bleu: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                     std::to_string(references.size()) + " references");
  }
  std::vector<std::vector<std::string>> refs, hyps;
  refs.reserve(references.size());
  hyps.reserve(hypotheses.size());
  for (const auto& line : references) refs.push_back(prepare(line, cased));
  for (const auto& line : hypotheses) hyps.push_back(prepare(line, cased));
  return corpus_bleu_tokens(refs, hyps);
}

}  // namespace dualgraph
