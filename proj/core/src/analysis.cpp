#include "dualgraph/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "dualgraph/bleu.hpp"
#include "dualgraph/errors.hpp"
#include "dualgraph/graph_stats.hpp"

namespace dualgraph {

std::string to_string(BucketKey key) {
  switch (key) {
    case BucketKey::graph_diameter: return "graph_diameter";
    case BucketKey::sentence_length: return "sentence_length";
    case BucketKey::max_out_degree: return "max_out_degree";
  }
  return "?";
}

BucketKey parse_bucket_key(std::string_view text) {
  if (text == "graph_diameter") return BucketKey::graph_diameter;
  if (text == "sentence_length") return BucketKey::sentence_length;
  if (text == "max_out_degree") return BucketKey::max_out_degree;
  throw UsageError("unknown bucket key '" + std::string(text) +
                   "' (expected graph_diameter, sentence_length or max_out_degree)");
}

BucketSpec BucketSpec::defaults_for(BucketKey key) {
  switch (key) {
    case BucketKey::graph_diameter: return {key, {{0, 7}, {7, 14}, {14, 20}}};
    case BucketKey::sentence_length: return {key, {{0, 20}, {20, 50}, {50, 240}}};
    case BucketKey::max_out_degree: return {key, {{0, 4}, {4, 9}, {9, 18}}};
  }
  throw UsageError("unknown bucket key");
}

void BucketSpec::validate() const {
  if (ranges.empty()) throw UsageError("bucket spec has no ranges");
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].first >= ranges[i].second) throw UsageError("bucket spec: empty range " + label(i));
    if (i > 0 && ranges[i].first < ranges[i - 1].second) throw UsageError("bucket spec: overlapping ranges");
  }
}

std::string BucketSpec::label(std::size_t bucket) const {
  const auto [low, high] = ranges.at(bucket);
  const bool last = bucket + 1 == ranges.size();
  return "[" + std::to_string(low) + "," + std::to_string(high) + (last ? "]" : ")");
}

std::size_t BucketSpec::bucket_of(int value, bool* outside) const {
  std::size_t nearest = 0;
  int best_distance = -1;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto [low, high] = ranges[i];
    const bool last = i + 1 == ranges.size();
    if (value >= low && (value < high || (last && value == high))) {
      if (outside) *outside = false;
      return i;
    }
    const int distance = value < low ? low - value : value - high;
    if (best_distance < 0 || distance < best_distance) {
      best_distance = distance;
      nearest = i;
    }
  }
  if (outside) *outside = true;
  return nearest;
}

int bucket_value(const AmrInstance& instance, BucketKey key) {
  switch (key) {
    case BucketKey::graph_diameter: return graph_diameter(instance.graph);
    case BucketKey::sentence_length: return static_cast<int>(instance.tokens().size());
    case BucketKey::max_out_degree: {
      const auto degrees = out_degrees(instance.graph);
      return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
    }
  }
  return 0;
}

BucketTable bucket_eval(const std::vector<AmrInstance>& dataset, const std::vector<std::string>& outputs,
                        const BucketSpec& spec, const std::vector<std::string>* baseline, bool cased) {
  spec.validate();
  if (outputs.size() != dataset.size()) {
    throw UsageError("bucket_eval: " + std::to_string(outputs.size()) + " outputs for " +
                     std::to_string(dataset.size()) + " examples");
  }
  if (baseline && baseline->size() != dataset.size()) {
    throw UsageError("bucket_eval: baseline has " + std::to_string(baseline->size()) + " lines for " +
                     std::to_string(dataset.size()) + " examples");
  }
  BucketTable table;
  table.key = spec.key;
  std::vector<std::vector<std::size_t>> members(spec.ranges.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int value = bucket_value(dataset[i], spec.key);
    bool outside = false;
    const std::size_t b = spec.bucket_of(value, &outside);
    if (outside) {
      const std::string& id = dataset[i].id.empty() ? std::to_string(i) : dataset[i].id;
      table.warnings.push_back("example " + id + ": " + to_string(spec.key) + " " + std::to_string(value) +
                               " is outside every bucket, assigned to " + spec.label(b));
    }
    members[b].push_back(i);
  }
  for (std::size_t b = 0; b < members.size(); ++b) {
    BucketRow row;
    row.label = spec.label(b);
    row.count = members[b].size();
    if (row.count > 0) {
      std::vector<std::string> refs, hyps, base;
      for (std::size_t i : members[b]) {
        refs.push_back(dataset[i].sentence);
        hyps.push_back(outputs[i]);
        if (baseline) base.push_back((*baseline)[i]);
      }
      row.bleu = corpus_bleu(refs, hyps, cased).score;
      if (baseline) {
        const double base_bleu = corpus_bleu(refs, base, cased).score;
        if (base_bleu > 0) row.delta_pct = (*row.bleu - base_bleu) / base_bleu * 100.0;
        else if (*row.bleu == base_bleu) row.delta_pct = 0.0;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_delta(double pct) {
  char buf[32];
  if (std::abs(pct) < 0.05) return "0.0%";
  std::snprintf(buf, sizeof buf, "%+.1f%%", pct);
  return buf;
}

void write_bucket_tsv(const BucketTable& table, std::ostream& out) {
  out << "bucket\tcount\tbleu\tdelta_pct\n";
  char buf[32];
  for (const auto& row : table.rows) {
    out << to_string(table.key) << ' ' << row.label << '\t' << row.count << '\t';
    if (row.bleu) {
      std::snprintf(buf, sizeof buf, "%.2f", *row.bleu);
      out << buf;
    } else {
      out << '-';
    }
    out << '\t' << (row.delta_pct ? format_delta(*row.delta_pct) : std::string("-")) << '\n';
  }
}

std::string stem(std::string_view token) {
  std::string s(token);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto dash = s.rfind('-');
  if (dash != std::string::npos && dash > 0 && dash + 1 < s.size() &&
      std::all_of(s.begin() + static_cast<std::ptrdiff_t>(dash + 1), s.end(),
                  [](unsigned char c) { return std::isdigit(c) != 0; })) {
    s.resize(dash);
  }
  for (std::string_view suffix : {"ing", "ed", "es", "s"}) {
    if (s.size() >= suffix.size() + 3 && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.resize(s.size() - suffix.size());
      break;
    }
  }
  return s;
}

AdequacyReport adequacy(const AmrGraph& graph, const std::vector<std::string>& sentence) {
  AdequacyReport report;
  report.output_tokens = sentence.size();
  report.concepts = graph.node_count();
  std::unordered_set<std::string> concept_stems, token_stems;
  for (const auto& node : graph.nodes()) concept_stems.insert(stem(node.label));
  for (const auto& tok : sentence) token_stems.insert(stem(tok));

  for (const auto& tok : sentence) {
    if (!concept_stems.count(stem(tok))) report.added_tokens.push_back(tok);
  }
  for (const auto& node : graph.nodes()) {
    if (!token_stems.count(stem(node.label))) report.missing_concepts.push_back(node.label);
  }
  if (sentence.empty()) {
    report.empty_output = true;
    report.added = 0;
    report.missing = 1;
    return report;
  }
  report.added = static_cast<double>(report.added_tokens.size()) / static_cast<double>(sentence.size());
  report.missing = report.concepts == 0 ? 0.0
                                        : static_cast<double>(report.missing_concepts.size()) /
                                              static_cast<double>(report.concepts);
  return report;
}

CorpusAdequacy corpus_adequacy(const std::vector<AmrInstance>& dataset, const std::vector<std::string>& outputs) {
  if (outputs.size() != dataset.size()) {
    throw UsageError("adequacy: " + std::to_string(outputs.size()) + " outputs for " +
                     std::to_string(dataset.size()) + " examples");
  }
  CorpusAdequacy out;
  std::size_t added = 0, tokens = 0, missing = 0, concepts = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const AdequacyReport r = adequacy(dataset[i].graph, tokenize(outputs[i]));
    added += r.added_tokens.size();
    tokens += r.output_tokens;
    missing += r.missing_concepts.size();
    concepts += r.concepts;
    if (r.empty_output) ++out.empty_outputs;
  }
  out.added = tokens == 0 ? 0.0 : static_cast<double>(added) / static_cast<double>(tokens);
  out.missing = concepts == 0 ? 0.0 : static_cast<double>(missing) / static_cast<double>(concepts);
  return out;
}

}  // namespace dualgraph
