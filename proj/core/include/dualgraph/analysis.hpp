#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dualgraph/amr_graph.hpp"
#include "dualgraph/corpus.hpp"

namespace dualgraph {

enum class BucketKey { graph_diameter, sentence_length, max_out_degree };

std::string to_string(BucketKey key);
BucketKey parse_bucket_key(std::string_view text);

// Half-open [low, high) intervals except the last, which is closed.
struct BucketSpec {
  BucketKey key = BucketKey::graph_diameter;
  std::vector<std::pair<int, int>> ranges;

  // diameter [0,7) [7,14) [14,20]; sentence length [0,20) [20,50) [50,240];
  // out-degree [0,4) [4,9) [9,18].
  static BucketSpec defaults_for(BucketKey key);
  void validate() const;
  std::string label(std::size_t bucket) const;
  // Bucket of `value`; values outside every range go to the nearest one
  // and set *outside.
  std::size_t bucket_of(int value, bool* outside = nullptr) const;
};

int bucket_value(const AmrInstance& instance, BucketKey key);

struct BucketRow {
  std::string label;
  std::size_t count = 0;
  std::optional<double> bleu;
  std::optional<double> delta_pct;  // versus the baseline outputs
};

struct BucketTable {
  BucketKey key = BucketKey::graph_diameter;
  std::vector<BucketRow> rows;
  std::vector<std::string> warnings;
};

// Per-bucket corpus BLEU of `outputs` against the dataset sentences.
BucketTable bucket_eval(const std::vector<AmrInstance>& dataset, const std::vector<std::string>& outputs,
                        const BucketSpec& spec, const std::vector<std::string>* baseline = nullptr,
                        bool cased = false);

// bucket, count, bleu, delta_pct; "-" marks an empty cell.
void write_bucket_tsv(const BucketTable& table, std::ostream& out);
// "+6.0%", "-1.2%", "0.0%".
std::string format_delta(double pct);

// Lowercase, drop an AMR sense suffix such as "-01", then strip one of the
// endings ing/ed/es/s when at least three characters remain.
std::string stem(std::string_view token);

struct AdequacyReport {
  double added = 0;    // fraction of output tokens matching no concept
  double missing = 0;  // fraction of concepts matching no output token
  std::size_t output_tokens = 0;
  std::size_t concepts = 0;
  std::vector<std::string> added_tokens;
  std::vector<std::string> missing_concepts;
  bool empty_output = false;
};

// Concept labels are the AMR node labels; relations never take part.
AdequacyReport adequacy(const AmrGraph& graph, const std::vector<std::string>& sentence);

struct CorpusAdequacy {
  double added = 0;
  double missing = 0;
  std::size_t empty_outputs = 0;
};

// Pooled over all tokens and concepts of the corpus.
CorpusAdequacy corpus_adequacy(const std::vector<AmrInstance>& dataset, const std::vector<std::string>& outputs);

}  // namespace dualgraph
