#include "dualgraph/vocab.hpp"

#include <algorithm>
#include <fstream>

#include "dualgraph/amr_graph.hpp"
#include "dualgraph/errors.hpp"

namespace dualgraph {

namespace {
const std::vector<std::string>& special_tokens() {
  static const std::vector<std::string> specials = {"<pad>", "<unk>", "<s>", "</s>"};
  return specials;
}
}  // namespace

Vocabulary::Vocabulary() {
  for (const auto& s : special_tokens()) add(s);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary vocab;
  for (const auto& t : tokens) {
    if (vocab.contains(t)) throw DataError("duplicate vocabulary token '" + t + "'");
    vocab.add(t);
  }
  return vocab;
}

int Vocabulary::add(const std::string& token) {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.count(std::string(token)) > 0; }

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw UsageError("vocabulary id " + std::to_string(id) + " out of range");
  }
  return tokens_[id];
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.size() < kSpecialCount) throw DataError(path.string() + ": vocabulary shorter than its specials");
  for (std::size_t i = 0; i < kSpecialCount; ++i) {
    if (lines[i] != special_tokens()[i]) throw DataError(path.string() + ": unexpected special token on line " + std::to_string(i + 1));
  }
  return from_tokens(std::vector<std::string>(lines.begin() + kSpecialCount, lines.end()));
}

Vocabulary build_frequency_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t max_size) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& seq : sequences) {
    for (const auto& tok : seq) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  const Vocabulary specials;
  for (const auto& [token, count] : ranked) {
    if (vocab.size() - Vocabulary::kSpecialCount >= max_size) break;
    if (specials.contains(token)) continue;
    vocab.add(token);
  }
  return vocab;
}

VocabPair build_vocab(const std::vector<AmrInstance>& corpus, std::size_t max_size) {
  if (corpus.empty()) throw UsageError("build_vocab: empty corpus");
  std::vector<std::vector<std::string>> labels, sentences;
  labels.reserve(corpus.size());
  sentences.reserve(corpus.size());
  for (const auto& instance : corpus) {
    labels.push_back(levi_transform(instance.graph).node_labels);
    sentences.push_back(instance.tokens());
  }
  return VocabPair{build_frequency_vocab(labels, max_size), build_frequency_vocab(sentences, max_size)};
}

}  // namespace dualgraph
