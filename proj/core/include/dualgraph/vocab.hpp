#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dualgraph/corpus.hpp"

namespace dualgraph {

inline constexpr std::size_t kDefaultVocabSize = 20000;

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr std::size_t kSpecialCount = 4;

  // Holds only the four specials.
  Vocabulary();

  // Specials followed by `tokens` in the given order; duplicates and
  // special spellings are rejected.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  int add(const std::string& token);
  // UNK for unknown tokens.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // One token per line, line index == id.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Frequency-ranked, ties broken lexicographically, truncated to max_size
// non-special entries.
Vocabulary build_frequency_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t max_size);

struct VocabPair {
  Vocabulary source;  // node labels: concepts and relations
  Vocabulary target;  // sentence tokens
};

VocabPair build_vocab(const std::vector<AmrInstance>& corpus, std::size_t max_size = kDefaultVocabSize);

}  // namespace dualgraph
