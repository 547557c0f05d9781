#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dualgraph/amr_graph.hpp"

namespace dualgraph {

struct AmrInstance {
  std::string id;
  std::string sentence;
  AmrGraph graph;

  std::vector<std::string> tokens() const;
};

// Whitespace tokenization; the corpus sentences are assumed pre-tokenized.
std::vector<std::string> tokenize(std::string_view sentence);

// AMR-release format: blocks separated by blank lines, `# ::snt` and
// `# ::id` comment lines, PENMAN text for the rest of the block.
std::vector<AmrInstance> parse_amr_corpus(std::string_view text);
std::vector<AmrInstance> read_amr_corpus(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace dualgraph
