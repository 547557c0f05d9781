#include "dualgraph/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "dualgraph/errors.hpp"

namespace dualgraph {

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    const std::size_t start = i;
    while (i < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    if (i > start) tokens.emplace_back(sentence.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string> AmrInstance::tokens() const { return tokenize(sentence); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Value of `# ::key value` up to the next ` ::` marker.
std::string comment_field(std::string_view line, std::string_view key) {
  const std::string marker = std::string("::") + std::string(key) + " ";
  const auto at = line.find(marker);
  if (at == std::string_view::npos) return {};
  auto rest = line.substr(at + marker.size());
  if (key != "snt") {
    if (const auto next = rest.find(" ::"); next != std::string_view::npos) rest = rest.substr(0, next);
  }
  return std::string(trim(rest));
}

}  // namespace

std::vector<AmrInstance> parse_amr_corpus(std::string_view text) {
  std::vector<AmrInstance> corpus;
  std::string id, sentence, penman;
  std::size_t block_offset = 0;
  std::size_t offset = 0;

  auto flush = [&]() {
    if (!trim(penman).empty()) {
      try {
        corpus.push_back(AmrInstance{id, sentence, parse_penman(penman)});
      } catch (const ParseError& e) {
        throw DataError("block " + std::to_string(corpus.size() + 1) + " (byte " +
                        std::to_string(block_offset) + "): " + e.what());
      }
    }
    id.clear();
    sentence.clear();
    penman.clear();
  };

  while (offset <= text.size()) {
    auto end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(offset, end - offset);
    const std::string_view line = trim(raw);
    if (line.empty()) {
      flush();
      block_offset = end + 1;
    } else if (line.front() == '#') {
      if (auto v = comment_field(line, "snt"); !v.empty()) sentence = v;
      if (auto v = comment_field(line, "id"); !v.empty()) id = v;
    } else {
      penman.append(raw);
      penman.push_back('\n');
    }
    if (end == text.size()) break;
    offset = end + 1;
  }
  flush();
  return corpus;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<AmrInstance> read_amr_corpus(const std::filesystem::path& path) {
  return parse_amr_corpus(read_text_file(path));
}

}  // namespace dualgraph
