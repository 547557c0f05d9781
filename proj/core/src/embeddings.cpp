#include "dualgraph/embeddings.hpp"

#include <random>
#include <string>
#include <vector>

#include "dualgraph/corpus.hpp"
#include "dualgraph/errors.hpp"

namespace dualgraph {

PretrainedEmbeddings parse_pretrained_embeddings(std::string_view text, const Vocabulary& vocab, std::size_t dim,
                                                 std::uint64_t seed) {
  if (dim == 0) throw UsageError("embeddings: dim must be positive");
  PretrainedEmbeddings out;
  out.table = Tensor<float>::matrix(vocab.size(), dim);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uniform(-0.1f, 0.1f);
  for (std::size_t r = 0; r < vocab.size(); ++r) {
    for (std::size_t c = 0; c < dim; ++c) out.table(r, c) = r == Vocabulary::kPad ? 0.0f : uniform(rng);
  }

  std::vector<bool> seen(vocab.size(), false);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::vector<std::string> fields = tokenize(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      throw DataError("embeddings: line " + std::to_string(line_no) + " has " + std::to_string(fields.size() - 1) +
                      " values, expected " + std::to_string(dim));
    }
    std::vector<float> values(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      const std::string& f = fields[c + 1];
      try {
        std::size_t used = 0;
        values[c] = std::stof(f, &used);
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw DataError("embeddings: line " + std::to_string(line_no) + " has a non-numeric value '" + f + "'");
      }
    }
    if (!vocab.contains(fields[0])) continue;
    const int id = vocab.id(fields[0]);
    if (id == Vocabulary::kPad || seen[static_cast<std::size_t>(id)]) continue;
    seen[static_cast<std::size_t>(id)] = true;
    ++out.found;
    for (std::size_t c = 0; c < dim; ++c) out.table(static_cast<std::size_t>(id), c) = values[c];
  }
  out.coverage = static_cast<double>(out.found) / static_cast<double>(vocab.size());
  return out;
}

PretrainedEmbeddings load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                                std::size_t dim, std::uint64_t seed) {
  return parse_pretrained_embeddings(read_text_file(path), vocab, dim, seed);
}

}  // namespace dualgraph
