#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "dualgraph/tensor.hpp"
#include "dualgraph/vocab.hpp"

namespace dualgraph {

struct PretrainedEmbeddings {
  Tensor<float> table;  // vocab size x dim
  std::size_t found = 0;
  double coverage = 0;  // found / vocab size
};

// Rows are `token v1 ... v_dim`. Tokens absent from the file get
// uniform(-0.1, 0.1) rows drawn from `seed`; PAD stays zero. Later
// duplicates of a token are ignored.
PretrainedEmbeddings parse_pretrained_embeddings(std::string_view text, const Vocabulary& vocab, std::size_t dim,
                                                 std::uint64_t seed);
PretrainedEmbeddings load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                                std::size_t dim, std::uint64_t seed);

}  // namespace dualgraph
