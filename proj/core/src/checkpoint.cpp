#include "dualgraph/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dualgraph/corpus.hpp"

namespace dualgraph {
namespace {

static_assert(sizeof(float) == 4, "checkpoints store IEEE-754 binary32");

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return value;
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw DataError("truncated checkpoint at byte " + std::to_string(pos_));
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const ParameterStore<float>& params) {
  std::string out = "DGCK";
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    if (p.name.size() > 0xFFFF) throw UsageError("parameter name too long: " + p.name.substr(0, 32));
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(p.name.size()));
    out += p.name;
    const auto& shape = p.value.shape();
    out.push_back(static_cast<char>(shape.size()));
    for (auto d : shape) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (float x : p.value.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  }
  return out;
}

ParameterStore<float> deserialize_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  if (in.get_bytes(4) != "DGCK") throw DataError("not a checkpoint: bad magic");
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto count = in.get<std::uint32_t>();
  ParameterStore<float> params;
  for (std::uint32_t e = 0; e < count; ++e) {
    const auto name_length = in.get<std::uint16_t>();
    std::string name = in.get_bytes(name_length);
    const auto rank = in.get<std::uint8_t>();
    if (rank == 0) throw DataError("checkpoint entry '" + name + "' has rank 0");
    std::vector<std::size_t> shape;
    std::size_t total = 1;
    for (std::uint8_t r = 0; r < rank; ++r) {
      const auto d = in.get<std::uint32_t>();
      if (d == 0) throw DataError("checkpoint entry '" + name + "' has a zero dimension");
      shape.push_back(d);
      total *= d;
    }
    std::vector<float> data(total);
    for (auto& x : data) x = std::bit_cast<float>(in.get<std::uint32_t>());
    params.add(std::move(name), Tensor<float>(std::move(shape), std::move(data)));
  }
  if (!in.done()) throw DataError("trailing bytes after checkpoint entries");
  return params;
}

void save_checkpoint(const ParameterStore<float>& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const std::string bytes = serialize_checkpoint(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

ParameterStore<float> load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_text_file(path));
}

}  // namespace dualgraph
