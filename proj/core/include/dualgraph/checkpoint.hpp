#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dualgraph/parameters.hpp"

namespace dualgraph {

// Binary layout, all integers little-endian:
//   "DGCK" | version u32 | entry count u32 |
//   per entry: name length u16 | UTF-8 name | rank u8 | dims u32[rank] |
//              float32[prod(dims)] row-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const ParameterStore<float>& params);
ParameterStore<float> deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const ParameterStore<float>& params, const std::filesystem::path& path);
ParameterStore<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace dualgraph
