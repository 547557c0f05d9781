#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dualgraph {

// Components covered by the finite-difference suite.
enum class GradientTarget { ggnn, gat, gin, bilstm, attention, copy, end_to_end };

inline constexpr GradientTarget kGradientTargets[] = {
    GradientTarget::ggnn,      GradientTarget::gat,  GradientTarget::gin,       GradientTarget::bilstm,
    GradientTarget::attention, GradientTarget::copy, GradientTarget::end_to_end};

std::string to_string(GradientTarget target);
GradientTarget parse_gradient_target(std::string_view text);

struct GradientSuiteResult {
  GradientTarget target = GradientTarget::ggnn;
  std::uint64_t seed = 0;
  double max_relative_error = 0;
  std::string worst_parameter;
  std::size_t parameters = 0;  // scalars checked
  std::size_t excluded = 0;    // of those, skipped for crossing a kink
};

// Builds a small random instance of `target` in double precision, weights
// its output with a fixed random tensor and compares reverse-mode gradients
// against central differences. end_to_end runs the full loss on a 4-node
// graph with an 8-token target.
GradientSuiteResult run_gradient_check(GradientTarget target, std::uint64_t seed, double eps = 1e-3);

}  // namespace dualgraph
