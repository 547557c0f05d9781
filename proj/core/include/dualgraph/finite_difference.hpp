#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dualgraph/parameters.hpp"

namespace dualgraph {

using GradientMap = std::map<std::string, Tensor<double>>;

// Scalar objective evaluated on a parameter store; must be deterministic.
using Objective = std::function<double(ParameterStore<double>&)>;

// Builds a scalar loss on a tape from the given parameters.
using LossBuilder = std::function<Expr<double>(Tape<double>&, ParameterStore<double>&)>;

// Central differences (f(p + eps) - f(p - eps)) / (2 eps), one coordinate at
// a time, in 64-bit arithmetic. Parameters are restored afterwards.
GradientMap finite_difference(const Objective& f, ParameterStore<double>& params, double eps = 1e-3);

// Reverse-mode gradients of the loss produced by `build`.
GradientMap analytic_gradients(const LossBuilder& build, ParameterStore<double>& params);

// Central differences of a tape-built loss. Coordinates whose +eps or -eps
// evaluation lands on another side of some kink than the unperturbed
// point (see Tape::branch_signature) get `true` in `crossed`; their
// difference quotient does not estimate the derivative.
struct KinkAwareGradient {
  GradientMap gradient;
  std::map<std::string, std::vector<bool>> crossed;
  std::size_t crossed_count = 0;
};

KinkAwareGradient finite_difference(const LossBuilder& build, ParameterStore<double>& params, double eps = 1e-3);

struct GradientCheck {
  std::string parameter;
  double relative_error = 0;
  double analytic_norm = 0;
  double numeric_norm = 0;
  std::size_t excluded = 0;  // coordinates skipped for crossing a kink
};

// Per-parameter relative error ||analytic - numeric|| / max(||analytic||, ||numeric||);
// defined as 0 when both norms are below 1e-10.
std::vector<GradientCheck> compare_gradients(const GradientMap& analytic, const GradientMap& numeric);

// Runs both routes on `build` and compares them, leaving out coordinates
// where the finite difference crossed a kink.
std::vector<GradientCheck> gradient_check(const LossBuilder& build, ParameterStore<double>& params,
                                          double eps = 1e-3);

double max_relative_error(const std::vector<GradientCheck>& checks);

}  // namespace dualgraph
