#include "dualgraph/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace dualgraph {

GradientMap finite_difference(const Objective& f, ParameterStore<double>& params, double eps) {
  GradientMap out;
  for (auto& p : params) {
    Tensor<double> g(p.value.shape());
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double original = p.value[i];
      p.value[i] = original + eps;
      const double plus = f(params);
      p.value[i] = original - eps;
      const double minus = f(params);
      p.value[i] = original;
      g[i] = (plus - minus) / (2.0 * eps);
    }
    out.emplace(p.name, std::move(g));
  }
  return out;
}

GradientMap analytic_gradients(const LossBuilder& build, ParameterStore<double>& params) {
  params.zero_grad();
  Tape<double> tape;
  Expr<double> loss = build(tape, params);
  tape.backward(loss);
  GradientMap out;
  for (const auto& p : params) out.emplace(p.name, p.grad.empty() ? Tensor<double>(p.value.shape()) : p.grad);
  return out;
}

std::vector<GradientCheck> compare_gradients(const GradientMap& analytic, const GradientMap& numeric) {
  std::vector<GradientCheck> checks;
  for (const auto& [name, a] : analytic) {
    auto it = numeric.find(name);
    if (it == numeric.end()) throw UsageError("compare_gradients: no numeric gradient for '" + name + "'");
    const auto& n = it->second;
    if (a.shape() != n.shape()) throw ShapeError("compare_gradients: shape mismatch for '" + name + "'");
    double diff = 0, an = 0, nn = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff += (a[i] - n[i]) * (a[i] - n[i]);
      an += a[i] * a[i];
      nn += n[i] * n[i];
    }
    GradientCheck check{name, 0.0, std::sqrt(an), std::sqrt(nn)};
    const double scale = std::max(check.analytic_norm, check.numeric_norm);
    if (scale >= 1e-10) check.relative_error = std::sqrt(diff) / scale;
    checks.push_back(check);
  }
  return checks;
}

KinkAwareGradient finite_difference(const LossBuilder& build, ParameterStore<double>& params, double eps) {
  auto evaluate = [&](std::uint64_t* signature) {
    Tape<double> tape(false);
    const double value = build(tape, params).scalar();
    *signature = tape.branch_signature();
    return value;
  };
  std::uint64_t base = 0;
  evaluate(&base);
  KinkAwareGradient out;
  for (auto& p : params) {
    Tensor<double> g(p.value.shape());
    std::vector<bool> crossed(p.value.size(), false);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double original = p.value[i];
      std::uint64_t sig_plus = 0, sig_minus = 0;
      p.value[i] = original + eps;
      const double plus = evaluate(&sig_plus);
      p.value[i] = original - eps;
      const double minus = evaluate(&sig_minus);
      p.value[i] = original;
      g[i] = (plus - minus) / (2.0 * eps);
      if (sig_plus != base || sig_minus != base) {
        crossed[i] = true;
        ++out.crossed_count;
      }
    }
    out.gradient.emplace(p.name, std::move(g));
    out.crossed.emplace(p.name, std::move(crossed));
  }
  return out;
}

std::vector<GradientCheck> gradient_check(const LossBuilder& build, ParameterStore<double>& params, double eps) {
  GradientMap analytic = analytic_gradients(build, params);
  KinkAwareGradient numeric = finite_difference(build, params, eps);
  std::map<std::string, std::size_t> excluded;
  for (auto& [name, mask] : numeric.crossed) {
    Tensor<double>& a = analytic.at(name);
    Tensor<double>& n = numeric.gradient.at(name);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      a[i] = 0;
      n[i] = 0;
      ++excluded[name];
    }
  }
  auto checks = compare_gradients(analytic, numeric.gradient);
  for (auto& c : checks) c.excluded = excluded[c.parameter];
  return checks;
}

double max_relative_error(const std::vector<GradientCheck>& checks) {
  double worst = 0;
  for (const auto& c : checks) worst = std::max(worst, c.relative_error);
  return worst;
}

}  // namespace dualgraph
