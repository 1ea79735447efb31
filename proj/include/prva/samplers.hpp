#ifndef PRVA_SAMPLERS_HPP
#define PRVA_SAMPLERS_HPP

// Random variate engines: the accelerator-style mixture sampler on top of a
// GaussianPipeline, and the software baselines (inversion, accept-reject,
// Box-Muller, Student-T).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include "json.hpp"

#include "prva/errors.hpp"
#include "prva/kernel_density.hpp"
#include "prva/math.hpp"
#include "prva/random.hpp"
#include "prva/transform.hpp"

namespace prva {

struct StudentT {
  double dof;
};

struct Empirical {
  std::vector<double> data;
};

using TargetDistribution = std::variant<GaussianSpec, GaussianMixture, StudentT, Empirical>;

inline void validate(const TargetDistribution& t) {
  if (const auto* s = std::get_if<StudentT>(&t)) {
    if (!(s->dof > 0.0) || !std::isfinite(s->dof))
      throw DomainError("Student-T dof must be > 0");
  } else if (const auto* e = std::get_if<Empirical>(&t)) {
    if (e->data.empty()) throw ValidationError("empirical distribution needs data");
    for (double x : e->data)
      if (!std::isfinite(x)) throw ValidationError("empirical data must be finite");
  }
}

/// Parses `gaussian(mu,sigma)`, `studentt(dof)`, or a path to a mixture JSON
/// file. Malformed forms raise UsageError; invalid parameters raise the
/// corresponding validation error.
inline TargetDistribution parse_target(const std::string& text) {
  static const std::regex num(R"(\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*)");
  static const std::regex gauss(R"(\s*gaussian\s*\(([^,()]*),([^,()]*)\)\s*)");
  static const std::regex student(R"(\s*studentt\s*\(([^,()]*)\)\s*)");
  auto to_num = [&](const std::string& s) {
    std::smatch m;
    if (!std::regex_match(s, m, num)) throw UsageError("bad number '" + s + "' in target '" + text + "'");
    return std::stod(m[1].str());
  };
  std::smatch m;
  if (std::regex_match(text, m, gauss)) return GaussianSpec(to_num(m[1].str()), to_num(m[2].str()));
  if (std::regex_match(text, m, student)) {
    TargetDistribution t = StudentT{to_num(m[1].str())};
    validate(t);
    return t;
  }
  if (text.find('(') != std::string::npos)
    throw UsageError("unparsable target '" + text +
                     "'; expected gaussian(mu,sigma), studentt(dof) or a mixture JSON path");
  std::ifstream in(text);
  if (!in) throw UsageError("unparsable target '" + text + "' (not a known form or readable file)");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(text + ": " + e.what());
  }
  return mixture_from_json(j);
}

/// Picks component i with probability weight_i from one uniform in [0, 1).
/// Zero-weight components are never selected.
class ComponentSelector {
 public:
  explicit ComponentSelector(const std::vector<double>& weights) : cumulative_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
    const double total = cumulative_.back();
    for (auto& c : cumulative_) c /= total;
    last_ = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > 0.0) last_ = i;
    cumulative_[last_] = 1.0;
  }

  std::size_t operator()(double u) const noexcept {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), last_);
  }

 private:
  std::vector<double> cumulative_;
  std::size_t last_;
};

/// Accelerator-style sampler for a programmed mixture: per draw, choose a
/// component with the uniform stream, then emit one pipeline sample mapped
/// onto that component's Gaussian.
class PrvaMixtureSampler {
 public:
  PrvaMixtureSampler(const GaussianMixture& mix, const GaussianPipeline& pipeline)
      : selector_(mix.weights()) {
    coeffs_.reserve(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i)
      coeffs_.push_back(pipeline.coeffs_for(GaussianSpec(mix.means()[i], mix.stds()[i])));
  }

  double operator()(GaussianPipeline& pipeline, UniformStream& u) const {
    return pipeline.next(coeffs_[selector_(u.next_unit())]);
  }

 private:
  ComponentSelector selector_;
  std::vector<TransformCoeffs> coeffs_;
};

inline std::vector<double> sample_mixture_prva(const GaussianMixture& mix, std::size_t n,
                                               GaussianPipeline& pipeline, UniformStream& u) {
  const PrvaMixtureSampler sampler(mix, pipeline);
  std::vector<double> out(n);
  for (auto& x : out) x = sampler(pipeline, u);
  return out;
}

/// Inverse CDF for the variants that have one.
inline double quantile(const TargetDistribution& target, double p) {
  if (const auto* g = std::get_if<GaussianSpec>(&target)) return g->mean() + g->std() * normal_quantile(p);
  if (const auto* t = std::get_if<StudentT>(&target)) {
    validate(target);
    return boost::math::quantile(boost::math::students_t(t->dof), p);
  }
  throw CapabilityError("inversion needs a closed-form inverse CDF; mixture and empirical "
                        "targets have none");
}

inline std::vector<double> sample_inversion(const TargetDistribution& target, std::size_t n,
                                            UniformStream& u) {
  if (std::holds_alternative<GaussianMixture>(target) || std::holds_alternative<Empirical>(target))
    throw CapabilityError("inversion needs a closed-form inverse CDF; mixture and empirical "
                          "targets have none");
  validate(target);
  std::vector<double> out(n);
  for (auto& x : out) x = quantile(target, u.next_open_unit());
  return out;
}

struct AcceptRejectStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  double acceptance_rate() const noexcept {
    const auto total = accepted + rejected;
    return total ? static_cast<double>(accepted) / static_cast<double>(total) : 0.0;
  }
  double proposals_per_sample() const noexcept {
    return accepted ? static_cast<double>(accepted + rejected) / static_cast<double>(accepted) : 0.0;
  }
};

struct AcceptRejectResult {
  std::vector<double> samples;
  AcceptRejectStats stats;
};

struct AcceptRejectOptions {
  double min_acceptance_rate = 1e-4;
  std::size_t window = 100000;
};

/// Accept-reject sampling: propose x ~ g, accept when u <= f(x) / (c g(x)).
/// Throws DominanceError if f(x) > c g(x) is observed or if the acceptance
/// rate within a full window falls below the floor.
template <typename Density, typename Proposal, typename ProposalDensity>
AcceptRejectResult sample_accept_reject(Density&& f, Proposal&& g_sampler, ProposalDensity&& g,
                                        double c, std::size_t n, UniformStream& u,
                                        AcceptRejectOptions opts = {}) {
  if (!(c >= 1.0) || !std::isfinite(c)) throw DomainError("accept-reject envelope constant c must be >= 1");
  AcceptRejectResult r;
  r.samples.reserve(n);
  std::size_t window_proposals = 0, window_accepts = 0;
  while (r.samples.size() < n) {
    const double x = g_sampler(u);
    const double fx = f(x);
    const double cgx = c * g(x);
    if (fx > cgx * (1.0 + 1e-12))
      throw DominanceError("accept-reject: f(x) > c g(x) at x = " + std::to_string(x));
    const double v = u.next_unit();
    ++window_proposals;
    if (cgx > 0.0 && v * cgx <= fx) {
      r.samples.push_back(x);
      ++r.stats.accepted;
      ++window_accepts;
    } else {
      ++r.stats.rejected;
    }
    if (window_proposals == opts.window) {
      if (static_cast<double>(window_accepts) <
          opts.min_acceptance_rate * static_cast<double>(window_proposals))
        throw DominanceError("accept-reject: acceptance rate below floor (starved envelope)");
      window_proposals = window_accepts = 0;
    }
  }
  return r;
}

inline std::vector<double> sample_box_muller(const GaussianSpec& spec, std::size_t n, UniformStream& u) {
  BoxMullerNormal normal;
  std::vector<double> out(n);
  for (auto& x : out) x = spec.mean() + spec.std() * normal(u);
  return out;
}

/// Gamma(shape, 1) variates by Marsaglia-Tsang squeeze, driven by Box-Muller
/// normals.
class GammaGenerator {
 public:
  explicit GammaGenerator(double shape) : shape_(shape) {
    if (!(shape > 0.0)) throw DomainError("gamma shape must be > 0");
    const double k = shape < 1.0 ? shape + 1.0 : shape;
    d_ = k - 1.0 / 3.0;
    c_ = 1.0 / std::sqrt(9.0 * d_);
  }

  double operator()(UniformStream& u, BoxMullerNormal& normal) const {
    double g;
    for (;;) {
      double x, v;
      do {
        x = normal(u);
        v = 1.0 + c_ * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double w = u.next_open_unit();
      if (w < 1.0 - 0.0331 * x * x * x * x) {
        g = d_ * v;
        break;
      }
      if (std::log(w) < 0.5 * x * x + d_ * (1.0 - v + std::log(v))) {
        g = d_ * v;
        break;
      }
    }
    if (shape_ < 1.0) g *= std::pow(u.next_open_unit(), 1.0 / shape_);
    return g;
  }

 private:
  double shape_;
  double d_;
  double c_;
};

/// Student-T(dof) as Z / sqrt(V / dof), Z normal and V chi-square(dof).
class StudentTGenerator {
 public:
  explicit StudentTGenerator(double dof) : dof_(dof), gamma_(dof > 0.0 ? dof / 2.0 : 1.0) {
    if (!(dof > 0.0) || !std::isfinite(dof)) throw DomainError("Student-T dof must be > 0");
  }

  double operator()(UniformStream& u, BoxMullerNormal& normal) const {
    const double z = normal(u);
    const double v = 2.0 * gamma_(u, normal);
    return z / std::sqrt(v / dof_);
  }

 private:
  double dof_;
  GammaGenerator gamma_;
};

inline std::vector<double> sample_student_t(double dof, std::size_t n, UniformStream& u) {
  const StudentTGenerator gen(dof);
  BoxMullerNormal normal;
  std::vector<double> out(n);
  for (auto& x : out) x = gen(u, normal);
  return out;
}

}  // namespace prva

#endif  // PRVA_SAMPLERS_HPP
