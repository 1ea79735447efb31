#ifndef PRVA_KERNEL_DENSITY_HPP
#define PRVA_KERNEL_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "prva/errors.hpp"
#include "prva/math.hpp"
#include "prva/random.hpp"

namespace prva {

/// Weighted sum of Gaussian components. Construction validates: equal
/// non-zero lengths, stds > 0, weights >= 0 summing to 1 within 1e-9.
class GaussianMixture {
 public:
  static constexpr double kWeightTolerance = 1e-9;

  GaussianMixture(std::vector<double> means, std::vector<double> stds,
                  std::vector<double> weights)
      : means_(std::move(means)), stds_(std::move(stds)), weights_(std::move(weights)) {
    if (means_.empty() || means_.size() != stds_.size() || means_.size() != weights_.size())
      throw ValidationError("mixture arrays must have equal length >= 1 (means=" +
                            std::to_string(means_.size()) + ", stds=" +
                            std::to_string(stds_.size()) + ", weights=" +
                            std::to_string(weights_.size()) + ")");
    double total = 0.0;
    for (std::size_t i = 0; i < means_.size(); ++i) {
      if (!std::isfinite(means_[i])) throw ValidationError("mixture means must be finite");
      if (!(stds_[i] > 0.0) || !std::isfinite(stds_[i]))
        throw ValidationError("mixture stds must all be > 0");
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
        throw ValidationError("mixture weights must all be >= 0");
      total += weights_[i];
    }
    if (std::abs(total - 1.0) > kWeightTolerance)
      throw ValidationError("mixture weights must sum to 1 within 1e-9 (sum = " +
                            std::to_string(total) + ")");
  }

  std::size_t size() const noexcept { return means_.size(); }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& stds() const noexcept { return stds_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m += weights_[i] * means_[i];
    return m;
  }

  /// Law of total variance over components.
  double variance() const noexcept {
    const double m = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      const double d = means_[i] - m;
      v += weights_[i] * (stds_[i] * stds_[i] + d * d);
    }
    return v;
  }

 private:
  std::vector<double> means_;
  std::vector<double> stds_;
  std::vector<double> weights_;
};

inline void to_json(nlohmann::json& j, const GaussianMixture& m) {
  j = nlohmann::json{{"means", m.means()}, {"stds", m.stds()}, {"weights", m.weights()}};
}

inline GaussianMixture mixture_from_json(const nlohmann::json& j) {
  try {
    return GaussianMixture(j.at("means").get<std::vector<double>>(),
                           j.at("stds").get<std::vector<double>>(),
                           j.at("weights").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("mixture JSON: ") + e.what());
  }
}

struct SilvermanBandwidth {};
struct FixedBandwidth {
  double h;
};
using BandwidthSpec = std::variant<SilvermanBandwidth, FixedBandwidth>;

/// Silverman's rule of thumb, h = (4 sigma^5 / (3 N))^(1/5), with sigma the
/// unbiased sample std of all N points.
inline double silverman_bandwidth(double sigma, std::size_t n) {
  if (n < 2) throw InsufficientDataError("silverman_bandwidth: need N >= 2");
  if (!(sigma > 0.0)) throw DegenerateError("silverman_bandwidth: data have zero spread");
  return std::pow(4.0 * std::pow(sigma, 5) / (3.0 * static_cast<double>(n)), 0.2);
}

inline double silverman_bandwidth(std::span<const double> data) {
  if (data.size() < 2) throw InsufficientDataError("silverman_bandwidth: need N >= 2");
  return silverman_bandwidth(sample_stddev(data), data.size());
}

inline double resolve_bandwidth(const BandwidthSpec& spec, std::span<const double> data) {
  if (const auto* f = std::get_if<FixedBandwidth>(&spec)) {
    if (!(f->h > 0.0) || !std::isfinite(f->h))
      throw DomainError("fixed bandwidth must be > 0");
    return f->h;
  }
  return silverman_bandwidth(data);
}

struct KdeOptions {
  /// Keep at most this many components (uniform subsample without
  /// replacement). The bandwidth is always computed from the full data.
  std::optional<std::size_t> max_components;
  std::uint64_t thinning_seed = 0;
};

/// Kernel density estimate with Gaussian kernel: one component per data point
/// (or per retained point after thinning), all with std h and equal weight.
inline GaussianMixture fit_kde(std::span<const double> data, const BandwidthSpec& bandwidth,
                               const KdeOptions& options = {}) {
  if (data.empty()) throw InsufficientDataError("fit_kde: no data");
  for (double x : data)
    if (!std::isfinite(x)) throw ValidationError("fit_kde: data must be finite");
  const double h = resolve_bandwidth(bandwidth, data);

  std::vector<double> centers(data.begin(), data.end());
  if (options.max_components && *options.max_components < centers.size()) {
    if (*options.max_components == 0) throw DomainError("fit_kde: max_components must be >= 1");
    UniformStream u(options.thinning_seed, 0x7417);
    // Partial Fisher-Yates: first m entries become a uniform subsample.
    const std::size_t m = *options.max_components;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(u.next_unit() * static_cast<double>(centers.size() - i));
      std::swap(centers[i], centers[std::min(j, centers.size() - 1)]);
    }
    centers.resize(m);
  }
  const std::size_t m = centers.size();
  return GaussianMixture(std::move(centers), std::vector<double>(m, h),
                         std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

inline double mixture_pdf(const GaussianMixture& mix, double x) noexcept {
  double p = 0.0;
  const auto& mu = mix.means();
  const auto& sd = mix.stds();
  const auto& w = mix.weights();
  for (std::size_t i = 0; i < mix.size(); ++i) p += w[i] * normal_pdf((x - mu[i]) / sd[i]) / sd[i];
  return p;
}

inline double mixture_cdf(const GaussianMixture& mix, double x) noexcept {
  double p = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i)
    p += mix.weights()[i] * normal_cdf((x - mix.means()[i]) / mix.stds()[i]);
  return p;
}

}  // namespace prva

#endif  // PRVA_KERNEL_DENSITY_HPP
