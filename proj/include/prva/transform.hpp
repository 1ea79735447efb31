#ifndef PRVA_TRANSFORM_HPP
#define PRVA_TRANSFORM_HPP

// Calibration of the ADC stream into a known Gaussian, the Gaussian-to-
// Gaussian affine map, and 12-to-64-bit dithering of ADC codes.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "prva/errors.hpp"
#include "prva/math.hpp"
#include "prva/noise_source.hpp"
#include "prva/random.hpp"

namespace prva {

/// Mean and standard deviation of a Gaussian; std > 0, both finite.
class GaussianSpec {
 public:
  GaussianSpec(double mean, double std) : mean_(mean), std_(std) {
    if (!std::isfinite(mean) || !std::isfinite(std) || !(std > 0.0))
      throw ValidationError("GaussianSpec requires finite mean and std > 0 (got mean=" +
                            std::to_string(mean) + ", std=" + std::to_string(std) + ")");
  }

  double mean() const noexcept { return mean_; }
  double std() const noexcept { return std_; }

  friend bool operator==(const GaussianSpec&, const GaussianSpec&) = default;

 private:
  double mean_;
  double std_;
};

/// x' = a x + b.
struct TransformCoeffs {
  double a = 1.0;
  double b = 0.0;

  double operator()(double x) const noexcept { return a * x + b; }
};

inline void to_json(nlohmann::json& j, const TransformCoeffs& c) {
  j = nlohmann::json{{"a", c.a}, {"b", c.b}};
}

inline void from_json(const nlohmann::json& j, TransformCoeffs& c) {
  c.a = j.at("a").get<double>();
  c.b = j.at("b").get<double>();
}

inline TransformCoeffs transform_coeffs(const GaussianSpec& source, const GaussianSpec& target) {
  const double a = target.std() / source.std();
  return {a, target.mean() - source.mean() * a};
}

/// Sample mean and unbiased standard deviation of real-valued data.
inline GaussianSpec calibrate(std::span<const double> values) {
  if (values.size() < 2) throw InsufficientDataError("calibrate: need >= 2 samples");
  const auto s = summarize(values);
  if (!(s.stddev() > 0.0)) throw DegenerateError("calibrate: source has zero spread");
  return {s.mean(), s.stddev()};
}

inline GaussianSpec calibrate(const AdcTrace& trace) {
  const auto v = trace.values();
  return calibrate(std::span<const double>(v));
}

/// Places an ADC code uniformly inside its quantization bin:
/// (code + u / 2^64) / 4096, in [0, 1). The top 53 bits of the 64-bit word
/// formed by the code and u are used so the result is exact in double
/// precision and strictly below 1.
constexpr double interpolate_12_to_64(AdcSample code, std::uint64_t u) noexcept {
  const std::uint64_t word = (static_cast<std::uint64_t>(code.value()) << 41) | (u >> 23);
  return static_cast<double>(word) * 0x1.0p-53;
}

/// Draws n dithered samples from `adc` and maps them through `coeffs`.
/// `adc` should already be flip-corrected, and `coeffs` computed against the
/// unit-scale spec of the dithered stream.
inline std::vector<double> sample_gaussian(const TransformCoeffs& coeffs, std::size_t n,
                                           AdcSource& adc, UniformStream& prng) {
  if (n < 1) throw DomainError("sample_gaussian: n must be >= 1");
  std::vector<double> out(n);
  for (auto& x : out) x = coeffs(interpolate_12_to_64(adc.next(), prng.next_u64()));
  return out;
}

inline std::vector<double> sample_gaussian(const GaussianSpec& unit_source,
                                           const GaussianSpec& target, std::size_t n,
                                           AdcSource& adc, UniformStream& prng) {
  return sample_gaussian(transform_coeffs(unit_source, target), n, adc, prng);
}

struct PipelineConfig {
  std::size_t calibration_samples = 100000;
};

/// ADC source -> flip correction -> dither -> affine transform. The source's
/// unit-scale Gaussian spec is estimated at construction from
/// `calibration_samples` dithered, flip-corrected values. The same uniform
/// stream drives the dithering and (in the mixture sampler) component choice.
class GaussianPipeline {
 public:
  GaussianPipeline(std::unique_ptr<AdcSource> raw, std::uint64_t seed,
                   PipelineConfig config = {})
      : adc_(std::move(raw), derive_seed(seed, {1})),
        prng_(derive_seed(seed, {2}), 0x0D17),
        unit_source_(0.5, 1.0) {
    if (config.calibration_samples < 2)
      throw DomainError("pipeline calibration needs >= 2 samples");
    std::vector<double> cal(config.calibration_samples);
    for (auto& v : cal) v = next_unit();
    unit_source_ = calibrate(std::span<const double>(cal));
  }

  /// Pipeline over a simulated source; the model's own seed is replaced by
  /// one derived from `seed`.
  static GaussianPipeline simulated(NoiseSourceModel model, std::uint64_t seed,
                                    PipelineConfig config = {}) {
    model.seed = derive_seed(seed, {0});
    return GaussianPipeline(std::make_unique<SimulatedAdcSource>(model), seed, config);
  }

  /// One flip-corrected, dithered value in [0, 1).
  double next_unit() { return interpolate_12_to_64(adc_.next(), prng_.next_u64()); }

  double next(const TransformCoeffs& c) { return c(next_unit()); }

  std::vector<double> sample(const GaussianSpec& target, std::size_t n) {
    return sample_gaussian(unit_source_, target, n, adc_, prng_);
  }

  TransformCoeffs coeffs_for(const GaussianSpec& target) const {
    return transform_coeffs(unit_source_, target);
  }

  const GaussianSpec& unit_source() const noexcept { return unit_source_; }
  UniformStream& uniform() noexcept { return prng_; }

 private:
  FlipCorrectedSource adc_;
  UniformStream prng_;
  GaussianSpec unit_source_;
};

}  // namespace prva

#endif  // PRVA_TRANSFORM_HPP
