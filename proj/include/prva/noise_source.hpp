#ifndef PRVA_NOISE_SOURCE_HPP
#define PRVA_NOISE_SOURCE_HPP

// Software model of the Zener-diode noise source as seen through a 12-bit
// ADC: simulation, trace replay, flip symmetrization and temperature fits.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "prva/errors.hpp"
#include "prva/math.hpp"
#include "prva/random.hpp"

namespace prva {

/// One 12-bit unsigned ADC code.
class AdcSample {
 public:
  static constexpr std::uint16_t kMax = 4095;
  static constexpr std::uint32_t kLevels = 4096;

  constexpr AdcSample() = default;

  explicit AdcSample(long long v) {
    if (v < 0 || v > kMax)
      throw DomainError("ADC code " + std::to_string(v) + " outside [0, 4095]");
    value_ = static_cast<std::uint16_t>(v);
  }

  constexpr std::uint16_t value() const noexcept { return value_; }
  constexpr AdcSample mirrored() const noexcept { return from_raw(kMax - value_); }

  /// Unchecked construction; caller guarantees v <= kMax.
  static constexpr AdcSample from_raw(std::uint16_t v) noexcept {
    AdcSample s;
    s.value_ = v;
    return s;
  }

  friend constexpr bool operator==(AdcSample, AdcSample) = default;

 private:
  std::uint16_t value_ = 0;
};

struct AdcTrace {
  std::vector<AdcSample> samples;
  std::optional<double> temperature_celsius;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (auto s : samples) v.push_back(s.value());
    return v;
  }
};

struct AffineCurve {
  double intercept = 0.0;
  double slope = 0.0;

  double operator()(double t) const noexcept { return intercept + slope * t; }
};

/// Temperature-dependent noise source. mean_curve and std_curve give the
/// mean and standard deviation of the analog signal in ADC codes. A nonzero
/// skew switches the pre-quantization shape from Gaussian to a skew-normal
/// with the same mean and std.
struct NoiseSourceModel {
  AffineCurve mean_curve{2048.0, 0.0};
  AffineCurve std_curve{200.0, 0.0};
  double temperature_celsius = 25.0;
  std::uint64_t seed = 0;
  double skew = 0.0;

  double mean_at_operating_point() const noexcept { return mean_curve(temperature_celsius); }
  double std_at_operating_point() const noexcept { return std_curve(temperature_celsius); }

  void validate() const {
    for (double t : {0.0, 45.0, temperature_celsius}) {
      const double s = std_curve(t);
      if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("noise model std_curve must be > 0 (got " + std::to_string(s) +
                          " at " + std::to_string(t) + " degC)");
    }
    if (!std::isfinite(mean_at_operating_point()) || !std::isfinite(skew))
      throw DomainError("noise model parameters must be finite");
  }
};

inline void to_json(nlohmann::json& j, const NoiseSourceModel& m) {
  j = nlohmann::json{{"mean_intercept", m.mean_curve.intercept},
                     {"mean_slope", m.mean_curve.slope},
                     {"std_intercept", m.std_curve.intercept},
                     {"std_slope", m.std_curve.slope},
                     {"temperature_celsius", m.temperature_celsius}};
  if (m.skew != 0.0) j["skew"] = m.skew;
}

inline void from_json(const nlohmann::json& j, NoiseSourceModel& m) {
  try {
    m.mean_curve = {j.at("mean_intercept").get<double>(), j.at("mean_slope").get<double>()};
    m.std_curve = {j.at("std_intercept").get<double>(), j.at("std_slope").get<double>()};
    m.temperature_celsius = j.value("temperature_celsius", 25.0);
    m.skew = j.value("skew", 0.0);
    m.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("noise model JSON: ") + e.what());
  }
}

/// Producer of ADC codes, one at a time.
class AdcSource {
 public:
  virtual ~AdcSource() = default;
  virtual AdcSample next() = 0;
};

/// Simulated physical source: Gaussian (or skew-normal) draw, rounded to the
/// nearest code, clamped at the rails.
class SimulatedAdcSource final : public AdcSource {
 public:
  explicit SimulatedAdcSource(const NoiseSourceModel& model)
      : uniform_(model.seed, 0x0A0C), skew_(model.skew) {
    model.validate();
    mean_ = model.mean_at_operating_point();
    std_ = model.std_at_operating_point();
    if (skew_ != 0.0) {
      delta_ = skew_ / std::sqrt(1.0 + skew_ * skew_);
      z_mean_ = delta_ * std::sqrt(2.0 / std::numbers::pi);
      z_std_ = std::sqrt(1.0 - 2.0 * delta_ * delta_ / std::numbers::pi);
    }
  }

  AdcSample next() override {
    double z = normal_(uniform_);
    if (skew_ != 0.0) {
      const double z2 = normal_(uniform_);
      z = (delta_ * std::abs(z) + std::sqrt(1.0 - delta_ * delta_) * z2 - z_mean_) / z_std_;
    }
    const double v = std::nearbyint(mean_ + std_ * z);
    if (v < 0.0) {
      ++saturated_;
      return AdcSample::from_raw(0);
    }
    if (v > AdcSample::kMax) {
      ++saturated_;
      return AdcSample::from_raw(AdcSample::kMax);
    }
    return AdcSample::from_raw(static_cast<std::uint16_t>(v));
  }

  /// Number of draws clamped at 0 or 4095 so far.
  std::size_t saturation_count() const noexcept { return saturated_; }

 private:
  UniformStream uniform_;
  BoxMullerNormal normal_;
  double mean_ = 0.0;
  double std_ = 1.0;
  double skew_ = 0.0;
  double delta_ = 0.0;
  double z_mean_ = 0.0;
  double z_std_ = 1.0;
  std::size_t saturated_ = 0;
};

/// Replays a recorded trace; throws StreamUnderrun once exhausted.
class TraceAdcSource final : public AdcSource {
 public:
  explicit TraceAdcSource(AdcTrace trace) : trace_(std::move(trace)) {}

  AdcSample next() override {
    if (pos_ >= trace_.samples.size())
      throw StreamUnderrun("trace exhausted after " + std::to_string(pos_) + " samples");
    return trace_.samples[pos_++];
  }

  std::size_t remaining() const noexcept { return trace_.samples.size() - pos_; }

 private:
  AdcTrace trace_;
  std::size_t pos_ = 0;
};

/// Replaces each code v by 4095 - v with probability 1/2, one PRNG bit per
/// sample.
class FlipCorrector {
 public:
  explicit FlipCorrector(std::uint64_t seed) : bits_(seed, 0xF11F) {}

  AdcSample operator()(AdcSample s) noexcept {
    if (left_ == 0) {
      word_ = bits_.next_u64();
      left_ = 64;
    }
    const bool flip = word_ & 1u;
    word_ >>= 1;
    --left_;
    return flip ? s.mirrored() : s;
  }

 private:
  UniformStream bits_;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

/// Flip-corrected view of another source.
class FlipCorrectedSource final : public AdcSource {
 public:
  FlipCorrectedSource(std::unique_ptr<AdcSource> inner, std::uint64_t seed)
      : inner_(std::move(inner)), flip_(seed) {}

  AdcSample next() override { return flip_(inner_->next()); }

 private:
  std::unique_ptr<AdcSource> inner_;
  FlipCorrector flip_;
};

inline AdcTrace simulate_raw(const NoiseSourceModel& model, std::size_t n,
                             std::size_t* saturated = nullptr) {
  if (n < 1) throw DomainError("simulate_raw: n must be >= 1");
  SimulatedAdcSource src(model);
  AdcTrace t;
  t.temperature_celsius = model.temperature_celsius;
  t.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.samples.push_back(src.next());
  if (saturated) *saturated = src.saturation_count();
  return t;
}

inline AdcTrace flip_correct(const AdcTrace& trace, std::uint64_t seed) {
  if (trace.empty()) throw DomainError("flip_correct: trace is empty");
  FlipCorrector flip(seed);
  AdcTrace out;
  out.temperature_celsius = trace.temperature_celsius;
  out.samples.reserve(trace.size());
  for (auto s : trace.samples) out.samples.push_back(flip(s));
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses the trace text format: one base-10 integer in [0, 4095] per line,
/// optionally preceded by a `# temperature_celsius=<real>` header line.
inline AdcTrace parse_trace(std::istream& in, const std::string& source_name) {
  AdcTrace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      constexpr std::string_view key = "temperature_celsius=";
      auto body = detail::trim(text.substr(1));
      if (lineno != 1 || !body.starts_with(key))
        throw ParseError(source_name, lineno, "unexpected comment line");
      const std::string num(detail::trim(body.substr(key.size())));
      try {
        std::size_t used = 0;
        const double t = std::stod(num, &used);
        if (used != num.size() || !std::isfinite(t)) throw std::invalid_argument(num);
        trace.temperature_celsius = t;
      } catch (const std::exception&) {
        throw ParseError(source_name, lineno, "bad temperature '" + num + "'");
      }
      continue;
    }
    long long v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
      throw ParseError(source_name, lineno, "not an integer: '" + std::string(text) + "'");
    if (v < 0 || v > AdcSample::kMax)
      throw ParseError(source_name, lineno,
                       "value " + std::to_string(v) + " outside [0, 4095]");
    trace.samples.push_back(AdcSample::from_raw(static_cast<std::uint16_t>(v)));
  }
  if (trace.empty()) throw ParseError(source_name, 0, "empty trace");
  return trace;
}

inline AdcTrace replay_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_trace(in, path);
}

inline void write_trace(std::ostream& out, const AdcTrace& trace) {
  if (trace.temperature_celsius) out << "# temperature_celsius=" << *trace.temperature_celsius << '\n';
  for (auto s : trace.samples) out << s.value() << '\n';
}

/// Sample autocorrelation at lags 1..max_lag. Values near 0 support the
/// i.i.d. assumption made for both simulated and replayed traces.
inline std::vector<double> autocorrelation(const AdcTrace& trace, std::size_t max_lag) {
  const auto x = trace.values();
  const double m = mean(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  std::vector<double> r;
  for (std::size_t k = 1; k <= max_lag && k < x.size(); ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < x.size(); ++i) ck += (x[i] - m) * (x[i + k] - m);
    r.push_back(c0 > 0.0 ? ck / c0 : 0.0);
  }
  return r;
}

struct TemperatureFit {
  NoiseSourceModel model;
  LineFit mean_fit;
  LineFit std_fit;
};

/// Least-squares affine fits of per-trace mean and std against temperature.
inline TemperatureFit fit_temperature_curves(const std::vector<AdcTrace>& traces) {
  std::vector<double> temps, means, stds;
  std::set<double> distinct;
  for (const auto& t : traces) {
    if (t.empty()) throw InsufficientDataError("fit_temperature_model: empty trace");
    if (!t.temperature_celsius)
      throw InsufficientDataError("fit_temperature_model: trace without temperature");
    const auto s = summarize(t.values());
    temps.push_back(*t.temperature_celsius);
    means.push_back(s.mean());
    stds.push_back(s.stddev());
    distinct.insert(*t.temperature_celsius);
  }
  if (distinct.size() < 2)
    throw InsufficientDataError("fit_temperature_model: need traces at >= 2 distinct temperatures");
  TemperatureFit f;
  f.mean_fit = fit_line(temps, means);
  f.std_fit = fit_line(temps, stds);
  f.model.mean_curve = {f.mean_fit.intercept, f.mean_fit.slope};
  f.model.std_curve = {f.std_fit.intercept, f.std_fit.slope};
  return f;
}

inline NoiseSourceModel fit_temperature_model(const std::vector<AdcTrace>& traces) {
  return fit_temperature_curves(traces).model;
}

}  // namespace prva

#endif  // PRVA_NOISE_SOURCE_HPP
