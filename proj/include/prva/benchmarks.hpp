#ifndef PRVA_BENCHMARKS_HPP
#define PRVA_BENCHMARKS_HPP

// The twelve Monte Carlo benchmark kernels. Each kernel declares its random
// inputs as TargetDistributions and a vectorized compute step over the input
// columns, so every variate goes through one timed fill call per column.
//
// All default parameters can be overridden per run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prva/errors.hpp"
#include "prva/kernel_density.hpp"
#include "prva/noise_source.hpp"
#include "prva/random.hpp"
#include "prva/samplers.hpp"
#include "prva/transform.hpp"

namespace prva {

enum class Backend { prva, baseline };

inline const char* to_string(Backend b) noexcept { return b == Backend::prva ? "prva" : "baseline"; }

inline Backend parse_backend(const std::string& s) {
  if (s == "prva") return Backend::prva;
  if (s == "baseline") return Backend::baseline;
  throw UsageError("unknown backend '" + s + "' (expected prva or baseline)");
}

using Parameters = std::map<std::string, double>;

struct BenchmarkSpec {
  std::string name;
  std::size_t n_samples = 10000;
  Backend backend = Backend::baseline;
  std::uint64_t seed = 0;
  Parameters parameters;
  /// Simulated source for the PRVA backend.
  NoiseSourceModel noise;
  PipelineConfig pipeline;
  /// Number of baseline draws used to fit the KDE stand-in for Student-T and
  /// empirical inputs on the PRVA backend.
  std::size_t kde_fit_samples = 10000;
};

struct BenchmarkOutput {
  std::vector<double> samples;
  std::chrono::nanoseconds rng_time{0};
  std::chrono::nanoseconds total_time{0};
  std::size_t rng_call_count = 0;

  double sampling_fraction() const noexcept {
    return total_time.count() > 0
               ? static_cast<double>(rng_time.count()) / static_cast<double>(total_time.count())
               : 0.0;
  }
};

using Columns = std::span<const std::span<const double>>;

struct BenchmarkKernel {
  std::string name;          // identifier used on the command line
  std::string display_name;  // application name for reports
  std::string sampling_distribution;
  Parameters defaults;
  std::function<std::vector<TargetDistribution>(const Parameters&)> inputs;
  std::function<void(const Parameters&, Columns, std::span<double>)> compute;
};

inline double param(const Parameters& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw ParameterError("missing benchmark parameter '" + key + "'");
  return it->second;
}

namespace detail {

inline GaussianSpec gauss(const Parameters& p, const std::string& mean_key, const std::string& std_key) {
  try {
    return GaussianSpec(param(p, mean_key), param(p, std_key));
  } catch (const ValidationError& e) {
    throw ParameterError(mean_key + "/" + std_key + ": " + e.what());
  }
}

inline GaussianMixture indexed_mixture(const Parameters& p, const std::string& prefix) {
  std::vector<double> m, s, w;
  for (std::size_t i = 0; p.count(prefix + "mean_" + std::to_string(i)); ++i) {
    const auto k = std::to_string(i);
    m.push_back(param(p, prefix + "mean_" + k));
    s.push_back(param(p, prefix + "std_" + k));
    w.push_back(param(p, prefix + "weight_" + k));
  }
  try {
    return GaussianMixture(m, s, w);
  } catch (const ValidationError& e) {
    throw ParameterError(std::string("mixture parameters: ") + e.what());
  }
}

template <typename Op>
BenchmarkKernel arithmetic(std::string name, std::string display, Op op) {
  return {std::move(name),
          std::move(display),
          "Gaussian",
          {{"x_mean", 10.0}, {"x_std", 1.0}, {"y_mean", 5.0}, {"y_std", 0.5}},
          [](const Parameters& p) {
            return std::vector<TargetDistribution>{gauss(p, "x_mean", "x_std"), gauss(p, "y_mean", "y_std")};
          },
          [op](const Parameters&, Columns c, std::span<double> out) {
            const auto x = c[0], y = c[1];
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(x[i], y[i]);
          }};
}

inline std::vector<BenchmarkKernel> make_catalog() {
  std::vector<BenchmarkKernel> k;

  k.push_back({"gaussian_sampling", "Gaussian Sampling", "Gaussian",
               {{"mean", 0.0}, {"std", 1.0}},
               [](const Parameters& p) { return std::vector<TargetDistribution>{gauss(p, "mean", "std")}; },
               [](const Parameters&, Columns c, std::span<double> out) {
                 std::copy(c[0].begin(), c[0].end(), out.begin());
               }});

  k.push_back({"gaussian_mixture", "Gaussian Mixture", "Mixture",
               {{"mean_0", -2.0}, {"std_0", 0.5}, {"weight_0", 0.3},
                {"mean_1", 0.0}, {"std_1", 1.0}, {"weight_1", 0.5},
                {"mean_2", 3.0}, {"std_2", 0.75}, {"weight_2", 0.2}},
               [](const Parameters& p) { return std::vector<TargetDistribution>{indexed_mixture(p, "")}; },
               [](const Parameters&, Columns c, std::span<double> out) {
                 std::copy(c[0].begin(), c[0].end(), out.begin());
               }});

  k.push_back(arithmetic("addition", "Addition", [](double x, double y) { return x + y; }));
  k.push_back(arithmetic("divide", "Divide", [](double x, double y) { return x / y; }));
  k.push_back(arithmetic("multiply", "Multiply", [](double x, double y) { return x * y; }));
  k.push_back(arithmetic("subtract", "Subtract", [](double x, double y) { return x - y; }));

  // Beam deflection through a density gradient, in microradians:
  // eps = K L (delta_rho / delta_y) / n0 with K the Gladstone-Dale constant.
  k.push_back({"schlieren", "Schlieren", "Gaussian",
               {{"gladstone_dale_mean", 2.26e-4}, {"gladstone_dale_std", 2e-6},
                {"length_mean", 0.1}, {"length_std", 1e-3},
                {"delta_rho_mean", 0.2}, {"delta_rho_std", 0.01},
                {"delta_y_mean", 0.01}, {"delta_y_std", 2e-4},
                {"n0", 1.000293}},
               [](const Parameters& p) {
                 return std::vector<TargetDistribution>{
                     gauss(p, "gladstone_dale_mean", "gladstone_dale_std"), gauss(p, "length_mean", "length_std"),
                     gauss(p, "delta_rho_mean", "delta_rho_std"), gauss(p, "delta_y_mean", "delta_y_std")};
               },
               [](const Parameters& p, Columns c, std::span<double> out) {
                 const double scale = 1e6 / param(p, "n0");
                 for (std::size_t i = 0; i < out.size(); ++i)
                   out[i] = scale * c[0][i] * c[1][i] * c[2][i] / c[3][i];
               }});

  // Falling-ball viscometer: mu_m = mu_c (rho_b - rho_m) / (rho_b - rho_c) * t_m / t_c.
  k.push_back({"nist_viscosity", "NIST-UM Dynamic Viscosity", "Gaussian",
               {{"mu_c_mean", 4.63}, {"mu_c_std", 0.0463},
                {"rho_b_mean", 2217.0}, {"rho_b_std", 0.5},
                {"rho_c_mean", 810.0}, {"rho_c_std", 0.5},
                {"rho_m_mean", 1180.0}, {"rho_m_std", 0.5},
                {"t_c_mean", 36.6}, {"t_c_std", 5.49},
                {"t_m_mean", 61.0}, {"t_m_std", 6.1}},
               [](const Parameters& p) {
                 return std::vector<TargetDistribution>{
                     gauss(p, "mu_c_mean", "mu_c_std"), gauss(p, "rho_b_mean", "rho_b_std"),
                     gauss(p, "rho_c_mean", "rho_c_std"), gauss(p, "rho_m_mean", "rho_m_std"),
                     gauss(p, "t_c_mean", "t_c_std"), gauss(p, "t_m_mean", "t_m_std")};
               },
               [](const Parameters&, Columns c, std::span<double> out) {
                 for (std::size_t i = 0; i < out.size(); ++i)
                   out[i] = c[0][i] * (c[1][i] - c[3][i]) / (c[1][i] - c[2][i]) * c[5][i] / c[4][i];
               }});

  // alpha = (L1 - L0) / (L0 (T1 - T0)) in 1e-6 / K; each input is
  // location + scale * t(dof).
  k.push_back({"nist_thermal_expansion", "NIST-UM Thermal Expansion Coefficient", "Student-T",
               {{"dof", 3.0},
                {"l0", 1.0}, {"l0_scale", 1e-4},
                {"l1", 1.00147}, {"l1_scale", 2e-4},
                {"t0", 288.15}, {"t0_scale", 0.02},
                {"t1", 373.15}, {"t1_scale", 0.05}},
               [](const Parameters& p) {
                 const StudentT t{param(p, "dof")};
                 if (!(t.dof > 0.0)) throw ParameterError("dof must be > 0");
                 return std::vector<TargetDistribution>(4, t);
               },
               [](const Parameters& p, Columns c, std::span<double> out) {
                 const double l0 = param(p, "l0"), l0s = param(p, "l0_scale");
                 const double l1 = param(p, "l1"), l1s = param(p, "l1_scale");
                 const double t0 = param(p, "t0"), t0s = param(p, "t0_scale");
                 const double t1 = param(p, "t1"), t1s = param(p, "t1_scale");
                 for (std::size_t i = 0; i < out.size(); ++i) {
                   const double L0 = l0 + l0s * c[0][i];
                   const double L1 = l1 + l1s * c[1][i];
                   const double T0 = t0 + t0s * c[2][i];
                   const double T1 = t1 + t1s * c[3][i];
                   out[i] = 1e6 * (L1 - L0) / (L0 * (T1 - T0));
                 }
               }});

  // Herd-immunity threshold max(0, 1 - 1/R0) with R0 from a mixture of
  // published-estimate-like components.
  k.push_back({"covid_r0", "Medical Covid-19 R0", "Mixture",
               {{"r0_mean_0", 2.2}, {"r0_std_0", 0.4}, {"r0_weight_0", 0.25},
                {"r0_mean_1", 2.79}, {"r0_std_1", 0.5}, {"r0_weight_1", 0.25},
                {"r0_mean_2", 3.28}, {"r0_std_2", 0.6}, {"r0_weight_2", 0.25},
                {"r0_mean_3", 5.7}, {"r0_std_3", 1.0}, {"r0_weight_3", 0.25}},
               [](const Parameters& p) { return std::vector<TargetDistribution>{indexed_mixture(p, "r0_")}; },
               [](const Parameters&, Columns c, std::span<double> out) {
                 for (std::size_t i = 0; i < out.size(); ++i) {
                   const double r0 = c[0][i];
                   out[i] = r0 > 1.0 ? 1.0 - 1.0 / r0 : 0.0;
                 }
               }});

  k.push_back({"geometric_brownian_motion", "Geometric Brownian Motion", "Gaussian",
               {{"s0", 100.0}, {"mu", 0.05}, {"sigma", 0.2}, {"t", 1.0}},
               [](const Parameters&) { return std::vector<TargetDistribution>{GaussianSpec(0.0, 1.0)}; },
               [](const Parameters& p, Columns c, std::span<double> out) {
                 const double s0 = param(p, "s0"), mu = param(p, "mu"), sigma = param(p, "sigma"), t = param(p, "t");
                 const double drift = (mu - 0.5 * sigma * sigma) * t;
                 const double vol = sigma * std::sqrt(t);
                 for (std::size_t i = 0; i < out.size(); ++i) out[i] = s0 * std::exp(drift + vol * c[0][i]);
               }});

  k.push_back({"black_scholes", "Black Scholes Monte Carlo Pricing", "Gaussian",
               {{"s0", 100.0}, {"k", 100.0}, {"r", 0.05}, {"sigma", 0.2}, {"t", 1.0}},
               [](const Parameters&) { return std::vector<TargetDistribution>{GaussianSpec(0.0, 1.0)}; },
               [](const Parameters& p, Columns c, std::span<double> out) {
                 const double s0 = param(p, "s0"), strike = param(p, "k"), r = param(p, "r"),
                              sigma = param(p, "sigma"), t = param(p, "t");
                 const double drift = (r - 0.5 * sigma * sigma) * t;
                 const double vol = sigma * std::sqrt(t);
                 const double discount = std::exp(-r * t);
                 for (std::size_t i = 0; i < out.size(); ++i)
                   out[i] = discount * std::max(s0 * std::exp(drift + vol * c[0][i]) - strike, 0.0);
               }});
  return k;
}

}  // namespace detail

inline const std::vector<BenchmarkKernel>& benchmark_catalog() {
  static const std::vector<BenchmarkKernel> catalog = detail::make_catalog();
  return catalog;
}

inline std::vector<std::string> benchmark_names() {
  std::vector<std::string> names;
  for (const auto& k : benchmark_catalog()) names.push_back(k.name);
  return names;
}

inline const BenchmarkKernel& find_benchmark(const std::string& name) {
  for (const auto& k : benchmark_catalog())
    if (k.name == name) return k;
  std::string valid;
  for (const auto& n : benchmark_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw CatalogError("unknown benchmark '" + name + "'; valid names: " + valid);
}

/// Defaults overlaid with overrides. Unknown override keys are rejected.
inline Parameters resolve_parameters(const BenchmarkKernel& kernel, const Parameters& overrides) {
  Parameters p = kernel.defaults;
  for (const auto& [key, value] : overrides) {
    if (!p.count(key)) throw ParameterError("benchmark '" + kernel.name + "' has no parameter '" + key + "'");
    p[key] = value;
  }
  return p;
}

/// Source of variates for benchmark inputs. prepare() runs untimed; fill()
/// is the instrumented sampling call.
class VariateBackend {
 public:
  virtual ~VariateBackend() = default;
  virtual void prepare(std::span<const TargetDistribution> inputs) = 0;
  virtual void fill(std::size_t input, std::span<double> out) = 0;
};

/// Software reference generators: Box-Muller Gaussians, component choice plus
/// Box-Muller for mixtures, Gaussian/chi-square ratio for Student-T,
/// bootstrap resampling for empirical data.
class BaselineBackend final : public VariateBackend {
 public:
  explicit BaselineBackend(std::uint64_t seed) : u_(derive_seed(seed, {10}), 0xBA5E) {}

  void prepare(std::span<const TargetDistribution> inputs) override {
    inputs_.assign(inputs.begin(), inputs.end());
    selectors_.clear();
    students_.clear();
    for (const auto& in : inputs_) {
      validate(in);
      const auto* mix = std::get_if<GaussianMixture>(&in);
      selectors_.emplace_back(mix ? mix->weights() : std::vector<double>{1.0});
      const auto* t = std::get_if<StudentT>(&in);
      students_.emplace_back(t ? t->dof : 1.0);
    }
  }

  void fill(std::size_t input, std::span<double> out) override {
    const auto& in = inputs_.at(input);
    if (const auto* g = std::get_if<GaussianSpec>(&in)) {
      const double m = g->mean(), s = g->std();
      for (auto& x : out) x = m + s * normal_(u_);
    } else if (const auto* mix = std::get_if<GaussianMixture>(&in)) {
      const auto& sel = selectors_[input];
      for (auto& x : out) {
        const auto i = sel(u_.next_unit());
        x = mix->means()[i] + mix->stds()[i] * normal_(u_);
      }
    } else if (std::holds_alternative<StudentT>(in)) {
      const auto& gen = students_[input];
      for (auto& x : out) x = gen(u_, normal_);
    } else {
      const auto& data = std::get<Empirical>(in).data;
      const double n = static_cast<double>(data.size());
      for (auto& x : out)
        x = data[std::min(static_cast<std::size_t>(u_.next_unit() * n), data.size() - 1)];
    }
  }

 private:
  UniformStream u_;
  BoxMullerNormal normal_;
  std::vector<TargetDistribution> inputs_;
  std::vector<ComponentSelector> selectors_;
  std::vector<StudentTGenerator> students_;
};

/// Simulated accelerator: every variate is one flip-corrected, dithered,
/// affinely transformed ADC sample. Inputs that are not Gaussian mixtures are
/// first approximated by a KDE mixture fitted to baseline draws.
class PrvaBackend final : public VariateBackend {
 public:
  PrvaBackend(std::uint64_t seed, const NoiseSourceModel& noise, PipelineConfig config,
              std::size_t kde_fit_samples)
      : seed_(seed),
        pipeline_(GaussianPipeline::simulated(noise, derive_seed(seed, {20}), config)),
        kde_fit_samples_(kde_fit_samples) {}

  void prepare(std::span<const TargetDistribution> inputs) override {
    samplers_.clear();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& in = inputs[i];
      validate(in);
      if (const auto* g = std::get_if<GaussianSpec>(&in)) {
        samplers_.emplace_back(GaussianMixture({g->mean()}, {g->std()}, {1.0}), pipeline_);
      } else if (const auto* mix = std::get_if<GaussianMixture>(&in)) {
        samplers_.emplace_back(*mix, pipeline_);
      } else if (const auto* t = std::get_if<StudentT>(&in)) {
        UniformStream u(derive_seed(seed_, {30, i}), 0x5717);
        const auto draws = sample_student_t(t->dof, kde_fit_samples_, u);
        samplers_.emplace_back(fit_kde(draws, SilvermanBandwidth{}), pipeline_);
      } else {
        samplers_.emplace_back(fit_kde(std::get<Empirical>(in).data, SilvermanBandwidth{}), pipeline_);
      }
    }
  }

  void fill(std::size_t input, std::span<double> out) override {
    const auto& s = samplers_.at(input);
    for (auto& x : out) x = s(pipeline_, pipeline_.uniform());
  }

  GaussianPipeline& pipeline() noexcept { return pipeline_; }

 private:
  std::uint64_t seed_;
  GaussianPipeline pipeline_;
  std::size_t kde_fit_samples_;
  std::vector<PrvaMixtureSampler> samplers_;
};

inline std::unique_ptr<VariateBackend> make_backend(const BenchmarkSpec& spec) {
  if (spec.backend == Backend::baseline) return std::make_unique<BaselineBackend>(spec.seed);
  return std::make_unique<PrvaBackend>(spec.seed, spec.noise, spec.pipeline, spec.kde_fit_samples);
}

/// Runs one benchmark. Input columns are filled first (each fill timed and
/// counted as rng work), then the kernel computes the output array.
inline BenchmarkOutput run_benchmark(const BenchmarkSpec& spec) {
  const auto& kernel = find_benchmark(spec.name);
  if (spec.n_samples < 1) throw ParameterError("n_samples must be >= 1");
  const Parameters params = resolve_parameters(kernel, spec.parameters);
  const auto inputs = kernel.inputs(params);

  auto backend = make_backend(spec);
  backend->prepare(inputs);

  const std::size_t n = spec.n_samples;
  std::vector<std::vector<double>> columns(inputs.size(), std::vector<double>(n));
  std::vector<std::span<const double>> views(columns.begin(), columns.end());
  BenchmarkOutput out;
  out.samples.resize(n);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto t0 = clock::now();
    backend->fill(i, columns[i]);
    out.rng_time += std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0);
    out.rng_call_count += n;
  }
  kernel.compute(params, views, out.samples);
  out.total_time = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start);
  out.rng_time = std::min(out.rng_time, out.total_time);
  return out;
}

}  // namespace prva

#endif  // PRVA_BENCHMARKS_HPP
