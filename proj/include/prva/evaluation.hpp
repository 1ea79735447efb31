#ifndef PRVA_EVALUATION_HPP
#define PRVA_EVALUATION_HPP

// Empirical Wasserstein-1 distance, cached reference runs, and assembly of
// per-benchmark comparison reports (accuracy ratios, sampling fractions,
// speedups).

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "prva/benchmarks.hpp"
#include "prva/errors.hpp"
#include "prva/math.hpp"
#include "prva/random.hpp"
#include "prva/transform.hpp"

namespace prva {

/// Sorted, finite samples.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  explicit EmpiricalDistribution(std::vector<double> samples) : sorted_(std::move(samples)) {
    for (double x : sorted_)
      if (!std::isfinite(x)) throw DomainError("empirical distribution: non-finite sample");
    std::sort(sorted_.begin(), sorted_.end());
  }

  /// Caller guarantees `samples` is ascending and finite.
  static EmpiricalDistribution from_sorted(std::vector<double> samples) {
    EmpiricalDistribution d;
    d.sorted_ = std::move(samples);
    return d;
  }

  std::size_t size() const noexcept { return sorted_.size(); }
  bool empty() const noexcept { return sorted_.empty(); }
  const std::vector<double>& samples() const noexcept { return sorted_; }
  double operator[](std::size_t i) const noexcept { return sorted_[i]; }

 private:
  std::vector<double> sorted_;
};

namespace detail {

/// Mean absolute difference of order statistics (equal sizes only).
inline double w1_order_statistics(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

/// Exact integral of |F_a - F_b| over the merged support.
inline double w1_ecdf(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const std::size_t n = a.size(), m = b.size();
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  std::size_t i = 0, j = 0;
  double prev = std::min(a[0], b[0]);
  double area = 0.0;
  while (i < n || j < m) {
    const bool take_a = j >= m || (i < n && a[i] <= b[j]);
    const double x = take_a ? a[i] : b[j];
    area += std::abs(static_cast<double>(i) / dn - static_cast<double>(j) / dm) * (x - prev);
    prev = x;
    if (take_a) ++i;
    else ++j;
  }
  return area;
}

}  // namespace detail

inline double wasserstein1(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.empty() || b.empty()) throw DomainError("wasserstein1: empty sample set");
  if (a.size() == b.size()) return detail::w1_order_statistics(a, b);
  return detail::w1_ecdf(a, b);
}

/// Exact W1 between an empirical distribution and a Gaussian, via the
/// quantile coupling integral of |x_(i) - Q(p)| over each p-cell.
inline double wasserstein1_to_gaussian(const EmpiricalDistribution& a, const GaussianSpec& g) {
  if (a.empty()) throw DomainError("wasserstein1: empty sample set");
  const std::size_t n = a.size();
  const double dn = static_cast<double>(n);
  // phi(Q(p)), with phi(Q(0)) = phi(Q(1)) = 0.
  auto phiq = [](double p) { return (p <= 0.0 || p >= 1.0) ? 0.0 : normal_pdf(normal_quantile(p)); };
  double total = 0.0;
  double phi_lo = 0.0;  // phi(Q(i/n))
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / dn;
    const double hi = static_cast<double>(i + 1) / dn;
    const double phi_hi = i + 1 == n ? 0.0 : phiq(hi);
    const double x = (a[i] - g.mean()) / g.std();
    const double px = normal_cdf(x);
    // integral of Q over [u, v] is phi(Q(u)) - phi(Q(v))
    double cell;
    if (px <= lo) {
      cell = (phi_lo - phi_hi) - x * (hi - lo);
    } else if (px >= hi) {
      cell = x * (hi - lo) - (phi_lo - phi_hi);
    } else {
      const double phix = normal_pdf(x);
      cell = x * (px - lo) - (phi_lo - phix) + (phix - phi_hi) - x * (hi - px);
    }
    total += std::max(cell, 0.0);
    phi_lo = phi_hi;
  }
  return total * g.std();
}

/// Quantiles of a Gaussian at the cell midpoints (i + 1/2) / n.
inline EmpiricalDistribution gaussian_quantile_grid(std::size_t n, const GaussianSpec& g) {
  if (n == 0) throw DomainError("quantile grid needs n >= 1");
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i)
    q[i] = g.mean() + g.std() * normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return EmpiricalDistribution::from_sorted(std::move(q));
}

// ---------------------------------------------------------------------------
// Reference cache

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xCBF29CE484222325ULL) noexcept {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::data, "cannot read " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

/// Dedicated seed for reference runs; distinct from any run seed derivation.
inline constexpr std::uint64_t kReferenceSeed = 0x5EEDF00DCAFE0001ULL;

inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("PRVA_CACHE_DIR"); env && *env) return env;
  return std::filesystem::path("prva_cache");
}

struct ReferenceKey {
  std::string benchmark;
  Parameters parameters;  // fully resolved
  std::size_t n_ref = 0;
  std::uint64_t seed = kReferenceSeed;

  std::string canonical() const {
    std::ostringstream s;
    s.precision(17);
    s << benchmark << '|';
    for (const auto& [k, v] : parameters) s << k << '=' << v << ';';
    s << '|' << n_ref << '|' << seed;
    return s.str();
  }

  std::string stem() const {
    const auto c = canonical();
    return benchmark + "-" + hex64(fnv1a64(c.data(), c.size()));
  }
};

namespace detail {

inline std::vector<unsigned char> to_le_bytes(const std::vector<double>& v) {
  std::vector<unsigned char> bytes(v.size() * 8);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto u = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(u >> (8 * b));
  }
  return bytes;
}

inline std::vector<double> from_le_bytes(const std::vector<unsigned char>& bytes) {
  std::vector<double> v(bytes.size() / 8);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    v[i] = std::bit_cast<double>(u);
  }
  return v;
}

inline void atomic_write(const std::filesystem::path& path, const void* data, std::size_t len) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(counter++) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::data, "cannot write " + tmp.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!out) throw Error(ErrorKind::data, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// On-disk store of sorted reference samples: `<stem>.f64` holds
/// little-endian doubles, `<stem>.json` the key and an FNV-1a checksum.
class ReferenceCache {
 public:
  explicit ReferenceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path data_path(const ReferenceKey& k) const { return dir_ / (k.stem() + ".f64"); }
  std::filesystem::path sidecar_path(const ReferenceKey& k) const { return dir_ / (k.stem() + ".json"); }

  /// Cached samples if present and intact; nullopt on miss or corruption.
  std::optional<EmpiricalDistribution> load(const ReferenceKey& key) const {
    std::error_code ec;
    if (!std::filesystem::exists(data_path(key), ec) || !std::filesystem::exists(sidecar_path(key), ec))
      return std::nullopt;
    try {
      std::ifstream js(sidecar_path(key));
      const auto meta = nlohmann::json::parse(js);
      if (meta.at("key").get<std::string>() != key.canonical()) return std::nullopt;
      const auto count = meta.at("count").get<std::size_t>();
      std::ifstream in(data_path(key), std::ios::binary);
      std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (bytes.size() != count * 8) return std::nullopt;
      if (hex64(fnv1a64(bytes.data(), bytes.size())) != meta.at("checksum").get<std::string>())
        return std::nullopt;
      auto v = detail::from_le_bytes(bytes);
      if (!std::is_sorted(v.begin(), v.end())) return std::nullopt;
      return EmpiricalDistribution::from_sorted(std::move(v));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  void store(const ReferenceKey& key, const EmpiricalDistribution& ref) const {
    std::filesystem::create_directories(dir_);
    const auto bytes = detail::to_le_bytes(ref.samples());
    nlohmann::json meta{{"key", key.canonical()},
                        {"benchmark", key.benchmark},
                        {"parameters", key.parameters},
                        {"n_ref", key.n_ref},
                        {"seed", key.seed},
                        {"count", ref.size()},
                        {"format", "little-endian float64"},
                        {"checksum", hex64(fnv1a64(bytes.data(), bytes.size()))}};
    // Data first, sidecar last: a sidecar only exists for complete data.
    detail::atomic_write(data_path(key), bytes.data(), bytes.size());
    const auto text = meta.dump(2);
    detail::atomic_write(sidecar_path(key), text.data(), text.size());
  }

 private:
  std::filesystem::path dir_;
};

/// Large baseline run of a benchmark, sorted, read from or written to the
/// cache. Corrupted cache entries are regenerated.
inline EmpiricalDistribution build_reference(const std::string& benchmark, const Parameters& overrides,
                                             std::size_t n_ref, const ReferenceCache& cache,
                                             std::uint64_t seed = kReferenceSeed) {
  if (n_ref == 0) throw DomainError("build_reference: n_ref must be >= 1");
  const auto& kernel = find_benchmark(benchmark);
  ReferenceKey key{benchmark, resolve_parameters(kernel, overrides), n_ref, seed};
  if (auto hit = cache.load(key)) return std::move(*hit);
  BenchmarkSpec spec;
  spec.name = benchmark;
  spec.n_samples = n_ref;
  spec.backend = Backend::baseline;
  spec.seed = seed;
  spec.parameters = overrides;
  EmpiricalDistribution ref(run_benchmark(spec).samples);
  cache.store(key, ref);
  return ref;
}

// ---------------------------------------------------------------------------
// Suite evaluation and report assembly

/// Accelerator cost per sample relative to one software Gaussian sample, for
/// the modelled speedup column 1 / ((1 - f) + f * ratio).
inline constexpr double kDefaultCostRatio = 1.0 / 2815.0;

struct SuiteOptions {
  std::size_t repeats = 100;
  std::size_t n_samples = 10000;
  std::size_t n_ref = 1000000;
  std::vector<std::string> benchmarks;  // empty = all twelve
  std::uint64_t seed = 1;
  std::uint64_t reference_seed = kReferenceSeed;
  std::map<std::string, Parameters> parameters;
  NoiseSourceModel noise;
  PipelineConfig pipeline;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::optional<std::filesystem::path> cache_dir;
  double cost_ratio = kDefaultCostRatio;
};

struct RunRecord {
  std::string benchmark;
  Backend backend = Backend::baseline;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double w1 = std::numeric_limits<double>::quiet_NaN();
  std::int64_t rng_ns = 0;
  std::int64_t total_ns = 0;
  std::size_t rng_calls = 0;
  std::string error;  // empty on success
};

struct BenchmarkRow {
  std::string name;
  std::string display_name;
  double w1_prva = std::numeric_limits<double>::quiet_NaN();
  double w1_baseline = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double sampling_fraction = std::numeric_limits<double>::quiet_NaN();       // baseline, percent
  double sampling_fraction_prva = std::numeric_limits<double>::quiet_NaN();  // percent
  double speedup = std::numeric_limits<double>::quiet_NaN();                 // wall time
  double model_speedup = std::numeric_limits<double>::quiet_NaN();           // cost model
  std::size_t repeats = 0;
  std::string status = "ok";
};

struct ReportAggregates {
  double mean_ratio = std::numeric_limits<double>::quiet_NaN();
  double median_ratio = std::numeric_limits<double>::quiet_NaN();
  double mean_speedup = std::numeric_limits<double>::quiet_NaN();
  double median_speedup = std::numeric_limits<double>::quiet_NaN();
  double mean_model_speedup = std::numeric_limits<double>::quiet_NaN();
  double median_model_speedup = std::numeric_limits<double>::quiet_NaN();
  double mean_sampling_fraction = std::numeric_limits<double>::quiet_NaN();
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  ReportAggregates aggregates;
  std::vector<RunRecord> runs;
  double elapsed_seconds = 0.0;
};

inline std::uint64_t run_seed(std::uint64_t suite_seed, std::size_t bench_index, Backend b, std::size_t repeat) {
  return derive_seed(suite_seed, {bench_index, b == Backend::prva ? 1u : 2u, repeat});
}

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline ReportAggregates compute_aggregates(const std::vector<BenchmarkRow>& rows) {
  std::vector<double> ratios, speedups, model, fractions;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    if (std::isfinite(r.ratio)) ratios.push_back(r.ratio);
    if (std::isfinite(r.speedup)) speedups.push_back(r.speedup);
    if (std::isfinite(r.model_speedup)) model.push_back(r.model_speedup);
    if (std::isfinite(r.sampling_fraction)) fractions.push_back(r.sampling_fraction);
  }
  ReportAggregates a;
  a.mean_ratio = detail::mean_of(ratios);
  a.median_ratio = detail::median_of(ratios);
  a.mean_speedup = detail::mean_of(speedups);
  a.median_speedup = detail::median_of(speedups);
  a.mean_model_speedup = detail::mean_of(model);
  a.median_model_speedup = detail::median_of(model);
  a.mean_sampling_fraction = detail::mean_of(fractions);
  return a;
}

/// Reduces run records to one row per benchmark (per-run W1 averaged over
/// repeats) plus aggregates. Row order follows the catalog.
inline BenchmarkReport assemble_report(std::vector<RunRecord> runs, double cost_ratio = kDefaultCostRatio) {
  BenchmarkReport report;
  for (const auto& kernel : benchmark_catalog()) {
    std::vector<double> w1[2], rng[2], total[2], frac[2];
    std::string error;
    bool present = false;
    std::size_t repeats = 0;
    for (const auto& r : runs) {
      if (r.benchmark != kernel.name) continue;
      present = true;
      if (!r.error.empty()) {
        if (error.empty()) error = r.error;
        continue;
      }
      const int b = r.backend == Backend::prva ? 0 : 1;
      w1[b].push_back(r.w1);
      rng[b].push_back(static_cast<double>(r.rng_ns));
      total[b].push_back(static_cast<double>(r.total_ns));
      frac[b].push_back(r.total_ns > 0 ? static_cast<double>(r.rng_ns) / static_cast<double>(r.total_ns) : 0.0);
      if (b == 1) ++repeats;
    }
    if (!present) continue;
    BenchmarkRow row;
    row.name = kernel.name;
    row.display_name = kernel.display_name;
    row.repeats = repeats;
    if (!error.empty() || w1[0].empty() || w1[1].empty()) {
      row.status = "failed: " + (error.empty() ? std::string("no completed runs") : error);
    } else {
      row.w1_prva = detail::mean_of(w1[0]);
      row.w1_baseline = detail::mean_of(w1[1]);
      row.ratio = row.w1_baseline > 0.0 ? row.w1_prva / row.w1_baseline : std::numeric_limits<double>::quiet_NaN();
      const double f = detail::mean_of(frac[1]);
      row.sampling_fraction = 100.0 * f;
      row.sampling_fraction_prva = 100.0 * detail::mean_of(frac[0]);
      const double tp = detail::mean_of(total[0]);
      row.speedup = tp > 0.0 ? detail::mean_of(total[1]) / tp : std::numeric_limits<double>::quiet_NaN();
      row.model_speedup = 1.0 / ((1.0 - f) + f * cost_ratio);
    }
    report.rows.push_back(std::move(row));
  }
  report.aggregates = compute_aggregates(report.rows);
  report.runs = std::move(runs);
  return report;
}

inline std::vector<std::string> resolve_filter(const std::vector<std::string>& filter) {
  if (filter.empty() || (filter.size() == 1 && filter[0] == "all")) return benchmark_names();
  std::vector<std::string> out;
  for (const auto& name : benchmark_names())
    if (std::find(filter.begin(), filter.end(), name) != filter.end()) out.push_back(name);
  for (const auto& f : filter) find_benchmark(f);  // throws CatalogError on unknown names
  return out;
}

/// For each selected benchmark and backend, `repeats` runs of n_samples, each
/// scored by W1 against the cached reference, then reduced into a report.
/// Failures are recorded per run and surface as failed rows.
inline BenchmarkReport evaluate_suite(const SuiteOptions& opt) {
  if (opt.repeats < 1) throw DomainError("evaluate_suite: repeats must be >= 1");
  if (opt.n_samples < 1) throw DomainError("evaluate_suite: n_samples must be >= 1");
  if (opt.n_ref < 1) throw DomainError("evaluate_suite: n_ref must be >= 1");
  const auto names = resolve_filter(opt.benchmarks);
  const ReferenceCache cache(opt.cache_dir.value_or(default_cache_dir()));
  const auto start = std::chrono::steady_clock::now();

  auto params_for = [&](const std::string& name) {
    const auto it = opt.parameters.find(name);
    return it == opt.parameters.end() ? Parameters{} : it->second;
  };
  auto index_of = [&](const std::string& name) {
    const auto all = benchmark_names();
    return static_cast<std::size_t>(std::find(all.begin(), all.end(), name) - all.begin());
  };

  std::size_t threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());

  // References (one job per benchmark).
  std::vector<std::optional<EmpiricalDistribution>> refs(names.size());
  std::vector<std::string> ref_errors(names.size());
  auto parallel_for = [threads](std::size_t count, auto&& job) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next++) < count;) job(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  };
  parallel_for(names.size(), [&](std::size_t i) {
    try {
      refs[i] = build_reference(names[i], params_for(names[i]), opt.n_ref, cache, opt.reference_seed);
    } catch (const std::exception& e) {
      ref_errors[i] = e.what();
    }
  });

  struct Job {
    std::size_t bench;
    Backend backend;
    std::size_t repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t b = 0; b < names.size(); ++b)
    for (std::size_t r = 0; r < opt.repeats; ++r)
      for (Backend be : {Backend::baseline, Backend::prva}) jobs.push_back({b, be, r});

  std::vector<RunRecord> runs(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto& job = jobs[j];
    RunRecord& rec = runs[j];
    rec.benchmark = names[job.bench];
    rec.backend = job.backend;
    rec.repeat = job.repeat;
    rec.seed = run_seed(opt.seed, index_of(rec.benchmark), job.backend, job.repeat);
    if (!refs[job.bench]) {
      rec.error = "reference: " + ref_errors[job.bench];
      return;
    }
    try {
      BenchmarkSpec spec;
      spec.name = rec.benchmark;
      spec.n_samples = opt.n_samples;
      spec.backend = job.backend;
      spec.seed = rec.seed;
      spec.parameters = params_for(rec.benchmark);
      spec.noise = opt.noise;
      spec.pipeline = opt.pipeline;
      auto out = run_benchmark(spec);
      rec.rng_ns = out.rng_time.count();
      rec.total_ns = out.total_time.count();
      rec.rng_calls = out.rng_call_count;
      rec.w1 = wasserstein1(EmpiricalDistribution(std::move(out.samples)), *refs[job.bench]);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });

  auto report = assemble_report(std::move(runs), opt.cost_ratio);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline double num_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j{{"benchmark", r.benchmark}, {"backend", to_string(r.backend)},
                   {"repeat", r.repeat},       {"seed", r.seed},
                   {"w1", detail::num(r.w1)},  {"rng_ns", r.rng_ns},
                   {"total_ns", r.total_ns},   {"rng_calls", r.rng_calls}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.benchmark = j.at("benchmark").get<std::string>();
  r.backend = parse_backend(j.at("backend").get<std::string>());
  r.repeat = j.at("repeat").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.w1 = detail::num_from(j.at("w1"));
  r.rng_ns = j.at("rng_ns").get<std::int64_t>();
  r.total_ns = j.at("total_ns").get<std::int64_t>();
  r.rng_calls = j.at("rng_calls").get<std::size_t>();
  r.error = j.value("error", std::string{});
  return r;
}

inline nlohmann::json report_to_json(const BenchmarkReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"name", r.name},
                    {"display_name", r.display_name},
                    {"w1_prva", detail::num(r.w1_prva)},
                    {"w1_baseline", detail::num(r.w1_baseline)},
                    {"ratio", detail::num(r.ratio)},
                    {"sampling_fraction", detail::num(r.sampling_fraction)},
                    {"sampling_fraction_prva", detail::num(r.sampling_fraction_prva)},
                    {"speedup", detail::num(r.speedup)},
                    {"model_speedup", detail::num(r.model_speedup)},
                    {"repeats", r.repeats},
                    {"status", r.status}});
  const auto& a = rep.aggregates;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : rep.runs) runs.push_back(to_json(r));
  return {{"rows", rows},
          {"aggregates",
           {{"mean_ratio", detail::num(a.mean_ratio)},
            {"median_ratio", detail::num(a.median_ratio)},
            {"mean_speedup", detail::num(a.mean_speedup)},
            {"median_speedup", detail::num(a.median_speedup)},
            {"mean_model_speedup", detail::num(a.mean_model_speedup)},
            {"median_model_speedup", detail::num(a.median_model_speedup)},
            {"mean_sampling_fraction", detail::num(a.mean_sampling_fraction)}}},
          {"elapsed_seconds", rep.elapsed_seconds},
          {"runs", runs}};
}

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

/// One line per benchmark per backend.
inline void write_report_csv(std::ostream& out, const BenchmarkReport& rep) {
  out << "benchmark,backend,w1,w1_ratio,sampling_fraction_pct,speedup,model_speedup,repeats,status\n";
  for (const auto& r : rep.rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.name << ",baseline," << csv_number(r.w1_baseline) << ",1," << csv_number(r.sampling_fraction)
        << ",1,1," << r.repeats << ',' << status << '\n';
    out << r.name << ",prva," << csv_number(r.w1_prva) << ',' << csv_number(r.ratio) << ','
        << csv_number(r.sampling_fraction_prva) << ',' << csv_number(r.speedup) << ','
        << csv_number(r.model_speedup) << ',' << r.repeats << ',' << status << '\n';
  }
}

}  // namespace prva

#endif  // PRVA_EVALUATION_HPP
