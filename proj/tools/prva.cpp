// prva: command-line front end for the noise-source simulator, mixture
// sampler and benchmark suite.
//
// Exit codes: 0 success, 1 usage, 2 data/validation, 3 internal.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "json.hpp"

#include "prva/prva.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

int exit_code(prva::ErrorKind k) {
  switch (k) {
    case prva::ErrorKind::usage: return kExitUsage;
    case prva::ErrorKind::data: return kExitData;
    case prva::ErrorKind::internal: return kExitInternal;
  }
  return kExitInternal;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hostname() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Common run manifest; outputs are checksummed after they are written.
struct Manifest {
  json doc;

  Manifest(int argc, char** argv) {
    json cmd = json::array();
    for (int i = 0; i < argc; ++i) cmd.push_back(argv[i]);
    doc = {{"command_line", cmd}, {"started_at", utc_now()}, {"seeds", json::object()},
           {"parameters", json::object()}, {"outputs", json::array()}};
  }

  void add_output(const fs::path& p) {
    doc["outputs"].push_back({{"path", p.string()}, {"checksum", prva::hex64(prva::file_checksum(p))}});
  }

  void write(const fs::path& path) {
    doc["finished_at"] = utc_now();
    doc["host"] = {{"hostname", hostname()},
                   {"hardware_concurrency", std::thread::hardware_concurrency()},
                   {"compiler", __VERSION__}};
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
  }
};

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value, const char* what) {
  if (opt->count()) return value;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << what << " seed: " << s << '\n';
  return s;
}

prva::NoiseSourceModel load_noise_model(const std::string& path, const CLI::Option* temp_opt,
                                        double temperature) {
  prva::NoiseSourceModel m;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw prva::ValidationError("cannot open noise model '" + path + "'");
    try {
      m = json::parse(in).get<prva::NoiseSourceModel>();
    } catch (const json::exception& e) {
      throw prva::ValidationError(path + ": " + e.what());
    }
  }
  if (temp_opt->count()) m.temperature_celsius = temperature;
  m.validate();
  return m;
}

std::vector<double> read_reals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw prva::ParseError(path, 0, "cannot open file");
  std::vector<double> v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = prva::detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::string s(t);
    try {
      std::size_t used = 0;
      const double x = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
      v.push_back(x);
    } catch (const std::exception&) {
      throw prva::ParseError(path, lineno, "not a finite real: '" + s + "'");
    }
  }
  if (v.empty()) throw prva::ParseError(path, 0, "no data");
  return v;
}

// --------------------------------------------------------------------------

struct CharacterizeArgs {
  std::vector<std::string> traces;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int cmd_characterize(const CharacterizeArgs& a, const CLI::Option* seed_opt) {
  const auto seed = resolve_seed(seed_opt, a.seed, "flip");
  std::vector<prva::AdcTrace> ok;
  bool failed = false;
  std::printf("%-32s %10s %10s %10s %10s %10s %10s %8s\n", "trace", "temp_C", "n", "raw_mean", "raw_std",
              "flip_mean", "flip_std", "acf1");
  for (std::size_t i = 0; i < a.traces.size(); ++i) {
    const auto& path = a.traces[i];
    try {
      auto tr = prva::replay_trace(path);
      const auto raw = prva::summarize(tr.values());
      const auto flipped = prva::summarize(prva::flip_correct(tr, prva::derive_seed(seed, {i})).values());
      const auto acf = prva::autocorrelation(tr, 1);
      std::printf("%-32s %10s %10zu %10.3f %10.3f %10.3f %10.3f %8.4f\n", path.c_str(),
                  tr.temperature_celsius ? format_real(*tr.temperature_celsius).c_str() : "-", tr.size(),
                  raw.mean(), raw.stddev(), flipped.mean(), flipped.stddev(), acf.empty() ? 0.0 : acf[0]);
      ok.push_back(std::move(tr));
    } catch (const prva::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      failed = true;
    }
  }
  std::set<double> temps;
  for (const auto& t : ok)
    if (t.temperature_celsius) temps.insert(*t.temperature_celsius);
  if (temps.size() >= 2) {
    std::vector<prva::AdcTrace> with_temp;
    for (auto& t : ok)
      if (t.temperature_celsius) with_temp.push_back(t);
    const auto fit = prva::fit_temperature_curves(with_temp);
    fs::create_directories(a.out);
    const auto path = fs::path(a.out) / "model.json";
    json j = fit.model;
    j["mean_slope_se"] = fit.mean_fit.slope_se;
    j["std_slope_se"] = fit.std_fit.slope_se;
    std::ofstream(path) << j.dump(2) << '\n';
    std::printf("mean_curve: %.6f + %.6f*T   std_curve: %.6f + %.6f*T\nmodel written to %s\n",
                fit.model.mean_curve.intercept, fit.model.mean_curve.slope, fit.model.std_curve.intercept,
                fit.model.std_curve.slope, path.c_str());
  }
  return failed ? kExitData : kExitOk;
}

struct SampleArgs {
  std::string target;
  std::size_t n = 1000;
  std::string backend = "baseline";
  std::uint64_t seed = 0;
  std::string out;
  bool binary = false;
  std::string model;
  double temperature = 25.0;
};

int cmd_sample(const SampleArgs& a, const CLI::Option* seed_opt, const CLI::Option* temp_opt) {
  if (a.n < 1) throw prva::UsageError("--n must be >= 1");
  const auto target = prva::parse_target(a.target);
  const auto backend_kind = prva::parse_backend(a.backend);
  const auto seed = resolve_seed(seed_opt, a.seed, "sample");

  std::unique_ptr<prva::VariateBackend> backend;
  if (backend_kind == prva::Backend::baseline) {
    backend = std::make_unique<prva::BaselineBackend>(seed);
  } else {
    backend = std::make_unique<prva::PrvaBackend>(seed, load_noise_model(a.model, temp_opt, a.temperature),
                                                  prva::PipelineConfig{}, 10000);
  }
  const std::vector<prva::TargetDistribution> inputs{target};
  backend->prepare(inputs);
  std::vector<double> xs(a.n);
  backend->fill(0, xs);

  if (!a.out.empty()) {
    if (a.binary) {
      const auto bytes = prva::detail::to_le_bytes(xs);
      std::ofstream out(a.out, std::ios::binary);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    } else {
      std::ofstream out(a.out);
      if (!out) throw prva::Error(prva::ErrorKind::data, "cannot write " + a.out);
      for (double x : xs) out << format_real(x) << '\n';
    }
  }
  const auto s = prva::summarize(xs);
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  std::printf("n=%zu mean=%.6f std=%.6f min=%.6f max=%.6f seed=%llu\n", xs.size(), s.mean(), s.stddev(), *lo,
              *hi, static_cast<unsigned long long>(seed));
  return kExitOk;
}

struct FitArgs {
  std::string data;
  std::string out;
  std::string bandwidth = "silverman";
  std::size_t components = 0;
  std::uint64_t seed = 0;
};

int cmd_fit(const FitArgs& a) {
  const auto data = read_reals(a.data);
  prva::BandwidthSpec bw = prva::SilvermanBandwidth{};
  if (a.bandwidth != "silverman") {
    try {
      std::size_t used = 0;
      const double h = std::stod(a.bandwidth, &used);
      if (used != a.bandwidth.size()) throw std::invalid_argument(a.bandwidth);
      bw = prva::FixedBandwidth{h};
    } catch (const std::exception&) {
      throw prva::UsageError("--bandwidth must be 'silverman' or a positive real");
    }
  }
  prva::KdeOptions opt;
  if (a.components) opt.max_components = a.components;
  opt.thinning_seed = a.seed;
  const auto mix = prva::fit_kde(data, bw, opt);
  const json j = mix;
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream(a.out) << j.dump(2) << '\n';
    std::printf("%zu components, h=%.6g, written to %s\n", mix.size(), mix.stds().front(), a.out.c_str());
  }
  return kExitOk;
}

struct BenchArgs {
  std::size_t repeats = 100;
  std::size_t n = 10000;
  std::size_t n_ref = 1000000;
  std::string filter = "all";
  std::string out = "bench_out";
  std::uint64_t seed = 0;
  std::string params;
  std::size_t threads = 0;
  std::string model;
  double temperature = 25.0;
  double cost_ratio = prva::kDefaultCostRatio;
};

void write_reports(const prva::BenchmarkReport& rep, const fs::path& dir, Manifest& manifest,
                   const json& config) {
  fs::create_directories(dir);
  const auto csv = dir / "report.csv";
  {
    std::ofstream out(csv);
    prva::write_report_csv(out, rep);
  }
  auto j = prva::report_to_json(rep);
  j.erase("runs");
  j["config"] = config;
  const auto rj = dir / "report.json";
  std::ofstream(rj) << j.dump(2) << '\n';
  manifest.add_output(csv);
  manifest.add_output(rj);

  std::printf("%-28s %10s %10s %8s %9s %9s %10s\n", "benchmark", "W1 prva", "W1 base", "ratio", "frac %",
              "speedup", "model x");
  for (const auto& r : rep.rows) {
    if (r.status != "ok") {
      std::printf("%-28s %s\n", r.name.c_str(), r.status.c_str());
      continue;
    }
    std::printf("%-28s %10.4g %10.4g %8.3f %9.2f %9.3f %10.3f\n", r.name.c_str(), r.w1_prva, r.w1_baseline,
                r.ratio, r.sampling_fraction, r.speedup, r.model_speedup);
  }
  const auto& a = rep.aggregates;
  std::printf("ratio mean %.3f median %.3f | speedup mean %.3f median %.3f | model mean %.3f median %.3f\n",
              a.mean_ratio, a.median_ratio, a.mean_speedup, a.median_speedup, a.mean_model_speedup,
              a.median_model_speedup);
}

int cmd_bench(const BenchArgs& a, const CLI::Option* seed_opt, const CLI::Option* temp_opt, Manifest& manifest) {
  prva::SuiteOptions opt;
  opt.repeats = a.repeats;
  opt.n_samples = a.n;
  opt.n_ref = a.n_ref;
  std::stringstream ss(a.filter);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) opt.benchmarks.push_back(item);
  opt.benchmarks = prva::resolve_filter(opt.benchmarks);
  opt.seed = resolve_seed(seed_opt, a.seed, "suite");
  opt.threads = a.threads;
  opt.noise = load_noise_model(a.model, temp_opt, a.temperature);
  opt.cost_ratio = a.cost_ratio;
  json overrides = json::object();
  if (!a.params.empty()) {
    std::ifstream in(a.params);
    if (!in) throw prva::ValidationError("cannot open parameter file '" + a.params + "'");
    try {
      overrides = json::parse(in);
      opt.parameters = overrides.get<std::map<std::string, prva::Parameters>>();
    } catch (const json::exception& e) {
      throw prva::ValidationError(a.params + ": " + e.what());
    }
    for (const auto& [name, p] : opt.parameters) prva::resolve_parameters(prva::find_benchmark(name), p);
  }

  const auto rep = prva::evaluate_suite(opt);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  json runs = json::array();
  for (const auto& r : rep.runs) runs.push_back(prva::to_json(r));
  const auto runs_path = dir / "runs.json";
  std::ofstream(runs_path) << json{{"cost_ratio", opt.cost_ratio}, {"runs", runs}}.dump(1) << '\n';
  manifest.add_output(runs_path);

  json resolved = json::object();
  for (const auto& name : opt.benchmarks) {
    const auto it = opt.parameters.find(name);
    resolved[name] = prva::resolve_parameters(prva::find_benchmark(name),
                                              it == opt.parameters.end() ? prva::Parameters{} : it->second);
  }
  const json config{{"repeats", opt.repeats},
                    {"n_samples", opt.n_samples},
                    {"n_ref", opt.n_ref},
                    {"benchmarks", opt.benchmarks},
                    {"seed", opt.seed},
                    {"reference_seed", opt.reference_seed},
                    {"noise_model", opt.noise},
                    {"calibration_samples", opt.pipeline.calibration_samples},
                    {"cost_ratio", opt.cost_ratio},
                    {"parameters", resolved},
                    {"elapsed_seconds", rep.elapsed_seconds}};
  manifest.doc["seeds"] = {{"suite", opt.seed}, {"reference", opt.reference_seed}};
  manifest.doc["parameters"] = overrides;
  write_reports(rep, dir, manifest, config);
  manifest.write(dir / "manifest.json");

  for (const auto& r : rep.rows)
    if (r.status != "ok") return kExitData;
  return kExitOk;
}

struct EvaluateArgs {
  std::string out = "bench_out";
  double cost_ratio = -1.0;
};

int cmd_evaluate(const EvaluateArgs& a, Manifest& manifest) {
  const fs::path dir(a.out);
  const auto runs_path = dir / "runs.json";
  std::ifstream in(runs_path);
  if (!in) throw prva::ValidationError("cannot open " + runs_path.string() + " (run `prva bench` first)");
  json doc;
  std::vector<prva::RunRecord> runs;
  try {
    doc = json::parse(in);
    for (const auto& r : doc.at("runs")) runs.push_back(prva::run_record_from_json(r));
  } catch (const json::exception& e) {
    throw prva::ValidationError(runs_path.string() + ": " + e.what());
  }
  const double cost = a.cost_ratio > 0.0 ? a.cost_ratio : doc.value("cost_ratio", prva::kDefaultCostRatio);
  const auto rep = prva::assemble_report(std::move(runs), cost);
  manifest.doc["inputs"] = {{{"path", runs_path.string()}, {"checksum", prva::hex64(prva::file_checksum(runs_path))}}};
  write_reports(rep, dir, manifest, json{{"cost_ratio", cost}, {"recomputed_from", runs_path.string()}});
  manifest.write(dir / "manifest.json");
  for (const auto& r : rep.rows)
    if (r.status != "ok") return kExitData;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Programmable random variate accelerator simulator"};
  app.require_subcommand(1);

  CharacterizeArgs ca;
  auto* characterize = app.add_subcommand("characterize", "Statistics of ADC trace files; fits a temperature model");
  characterize->add_option("traces", ca.traces, "Trace files")->required();
  auto* ca_seed = characterize->add_option("--seed", ca.seed, "Flip-correction seed");
  characterize->add_option("--out", ca.out, "Directory for model.json");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw samples from a target distribution");
  sample->add_option("target", sa.target, "gaussian(mu,sigma), studentt(dof) or mixture JSON path")->required();
  sample->add_option("--n", sa.n, "Number of samples");
  sample->add_option("--backend", sa.backend, "prva or baseline");
  auto* sa_seed = sample->add_option("--seed", sa.seed, "Seed");
  sample->add_option("--out", sa.out, "Output file (one value per line)");
  sample->add_flag("--binary", sa.binary, "Write little-endian float64 instead of text");
  sample->add_option("--model", sa.model, "Noise source model JSON (prva backend)");
  auto* sa_temp = sample->add_option("--temperature", sa.temperature, "Operating temperature in degC");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a kernel-density Gaussian mixture to data");
  fit->add_option("data", fa.data, "Data file, one real per line")->required();
  fit->add_option("--out", fa.out, "Mixture JSON output (stdout if omitted)");
  fit->add_option("--bandwidth", fa.bandwidth, "'silverman' or a fixed h");
  fit->add_option("--components", fa.components, "Keep at most this many components");
  fit->add_option("--seed", fa.seed, "Thinning seed");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run the benchmark suite and write reports");
  bench->add_option("--repeats", ba.repeats, "Repeats per benchmark and backend");
  bench->add_option("--n", ba.n, "Samples per run");
  bench->add_option("--n-ref", ba.n_ref, "Reference run size");
  bench->add_option("--filter", ba.filter, "Comma-separated benchmark names or 'all'");
  bench->add_option("--out", ba.out, "Output directory");
  auto* ba_seed = bench->add_option("--seed", ba.seed, "Suite seed");
  bench->add_option("--params", ba.params, "JSON file of per-benchmark parameter overrides");
  bench->add_option("--threads", ba.threads, "Worker threads (0 = all cores)");
  bench->add_option("--model", ba.model, "Noise source model JSON");
  auto* ba_temp = bench->add_option("--temperature", ba.temperature, "Operating temperature in degC");
  bench->add_option("--cost-ratio", ba.cost_ratio, "Accelerator/software per-sample cost for the model speedup");

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Recompute reports from a bench output directory");
  evaluate->add_option("--out", ea.out, "Bench output directory");
  evaluate->add_option("--cost-ratio", ea.cost_ratio, "Override the stored cost ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    Manifest manifest(argc, argv);
    if (*characterize) return cmd_characterize(ca, ca_seed);
    if (*sample) return cmd_sample(sa, sa_seed, sa_temp);
    if (*fit) return cmd_fit(fa);
    if (*bench) return cmd_bench(ba, ba_seed, ba_temp, manifest);
    if (*evaluate) return cmd_evaluate(ea, manifest);
  } catch (const prva::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
