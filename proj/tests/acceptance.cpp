// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "prva/prva.hpp"
#include "test_support.hpp"

using namespace prva;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  failures += !ok;
}

void note(const std::string& what) { std::printf("       %s\n", what.c_str()); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  UniformStream u(seed);
  return sample_box_muller(GaussianSpec(0, 1), n, u);
}

void suite_criteria() {
  SuiteOptions opt;
  opt.repeats = 100;
  opt.n_samples = 10000;
  opt.n_ref = 1000000;
  opt.seed = 20240101;
  const auto cache = fs::temp_directory_path() / "prva_acceptance_cache";
  fs::remove_all(cache);
  opt.cache_dir = cache;
  const auto rep = evaluate_suite(opt);
  fs::remove_all(cache);

  bool all_ok = rep.rows.size() == 12;
  for (const auto& r : rep.rows) all_ok = all_ok && r.status == "ok";
  report(1, all_ok && rep.elapsed_seconds < 1800.0,
         fmt("suite 100 x 1e4, n_ref 1e6, 12 benchmarks completed in %.1f s (limit 1800 s)", rep.elapsed_seconds));
  note("hardware throughput, board power and end-to-end speedups are not reproducible in simulation");
  note(fmt("wall-clock speedup mean %.3f median %.3f; cost-model speedup mean %.3f median %.3f",
           rep.aggregates.mean_speedup, rep.aggregates.median_speedup, rep.aggregates.mean_model_speedup,
           rep.aggregates.median_model_speedup));

  double lo = INFINITY, hi = -INFINITY;
  bool in_range = rep.rows.size() == 12;
  for (const auto& r : rep.rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    in_range = in_range && r.ratio >= 0.5 && r.ratio <= 3.0;
  }
  report(2, in_range, fmt("W1 ratio prva/baseline over 12 benchmarks spans [%.3f, %.3f] (required [0.5, 3.0])", lo, hi));
  for (const auto& r : rep.rows)
    note(r.name + fmt(": ratio %.3f  W1 prva %.4g  W1 baseline %.4g", r.ratio, r.w1_prva, r.w1_baseline));

  double frac = NAN;
  for (const auto& r : rep.rows)
    if (r.name == "gaussian_sampling") frac = r.sampling_fraction;
  report(3, frac >= 90.0, fmt("Gaussian Sampling baseline sampling fraction %.2f %% (required >= 90 %%)", frac));
  note(fmt("suite mean sampling fraction %.2f %%", rep.aggregates.mean_sampling_fraction));
}

void criterion_4() {
  using boost::multiprecision::cpp_dec_float_50;
  const cpp_dec_float_50 oracle50 = pow(cpp_dec_float_50(4) / (3 * cpp_dec_float_50(1000)), cpp_dec_float_50(1) / 5);
  const double oracle = static_cast<double>(oracle50);
  const double h = silverman_bandwidth(1.0, 1000);
  report(4, std::abs(h - oracle) <= 1e-5,
         fmt("silverman_bandwidth(1, 1000) = %.10f, 50-digit oracle %.10f, |diff| %.2e (tol 1e-5)", h, oracle,
             std::abs(h - oracle)));
  note(fmt("the quoted literal 0.26596 differs from the oracle by %.2e", std::abs(0.26596 - oracle)));
}

void criterion_5() {
  UniformStream g(5005);
  auto spec = [&] {
    const double mean = (g.next_unit() - 0.5) * std::pow(10.0, 6.0 * g.next_unit() - 2.0);
    const double sd = std::pow(10.0, 6.0 * g.next_unit() - 3.0);
    return GaussianSpec(mean, sd);
  };
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto src = spec(), dst = spec();
    const auto c = transform_coeffs(src, dst), back = transform_coeffs(dst, src);
    const double scale = std::max({std::abs(dst.mean()), std::abs(c.a * src.mean()), 1e-300});
    worst = std::max(worst, std::abs(c.a * src.std() - dst.std()) / dst.std());
    worst = std::max(worst, std::abs(c.a * src.mean() + c.b - dst.mean()) / scale);
    worst = std::max(worst, std::abs(c.a * back.a - 1.0));
    // composition back o c is the identity: slope 1, intercept 0 relative
    // to the magnitude of the summed terms
    const double intercept = back.a * c.b + back.b;
    const double terms = std::max({std::abs(back.a * c.b), std::abs(back.b), 1e-300});
    worst = std::max(worst, std::abs(intercept) / terms);
  }
  report(5, worst <= 1e-12, fmt("10^4 random spec pairs, worst relative error %.2e (tol 1e-12)", worst));
}

void criterion_6() {
  UniformStream u(6006);
  auto f = [](double x) { return x >= 0.0 && x <= 1.0 ? 2.0 * x : 0.0; };
  auto g = [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; };
  auto draw = [](UniformStream& s) { return s.next_unit(); };
  const auto ar = sample_accept_reject(f, draw, g, 2.0, 100000, u);
  const double d = test::ks_statistic(ar.samples, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  const double crit = test::ks_critical_1pct(ar.samples.size());
  const double rate = ar.stats.acceptance_rate();

  UniformStream a(6007), b(6008);
  const double w1 = wasserstein1(EmpiricalDistribution(sample_inversion(GaussianSpec(0, 1), 100000, a)),
                                 EmpiricalDistribution(sample_box_muller(GaussianSpec(0, 1), 100000, b)));
  report(6, d < crit && std::abs(rate - 0.5) <= 0.008 && w1 <= 0.02,
         fmt("KS D %.5f < %.5f; acceptance %.4f (0.5 +- 0.008); inversion vs Box-Muller W1 %.4f (<= 0.02)", d, crit,
             rate, w1));
}

void criterion_7() {
  const std::size_t n = 100000;
  const auto grid = gaussian_quantile_grid(n, GaussianSpec(0, 1));
  double sum_p = 0.0, sum_b = 0.0, worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto pipe = GaussianPipeline::simulated(NoiseSourceModel{}, 7000 + s);
    const double wp = wasserstein1(EmpiricalDistribution(pipe.sample(GaussianSpec(0, 1), n)), grid);
    UniformStream u(derive_seed(7100, {s}));
    const double wb = wasserstein1(EmpiricalDistribution(sample_box_muller(GaussianSpec(0, 1), n, u)), grid);
    sum_p += wp;
    sum_b += wb;
    worst = std::max(worst, wp / wb);
  }
  report(7, sum_p <= 2.0 * sum_b,
         fmt("mean W1 to quantile grid over 20 seeds: pipeline %.5f, baseline %.5f, ratio %.3f (<= 2)", sum_p / 20,
             sum_b / 20, sum_p / sum_b));
  note(fmt("largest single-seed ratio %.3f", worst));
}

void criterion_8() {
  NoiseSourceModel skewed;
  skewed.mean_curve = {1800.0, 2.0};
  skewed.std_curve = {150.0, 1.0};
  skewed.skew = 4.0;
  skewed.temperature_celsius = 0.0;
  skewed.seed = 8008;
  const auto raw = simulate_raw(skewed, 1000000);
  const auto flipped = flip_correct(raw, 8009);
  const auto s = summarize(flipped.values());
  const double se = s.stddev() / std::sqrt(static_cast<double>(s.count()));
  const bool mean_ok = std::abs(s.mean() - 2047.5) <= 5.0 * se;

  std::vector<AdcTrace> raw_traces, flipped_traces;
  for (int k = 0; k < 10; ++k) {
    NoiseSourceModel m = skewed;
    m.temperature_celsius = 5.0 * k;
    m.seed = derive_seed(8010, {static_cast<std::uint64_t>(k)});
    auto t = simulate_raw(m, 100000);
    t.temperature_celsius = m.temperature_celsius;
    auto f = flip_correct(t, derive_seed(8011, {static_cast<std::uint64_t>(k)}));
    f.temperature_celsius = t.temperature_celsius;
    raw_traces.push_back(std::move(t));
    flipped_traces.push_back(std::move(f));
  }
  const auto raw_fit = fit_temperature_curves(raw_traces).mean_fit;
  const auto flip_fit = fit_temperature_curves(flipped_traces).mean_fit;
  const bool slope_ok = std::abs(flip_fit.slope) <= 3.0 * flip_fit.slope_se;
  report(8, mean_ok && slope_ok,
         fmt("flip mean %.3f vs 2047.5 (5 SE = %.3f); flipped slope %.4f +- %.4f codes/degC (|slope| <= 3 SE)",
             s.mean(), 5.0 * se, flip_fit.slope, flip_fit.slope_se));
  note(fmt("raw trace mean %.2f, raw slope %.4f +- %.4f", summarize(raw.values()).mean(), raw_fit.slope,
           raw_fit.slope_se));
}

void criterion_9() {
  UniformStream g(9009);
  // Dyadic data so that translation by a dyadic constant is exact.
  auto dyadic = [&](std::size_t n) {
    std::vector<double> v(n);
    BoxMullerNormal z;
    for (auto& x : v) x = std::ldexp(std::round(std::ldexp(z(g), 20)), -20);
    return v;
  };
  bool sym = true, tri = true, shift = true;
  double worst_tri = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto a = dyadic(1 + g.next_u64() % 200), b = dyadic(1 + g.next_u64() % 200), c = dyadic(1 + g.next_u64() % 200);
    const EmpiricalDistribution ea(a), eb(b), ec(c);
    const double ab = wasserstein1(ea, eb);
    sym = sym && ab == wasserstein1(eb, ea);
    const double excess = ab - (wasserstein1(ea, ec) + wasserstein1(ec, eb));
    worst_tri = std::max(worst_tri, excess);
    tri = tri && excess <= 1e-12;
    const double shift_c = std::ldexp(static_cast<double>(g.next_u64() % 4096) - 2048.0, -6);
    auto moved = a;
    for (auto& x : moved) x += shift_c;
    shift = shift && wasserstein1(ea, EmpiricalDistribution(moved)) == std::abs(shift_c);
  }

  std::vector<double> logn, logw;
  for (double n : {1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5}) {
    double w = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s)
      w += wasserstein1_to_gaussian(EmpiricalDistribution(normals(static_cast<std::size_t>(n), 9100 + s)),
                                    GaussianSpec(0, 1));
    logn.push_back(std::log(n));
    logw.push_back(std::log(w / 10.0));
  }
  const auto fit = fit_line(logn, logw);
  report(9, sym && tri && shift && std::abs(fit.slope + 0.5) <= 0.1,
         std::string("symmetry ") + (sym ? "exact" : "VIOLATED") + ", triangle " + (tri ? "ok" : "VIOLATED") +
             fmt(" (max excess %.1e)", worst_tri) + ", shift " + (shift ? "exact" : "VIOLATED") +
             fmt(", sqrt(n) slope %.4f +- %.4f (-0.5 +- 0.1)", fit.slope, fit.slope_se));
}

void criterion_10() {
  const auto data = normals(10000, 1010);
  const auto mix = fit_kde(data, SilvermanBandwidth{});
  const double h = mix.stds()[0];
  auto pipe = GaussianPipeline::simulated(NoiseSourceModel{}, 1011);
  const auto xs = sample_mixture_prva(mix, 100000, pipe, pipe.uniform());
  const double sd = sample_stddev(xs);
  const double expected = std::sqrt(1.0 + h * h);
  report(10, std::abs(sd - expected) <= 0.02,
         fmt("KDE (h = %.4f) sample std %.4f vs sqrt(1+h^2) = %.4f (tol 0.02)", h, sd, expected));
  note(fmt("exact mixture std %.4f", std::sqrt(mix.variance())));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  try {
    suite_criteria();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed, %.1f s\n", failures,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return failures ? 1 : 0;
}
