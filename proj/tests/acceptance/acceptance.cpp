// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "io.hpp"
#include "projsum/convergence.hpp"
#include "projsum/geometry.hpp"
#include "projsum/hermitization.hpp"
#include "projsum/parallel.hpp"
#include "projsum/spectra.hpp"

using namespace projsum;

namespace {

// Reference laws: P ~ (5/8) d_0 + (3/8) d_1, Q ~ (7/8) d_0 + (1/8) d_{4/5}.
const TwoAtomLaw kP{0.625, 0.0, 1.0};
const TwoAtomLaw kQ{0.875, 0.0, 0.8};
constexpr std::uint64_t kBaseSeed = 20240601;

namespace tol {
constexpr double support = 1e-8;        // x scale
constexpr double normality = 1e-10;
constexpr double re_deviation = 1e-9;   // x scale^2
constexpr double im_slack = 1e-10;      // added to |AB|/2
constexpr double sv_margin = 1e-8;      // x scale, lower bound -tol
constexpr double identity_rel = 1e-8;   // x (1 + |L|)
constexpr double dirac_total = 0.02;
constexpr double dirac_block = 0.95;
constexpr double pipeline_corner = 0.05;
constexpr double off_support = 0.01;
constexpr double off_support_cells = 5.0;  // distance in grid steps
constexpr double trend_noise = 1.5;
}  // namespace tol

namespace budget {
constexpr double support_seconds = 30.0;
constexpr double bound_seconds = 120.0;
constexpr double pipeline_serial_seconds = 600.0;
constexpr double pipeline_parallel_seconds = 180.0;
}  // namespace budget

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

ModelRealization reference_model(std::size_t n, std::uint64_t index) {
  return assemble_model(sample_spec({kP, kQ, n, derive_seed(kBaseSeed, n)}, index));
}

// Criteria 1 and 2 share their runs.
void support_and_structure() {
  const auto start = Clock::now();
  double worst_support = 0.0, worst_normality = 0.0, worst_re = 0.0, worst_im_excess = -INFINITY;
  bool structure_ok = true;
  for (std::size_t n : {50u, 200u}) {
    std::vector<StructureReport> reps(20);
    parallel_for(reps.size(), [&](std::size_t s) {
      const ModelRealization r = reference_model(n, s);
      reps[s] = structure_report(r, realized_geometry(r));
    });
    for (const StructureReport& s : reps) {
      worst_support = std::max(worst_support, s.support_deviation / s.scale);
      worst_normality = std::max(worst_normality, s.normality_residual);
      worst_re = std::max(worst_re, s.re_deviation / (s.scale * s.scale));
      worst_im_excess = std::max(worst_im_excess, s.im_norm - s.im_bound);
      structure_ok = structure_ok && s.normality_residual <= tol::normality &&
                     s.re_deviation <= tol::re_deviation * s.scale * s.scale &&
                     s.im_norm <= s.im_bound + tol::im_slack;
    }
  }
  const double elapsed = seconds_since(start);
  report(1, "support on H_n and R_n",
         worst_support <= tol::support && elapsed < budget::support_seconds,
         fmt("max dist/scale %.3e <= %.0e; n in {50,200} x 20 seeds in %.1f s (< %.0f s)",
             worst_support, tol::support, elapsed, budget::support_seconds));
  report(2, "normal square structure", structure_ok,
         fmt("normality %.3e <= %.0e, re dev %.3e <= %.0e, ||Im|| - |AB|/2 = %.3e <= %.0e",
             worst_normality, tol::normality, worst_re, tol::re_deviation, worst_im_excess,
             tol::im_slack));
}

void singular_value_bound() {
  const auto start = Clock::now();
  std::vector<double> worst(10, INFINITY);
  parallel_for(worst.size(), [&](std::size_t s) {
    const ModelRealization r = reference_model(100, s);
    const HyperbolaRectangle g = realized_geometry(r);
    std::mt19937_64 rng(derive_seed(kBaseSeed, 1000 + s));
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int k = 0; k < 100; ++k) {
      const Complex z(u(rng), u(rng));
      worst[s] = std::min(worst[s], verify_sv_bound(r, g, z) / g.scale());
    }
  });
  const double elapsed = seconds_since(start);
  const double m = *std::min_element(worst.begin(), worst.end());
  report(3, "singular value bound", m >= -tol::sv_margin && elapsed < budget::bound_seconds,
         fmt("min margin/scale %.3e >= -%.0e; n=100, 10 seeds x 100 z in %.1f s (< %.0f s)", m,
             tol::sv_margin, elapsed, budget::bound_seconds));
}

void corner_atoms() {
  const BrownAtomWeights w = atom_weights(0.625, 0.875);
  const bool formula = w.e00 == 0.5 && w.e10 == 0.25 && w.e01 == 0.0 && w.e11 == 0.0;
  std::vector<CornerMasses> cms(50);
  parallel_for(cms.size(), [&](std::size_t s) { cms[s] = corner_atom_masses(reference_model(80, s)); });
  const double floor00 = std::max(0.0, build_two_atom_hermitian(kP, 80).realized.weight +
                                            build_two_atom_hermitian(kQ, 80).realized.weight - 1.0);
  // Masses are multiples of 1/80: half a count is an exact comparison.
  const double half = 0.5 / 80.0;
  std::size_t exact = 0, generic = 0;
  for (const CornerMasses& cm : cms) {
    if (std::abs(cm.esd_mass[0] - floor00) < half && std::abs(cm.esd_mass[0] - 0.5) < half) ++exact;
    bool all = true;
    for (std::size_t c = 0; c < 4; ++c)
      all = all && std::abs(cm.intersection_mass[c] - cm.predicted[c]) < half &&
            std::abs(cm.esd_mass[c] - cm.intersection_mass[c]) < half;
    if (all) ++generic;
  }
  report(4, "corner atoms", formula && exact == cms.size() && generic == cms.size(),
         fmt("ESD mass at 0 = 1/2 in %zu/50 runs, all corners generic in %zu/50; "
             "eps00=%g eps10=%g", exact, generic, w.e00, w.e10));
}

void hermitization_identity() {
  std::vector<double> rel(1000);
  parallel_for(rel.size(), [&](std::size_t i) {
    const ModelRealization r = reference_model(60, i);
    std::mt19937_64 rng(derive_seed(kBaseSeed, 5000 + i));
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    const Complex z(u(rng), u(rng));
    const double L = log_potential(esd(r), z);
    const HalfLineMeasure nu = nu_n_z(r, z);
    double half_mean_log = 0.0;
    for (double t : nu.points()) half_mean_log += std::log(t);
    half_mean_log *= 0.5 / static_cast<double>(nu.size());
    rel[i] = std::abs(L - half_mean_log) / (1.0 + std::abs(L));
  });
  const double worst = *std::max_element(rel.begin(), rel.end());
  report(5, "hermitization identity", worst <= tol::identity_rel,
         fmt("max |L - mean log nu / 2| / (1+|L|) = %.3e <= %.0e over 1000 (z, seed) pairs", worst,
             tol::identity_rel));
}

void dirac_recovery() {
  const ComplexMeasure dirac = ComplexMeasure::uniform({Complex(0.0, 0.0)});
  const PotentialGrid g = potential_grid(dirac, {-1, 1, -1, 1}, 200, 200);
  const RecoveredMeasure rec = laplacian_recover(g);
  const double block = block_mass(g, rec.mass, 0.0);
  const bool pass = std::abs(rec.raw_total - 1.0) <= tol::dirac_total &&
                    block >= tol::dirac_block * rec.raw_total;
  report(6, "laplacian recovery oracle", pass,
         fmt("total %.5f (|.-1| <= %.2f), 3x3 block %.4f of total (>= %.2f)", rec.raw_total,
             tol::dirac_total, block / rec.raw_total, tol::dirac_block));
}

void pipeline_atoms() {
  const auto start = Clock::now();
  const ModelSpec spec{kP, kQ, 400, derive_seed(kBaseSeed, 7)};
  const Window window{-0.3, 1.3, -0.3, 1.3};
  const BrownPipelineResult res = brown_pipeline(spec, window, 200, 200, 10);
  const double elapsed = seconds_since(start);

  const double m0 = block_mass(res.grid, res.recovered.mass, 0.0);
  const double m1 = block_mass(res.grid, res.recovered.mass, 1.0);
  // Realized laws are identical across samples (same n).
  const HyperbolaRectangle g = make_geometry(build_two_atom_hermitian(kP, 400).realized,
                                             build_two_atom_hermitian(kQ, 400).realized);
  const Eigen::ArrayXXd& mass = res.recovered.mass;
  std::vector<double> off(static_cast<std::size_t>(mass.cols()), 0.0);
  parallel_for(off.size(), [&](std::size_t j) {
    for (Eigen::Index i = 0; i < mass.rows(); ++i) {
      const double m = mass(i, Eigen::Index(j));
      if (m <= 0.0) continue;
      const Complex z = res.grid.node(std::size_t(i) + 1, j + 1);
      if (dist_to_hr(g, z) > tol::off_support_cells * res.grid.hx) off[j] += m;
    }
  });
  double off_total = 0.0;
  for (double x : off) off_total += x;
  const double positive = (mass > 0.0).select(mass, 0.0).sum();
  const double off_frac = off_total / positive;

  const std::size_t threads = thread_count();
  const double limit = threads >= 4 ? budget::pipeline_parallel_seconds
                                    : budget::pipeline_serial_seconds;
  const bool pass = std::abs(m0 - 0.5) <= tol::pipeline_corner &&
                    std::abs(m1 - 0.25) <= tol::pipeline_corner && off_frac <= tol::off_support &&
                    elapsed < limit;
  report(7, "brown pipeline atoms", pass,
         fmt("mass near 0 %.4f, near 1 %.4f (+-%.2f), off-support %.4f (<= %.2f); "
             "%.1f s on %zu thread(s) (< %.0f s)",
             m0, m1, tol::pipeline_corner, off_frac, tol::off_support, elapsed, threads, limit));
}

void convergence_trend() {
  const auto start = Clock::now();
  ConvergenceOptions opts;
  opts.reference_n = 800;
  const ConvergenceReport rep =
      convergence_run(kP, kQ, {50, 100, 200, 400}, 10, derive_seed(kBaseSeed, 8), opts);
  const bool trend = trend_decreasing(rep.distances, rep.distance_noise, tol::trend_noise);
  const double sup = *std::max_element(rep.support_devs.begin(), rep.support_devs.end());
  std::ostringstream ds;
  for (std::size_t i = 0; i < rep.distances.size(); ++i)
    ds << (i ? " " : "") << rep.n_schedule[i] << ":" << io::format_double(std::round(rep.distances[i] * 1e5) / 1e5)
       << "+-" << io::format_double(std::round(rep.distance_noise[i] * 1e5) / 1e5);
  report(8, "convergence trend", trend,
         fmt("BL vs n=800: %s; support dev %.1e; %.1f s", ds.str().c_str(), sup,
             seconds_since(start)));
}

void freeness_decay() {
  const std::vector<std::size_t> dims{50, 100, 200, 400};
  std::vector<double> medians;
  for (std::size_t n : dims) {
    std::vector<double> v(20);
    parallel_for(v.size(), [&](std::size_t s) { v[s] = freeness_diagnostic(reference_model(n, 100 + s), 4); });
    std::nth_element(v.begin(), v.begin() + 10, v.end());
    const double hi = v[10];
    const double lo = *std::max_element(v.begin(), v.begin() + 10);
    medians.push_back(0.5 * (lo + hi));
  }
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < medians.size(); ++i) decreasing = decreasing && medians[i + 1] < medians[i];
  report(9, "freeness diagnostic decay", decreasing,
         fmt("median order-4 moment: %.3e %.3e %.3e %.3e for n = 50 100 200 400", medians[0],
             medians[1], medians[2], medians[3]));
}

void determinism() {
  namespace fs = std::filesystem;
  fs::create_directories("acceptance_out");
  struct Case {
    std::vector<std::string> args;
    const char* artifact;
  };
  const std::vector<Case> cases{
      {{"sample", "--n", "200", "--seed", "17"}, ".esd.csv"},
      {{"check", "--n", "100", "--seed", "17"}, ".check.json"},
      {{"potential", "--n", "60", "--nx", "81", "--ny", "81", "--samples", "4"}, ".potential.csv"},
      {{"recover", "--n", "60", "--nx", "81", "--ny", "81", "--samples", "4"}, ".measure.csv"},
      {{"converge", "--schedule", "20,40", "--reference-n", "60", "--samples", "4"}, ".converge.json"},
  };
  std::size_t same = 0;
  std::string mismatched;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const std::string a = "acceptance_out/run" + std::to_string(k);
    const std::string b = a + "_replay";
    std::vector<std::string> args = cases[k].args;
    args.insert(args.end(), {"--out-prefix", a});
    std::ostringstream out, err;
    set_thread_limit(1);
    const int c1 = cli::run(args, out, err);
    set_thread_limit(4);
    const int c2 = cli::run({"replay", "--manifest", a + ".manifest.json", "--out-prefix", b}, out, err);
    set_thread_limit(0);
    if (c1 == 0 && c2 == 0 &&
        io::read_file(a + cases[k].artifact) == io::read_file(b + cases[k].artifact))
      ++same;
    else
      mismatched += " " + cases[k].args[0];
  }
  report(10, "manifest replay determinism", same == cases.size(),
         fmt("%zu/%zu commands byte-identical on replay (1 vs 4 threads)%s%s", same, cases.size(),
             mismatched.empty() ? "" : "; differing:", mismatched.c_str()));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{
      support_and_structure, singular_value_bound, corner_atoms, hermitization_identity,
      dirac_recovery,        pipeline_atoms,       convergence_trend, freeness_decay,
      determinism};
  for (const auto& run : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      std::printf("FAIL  criterion run aborted: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
