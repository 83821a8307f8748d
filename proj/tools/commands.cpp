#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "io.hpp"
#include "projsum/convergence.hpp"
#include "projsum/errors.hpp"
#include "projsum/geometry.hpp"
#include "projsum/parallel.hpp"
#include "projsum/spectra.hpp"

#ifndef PROJSUM_VERSION
#define PROJSUM_VERSION "unknown"
#endif

namespace projsum::cli {
namespace {

using Clock = std::chrono::steady_clock;

class Timings {
 public:
  template <typename Fn>
  decltype(auto) stage(const std::string& name, Fn&& fn) {
    const auto start = Clock::now();
    struct Record {
      Timings* self;
      std::string name;
      Clock::time_point start;
      ~Record() {
        self->json_[name] =
            std::chrono::duration<double>(Clock::now() - start).count();
      }
    } record{this, name, start};
    return fn();
  }
  const Json& json() const { return json_; }

 private:
  Json json_ = Json::object();
};

Json law_json(const TwoAtomLaw& law) {
  return {{"weight", law.weight}, {"loc", law.loc}, {"loc_alt", law.loc_alt}};
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::string artifact(const RunOptions& o, const char* suffix) {
  return o.out_prefix + suffix;
}

void write_manifest(const RunOptions& o, const Timings& timings) {
  const std::size_t n_for_laws =
      o.command == "converge"
          ? *std::max_element(o.converge.schedule.begin(), o.converge.schedule.end())
          : o.model.n;
  Json m;
  m["command"] = o.command;
  m["params"] = params_json(o);
  m["realized_laws"] = {
      {"p", law_json(build_two_atom_hermitian(o.model.p_law(), n_for_laws).realized)},
      {"q", law_json(build_two_atom_hermitian(o.model.q_law(), n_for_laws).realized)}};
  m["tool_version"] = PROJSUM_VERSION;
  m["threads"] = thread_count();
  m["timings"] = timings.json();
  io::write_atomic(artifact(o, ".manifest.json"), m.dump(2) + "\n");
}

ModelRealization realize(const ModelFlags& f) {
  return assemble_model(f.spec(), f.commuting ? Rotation::identity : Rotation::haar);
}

void require_square_cells(const GridFlags& g) {
  if (g.nx < 3 || g.ny < 3) throw UsageError("--nx and --ny must be at least 3");
  if (!(g.xmax > g.xmin) || !(g.ymax > g.ymin))
    throw UsageError("window must satisfy xmin < xmax and ymin < ymax");
  const double hx = (g.xmax - g.xmin) / static_cast<double>(g.nx - 1);
  const double hy = (g.ymax - g.ymin) / static_cast<double>(g.ny - 1);
  if (std::abs(hx - hy) > 1e-9 * std::max(hx, hy))
    throw UsageError("grid cells must be square: hx=" + io::format_double(hx) +
                     " hy=" + io::format_double(hy));
}

void cmd_sample(const RunOptions& o, std::ostream& out) {
  Timings t;
  const ModelRealization r = t.stage("assemble", [&] { return realize(o.model); });
  const ComplexMeasure mu = t.stage("eigenvalues", [&] { return esd(r); });
  t.stage("write", [&] {
    io::CsvWriter csv{"re", "im"};
    for (const Complex& z : mu.points()) csv.row({z.real(), z.imag()});
    io::write_atomic(artifact(o, ".esd.csv"), csv.str());
  });
  write_manifest(o, t);
  out << "wrote " << artifact(o, ".esd.csv") << " (" << mu.size() << " rows)\n";
}

std::vector<Complex> z_grid(const HyperbolaRectangle& g, std::size_t k) {
  std::vector<Complex> zs;
  if (k == 0) return zs;
  const double ea = std::abs(g.gap_a), eb = std::abs(g.gap_b);
  const double x0 = std::min(g.alpha, g.alpha_alt) - ea;
  const double x1 = std::max(g.alpha, g.alpha_alt) + ea;
  const double y0 = std::min(g.beta, g.beta_alt) - eb;
  const double y1 = std::max(g.beta, g.beta_alt) + eb;
  const auto at = [k](double lo, double hi, std::size_t i) {
    return k == 1 ? 0.5 * (lo + hi)
                  : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
  };
  zs.reserve(k * k);
  for (std::size_t iy = 0; iy < k; ++iy)
    for (std::size_t ix = 0; ix < k; ++ix) zs.emplace_back(at(x0, x1, ix), at(y0, y1, iy));
  return zs;
}

struct CheckLine {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

void cmd_check(const RunOptions& o, std::ostream& out) {
  Timings t;
  ModelRealization r = t.stage("assemble", [&] { return realize(o.model); });
  if (o.check.perturb != 0.0) {
    const Eigen::Index last = r.x_matrix.cols() - 1;
    r.x_matrix(0, last) += o.check.perturb;
  }
  const HyperbolaRectangle geom = realized_geometry(r);
  const double scale = geom.scale();
  const StructureReport s = t.stage("structure", [&] { return structure_report(r, geom); });

  const std::vector<Complex> zs = z_grid(geom, o.check.z_grid);
  std::vector<double> margins(zs.size());
  t.stage("bound", [&] {
    parallel_for(zs.size(), [&](std::size_t i) { margins[i] = verify_sv_bound(r, geom, zs[i]); });
  });
  const CornerMasses cm = t.stage("corners", [&] { return corner_atom_masses(r); });

  const double n = static_cast<double>(r.dimension());
  const double half_count = 0.5 / n;
  double corner_dev = 0.0;
  for (std::size_t c = 0; c < 4; ++c)
    corner_dev = std::max(corner_dev, std::abs(cm.esd_mass[c] - cm.intersection_mass[c]));
  // dim(E_a(P) ∩ E_b(Q)) >= dim E_a(P) + dim E_b(Q) - n at every corner.
  double corner_floor_deficit = 0.0;
  {
    const TwoAtomLaw& p = r.realized_p_law;
    const TwoAtomLaw& q = r.realized_q_law;
    const std::array<double, 4> pw{p.weight, p.weight, 1 - p.weight, 1 - p.weight};
    const std::array<double, 4> qw{q.weight, 1 - q.weight, q.weight, 1 - q.weight};
    for (std::size_t c = 0; c < 4; ++c)
      corner_floor_deficit =
          std::max(corner_floor_deficit, std::max(0.0, pw[c] + qw[c] - 1.0) - cm.esd_mass[c]);
  }
  const double min_margin =
      margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());

  std::vector<CheckLine> checks{
      {"support", s.support_deviation, o.check.tol_support * scale,
       s.support_deviation <= o.check.tol_support * scale},
      {"normality", s.normality_residual, o.check.tol_normality,
       s.normality_residual <= o.check.tol_normality},
      {"re_deviation", s.re_deviation, o.check.tol_re * scale * scale,
       s.re_deviation <= o.check.tol_re * scale * scale},
      {"im_norm", s.im_norm, s.im_bound + o.check.tol_im,
       s.im_norm <= s.im_bound + o.check.tol_im},
      {"bound", min_margin, -o.check.tol_bound * scale,
       min_margin >= -o.check.tol_bound * scale},
      {"corner_eigenspace", corner_dev, half_count, corner_dev < half_count},
      {"corner_floor", corner_floor_deficit, half_count, corner_floor_deficit < half_count},
  };

  Json rep;
  rep["structure"] = {{"re_deviation", s.re_deviation},
                      {"im_norm", s.im_norm},
                      {"im_bound", s.im_bound},
                      {"normality_residual", s.normality_residual},
                      {"support_deviation", s.support_deviation},
                      {"scale", s.scale}};
  Json bound = Json::array();
  for (std::size_t i = 0; i < zs.size(); ++i)
    bound.push_back({{"z", complex_json(zs[i])}, {"margin", margins[i]}});
  rep["bound"] = std::move(bound);
  Json corners = Json::array();
  for (std::size_t c = 0; c < 4; ++c)
    corners.push_back({{"corner", complex_json(cm.corners[c])},
                       {"esd_mass", cm.esd_mass[c]},
                       {"intersection_mass", cm.intersection_mass[c]},
                       {"predicted", cm.predicted[c]}});
  rep["corners"] = std::move(corners);
  Json jchecks = Json::array();
  const CheckLine* first_fail = nullptr;
  for (const CheckLine& c : checks) {
    jchecks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                       {"pass", c.pass}});
    if (!c.pass && first_fail == nullptr) first_fail = &c;
  }
  rep["checks"] = std::move(jchecks);
  rep["first_failure"] = first_fail ? Json(first_fail->name) : Json(nullptr);
  rep["passed"] = first_fail == nullptr;

  io::write_atomic(artifact(o, ".check.json"), rep.dump(2) + "\n");
  write_manifest(o, t);
  if (first_fail != nullptr)
    throw CheckViolation(first_fail->name,
                         first_fail->name + ": value " + io::format_double(first_fail->value) +
                             " against threshold " + io::format_double(first_fail->threshold));
  out << "all checks passed (" << checks.size() << " checks, " << zs.size() << " z points)\n";
}

BrownPipelineResult run_pipeline(const RunOptions& o, Timings& t) {
  require_square_cells(o.grid);
  if (o.grid.samples == 0) throw UsageError("--samples must be positive");
  if (o.model.commuting)
    throw UsageError("--commuting is only supported by sample and check");
  return t.stage("pipeline", [&] {
    return brown_pipeline(o.model.spec(), o.grid.window(), o.grid.nx, o.grid.ny, o.grid.samples);
  });
}

void cmd_potential(const RunOptions& o, std::ostream& out) {
  Timings t;
  const BrownPipelineResult res = run_pipeline(o, t);
  t.stage("write", [&] {
    io::CsvWriter csv{"re", "im", "L"};
    const PotentialGrid& g = res.grid;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
      for (std::size_t ix = 0; ix < g.nx; ++ix) {
        const Complex z = g.node(ix, iy);
        csv.row({z.real(), z.imag(),
                 g.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iy))});
      }
    io::write_atomic(artifact(o, ".potential.csv"), csv.str());
  });
  write_manifest(o, t);
  out << "wrote " << artifact(o, ".potential.csv") << " (" << o.grid.nx * o.grid.ny
      << " nodes)\n";
}

void cmd_recover(const RunOptions& o, std::ostream& out) {
  Timings t;
  const BrownPipelineResult res = run_pipeline(o, t);
  t.stage("write", [&] {
    io::CsvWriter csv{"re", "im", "mass"};
    const PotentialGrid& g = res.grid;
    const Eigen::ArrayXXd& m = res.recovered.mass;
    for (Eigen::Index iy = 0; iy < m.cols(); ++iy)
      for (Eigen::Index ix = 0; ix < m.rows(); ++ix) {
        const Complex z =
            g.node(static_cast<std::size_t>(ix + 1), static_cast<std::size_t>(iy + 1));
        csv.row({z.real(), z.imag(), m(ix, iy)});
      }
    csv.comment("total_mass=" + io::format_double(res.recovered.raw_total));
    csv.comment("clamped_negative_mass=" + io::format_double(res.recovered.clamped_total));
    io::write_atomic(artifact(o, ".measure.csv"), csv.str());
  });
  write_manifest(o, t);
  out << "wrote " << artifact(o, ".measure.csv")
      << " (total mass " << io::format_double(res.recovered.raw_total) << ")\n";
}

void cmd_converge(const RunOptions& o, std::ostream& out) {
  Timings t;
  if (o.converge.schedule.empty()) throw UsageError("--schedule must not be empty");
  if (o.converge.samples == 0) throw UsageError("--samples must be positive");
  ConvergenceOptions opts;
  opts.reference_n = o.converge.reference_n;
  const ConvergenceReport rep = t.stage("converge", [&] {
    return convergence_run(o.model.p_law(), o.model.q_law(), o.converge.schedule,
                           o.converge.samples, o.model.seed, opts);
  });
  Json j;
  j["n_schedule"] = rep.n_schedule;
  j["reference_n"] = rep.reference_n;
  j["distances"] = rep.distances;
  j["distance_noise"] = rep.distance_noise;
  j["support_devs"] = rep.support_devs;
  j["corner_mass_errors"] = rep.corner_mass_errors;
  j["trend_decreasing"] = trend_decreasing(rep.distances, rep.distance_noise);
  io::write_atomic(artifact(o, ".converge.json"), j.dump(2) + "\n");
  write_manifest(o, t);
  out << "wrote " << artifact(o, ".converge.json") << " (" << rep.distances.size()
      << " distances)\n";
}

void add_model_flags(CLI::App* sub, RunOptions& o) {
  ModelFlags& m = o.model;
  sub->add_option("--n", m.n, "matrix dimension")->check(CLI::PositiveNumber);
  sub->add_option("--a", m.a, "weight of P's atom at alpha")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--alpha", m.alpha, "first atom of P");
  sub->add_option("--alpha-prime", m.alpha_prime, "second atom of P");
  sub->add_option("--b", m.b, "weight of Q's atom at beta")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--beta", m.beta, "first atom of Q");
  sub->add_option("--beta-prime", m.beta_prime, "second atom of Q");
  sub->add_option("--seed", m.seed, "master seed");
  sub->add_option("--out-prefix", o.out_prefix, "artifact path prefix");
}

void add_grid_flags(CLI::App* sub, RunOptions& o) {
  GridFlags& g = o.grid;
  sub->add_option("--xmin", g.xmin);
  sub->add_option("--xmax", g.xmax);
  sub->add_option("--ymin", g.ymin);
  sub->add_option("--ymax", g.ymax);
  sub->add_option("--nx", g.nx, "grid nodes along Re");
  sub->add_option("--ny", g.ny, "grid nodes along Im");
  sub->add_option("--samples", g.samples, "independent realizations averaged");
}

}  // namespace

std::vector<std::size_t> parse_schedule(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("bad schedule entry '" + item + "'");
    }
    if (pos != item.size() || v == 0) throw UsageError("bad schedule entry '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError("empty schedule");
  return out;
}

Json params_json(const RunOptions& o) {
  const ModelFlags& m = o.model;
  Json p;
  p["n"] = m.n;
  p["a"] = m.a;
  p["alpha"] = m.alpha;
  p["alpha_prime"] = m.alpha_prime;
  p["b"] = m.b;
  p["beta"] = m.beta;
  p["beta_prime"] = m.beta_prime;
  p["seed"] = m.seed;
  p["commuting"] = m.commuting;
  p["out_prefix"] = o.out_prefix;
  if (o.command == "check") {
    const CheckFlags& c = o.check;
    p["check"] = {{"z_grid", c.z_grid},       {"tol_support", c.tol_support},
                  {"tol_normality", c.tol_normality}, {"tol_re", c.tol_re},
                  {"tol_im", c.tol_im},       {"tol_bound", c.tol_bound},
                  {"perturb", c.perturb}};
  }
  if (o.command == "potential" || o.command == "recover") {
    const GridFlags& g = o.grid;
    p["grid"] = {{"xmin", g.xmin}, {"xmax", g.xmax}, {"ymin", g.ymin}, {"ymax", g.ymax},
                 {"nx", g.nx},     {"ny", g.ny},     {"samples", g.samples}};
  }
  if (o.command == "converge") {
    const ConvergeFlags& c = o.converge;
    p["converge"] = {{"schedule", c.schedule},
                     {"reference_n", c.reference_n},
                     {"samples", c.samples}};
  }
  return p;
}

RunOptions options_from_manifest(const Json& manifest) {
  RunOptions o;
  if (!manifest.contains("command") || !manifest.contains("params"))
    throw UsageError("manifest lacks command or params");
  o.command = manifest.at("command").get<std::string>();
  const Json& p = manifest.at("params");
  ModelFlags& m = o.model;
  m.n = p.value("n", m.n);
  m.a = p.value("a", m.a);
  m.alpha = p.value("alpha", m.alpha);
  m.alpha_prime = p.value("alpha_prime", m.alpha_prime);
  m.b = p.value("b", m.b);
  m.beta = p.value("beta", m.beta);
  m.beta_prime = p.value("beta_prime", m.beta_prime);
  m.seed = p.value("seed", m.seed);
  m.commuting = p.value("commuting", m.commuting);
  o.out_prefix = p.value("out_prefix", o.out_prefix);
  if (p.contains("check")) {
    const Json& c = p.at("check");
    CheckFlags& f = o.check;
    f.z_grid = c.value("z_grid", f.z_grid);
    f.tol_support = c.value("tol_support", f.tol_support);
    f.tol_normality = c.value("tol_normality", f.tol_normality);
    f.tol_re = c.value("tol_re", f.tol_re);
    f.tol_im = c.value("tol_im", f.tol_im);
    f.tol_bound = c.value("tol_bound", f.tol_bound);
    f.perturb = c.value("perturb", f.perturb);
  }
  if (p.contains("grid")) {
    const Json& g = p.at("grid");
    GridFlags& f = o.grid;
    f.xmin = g.value("xmin", f.xmin);
    f.xmax = g.value("xmax", f.xmax);
    f.ymin = g.value("ymin", f.ymin);
    f.ymax = g.value("ymax", f.ymax);
    f.nx = g.value("nx", f.nx);
    f.ny = g.value("ny", f.ny);
    f.samples = g.value("samples", f.samples);
  }
  if (p.contains("converge")) {
    const Json& c = p.at("converge");
    ConvergeFlags& f = o.converge;
    f.schedule = c.value("schedule", f.schedule);
    f.reference_n = c.value("reference_n", f.reference_n);
    f.samples = c.value("samples", f.samples);
  }
  return o;
}

void execute(const RunOptions& o, std::ostream& out) {
  if (o.command == "sample") return cmd_sample(o, out);
  if (o.command == "check") return cmd_check(o, out);
  if (o.command == "potential") return cmd_potential(o, out);
  if (o.command == "recover") return cmd_recover(o, out);
  if (o.command == "converge") return cmd_converge(o, out);
  throw UsageError("unknown command '" + o.command + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of sums of two randomly rotated projection-like matrices", "projsum"};
  app.set_version_flag("--version", std::string(PROJSUM_VERSION));
  app.require_subcommand(1);

  RunOptions o;
  std::string schedule_text;
  std::string manifest_path;
  std::string replay_prefix;

  CLI::App* sample = app.add_subcommand("sample", "write the ESD of one realization");
  add_model_flags(sample, o);
  sample->add_flag("--commuting", o.model.commuting, "use U = V = I");

  CLI::App* check = app.add_subcommand("check", "verify structural invariants");
  add_model_flags(check, o);
  check->add_flag("--commuting", o.model.commuting, "use U = V = I");
  check->add_option("--z-grid", o.check.z_grid, "K for a K x K grid of bound test points");
  check->add_option("--tol-support", o.check.tol_support);
  check->add_option("--tol-normality", o.check.tol_normality);
  check->add_option("--tol-re", o.check.tol_re);
  check->add_option("--tol-im", o.check.tol_im);
  check->add_option("--tol-bound", o.check.tol_bound);
  check->add_option("--perturb", o.check.perturb, "add eps to x(0, n-1) before checking");

  CLI::App* potential = app.add_subcommand("potential", "log potential on a grid");
  add_model_flags(potential, o);
  add_grid_flags(potential, o);

  CLI::App* recover = app.add_subcommand("recover", "recover a measure from the potential");
  add_model_flags(recover, o);
  add_grid_flags(recover, o);

  CLI::App* converge = app.add_subcommand("converge", "BL distances along an n schedule");
  add_model_flags(converge, o);
  converge->add_option("--schedule", schedule_text, "comma-separated dimensions");
  converge->add_option("--reference-n", o.converge.reference_n, "0: largest schedule entry");
  converge->add_option("--samples", o.converge.samples, "realizations per dimension");

  CLI::App* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->add_option("--manifest", manifest_path)->required();
  replay->add_option("--out-prefix", replay_prefix, "override the recorded prefix");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (replay->parsed()) {
      RunOptions r = options_from_manifest(Json::parse(io::read_file(manifest_path)));
      if (!replay_prefix.empty()) r.out_prefix = replay_prefix;
      execute(r, out);
      return kSuccess;
    }
    for (CLI::App* sub : app.get_subcommands()) o.command = sub->get_name();
    if (!schedule_text.empty()) o.converge.schedule = parse_schedule(schedule_text);
    execute(o, out);
    return kSuccess;
  } catch (const CheckViolation& e) {
    err << "check violation: " << e.check_name() << " (" << e.what() << ")\n";
    return kCheckViolation;
  } catch (const ComputationError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: bad manifest: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace projsum::cli
