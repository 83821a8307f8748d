#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "projsum/hermitization.hpp"
#include "projsum/model.hpp"

namespace projsum::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kSuccess = 0,
  kNumericFailure = 1,
  kUsage = 2,
  kCheckViolation = 3,
};

struct ModelFlags {
  std::size_t n = 200;
  double a = 0.625;
  double alpha = 0.0;
  double alpha_prime = 1.0;
  double b = 0.875;
  double beta = 0.0;
  double beta_prime = 0.8;
  std::uint64_t seed = 1;
  bool commuting = false;

  TwoAtomLaw p_law() const { return {a, alpha, alpha_prime}; }
  TwoAtomLaw q_law() const { return {b, beta, beta_prime}; }
  ModelSpec spec() const { return {p_law(), q_law(), n, seed}; }
};

struct GridFlags {
  double xmin = -0.3;
  double xmax = 1.3;
  double ymin = -0.3;
  double ymax = 1.3;
  std::size_t nx = 200;
  std::size_t ny = 200;
  std::size_t samples = 1;

  Window window() const { return {xmin, xmax, ymin, ymax}; }
};

// Margins are scaled by the geometry scale (support, bound) or its square
// (re); the Im tolerance is additive on top of |AB|/2.
struct CheckFlags {
  std::size_t z_grid = 10;
  double tol_support = 1e-8;
  double tol_normality = 1e-10;
  double tol_re = 1e-9;
  double tol_im = 1e-10;
  double tol_bound = 1e-8;
  double perturb = 0.0;  // added to x(0, n-1); test hook
};

struct ConvergeFlags {
  std::vector<std::size_t> schedule{50, 100, 200, 400};
  std::size_t reference_n = 0;
  std::size_t samples = 10;
};

struct RunOptions {
  std::string command;
  std::string out_prefix = "projsum";
  ModelFlags model;
  GridFlags grid;
  CheckFlags check;
  ConvergeFlags converge;
};

/// Thrown by `check` when an invariant is violated; what() names the check.
class CheckViolation : public std::runtime_error {
 public:
  CheckViolation(const std::string& check_name, const std::string& detail)
      : std::runtime_error(detail), name_(check_name) {}
  const std::string& check_name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Usage problems detected after argument parsing (bad grid, bad schedule).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Json params_json(const RunOptions& options);
RunOptions options_from_manifest(const Json& manifest);

std::vector<std::size_t> parse_schedule(const std::string& text);

/// Runs one command and writes its artifacts; throws on any failure.
void execute(const RunOptions& options, std::ostream& out);

/// Full command-line entry point: parses `args` (without argv[0]), runs the
/// command, and maps failures onto the exit-code contract.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace projsum::cli
