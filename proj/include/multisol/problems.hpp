#pragma once

#include "multisol/nonlinearity.hpp"
#include "multisol/system.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace multisol {

enum class ProblemKind { channel, bratu, power, allen_cahn, bmp, henon };

std::string to_string(ProblemKind kind);

/// Grid symmetries on the native unit interval or square.
enum class Symmetry {
  reflect_x,      ///< u(1-x, y)
  reflect_y,      ///< u(x, 1-y)
  swap,           ///< u(y, x): reflection about y = x
  anti_swap,      ///< u(1-y, 1-x): reflection about y = 1-x
  rotate,         ///< u(1-y, x): quarter turn about the centre
  negate,         ///< -u(x, y)
  negate_rotate,  ///< -u(1-y, x)
};

std::string to_string(Symmetry s);
Symmetry parse_symmetry(const std::string& name);

struct ParameterSet {
  std::map<std::string, double> values;
  std::optional<int> expected_solutions;
};

/// Declarative description of a benchmark boundary-value problem.
struct ProblemSpec {
  std::string id;
  ProblemKind kind = ProblemKind::bratu;
  std::string equation;  ///< human-readable statement on the native domain
  int dimension = 1;
  int order = 2;
  std::vector<std::string> boundary;  ///< one condition per line
  std::map<std::string, double> parameters;
  std::vector<ParameterSet> parameter_sets;  ///< the published runs
  std::optional<int> expected_solutions;
  std::vector<Symmetry> symmetries;  ///< maps taking solutions to solutions
  std::string initial_guess = "ones";
  int default_degree = 16;

  double parameter(const std::string& name) const;
  /// Pointwise nonlinearity on the native domain (zero for the channel).
  PointwiseNonlinearity nonlinearity() const;
  /// Source term on the native domain.
  double source(double x, double y = 0.0) const;

  /// Copy with the given parameters overriding the defaults. Unknown
  /// parameter names throw; expected_solutions follows a matching
  /// published set and is cleared otherwise.
  ProblemSpec with_parameters(const std::map<std::string, double>& values) const;

  /// Throws std::invalid_argument when the boundary list does not fit the
  /// order and dimension or a required parameter is missing.
  void validate() const;
};

/// The six catalog entries with their default parameters.
const std::vector<ProblemSpec>& catalog();
/// Catalog entry by id; throws std::out_of_range listing the valid ids.
const ProblemSpec& lookup(const std::string& id);

/// Discretization of the problem with polynomial degree N.
std::unique_ptr<SpectralSystem> build_system(const ProblemSpec& spec, int degree);

/// Evaluates an initial-guess expression for a system of size n:
/// [sign][c*]atom with atom in {ones, zeros, cos(ones), sin(ones)},
/// e.g. "ones", "0.1*ones", "-cos(ones)".
Vector initial_guess(const std::string& expression, Eigen::Index n);

/// TOML with a [problem] table mirroring ProblemSpec.
std::string to_toml(const ProblemSpec& spec);
/// Parses a [problem] table. The id must name a catalog entry, whose
/// fields fill in anything the file leaves out.
ProblemSpec spec_from_toml(const std::string& text);
ProblemSpec load_spec(const std::string& path);
/// Key/value pairs of the optional [run] table of a problem config, with
/// every value rendered as a string (arrays joined by commas).
std::map<std::string, std::string> run_settings_from_toml(const std::string& text);

/// Transform of grid samples on the native domain (uniform, symmetric grid).
GridSamples transform(const GridSamples& u, Symmetry s);

/// Exact action of the symmetry on the coefficient vector, when the
/// system's basis admits one and no lifting breaks it.
std::optional<Vector> transform_coefficients(const SpectralSystem& system, const Vector& coeffs, Symmetry s);

struct SymmetryCheck {
  Symmetry symmetry;
  double self_defect = 0.0;               ///< ||u - T u||_inf on the grid
  std::optional<double> image_residual;   ///< ||F(T u)||_inf when T acts on coefficients
};

/// Self-symmetry defect and solution-map residual for each declared symmetry.
std::vector<SymmetryCheck> check_symmetry(const ProblemSpec& spec, const SpectralSystem& system,
                                          const Vector& coeffs, int points = 101);

/// ||b - T a||_inf on a grid: how far b is from the image of a under T.
double pair_defect(const GridSamples& a, const GridSamples& b, Symmetry s);

}  // namespace multisol
