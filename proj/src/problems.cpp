#include "multisol/problems.hpp"

#include "multisol/galerkin_1d.hpp"
#include "multisol/galerkin_2d.hpp"

#include <toml.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace multisol {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::channel: return "channel";
    case ProblemKind::bratu: return "bratu";
    case ProblemKind::power: return "power";
    case ProblemKind::allen_cahn: return "allen_cahn";
    case ProblemKind::bmp: return "bmp";
    case ProblemKind::henon: return "henon";
  }
  return "unknown";
}

namespace {

const std::pair<Symmetry, const char*> symmetry_names[] = {
    {Symmetry::reflect_x, "reflect_x"}, {Symmetry::reflect_y, "reflect_y"},
    {Symmetry::swap, "swap"},           {Symmetry::anti_swap, "anti_swap"},
    {Symmetry::rotate, "rotate"},       {Symmetry::negate, "negate"},
    {Symmetry::negate_rotate, "negate_rotate"},
};

}  // namespace

std::string to_string(Symmetry s) {
  for (const auto& [sym, name] : symmetry_names) {
    if (sym == s) return name;
  }
  return "unknown";
}

Symmetry parse_symmetry(const std::string& name) {
  for (const auto& [sym, n] : symmetry_names) {
    if (name == n) return sym;
  }
  throw std::invalid_argument("unknown symmetry '" + name + "'");
}

double ProblemSpec::parameter(const std::string& name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end()) throw std::out_of_range("problem '" + id + "' has no parameter '" + name + "'");
  return it->second;
}

PointwiseNonlinearity ProblemSpec::nonlinearity() const {
  switch (kind) {
    case ProblemKind::channel: return PointwiseNonlinearity::zero();
    case ProblemKind::bratu:
      return {[](double z) { return std::exp(z); }, [](double z) { return std::exp(z); },
              [](double z) { return std::exp(z); }};
    case ProblemKind::power: {
      const int p = static_cast<int>(parameter("power"));
      return {[p](double z) { return 1.0 + std::pow(z, p); },
              [p](double z) { return p * std::pow(z, p - 1); },
              [p](double z) { return p * (p - 1) * std::pow(z, p - 2); }};
    }
    case ProblemKind::allen_cahn: {
      const double eps = parameter("epsilon");
      return {[eps](double z) { return (z * z * z - z) / eps; }, [eps](double z) { return (3.0 * z * z - 1.0) / eps; },
              [eps](double z) { return 6.0 * z / eps; }};
    }
    case ProblemKind::bmp:
      return {[](double z) { return z * z; }, [](double z) { return 2.0 * z; }, [](double) { return 2.0; }};
    case ProblemKind::henon:
      return {[](double z) { return z * z * z; }, [](double z) { return 3.0 * z * z; },
              [](double z) { return 6.0 * z; }};
  }
  return PointwiseNonlinearity::zero();
}

double ProblemSpec::source(double x, double y) const {
  if (kind != ProblemKind::bmp) return 0.0;
  const double pi = std::numbers::pi;
  return parameter("amplitude") * std::sin(pi * x) * std::sin(pi * y);
}

ProblemSpec ProblemSpec::with_parameters(const std::map<std::string, double>& values) const {
  ProblemSpec out = *this;
  for (const auto& [name, value] : values) {
    if (!parameters.count(name)) throw std::out_of_range("problem '" + id + "' has no parameter '" + name + "'");
    out.parameters[name] = value;
  }
  out.expected_solutions.reset();
  for (const auto& set : parameter_sets) {
    if (set.values == out.parameters) out.expected_solutions = set.expected_solutions;
  }
  return out;
}

void ProblemSpec::validate() const {
  const std::size_t needed = dimension == 1 ? static_cast<std::size_t>(order) : 4;
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("problem '" + id + "': dimension must be 1 or 2");
  if (boundary.size() != needed) {
    throw std::invalid_argument("problem '" + id + "': expected " + std::to_string(needed) +
                                " boundary conditions, got " + std::to_string(boundary.size()));
  }
  const ProblemSpec& base = lookup(to_string(kind));
  for (const auto& [name, value] : base.parameters) {
    if (!parameters.count(name)) throw std::invalid_argument("problem '" + id + "': missing parameter '" + name + "'");
  }
  if (kind == ProblemKind::power) {
    const double p = parameter("power");
    if (p < 1.0 || p != std::floor(p)) throw std::invalid_argument("problem '" + id + "': power must be a positive integer");
  }
  if (kind == ProblemKind::allen_cahn) {
    if (!(parameter("epsilon") > 0.0)) throw std::invalid_argument("problem '" + id + "': epsilon must be positive");
  }
}

namespace {

std::vector<ProblemSpec> make_catalog() {
  std::vector<ProblemSpec> c;

  ProblemSpec channel;
  channel.id = "channel";
  channel.kind = ProblemKind::channel;
  channel.equation = "u'''' + alpha (y u''' + 3 u'') + Re (u u''' - u' u'') = 0 on (0,1)";
  channel.order = 4;
  channel.boundary = {"u(0) = 0", "u''(0) = 0", "u(1) = 1", "u'(1) = 0"};
  channel.parameters = {{"alpha", 0.0}, {"reynolds", -20.0}};
  channel.parameter_sets = {{{{"alpha", 0.0}, {"reynolds", -20.0}}, 3},
                            {{{"alpha", 2.0}, {"reynolds", -40.0}}, 3},
                            {{{"alpha", -2.0}, {"reynolds", -40.0}}, 3},
                            {{{"alpha", 8.0}, {"reynolds", -40.0}}, 4}};
  channel.expected_solutions = 3;
  channel.initial_guess = "ones";
  channel.default_degree = 18;
  c.push_back(channel);

  ProblemSpec bratu;
  bratu.id = "bratu";
  bratu.kind = ProblemKind::bratu;
  bratu.equation = "u'' + lambda e^u = 0 on (0,1)";
  bratu.boundary = {"u(0) = 0", "u(1) = 0"};
  bratu.parameters = {{"lambda", 1.0}};
  bratu.parameter_sets = {{{{"lambda", 1.0}}, 2}, {{{"lambda", 2.0}}, 2}};
  bratu.expected_solutions = 2;
  bratu.symmetries = {Symmetry::reflect_x};
  bratu.initial_guess = "-cos(ones)";
  bratu.default_degree = 16;
  c.push_back(bratu);

  ProblemSpec power;
  power.id = "power";
  power.kind = ProblemKind::power;
  power.equation = "u'' + lambda (1 + u^p) = 0 on (0,1)";
  power.boundary = {"u'(0) = 0", "u(1) = 0"};
  power.parameters = {{"power", 4.0}, {"lambda", 1.2}};
  power.parameter_sets = {{{{"power", 4.0}, {"lambda", 1.2}}, 2}, {{{"power", 3.0}, {"lambda", 1.2}}, 5}};
  power.expected_solutions = 2;
  power.initial_guess = "-cos(ones)";
  power.default_degree = 16;
  c.push_back(power);

  ProblemSpec ac;
  ac.id = "allen_cahn";
  ac.kind = ProblemKind::allen_cahn;
  ac.equation = "-epsilon Laplace(u) + (u^3 - u) / epsilon = 0 on (0,1)^2";
  ac.dimension = 2;
  ac.boundary = {"u = 1 on x = 0", "u = 1 on x = 1", "u = -1 on y = 0", "u = -1 on y = 1"};
  ac.parameters = {{"epsilon", 0.04}, {"kappa", 0.1}};
  ac.parameter_sets = {{{{"epsilon", 0.04}, {"kappa", 0.1}}, 3}};
  ac.expected_solutions = 3;
  ac.symmetries = {Symmetry::reflect_x, Symmetry::reflect_y, Symmetry::negate_rotate};
  ac.initial_guess = "ones";
  ac.default_degree = 24;
  c.push_back(ac);

  ProblemSpec bmp;
  bmp.id = "bmp";
  bmp.kind = ProblemKind::bmp;
  bmp.equation = "Laplace(u) + u^2 = amplitude sin(pi x) sin(pi y) on (0,1)^2";
  bmp.dimension = 2;
  bmp.boundary = {"u = 0 on x = 0", "u = 0 on x = 1", "u = 0 on y = 0", "u = 0 on y = 1"};
  bmp.parameters = {{"amplitude", 800.0}};
  bmp.parameter_sets = {{{{"amplitude", 800.0}}, 4}};
  bmp.expected_solutions = 4;
  bmp.symmetries = {Symmetry::reflect_x, Symmetry::reflect_y, Symmetry::swap, Symmetry::anti_swap};
  bmp.initial_guess = "ones";
  bmp.default_degree = 24;
  c.push_back(bmp);

  ProblemSpec henon;
  henon.id = "henon";
  henon.kind = ProblemKind::henon;
  henon.equation = "Laplace(u) + u^3 = 0 on (0,1)^2";
  henon.dimension = 2;
  henon.boundary = bmp.boundary;
  henon.symmetries = {Symmetry::negate, Symmetry::rotate, Symmetry::reflect_x, Symmetry::reflect_y,
                      Symmetry::swap, Symmetry::anti_swap};
  henon.initial_guess = "3*ones";
  henon.default_degree = 24;
  c.push_back(henon);
  return c;
}

}  // namespace

const std::vector<ProblemSpec>& catalog() {
  static const std::vector<ProblemSpec> entries = make_catalog();
  return entries;
}

const ProblemSpec& lookup(const std::string& id) {
  std::string valid;
  for (const auto& spec : catalog()) {
    if (spec.id == id) return spec;
    valid += (valid.empty() ? "" : ", ") + spec.id;
  }
  throw std::out_of_range("unknown problem '" + id + "' (valid: " + valid + ")");
}

std::unique_ptr<SpectralSystem> build_system(const ProblemSpec& spec, int degree) {
  spec.validate();
  switch (spec.kind) {
    case ProblemKind::channel:
      return std::make_unique<ChannelSystem>(spec.parameter("alpha"), spec.parameter("reynolds"), degree);
    case ProblemKind::bratu: return std::make_unique<SecondOrderSystem>(make_bratu_system(spec.parameter("lambda"), degree));
    case ProblemKind::power:
      return std::make_unique<SecondOrderSystem>(
          make_power_system(static_cast<int>(spec.parameter("power")), spec.parameter("lambda"), degree));
    default: break;
  }

  // On (-1,1)^2 the Laplacian picks up a factor 4. Every 2D problem is
  // written as  c (grad u, grad v) + (F(u), v) = (f, v).
  Problem2D p;
  p.id = spec.id;
  p.degree = degree;
  p.parameters = spec.parameters;
  const PointwiseNonlinearity native = spec.nonlinearity();
  if (spec.kind == ProblemKind::allen_cahn) {
    // v = u + 1 = w + G with G lifting the smoothed data v = H on x = +-1, 0 on y = +-1.
    const double eps = spec.parameter("epsilon");
    p.diffusion = 4.0 * eps;
    p.nonlinearity = {[native](double z) { return native.value(z - 1.0); },
                      [native](double z) { return native.first(z - 1.0); },
                      [native](double z) { return native.second(z - 1.0); }};
    p.lifting = make_lifting(spec.parameter("kappa"));
    p.output_offset = -1.0;
  } else {
    // Laplace(u) + F(u) = f  becomes  -4 Laplace(u) - F(u) = -f.
    p.diffusion = 4.0;
    p.nonlinearity = native.scaled(-1.0);
    if (spec.kind == ProblemKind::bmp) {
      const ProblemSpec copy = spec;
      p.source = [copy](double x, double y) { return -copy.source(0.5 * (x + 1.0), 0.5 * (y + 1.0)); };
    }
  }
  return std::make_unique<System2D>(std::move(p));
}

Vector initial_guess(const std::string& expression, Eigen::Index n) {
  static const std::regex pattern(
      R"(\s*([+-])?\s*(?:([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*\*\s*)?(ones|zeros|cos\(ones\)|sin\(ones\))\s*)");
  std::smatch m;
  if (!std::regex_match(expression, m, pattern)) {
    throw std::invalid_argument("bad initial guess '" + expression +
                                "' (expected [sign][c*]ones|zeros|cos(ones)|sin(ones))");
  }
  double scale = m[2].matched ? std::stod(m[2].str()) : 1.0;
  if (m[1].matched && m[1].str() == "-") scale = -scale;
  const std::string atom = m[3].str();
  double value = 1.0;
  if (atom == "zeros") value = 0.0;
  if (atom == "cos(ones)") value = std::cos(1.0);
  if (atom == "sin(ones)") value = std::sin(1.0);
  return Vector::Constant(n, scale * value);
}

std::string to_toml(const ProblemSpec& spec) {
  toml::table params;
  for (const auto& [k, v] : spec.parameters) params.insert(k, v);
  toml::array boundary;
  for (const auto& b : spec.boundary) boundary.push_back(b);
  toml::array symmetries;
  for (auto s : spec.symmetries) symmetries.push_back(to_string(s));
  toml::table problem{{"id", spec.id},
                      {"kind", to_string(spec.kind)},
                      {"equation", spec.equation},
                      {"dimension", spec.dimension},
                      {"order", spec.order},
                      {"boundary", boundary},
                      {"symmetries", symmetries},
                      {"initial_guess", spec.initial_guess},
                      {"degree", spec.default_degree},
                      {"parameters", params}};
  if (spec.expected_solutions) problem.insert("expected_solutions", *spec.expected_solutions);
  toml::table root{{"problem", problem}};
  std::ostringstream out;
  out << root << "\n";
  return out.str();
}

namespace {

ProblemSpec spec_from_table(const toml::table& root) {
  const toml::table* problem = root["problem"].as_table();
  if (!problem) throw std::runtime_error("problem config: missing [problem] table");
  const auto id = (*problem)["id"].value<std::string>();
  const auto kind = (*problem)["kind"].value<std::string>();
  if (!id && !kind) throw std::runtime_error("problem config: [problem] needs an id or a kind");
  ProblemSpec spec = lookup(kind ? *kind : *id);
  if (id) spec.id = *id;

  if (const auto* params = (*problem)["parameters"].as_table()) {
    std::map<std::string, double> values;
    for (const auto& [key, node] : *params) {
      const auto v = node.value<double>();
      if (!v) throw std::runtime_error("problem config: parameter '" + std::string(key.str()) + "' is not a number");
      values[std::string(key.str())] = *v;
    }
    spec = spec.with_parameters(values);
  }
  if (auto v = (*problem)["equation"].value<std::string>()) spec.equation = *v;
  if (auto v = (*problem)["dimension"].value<int>()) spec.dimension = *v;
  if (auto v = (*problem)["order"].value<int>()) spec.order = *v;
  if (auto v = (*problem)["initial_guess"].value<std::string>()) spec.initial_guess = *v;
  if (auto v = (*problem)["degree"].value<int>()) spec.default_degree = *v;
  if (auto v = (*problem)["expected_solutions"].value<int>()) spec.expected_solutions = *v;
  if (const auto* arr = (*problem)["boundary"].as_array()) {
    spec.boundary.clear();
    for (const auto& node : *arr) {
      const auto s = node.value<std::string>();
      if (!s) throw std::runtime_error("problem config: boundary entries must be strings");
      spec.boundary.push_back(*s);
    }
  }
  if (const auto* arr = (*problem)["symmetries"].as_array()) {
    spec.symmetries.clear();
    for (const auto& node : *arr) {
      const auto s = node.value<std::string>();
      if (!s) throw std::runtime_error("problem config: symmetries must be strings");
      spec.symmetries.push_back(parse_symmetry(*s));
    }
  }
  initial_guess(spec.initial_guess, 1);
  spec.validate();
  return spec;
}

}  // namespace

ProblemSpec spec_from_toml(const std::string& text) {
  try {
    return spec_from_table(toml::parse(text));
  } catch (const toml::parse_error& e) {
    throw std::runtime_error(std::string("problem config: ") + std::string(e.description()));
  }
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return spec_from_toml(text.str());
}

std::map<std::string, std::string> run_settings_from_toml(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw std::runtime_error(std::string("run config: ") + std::string(e.description()));
  }
  std::map<std::string, std::string> out;
  const toml::table* run = root["run"].as_table();
  if (!run) return out;
  auto render = [](const toml::node& node) -> std::string {
    if (auto s = node.value_exact<std::string>()) return *s;
    if (auto i = node.value_exact<std::int64_t>()) return std::to_string(*i);
    if (auto b = node.value_exact<bool>()) return *b ? "true" : "false";
    if (auto d = node.value_exact<double>()) {
      std::ostringstream o;
      o.precision(17);
      o << *d;
      return o.str();
    }
    throw std::runtime_error("run config: unsupported value type");
  };
  for (const auto& [key, node] : *run) {
    std::string value;
    if (const auto* arr = node.as_array()) {
      for (const auto& item : *arr) value += (value.empty() ? "" : ",") + render(item);
    } else {
      value = render(node);
    }
    out[std::string(key.str())] = value;
  }
  return out;
}

GridSamples transform(const GridSamples& u, Symmetry s) {
  const std::size_t nx = u.x.size();
  const std::size_t ny = u.dimension == 2 ? u.y.size() : 1;
  if (u.values.size() != nx * ny) throw std::invalid_argument("transform: sample shape mismatch");
  const bool planar = s == Symmetry::swap || s == Symmetry::anti_swap || s == Symmetry::rotate ||
                      s == Symmetry::negate_rotate || s == Symmetry::reflect_y;
  if (planar && u.dimension != 2) throw std::invalid_argument("transform: " + to_string(s) + " needs a 2D grid");
  if (u.dimension == 2 && (s == Symmetry::swap || s == Symmetry::anti_swap || s == Symmetry::rotate ||
                           s == Symmetry::negate_rotate) && nx != ny) {
    throw std::invalid_argument("transform: " + to_string(s) + " needs a square grid");
  }
  GridSamples out = u;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t ri = nx - 1 - i;
      const std::size_t rj = ny - 1 - j;
      double v = 0.0;
      switch (s) {
        case Symmetry::reflect_x: v = u.at(ri, j); break;
        case Symmetry::reflect_y: v = u.at(i, rj); break;
        case Symmetry::swap: v = u.at(j, i); break;
        case Symmetry::anti_swap: v = u.at(rj, ri); break;
        case Symmetry::rotate: v = u.at(rj, i); break;
        case Symmetry::negate: v = -u.at(i, j); break;
        case Symmetry::negate_rotate: v = -u.at(rj, i); break;
      }
      out.values[i + nx * j] = v;
    }
  }
  return out;
}

std::optional<Vector> transform_coefficients(const SpectralSystem& system, const Vector& coeffs, Symmetry s) {
  // phi_k = L_{k+2} - L_k has parity (-1)^k under x -> -x.
  auto sign = [](Eigen::Index k) { return k % 2 == 0 ? 1.0 : -1.0; };
  if (const auto* one = dynamic_cast<const SecondOrderSystem*>(&system)) {
    if (one->basis_name() != "legendre_dirichlet_1d") return std::nullopt;
    if (s == Symmetry::negate) return Vector(-coeffs);
    if (s != Symmetry::reflect_x) return std::nullopt;
    Vector out = coeffs;
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] *= sign(k);
    return out;
  }
  const auto* two = dynamic_cast<const System2D*>(&system);
  if (!two || two->problem().lifting || two->problem().output_offset != 0.0) return std::nullopt;
  const Eigen::Index m = two->problem().degree - 1;
  const Eigen::Map<const Matrix> u(coeffs.data(), m, m);
  Matrix t(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      switch (s) {
        case Symmetry::reflect_x: t(k, j) = sign(k) * u(k, j); break;
        case Symmetry::reflect_y: t(k, j) = sign(j) * u(k, j); break;
        case Symmetry::swap: t(k, j) = u(j, k); break;
        case Symmetry::anti_swap: t(k, j) = sign(k + j) * u(j, k); break;
        case Symmetry::rotate: t(k, j) = sign(j) * u(j, k); break;
        case Symmetry::negate: t(k, j) = -u(k, j); break;
        case Symmetry::negate_rotate: t(k, j) = -sign(j) * u(j, k); break;
      }
    }
  }
  return Vector(Eigen::Map<const Vector>(t.data(), t.size()));
}

std::vector<SymmetryCheck> check_symmetry(const ProblemSpec& spec, const SpectralSystem& system,
                                          const Vector& coeffs, int points) {
  const GridSamples u = system.sample(coeffs, points);
  std::vector<SymmetryCheck> out;
  for (Symmetry s : spec.symmetries) {
    SymmetryCheck c{s, 0.0, std::nullopt};
    c.self_defect = max_abs_difference(u, transform(u, s));
    if (auto image = transform_coefficients(system, coeffs, s)) {
      try {
        c.image_residual = system.residual(*image).lpNorm<Eigen::Infinity>();
      } catch (const EvaluationError&) {
        c.image_residual = std::numeric_limits<double>::infinity();
      }
    }
    out.push_back(c);
  }
  return out;
}

double pair_defect(const GridSamples& a, const GridSamples& b, Symmetry s) {
  return max_abs_difference(transform(a, s), b);
}

}  // namespace multisol
