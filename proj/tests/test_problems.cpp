#include "doctest.h"
#include "oracle.hpp"

#include "multisol/galerkin_1d.hpp"
#include "multisol/galerkin_2d.hpp"
#include "multisol/problems.hpp"
#include "multisol/trust_region.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

using namespace multisol;

namespace {

const std::vector<Symmetry> all_symmetries{Symmetry::reflect_x, Symmetry::reflect_y, Symmetry::swap,
                                           Symmetry::anti_swap, Symmetry::rotate,    Symmetry::negate,
                                           Symmetry::negate_rotate};

GridSamples square_grid(int n, std::uint64_t seed) {
  GridSamples g;
  g.dimension = 2;
  for (int i = 0; i < n; ++i) {
    g.x.push_back(static_cast<double>(i) / (n - 1));
    g.y.push_back(static_cast<double>(i) / (n - 1));
  }
  const Vector v = oracle::random_vector(n * n, seed);
  g.values.assign(v.data(), v.data() + v.size());
  return g;
}

}  // namespace

TEST_CASE("catalog entries") {
  std::set<std::string> ids;
  for (const auto& spec : catalog()) {
    ids.insert(spec.id);
    CHECK_NOTHROW(spec.validate());
    CHECK(lookup(spec.id).id == spec.id);
    CHECK_NOTHROW(initial_guess(spec.initial_guess, 4));
  }
  CHECK(ids == std::set<std::string>{"channel", "bratu", "power", "allen_cahn", "bmp", "henon"});

  CHECK(lookup("allen_cahn").parameter("epsilon") == 0.04);
  CHECK(lookup("bmp").source(0.5, 0.5) == doctest::Approx(800.0).epsilon(1e-14));
  CHECK(lookup("bmp").source(0.0, 0.3) == doctest::Approx(0.0));
  CHECK(lookup("henon").nonlinearity().value(2.0) == 8.0);
  CHECK(lookup("bratu").nonlinearity().value(0.0) == 1.0);
  CHECK(lookup("power").nonlinearity().value(1.0) == 2.0);
  CHECK(lookup("channel").boundary.size() == 4);
  CHECK(lookup("bratu").expected_solutions == 2);
  CHECK(lookup("bmp").expected_solutions == 4);
  CHECK_THROWS_AS(lookup("channel").parameter("lambda"), std::out_of_range);
}

TEST_CASE("unknown ids list the valid ones") {
  try {
    lookup("no_such_problem");
    FAIL("lookup accepted an unknown id");
  } catch (const std::out_of_range& e) {
    const std::string what = e.what();
    CHECK(what.find("bratu") != std::string::npos);
    CHECK(what.find("henon") != std::string::npos);
  }
}

TEST_CASE("nonlinearity derivatives match finite differences") {
  for (const auto& spec : catalog()) {
    const auto f = spec.nonlinearity();
    const Vector z = oracle::random_vector(10, 31, 2.0);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double h = 1e-5;
      const double d1 = (f.value(z[i] + h) - f.value(z[i] - h)) / (2 * h);
      const double d2 = (f.first(z[i] + h) - f.first(z[i] - h)) / (2 * h);
      CHECK(f.first(z[i]) == doctest::Approx(d1).epsilon(1e-7).scale(1.0));
      CHECK(f.second(z[i]) == doctest::Approx(d2).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("every system has a consistent Jacobian at small N") {
  for (const auto& spec : catalog()) {
    const int n = spec.dimension == 1 ? 10 : 5;
    const auto s = build_system(spec, n);
    const int per_axis = n + 1 - static_cast<int>(spec.boundary.size()) / spec.dimension;
    CHECK(s->size() == (spec.dimension == 1 ? per_axis : per_axis * per_axis));
    const Vector x = oracle::random_vector(s->size(), 41, 0.3);
    CHECK(oracle::jacobian_error(*s, x) <= 1e-6);
  }
}

TEST_CASE("parameter overrides") {
  const auto& channel = lookup("channel");
  const auto four = channel.with_parameters({{"alpha", 8.0}, {"reynolds", -40.0}});
  CHECK(four.parameter("alpha") == 8.0);
  CHECK(four.expected_solutions == 4);
  CHECK_FALSE(channel.with_parameters({{"alpha", 1.0}}).expected_solutions.has_value());
  CHECK(lookup("power").with_parameters({{"power", 3.0}}).expected_solutions == 5);
  CHECK_THROWS_AS(channel.with_parameters({{"lambda", 1.0}}), std::out_of_range);
  CHECK_THROWS_AS(lookup("power").with_parameters({{"power", 2.5}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(lookup("allen_cahn").with_parameters({{"epsilon", 0.0}}).validate(), std::invalid_argument);
  ProblemSpec broken = lookup("bratu");
  broken.boundary.pop_back();
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("initial guess expressions") {
  CHECK(initial_guess("ones", 3) == Vector::Ones(3));
  CHECK(initial_guess("zeros", 2) == Vector::Zero(2));
  CHECK(initial_guess("0.1*ones", 4)[3] == 0.1);
  CHECK(initial_guess("-cos(ones)", 2)[0] == -std::cos(1.0));
  CHECK(initial_guess(" 2.5e-1 * sin(ones) ", 1)[0] == 0.25 * std::sin(1.0));
  CHECK(initial_guess("3*ones", 5).size() == 5);
  for (const char* bad : {"", "ones()", "two*ones", "cos(1)", "1.0*", "ones + 1"}) {
    CHECK_THROWS_AS(initial_guess(bad, 3), std::invalid_argument);
  }
}

TEST_CASE("TOML round trip of every catalog entry") {
  for (const auto& spec : catalog()) {
    const ProblemSpec back = spec_from_toml(to_toml(spec));
    CHECK(back.id == spec.id);
    CHECK(back.kind == spec.kind);
    CHECK(back.equation == spec.equation);
    CHECK(back.dimension == spec.dimension);
    CHECK(back.order == spec.order);
    CHECK(back.boundary == spec.boundary);
    CHECK(back.parameters == spec.parameters);
    CHECK(back.symmetries == spec.symmetries);
    CHECK(back.initial_guess == spec.initial_guess);
    CHECK(back.default_degree == spec.default_degree);
    CHECK(back.expected_solutions == spec.expected_solutions);
    CHECK(to_toml(back) == to_toml(spec));
  }
}

TEST_CASE("TOML configs") {
  const std::string text = R"(
[problem]
id = "bratu"
initial_guess = "0.5*ones"
degree = 20
[problem.parameters]
lambda = 2.0

[run]
budget = 4
strategy = "perturb_last"
subset = ["I", "II"]
shift = 0.5
full_hessian = true
)";
  const ProblemSpec spec = spec_from_toml(text);
  CHECK(spec.parameter("lambda") == 2.0);
  CHECK(spec.expected_solutions == 2);
  CHECK(spec.default_degree == 20);
  CHECK(spec.initial_guess == "0.5*ones");
  const auto run = run_settings_from_toml(text);
  CHECK(run.at("budget") == "4");
  CHECK(run.at("strategy") == "perturb_last");
  CHECK(run.at("subset") == "I,II");
  CHECK(std::stod(run.at("shift")) == 0.5);
  CHECK(run.at("full_hessian") == "true");

  CHECK_THROWS(spec_from_toml("[problem]\nid = \"nope\"\n"));
  CHECK_THROWS(spec_from_toml("[other]\nx = 1\n"));
  CHECK_THROWS(spec_from_toml("[problem\n"));
  CHECK_THROWS(spec_from_toml("[problem]\nid = \"bratu\"\ninitial_guess = \"huge\"\n"));
  CHECK_THROWS(spec_from_toml("[problem]\nid = \"bratu\"\nsymmetries = [\"spin\"]\n"));
  CHECK_THROWS(spec_from_toml("[problem]\nid = \"bratu\"\n[problem.parameters]\nmu = 1.0\n"));
  CHECK_THROWS(load_spec("/nonexistent/problem.toml"));
  CHECK(run_settings_from_toml("[problem]\nid = \"bratu\"\n").empty());
}

TEST_CASE("symmetry names") {
  for (Symmetry s : all_symmetries) CHECK(parse_symmetry(to_string(s)) == s);
  CHECK_THROWS_AS(parse_symmetry("spin"), std::invalid_argument);
}

TEST_CASE("grid transforms form the symmetry group of the square") {
  const GridSamples u = square_grid(7, 3);
  auto apply = [](GridSamples g, Symmetry s, int times) {
    for (int i = 0; i < times; ++i) g = transform(g, s);
    return g;
  };
  for (Symmetry s : {Symmetry::reflect_x, Symmetry::reflect_y, Symmetry::swap, Symmetry::anti_swap, Symmetry::negate}) {
    CHECK(max_abs_difference(apply(u, s, 2), u) == 0.0);
    CHECK(max_abs_difference(apply(u, s, 1), u) > 0.0);
  }
  CHECK(max_abs_difference(apply(u, Symmetry::rotate, 4), u) == 0.0);
  CHECK(max_abs_difference(apply(u, Symmetry::rotate, 2), apply(apply(u, Symmetry::reflect_x, 1), Symmetry::reflect_y, 1)) == 0.0);
  CHECK(max_abs_difference(apply(u, Symmetry::negate_rotate, 2), apply(u, Symmetry::rotate, 2)) == 0.0);
  CHECK(max_abs_difference(apply(u, Symmetry::negate_rotate, 4), u) == 0.0);
  // a quarter turn is the product of two reflections
  CHECK(max_abs_difference(transform(u, Symmetry::rotate), transform(transform(u, Symmetry::reflect_x), Symmetry::swap)) == 0.0);
  // value at a point
  CHECK(transform(u, Symmetry::rotate).at(1, 2) == u.at(7 - 1 - 2, 1));
  CHECK(pair_defect(u, transform(u, Symmetry::swap), Symmetry::swap) == 0.0);

  GridSamples line;
  line.x = {0.0, 0.5, 1.0};
  line.values = {1.0, 2.0, 3.0};
  CHECK(transform(line, Symmetry::reflect_x).values == std::vector<double>{3.0, 2.0, 1.0});
  CHECK_THROWS_AS(transform(line, Symmetry::swap), std::invalid_argument);
}

TEST_CASE("coefficient maps agree with grid transforms") {
  const auto bmp = build_system(lookup("bmp"), 7);
  const Vector u = oracle::random_vector(bmp->size(), 11);
  for (Symmetry s : all_symmetries) {
    const auto image = transform_coefficients(*bmp, u, s);
    REQUIRE(image.has_value());
    CHECK(max_abs_difference(bmp->sample(*image, 9), transform(bmp->sample(u, 9), s)) <= 1e-12);
  }
  const auto bratu = build_system(lookup("bratu"), 9);
  const Vector v = oracle::random_vector(bratu->size(), 12);
  const auto image = transform_coefficients(*bratu, v, Symmetry::reflect_x);
  REQUIRE(image.has_value());
  CHECK(max_abs_difference(bratu->sample(*image, 11), transform(bratu->sample(v, 11), Symmetry::reflect_x)) <= 1e-12);

  // a lifting or a mixed basis has no exact coefficient map
  const auto ac = build_system(lookup("allen_cahn"), 6);
  CHECK_FALSE(transform_coefficients(*ac, Vector::Zero(ac->size()), Symmetry::reflect_x).has_value());
  const auto power = build_system(lookup("power"), 8);
  CHECK_FALSE(transform_coefficients(*power, Vector::Zero(power->size()), Symmetry::reflect_x).has_value());
}

TEST_CASE("symmetry images of a root are roots") {
  const ProblemSpec henon = lookup("henon");
  const auto s = build_system(henon, 10);
  const auto r = tr_iterate(*s, initial_guess(henon.initial_guess, s->size()));
  REQUIRE(r.converged());
  REQUIRE(r.x.norm() > 1.0);
  for (const auto& c : check_symmetry(henon, *s, r.x, 21)) {
    REQUIRE(c.image_residual.has_value());
    CHECK(*c.image_residual <= 1e-9);
  }
  // the negated root is a distinct root
  const auto negated = transform_coefficients(*s, r.x, Symmetry::negate);
  CHECK(s->residual(*negated).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(max_abs_difference(s->sample(r.x, 21), s->sample(*negated, 21)) > 1.0);

  // Bratu roots are even about the midpoint
  const ProblemSpec bratu = lookup("bratu");
  const auto b = build_system(bratu, 16);
  const auto rb = tr_iterate(*b, initial_guess(bratu.initial_guess, b->size()));
  REQUIRE(rb.converged());
  const auto checks = check_symmetry(bratu, *b, rb.x);
  REQUIRE(checks.size() == 1);
  CHECK(checks[0].self_defect <= 1e-12);
  CHECK(*checks[0].image_residual <= 1e-11);
}
