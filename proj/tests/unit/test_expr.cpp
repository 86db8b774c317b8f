#include <doctest.h>

#include <cmath>
#include <random>

#include "expr.hpp"

using namespace symctl;

namespace {

SymbolTable dims(int n, int m) {
  SymbolTable s;
  s.state_dim = n;
  s.input_dim = m;
  return s;
}

// Random smooth expression over x1..x2, u1; no poles on [-1,1]^3.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
  std::uniform_real_distribution<double> c(-2, 2);
  switch (pick(rng)) {
    case 0: return Expr::state(static_cast<int>(rng() % 2));
    case 1: return Expr::input(0);
    case 2: return Expr::constant(std::round(c(rng) * 8) / 8);
    case 3: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 6: return random_expr(rng, depth - 1) / (Expr::constant(3.0) + pow(random_expr(rng, depth - 1), 2));
    case 7: return apply(Op::Sin, random_expr(rng, depth - 1));
    case 8: return apply(Op::Cos, random_expr(rng, depth - 1));
    case 9: return apply(Op::Atan, random_expr(rng, depth - 1));
    case 10: return pow(random_expr(rng, depth - 1), 1 + static_cast<int>(rng() % 3));
    default: return -random_expr(rng, depth - 1);
  }
}

double fd(const Expr& e, std::vector<double> x, std::vector<double> u, Variable v, double h) {
  auto& s = v.kind == VarKind::State ? x : u;
  const double orig = s[v.index];
  s[v.index] = orig + h;
  const double fp = eval_real(e, x, u);
  s[v.index] = orig - h;
  const double fm = eval_real(e, x, u);
  return (fp - fm) / (2 * h);
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("parse the bicycle heading component") {
  SymbolTable s = dims(3, 2);
  s.constants["a"] = 0.3;
  const Expr e = parse_expr("u1*cos(a + x3)/cos(a)", s);
  const double x[] = {0, 0, 0.2}, u[] = {0.7, 0};
  CHECK(eval_real(e, x, u) == doctest::Approx(0.7 * std::cos(0.5) / std::cos(0.3)));
}

TEST_CASE("syntax errors report positions") {
  const SymbolTable s = dims(3, 2);
  try {
    (void)parse_expr("x1 + ", s);
    FAIL("expected syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 6);
    CHECK(std::string(e.what()).find("end of input") != std::string::npos);
  }
  try {
    (void)parse_expr("x1 * (x2", s, 4);
    FAIL("expected syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 4);
  }
  CHECK(kind_of([&] { (void)parse_expr("x7", s); }) == ErrorKind::UnknownIdentifier);
  CHECK(kind_of([&] { (void)parse_expr("foo + 1", s); }) == ErrorKind::UnknownIdentifier);
  CHECK(kind_of([&] { (void)parse_expr("x1^1.5", s); }) == ErrorKind::NonIntegerExponent);
  CHECK(kind_of([&] { (void)parse_expr("x1^x2", s); }) == ErrorKind::NonIntegerExponent);
  CHECK(kind_of([&] { (void)parse_expr("sin x1", s); }) == ErrorKind::Syntax);
}

TEST_CASE("real evaluation") {
  const SymbolTable s = dims(3, 2);
  const double x[] = {1, 0, 0}, u[] = {2, 0.5};
  CHECK(eval_real(parse_expr("2.5", s), x, u) == 2.5);
  CHECK(eval_real(parse_expr("x1+u1", s), x, u) == 3.0);
  const double uu[] = {1, 0.5};
  CHECK(eval_real(parse_expr("u1*tan(u2)", s), x, uu) == doctest::Approx(std::tan(0.5)).epsilon(1e-15));
  CHECK(eval_real(parse_expr("-x1^2", s), x, u) == -1.0);
  CHECK(eval_real(parse_expr("2^-2", s), x, u) == 0.25);
  CHECK(eval_real(parse_expr("neg(u1) * pi", s), x, u) == doctest::Approx(-2 * M_PI));
  const double pole[] = {0, 0, 0}, up[] = {1, M_PI / 2};
  CHECK(kind_of([&] { (void)eval_real(parse_expr("tan(u2)", s), pole, up); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { (void)eval_real(parse_expr("1/x2", s), pole, up); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { (void)eval_real(parse_expr("sqrt(x1 - 1)", s), pole, up); }) == ErrorKind::Domain);
}

TEST_CASE("interval evaluation") {
  const SymbolTable s = dims(1, 1);
  const Box x{Interval(0, 1)}, u{Interval(0)};
  CHECK(eval_interval(parse_expr("x1", s), x, u) == Interval(0, 1));
  CHECK(eval_interval(parse_expr("x1*x1", s), Box{Interval(-1, 1)}, u) == Interval(-1, 1));
  const Interval r = eval_interval(parse_expr("sin(x1)", s), Box{Interval(0, M_PI)}, u);
  CHECK(r.lo() == 0.0);
  CHECK(r.hi() == 1.0);
  try {
    (void)eval_interval(parse_expr("1 + tan(x1)", s), Box{Interval(1, 2)}, u);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
    CHECK(std::string(e.what()).find("tan(x1)") != std::string::npos);
  }
}

TEST_CASE("derivatives") {
  const SymbolTable s = dims(3, 2);
  const Expr sq = differentiate(parse_expr("x1*x1", s), {VarKind::State, 0});
  const Expr twice = parse_expr("2*x1", s);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int i = 0; i < 50; ++i) {
    const double x[] = {d(rng), 0, 0}, u[] = {0, 0};
    CHECK(eval_real(sq, x, u) == doctest::Approx(eval_real(twice, x, u)));
  }
  CHECK(differentiate(parse_expr("x1", s), {VarKind::State, 1}).is_constant(0.0));

  const Expr bike = parse_expr("u1*tan(u2)", s);
  const Expr db = differentiate(bike, {VarKind::Input, 1});
  for (int i = 0; i < 100; ++i) {
    std::uniform_real_distribution<double> uu(-1, 1);
    const std::vector<double> x = {0, 0, 0}, u = {uu(rng), uu(rng)};
    CHECK(eval_real(db, x, u) == doctest::Approx(fd(bike, x, u, {VarKind::Input, 1}, 1e-6)).epsilon(1e-5).scale(1e-3));
  }
}

TEST_CASE("derivatives match finite differences on random expressions") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1, 1);
  int checked = 0;
  while (checked < 1000) {
    const Expr e = random_expr(rng, 4);
    const Variable v = rng() % 3 == 2 ? Variable{VarKind::Input, 0} : Variable{VarKind::State, static_cast<int>(rng() % 2)};
    const Expr de = differentiate(e, v);
    const std::vector<double> x = {d(rng), d(rng)}, u = {d(rng)};
    const double exact = eval_real(de, x, u);
    const double approx = fd(e, x, u, v, 1e-6);
    // relative tolerance 1e-5 with an absolute floor for values near zero
    REQUIRE(std::fabs(exact - approx) <= 1e-5 * std::max(1.0, std::fabs(exact)));
    ++checked;
  }
}

TEST_CASE("printer round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  const SymbolTable s = dims(2, 1);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_expr(rng, 5);
    const std::string text = to_string(e);
    const Expr back = parse_expr(text, s);
    CHECK(to_string(back) == text);
    const double x[] = {d(rng), d(rng)}, u[] = {d(rng)};
    CHECK(eval_real(back, x, u) == eval_real(e, x, u));
  }
}

TEST_CASE("point evaluation lies in point-box enclosure") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int i = 0; i < 10000; ++i) {
    const Expr e = random_expr(rng, 5);
    const double x[] = {d(rng), d(rng)}, u[] = {d(rng)};
    const double v = eval_real(e, x, u);
    REQUIRE(eval_interval(e, Box::point(x), Box::point(u)).contains(v));
  }
}

TEST_CASE("enclosures are isotone and converge") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_expr(rng, 4);
    const double c0 = d(rng), c1 = d(rng), cu = d(rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double w = 0.5; w > 1e-7; w /= 2) {
      const Box x{Interval(c0 - w, c0 + w), Interval(c1 - w, c1 + w)};
      const Box u{Interval(cu - w, cu + w)};
      const Interval r = eval_interval(e, x, u);
      REQUIRE(r.width() <= prev);
      prev = r.width();
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("tape agrees with tree evaluation and shares work") {
  const SymbolTable s = dims(2, 1);
  const Expr a = parse_expr("sin(x1 + x2) * u1", s);
  const Expr b = parse_expr("sin(x1 + x2) + 1", s);
  const Expr outs[] = {a, b};
  const Tape tape(outs);
  // x1, x2, add, sin, u1, mul, const, add
  CHECK(tape.registers() == 8);
  std::vector<Interval> out(2), scratch;
  const Box x{Interval(0, 0.5), Interval(0.1, 0.2)}, u{Interval(1, 2)};
  tape.eval_interval(x, u, out, scratch);
  CHECK(out[0] == eval_interval(a, x, u));
  CHECK(out[1] == eval_interval(b, x, u));
}

TEST_CASE("model files") {
  const SystemModel m = SystemModel::from_file(SYMCTL_DATA_DIR "/bicycle.model");
  CHECK(m.state_dim() == 3);
  CHECK(m.input_dim() == 2);
  CHECK(m.X() == Box{Interval(7, 10), Interval(0, 4.5), Interval(-M_PI, M_PI)});
  const double x[] = {8, 2, 0.3}, u[] = {0.7, -0.4};
  // three explicit Euler substeps written out by hand
  const double alpha = std::atan(0.5 * std::tan(u[1]));
  double p[] = {x[0], x[1], x[2]};
  for (int k = 0; k < 3; ++k) {
    const double v = u[0] / std::cos(alpha);
    const double n0 = p[0] + 0.1 * v * std::cos(alpha + p[2]);
    const double n1 = p[1] + 0.1 * v * std::sin(alpha + p[2]);
    const double n2 = p[2] + 0.1 * u[0] * std::tan(u[1]);
    p[0] = n0, p[1] = n1, p[2] = n2;
  }
  const auto fx = m.eval(x, u);
  for (int i = 0; i < 3; ++i) CHECK(fx[i] == doctest::Approx(p[i]).epsilon(1e-13));

  CHECK(kind_of([] { (void)SystemModel::from_file("/nonexistent/model"); }) == ErrorKind::Io);
  CHECK(kind_of([] { (void)SystemModel::from_string("states 1\ninputs 1\nX [0,1]\nU [0,1]\nf1 = x2\n"); }) ==
        ErrorKind::UnknownIdentifier);
  try {
    (void)SystemModel::from_string("states 1\ninputs 1\nX [0,1]\nU [0,1]\nf1 = x1 +\n");
    FAIL("expected syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 5);
  }
  const auto per = SystemModel::from_string("states 2\ninputs 1\nX [0,1] [0,6]\nU [0,1]\nf1 = x1\nf2 = x2+u1\nperiodic x2\nlipschitz 3\n");
  CHECK(per.periodic == std::vector<bool>{false, true});
  CHECK(per.lipschitz_override == 3.0);
}

TEST_CASE("centered and hybrid enclosures contain the natural range") {
  const SystemModel m = SystemModel::from_file(SYMCTL_DATA_DIR "/bicycle.model");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double c[] = {7 + 3 * d(rng), 4.5 * d(rng), -3 + 6 * d(rng)};
    const Box cell{Interval(c[0], c[0] + 0.2), Interval(c[1], c[1] + 0.2), Interval(c[2], c[2] + 0.2)};
    const double up[] = {-1 + 2 * d(rng), -1 + 2 * d(rng)};
    const Box u = Box::point(up);
    const Box nat = m.enclose(cell, u, InclusionKind::Natural);
    const Box cen = m.enclose(cell, u, InclusionKind::Centered);
    const Box hyb = m.enclose(cell, u, InclusionKind::Hybrid);
    CHECK(contains(nat, hyb));
    CHECK(contains(cen, hyb));
    for (int k = 0; k < 50; ++k) {
      const double p[] = {c[0] + 0.2 * d(rng), c[1] + 0.2 * d(rng), c[2] + 0.2 * d(rng)};
      REQUIRE(contains(hyb, m.eval(p, up)));
    }
  }
}

TEST_CASE("Lipschitz bounds") {
  SystemModel id({Expr::state(0)}, 1, Box{Interval(0, 1)}, Box{Interval(0, 1)});
  const double l = lipschitz_bound(id, 0, 0);
  CHECK(l >= 1.0);
  CHECK(l <= 1.0 + 1e-12);

  const SymbolTable s = dims(1, 1);
  SystemModel lin({parse_expr("2*x1 + 3*u1", s)}, 1, Box{Interval(0, 1)}, Box{Interval(0, 1)});
  const auto lb = lipschitz_blocks(lin, 0, 0);
  CHECK(lb.state_block == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lb.input_block == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(lb.combined() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("bicycle Lipschitz bound dominates sampled difference quotients") {
  const SystemModel m = SystemModel::from_file(SYMCTL_DATA_DIR "/bicycle.model");
  // padding the steering input by 1 reaches the tan pole at pi/2
  try {
    (void)lipschitz_bound(m, 1.0, 1.0);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
    CHECK(std::string(e.what()).find("override") != std::string::npos);
  }
  const auto lb = lipschitz_blocks(m, 1.0, 0.0);
  CHECK(std::isfinite(lb.combined()));
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> d(0, 1);
  double worst_x = 0, worst_u = 0;
  for (int i = 0; i < 10000; ++i) {
    auto rx = [&] { return std::vector<double>{6 + 5 * d(rng), -1 + 6.5 * d(rng), -M_PI - 1 + (2 * M_PI + 2) * d(rng)}; };
    auto ru = [&] { return std::vector<double>{-1 + 2 * d(rng), -1 + 2 * d(rng)}; };
    const auto x = rx(), y = rx(), u = ru(), v = ru();
    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
      double r = 0;
      for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::fabs(a[k] - b[k]));
      return r;
    };
    worst_x = std::max(worst_x, dist(m.eval(x, u), m.eval(y, u)) / dist(x, y));
    worst_u = std::max(worst_u, dist(m.eval(x, u), m.eval(x, v)) / dist(u, v));
  }
  CHECK(lb.state_block >= worst_x);
  CHECK(lb.input_block >= worst_u);
  MESSAGE("bicycle L_x=" << lb.state_block << " L_u=" << lb.input_block);
}
