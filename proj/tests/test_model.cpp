#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "turing1/model.hpp"

using namespace turing1;
using oracles::uniform;

namespace {

// The partitioned transfer function must equal the corner of the resolvent:
// h(s) = e_n^T (sI - A)^{-1} e_n (adjugate identity). Evaluated directly in
// complex arithmetic, independent of any polynomial code.
std::complex<double> resolvent_corner(const Eigen::MatrixXd& A,
                                      std::complex<double> s) {
  const long n = A.rows();
  Eigen::MatrixXcd M = -A.cast<std::complex<double>>();
  for (long i = 0; i < n; ++i) M(i, i) += s;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e(n - 1) = 1.0;
  return (M.fullPivLu().solve(e))(n - 1);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("partition tiles the matrix exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + int(uniform(rng, 0.0, 4.0));
    model::LinearSystem sys{oracles::random_matrix(rng, n)};
    const model::Partition part = model::partition(sys);
    CHECK(part.At == sys.A.topLeftCorner(n - 1, n - 1));
    CHECK(part.b == sys.A.topRightCorner(n - 1, 1).col(0));
    CHECK(part.c == sys.A.bottomLeftCorner(1, n - 1).row(0));
    CHECK(part.d == sys.A(n - 1, n - 1));
  }
  CHECK_THROWS_AS(model::partition(model::LinearSystem{Eigen::MatrixXd::Ones(1, 1)}),
                  std::invalid_argument);
}

TEST_CASE("transfer function equals the resolvent corner") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + int(uniform(rng, 0.0, 3.0));
    model::LinearSystem sys{oracles::random_matrix(rng, n, uniform(rng, 0.4, 2.0))};
    const auto tf = model::transfer_function(sys);
    REQUIRE(tf.num.degree() == n - 1);
    REQUIRE(tf.den.degree() == n);
    CHECK(tf.num.c[0] == 1.0);
    CHECK(tf.den.c[0] == 1.0);
    for (int pt = 0; pt < 6; ++pt) {
      // stay away from the spectrum so the resolvent is well conditioned
      const std::complex<double> s(uniform(rng, 2.5, 6.0), uniform(rng, -3.0, 3.0));
      const auto ratio = tf.num.eval(s) / tf.den.eval(s);
      const auto ref = resolvent_corner(sys.A, s);
      CHECK(std::abs(ratio - ref) <= 1e-9 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("closed-loop polynomial is d + lambda n with tail alignment") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + int(uniform(rng, 0.0, 3.0));
    model::LinearSystem sys{oracles::random_matrix(rng, n)};
    const auto tf = model::transfer_function(sys);
    const double lam = uniform(rng, 0.0, 50.0);
    const auto p = model::closed_loop_poly(tf, lam);
    CHECK(p.degree() == n);  // lambda never touches the leading term
    CHECK(p.c[0] == tf.den.c[0]);
    for (int pt = 0; pt < 5; ++pt) {
      const std::complex<double> s(uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0));
      const auto expect = tf.den.eval(s) + lam * tf.num.eval(s);
      CHECK(std::abs(p.eval(s) - expect) <= 1e-10 * (1.0 + std::abs(expect)));
    }
  }
  model::LinearSystem sys{oracles::random_matrix(rng, 3)};
  const auto tf = model::transfer_function(sys);
  CHECK(model::closed_loop_poly(tf, 0.0).c == tf.den.c);  // exact copy at 0
  CHECK_THROWS_AS(model::closed_loop_poly(tf, -1e-12), std::invalid_argument);
}

TEST_CASE("mode gains follow mu (k pi / L)^2") {
  model::SpatialSpec spec;
  spec.mu = 2.5e-3;
  spec.L = 1.7;
  CHECK(model::mode_gain(spec, 0) == 0.0);
  for (int k = 1; k <= 7; ++k) {
    const double expect = spec.mu * std::pow(double(k) * M_PI / spec.L, 2);
    CHECK(model::mode_gain(spec, k) == doctest::Approx(expect).epsilon(1e-15));
  }
  // monotone in k
  CHECK(model::mode_gain(spec, 5) < model::mode_gain(spec, 6));
  CHECK_THROWS_AS(model::mode_gain(spec, -1), std::invalid_argument);
}

TEST_CASE("pole-zero cancellation and the decoupled corner case") {
  std::mt19937_64 rng(44);
  // b = 0 makes A block lower-triangular: spec(Atilde) subset of spec(A),
  // every zero cancels.
  Eigen::MatrixXd A = oracles::random_matrix(rng, 3);
  A(0, 2) = A(1, 2) = 0.0;
  const auto tf = model::transfer_function(model::LinearSystem{A});
  const auto shared = model::detect_cancellation(tf);
  CHECK(shared.size() == 2);

  // Sylvester resultant corroborates: near-zero iff a common root exists
  const double res = oracles::sylvester_resultant(tf.num, tf.den);
  CHECK(res <= 1e-9 * std::pow(tf.den.scale(), tf.num.degree() + tf.den.degree()));

  // generic random systems share no roots
  int clean = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto tf2 =
        model::transfer_function(model::LinearSystem{oracles::random_matrix(rng, 4)});
    if (model::detect_cancellation(tf2).empty()) ++clean;
  }
  CHECK(clean == 20);

  // decoupled flag needs BOTH couplings zero
  Eigen::MatrixXd B = oracles::random_matrix(rng, 3);
  B(0, 2) = B(1, 2) = B(2, 0) = B(2, 1) = 0.0;
  CHECK(model::decoupled(model::partition(model::LinearSystem{B})));
  B(2, 0) = 0.5;
  CHECK(!model::decoupled(model::partition(model::LinearSystem{B})));
}

TEST_CASE("json ingestion: round trip and defaults") {
  const std::string text = R"({
    "A": [[-1.0, 2.0, 0.1], [-2.0, -1.0, 0.3], [0.2, 0.4, -0.5]],
    "mu": 2e-3, "L": 1.5, "k_max": 64, "lambda_policy": "continuous"
  })";
  const auto in = model::parse_model(text);
  CHECK(in.sys.n() == 3);
  CHECK(in.sys.A(0, 1) == 2.0);
  CHECK(in.spec.mu == 2e-3);
  CHECK(in.spec.L == 1.5);
  CHECK(in.spec.k_max == 64);
  CHECK(in.spec.lambda_policy == model::LambdaPolicy::Continuous);

  const auto defaults = model::parse_model(
      R"({"A": [[-1, 0], [0, -2]], "mu": 0.0, "L": 1.0})");
  CHECK(defaults.spec.k_max == 200);
  CHECK(defaults.spec.lambda_policy == model::LambdaPolicy::Discrete);
}

TEST_CASE("json ingestion: diffuser reordering is a similarity") {
  // same physical system written with the diffuser first vs last
  const std::string reordered = R"({
    "A": [[-0.5, 0.2, 0.4], [0.1, -1.0, 2.0], [0.3, -2.0, -1.0]],
    "diffuser_index": 0, "mu": 1e-3, "L": 1.0
  })";
  const std::string canonical = R"({
    "A": [[-1.0, 2.0, 0.1], [-2.0, -1.0, 0.3], [0.2, 0.4, -0.5]],
    "mu": 1e-3, "L": 1.0
  })";
  const auto a = model::parse_model(reordered);
  const auto b = model::parse_model(canonical);
  CHECK(a.sys.A == b.sys.A);  // exact permutation, no arithmetic

  const auto tfa = model::transfer_function(a.sys);
  const auto tfb = model::transfer_function(b.sys);
  for (std::size_t i = 0; i < tfa.den.c.size(); ++i)
    CHECK(tfa.den.c[i] == doctest::Approx(tfb.den.c[i]).epsilon(1e-14));
}

TEST_CASE("json ingestion: field-level failures") {
  using doctest::Contains;
  auto bad = [](const std::string& body) { return model::parse_model(body); };
  CHECK_THROWS_WITH_AS(bad(R"({"mu": 1, "L": 1})"), Contains("'A'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(bad(R"({"A": [[-1, 0], [0]], "mu": 1, "L": 1})"),
                       Contains("square"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(bad(R"({"A": [[-1]], "mu": 1, "L": 1})"),
                       Contains("2x2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(bad(R"({"A": [[-1, 0], [0, -1]], "L": 1})"),
                       Contains("'mu'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(bad(R"({"A": [[-1, 0], [0, -1]], "mu": -1, "L": 1})"),
                       Contains("'mu'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(bad(R"({"A": [[-1, 0], [0, -1]], "mu": 1, "L": 0})"),
                       Contains("'L'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(bad(R"({"A": [[-1, 0], [0, -1]], "mu": 1, "L": 1, "k_max": -3})"),
                       Contains("'k_max'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      bad(R"({"A": [[-1, 0], [0, -1]], "mu": 1, "L": 1, "lambda_policy": "dense"})"),
      Contains("'lambda_policy'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      bad(R"({"A": [[-1, 0], [0, -1]], "mu": 1, "L": 1, "diffuser_index": 2})"),
      Contains("'diffuser_index'"), std::invalid_argument);
  CHECK_THROWS_AS(bad("not json at all"), std::invalid_argument);
  CHECK_THROWS_AS(model::load_model("/nonexistent/path.json"), std::invalid_argument);
}

}  // TEST_SUITE
