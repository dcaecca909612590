#include "turing1/model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace turing1::model {

Partition partition(const LinearSystem& sys) {
  const int n = sys.n();
  if (n < 2 || sys.A.cols() != n)
    throw std::invalid_argument("model requires a square system with n >= 2 species");
  Partition p;
  p.At = sys.A.topLeftCorner(n - 1, n - 1);
  p.b = sys.A.topRightCorner(n - 1, 1);
  p.c = sys.A.bottomLeftCorner(1, n - 1);
  p.d = sys.A(n - 1, n - 1);
  return p;
}

RationalTransfer transfer_function(const LinearSystem& sys) {
  Partition p = partition(sys);
  RationalTransfer tf;
  tf.num = numerics::char_poly(p.At);
  tf.den = numerics::char_poly(sys.A);
  return tf;
}

numerics::Poly closed_loop_poly(const RationalTransfer& tf, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("closed_loop_poly: gain must be a nonnegative number");
  std::vector<double> out(tf.den.c);
  if (lambda != 0.0) {
    const std::size_t off = out.size() - tf.num.c.size();
    for (std::size_t i = 0; i < tf.num.c.size(); ++i)
      out[off + i] += lambda * tf.num.c[i];
  }
  return numerics::Poly(std::move(out));
}

double mode_gain(const SpatialSpec& spec, int k) {
  if (k < 0) throw std::invalid_argument("mode_gain: mode index must be >= 0");
  const double w = double(k) * std::numbers::pi / spec.L;
  return spec.mu * w * w;
}

std::vector<std::complex<double>> detect_cancellation(
    const RationalTransfer& tf, const numerics::Tolerances& tol) {
  std::vector<std::complex<double>> shared;
  if (tf.num.degree() < 1) return shared;
  const double sn = tf.num.scale(), sd = tf.den.scale();
  for (const auto& r : numerics::poly_roots(tf.num, tol).roots) {
    const double grow_n = std::pow(1.0 + std::abs(r), tf.num.degree());
    const double grow_d = std::pow(1.0 + std::abs(r), tf.den.degree());
    if (std::abs(tf.num.eval(r)) <= tol.tol_root * sn * grow_n &&
        std::abs(tf.den.eval(r)) <= tol.tol_root * sd * grow_d)
      shared.push_back(r);
  }
  return shared;
}

bool decoupled(const Partition& part) {
  return part.b.isZero(0.0) && part.c.isZero(0.0);
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::invalid_argument("model input: field '" + field + "' " + why);
}

}  // namespace

ModelInput parse_model(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("model input: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("model input: top level must be an object");
  if (!j.contains("A")) fail("A", "is required");
  if (!j["A"].is_array() || j["A"].empty()) fail("A", "must be a non-empty array of rows");

  const std::size_t n = j["A"].size();
  Eigen::MatrixXd A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = j["A"][i];
    if (!row.is_array() || row.size() != n)
      fail("A", "row " + std::to_string(i) + " must have " + std::to_string(n) +
                    " entries (matrix must be square)");
    for (std::size_t k = 0; k < n; ++k) {
      if (!row[k].is_number())
        fail("A", "entry (" + std::to_string(i) + "," + std::to_string(k) + ") is not a number");
      A(static_cast<long>(i), static_cast<long>(k)) = row[k].get<double>();
    }
  }
  if (n < 2) fail("A", "must be at least 2x2");
  if (!A.allFinite()) fail("A", "contains non-finite entries");

  long diffuser = static_cast<long>(n) - 1;
  if (j.contains("diffuser_index")) {
    if (!j["diffuser_index"].is_number_integer()) fail("diffuser_index", "must be an integer");
    diffuser = j["diffuser_index"].get<long>();
    if (diffuser < 0 || diffuser >= static_cast<long>(n))
      fail("diffuser_index", "must be a 0-based species index below n");
  }
  if (diffuser != static_cast<long>(n) - 1) {
    // move the marked species to the last slot, preserving the relative
    // order of the others (similarity by permutation)
    Eigen::VectorXi perm(static_cast<long>(n));
    long w = 0;
    for (long i = 0; i < static_cast<long>(n); ++i)
      if (i != diffuser) perm[w++] = static_cast<int>(i);
    perm[w] = static_cast<int>(diffuser);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
    for (long i = 0; i < static_cast<long>(n); ++i) P(i, perm[i]) = 1.0;
    A = P * A * P.transpose();
  }

  ModelInput in;
  in.sys.A = A;

  if (!j.contains("mu")) fail("mu", "is required");
  if (!j["mu"].is_number()) fail("mu", "must be a number");
  in.spec.mu = j["mu"].get<double>();
  if (!(in.spec.mu >= 0.0) || !std::isfinite(in.spec.mu)) fail("mu", "must be finite and >= 0");

  if (!j.contains("L")) fail("L", "is required");
  if (!j["L"].is_number()) fail("L", "must be a number");
  in.spec.L = j["L"].get<double>();
  if (!(in.spec.L > 0.0) || !std::isfinite(in.spec.L)) fail("L", "must be finite and > 0");

  if (j.contains("k_max")) {
    if (!j["k_max"].is_number_integer()) fail("k_max", "must be an integer");
    in.spec.k_max = j["k_max"].get<int>();
    if (in.spec.k_max < 0) fail("k_max", "must be >= 0");
  }
  if (j.contains("lambda_policy")) {
    if (!j["lambda_policy"].is_string()) fail("lambda_policy", "must be a string");
    const std::string s = j["lambda_policy"].get<std::string>();
    if (s == "discrete") in.spec.lambda_policy = LambdaPolicy::Discrete;
    else if (s == "continuous") in.spec.lambda_policy = LambdaPolicy::Continuous;
    else fail("lambda_policy", "must be \"discrete\" or \"continuous\"");
  }
  return in;
}

ModelInput load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("model input: cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace turing1::model
