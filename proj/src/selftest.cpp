#include "multinorm/selftest.hpp"

#include "multinorm/balancing.hpp"
#include "multinorm/body.hpp"
#include "multinorm/functionals.hpp"
#include "multinorm/norms.hpp"
#include "multinorm/sampling.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace multinorm {

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

SelfTestResult close_to(std::string name, double got, double want, double tol = 1e-12) {
  std::ostringstream d;
  d.precision(15);
  d << "got " << got << ", expected " << want;
  return {std::move(name), std::abs(got - want) <= tol * std::max(1.0, std::abs(want)), d.str()};
}

SelfTestResult holds(std::string name, bool ok, std::string detail = {}) { return {std::move(name), ok, std::move(detail)}; }

}  // namespace

std::vector<SelfTestResult> run_selftest(const RngStream& rng) {
  std::vector<SelfTestResult> out;
  const auto ball = [](int n, double scale = 1.0) { return BodySpec::euclidean_ball(n, scale); };
  const auto cube = [](int n, double scale = 1.0) { return BodySpec::cube(n, scale); };
  const auto cross = [](int n, double scale = 1.0) { return BodySpec::cross_polytope(n, scale); };

  out.push_back(close_to("gauge ball (3,4)", gauge(ball(2), vec({3, 4})), 5.0));
  out.push_back(close_to("gauge half cube", gauge(cube(2, 0.5), vec({0.25, -0.1})), 0.5));
  out.push_back(close_to("gauge cross (1,1,1)", gauge(cross(3), vec({1, 1, 1})), 3.0));
  out.push_back(close_to("support cube (1,1)", support(cube(2), vec({1, 1})), 2.0));
  out.push_back(close_to("support 2 ball (0,3)", support(ball(2, 2.0), vec({0, 3})), 6.0));
  out.push_back(close_to("support cross (1,-2)", support(cross(2), vec({1, -2})), 2.0));

  out.push_back(close_to("volume unit cube n=7", volume(cube(7, 0.5)), 1.0));
  out.push_back(close_to("volume unit disc", volume(ball(2)), std::numbers::pi));
  out.push_back(close_to("normalize disc", normalize_to_volume_one(ball(2)).scale(), 1.0 / std::sqrt(std::numbers::pi)));
  out.push_back(close_to("normalize unit cube", normalize_to_volume_one(cube(5, 0.5)).scale(), 0.5));
  out.push_back(close_to("normalize cross n=2", normalize_to_volume_one(cross(2)).scale(), 1.0 / std::sqrt(2.0)));

  out.push_back(close_to("b(ball)", polar_radius(ball(6)), 1.0));
  out.push_back(close_to("b(cross n=4)", polar_radius(cross(4)), 2.0));
  out.push_back(close_to("b(half cube n=9)", polar_radius(cube(9, 0.5)), 2.0));
  out.push_back(close_to("R(unit cube n=4)", radius(cube(4, 0.5)), 1.0));
  out.push_back(close_to("R(cross)", radius(cross(5)), 1.0));
  out.push_back(close_to("R(3 ball)", radius(ball(5, 3.0)), 3.0));

  {
    const Estimate M = estimate_M(ball(7), 1000, rng.child(1));
    out.push_back(holds("M(ball) exact", M.value == 1.0 && M.std_error == 0.0));
    out.push_back(close_to("k(ball) = n", compute_k(ball(7), M), 7.0));
    const Estimate Mr = estimate_M(ball(7, 2.5), 1000, rng.child(1));
    out.push_back(close_to("M(r ball) = 1/r", Mr.value, 1.0 / 2.5));
  }

  {
    Engine eng = rng.child(2).engine();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, std::abs(sample_sphere(9, eng).norm() - 1.0));
    out.push_back(holds("sphere samples on the sphere", worst < 1e-12));
    const Matrix U = sample_haar_rotation(12, eng);
    const double err = (U.transpose() * U - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff();
    out.push_back(holds("Haar rotation orthogonal", err < 1e-10));
    bool inside = true;
    for (const BodySpec& K : {ball(5), cube(5, 0.5), cross(5), BodySpec::lp_ball(4.0, 5), BodySpec::lp_ball(1.5, 5)}) {
      for (int i = 0; i < 2000; ++i) inside = inside && gauge(K, sample_lp_ball(K, eng)) <= 1.0 + 1e-12;
    }
    out.push_back(holds("uniform samples inside the body", inside));
  }

  {
    std::vector<double> e1(16, 0.0);
    e1[0] = 1.0;
    out.push_back(close_to("q_n(e1)", q_n_cube(WeightVector(e1), 16), 1.0));
    std::vector<double> top(16, 0.0);
    top[0] = 5.0;
    top[1] = 4.0;
    top[2] = 3.0;
    out.push_back(close_to("q_n top mass", q_n_cube(WeightVector(top), 16, 3), 12.0));
  }
  out.push_back(close_to("density s=1", density_at_zero_1d(WeightVector({1})), 1.0));

  {
    Matrix twin(2, 2);
    twin << 1, 1, 0, 0;
    const auto cancel = min_signs_bruteforce(twin, cube(2));
    out.push_back(holds("bruteforce cancels (e1, e1)", cancel.achieved == 0.0 && cancel.signs == std::vector<int>{1, -1}));
    const auto ortho = min_signs_bruteforce(Matrix::Identity(2, 2), cube(2));
    out.push_back(close_to("bruteforce (e1, e2) in cube", ortho.achieved, 1.0));
    Matrix same = Matrix::Zero(3, 5);
    same.row(0).setOnes();
    const auto greedy = min_signs_greedy(same, cube(3));
    out.push_back(holds("greedy partial sums alternate", greedy.max_partial <= 1.0 &&
                                                            greedy.signs == std::vector<int>{1, -1, 1, -1, 1}));
  }

  {
    const BodySpec K = normalize_to_volume_one(cube(4));
    const auto beta = estimate_beta_R(K, K, 4, 0.2, 250, {SignMethod::Bruteforce, 0}, rng.child(3));
    const auto kappa = estimate_kappa_R(K, K, 4, 0.2, 250, 64, rng.child(3));
    bool tuplewise = true;
    for (std::size_t i = 0; i < beta.values.size(); ++i) tuplewise = tuplewise && kappa.values[i] >= beta.values[i];
    out.push_back(holds("kappa >= beta", kappa.r >= beta.r && tuplewise));
  }

  {
    const BodySpec C = normalize_to_volume_one(ball(3));
    const WeightVector t({1});
    const Estimate a = estimate_norm(C, t, C, 20000, rng.child(4));
    const Estimate b = estimate_norm(C, t.scaled(2.0), C, 20000, rng.child(4));
    out.push_back(close_to("norm homogeneity", b.value, 2.0 * a.value, 1e-12));
  }
  return out;
}

}  // namespace multinorm
