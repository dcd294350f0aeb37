#include <doctest.h>

#include "multinorm/balancing.hpp"
#include "multinorm/body.hpp"
#include "multinorm/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace multinorm;

namespace {

Matrix cube_points(int n, std::size_t s, std::uint64_t seed) {
  Engine eng = RngStream{seed, 0}.engine();
  return draw_tuple(BodySpec::cube(n), s, eng);
}

// Exhaustive minimum over all 2^s sign vectors, written independently of the
// Gray-code walk.
double naive_min(const Matrix& pts, const BodySpec& K) {
  const std::size_t s = static_cast<std::size_t>(pts.cols());
  double best = INFINITY;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
    Vector sum = Vector::Zero(pts.rows());
    for (std::size_t j = 0; j < s; ++j) sum += ((mask >> j) & 1U) ? pts.col(j) : Vector(-pts.col(j));
    best = std::min(best, gauge(K, sum));
  }
  return best;
}

}  // namespace

TEST_CASE("bruteforce on small fixed inputs") {
  const BodySpec cube = BodySpec::cube(2);
  Matrix same(2, 2);
  same << 1, 1, 0, 0;
  const SignAssignment a = min_signs_bruteforce(same, cube);
  CHECK(a.achieved == 0.0);
  CHECK(a.signs == std::vector<int>{1, -1});

  Matrix ortho(2, 2);
  ortho << 1, 0, 0, 1;
  CHECK(min_signs_bruteforce(ortho, cube).achieved == doctest::Approx(1.0));
  CHECK(signed_sum_gauge(ortho, {1, -1}, cube) == doctest::Approx(1.0));
}

TEST_CASE("bruteforce matches exhaustive search") {
  for (std::size_t s : {1u, 3u, 7u, 8u, 12u}) {
    const Matrix pts = cube_points(5, s, 10 + s);
    for (const BodySpec& K : {BodySpec::cube(5), BodySpec::cross_polytope(5), BodySpec::lp_ball(3.0, 5)}) {
      const SignAssignment b = min_signs_bruteforce(pts, K);
      CAPTURE(s);
      CHECK(b.achieved == doctest::Approx(naive_min(pts, K)).epsilon(1e-12));
      CHECK(b.signs.front() == 1);
      CHECK(std::abs(signed_sum_gauge(pts, b.signs, K) - b.achieved) < 1e-12);
    }
  }
}

TEST_CASE("bruteforce is never beaten by the heuristics") {
  const BodySpec K = BodySpec::cube(6);
  Engine eng = RngStream{1, 1}.engine();
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix pts = cube_points(6, 12, 100 + rep);
    const double brute = min_signs_bruteforce(pts, K).achieved;
    CHECK(brute <= min_signs_greedy(pts, K).achieved + 1e-12);
    CHECK(brute <= min_signs_random(pts, K, 64, eng).achieved + 1e-12);
  }
}

TEST_CASE("negating all points and adding the origin change nothing") {
  const BodySpec K = BodySpec::lp_ball(1.5, 4);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix pts = cube_points(4, 9, 200 + rep);
    const Matrix neg = -pts;
    Matrix with_zero(4, 10);
    with_zero << pts, Vector::Zero(4);
    const double base = min_signs_bruteforce(pts, K).achieved;
    CHECK(min_signs_bruteforce(neg, K).achieved == doctest::Approx(base).epsilon(1e-12));
    CHECK(min_signs_bruteforce(with_zero, K).achieved == doctest::Approx(base).epsilon(1e-12));
    CHECK(min_signs_greedy(neg, K).achieved == doctest::Approx(min_signs_greedy(pts, K).achieved).epsilon(1e-12));
    Engine e1 = RngStream{3, 0}.engine();
    Engine e2 = RngStream{3, 0}.engine();
    CHECK(min_signs_random(neg, K, 16, e1).achieved ==
          doctest::Approx(min_signs_random(pts, K, 16, e2).achieved).epsilon(1e-12));
  }
}

TEST_CASE("bruteforce refuses s above the cap") {
  const Matrix pts = Matrix::Zero(2, 26);
  CHECK_THROWS_AS((void)min_signs_bruteforce(pts, BodySpec::cube(2)), CapacityError);
  CHECK_THROWS_AS((void)estimate_beta_R(BodySpec::cube(2), BodySpec::cube(2), 26, 0.5, 100,
                                        parse_sign_method("brute"), RngStream{}),
                  CapacityError);
}

TEST_CASE("greedy: alternation and ties") {
  const BodySpec cube = BodySpec::cube(3);
  Matrix e1 = Matrix::Zero(3, 6);
  e1.row(0).setOnes();
  const SignAssignment g = min_signs_greedy(e1, cube);
  CHECK(g.signs == std::vector<int>{1, -1, 1, -1, 1, -1});
  CHECK(g.max_partial == doctest::Approx(1.0));
  CHECK(g.achieved == 0.0);
  // The first step is always a tie.
  CHECK(min_signs_greedy(cube_points(3, 4, 5), cube).signs.front() == 1);
}

TEST_CASE("greedy partial sums stay below 2n for points of K") {
  for (int n : {2, 4, 8}) {
    for (const BodySpec& K : {BodySpec::cube(n), BodySpec::cross_polytope(n), BodySpec::euclidean_ball(n)}) {
      Engine eng = RngStream{static_cast<std::uint64_t>(n), 4}.engine();
      for (int rep = 0; rep < 10; ++rep) {
        const Matrix pts = draw_tuple(K, 64, eng);
        CHECK(min_signs_greedy(pts, K).max_partial <= 2.0 * n);
      }
    }
  }
}

TEST_CASE("parse_sign_method") {
  CHECK(parse_sign_method("brute").method == SignMethod::Bruteforce);
  CHECK(parse_sign_method("greedy").method == SignMethod::Greedy);
  const SignMethodSpec r = parse_sign_method("random:64");
  CHECK(r.method == SignMethod::RandomBestOf);
  CHECK(r.m == 64);
  CHECK(to_string(r) == "random:64");
  CHECK_THROWS_AS((void)parse_sign_method("random:0"), ArgumentError);
  CHECK_THROWS_AS((void)parse_sign_method("random:x"), ArgumentError);
  CHECK_THROWS_AS((void)parse_sign_method("anneal"), ArgumentError);
  CHECK(parse_rotation_mode("upper") == RotationMode::Upper);
  CHECK_THROWS_AS((void)parse_rotation_mode("sideways"), ArgumentError);
}

TEST_CASE("beta and kappa on shared tuples") {
  const BodySpec C = BodySpec::cube(6);
  const BodySpec K = BodySpec::cube(6);
  const RngStream rng{7, 0};
  const auto beta = estimate_beta_R(C, K, 8, 0.1, 1000, parse_sign_method("brute"), rng);
  const auto kappa = estimate_kappa_R(C, K, 8, 0.1, 1000, 200, rng);
  CHECK(kappa.r >= beta.r);
  CHECK(std::is_sorted(beta.values.begin(), beta.values.end()));
  CHECK(beta.quantile_ci.lo <= beta.r);
  CHECK(beta.r <= beta.quantile_ci.hi);
  // Per tuple: the inner quantile is at least the inner minimum.
  for (std::size_t i = 0; i < beta.values.size(); ++i) CHECK(kappa.values[i] >= beta.values[i] - 1e-12);

  // Smaller delta asks for a higher quantile of the same values.
  const auto beta_small = estimate_beta_R(C, K, 8, 0.05, 1000, parse_sign_method("brute"), rng);
  CHECK(beta_small.r >= beta.r);
  // Shrinking K makes every gauge larger.
  const auto beta_half = estimate_beta_R(C, BodySpec::cube(6, 0.5), 8, 0.1, 1000, parse_sign_method("brute"), rng);
  CHECK(beta_half.r == doctest::Approx(2.0 * beta.r));
  CHECK_THROWS_AS((void)estimate_beta_R(C, K, 8, 0.1, 100, parse_sign_method("brute"), rng), ArgumentError);
  CHECK_THROWS_AS((void)estimate_beta_R(C, K, 8, 1.0, 500, parse_sign_method("brute"), rng), ArgumentError);
}

TEST_CASE("kappa with one point is the outer quantile of gauges") {
  const BodySpec C = normalize_to_volume_one(BodySpec::lp_ball(4.0, 5));
  const BodySpec K = BodySpec::euclidean_ball(5);
  const auto kappa = estimate_kappa_R(C, K, 1, 0.2, 250, 50, RngStream{8, 0});
  std::vector<double> gauges;
  for (std::size_t i = 0; i < 250; ++i) {
    Engine eng = RngStream{8, 0}.child(i).engine();
    gauges.push_back(gauge(K, draw_tuple(C, 1, eng).col(0)));
  }
  std::sort(gauges.begin(), gauges.end());
  CHECK(kappa.r == doctest::Approx(gauges[static_cast<std::size_t>(std::ceil((1.0 - 0.2) * 250)) - 1]));
}

TEST_CASE("cube with s = n = 12: beta at most 2n") {
  const auto beta = estimate_beta_R(BodySpec::cube(12), BodySpec::cube(12), 12, 0.1, 500,
                                    parse_sign_method("brute"), RngStream{9, 0});
  CHECK(beta.r <= 24.0);
  const auto kappa = estimate_kappa_R(BodySpec::cube(16), BodySpec::cube(16), 16, 0.1, 500, 200, RngStream{9, 1});
  CHECK(std::isfinite(kappa.r));
  CHECK(kappa.r <= 32.0);
}

TEST_CASE("greedy and bruteforce quantiles agree within a factor 4") {
  const BodySpec C = BodySpec::cube(8);
  const auto brute = estimate_beta_R(C, C, 16, 0.1, 500, parse_sign_method("brute"), RngStream{10, 0});
  const auto greedy = estimate_beta_R(C, C, 16, 0.1, 500, parse_sign_method("greedy"), RngStream{10, 0});
  CHECK(brute.r <= greedy.r);
  CHECK(greedy.r <= 4.0 * brute.r);
}

TEST_CASE("rotations leave the ball unchanged") {
  const int n = 8;
  const BodySpec C = normalize_to_volume_one(BodySpec::euclidean_ball(n));
  const BodySpec K = normalize_to_volume_one(BodySpec::cube(n));
  RotationOptions opt;
  opt.n_rotations = 6;
  opt.N = 20000;
  opt.n_tuples = 100;
  const RotationExperiment ex =
      run_rotation_experiment(C, K, make_weights(TPattern::Flat, 4), "flat", opt, RngStream{11, 0});
  REQUIRE(ex.rotations.size() == 6);
  for (std::size_t i = 1; i < ex.rotations.size(); ++i) {
    const Estimate& a = ex.rotations[0].norm;
    const Estimate& b = ex.rotations[i].norm;
    CHECK(std::abs(a.value - b.value) <= 3.0 * combined_error(a, b));
  }
  CHECK(ex.S_size >= 1);
  CHECK(ex.S_size <= kMaxSignSet);
  const auto reports = rotation_reports(ex, Thresholds::defaults());
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].theorem_id == "rotation_average");
  CHECK(reports[1].theorem_id == "rotation_bad_fraction");
}
