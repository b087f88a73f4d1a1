#include <doctest.h>

#include "support.hpp"

using namespace rtms::math;
using namespace rtms::test;

namespace {

// Four non-coplanar points, comfortably spread.
const std::vector<Eigen::Vector3d> kQuad = {
    {70, 60, 30}, {-70, 55, 25}, {0, 95, -40}, {5, -20, 90}};

FiducialSet make_set(const std::string& frame, const std::vector<Eigen::Vector3d>& pts) {
  FiducialSet set;
  set.frame_id = frame;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    set.points.push_back({"F" + std::to_string(i + 1), pts[i]});
  }
  return set;
}

FiducialSet transformed(const FiducialSet& set, const RigidTransform& t,
                        const std::string& frame) {
  FiducialSet out;
  out.frame_id = frame;
  for (const auto& f : set.points) {
    out.points.push_back({f.label, apply(t, f.position)});
  }
  return out;
}

}  // namespace

TEST_CASE("identical point sets register to the identity with zero FRE") {
  auto moving = make_set("I", kQuad);
  auto result = register_paired_points(moving, make_set("H", kQuad));
  CHECK(result.fre_rms == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(result.transform.translation().norm() <= 1e-12);
  CHECK(rotation_angle(result.transform, RigidTransform::identity()) <= 1e-12);
  CHECK(result.per_point_residuals.size() == 4);
}

TEST_CASE("a known rigid transform is recovered exactly from clean pairs") {
  auto truth = RigidTransform::from_axis_angle(Eigen::Vector3d::UnitZ(), EIGEN_PI / 2,
                                               {10, 0, 0});
  auto moving = make_set("I", kQuad);
  auto fixed = transformed(moving, truth, "H");
  auto result = register_paired_points(moving, fixed);
  CHECK(result.fre_rms <= 1e-9);
  CHECK(translation_distance(result.transform, truth) <= 1e-9);
  CHECK(rotation_angle(result.transform, truth) <= 1e-9);
}

TEST_CASE("pairing is by label, not by order") {
  auto truth = RigidTransform::from_axis_angle({0.3, 0.5, 0.8}, 0.7, {5, -3, 12});
  auto moving = make_set("I", kQuad);
  auto fixed = transformed(moving, truth, "H");
  std::rotate(fixed.points.begin(), fixed.points.begin() + 2, fixed.points.end());
  auto result = register_paired_points(moving, fixed);
  CHECK(translation_distance(result.transform, truth) <= 1e-9);
  CHECK(rotation_angle(result.transform, truth) <= 1e-9);
}

TEST_CASE("registration error paths") {
  auto moving = make_set("I", {{0, 0, 0}, {10, 0, 0}});
  try {
    register_paired_points(moving, moving);
    FAIL("expected insufficient fiducials");
  } catch (const EstimationError& e) {
    CHECK(e.code() == EstimationErrc::insufficient_fiducials);
  }

  auto line = make_set("I", {{0, 0, 0}, {10, 0, 0}, {20, 0, 0}, {30, 0, 0}});
  try {
    register_paired_points(line, line);
    FAIL("expected degenerate configuration");
  } catch (const EstimationError& e) {
    CHECK(e.code() == EstimationErrc::degenerate_configuration);
  }

  auto renamed = make_set("H", kQuad);
  renamed.points[2].label = "Fx";
  try {
    register_paired_points(make_set("I", kQuad), renamed);
    FAIL("expected label mismatch");
  } catch (const EstimationError& e) {
    CHECK(e.code() == EstimationErrc::label_mismatch);
  }

  auto dup = make_set("H", kQuad);
  dup.points[3].label = "F1";
  CHECK_THROWS_AS(register_paired_points(make_set("I", kQuad), dup), EstimationError);
}

TEST_CASE("noisy registration matches the brute-force minimizer") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double sigma : {0.1, 0.5, 1.0}) {
    for (int trial = 0; trial < 3; ++trial) {
      RigidTransform truth = random_transform(rng, 80.0);
      std::vector<Eigen::Vector3d> moving = kQuad;
      std::vector<Eigen::Vector3d> fixed;
      for (const auto& p : moving) {
        fixed.push_back(apply(truth, p) +
                        sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)));
      }
      auto result = register_paired_points(make_set("I", moving), make_set("H", fixed));
      double objective_svd = registration_objective(moving, fixed, result.transform);
      CHECK(result.fre_rms == doctest::Approx(std::sqrt(objective_svd)).epsilon(1e-9));

      auto brute = brute_force_register(moving, fixed, rng());
      CAPTURE(sigma);
      CAPTURE(trial);
      CHECK(objective_svd <= brute.objective + 1e-6);
      CHECK(std::abs(objective_svd - brute.objective) <= 1e-6);
    }
  }
}

TEST_CASE("the objective value is invariant under a common rigid pre-transform") {
  std::mt19937_64 rng(102);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::Vector3d> moving = kQuad;
  std::vector<Eigen::Vector3d> fixed;
  RigidTransform truth = random_transform(rng, 50.0);
  for (const auto& p : moving) {
    fixed.push_back(apply(truth, p) +
                    0.4 * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)));
  }
  auto base = register_paired_points(make_set("I", moving), make_set("H", fixed));

  for (int i = 0; i < 20; ++i) {
    RigidTransform pre = random_transform(rng, 200.0);
    std::vector<Eigen::Vector3d> moving2, fixed2;
    for (const auto& p : moving) moving2.push_back(apply(pre, p));
    for (const auto& q : fixed) fixed2.push_back(apply(pre, q));
    auto shifted = register_paired_points(make_set("I", moving2), make_set("H", fixed2));
    CAPTURE(i);
    CHECK(shifted.fre_rms == doctest::Approx(base.fre_rms).epsilon(1e-12));
  }
}

TEST_CASE("recovered rotations are proper even for noisy near-planar sets") {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Vector3d> moving, fixed;
    RigidTransform truth = random_transform(rng, 60.0);
    std::uniform_real_distribution<double> spread(-80.0, 80.0);
    for (int i = 0; i < 6; ++i) {
      // Nearly planar: z is micrometres of jitter only.
      Eigen::Vector3d p(spread(rng), spread(rng), 1e-3 * gauss(rng));
      moving.push_back(p);
      fixed.push_back(apply(truth, p) +
                      0.5 * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)));
    }
    auto result =
        register_paired_points(make_set("I", moving), make_set("H", fixed));
    CAPTURE(trial);
    CHECK(result.transform.rotation_matrix().determinant() ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("pivot calibration recovers a synthetic tip exactly") {
  std::mt19937_64 rng(104);
  PivotScene scene = make_pivot_scene(rng, 50);
  auto result = pivot_calibrate(scene.poses);
  CHECK((result.tip_offset - scene.tip).norm() <= 1e-9);
  CHECK((result.pivot_point - scene.pivot).norm() <= 1e-9);
  CHECK(result.residual_rms <= 1e-9);
}

TEST_CASE("pivot residual is zero for any tip with few but diverse poses") {
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 20; ++trial) {
    PivotScene scene = make_pivot_scene(rng, 3 + trial % 5);
    auto result = pivot_calibrate(scene.poses);
    CAPTURE(trial);
    CHECK(result.residual_rms <= 1e-9);
    CHECK((result.tip_offset - scene.tip).norm() <= 1e-7);
  }
}

TEST_CASE("pivot calibration rejects rotation-poor inputs") {
  std::mt19937_64 rng(106);
  Eigen::Quaterniond q(Eigen::AngleAxisd(0.8, random_unit_vector(rng)));
  std::vector<RigidTransform> poses;
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int i = 0; i < 12; ++i) {
    poses.emplace_back(q, Eigen::Vector3d(shift(rng), shift(rng), shift(rng)));
  }
  try {
    pivot_calibrate(poses);
    FAIL("expected rotation-diversity error");
  } catch (const EstimationError& e) {
    CHECK(e.code() == EstimationErrc::insufficient_rotation_diversity);
  }

  CHECK_THROWS_AS(pivot_calibrate(std::vector<RigidTransform>{}), EstimationError);
}

TEST_CASE("pivot residual tracks the injected noise level") {
  std::mt19937_64 rng(107);
  const double sigma = 0.2;
  double total = 0.0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    PivotScene scene = make_pivot_scene(rng, 40, sigma);
    total += pivot_calibrate(scene.poses).residual_rms;
  }
  double mean_residual = total / trials;
  CHECK(mean_residual >= sigma / 2);
  CHECK(mean_residual <= sigma * 2);
}

TEST_CASE("base anchoring from one clean sample is exact composition") {
  std::mt19937_64 rng(108);
  RigidTransform world_base = random_transform(rng, 300.0);
  RigidTransform flange_tag = random_transform(rng, 50.0);
  RigidTransform base_flange = random_transform(rng, 200.0);
  RigidTransform world_tag = world_base * base_flange * flange_tag;

  auto estimate = anchor_base(std::vector<AnchorSample>{{world_tag, base_flange}},
                              flange_tag);
  CHECK(translation_distance(estimate, world_base) <= 1e-9);
  CHECK(rotation_angle(estimate, world_base) <= 1e-9);
}

TEST_CASE("base anchoring agrees across many clean samples") {
  std::mt19937_64 rng(109);
  RigidTransform world_base = random_transform(rng, 300.0);
  RigidTransform flange_tag = random_transform(rng, 50.0);
  std::vector<AnchorSample> samples;
  for (int i = 0; i < 20; ++i) {
    RigidTransform base_flange = random_transform(rng, 200.0);
    samples.push_back({world_base * base_flange * flange_tag, base_flange});
  }
  auto estimate = anchor_base(samples, flange_tag);
  CHECK(translation_distance(estimate, world_base) <= 1e-9);
  CHECK(rotation_angle(estimate, world_base) <= 1e-9);
}

TEST_CASE("a wildly inconsistent anchor sample is rejected") {
  std::mt19937_64 rng(110);
  RigidTransform world_base = random_transform(rng, 300.0);
  RigidTransform flange_tag = random_transform(rng, 50.0);
  std::vector<AnchorSample> samples;
  for (int i = 0; i < 5; ++i) {
    RigidTransform base_flange = random_transform(rng, 200.0);
    samples.push_back({world_base * base_flange * flange_tag, base_flange});
  }
  // 50 mm offset injected into one observation.
  samples[2].world_tag = RigidTransform(
      samples[2].world_tag.rotation(),
      samples[2].world_tag.translation() + Eigen::Vector3d(50, 0, 0));
  try {
    anchor_base(samples, flange_tag);
    FAIL("expected inconsistent-samples error");
  } catch (const EstimationError& e) {
    CHECK(e.code() == EstimationErrc::inconsistent_samples);
  }
}

TEST_CASE("target registration error semantics") {
  auto truth = RigidTransform::from_axis_angle({0.1, 0.9, 0.2}, 0.5, {30, -10, 5});
  RegistrationResult result;
  result.transform = truth;
  CHECK(target_registration_error(result, truth, {10, 20, 30}) == 0.0);

  RegistrationResult shifted;
  shifted.transform = RigidTransform(truth.rotation(),
                                     truth.translation() + Eigen::Vector3d(1, 0, 0));
  CHECK(target_registration_error(shifted, truth, {10, 20, 30}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(target_registration_error(shifted, truth, {-50, 7, 90}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("TRE grows with fiducial noise across seeded trials") {
  std::mt19937_64 rng(111);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto mean_tre = [&](double sigma) {
    double total = 0.0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
      RigidTransform truth = random_transform(rng, 60.0);
      std::vector<Eigen::Vector3d> fixed;
      for (const auto& p : kQuad) {
        fixed.push_back(apply(truth, p) +
                        sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)));
      }
      auto result = register_paired_points(make_set("I", kQuad), make_set("H", fixed));
      total += target_registration_error(result, truth, {0, 0, 120});
    }
    return total / trials;
  };
  double low = mean_tre(0.1);
  double high = mean_tre(1.0);
  CHECK(low < high);
}
