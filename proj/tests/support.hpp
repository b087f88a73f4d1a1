#pragma once

// Shared test utilities: seeded random generators and the independent
// oracles the test suites check the implementation against. Everything
// here deliberately avoids the library's own solution paths.

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "rtms/math/estimation.hpp"
#include "rtms/math/rigid_transform.hpp"

namespace rtms::test {

inline Eigen::Vector3d random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
  while (v.norm() < 1e-6) {
    v = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  }
  return v.normalized();
}

inline math::RigidTransform random_transform(std::mt19937_64& rng,
                                             double translation_scale = 100.0) {
  std::uniform_real_distribution<double> angle(-EIGEN_PI, EIGEN_PI);
  std::uniform_real_distribution<double> offset(-translation_scale, translation_scale);
  return math::RigidTransform::from_axis_angle(
      random_unit_vector(rng), angle(rng),
      Eigen::Vector3d(offset(rng), offset(rng), offset(rng)));
}

// ---------------------------------------------------------------------------
// Brute-force rigid registration: random-restart Nelder-Mead over the
// 6 parameters (rotation vector, translation), minimizing the mean
// squared pairing residual. Independent of the SVD solution path.
// ---------------------------------------------------------------------------

inline double registration_objective(const std::vector<Eigen::Vector3d>& moving,
                                     const std::vector<Eigen::Vector3d>& fixed,
                                     const math::RigidTransform& t) {
  double sum = 0.0;
  for (std::size_t i = 0; i < moving.size(); ++i) {
    sum += (apply(t, moving[i]) - fixed[i]).squaredNorm();
  }
  return sum / static_cast<double>(moving.size());
}

inline math::RigidTransform params_to_transform(const Eigen::Matrix<double, 6, 1>& p) {
  double angle = p.head<3>().norm();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  if (angle > 0) {
    q = Eigen::Quaterniond(Eigen::AngleAxisd(angle, p.head<3>() / angle));
  }
  return math::RigidTransform(q, p.tail<3>());
}

// Plain Nelder-Mead on R^6; tight termination so the oracle's objective
// is trustworthy to ~1e-10.
inline Eigen::Matrix<double, 6, 1> nelder_mead(
    const std::function<double(const Eigen::Matrix<double, 6, 1>&)>& f,
    Eigen::Matrix<double, 6, 1> start, double scale, int max_iter = 4000) {
  constexpr int n = 6;
  using Point = Eigen::Matrix<double, 6, 1>;
  std::vector<std::pair<double, Point>> simplex;
  simplex.reserve(n + 1);
  simplex.emplace_back(f(start), start);
  for (int i = 0; i < n; ++i) {
    Point p = start;
    p(i) += scale;
    simplex.emplace_back(f(p), p);
  }
  auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };
  for (int iter = 0; iter < max_iter; ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (simplex.back().first - simplex.front().first < 1e-14 &&
        (simplex.back().second - simplex.front().second).norm() < 1e-12) {
      break;
    }
    Point centroid = Point::Zero();
    for (int i = 0; i < n; ++i) {
      centroid += simplex[static_cast<std::size_t>(i)].second;
    }
    centroid /= n;
    const auto& worst = simplex.back();

    Point reflected = centroid + (centroid - worst.second);
    double fr = f(reflected);
    if (fr < simplex.front().first) {
      Point expanded = centroid + 2.0 * (centroid - worst.second);
      double fe = f(expanded);
      simplex.back() = fe < fr ? std::make_pair(fe, expanded)
                               : std::make_pair(fr, reflected);
      continue;
    }
    if (fr < simplex[n - 1].first) {
      simplex.back() = {fr, reflected};
      continue;
    }
    Point contracted = centroid + 0.5 * (worst.second - centroid);
    double fc = f(contracted);
    if (fc < worst.first) {
      simplex.back() = {fc, contracted};
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      auto& [value, point] = simplex[static_cast<std::size_t>(i)];
      point = simplex.front().second + 0.5 * (point - simplex.front().second);
      value = f(point);
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex.front().second;
}

struct BruteForceRegistration {
  math::RigidTransform transform;
  double objective = 0.0;  // mean squared residual, mm^2
};

inline BruteForceRegistration brute_force_register(
    const std::vector<Eigen::Vector3d>& moving, const std::vector<Eigen::Vector3d>& fixed,
    uint64_t seed, int restarts = 24) {
  auto objective = [&](const Eigen::Matrix<double, 6, 1>& p) {
    return registration_objective(moving, fixed, params_to_transform(p));
  };

  Eigen::Vector3d moving_centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d fixed_centroid = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < moving.size(); ++i) {
    moving_centroid += moving[i];
    fixed_centroid += fixed[i];
  }
  moving_centroid /= static_cast<double>(moving.size());
  fixed_centroid /= static_cast<double>(fixed.size());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-EIGEN_PI, EIGEN_PI);

  BruteForceRegistration best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::Matrix<double, 6, 1> start;
    Eigen::Vector3d axis = random_unit_vector(rng);
    start.head<3>() = axis * angle(rng);
    // Translation consistent with the random rotation and the centroids.
    math::RigidTransform rot = params_to_transform(
        (Eigen::Matrix<double, 6, 1>() << start.head<3>(), 0, 0, 0).finished());
    start.tail<3>() = fixed_centroid - rot.rotation() * moving_centroid;

    auto solution = nelder_mead(objective, start, 0.2);
    // Refine with a shrinking second pass.
    solution = nelder_mead(objective, solution, 1e-3);
    double value = objective(solution);
    if (value < best.objective) {
      best.objective = value;
      best.transform = params_to_transform(solution);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Synthetic pivot geometry
// ---------------------------------------------------------------------------

struct PivotScene {
  Eigen::Vector3d tip;    // in the tag frame
  Eigen::Vector3d pivot;  // in the tracker frame
  std::vector<math::RigidTransform> poses;
};

inline PivotScene make_pivot_scene(std::mt19937_64& rng, std::size_t n_poses,
                                   double noise_sigma = 0.0) {
  std::uniform_real_distribution<double> span(-150.0, 150.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PivotScene scene;
  scene.tip = Eigen::Vector3d(span(rng) * 0.2, span(rng) * 0.2, -80.0 + span(rng) * 0.3);
  scene.pivot = Eigen::Vector3d(span(rng), span(rng), span(rng));
  for (std::size_t i = 0; i < n_poses; ++i) {
    std::uniform_real_distribution<double> angle(-1.2, 1.2);
    Eigen::Quaterniond q(Eigen::AngleAxisd(angle(rng), random_unit_vector(rng)));
    Eigen::Vector3d translation = scene.pivot - q * scene.tip;
    if (noise_sigma > 0) {
      translation += noise_sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    }
    scene.poses.emplace_back(q, translation);
  }
  return scene;
}

}  // namespace rtms::test
