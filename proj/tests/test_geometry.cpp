#include <doctest.h>

#include "support.hpp"

using namespace depthprop;

TEST_CASE("back_project evaluates the pinhole model") {
  const CameraIntrinsics k(100.0, 100.0, 50.0, 2.0);
  std::vector<float> d(3 * 200, 0.0f);
  d[2 * 200 + 50] = 7.0f;   // principal point
  d[1 * 200 + 150] = 5.0f;  // u = 150
  const PositionMap pm = back_project(DepthGrid(Shape{3, 200}, d), k);

  CHECK(pm.x.at(2, 50) == 0.0f);
  CHECK(pm.y.at(2, 50) == 0.0f);
  CHECK(pm.z.at(2, 50) == 7.0f);

  CHECK(pm.x.at(1, 150) == doctest::Approx(5.0));
  CHECK(pm.y.at(1, 150) == doctest::Approx((1.0 - 2.0) * 5.0 / 100.0));
  CHECK(pm.z.at(1, 150) == 5.0f);

  CHECK(pm.x.at(0, 0) == 0.0f);
  CHECK(pm.y.at(0, 0) == 0.0f);
  CHECK(pm.z.at(0, 0) == 0.0f);
}

TEST_CASE("back_project round trip recovers pixel coordinates") {
  testing::Rng rng(2);
  const CameraIntrinsics k(721.5377, 721.5377, 609.5593, 172.854);
  const Shape shape{40, 60};
  const DepthGrid d = testing::random_depth(rng, shape, 0.5f, 85.0f, 0.5);
  const PositionMap pm = back_project(d, k);
  for (int v = 0; v < shape.height; ++v) {
    for (int u = 0; u < shape.width; ++u) {
      const double z = pm.z.at(v, u);
      if (z == 0.0) {
        CHECK(pm.x.at(v, u) == 0.0f);
        CHECK(pm.y.at(v, u) == 0.0f);
        continue;
      }
      CHECK(std::abs(k.u0() + pm.x.at(v, u) * k.fx() / z - u) < 1e-4);
      CHECK(std::abs(k.v0() + pm.y.at(v, u) * k.fy() / z - v) < 1e-4);
    }
  }
}

TEST_CASE("back_project is linear in depth") {
  testing::Rng rng(3);
  const CameraIntrinsics k(500.0, 480.0, 31.5, 20.25);
  const Shape shape{24, 32};
  std::uniform_real_distribution<float> scale(0.1f, 3.0f);
  for (int trial = 0; trial < 20; ++trial) {
    const DepthGrid d = testing::random_depth(rng, shape, 1.0f, 50.0f, 0.6);
    const float s = scale(rng);
    std::vector<float> scaled(d.values().begin(), d.values().end());
    for (auto& x : scaled) x *= s;
    const PositionMap a = back_project(d, k);
    const PositionMap b = back_project(DepthGrid(shape, scaled), k);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(b.x.values()[i] == doctest::Approx(a.x.values()[i] * s).epsilon(1e-5));
      CHECK(b.y.values()[i] == doctest::Approx(a.y.values()[i] * s).epsilon(1e-5));
      CHECK(b.z.values()[i] == doctest::Approx(a.z.values()[i] * s).epsilon(1e-5));
    }
  }
}

TEST_CASE("min_pool keeps the smallest valid depth") {
  const DepthGrid d(Shape{2, 2}, std::vector<float>{0.0f, 3.0f, 2.0f, 5.0f});
  CHECK(min_pool(d, 2).at(0, 0) == 2.0f);
  CHECK(min_pool(make_grid(2, 2, 0.0f), 2).at(0, 0) == 0.0f);
  CHECK(min_pool(d, 1) == d);

  const DepthGrid e(Shape{2, 4}, std::vector<float>{4, 0, 0, 0,  //
                                                    1, 9, 0, 0});
  const DepthGrid pooled = min_pool(e, 2);
  CHECK(pooled.shape() == Shape{1, 2});
  CHECK(pooled.at(0, 0) == 1.0f);
  CHECK(pooled.at(0, 1) == 0.0f);
}

TEST_CASE("min_pool rejects non-divisible shapes") {
  try {
    (void)min_pool(make_grid(5, 4, 1.0f), 2);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("height") != std::string::npos);
  }
  try {
    (void)min_pool(make_grid(4, 6, 1.0f), 4);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("width") != std::string::npos);
  }
  CHECK_THROWS_AS(min_pool(make_grid(4, 4, 1.0f), 0), ValueError);
}

TEST_CASE("min_pool never invents values and composes") {
  testing::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Shape shape{24, 36};
    const DepthGrid d = testing::random_depth(rng, shape, 1.0f, 80.0f, 0.05 + 0.01 * (trial % 30));
    const DepthGrid p2 = min_pool(d, 2);
    for (int v = 0; v < p2.height(); ++v) {
      for (int u = 0; u < p2.width(); ++u) {
        const float got = p2.at(v, u);
        if (got == 0.0f) continue;
        bool found = false;
        for (int dv = 0; dv < 2; ++dv) {
          for (int du = 0; du < 2; ++du) found |= d.at(2 * v + dv, 2 * u + du) == got;
        }
        CHECK(found);
      }
    }
    CHECK(min_pool(d, 6) == min_pool(min_pool(d, 2), 3));
    CHECK(min_pool(d, 6) == min_pool(min_pool(d, 3), 2));
    CHECK(min_pool(d, 4) == min_pool(p2, 2));
  }
}

TEST_CASE("scale_intrinsics divides every parameter") {
  const CameraIntrinsics k(100.0, 200.0, 50.0, 25.0);
  CHECK(scale_intrinsics(k, 1) == k);
  CHECK(scale_intrinsics(k, 2) == CameraIntrinsics(50.0, 100.0, 25.0, 12.5));
  CHECK(scale_intrinsics(k, 4).fx() == 25.0);
  CHECK_THROWS_AS(scale_intrinsics(k, 0), ValueError);
}

TEST_CASE("intrinsics reject non-positive focal lengths") {
  CHECK_THROWS_AS(CameraIntrinsics(0.0, 1.0, 0.0, 0.0), ValueError);
  CHECK_THROWS_AS(CameraIntrinsics(1.0, -2.0, 0.0, 0.0), ValueError);
  CHECK_THROWS_AS(CameraIntrinsics(std::nan(""), 1.0, 0.0, 0.0), ValueError);
  CHECK_THROWS_AS(CameraIntrinsics(1.0, 1.0, INFINITY, 0.0), ValueError);
}
