#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mvf/rheology.hpp"
#include "mvf/synthetic.hpp"
#include "mvf/upscaling.hpp"
#include "test_helpers.hpp"

using namespace mvf;
using namespace mvf::testing;

namespace {

Box3 box100() { return {{0, 0, 0}, {1e-4, 1e-4, 1e-4}}; }

/// 25 x-aligned tubes through the box on a 5x5 row grid, plus zero-flow
/// cross links on the inflow facet to keep the graph connected.
VascularNetwork tube_bundle(double radius) {
  std::vector<NodeSpec> nodes;
  std::vector<SegSpec> segs;
  int id = 0;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      double y = (a + 0.5) * 2e-5, z = (b + 0.5) * 2e-5;
      nodes.push_back({{0, y, z}, {}});
      nodes.push_back({{1e-4, y, z}, {}});
      segs.push_back({id, id + 1, radius});
      id += 2;
    }
  for (int t = 1; t < 25; ++t) segs.push_back({2 * (t - 1), 2 * t, radius});
  VascularNetwork net = make_net(nodes, segs);
  return net;
}

std::set<int> tube_ids() {
  std::set<int> ids;
  for (int t = 0; t < 25; ++t) ids.insert(t);
  return ids;
}

UpscalingOptions tight_opts() {
  UpscalingOptions o;
  o.solver = {1e-13, 0, Preconditioner::jacobi};
  return o;
}

}  // namespace

TEST_CASE("upscaled viscosity") {
  VascularNetwork net = make_net(
      {{{0, 0, 0}, {}}, {{5e-5, 0, 0}, {}}, {{1e-4, 0, 0}, {}}},
      {{0, 1, 3e-6}, {1, 2, 4e-6}});

  SUBCASE("identical radii collapse to the single-segment value") {
    VascularNetwork same = make_net({{{0, 0, 0}, {}}, {{5e-5, 0, 0}, {}}, {{1e-4, 0, 0}, {}}},
                                    {{0, 1, 3e-6}, {1, 2, 3e-6}});
    double mu = upscale_viscosity(same, {0, 1});
    CHECK(mu == doctest::Approx(in_vivo_viscosity(6.0, kRheology)).epsilon(1e-15));
  }
  SUBCASE("two segments average their viscosity-law values") {
    double expected = 0.5 * (in_vivo_viscosity(6.0, kRheology) +
                             in_vivo_viscosity(8.0, kRheology));
    CHECK(upscale_viscosity(net, {0, 1}) == doctest::Approx(expected).epsilon(1e-15));
  }
  SUBCASE("empty member set is an error") {
    CHECK_THROWS_AS(upscale_viscosity(net, {}), ValidationError);
  }
}

TEST_CASE("parallel tube bundle: analytic permeability and floored transverse axes") {
  double R = 3e-6;
  VascularNetwork net = tube_bundle(R);
  double mu_up = upscale_viscosity(net, tube_ids());
  UpscalingOptions opts = tight_opts();
  std::array<bool, 3> floored{};
  Vec3 k = upscale_permeability(net, tube_ids(), box100(), mu_up, opts, &floored);

  // k_x = 25 pi R^4 / (8 Ly Lz); 50-digit reference evaluation
  CHECK(k.x == doctest::Approx(7.9521564043991641e-14).epsilon(1e-8));
  CHECK_FALSE(floored[0]);
  CHECK(k.y == opts.k_floor);
  CHECK(k.z == opts.k_floor);
  CHECK(floored[1]);
  CHECK(floored[2]);

  SUBCASE("pressure-difference invariance") {
    UpscalingOptions o1 = opts;
    o1.dp = 1.0;
    Vec3 k1 = upscale_permeability(net, tube_ids(), box100(), mu_up, o1);
    CHECK(k1.x == doctest::Approx(k.x).epsilon(1e-8));
  }
  SUBCASE("plasma-viscosity invariance (viscosity cancellation)") {
    for (double mu_p : {0.5e-3, 1e-3, 2e-3}) {
      RheologyParams rp{0.45, mu_p};
      VascularNetwork net2 = tube_bundle(R);
      for (auto& s : net2.segments)
        s.mu_bl = in_vivo_viscosity(dimensionless_diameter(2 * s.radius), rp);
      double mu2 = upscale_viscosity(net2, tube_ids());
      Vec3 k2 = upscale_permeability(net2, tube_ids(), box100(), mu2, opts);
      CHECK(k2.x == doctest::Approx(k.x).epsilon(1e-8));
    }
  }
}

TEST_CASE("blood volume fraction") {
  SUBCASE("empty set gives zero") {
    VascularNetwork net = tube_bundle(3e-6);
    CHECK(blood_volume_fraction(net, {}, box100()) == 0.0);
  }
  SUBCASE("a tube fully inside contributes pi R^2 L / V") {
    VascularNetwork net = make_net({{{1e-5, 5e-5, 5e-5}, {}}, {{9e-5, 5e-5, 5e-5}, {}}},
                                   {{0, 1, 2e-6}});
    double expected = M_PI * 4e-12 * 8e-5 / 1e-12;
    CHECK(blood_volume_fraction(net, {0}, box100()) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("a tube clipped at an REV face contributes half") {
    VascularNetwork net = make_net({{{-4e-5, 5e-5, 5e-5}, {}}, {{4e-5, 5e-5, 5e-5}, {}}},
                                   {{0, 1, 2e-6}});
    double full = M_PI * 4e-12 * 8e-5;
    CHECK(blood_volume_fraction(net, {0}, box100()) ==
          doctest::Approx(0.5 * full / 1e-12).epsilon(1e-12));
  }
}

TEST_CASE("surface areas and volume fractions partition across a decomposition") {
  // 40 um pitch keeps every lattice plane away from the REV faces at 100 um;
  // a segment lying exactly in a shared face would be counted by both REVs
  LatticeSpec spec;
  spec.box = {{0, 0, 0}, {2e-4, 2e-4, 2e-4}};
  spec.pitch = 4e-5;
  spec.radius_min = 2.5e-6;
  spec.radius_max = 3.5e-6;
  VascularNetwork net = generate_synthetic(spec, 21, 7e-6, kRheology);
  auto [large, cap] = split_by_threshold(net, 7e-6);
  UniformGrid grid(spec.box, {8, 8, 8});
  RevDecomposition dec = decompose_revs(grid, {2, 2, 2}, net, cap, large);

  double s_total = 0.0, v_total = 0.0;
  for (const auto& rev : dec.revs) {
    s_total += rev_surface_area(net, rev.capillary_segment_ids, rev.box);
    v_total += blood_volume_fraction(net, rev.capillary_segment_ids, rev.box) *
               rev.box.volume();
  }
  double s_expected = 0.0, v_expected = 0.0;
  for (int sid : cap) {
    const Segment& s = net.segments[sid];
    s_expected += 2.0 * M_PI * s.radius * s.length;
    v_expected += M_PI * s.radius * s.radius * s.length;
  }
  CHECK(s_total == doctest::Approx(s_expected).epsilon(1e-12));
  CHECK(v_total == doctest::Approx(v_expected).epsilon(1e-12));
}

TEST_CASE("growth study on a periodic lattice") {
  LatticeSpec spec;
  spec.box = {{0, 0, 0}, {4e-4, 4e-4, 4e-4}};
  spec.pitch = 5e-5;
  spec.radius_min = 3e-6;
  spec.radius_max = 3e-6 + 1e-12;  // essentially uniform radii
  VascularNetwork net = generate_synthetic(spec, 33, 7e-6, kRheology);
  auto [large, cap] = split_by_threshold(net, 7e-6);

  UpscalingOptions opts = tight_opts();
  // lateral span fixed between node planes, axial growth lands on node planes
  Vec3 center = spec.box.center();
  auto rows = rev_growth_study(net, cap, spec.box, center, {1e-4, 1.5e-4, 1.5e-4},
                               {1e-4, 0, 0}, 3, opts);
  REQUIRE(rows.size() == 3);
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].k.x == doctest::Approx(rows[0].k.x).epsilon(2e-2));

  SUBCASE("growth outside the domain is an error") {
    CHECK_THROWS_AS(rev_growth_study(net, cap, spec.box, center, {3e-4, 1e-4, 1e-4},
                                     {2e-4, 0, 0}, 2, opts),
                    ValidationError);
  }
}

TEST_CASE("growth on an empty region yields zero rows") {
  VascularNetwork net = make_net({{{9e-5, 9e-5, 9e-5}, {}}, {{9.9e-5, 9e-5, 9e-5}, {}}},
                                 {{0, 1, 3e-6}});
  UpscalingOptions opts = tight_opts();
  auto rows = rev_growth_study(net, {0}, box100(), {2e-5, 2e-5, 2e-5}, {1e-5, 1e-5, 1e-5},
                               {5e-6, 5e-6, 5e-6}, 2, opts);
  for (const auto& r : rows) {
    CHECK(r.k.x == 0.0);
    CHECK(r.bvf == 0.0);
  }
}

TEST_CASE("REV without capillaries is a hard error") {
  VascularNetwork net = make_net({{{1e-5, 1e-5, 1e-5}, {}}, {{4e-5, 1e-5, 1e-5}, {}}},
                                 {{0, 1, 3e-6}});
  UniformGrid grid(box100(), {4, 4, 4});
  auto [large, cap] = split_by_threshold(net, 7e-6);
  RevDecomposition dec = decompose_revs(grid, {2, 2, 2}, net, cap, large);
  CHECK_THROWS_AS(compute_rev_coefficients(net, dec, tight_opts()), ValidationError);
}

TEST_CASE("capillary boundary field") {
  // lattice with capillary stubs on all faces carrying a constant pressure
  LatticeSpec spec;
  spec.box = {{0, 0, 0}, {2e-4, 2e-4, 2e-4}};
  spec.pitch = 5e-5;
  spec.radius_min = 2.5e-6;
  spec.radius_max = 3.5e-6;
  spec.cap_boundary_pressure = 3000.0;

  SUBCASE("constant data gives a constant field") {
    VascularNetwork net = generate_synthetic(spec, 2, 7e-6, kRheology);
    auto [large, cap] = split_by_threshold(net, 7e-6);
    BoundaryField f = capillary_boundary_field(net, cap, spec.box, {2, 2, 2}, 1e-8);
    for (int plane = 0; plane < 6; ++plane) {
      CHECK(f.evaluate(plane, {1e-4, 1e-4, 1e-4}) == doctest::Approx(3000.0).epsilon(1e-14));
      CHECK(f.evaluate(plane, {3e-5, 1.7e-4, 5e-5}) == doctest::Approx(3000.0).epsilon(1e-14));
    }
  }

  SUBCASE("face value is the arithmetic mean of matched node pressures") {
    // hub-and-spoke star: two nodes at 2000/4000 on the -x face, one node on
    // each remaining face
    VascularNetwork net = make_net(
        {{{1e-4, 1e-4, 1e-4}, {}},
         {{0, 2e-5, 2e-5}, 2000.0},
         {{0, 6e-5, 6e-5}, 4000.0},
         {{2e-4, 1e-4, 1e-4}, 3100.0},
         {{1e-4, 0, 1e-4}, 3200.0},
         {{1e-4, 2e-4, 1e-4}, 3300.0},
         {{1e-4, 1e-4, 0}, 3400.0},
         {{1e-4, 1e-4, 2e-4}, 3500.0}},
        {{0, 1, 3e-6}, {0, 2, 3e-6}, {0, 3, 3e-6}, {0, 4, 3e-6}, {0, 5, 3e-6},
         {0, 6, 3e-6}, {0, 7, 3e-6}});
    BoundaryField f = capillary_boundary_field(net, all_segment_ids(net),
                                               {{0, 0, 0}, {2e-4, 2e-4, 2e-4}}, {1, 1, 1},
                                               1e-8);
    CHECK(f.face_value(0, 0, 0) == doctest::Approx(3000.0).epsilon(1e-15));
    // evaluation at the face center returns exactly the face mean
    CHECK(f.evaluate(0, {0.0, 1e-4, 1e-4}) == doctest::Approx(3000.0).epsilon(1e-15));
    CHECK(f.evaluate(1, {2e-4, 5e-5, 5e-5}) == doctest::Approx(3100.0).epsilon(1e-15));
  }

  SUBCASE("a plane with no matched nodes anywhere is an error") {
    VascularNetwork net = make_net(
        {{{0, 1e-4, 1e-4}, 2500.0}, {{5e-5, 1e-4, 1e-4}, {}}, {{9e-5, 1e-4, 1e-4}, 3500.0}},
        {{0, 1, 3e-6}, {1, 2, 3e-6}});
    CHECK_THROWS_AS(capillary_boundary_field(net, all_segment_ids(net),
                                             {{0, 0, 0}, {2e-4, 2e-4, 2e-4}}, {1, 1, 1}, 1e-8),
                    ValidationError);
  }
}

TEST_CASE("boundary field bilinear interpolation between face centers") {
  BoundaryField f(Box3{{0, 0, 0}, {2e-4, 2e-4, 2e-4}}, {2, 2, 2});
  // plane 0 (x = 0): u axis = y, v axis = z; centers at 5e-5 and 1.5e-4
  f.set_face_value(0, 0, 0, 100.0);
  f.set_face_value(0, 1, 0, 200.0);
  f.set_face_value(0, 0, 1, 300.0);
  f.set_face_value(0, 1, 1, 400.0);
  CHECK(f.evaluate(0, {0, 5e-5, 5e-5}) == doctest::Approx(100.0));
  CHECK(f.evaluate(0, {0, 1.5e-4, 5e-5}) == doctest::Approx(200.0));
  CHECK(f.evaluate(0, {0, 1e-4, 5e-5}) == doctest::Approx(150.0));   // midpoint
  CHECK(f.evaluate(0, {0, 1e-4, 1e-4}) == doctest::Approx(250.0));   // center of plane
  CHECK(f.evaluate(0, {0, 0.0, 5e-5}) == doctest::Approx(100.0));    // clamped at the hull
  CHECK(f.evaluate(0, {0, 2e-4, 2e-4}) == doctest::Approx(400.0));   // clamped corner
}
