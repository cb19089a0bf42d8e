#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "crackdual/errors.hpp"
#include "crackdual/geometry.hpp"

using namespace crackdual;

namespace {

const Domain kSquare{Rect{-1, -1, 1, 1}};

// Points every `pitch` along each segment, endpoints included.
std::vector<Point> sample(const CrackSet& k, double pitch) {
  std::vector<Point> out;
  for (const Segment& s : k.segments()) {
    const double len = std::hypot(s.b.x - s.a.x, s.b.y - s.a.y);
    const int n = std::max(1, static_cast<int>(std::ceil(len / pitch)));
    for (int i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      out.push_back({s.a.x + t * (s.b.x - s.a.x), s.a.y + t * (s.b.y - s.a.y)});
    }
  }
  return out;
}

double sampled_hausdorff(const CrackSet& a, const CrackSet& b, double pitch) {
  const auto pa = sample(a, pitch), pb = sample(b, pitch);
  auto directed = [](const std::vector<Point>& x, const std::vector<Point>& y) {
    double d = 0;
    for (Point p : x) {
      double m = INFINITY;
      for (Point q : y) m = std::min(m, std::hypot(p.x - q.x, p.y - q.y));
      d = std::max(d, m);
    }
    return d;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

CrackSet random_set(std::mt19937_64& rng, int grid, int max_polylines) {
  std::uniform_int_distribution<int> coord(0, grid), count(1, max_polylines), len(1, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  const double step = 2.0 / grid;
  std::vector<Polyline> pls;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    Polyline pl;
    int i = coord(rng), j = coord(rng);
    pl.vertices.push_back({-1 + i * step, -1 + j * step});
    const int segs = len(rng);
    for (int s = 0; s < segs; ++s) {
      int ni = i, nj = j;
      while (ni == i && nj == j) {
        if (coin(rng)) ni = coord(rng);
        else nj = coord(rng);
      }
      i = ni;
      j = nj;
      pl.vertices.push_back({-1 + i * step, -1 + j * step});
    }
    pls.push_back(pl);
  }
  return CrackSet(pls);
}

}  // namespace

TEST(Domain, RejectsBadHoles) {
  EXPECT_THROW(Domain(Rect{0, 0, 1, 1}, {Rect{0.5, 0.5, 1.5, 0.8}}), Error);
  EXPECT_THROW(Domain(Rect{0, 0, 1, 1}, {Rect{0.2, 0.2, 0.6, 0.6}, Rect{0.5, 0.5, 0.8, 0.8}}),
               Error);
  EXPECT_THROW(Domain(Rect{0, 0, 0, 1}), Error);
}

TEST(Domain, SimpleConnectivityFlag) {
  EXPECT_TRUE(example_domain(Example::ex5_1).simply_connected());
  EXPECT_FALSE(example_domain(Example::ex5_5).simply_connected());
  EXPECT_DOUBLE_EQ(kSquare.diameter(), 2 * std::sqrt(2.0));
}

TEST(CrackSet, RejectsDiagonalAndShortPolylines) {
  EXPECT_THROW(CrackSet({Polyline{{{0, 0}, {0.5, 0.5}}}}), Error);
  EXPECT_THROW(CrackSet({Polyline{{{0, 0}}}}), Error);
}

TEST(Hausdorff, IdentityIsZero) {
  const CrackSet k = crack_family(Example::ex5_3, 4);
  EXPECT_EQ(hausdorff_distance(k, k, kSquare), 0.0);
}

TEST(Hausdorff, EmptySetConventions) {
  const CrackSet k = crack_limit(Example::ex5_3);
  EXPECT_EQ(hausdorff_distance(CrackSet{}, CrackSet{}, kSquare), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff_distance(CrackSet{}, k, kSquare), kSquare.diameter());
  EXPECT_DOUBLE_EQ(hausdorff_distance(k, CrackSet{}, kSquare), kSquare.diameter());
}

TEST(Hausdorff, OutsideDomainIsRejected) {
  const CrackSet far({Polyline{{{0, 0}, {2, 0}}}});
  try {
    hausdorff_distance(far, far, kSquare);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain_violation);
  }
}

TEST(Hausdorff, ChannelFamilyMatchesSamplingOracle) {
  FamilyParams fp;
  fp.a = 0.1;
  fp.b = 0.2;
  const CrackSet kh = crack_family(Example::ex5_3, 1, fp);
  const CrackSet k = crack_limit(Example::ex5_3);
  const double exact = hausdorff_distance(kh, k, kSquare);
  EXPECT_NEAR(exact, 0.1, 1e-15);
  EXPECT_NEAR(sampled_hausdorff(kh, k, 1e-3), exact, 1e-3);
}

TEST(Hausdorff, SamplingOracleOnRandomSets) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CrackSet a = random_set(rng, 8, 2), b = random_set(rng, 8, 2);
    const double pitch = 2e-3;
    EXPECT_NEAR(hausdorff_distance(a, b, kSquare), sampled_hausdorff(a, b, pitch), pitch);
  }
}

TEST(Hausdorff, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const CrackSet a = random_set(rng, 16, 3), b = random_set(rng, 16, 3),
                   c = random_set(rng, 16, 3);
    const double ab = hausdorff_distance(a, b, kSquare), ba = hausdorff_distance(b, a, kSquare);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    const double ac = hausdorff_distance(a, c, kSquare), cb = hausdorff_distance(c, b, kSquare);
    EXPECT_LE(ab, ac + cb + 1e-12);
  }
}

TEST(Hausdorff, SubdivisionGivesZeroDistance) {
  const CrackSet a({Polyline{{{-0.5, 0}, {0.5, 0}}}});
  const CrackSet b({Polyline{{{-0.5, 0}, {0, 0}}}, Polyline{{{0, 0}, {0.5, 0}}}});
  EXPECT_EQ(hausdorff_distance(a, b, kSquare), 0.0);
}

TEST(Hausdorff, FamiliesApproachTheirLimits) {
  for (Example e : {Example::ex5_1, Example::ex5_3, Example::ex5_5, Example::ex5_7}) {
    const Domain dom = example_domain(e);
    const CrackSet k = crack_limit(e);
    double prev = INFINITY;
    for (int h : {4, 8, 16, 32}) {
      const double d = hausdorff_distance(crack_family(e, h), k, dom);
      EXPECT_LT(d, prev) << to_string(e) << " h=" << h;
      prev = d;
    }
  }
}

TEST(Components, StableFamilyHasTwoComponents) {
  const Domain dom = example_domain(Example::ex5_1);
  const CrackSet k = crack_family(Example::ex5_1, 4);
  const ComponentPartition cp = connected_components(k, example_boundary(Example::ex5_1, dom), dom);
  EXPECT_EQ(cp.count, 2);
  ASSERT_EQ(cp.polyline_component.size(), 2u);
  EXPECT_NE(cp.polyline_component[0], cp.polyline_component[1]);
}

TEST(Components, LimitSegmentJoinsBothLateralArcs) {
  const Domain dom = example_domain(Example::ex5_3);
  const BoundarySpec bs = example_boundary(Example::ex5_3, dom);
  const ComponentPartition cp = connected_components(crack_limit(Example::ex5_3), bs, dom);
  EXPECT_EQ(cp.count, 1);
  ASSERT_EQ(cp.arc_component.size(), 2u);
  EXPECT_EQ(cp.arc_component[0], cp.polyline_component[0]);
  EXPECT_EQ(cp.arc_component[1], cp.polyline_component[0]);
}

TEST(Components, EmptyCrackWithTwoNeumannArcs) {
  const Domain dom = example_domain(Example::ex5_1);
  const ComponentPartition cp =
      connected_components(CrackSet{}, example_boundary(Example::ex5_1, dom), dom);
  EXPECT_EQ(cp.count, 2);
}

TEST(Components, InvariantUnderReorderingAndSubdivision) {
  const Domain dom = example_domain(Example::ex5_7);
  const BoundarySpec bs = example_boundary(Example::ex5_7, dom);
  const CrackSet k = crack_family(Example::ex5_7, 8);
  std::vector<Polyline> pls = k.polylines();
  std::reverse(pls.begin(), pls.end());
  // Split the first polyline at its midpoint.
  const Polyline first = pls[0];
  const Point a = first.vertices.front(), b = first.vertices.back();
  const Point m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  pls[0] = Polyline{{a, m}};
  pls.push_back(Polyline{{m, b}});
  const ComponentPartition p1 = connected_components(k, bs, dom);
  const ComponentPartition p2 = connected_components(CrackSet(pls), bs, dom);
  EXPECT_EQ(p1.count, p2.count);
  EXPECT_EQ(p1.count, 3);
}

TEST(Components, JunctionLimitIsOneComponent) {
  const Domain dom = example_domain(Example::ex5_7);
  const ComponentPartition cp = connected_components(
      crack_limit(Example::ex5_7), example_boundary(Example::ex5_7, dom), dom);
  EXPECT_EQ(cp.count, 1);
}

TEST(Family, StableFamilyHeights) {
  const CrackSet k = crack_family(Example::ex5_1, 4);
  ASSERT_EQ(k.polylines().size(), 2u);
  EXPECT_EQ(k.polylines()[0].vertices[0].y, 0.25);
  EXPECT_EQ(k.polylines()[1].vertices[0].y, -0.25);
  EXPECT_EQ(k.polylines()[0].vertices[0].x, -1.0);
  EXPECT_EQ(k.polylines()[0].vertices[1].x, 0.5);
}

TEST(Family, ChannelShape) {
  FamilyParams fp;
  fp.a = 0.1;
  fp.b = 0.2;
  const CrackSet k = crack_family(Example::ex5_3, 1, fp);
  const auto segs = k.segments();
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_DOUBLE_EQ(segs[0].b.x, -0.05);
  EXPECT_DOUBLE_EQ(segs[1].a.x, 0.05);
  EXPECT_DOUBLE_EQ(segs[2].a.y, -0.1);
  EXPECT_DOUBLE_EQ(segs[2].b.y, 0.1);
}

TEST(Family, DegenerateChannelRejected) {
  FamilyParams fp;
  fp.a = 1e-4;
  fp.b = 0.2;
  fp.pitch = 1.0 / 64;
  EXPECT_THROW(crack_family(Example::ex5_3, 1, fp), Error);
}

TEST(Family, ChannelKeepsTheCouplingConstant) {
  FamilyParams fp;
  fp.c = 0.5;
  fp.p = 3;
  for (int h : {4, 8, 16}) {
    const auto [a, b] = channel_params(Example::ex5_3, h, fp);
    EXPECT_NEAR(a * std::pow(b, 1 - fp.p) / fp.p, 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(b, 1.0 / h);
  }
  fp.c = 0;
  const auto [a0, b0] = channel_params(Example::ex5_3, 8, fp);
  EXPECT_DOUBLE_EQ(a0, std::pow(b0, 3));
}

TEST(Family, UnknownExample) {
  EXPECT_THROW(parse_example("ex9_9"), Error);
  EXPECT_EQ(parse_example("ex5_7"), Example::ex5_7);
}

TEST(Boundary, NeumannArcsAreTheComplement) {
  const Domain dom = example_domain(Example::ex5_1);
  const BoundarySpec bs = example_boundary(Example::ex5_1, dom);
  EXPECT_EQ(bs.neumann_arcs().size(), 2u);
  EXPECT_TRUE(bs.on_neumann({-1, 0}));
  EXPECT_TRUE(bs.on_dirichlet({0, 1}));
  EXPECT_FALSE(bs.on_neumann({0, 1}));
}

TEST(Distance, PointSegmentExactOnAxes) {
  const Segment s{{-1, 0}, {1, 0}};
  EXPECT_EQ(point_segment_distance({0.3, 0.0}, s), 0.0);
  EXPECT_EQ(point_segment_distance({0.3, 0.5}, s), 0.5);
  EXPECT_DOUBLE_EQ(point_segment_distance({2, 1}, s), std::sqrt(2.0));
  EXPECT_EQ(segment_distance(s, Segment{{0, 0.25}, {0, 1}}), 0.25);
}
