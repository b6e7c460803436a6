#include "monochromator/device.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "oracle.hpp"

namespace mc = monochromator;

namespace {

const mc::Particle helium = mc::Particle::helium4();
const mc::Grating silicon(3.383e-10, {0.06, 0.03, 0.015});
const mc::MonochromatorSetting grazing(mc::deg_to_rad(85.0), -1);

std::vector<mc::DiffractionPath> paths_at(double v) {
  const double theta_inc = mc::incidence_for_output(grazing, helium, silicon, v);
  return mc::enumerate_paths(grazing, helium, silicon, v, theta_inc);
}

mc::DiffractionPath orders(int n1, int n2, int n3) {
  mc::DiffractionPath p;
  p.n1 = n1;
  p.n2 = n2;
  p.n3 = n3;
  p.total_order = n1 + n2 + n3;
  return p;
}

// Chains the three bounces again from scratch.
double exit_angle(const mc::DiffractionPath& p, double theta_inc, double v) {
  double a = mc::diffraction_angle(theta_inc, p.n1, helium, silicon, v);
  a = mc::diffraction_angle(a, p.n2, helium, silicon, v);
  return mc::diffraction_angle(a, p.n3, helium, silicon, v);
}

}  // namespace

TEST(PathTransmission, ProductOfPopulations) {
  EXPECT_NEAR(mc::path_transmission(orders(0, -1, 0), silicon), 1.08e-4, 1e-18);
  EXPECT_NEAR(mc::path_transmission(orders(0, 0, 0), silicon), 2.16e-4, 1e-18);
  EXPECT_NEAR(mc::path_transmission(orders(2, -1, 0), silicon), 0.015 * 0.03 * 0.06, 1e-18);
  EXPECT_THROW(mc::path_transmission(orders(-2, -2, 5), silicon), mc::ConfigError);
}

TEST(PathTransmission, PermutationInvariant) {
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      for (int c = -2; c <= 2; ++c) {
        std::array<int, 3> n{a, b, c};
        const double ref = mc::path_transmission(orders(a, b, c), silicon);
        std::sort(n.begin(), n.end());
        do {
          EXPECT_DOUBLE_EQ(mc::path_transmission(orders(n[0], n[1], n[2]), silicon), ref);
        } while (std::next_permutation(n.begin(), n.end()));
      }
    }
  }
}

TEST(FeasibilityBand, WidthIsTanOfExitAngle) {
  for (double v = 300.0; v <= 5000.0; v += 350.0) {
    for (const auto& p : paths_at(v)) {
      const auto band = mc::feasibility_band(p, grazing);
      EXPECT_LT(band.lower, band.upper);
      EXPECT_EQ(band.upper - band.lower, band.upper - p.geometry_ratio);
      EXPECT_NEAR(band.width(), 11.430052302761343, 1e-12);
    }
  }
}

TEST(FeasibilityBand, FortyFiveDegreeLegs) {
  auto p = orders(0, 0, 1);
  p.alpha1 = p.alpha2 = mc::pi / 4;
  p.geometry_ratio = std::tan(p.alpha1) + std::tan(p.alpha2);
  const auto band = mc::feasibility_band(p, grazing);
  EXPECT_NEAR(band.lower, 2.0, 1e-15);
  EXPECT_TRUE(band.contains(10.0));
  EXPECT_FALSE(band.contains(1.9));
  EXPECT_FALSE(band.contains(14.0));
}

TEST(EnumeratePaths, MatchesBruteForceCensus) {
  for (double v = 300.0; v <= 5000.0; v += 10.0) {
    const double theta_inc = mc::incidence_for_output(grazing, helium, silicon, v);
    const auto paths = mc::enumerate_paths(grazing, helium, silicon, v, theta_inc);
    const auto reference = oracle::census(theta_inc, 1, v);
    ASSERT_EQ(paths.size(), reference.size()) << "v = " << v;
    std::set<std::tuple<int, int, int>> got, want;
    for (const auto& p : paths) got.insert({p.n1, p.n2, p.n3});
    for (const auto& c : reference) want.insert({c.n1, c.n2, c.n3});
    EXPECT_EQ(got, want) << "v = " << v;
  }
}

TEST(EnumeratePaths, CensusAtThousand) {
  const auto paths = paths_at(1000.0);
  EXPECT_EQ(mc::considered_combinations(silicon), 25);
  // Brute-force count: n1 in [-2, 1], n1 + n2 <= 1; every pair propagates.
  EXPECT_EQ(paths.size(), 17u);
  EXPECT_EQ(mc::group_paths_by_geometry(paths).size(), 12u);
}

TEST(EnumeratePaths, CensusStepsWithVelocity) {
  // Counts change only where another multiple of lambda/a fits into the
  // arcsin domain.
  struct Expect {
    double v;
    std::size_t paths, groups;
  };
  for (const auto& e : {Expect{300, 9, 6}, Expect{500, 14, 9}, Expect{650, 16, 11},
                        Expect{1000, 17, 12}, Expect{5000, 17, 12}}) {
    const auto paths = paths_at(e.v);
    EXPECT_EQ(paths.size(), e.paths) << e.v;
    EXPECT_EQ(mc::group_paths_by_geometry(paths).size(), e.groups) << e.v;
  }
}

TEST(EnumeratePaths, PathInvariants) {
  for (double v = 296.0; v <= 5000.0; v += 37.0) {
    const double theta_inc = mc::incidence_for_output(grazing, helium, silicon, v);
    for (const auto& p : mc::enumerate_paths(grazing, helium, silicon, v, theta_inc)) {
      EXPECT_EQ(p.n1 + p.n2 + p.n3, 1);
      EXPECT_EQ(p.total_order, 1);
      EXPECT_NEAR(exit_angle(p, theta_inc, v), grazing.theta_out(), 1e-9);
      EXPECT_NEAR(p.geometry_ratio, std::tan(p.alpha1) + std::tan(p.alpha2), 1e-12);
      EXPECT_TRUE(std::isfinite(p.geometry_ratio));
      EXPECT_LT(std::abs(p.alpha1), mc::pi / 2);
      EXPECT_LT(std::abs(p.alpha2), mc::pi / 2);
      const bool characterised = std::abs(p.n3) <= 2;
      ASSERT_EQ(p.transmission.has_value(), characterised);
      if (characterised) {
        EXPECT_GT(*p.transmission, 0.0);
        EXPECT_LE(*p.transmission, 0.06 * 0.06 * 0.06);
        EXPECT_DOUBLE_EQ(*p.transmission, mc::path_transmission(p, silicon));
      }
    }
  }
}

TEST(EnumeratePaths, NoMatchingExitIsEmpty) {
  EXPECT_TRUE(mc::enumerate_paths(grazing, helium, silicon, 1000.0, 0.2).empty());
}

TEST(EnumeratePaths, OrderLabelSignIsIrrelevant) {
  const mc::MonochromatorSetting positive(mc::deg_to_rad(85.0), 1);
  const double theta_inc = mc::incidence_for_output(positive, helium, silicon, 1200.0);
  EXPECT_EQ(mc::enumerate_paths(positive, helium, silicon, 1200.0, theta_inc).size(),
            paths_at(1200.0).size());
}

TEST(GroupPaths, SwapPartnersShareGeometry) {
  // (n1, n2) and (n1 + n2, -n2) visit the same two angles in swapped order.
  for (double v : {700.0, 1000.0, 2500.0, 5000.0}) {
    const auto paths = paths_at(v);
    int pairs = 0;
    for (const auto& p : paths) {
      if (p.n2 == 0) continue;
      for (const auto& q : paths) {
        if (q.n1 == p.n1 + p.n2 && q.n2 == -p.n2) {
          EXPECT_NEAR(q.alpha1, p.alpha2, 1e-12);
          EXPECT_NEAR(q.alpha2, p.alpha1, 1e-12);
          EXPECT_LE(std::abs(q.geometry_ratio - p.geometry_ratio),
                    1e-12 * std::max(1.0, std::abs(p.geometry_ratio)));
          ++pairs;
        }
      }
    }
    EXPECT_GT(pairs, 0);
  }
}

TEST(GroupPaths, SingletonAndMembership) {
  const auto one = paths_at(1000.0);
  ASSERT_FALSE(one.empty());
  const auto single = mc::group_paths_by_geometry(std::span(one.data(), 1));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].members.size(), 1u);

  const auto groups = mc::group_paths_by_geometry(one);
  std::size_t members = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    members += groups[i].members.size();
    EXPECT_LE(groups[i].members.size(), 2u);
    if (i > 0) {
      EXPECT_GT(groups[i].geometry_ratio, groups[i - 1].geometry_ratio);
    }
  }
  EXPECT_EQ(members, one.size());
  EXPECT_TRUE(mc::group_paths_by_geometry({}).empty());
}

TEST(Coverage, LengthRatioTenSupportsEveryVelocity) {
  for (double v = 300.0; v <= 5000.0; v += 100.0) {
    const auto paths = paths_at(v);
    const bool covered = std::any_of(paths.begin(), paths.end(), [](const auto& p) {
      return mc::feasibility_band(p, grazing).contains(10.0);
    });
    EXPECT_TRUE(covered) << v;
  }
}

TEST(DeviceGeometry, Validation) {
  EXPECT_THROW(mc::DeviceGeometry(0.0, 1.0), mc::ConfigError);
  const mc::DeviceGeometry device(5e-3, 5e-2);
  EXPECT_DOUBLE_EQ(device.length_ratio(), 10.0);
  auto p = orders(0, 0, 1);
  p.geometry_ratio = 2.0;
  EXPECT_DOUBLE_EQ(mc::span_for(p, device), 1e-2);
}
