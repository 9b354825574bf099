#include <doctest.h>

#include "mslab/errors.hpp"
#include "mslab/acceptance.hpp"
#include "mslab/anomaly_ledger.hpp"

using namespace mslab;

namespace {

ChannelSet two_edges() {
  // Right movers at 0 and 4, left movers at 1 and 3, regions left/right.
  std::vector<ChiralMode> m{{"a", Position::at(0), Chirality::Right, "", 1},
                            {"b", Position::at(1), Chirality::Left, "", 1},
                            {"c", Position::at(3), Chirality::Left, "", 1},
                            {"d", Position::at(4), Chirality::Right, "", 1}};
  std::vector<SymmetryGenerator> g{{"e", constant_modulation(), Strength::Strong}, {"d", monomial(1), Strength::Weak}};
  return ChannelSet(m, g, {{"a", "left"}, {"b", "left"}, {"c", "right"}, {"d", "right"}});
}

std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::int64_t ipow(std::int64_t x, int p) {
  std::int64_t r = 1;
  while (p-- > 0) r *= x;
  return r;
}

}  // namespace

TEST_SUITE("anomaly-ledger") {
  TEST_CASE("hand-computed matrix") {
    const AnomalyMatrix a = anomaly_matrix(two_edges());
    CHECK(a.at("e", "e") == 0);
    CHECK(a.at("e", "d") == 0);
    CHECK(a.at("d", "d") == 0 - 1 - 9 + 16);
    const AnomalyMatrix left = anomaly_matrix(two_edges(), "left");
    CHECK(left.at("e", "d") == -1);
    CHECK(left.at("d", "d") == -1);
  }

  TEST_CASE("catalog verdicts") {
    for (const auto& name : scenario_names()) {
      CAPTURE(name);
      const Scenario s = scenario(name);
      const Verdict v = realizability(s.channels);
      CHECK(v.closed_realizable == s.expect_closed);
      CHECK(v.open_realizable == s.expect_open);
      if (s.expect_forced) CHECK(multipole_hierarchy(s.channels, s.edge_region).forced_self_anomaly == *s.expect_forced);
    }
    CHECK_THROWS_AS(scenario("missing"), LookupError);
  }

  TEST_CASE("verdict semantics") {
    const ChannelSet s = two_edges();
    CHECK_FALSE(realizability(s).closed_realizable);
    CHECK(realizability(s).open_realizable);  // only (d, d) is nonzero and d is weak
    const ChannelSet strong = s.with_generators({{"e", constant_modulation(), Strength::Strong},
                                                 {"d", monomial(1), Strength::Strong}});
    CHECK_FALSE(realizability(strong).open_realizable);
    const Verdict v = realizability(s);
    REQUIRE(v.violations.size() == 1);
    CHECK(v.violations[0].ancilla_absorbed);
    CHECK(v.violations[0].value == 6);
  }

  TEST_CASE("multipole hierarchy against binomial sums") {
    for (int n = 1; n <= 3; ++n) {
      CAPTURE(n);
      const ChannelSet set = multipole_channels(n);
      const HierarchyReport h = multipole_hierarchy(set, "left-edge");
      std::int64_t edge = 0;
      for (int j = 0; j <= 2 * n - 1; ++j) edge += (j % 2 ? -1 : 1) * binomial(2 * n - 1, j) * ipow(j, 2 * n - 1);
      CHECK(h.order == n);
      CHECK(h.edge_mixed == edge);
      CHECK(h.lower_cancel);
      CHECK(h.forced_self_anomaly);
    }
    CHECK(multipole_hierarchy(multipole_channels(2), "left-edge").edge_mixed == -6);
    CHECK(multipole_hierarchy(multipole_channels(3), "left-edge").edge_mixed == -120);
  }

  TEST_CASE("symmetry, ledger-flux consistency and region completeness on random sets") {
    for (std::uint64_t i = 0; i < 200; ++i) {
      Engine eng(derive_seed(5, "test-random-sets", i));
      const ChannelSet set = random_channel_set(eng);
      const AnomalyMatrix a = anomaly_matrix(set);
      CHECK(a.entries == a.entries.transpose());
      IntMatrix by_region = IntMatrix::Zero(a.entries.rows(), a.entries.cols());
      for (const auto& r : set.region_labels()) by_region += anomaly_matrix(set, r).entries;
      CHECK(by_region == a.entries);
      for (const auto& g : set.generators()) {
        const FluxReport f = flux_insertion(set, g.name);
        CHECK(f.totals == IntVector(a.entries.row(set.generator_index(g.name)).transpose()));
        IntVector sum = IntVector::Zero(f.totals.size());
        for (const auto& [label, v] : f.per_region) sum += v;
        CHECK(sum == f.totals);
      }
    }
  }

  TEST_CASE("additivity over disjoint unions") {
    for (std::uint64_t i = 0; i < 100; ++i) {
      Engine eng(derive_seed(5, "test-union", i));
      ChannelSet a = random_channel_set(eng);
      // Same generator list on the second set so the matrices line up.
      std::vector<ChiralMode> modes;
      std::map<std::string, std::string> regions;
      const ChannelSet second = random_channel_set(eng);
      for (const auto& m : second.modes()) {
        ChiralMode c = m;
        c.id = "u" + m.id;
        c.position.dims = a.modes().front().position.dims;
        if (c.position.dims == 1) c.position.y = 0;
        modes.push_back(c);
        regions[c.id] = "U";
      }
      const ChannelSet b(modes, a.generators(), regions);
      const ChannelSet u = a.disjoint_union(b);
      CHECK(anomaly_matrix(u).entries == anomaly_matrix(a).entries + anomaly_matrix(b).entries);
    }
  }

  TEST_CASE("origin invariance of the dipole generator") {
    int tested_de = 0, tested_dd = 0;
    for (std::uint64_t i = 0; i < 3000 && (tested_de < 20 || tested_dd < 20); ++i) {
      Engine eng(derive_seed(5, "test-origin", i));
      std::vector<ChiralMode> modes;
      const Index n = 2 + static_cast<Index>(uniform_index(eng, 5));
      for (Index k = 0; k < n; ++k)
        modes.push_back({"c" + std::to_string(k), Position::at(static_cast<std::int64_t>(uniform_index(eng, 7)) - 2),
                         uniform_index(eng, 2) ? Chirality::Right : Chirality::Left, "", 1});
      const ChannelSet set(modes, {{"e", constant_modulation(), Strength::Strong}, {"d", monomial(1), Strength::Weak}});
      const AnomalyMatrix a = anomaly_matrix(set);
      if (a.at("e", "e") != 0) continue;
      const std::int64_t x0 = static_cast<std::int64_t>(uniform_index(eng, 9)) - 4;
      const ChannelSet moved = set.with_generators(
          {{"e", constant_modulation(), Strength::Strong}, {"d", shift_origin(monomial(1), x0), Strength::Weak}});
      const AnomalyMatrix b = anomaly_matrix(moved);
      CHECK(b.at("d", "e") == a.at("d", "e"));
      ++tested_de;
      if (a.at("d", "e") == 0) {
        CHECK(b.at("d", "d") == a.at("d", "d"));
        ++tested_dd;
      }
    }
    CHECK(tested_de >= 20);
    CHECK(tested_dd >= 20);
  }

  TEST_CASE("chirality-balanced quadruples are anomaly free") {
    Engine eng(derive_seed(5, "test-complete"));
    for (int t = 0; t < 30; ++t) {
      std::vector<ChiralMode> modes;
      const int sites = 1 + static_cast<int>(uniform_index(eng, 4));
      for (int s = 0; s < sites; ++s) {
        const Position p = Position::at(static_cast<std::int64_t>(uniform_index(eng, 9)) - 4,
                                        static_cast<std::int64_t>(uniform_index(eng, 9)) - 4);
        for (int k = 0; k < 4; ++k)
          modes.push_back({"s" + std::to_string(s) + "_" + std::to_string(k), p, k < 2 ? Chirality::Right : Chirality::Left, "", 1});
      }
      std::vector<SymmetryGenerator> gens{{"e", constant_modulation(), Strength::Strong},
                                          {"x", monomial(1), Strength::Weak},
                                          {"y2", monomial(2, Axis::Y), Strength::Weak},
                                          {"p", PlaneIndicator{Axis::X, 0}, Strength::Weak}};
      CHECK(anomaly_matrix(ChannelSet(modes, gens)).is_zero());
    }
  }

  TEST_CASE("flux insertion on the two-edge set") {
    const FluxReport f = flux_insertion(two_edges(), "d");
    CHECK(f.occupation_shifts == (IntVector(4) << 0, -1, -3, 4).finished());
    CHECK(f.totals == (IntVector(2) << 0, 6).finished());
    CHECK(f.per_region.at("left") == (IntVector(2) << -1, -1).finished());
    CHECK(f.per_region.at("right") == (IntVector(2) << 1, 7).finished());
    // Re-centred at each region's own origin the dipole response of an edge
    // is the same on both sides up to sign.
    CHECK(f.per_region_local.at("left")(0) == -1);
    CHECK(f.per_region_local.at("right")(0) == 1);
  }
}
