#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdreach/common.hpp"
#include "qdreach/repertoire.hpp"

namespace {

using qdreach::Behavior;
using qdreach::BehaviorBounds;
using qdreach::Genotype;
using qdreach::InsertOutcome;
using qdreach::Repertoire;
using qdreach::Vec;

BehaviorBounds unit_bounds(int dim) {
  BehaviorBounds b;
  b.lo = Vec::Zero(dim);
  b.hi = Vec::Ones(dim);
  return b;
}

Genotype geno(std::initializer_list<double> values) {
  Genotype g;
  g.values = Vec(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) g.values[i++] = v;
  return g;
}

Behavior behav(std::initializer_list<double> values) {
  Behavior b;
  b.values = Vec(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) b.values[i++] = v;
  return b;
}

// 3-gene, 2-dim unit-box archive used throughout; distances are then plain
// Euclidean, which keeps the worked examples checkable by hand.
Repertoire small_archive(double l) { return Repertoire(3, 2, {0, 1}, unit_bounds(2), l); }

Repertoire random_archive(int n, double l, qdreach::Rng& rng, double eps_q = 1e-3) {
  Repertoire rep(3, 2, {0, 1}, unit_bounds(2), l);
  while (rep.size() < n) {
    Genotype g = geno({qdreach::uniform01(rng), qdreach::uniform01(rng), qdreach::uniform01(rng)});
    Behavior b = behav({qdreach::uniform01(rng), qdreach::uniform01(rng)});
    rep.insert(g, b, qdreach::uniform01(rng), eps_q);
  }
  return rep;
}

}  // namespace

TEST_SUITE("repertoire") {
  TEST_CASE("insertion walks the add / replace / reject ladder") {
    Repertoire rep = small_archive(0.01);

    // Empty archive: everything is new.
    const auto first = rep.insert(geno({0.1, 0.2, 0.3}), behav({0.5, 0.5}), 0.0, 1e-3);
    CHECK(first.kind == InsertOutcome::kAdded);
    CHECK(first.id == 0);
    REQUIRE(rep.size() == 1);

    // 0.005 away from the occupant and no better: rejected.
    const auto worse = rep.insert(geno({0.4, 0.4, 0.4}), behav({0.503, 0.504}), -1.0, 1e-3);
    CHECK(worse.kind == InsertOutcome::kRejected);
    CHECK(rep.size() == 1);

    // Same spot, better by less than the competition margin: still rejected.
    const auto marginal = rep.insert(geno({0.4, 0.4, 0.4}), behav({0.503, 0.504}), 0.0009, 1e-3);
    CHECK(marginal.kind == InsertOutcome::kRejected);

    // Better by more than the margin: replaces the occupant under a fresh id.
    const auto better = rep.insert(geno({0.4, 0.4, 0.4}), behav({0.503, 0.504}), 0.0011, 1e-3);
    CHECK(better.kind == InsertOutcome::kReplaced);
    CHECK(better.id == 1);
    CHECK(better.replaced_id == 0);
    REQUIRE(rep.size() == 1);
    CHECK(rep.at(0).id == 1);
    CHECK(rep.at(0).quality == 0.0011);
    CHECK(rep.at(0).behavior.values[0] == 0.503);

    // Far enough away: added alongside.
    const auto added = rep.insert(geno({0.6, 0.6, 0.6}), behav({0.52, 0.5}), -5.0, 1e-3);
    CHECK(added.kind == InsertOutcome::kAdded);
    CHECK(rep.size() == 2);
  }

  TEST_CASE("a candidate exactly at the threshold distance is not new") {
    Repertoire rep = small_archive(0.25);
    rep.insert(geno({0.1, 0.1, 0.1}), behav({0.5, 0.5}), 0.0, 1e-3);
    // (0.75, 0.5) sits at distance exactly 0.25; newness requires strictly more.
    const auto at_l = rep.insert(geno({0.2, 0.2, 0.2}), behav({0.75, 0.5}), 0.0, 1e-3);
    CHECK(at_l.kind == InsertOutcome::kRejected);
    // A hair farther crosses it.
    const auto past_l = rep.insert(geno({0.2, 0.2, 0.2}), behav({0.7500001, 0.5}), 0.0, 1e-3);
    CHECK(past_l.kind == InsertOutcome::kAdded);
  }

  TEST_CASE("without replacement every archived pair stays l apart") {
    qdreach::Rng rng(404);
    // A competition margin no quality can clear makes insertion add-only.
    Repertoire rep(3, 2, {0, 1}, unit_bounds(2), 0.15);
    for (int i = 0; i < 4000; ++i) {
      Genotype g =
          geno({qdreach::uniform01(rng), qdreach::uniform01(rng), qdreach::uniform01(rng)});
      Behavior b = behav({qdreach::uniform01(rng), qdreach::uniform01(rng)});
      rep.insert(g, b, qdreach::uniform01(rng), 1e18);
    }
    REQUIRE(rep.size() > 10);
    for (int i = 0; i < rep.size(); ++i)
      for (int j = i + 1; j < rep.size(); ++j) {
        const double d =
            rep.behavior_distance(rep.at(i).behavior.values, rep.at(j).behavior.values);
        CHECK(d > 0.15);
      }
  }

  TEST_CASE("nearest queries agree with an exhaustive scan") {
    qdreach::Rng rng(777);
    const Repertoire rep = random_archive(60, 0.02, rng);
    const Vec target = behav({0.31, 0.62}).values;

    for (bool control_only : {false, true}) {
      CAPTURE(control_only);
      const auto got = rep.nearest_behavior(target, 7, control_only);
      REQUIRE(got.size() == 7);

      std::vector<std::pair<double, int>> expect;
      for (int i = 0; i < rep.size(); ++i) {
        // Control dims are {0, 1} of 2: both metrics see the same coordinates
        // here, but the call paths differ.
        const double d = rep.behavior_distance(rep.at(i).compensated(), target);
        expect.emplace_back(d, i);
      }
      std::sort(expect.begin(), expect.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return rep.at(a.second).id < rep.at(b.second).id;
      });
      for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(got[k].first == expect[k].second);
        CHECK(got[k].second == doctest::Approx(expect[k].first).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("nearest queries break behavior ties toward the lower id") {
    Repertoire rep = small_archive(1e-9);
    rep.insert(geno({0.1, 0.1, 0.1}), behav({0.4, 0.5}), 0.0, 1e-3);
    rep.insert(geno({0.2, 0.2, 0.2}), behav({0.6, 0.5}), 0.0, 1e-3);
    const auto hits = rep.nearest_behavior(behav({0.5, 0.5}).values, 2, false);
    REQUIRE(hits.size() == 2);
    CHECK(rep.at(hits[0].first).id == 0);
    CHECK(rep.at(hits[1].first).id == 1);
  }

  TEST_CASE("genotype neighbors exclude duplicates and respect the radius") {
    // Power-of-two coordinates keep the distances exact, so the inclusive
    // boundary below is really exercised.
    Repertoire rep = small_archive(1e-9);
    rep.insert(geno({0.5, 0.5, 0.5}), behav({0.1, 0.1}), 0.0, 1e-3);     // the query itself
    rep.insert(geno({0.5, 0.5, 0.625}), behav({0.2, 0.2}), 0.0, 1e-3);   // d = 0.125
    rep.insert(geno({0.5, 0.5, 0.75}), behav({0.3, 0.3}), 0.0, 1e-3);    // d = 0.25
    rep.insert(geno({0.9, 0.9, 0.9}), behav({0.4, 0.4}), 0.0, 1e-3);     // far outside

    const Vec q = geno({0.5, 0.5, 0.5}).values;
    const auto within = rep.genotype_neighbors(q, 10, 0.25);
    REQUIRE(within.size() == 2);  // the exact duplicate is skipped, the far one filtered
    CHECK(rep.at(within[0].first).id == 1);
    CHECK(within[0].second == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(rep.at(within[1].first).id == 2);  // distance exactly at the radius is kept

    const auto capped = rep.genotype_neighbors(q, 1, 0.5);
    REQUIRE(capped.size() == 1);
    CHECK(rep.at(capped[0].first).id == 1);
  }

  TEST_CASE("observations append unconditionally and are findable") {
    Repertoire rep = small_archive(0.5);
    rep.insert(geno({0.1, 0.1, 0.1}), behav({0.5, 0.5}), 0.0, 1e-3);
    // Within l of the occupant, yet recorded: observations bypass competition.
    const auto id = rep.add_observation(geno({0.2, 0.2, 0.2}), behav({0.51, 0.5}), -1.0);
    CHECK(id == 1);
    CHECK(rep.size() == 2);
    CHECK(rep.index_of_id(1) == 1);
    CHECK(rep.index_of_id(99) == -1);
    CHECK(rep.index_of_genotype(geno({0.2, 0.2, 0.2}).values) == 1);
    CHECK(rep.index_of_genotype(geno({0.2, 0.2, 0.21}).values) == -1);
  }

  TEST_CASE("compensation shifts the geometry every query sees") {
    Repertoire rep = small_archive(1e-9);
    rep.insert(geno({0.1, 0.1, 0.1}), behav({0.5, 0.5}), 0.0, 1e-3);
    const Vec target = behav({0.7, 0.5}).values;
    CHECK(rep.nearest_behavior_distance(target) == doctest::Approx(0.2).epsilon(1e-12));

    Vec delta(2);
    delta << 0.2, 0.0;
    rep.add_compensation(0, delta);
    CHECK(rep.nearest_behavior_distance(target) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.at(0).compensated()[0] == doctest::Approx(0.7).epsilon(1e-15));
    // The raw simulated behavior stays untouched.
    CHECK(rep.at(0).behavior.values[0] == 0.5);
  }

  TEST_CASE("save and load round-trip byte-identically") {
    qdreach::Rng rng(1212);
    Repertoire rep = random_archive(25, 0.02, rng);
    Vec delta(2);
    delta << 0.017, -0.003;
    rep.add_compensation(3, delta);
    rep.set_novelty(5, 0.125);  // transient; must not leak into the file

    std::ostringstream first;
    rep.save(first);
    std::istringstream in(first.str());
    const Repertoire loaded = Repertoire::load(in);

    REQUIRE(loaded.size() == rep.size());
    CHECK(loaded.next_id() == rep.next_id());
    CHECK(loaded.l_repertoire() == rep.l_repertoire());
    CHECK(loaded.control_dims() == rep.control_dims());
    for (int i = 0; i < rep.size(); ++i) {
      CHECK(loaded.at(i).id == rep.at(i).id);
      CHECK(loaded.at(i).quality == rep.at(i).quality);
      // Novelty is recomputed every generation, so it is not persisted.
      CHECK(loaded.at(i).novelty == 0.0);
      for (int d = 0; d < 3; ++d)
        CHECK(loaded.at(i).genotype.values[d] == rep.at(i).genotype.values[d]);
      for (int d = 0; d < 2; ++d) {
        CHECK(loaded.at(i).behavior.values[d] == rep.at(i).behavior.values[d]);
        CHECK(loaded.at(i).compensation[d] == rep.at(i).compensation[d]);
      }
    }

    std::ostringstream second;
    loaded.save(second);
    CHECK(first.str() == second.str());
  }

  TEST_CASE("an empty repertoire still round-trips its shape") {
    const Repertoire rep(3, 2, {0, 1}, unit_bounds(2), 0.07);
    std::ostringstream out;
    rep.save(out);
    std::istringstream in(out.str());
    const Repertoire loaded = Repertoire::load(in);
    CHECK(loaded.size() == 0);
    CHECK(loaded.genotype_dim() == 3);
    CHECK(loaded.behavior_dim() == 2);
    CHECK(loaded.l_repertoire() == 0.07);
  }

  TEST_CASE("corrupt archives are rejected with the offending line") {
    qdreach::Rng rng(9);
    Repertoire rep = random_archive(3, 0.02, rng);
    std::ostringstream out;
    rep.save(out);

    std::string text = out.str();
    // Chop the final record in half.
    text.resize(text.rfind("\"id\"") + 4);
    std::istringstream in(text);
    CHECK_THROWS_AS(Repertoire::load(in), qdreach::parse_error);

    std::istringstream garbage("not json\n");
    CHECK_THROWS_AS(Repertoire::load(garbage), qdreach::parse_error);
  }
}
