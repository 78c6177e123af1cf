#include <doctest.h>

#include <cmath>
#include <vector>

#include "qdreach/common.hpp"
#include "qdreach/kernels.hpp"

namespace {

using qdreach::Rng;
using qdreach::uniform01;
using qdreach::kernels::ColsView;
using qdreach::kernels::Ops;

// Column-major point cloud with its own storage.
struct Cloud {
  std::vector<std::vector<double>> cols;
  std::vector<const double*> ptrs;

  Cloud(std::size_t count, std::size_t dim, Rng& rng, double lo = -3.0, double hi = 3.0) {
    cols.resize(dim);
    for (auto& c : cols) {
      c.resize(count);
      for (double& v : c) v = lo + (hi - lo) * uniform01(rng);
    }
    for (const auto& c : cols) ptrs.push_back(c.data());
  }

  ColsView view() const { return {ptrs.data(), cols.empty() ? 0 : cols[0].size(), cols.size()}; }

  void set(std::size_t point, std::size_t dim, double v) { cols[dim][point] = v; }
};

std::vector<double> random_query(std::size_t dim, Rng& rng) {
  std::vector<double> q(dim);
  for (double& v : q) v = -3.0 + 6.0 * uniform01(rng);
  return q;
}

// Every built lane, reference first.
std::vector<const Ops*> lanes() {
  std::vector<const Ops*> out{&qdreach::kernels::scalar_ops()};
  if (const Ops* avx2 = qdreach::kernels::avx2_ops()) out.push_back(avx2);
  if (const Ops* neon = qdreach::kernels::neon_ops()) out.push_back(neon);
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("sqdist matches a straightforward reference on every lane") {
    Rng rng(20240811);
    for (std::size_t count : {1u, 2u, 3u, 7u, 8u, 9u, 64u, 1001u}) {
      const Cloud cloud(count, 11, rng);
      const auto q = random_query(11, rng);

      std::vector<double> expect(count);
      for (std::size_t i = 0; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t d = 0; d < 11; ++d) {
          const double diff = q[d] - cloud.cols[d][i];
          acc += diff * diff;
        }
        expect[i] = acc;
      }

      for (const Ops* lane : lanes()) {
        CAPTURE(lane->name);
        CAPTURE(count);
        std::vector<double> got(count);
        lane->sqdist(q.data(), cloud.view(), got.data());
        for (std::size_t i = 0; i < count; ++i)
          CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("kde_sum agrees across lanes to near machine precision") {
    Rng rng(77);
    for (std::size_t count : {1u, 5u, 8u, 13u, 256u, 999u}) {
      const Cloud cloud(count, 4, rng);
      const auto q = random_query(4, rng);
      const double inv_h2 = 1.0 / (0.37 * 0.37);

      const double reference =
          qdreach::kernels::scalar_ops().kde_sum(q.data(), cloud.view(), inv_h2);
      for (const Ops* lane : lanes()) {
        CAPTURE(lane->name);
        CAPTURE(count);
        const double got = lane->kde_sum(q.data(), cloud.view(), inv_h2);
        CHECK(got == doctest::Approx(reference).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("kde_sum flushes far-away points to exactly zero on every lane") {
    Rng rng(3);
    Cloud cloud(5, 2, rng);
    // Place every point ~1e6 away; -0.5 d^2 is far below the flush threshold.
    for (std::size_t i = 0; i < 5; ++i) {
      cloud.set(i, 0, 1e6 + static_cast<double>(i));
      cloud.set(i, 1, -1e6);
    }
    const std::vector<double> q{0.0, 0.0};
    for (const Ops* lane : lanes()) {
      CAPTURE(lane->name);
      CHECK(lane->kde_sum(q.data(), cloud.view(), 1.0) == 0.0);
    }
  }

  TEST_CASE("kde_sum is finite and positive for coincident points") {
    const std::vector<double> col0{0.5, 0.5, 0.5};
    const std::vector<double> col1{-1.0, -1.0, -1.0};
    const std::vector<const double*> ptrs{col0.data(), col1.data()};
    const ColsView view{ptrs.data(), 3, 2};
    const std::vector<double> q{0.5, -1.0};
    for (const Ops* lane : lanes()) {
      CAPTURE(lane->name);
      CHECK(lane->kde_sum(q.data(), view, 123.0) == doctest::Approx(3.0));
    }
  }

  TEST_CASE("argmin_sqdist returns the lowest index on ties, every lane") {
    Rng rng(5);
    Cloud cloud(9, 3, rng);
    // Identical closest points at indices 2 and 7.
    for (std::size_t d = 0; d < 3; ++d) {
      cloud.set(2, d, 0.25);
      cloud.set(7, d, 0.25);
    }
    const std::vector<double> q{0.25, 0.25, 0.25};
    for (const Ops* lane : lanes()) {
      CAPTURE(lane->name);
      double best = -1.0;
      const std::size_t idx = lane->argmin_sqdist(q.data(), cloud.view(), &best);
      CHECK(idx == 2);
      CHECK(best == 0.0);
    }
  }

  TEST_CASE("argmin_sqdist agrees with an exhaustive scan on random instances") {
    Rng rng(99);
    for (std::size_t count : {1u, 4u, 8u, 17u, 500u}) {
      const Cloud cloud(count, 6, rng);
      const auto q = random_query(6, rng);

      std::vector<double> sq(count);
      qdreach::kernels::scalar_ops().sqdist(q.data(), cloud.view(), sq.data());
      std::size_t expect = 0;
      for (std::size_t i = 1; i < count; ++i)
        if (sq[i] < sq[expect]) expect = i;

      for (const Ops* lane : lanes()) {
        CAPTURE(lane->name);
        CAPTURE(count);
        double best = -1.0;
        const std::size_t idx = lane->argmin_sqdist(q.data(), cloud.view(), &best);
        CHECK(idx == expect);
        CHECK(best == doctest::Approx(sq[expect]).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("the dispatched lane matches the reference lane bit-for-bit here") {
    // The selected lane may legitimately differ from scalar by an ulp in
    // kde_sum; distances and argmin must not differ at all.
    Rng rng(1234);
    const Cloud cloud(321, 8, rng);
    const auto q = random_query(8, rng);

    std::vector<double> ref(321), got(321);
    qdreach::kernels::scalar_ops().sqdist(q.data(), cloud.view(), ref.data());
    qdreach::kernels::ops().sqdist(q.data(), cloud.view(), got.data());
    for (std::size_t i = 0; i < 321; ++i)
      CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-14));

    double best_ref = 0.0, best_got = 0.0;
    const std::size_t i_ref =
        qdreach::kernels::scalar_ops().argmin_sqdist(q.data(), cloud.view(), &best_ref);
    const std::size_t i_got = qdreach::kernels::ops().argmin_sqdist(q.data(), cloud.view(), &best_got);
    CHECK(i_ref == i_got);
  }
}
