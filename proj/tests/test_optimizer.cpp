#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "finitekey/optimizer.hpp"

using namespace finitekey;

namespace {

const SecurityBudget kS6 = SecurityBudget::from_exponent(6);

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * want; }

}  // namespace

TEST_CASE("lemma2 optimum at m = 3100") {
  const auto r = optimize(3100, 0.0451, kS6, Variant::lemma2);
  CHECK(r.feasible);
  CHECK(r.ell == 10);
  CHECK(r.m == 3100);
  CHECK(r.variant == Variant::lemma2);
  // Close to the reported operating point (beta 0.5, nu 0.1141, xi 0.0693).
  CHECK(within(r.point.beta, 0.5, 0.15));
  CHECK(within(r.point.nu, 0.1141, 0.15));
  CHECK(within(r.point.xi, 0.0693, 0.15));
  CHECK(r.point.alpha == doctest::Approx(10.0 / 3100.0));
  CHECK(r.point.k == static_cast<std::int64_t>(std::floor(r.point.beta * 3100)));

  // The reported point re-checks independently.
  const auto shape = BlockShape::make(3100, r.point.k);
  const auto check = feasible(make_settings(shape, 0.0451, kS6, r.ell), kS6,
                              SlackParams{r.point.nu, r.point.xi}, Variant::lemma2);
  CHECK(check.feasible);
  CHECK(check.breakdown.total == r.breakdown.total);
  CHECK(r.breakdown.total <= 1e-6);
  CHECK(max_ell_at(make_settings(shape, 0.0451, kS6), kS6, SlackParams{r.point.nu, r.point.xi},
                   Variant::lemma2) == r.ell);
}

TEST_CASE("serfling has no key at m = 3100") {
  const auto r = optimize(3100, 0.0451, kS6, Variant::serfling);
  CHECK_FALSE(r.feasible);
  CHECK(r.ell == 0);
  CHECK(r.point.xi == 0.0);
}

TEST_CASE("tiny blocks have no key") {
  for (Variant v : {Variant::lemma2, Variant::serfling}) {
    const auto r = optimize(100, 0.0451, kS6, v);
    CHECK(r.ell == 0);
    CHECK_FALSE(r.feasible);
  }
  // Nothing on a fine grid either.
  for (int b = 1; b <= 50; ++b) {
    const auto shape = BlockShape::make(100, b);
    const auto settings = make_settings(shape, 0.0451, kS6);
    for (int i = 1; i <= 45; ++i) {
      const double nu = i / 100.0;
      CHECK(max_ell_at(settings, kS6, SlackParams{nu, 0.0}, Variant::serfling) == 0);
      for (int j = 1; j < 10; ++j) {
        CHECK(max_ell_at(settings, kS6, SlackParams{nu, nu * j / 10.0}, Variant::lemma2) == 0);
      }
    }
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(optimize(9, 0.0451, kS6, Variant::lemma2), std::invalid_argument);
  CHECK_THROWS_AS(optimize(3100, 0.0, kS6, Variant::lemma2), std::invalid_argument);
  CHECK_THROWS_AS(optimize(3100, 0.5, kS6, Variant::lemma2), std::invalid_argument);
}

TEST_CASE("optimize is deterministic") {
  const auto a = optimize(5000, 0.03, kS6, Variant::lemma2);
  const auto b = optimize(5000, 0.03, kS6, Variant::lemma2);
  CHECK(a.ell == b.ell);
  CHECK(a.point.beta == b.point.beta);
  CHECK(a.point.nu == b.point.nu);
  CHECK(a.point.xi == b.point.xi);
  CHECK(a.breakdown.total == b.breakdown.total);
}

TEST_CASE("lemma2 never loses to serfling") {
  for (std::int64_t m : {2000, 5000, 10000, 30000}) {
    for (double delta : {0.01, 0.0451}) {
      const auto l2 = optimize(m, delta, kS6, Variant::lemma2);
      const auto sf = optimize(m, delta, kS6, Variant::serfling);
      INFO("m=" << m << " delta=" << delta);
      CHECK(l2.ell >= sf.ell);
    }
  }
}

TEST_CASE("sweep rows follow the input order") {
  const std::vector<std::int64_t> ms{8000, 3100, 20000};
  const std::vector<Variant> vs{Variant::lemma2, Variant::serfling};
  const auto rows = sweep(ms, 0.0451, kS6, vs);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const auto& row = rows[i * vs.size() + j];
      CHECK(row.m == ms[i]);
      CHECK(row.variant == vs[j]);
      const auto single = optimize(ms[i], 0.0451, kS6, vs[j]);
      CHECK(row.ell == single.ell);
      CHECK(row.point.nu == single.point.nu);
    }
  }
}

TEST_CASE("key rate grows with the block") {
  std::vector<std::int64_t> ms;
  for (std::int64_t m = 4000; m <= 64000; m *= 2) ms.push_back(m);
  const std::vector<Variant> vs{Variant::lemma2};
  const auto rows = sweep(ms, 0.0451, kS6, vs);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].ell > rows[i - 1].ell);
    CHECK(rows[i].point.alpha > rows[i - 1].point.alpha);
  }
}

TEST_CASE("key rate is nondecreasing from 2000 to 20000") {
  std::vector<std::int64_t> ms;
  for (std::int64_t m = 2000; m <= 20000; m += 1000) ms.push_back(m);
  const std::vector<Variant> vs{Variant::lemma2, Variant::serfling};
  const auto rows = sweep(ms, 0.0451, kS6, vs);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    INFO("m=" << rows[i].m << " " << to_string(rows[i].variant));
    CHECK(rows[i].point.alpha >= rows[i - 2].point.alpha);
  }
}

TEST_CASE("minimum block length") {
  const auto none = min_block_length(0.0451, kS6, Variant::lemma2, 100, 500, 50);
  CHECK_FALSE(none.m_min.has_value());
  CHECK_FALSE(none.at_min.has_value());

  const auto hit = min_block_length(0.0451, kS6, Variant::lemma2, 1000, 4000, 50);
  REQUIRE(hit.m_min.has_value());
  REQUIRE(hit.at_min.has_value());
  const std::int64_t m = *hit.m_min;
  CHECK(hit.at_min->ell >= 1);
  CHECK(hit.at_min->m == m);
  for (std::int64_t below = m - 1; below >= m - 60 && below >= 1000; --below) {
    INFO("m=" << below);
    CHECK(optimize(below, 0.0451, kS6, Variant::lemma2).ell == 0);
  }
  for (std::int64_t above = m; above <= m + 60; ++above) {
    INFO("m=" << above);
    CHECK(optimize(above, 0.0451, kS6, Variant::lemma2).ell >= 1);
  }

  // Range starting at the answer returns its start.
  const auto edge = min_block_length(0.0451, kS6, Variant::lemma2, m, m + 500, 50);
  REQUIRE(edge.m_min.has_value());
  CHECK(*edge.m_min == m);
  CHECK_THROWS_AS(min_block_length(0.0451, kS6, Variant::lemma2, 500, 100, 50),
                  std::invalid_argument);
  CHECK_THROWS_AS(min_block_length(0.0451, kS6, Variant::lemma2, 100, 500, 0),
                  std::invalid_argument);
}
