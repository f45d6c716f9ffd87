#include <random>

#include "doctest.h"
#include "levytree/excursion.hpp"
#include "random_excursion.hpp"

using namespace levytree;
using levytree::testing::random_excursion;

namespace {

PLExcursion triangle() { return PLExcursion({0, 1, 2}, {0, 1, 0}); }
PLExcursion two_bump() { return PLExcursion({0, 1, 2, 3, 4}, {0, 1, 0.2, 1, 0}); }

// Exhaustive search over breakpoint pairs; returns the lexicographically
// smallest maximizing pair.
DiameterResult brute_diameter(const PLExcursion& H) {
  DiameterResult best{-1, 0, 0};
  for (std::size_t i = 0; i < H.size(); ++i)
    for (std::size_t j = i + 1; j < H.size(); ++j) {
      double d = dist(H, H.t[i], H.t[j]);
      if (d > best.D + 1e-12) best = {d, H.t[i], H.t[j]};
    }
  return best;
}

}  // namespace

TEST_CASE("dist on fixed examples") {
  CHECK(dist(triangle(), 0.5, 1.5) == doctest::Approx(0.0));
  CHECK(dist(triangle(), 0.7, 0.7) == 0.0);
  CHECK(dist(two_bump(), 1, 3) == doctest::Approx(1.6));
  CHECK(dist(two_bump(), 3, 1) == doctest::Approx(1.6));
  CHECK_THROWS_AS(dist(triangle(), -0.5, 1), DomainError);
  CHECK_THROWS_AS(dist(triangle(), 0, 2.5), DomainError);
}

TEST_CASE("total height") {
  auto r = total_height(triangle());
  CHECK(r.Gamma == 1.0);
  CHECK(r.tau == 1.0);
  auto b = total_height(two_bump());
  CHECK(b.Gamma == 1.0);
  CHECK(b.tau == 1.0);
  PLExcursion s({0, 1, 2, 3, 4}, {0, 3, 0.6, 3, 0});
  CHECK(total_height(s).Gamma == 3.0);
  CHECK(total_height(s).tau == 1.0);
}

TEST_CASE("diameter") {
  auto t = diameter(triangle());
  CHECK(t.D == doctest::Approx(1.0));
  auto b = diameter(two_bump());
  CHECK(b.D == doctest::Approx(1.6));
  CHECK(b.tau0 == 1.0);
  CHECK(b.tau1 == 3.0);
  for (double r : {0.5, 1.0, 2.5}) {
    PLExcursion tri({0, r, 2 * r}, {0, r, 0});
    CHECK(diameter(concat(tri, tri)).D == doctest::Approx(2 * r));
  }
}

TEST_CASE("diameter agrees with exhaustive search, including tie-break") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 400; ++it) {
    auto H = random_excursion(rng, 2 + it % 30, it % 2 == 0);
    auto fast = diameter(H);
    auto slow = brute_diameter(H);
    REQUIRE(fast.D == doctest::Approx(slow.D).epsilon(1e-12));
    CHECK(fast.tau0 == slow.tau0);
    CHECK(fast.tau1 == slow.tau1);
  }
}

TEST_CASE("reroot") {
  auto H = two_bump();
  CHECK(max_abs_diff(reroot(H, 0), H) == 0.0);
  auto R = reroot(H, 2);
  CHECK(R.lifetime() == doctest::Approx(4.0));
  // rerooted distances are shifted distances, on a grid
  const double z = H.lifetime();
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; j += 7) {
      double s = z * i / 100, t = z * j / 100;
      double a = std::fmod(s + 2, z), b = std::fmod(t + 2, z);
      CHECK(dist(R, s, t) == doctest::Approx(dist(H, a, b)).epsilon(1e-12));
    }
  CHECK(R.at(z - 2) == doctest::Approx(dist(H, 2, 0)));
  auto RR = reroot(reroot(H, 1.3), 2.1);
  CHECK(max_abs_diff(RR, reroot(H, 3.4)) < 1e-12);
  auto RW = reroot(reroot(H, 3.1), 2.5);
  CHECK(max_abs_diff(RW, reroot(H, 1.6)) < 1e-12);
}

TEST_CASE("concat and reverse") {
  auto c = concat(triangle(), triangle());
  CHECK(c.t == std::vector<double>{0, 1, 2, 3, 4});
  CHECK(c.h == std::vector<double>{0, 1, 0, 1, 0});
  CHECK(total_height(c).Gamma == 1.0);
  auto d = diameter(c);
  CHECK(d.D == doctest::Approx(2.0));
  CHECK(d.tau0 == 1.0);
  CHECK(d.tau1 == 3.0);

  auto b = two_bump();
  CHECK(max_abs_diff(reverse(reverse(b)), b) == 0.0);
  CHECK(total_height(reverse(b)).Gamma == total_height(b).Gamma);
  auto db = diameter(b), dr = diameter(reverse(b));
  CHECK(dr.D == doctest::Approx(db.D));
  auto ends = [](const PLExcursion& H, DiameterResult r) {
    double a = dist(H, 0, r.tau0), c = dist(H, 0, r.tau1);
    return std::make_pair(std::min(a, c), std::max(a, c));
  };
  CHECK(ends(b, db).first == doctest::Approx(ends(reverse(b), dr).first));
  CHECK(ends(b, db).second == doctest::Approx(ends(reverse(b), dr).second));
}

TEST_CASE("height split") {
  auto s = height_split(triangle(), 0.5);
  CHECK(s.tau_minus == doctest::Approx(0.5));
  CHECK(s.tau_plus == doctest::Approx(1.5));
  CHECK(s.minus.lifetime() == doctest::Approx(1.0));
  CHECK(total_height(s.minus).Gamma == doctest::Approx(0.5));
  REQUIRE(s.plus);
  CHECK(s.plus->lifetime() == doctest::Approx(1.0));
  CHECK(total_height(*s.plus).Gamma == doctest::Approx(0.5));
  CHECK(max_abs_diff(*s.plus, PLExcursion({0, 0.5, 1}, {0, 0.5, 0})) < 1e-12);

  auto near = height_split(triangle(), 1 - 1e-9);
  CHECK(max_abs_diff(near.minus, triangle(), 1e-6) < 1e-6);
  CHECK((!near.plus || near.plus->lifetime() < 1e-6));

  CHECK_THROWS_AS(height_split(triangle(), 0.0), DomainError);
  CHECK_THROWS_AS(height_split(triangle(), 1.5), DomainError);

  // midpoint of the diameter of two glued triangles sits at the root
  PLExcursion tri({0, 1.5, 3}, {0, 1.5, 0});
  auto glue = concat(tri, tri);
  auto mid = height_split(glue, diameter(glue).D / 2);
  CHECK(max_abs_diff(mid.minus, tri) < 1e-12);
  REQUIRE(mid.plus);
  CHECK(max_abs_diff(*mid.plus, tri) < 1e-12);
}

TEST_CASE("height split properties on random excursions") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 300; ++it) {
    auto H = random_excursion(rng, 3 + it % 25, it % 3 == 0);
    auto G = total_height(H).Gamma;
    double x = G * (0.05 + 0.9 * (it % 17) / 16.0);
    auto s = height_split(H, x);
    CHECK(total_height(s.minus).Gamma == doctest::Approx(x).epsilon(1e-12));
    double zp = s.plus ? s.plus->lifetime() : 0.0;
    CHECK(s.minus.lifetime() + zp == doctest::Approx(H.lifetime()));
    CHECK(dist(H, s.tau_minus, s.tau_plus) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dist(H, total_height(H).tau, s.tau_minus) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("spinal decomposition examples") {
  auto M = spinal_decompose(triangle(), 1.0);
  CHECK(M.atoms.empty());
  CHECK(M.spine_height == 1.0);
  CHECK(M.spine_time() == doctest::Approx(2.0));
  auto R = reconstruct(M);
  CHECK(R.t == doctest::Approx(1.0));
  CHECK(max_abs_diff(R.H, triangle()) < 1e-12);

  auto B = spinal_decompose(two_bump(), 3.0);
  REQUIRE(B.atoms.size() == 1);
  CHECK(B.atoms[0].a == doctest::Approx(0.8));
  REQUIRE(B.atoms[0].left);
  CHECK(!B.atoms[0].right);
  CHECK(total_height(*B.atoms[0].left).Gamma == doctest::Approx(0.8));
  CHECK(B.atoms[0].left->lifetime() == doctest::Approx(1.8));
  CHECK(B.left_spine.lifetime() == doctest::Approx(1.2));
  CHECK(B.right_spine.lifetime() == doctest::Approx(1.0));
  CHECK(B.atoms[0].left->lifetime() + B.spine_time() == doctest::Approx(4.0));
  auto RB = reconstruct(B);
  CHECK(RB.t == doctest::Approx(3.0));
  CHECK(max_abs_diff(RB.H, two_bump()) < 1e-12);

  CHECK_THROWS_AS(spinal_decompose(triangle(), 1.0, 1.0), DomainError);
  B.lifetime = 5;
  CHECK_THROWS_AS(reconstruct(B), ValidationError);
}

TEST_CASE("spinal decomposition between two times") {
  auto H = two_bump();
  auto M = spinal_decompose(H, 1.0, 3.0);
  CHECK(M.spine_height == doctest::Approx(dist(H, 1, 3)));
  auto R = reconstruct(M);
  CHECK(R.t == doctest::Approx(2.0));
  CHECK(max_abs_diff(R.H, reroot(H, 1.0)) < 1e-12);
}

TEST_CASE("spinal round trip on random excursions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int it = 0; it < 500; ++it) {
    auto H = random_excursion(rng, 50, it % 2 == 1);
    double t = H.lifetime() * u(rng);
    if (it % 5 == 0) t = H.t[1 + it % (H.size() - 2)];  // land on a breakpoint
    if (t <= 0) continue;
    auto M = spinal_decompose(H, t);
    double total = M.spine_time();
    for (auto& a : M.atoms) total += (a.left ? a.left->lifetime() : 0) + (a.right ? a.right->lifetime() : 0);
    CHECK(total == doctest::Approx(H.lifetime()));
    auto R = reconstruct(M);
    CHECK(R.t == doctest::Approx(t).epsilon(1e-12));
    CHECK(max_abs_diff(R.H, H) < 1e-9);
  }
}

TEST_CASE("four-point condition and height bounds") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int it = 0; it < 200; ++it) {
    auto H = random_excursion(rng, 20, it % 2 == 0);
    const double z = H.lifetime();
    for (int q = 0; q < 50; ++q) {
      double s1 = z * u(rng), s2 = z * u(rng), s3 = z * u(rng), s4 = z * u(rng);
      double lhs = dist(H, s1, s2) + dist(H, s3, s4);
      double rhs = std::max(dist(H, s1, s3) + dist(H, s2, s4), dist(H, s1, s4) + dist(H, s2, s3));
      CHECK(lhs <= rhs + 1e-12);
    }
    auto [G, tau] = total_height(H);
    auto d = diameter(H);
    CHECK(G <= d.D + 1e-12);
    CHECK(d.D <= 2 * G + 1e-12);
    CHECK(std::max(dist(H, 0, d.tau0), dist(H, 0, d.tau1)) == doctest::Approx(G).epsilon(1e-12));
  }
}

TEST_CASE("excursion I/O") {
  auto c = parse_excursion_csv("# comment\nt,h\n0,0\n1,1\n2,0\n");
  CHECK(max_abs_diff(c, triangle()) == 0.0);
  auto j = parse_excursion_json("[[0,0],[1,1],[2,0]]");
  CHECK(max_abs_diff(j, triangle()) == 0.0);
  CHECK_THROWS_AS(parse_excursion_csv("x,y\n0,0\n"), ValidationError);
  CHECK_THROWS_AS(parse_excursion_csv("t,h\n0,0\n1,0\n"), ValidationError);
  CHECK_THROWS_AS(parse_excursion_json("[[0,1],[1,0]]"), ValidationError);
  CHECK_THROWS_AS(parse_excursion_csv("t,h\n0,0\n2,1\n1,0\n"), ValidationError);
  CHECK(parse_excursion_csv(to_csv(two_bump())).h == two_bump().h);
}
