#include <doctest.h>

#include <cvqkd/gaussian.hpp>

#include <cmath>
#include <random>

using namespace cvqkd;

namespace {

// Single-mode squeezer diag(e^r, e^-r); symplectic for any r.
Matd squeezer(double r) {
  Matd s = Matd::Zero(2, 2);
  s(0, 0) = std::exp(r);
  s(1, 1) = std::exp(-r);
  return s;
}

// Random physical 2-mode state: S * diag(nu1, nu1, nu2, nu2) * S^T with
// S a product of beamsplitters, rotations and squeezers.
Matd random_two_mode_state(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  std::uniform_real_distribution<double> squeeze(-1.0, 1.0);
  std::uniform_real_distribution<double> thermal(1.0, 4.0);

  const Matd s = beamsplitter(unit(gen), 0, 1, 2) *
                 direct_sum(mode_rotation(angle(gen), 0, 1),
                            mode_rotation(angle(gen), 0, 1)) *
                 direct_sum(squeezer(squeeze(gen)), squeezer(squeeze(gen))) *
                 beamsplitter(unit(gen), 0, 1, 2);
  Matd d = Matd::Zero(4, 4);
  const double nu1 = thermal(gen), nu2 = thermal(gen);
  d.diagonal() << nu1, nu1, nu2, nu2;
  return apply_symplectic(s, d);
}

// Standard two-mode form [[a I, c sigma_z], [c sigma_z, b I]].
Matd standard_form(double a, double b, double c) {
  Matd m = Matd::Zero(4, 4);
  m(0, 0) = m(1, 1) = a;
  m(2, 2) = m(3, 3) = b;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return m;
}

}  // namespace

TEST_CASE("symplectic form is antisymmetric and squares to -identity") {
  for (Index n : {1, 2, 3, 5}) {
    const Matd w = omega(n);
    CHECK((w + w.transpose()).norm() == 0.0);
    CHECK((w * w + Matd::Identity(2 * n, 2 * n)).norm() == 0.0);
  }
}

TEST_CASE("direct sum places blocks on the diagonal") {
  Matd a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  const Matd d = direct_sum(a, b);
  CHECK(d.rows() == 4);
  CHECK(d.block<2, 2>(0, 0) == a);
  CHECK(d.block<2, 2>(2, 2) == b);
  CHECK(d.block<2, 2>(0, 2).norm() == 0.0);
  CHECK(d.block<2, 2>(2, 0).norm() == 0.0);
}

TEST_CASE("beamsplitters and rotations are symplectic") {
  for (double t : {0.0, 0.25, 0.5, 0.73, 1.0})
    CHECK(is_symplectic(beamsplitter(t, 0, 1, 2)));
  CHECK(is_symplectic(beamsplitter(0.4, 1, 3, 4)));
  for (double th : {0.0, 0.3, 1.7})
    CHECK(is_symplectic(mode_rotation(th, 0, 2)));
  // Compositions stay symplectic.
  CHECK(is_symplectic(beamsplitter(0.3, 0, 1, 3) * beamsplitter(0.8, 1, 2, 3)));
  CHECK_FALSE(is_symplectic(2.0 * Matd::Identity(4, 4)));
}

TEST_CASE("beamsplitter with t=1 is the identity") {
  CHECK((beamsplitter(1.0, 0, 1, 2) - Matd::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("beamsplitter rejects bad arguments") {
  CHECK_THROWS_AS(beamsplitter(-0.1, 0, 1, 2), error);
  CHECK_THROWS_AS(beamsplitter(1.1, 0, 1, 2), error);
  CHECK_THROWS_AS(beamsplitter(0.5, 0, 0, 2), dimension_error);
  CHECK_THROWS_AS(beamsplitter(0.5, 0, 2, 2), dimension_error);
}

TEST_CASE("require_covariance rejects malformed input") {
  Matd odd = Matd::Identity(3, 3);
  CHECK_THROWS_AS(require_covariance(odd), dimension_error);
  Matd asym = Matd::Identity(4, 4);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(require_covariance(asym), error);
}

TEST_CASE("apply_symplectic validates and preserves vacuum") {
  const Matd vac = Matd::Identity(4, 4);
  const Matd out = apply_symplectic(beamsplitter(0.37, 0, 1, 2), vac);
  CHECK((out - vac).norm() < 1e-14);
  CHECK_THROWS_AS(apply_symplectic(2.0 * Matd::Identity(4, 4), vac), error);
}

TEST_CASE("symplectic eigenvalues of simple states") {
  Matd two = Matd::Zero(4, 4);
  two.diagonal() << 3.0, 3.0, 2.0, 2.0;
  const auto nus = symplectic_eigenvalues(two);
  REQUIRE(nus.size() == 2);
  CHECK(nus[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(nus[1] == doctest::Approx(2.0).epsilon(1e-12));

  const auto vac = symplectic_eigenvalues(Matd::Identity(6, 6));
  for (double nu : vac) CHECK(nu == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum is invariant under symplectic conjugation") {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 50; ++i) {
    const Matd sigma = random_two_mode_state(gen);
    const Matd rotated =
        apply_symplectic(beamsplitter(0.61, 0, 1, 2) *
                             direct_sum(mode_rotation(0.8, 0, 1),
                                        mode_rotation(-0.4, 0, 1)),
                         sigma);
    const auto a = symplectic_eigenvalues(sigma);
    const auto b = symplectic_eigenvalues(rotated);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k)
      CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-10));
  }
}

TEST_CASE("closed-form two-mode eigenvalues match the generic solver") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> diag(1.0, 21.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = diag(gen), b = diag(gen);
    const double c = unit(gen) * std::sqrt((a - 1.0) * (b - 1.0));
    const auto [nu1, nu2] = two_mode_symplectic_eigenvalues(a, b, c);
    if (nu2 < 1.0) continue;  // stay on physical states
    const auto nus = symplectic_eigenvalues(standard_form(a, b, c));
    REQUIRE(nus.size() == 2);
    const double hi = std::max(nu1, nu2), lo = std::min(nu1, nu2);
    CHECK(std::abs(nus[0] - hi) < 1e-10);
    CHECK(std::abs(nus[1] - lo) < 1e-10);
  }
}

TEST_CASE("closed form rejects non-physical off-diagonal weight") {
  CHECK_THROWS_AS(two_mode_symplectic_eigenvalues(1.0, 1.0, 1.1),
                  physicality_error);
}

TEST_CASE("entropy kernel g") {
  CHECK(g_entropy(1.0) == 0.0);
  CHECK(g_entropy(1.0 + 1e-13) == 0.0);  // continuity threshold
  CHECK(g_entropy(3.0) == doctest::Approx(2.0).epsilon(1e-14));
  // g(nu) ~ log2(nu e / 2) for large nu.
  CHECK(g_entropy(200.0) ==
        doctest::Approx(std::log2(200.0 * std::exp(1.0) / 2.0)).epsilon(1e-3));
  CHECK_THROWS_AS(g_entropy(0.9), physicality_error);
}

TEST_CASE("von Neumann entropy of thermal states") {
  Matd thermal = 3.0 * Matd::Identity(2, 2);
  CHECK(von_neumann_entropy(thermal) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(Matd::Identity(4, 4)) == 0.0);
}

TEST_CASE("physicality check") {
  CHECK(is_physical(Matd::Identity(4, 4)));
  CHECK(is_physical(standard_form(2.0, 2.0, std::sqrt(3.0))));
  CHECK_FALSE(is_physical(0.5 * Matd::Identity(2, 2)));
}

TEST_CASE("drop_mode returns the marginal block") {
  std::mt19937_64 gen(99);
  const Matd sigma = random_two_mode_state(gen);
  const Matd a = drop_mode(sigma, 1);
  CHECK((a - sigma.block<2, 2>(0, 0)).norm() == 0.0);
  const Matd b = drop_mode(sigma, 0);
  CHECK((b - sigma.block<2, 2>(2, 2)).norm() == 0.0);
  CHECK_THROWS_AS(drop_mode(sigma, 2), dimension_error);
}

TEST_CASE("partial homodyne on a two-mode squeezed state") {
  // Standard form (v, v, sqrt(v^2-1)): measuring q of mode B leaves mode A
  // with Var(q) = 1/v and Var(p) = v.
  const double v = 4.0;
  const Matd sigma = standard_form(v, v, std::sqrt(v * v - 1.0));
  const Matd after = partial_homodyne(sigma, 1, Quadrature::q);
  REQUIRE(after.rows() == 2);
  CHECK(after(0, 0) == doctest::Approx(1.0 / v).epsilon(1e-12));
  CHECK(after(1, 1) == doctest::Approx(v).epsilon(1e-12));
  CHECK(after(0, 1) == doctest::Approx(0.0));

  const Matd after_p = partial_homodyne(sigma, 1, Quadrature::p);
  CHECK(after_p(0, 0) == doctest::Approx(v).epsilon(1e-12));
  CHECK(after_p(1, 1) == doctest::Approx(1.0 / v).epsilon(1e-12));
}

TEST_CASE("partial homodyne rejects degenerate measured variance") {
  Matd sigma = Matd::Identity(4, 4);
  sigma(2, 2) = 1e-14;
  CHECK_THROWS_AS(partial_homodyne(sigma, 1, Quadrature::q), error);
}

TEST_CASE("partial heterodyne on a two-mode squeezed state gives vacuum") {
  const double v = 6.0;
  const Matd sigma = standard_form(v, v, std::sqrt(v * v - 1.0));
  const Matd after = partial_heterodyne(sigma, 1);
  CHECK((after - Matd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("heterodyne equals beamsplit plus two ordered homodynes") {
  std::mt19937_64 gen(314159);
  for (int i = 0; i < 200; ++i) {
    const Matd sigma = random_two_mode_state(gen);
    const Matd direct = partial_heterodyne(sigma, 1);

    const Matd split = apply_symplectic(beamsplitter(0.5, 1, 2, 3),
                                        direct_sum(sigma, Matd::Identity(2, 2)));
    // q on the first output arm, then p on the second.
    Matd step = partial_homodyne(split, 1, Quadrature::q);
    Matd qp = partial_homodyne(step, 1, Quadrature::p);
    // p on the second output arm, then q on the first.
    step = partial_homodyne(split, 2, Quadrature::p);
    Matd pq = partial_homodyne(step, 1, Quadrature::q);

    CHECK((qp - direct).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pq - direct).cwiseAbs().maxCoeff() < 1e-10);
  }
}
