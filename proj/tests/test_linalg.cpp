#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "splitring/error.hpp"
#include "splitring/linalg.hpp"
#include "test_support.hpp"

using namespace splitring;

TEST_CASE("block_extract reads forward-first mode pairs") {
  CHECK(block_extract(Matrix6::Identity(), ModePair::Bus, ModePair::Bus) == Matrix2::Identity());

  Matrix6 u;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) u(i, j) = {double(10 * i + j), 0.0};
  const Matrix2 br = block_extract(u, ModePair::Bus, ModePair::Ring);
  CHECK(br(0, 0).real() == 20);
  CHECK(br(0, 1).real() == 21);
  CHECK(br(1, 0).real() == 30);
  CHECK(br(1, 1).real() == 31);
}

TEST_CASE("the nine blocks reassemble the matrix exactly") {
  std::mt19937_64 rng(11);
  const Matrix6 u = test::random_unitary6(rng);
  Matrix6 rebuilt = Matrix6::Zero();
  for (auto r : {ModePair::Ring, ModePair::Bus, ModePair::Loss})
    for (auto c : {ModePair::Ring, ModePair::Bus, ModePair::Loss})
      block_insert(rebuilt, r, c, block_extract(u, r, c));
  CHECK(rebuilt == u);
}

TEST_CASE("embed_pair places the 2x2 entries on the named modes") {
  Matrix2 m;
  m << 1.0, 2.0, 3.0, 4.0;
  Matrix6 u = Matrix6::Identity();
  embed_pair(u, Mode::BusFwd, Mode::RingFwd, m);
  CHECK(u(2, 2) == Complex(1.0));
  CHECK(u(2, 0) == Complex(2.0));
  CHECK(u(0, 2) == Complex(3.0));
  CHECK(u(0, 0) == Complex(4.0));
  CHECK(u(1, 1) == Complex(1.0));
}

TEST_CASE("solve_2x2") {
  SUBCASE("identity") {
    const Vector2 x = solve_2x2(Matrix2::Identity(), Vector2(1.0, 0.0));
    CHECK(x(0) == Complex(1.0));
    CHECK(x(1) == Complex(0.0));
  }
  SUBCASE("zero matrix is singular") {
    CHECK_THROWS_AS(solve_2x2(Matrix2::Zero(), Vector2(1.0, 0.0)), Error);
    try {
      solve_2x2(Matrix2::Zero(), Vector2(1.0, 0.0));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularSystem);
    }
  }
  SUBCASE("condition cap") {
    Matrix2 a;
    a << 1.0, 0.0, 0.0, 1e-13;
    CHECK(condition_number(a) == doctest::Approx(1e13));
    CHECK_THROWS_AS(solve_2x2(a, Vector2(1.0, 1.0)), Error);
    CHECK_NOTHROW(solve_2x2(a, Vector2(1.0, 1.0), 1e14));
  }
  SUBCASE("matches the cofactor inverse on random systems") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    int checked = 0;
    for (int k = 0; k < 500; ++k) {
      Matrix2 a;
      a << Complex(n(rng), n(rng)), Complex(n(rng), n(rng)), Complex(n(rng), n(rng)),
          Complex(n(rng), n(rng));
      const Vector2 b(Complex(n(rng), n(rng)), Complex(n(rng), n(rng)));
      if (condition_number(a) > 1e4) continue;
      const Complex det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
      const Vector2 oracle((a(1, 1) * b(0) - a(0, 1) * b(1)) / det,
                           (-a(1, 0) * b(0) + a(0, 0) * b(1)) / det);
      const Vector2 x = solve_2x2(a, b);
      CHECK((x - oracle).norm() <= 1e-12 * oracle.norm());
      ++checked;
    }
    CHECK(checked > 400);
  }
  SUBCASE("multiply-back residual up to condition 1e8") {
    // Rounding x alone costs eps * |A| * |x|, and |x| grows with the condition
    // number, so the residual is bounded relative to |A| |x| rather than |b|.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> expo(0.0, 8.0);
    for (int k = 0; k < 200; ++k) {
      const Matrix2 u = test::random_unitary2(rng);
      const Matrix2 v = test::random_unitary2(rng);
      Matrix2 d = Matrix2::Zero();
      d(0, 0) = 1.0;
      d(1, 1) = std::pow(10.0, -expo(rng));
      const Matrix2 a = u * d * v;
      const Vector2 b = u.col(0) + 0.3 * u.col(1);
      const Vector2 x = solve_2x2(a, b);
      CHECK((a * x - b).norm() <= 1e-15 * x.norm());
    }
  }
  SUBCASE("multiply-back residual relative to b for moderate conditioning") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> expo(0.0, 3.0);
    for (int k = 0; k < 200; ++k) {
      const Matrix2 u = test::random_unitary2(rng);
      const Matrix2 v = test::random_unitary2(rng);
      Matrix2 d = Matrix2::Zero();
      d(0, 0) = 1.0;
      d(1, 1) = std::pow(10.0, -expo(rng));
      const Matrix2 a = u * d * v;
      const Vector2 b = u.col(0) + 0.3 * u.col(1);
      const Vector2 x = solve_2x2(a, b);
      CHECK((a * x - b).norm() <= 1e-12 * b.norm());
    }
  }
}

TEST_CASE("left_divide applies the inverse to each column") {
  std::mt19937_64 rng(8);
  const Matrix2 a = test::random_unitary2(rng) + 0.5 * Matrix2::Identity();
  const Matrix2 b = test::random_unitary2(rng);
  CHECK((a * left_divide(a, b) - b).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("principal square root of unitaries") {
  SUBCASE("identity and a diagonal case") {
    CHECK((principal_sqrt_unitary(Matrix2(Matrix2::Identity())) - Matrix2::Identity()).norm() < 1e-15);
    Matrix2 d = Matrix2::Identity();
    d(0, 0) = std::polar(1.0, test::kPi / 2);
    const Matrix2 s = principal_sqrt_unitary(d);
    CHECK(std::abs(s(0, 0) - std::polar(1.0, test::kPi / 4)) < 1e-15);
    CHECK(std::abs(s(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(s(0, 1)) < 1e-15);
  }
  SUBCASE("squaring oracle, 1000 random 2x2 unitaries") {
    std::mt19937_64 rng(21);
    int done = 0;
    while (done < 1000) {
      const Matrix2 m = test::random_unitary2(rng);
      Eigen::ComplexEigenSolver<Matrix2> es(m);
      bool near_cut = false;
      for (int i = 0; i < 2; ++i) near_cut |= std::abs(es.eigenvalues()(i) + 1.0) < 1e-3;
      if (near_cut) continue;
      const Matrix2 s = principal_sqrt_unitary(m);
      CHECK((s * s - m).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(unitarity_defect(s) < 1e-11);
      Eigen::ComplexEigenSolver<Matrix2> ss(s);
      for (int i = 0; i < 2; ++i) CHECK(ss.eigenvalues()(i).real() >= -1e-12);
      ++done;
    }
  }
  SUBCASE("squaring oracle, random 6x6 unitaries") {
    std::mt19937_64 rng(22);
    int done = 0;
    while (done < 200) {
      const Matrix6 m = test::random_unitary6(rng);
      Eigen::ComplexEigenSolver<Matrix6> es(m);
      if ((es.eigenvalues().array() + 1.0).abs().minCoeff() < 1e-3) continue;
      const Matrix6 s = principal_sqrt_unitary(m);
      CHECK(test::max_abs(s * s - m) < 1e-10);
      CHECK(unitarity_defect(s) < 1e-11);
      ++done;
    }
  }
  SUBCASE("errors") {
    Matrix2 bad = Matrix2::Identity();
    bad(0, 0) = 1.1;
    CHECK_THROWS_AS(principal_sqrt_unitary(bad), Error);
    try {
      principal_sqrt_unitary(bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotUnitary);
    }
    try {
      principal_sqrt_unitary(Matrix2(-Matrix2::Identity()));
      FAIL("expected a branch error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BranchAmbiguity);
    }
    try {
      principal_sqrt_unitary(Matrix6(-Matrix6::Identity()));
      FAIL("expected a branch error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BranchAmbiguity);
    }
  }
}
