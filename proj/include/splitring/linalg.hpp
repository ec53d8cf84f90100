#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/LU>

namespace splitring {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix<Complex, 2, 2>;
using Matrix6 = Eigen::Matrix<Complex, 6, 6>;
using Vector2 = Eigen::Matrix<Complex, 2, 1>;
using Vector6 = Eigen::Matrix<Complex, 6, 1>;

/// Ordering of the six modes of the scattering matrix: ring, bus and loss,
/// each with a forward and a backward component.
enum class Mode : int {
  RingFwd = 0,
  RingBwd = 1,
  BusFwd = 2,
  BusBwd = 3,
  LossFwd = 4,
  LossBwd = 5,
};

/// A (forward, backward) pair of modes; selects a 2x2 block of a Matrix6.
enum class ModePair : int { Ring = 0, Bus = 1, Loss = 2 };

constexpr int index(Mode m) { return static_cast<int>(m); }
constexpr int first_index(ModePair p) { return 2 * static_cast<int>(p); }

namespace tol {
inline constexpr double kUnitarity = 1e-12;
inline constexpr double kSolveResidual = 1e-12;
inline constexpr double kSqrtRoundTrip = 1e-10;
inline constexpr double kSqrtUnitaryInput = 1e-10;
inline constexpr double kBranchCut = 1e-9;
inline constexpr double kConditionCap = 1e12;
inline constexpr double kTinyDeterminant = 1e-300;
}  // namespace tol

Matrix2 block_extract(const Matrix6& u, ModePair row, ModePair col);
void block_insert(Matrix6& u, ModePair row, ModePair col, const Matrix2& block);

/// Places a 2x2 sub-matrix on modes (a, b) of an identity-initialised 6x6:
/// m(0,0) -> (a,a), m(0,1) -> (a,b), m(1,0) -> (b,a), m(1,1) -> (b,b).
void embed_pair(Matrix6& u, Mode a, Mode b, const Matrix2& m);

/// 2-norm condition number of a 2x2 matrix (infinity when singular).
double condition_number(const Matrix2& a);

/// Solves a x = b with partial pivoting. Throws SingularSystem when |det a|
/// is below 1e-300 or the condition number exceeds `condition_cap`.
Vector2 solve_2x2(const Matrix2& a, const Vector2& b,
                  double condition_cap = tol::kConditionCap);

/// Applies (a)^-1 to every column of b.
Matrix2 left_divide(const Matrix2& a, const Matrix2& b,
                    double condition_cap = tol::kConditionCap);

/// max_ij |(M^H M - I)_ij|
double unitarity_defect(const Matrix2& m);
double unitarity_defect(const Matrix6& m);

/// Principal square root of a unitary matrix. Eigenvalue arguments are taken
/// in (-pi, pi] and halved, so the result's spectrum lies in (-pi/2, pi/2].
/// Throws NotUnitary if the input is not unitary to 1e-10 and
/// BranchAmbiguity if an eigenvalue sits within 1e-9 of -1.
Matrix2 principal_sqrt_unitary(const Matrix2& m);
Matrix6 principal_sqrt_unitary(const Matrix6& m);

}  // namespace splitring
