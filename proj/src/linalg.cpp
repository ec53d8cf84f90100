#include "splitring/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>

#include "splitring/error.hpp"

namespace splitring {

Matrix2 block_extract(const Matrix6& u, ModePair row, ModePair col) {
  return u.block<2, 2>(first_index(row), first_index(col));
}

void block_insert(Matrix6& u, ModePair row, ModePair col, const Matrix2& block) {
  u.block<2, 2>(first_index(row), first_index(col)) = block;
}

void embed_pair(Matrix6& u, Mode a, Mode b, const Matrix2& m) {
  const int ia = index(a);
  const int ib = index(b);
  u(ia, ia) = m(0, 0);
  u(ia, ib) = m(0, 1);
  u(ib, ia) = m(1, 0);
  u(ib, ib) = m(1, 1);
}

double condition_number(const Matrix2& a) {
  // Singular values from the eigenvalues of A^H A.
  const double fro2 = a.squaredNorm();
  const double det = std::abs(a.determinant());
  if (det == 0.0) return std::numeric_limits<double>::infinity();
  const double half = 0.5 * fro2;
  const double disc = std::sqrt(std::max(0.0, half * half - det * det));
  const double smax2 = half + disc;
  return smax2 / det;
}

Vector2 solve_2x2(const Matrix2& a, const Vector2& b, double condition_cap) {
  const double det = std::abs(a.determinant());
  if (!(det >= tol::kTinyDeterminant)) {
    throw Error(ErrorKind::SingularSystem, "2x2 system has vanishing determinant");
  }
  const double cond = condition_number(a);
  if (!(cond <= condition_cap)) {
    std::ostringstream os;
    os << "2x2 system condition number " << cond << " exceeds cap " << condition_cap;
    throw Error(ErrorKind::SingularSystem, os.str());
  }

  // Gaussian elimination with row pivoting.
  int p = std::abs(a(0, 0)) >= std::abs(a(1, 0)) ? 0 : 1;
  int o = 1 - p;
  const Complex l = a(o, 0) / a(p, 0);
  const Complex u11 = a(o, 1) - l * a(p, 1);
  const Complex y1 = b(o) - l * b(p);
  Vector2 x;
  x(1) = y1 / u11;
  x(0) = (b(p) - a(p, 1) * x(1)) / a(p, 0);
  return x;
}

Matrix2 left_divide(const Matrix2& a, const Matrix2& b, double condition_cap) {
  Matrix2 out;
  out.col(0) = solve_2x2(a, b.col(0), condition_cap);
  out.col(1) = solve_2x2(a, b.col(1), condition_cap);
  return out;
}

namespace {

template <int N>
double defect(const Eigen::Matrix<Complex, N, N>& m) {
  const Eigen::Matrix<Complex, N, N> g =
      m.adjoint() * m - Eigen::Matrix<Complex, N, N>::Identity();
  return g.cwiseAbs().maxCoeff();
}

template <int N>
Eigen::Matrix<Complex, N, N> sqrt_unitary(const Eigen::Matrix<Complex, N, N>& m) {
  using Mat = Eigen::Matrix<Complex, N, N>;
  const double d = defect<N>(m);
  if (!(d <= tol::kSqrtUnitaryInput)) {
    std::ostringstream os;
    os << "matrix square root requires a unitary input (defect " << d << ")";
    throw Error(ErrorKind::NotUnitary, os.str());
  }
  // A unitary matrix is normal, so its Schur form is diagonal up to rounding.
  Eigen::ComplexSchur<Mat> schur(m, true);
  const Mat& tri = schur.matrixT();
  const Mat& q = schur.matrixU();
  Mat root_diag = Mat::Zero();
  for (int i = 0; i < N; ++i) {
    Complex ev = tri(i, i);
    if (std::abs(ev + 1.0) < tol::kBranchCut) {
      throw Error(ErrorKind::BranchAmbiguity,
                  "eigenvalue at -1: principal square root is ambiguous");
    }
    ev /= std::abs(ev);
    root_diag(i, i) = std::polar(1.0, 0.5 * std::arg(ev));
  }
  return q * root_diag * q.adjoint();
}

}  // namespace

double unitarity_defect(const Matrix2& m) { return defect<2>(m); }
double unitarity_defect(const Matrix6& m) { return defect<6>(m); }

Matrix2 principal_sqrt_unitary(const Matrix2& m) {
  const double d = defect<2>(m);
  if (!(d <= tol::kSqrtUnitaryInput)) {
    std::ostringstream os;
    os << "matrix square root requires a unitary input (defect " << d << ")";
    throw Error(ErrorKind::NotUnitary, os.str());
  }
  // sqrt(M) = (M + s1 s2 I) / (s1 + s2) with s_i the principal roots of the
  // eigenvalues; s1 + s2 only vanishes on the excluded -1 branch cut.
  const Complex tr = m.trace();
  const Complex disc = std::sqrt(tr * tr - 4.0 * m.determinant());
  Complex roots[2] = {0.5 * (tr + disc), 0.5 * (tr - disc)};
  for (auto& ev : roots) {
    if (std::abs(ev + 1.0) < tol::kBranchCut) {
      throw Error(ErrorKind::BranchAmbiguity,
                  "eigenvalue at -1: principal square root is ambiguous");
    }
    ev = std::polar(1.0, 0.5 * std::arg(ev / std::abs(ev)));
  }
  return (m + roots[0] * roots[1] * Matrix2::Identity()) / (roots[0] + roots[1]);
}
Matrix6 principal_sqrt_unitary(const Matrix6& m) { return sqrt_unitary<6>(m); }

}  // namespace splitring
