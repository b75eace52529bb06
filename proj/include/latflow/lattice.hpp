#pragma once

#include <array>
#include <cstdint>

#include "latflow/flow.hpp"
#include "latflow/linalg.hpp"
#include "latflow/scalar.hpp"

namespace latflow {

/// A lattice in R^3 given by basis columns diag(e^{row_log}) * unscaled.
///
/// `unscaled` is held exactly (its entries are rationals or dyadic floats);
/// the row scales carry the exponentials of g_t so that large t never
/// overflows and cancellation inside a row happens in exact arithmetic.
struct LatticeBasis3 {
  Matrix3 unscaled = Matrix3::identity();
  std::array<double, 3> row_log{};
  /// Float mode for reported lengths.
  ModeSpec eval_mode = ModeSpec::f64();

  static LatticeBasis3 from_matrix(const Matrix3d& basis);
  static LatticeBasis3 from_matrix(const Matrix3& basis);
  /// g_t phi_{a,b}(s) Z^3.
  static LatticeBasis3 orbit(const LineSegmentSpec& line, const Scalar& s, const FlowTime& t);

  /// Effective basis times an integer transform, each entry correctly rounded.
  Matrix3d effective(const IntMatrix3& transform = IntMatrix3::identity()) const;
  /// Effective coordinates of the lattice vector with integer coefficients c.
  Vec3<Scalar> vector(const IntegerVec3& c) const;
  Scalar sup_norm(const IntegerVec3& c) const;
  double log_det() const;
};

struct GramSchmidt {
  Matrix3d mu = Matrix3d::identity();
  std::array<double, 3> sq_norms{};
  std::array<double, 3> lengths() const;
};

/// Euclidean Gram-Schmidt of the columns; throws PrecisionError on a
/// numerically singular basis.
GramSchmidt gram_schmidt(const Matrix3d& basis);

struct LLLResult {
  Matrix3d basis;
  IntMatrix3 transform = IntMatrix3::identity();
  long iterations = 0;
};

constexpr double kLLLDelta = 0.99;
/// Size reduction applies only when |mu| exceeds this, so rounding noise at
/// mu = 1/2 cannot make refinement passes cycle.
constexpr double kSizeReductionEta = 0.51;
constexpr long kLLLIterationCap = 100000;

/// LLL on the columns of `basis`: reduced = basis * transform.
LLLResult lll_reduce(const Matrix3d& basis, double delta = kLLLDelta);
/// Reduction with exact refinement: after each pass the effective basis is
/// rebuilt from the exact data and reduced again until nothing changes.
LLLResult lll_reduce(const LatticeBasis3& basis, double delta = kLLLDelta);

struct ShortVectorResult {
  /// Integer coefficients with respect to the input basis.
  IntegerVec3 vector;
  Scalar lambda1;
  bool certified = false;
  /// True when the computation had to move to 256-bit floats.
  bool escalated = false;
};

/// The sup-norm first minimum. With `certify` the enumeration is complete;
/// otherwise the shortest LLL column is returned.
ShortVectorResult shortest_vector(const LatticeBasis3& basis, bool certify = true);
ShortVectorResult shortest_vector(const Matrix3d& basis, bool certify = true);

constexpr std::uint64_t kCountBudget = 10'000'000;

/// #{v in lattice, v != 0, |v|_inf <= r}.
std::uint64_t count_points(const LatticeBasis3& basis, double r, std::uint64_t budget = kCountBudget);
std::uint64_t count_points(const Matrix3d& basis, double r, std::uint64_t budget = kCountBudget);

/// lambda1 >= delta.
bool in_K_delta(const LatticeBasis3& basis, const Scalar& delta);
bool in_K_delta(const Matrix3d& basis, double delta);

}  // namespace latflow
