#include "latflow/linalg.hpp"

#include "latflow/error.hpp"

namespace latflow {

Matrix3 convert(const Matrix3& a, const ModeSpec& mode) {
  Matrix3 out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = a.m[i].convert(mode);
  return out;
}

Matrix3d to_double(const Matrix3& a) {
  Matrix3d out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = a.m[i].to_double();
  return out;
}

Matrix3 to_scalar(const Matrix3d& a) {
  Matrix3 out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = Scalar(a.m[i]);
  return out;
}

std::string IntegerVec3::to_string() const {
  return "(" + p1.get_str() + ", " + p2.get_str() + ", " + q.get_str() + ")";
}

IntegerVec3 make_ivec(std::int64_t p1, std::int64_t p2, std::int64_t q) {
  return {mpz_class(static_cast<long>(p1)), mpz_class(static_cast<long>(p2)), mpz_class(static_cast<long>(q))};
}

std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw InvalidInput("integer " + z.get_str() + " exceeds 64 bits");
  return z.get_si();
}

}  // namespace latflow
