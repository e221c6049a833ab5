#pragma once

#include <Eigen/Core>

#include "ci/scalar.hpp"

// Minimal NumTraits so dense Eigen types can carry exact scalars
// (bracket tables, the exterior-algebra matrices in the tests).  Only
// ring operations are used on such matrices; nothing here enables
// decompositions.
namespace Eigen {

template <>
struct NumTraits<ci::Scalar> : GenericNumTraits<ci::Scalar> {
  typedef ci::Scalar Real;
  typedef ci::Scalar NonInteger;
  typedef ci::Scalar Nested;
  typedef ci::Scalar Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 32,
    MulCost = 64,
  };
  static inline Real epsilon() { return ci::Scalar(0); }
  static inline Real dummy_precision() { return ci::Scalar(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
