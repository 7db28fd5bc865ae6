#pragma once

#include <stdexcept>
#include <string>

namespace ldslab {

class LabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LDSLAB_ERROR(Name)               \
  class Name : public LabError {         \
   public:                               \
    using LabError::LabError;            \
  }

LDSLAB_ERROR(BadParameter);
LDSLAB_ERROR(SpectralRadiusViolation);
LDSLAB_ERROR(ShortTrajectory);
LDSLAB_ERROR(IndexOutOfRange);
LDSLAB_ERROR(NonConvergent);
LDSLAB_ERROR(UnsupportedSpec);
LDSLAB_ERROR(SingularCovariance);
LDSLAB_ERROR(SingularGram);
LDSLAB_ERROR(DegenerateRows);
LDSLAB_ERROR(NotOrthogonal);
LDSLAB_ERROR(TooLarge);
LDSLAB_ERROR(InsufficientPoints);
LDSLAB_ERROR(StatisticNotRegistered);
LDSLAB_ERROR(UnknownFigure);
LDSLAB_ERROR(GridTooLarge);
LDSLAB_ERROR(FormatError);

#undef LDSLAB_ERROR

}  // namespace ldslab
