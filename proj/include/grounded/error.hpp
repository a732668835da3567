#pragma once

#include <stdexcept>
#include <string>

namespace grounded {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define GROUNDED_ERROR(Name)            \
  struct Name : Error {                 \
    using Error::Error;                 \
  }

GROUNDED_ERROR(ActionUnavailable);
GROUNDED_ERROR(PlacementBlocked);
GROUNDED_ERROR(PlacementInfeasible);
GROUNDED_ERROR(UnknownObject);
GROUNDED_ERROR(InvalidAction);
GROUNDED_ERROR(DimensionMismatch);
GROUNDED_ERROR(PropertyMismatch);
GROUNDED_ERROR(UntrainedComposition);
GROUNDED_ERROR(MissingBinding);
GROUNDED_ERROR(ClosedClassCollision);
GROUNDED_ERROR(DuplicateKey);
GROUNDED_ERROR(IndexOutOfRange);
GROUNDED_ERROR(PopUnachieved);
GROUNDED_ERROR(ReplayDivergence);
GROUNDED_ERROR(SessionClosed);
GROUNDED_ERROR(FormatError);
GROUNDED_ERROR(AssertionFailure);

#undef GROUNDED_ERROR

}  // namespace grounded
