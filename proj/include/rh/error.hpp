#pragma once

#include <stdexcept>
#include <string>

namespace rh {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RH_DEFINE_ERROR(Name)          \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

RH_DEFINE_ERROR(DecodeError);
RH_DEFINE_ERROR(EncodeError);
RH_DEFINE_ERROR(ParseError);
RH_DEFINE_ERROR(IoError);
RH_DEFINE_ERROR(EmptyDatabase);
RH_DEFINE_ERROR(DuplicateId);
RH_DEFINE_ERROR(InvalidScale);
RH_DEFINE_ERROR(InvalidArgument);
RH_DEFINE_ERROR(DonorTooSmall);
RH_DEFINE_ERROR(NoFakeQueries);
RH_DEFINE_ERROR(DegenerateLabels);
RH_DEFINE_ERROR(EmptyInput);
RH_DEFINE_ERROR(MissingFile);

#undef RH_DEFINE_ERROR

}  // namespace rh
