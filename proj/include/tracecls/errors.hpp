#pragma once

#include <stdexcept>
#include <string>

namespace tracecls {

// Base for every error raised by the library. The CLI maps these to exit
// code 2; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TRACECLS_DEFINE_ERROR(Name)       \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

TRACECLS_DEFINE_ERROR(SchemaError);
TRACECLS_DEFINE_ERROR(EncodingError);
TRACECLS_DEFINE_ERROR(EmptyTrace);
TRACECLS_DEFINE_ERROR(IoError);
TRACECLS_DEFINE_ERROR(DuplicateSampleId);
TRACECLS_DEFINE_ERROR(EmptyCorpus);
TRACECLS_DEFINE_ERROR(MissingLabel);
TRACECLS_DEFINE_ERROR(EmptyDataset);
TRACECLS_DEFINE_ERROR(UnlabeledRow);
TRACECLS_DEFINE_ERROR(KOutOfRange);
TRACECLS_DEFINE_ERROR(SingleClassData);
TRACECLS_DEFINE_ERROR(NonFiniteCost);
TRACECLS_DEFINE_ERROR(DimensionMismatch);
TRACECLS_DEFINE_ERROR(SingleClassLabels);
TRACECLS_DEFINE_ERROR(TooFewSamples);
TRACECLS_DEFINE_ERROR(UnknownFamily);
TRACECLS_DEFINE_ERROR(InvalidConfig);
TRACECLS_DEFINE_ERROR(FingerprintMismatch);

#undef TRACECLS_DEFINE_ERROR

}  // namespace tracecls
