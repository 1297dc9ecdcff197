#pragma once

#include <stdexcept>
#include <string>

namespace mzi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MZI_DEFINE_ERROR(Name)                                \
    class Name : public Error {                               \
    public:                                                   \
        explicit Name(const std::string& what) : Error(what) {} \
    }

MZI_DEFINE_ERROR(NoSignChange);
MZI_DEFINE_ERROR(InvalidInterval);
MZI_DEFINE_ERROR(InvalidOutcome);
MZI_DEFINE_ERROR(InvalidScheme);
MZI_DEFINE_ERROR(InvalidConfig);
MZI_DEFINE_ERROR(AlphabetMismatch);
MZI_DEFINE_ERROR(SchemeNotBinary);
MZI_DEFINE_ERROR(DegenerateSignal);
MZI_DEFINE_ERROR(NoSolution);
MZI_DEFINE_ERROR(NoFringe);
MZI_DEFINE_ERROR(NonMonotoneBranch);

#undef MZI_DEFINE_ERROR

}  // namespace mzi
