#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cutl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

#define CUTL_DEFINE_ERROR(Name)                \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    };

CUTL_DEFINE_ERROR(InvalidArgument)
CUTL_DEFINE_ERROR(SourceForbidden)
CUTL_DEFINE_ERROR(InvalidDecomposition)
CUTL_DEFINE_ERROR(TooLarge)
CUTL_DEFINE_ERROR(NotChordal)
CUTL_DEFINE_ERROR(NotStrictAncestor)
CUTL_DEFINE_ERROR(NotAncestor)
CUTL_DEFINE_ERROR(CycleDetected)
CUTL_DEFINE_ERROR(ClosureBudgetExceeded)
CUTL_DEFINE_ERROR(ArityMismatch)
CUTL_DEFINE_ERROR(AdhesionTooLarge)
CUTL_DEFINE_ERROR(CertificationFailed)
CUTL_DEFINE_ERROR(ImageError)
CUTL_DEFINE_ERROR(GenerationExhausted)
CUTL_DEFINE_ERROR(FailureBudget)

#undef CUTL_DEFINE_ERROR

}  // namespace cutl
