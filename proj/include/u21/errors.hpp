#pragma once

#include <stdexcept>
#include <string>

namespace u21 {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroDivision : Error { using Error::Error; };
struct ZeroArgument : Error { using Error::Error; };
struct PrecisionExhausted : Error { using Error::Error; };
struct ConstraintViolation : Error { using Error::Error; };
struct NotInK : Error { using Error::Error; };
struct NotInFiltration : Error { using Error::Error; };
struct EnumerationTooLarge : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct IdentityFails : Error { using Error::Error; };
struct IncompatibleCharacters : Error { using Error::Error; };
struct DegenerateValueMismatch : Error { using Error::Error; };
struct NotProportional : Error { using Error::Error; };
struct UnsupportedTAction : Error { using Error::Error; };
struct NotDegenerate : Error { using Error::Error; };
struct LevelTooLarge : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };

} // namespace u21
