#pragma once

#include <stdexcept>
#include <string>

namespace fulldit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// geometry
struct DegenerateRay : Error { using Error::Error; };
struct EmptyTrajectory : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct InvalidPose : Error { using Error::Error; };

struct ParseError : Error {
    size_t line;
    ParseError(size_t line_no, const std::string& what_arg)
        : Error("line " + std::to_string(line_no) + ": " + what_arg), line(line_no) {}
};

// tokenizer / model
struct ShapeError : Error { using Error::Error; };
struct TooManyIdentities : Error { using Error::Error; };
struct PadTooSmall : Error { using Error::Error; };
struct AllMasked : Error { using Error::Error; };

// diffusion / curriculum
struct EmptyLossMask : Error { using Error::Error; };
struct EmptyPlan : Error { using Error::Error; };
struct DataStarvation : Error { using Error::Error; };

// synthbench
struct OutOfFrame : Error { using Error::Error; };
struct NotFound : Error { using Error::Error; };
struct NeedTwoFrames : Error { using Error::Error; };

// cli
struct IoError : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct MissingCondition : Error { using Error::Error; };
struct PairingError : Error { using Error::Error; };

}  // namespace fulldit
