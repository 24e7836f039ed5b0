#pragma once

#include <stdexcept>
#include <string>

namespace carc {

// Base for everything thrown by this library, so callers can catch one type
// at the CLI boundary and map it to an exit code.
struct CarcError : std::runtime_error {
    explicit CarcError(const std::string& msg) : std::runtime_error(msg) {}
};

// grid layer
struct OverlapError : CarcError { using CarcError::CarcError; };
struct MismatchError : CarcError { using CarcError::CarcError; };

// transform layer
struct InvalidTransform : CarcError { using CarcError::CarcError; };

// episode generation
struct GenerationExhausted : CarcError { using CarcError::CarcError; };
struct DuplicateBudgetExceeded : CarcError { using CarcError::CarcError; };

// solver
struct NoExplanation : CarcError { using CarcError::CarcError; };
struct AmbiguousGrammar : CarcError { using CarcError::CarcError; };
struct InconsistentGrammar : CarcError { using CarcError::CarcError; };
struct NoTargetError : CarcError { using CarcError::CarcError; };

// metrics / taxonomy
struct NotAnError : CarcError { using CarcError::CarcError; };

// training
struct NonFiniteLoss : CarcError { using CarcError::CarcError; };

// io / cli
struct IoError : CarcError { using CarcError::CarcError; };
struct UsageError : CarcError { using CarcError::CarcError; };

}  // namespace carc
