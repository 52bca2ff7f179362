#pragma once

#include <stdexcept>
#include <string>

namespace adacp {

// Root of all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration/inputs detected before any real work (CLI exit code 2).
struct ValidationError : Error {
    using Error::Error;
};

// Oracle-side failures (CLI exit code 4).
struct OracleError : Error {
    using Error::Error;
};

struct BudgetExhausted : OracleError {
    using OracleError::OracleError;
};
struct ExternalOracleFailure : OracleError {
    using OracleError::OracleError;
};

struct DegenerateWindow : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct AllCandidatesSkipped : Error {
    using Error::Error;
};
struct EmptySampleSet : Error {
    using Error::Error;
};
struct InvalidStageCount : ValidationError {
    using ValidationError::ValidationError;
};
struct MissingQuantiles : Error {
    using Error::Error;
};
struct InsufficientReps : ValidationError {
    using ValidationError::ValidationError;
};
struct PlanMismatch : Error {
    using Error::Error;
};
struct StageUnderflow : Error {
    using Error::Error;
};
struct HorizonOverflow : Error {
    using Error::Error;
};

}  // namespace adacp
