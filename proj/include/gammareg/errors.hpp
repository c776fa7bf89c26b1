#ifndef GAMMAREG_ERRORS_HPP
#define GAMMAREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gammareg {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument value (non-positive shape, NaN input, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A precondition between caller and callee was broken (dimension mismatch,
// infeasible state handed to a sampler, ...).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

// exp/log left the representable range; carries the offending row when known.
class NumericRangeError : public Error {
public:
    NumericRangeError(const std::string& msg, long row = -1)
        : Error(msg), row_(row) {}
    long row() const noexcept { return row_; }

private:
    long row_;
};

// A matrix that must be SPD failed to factor; carries the failing pivot.
class SingularityError : public Error {
public:
    SingularityError(const std::string& msg, int pivot = -1)
        : Error(msg), pivot_(pivot) {}
    int pivot() const noexcept { return pivot_; }

private:
    int pivot_;
};

// A ridge penalty formula hit a zero denominator (some alpha_j = 0).
class DegeneratePenaltyError : public Error {
public:
    explicit DegeneratePenaltyError(const std::string& msg) : Error(msg) {}
};

// A Gibbs coordinate interval collapsed (lo > hi): the chain state is corrupt.
class InfeasibleStateError : public Error {
public:
    explicit InfeasibleStateError(const std::string& msg) : Error(msg) {}
};

// Feasible-point search gave up.  Distinguishes "not found" from "proved
// empty" through the message only; the search is heuristic.
class FeasibilityError : public Error {
public:
    explicit FeasibilityError(const std::string& msg) : Error(msg) {}
};

// Truncation region carries essentially no normal mass.
class DegenerateTruncationError : public Error {
public:
    explicit DegenerateTruncationError(const std::string& msg) : Error(msg) {}
};

// Degenerate sample (constant column, all-equal responses, ...).
class DegeneracyError : public Error {
public:
    explicit DegeneracyError(const std::string& msg) : Error(msg) {}
};

// Dataset / config file could not be ingested.
class IngestionError : public Error {
public:
    explicit IngestionError(const std::string& msg) : Error(msg) {}
};

} // namespace gammareg

#endif
