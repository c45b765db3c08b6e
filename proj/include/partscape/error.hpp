#pragma once

#include <stdexcept>
#include <string>

namespace partscape {

/// Coarse failure class, used by the CLI to pick an exit code.
enum class ErrorCategory { config, data, numeric, io };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ErrorCategory category() const noexcept = 0;

    /// Pipeline stage that raised the error, empty outside the pipeline.
    const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

private:
    std::string stage_;
};

#define PARTSCAPE_DEFINE_ERROR(Name, Category)                                   \
    class Name : public Error {                                                  \
    public:                                                                      \
        using Error::Error;                                                      \
        ErrorCategory category() const noexcept override { return Category; }    \
    };

// Bad arguments or configuration values.
PARTSCAPE_DEFINE_ERROR(ParameterError, ErrorCategory::config)
// Malformed input files.
PARTSCAPE_DEFINE_ERROR(ParseError, ErrorCategory::data)
// Well-formed input that cannot be used (too few rows, mismatched sizes...).
PARTSCAPE_DEFINE_ERROR(InputError, ErrorCategory::data)
// A Partition invariant does not hold (label out of range, empty cluster).
PARTSCAPE_DEFINE_ERROR(InvariantError, ErrorCategory::data)
PARTSCAPE_DEFINE_ERROR(DimensionError, ErrorCategory::data)
PARTSCAPE_DEFINE_ERROR(ScaleError, ErrorCategory::config)
PARTSCAPE_DEFINE_ERROR(ContractError, ErrorCategory::data)
PARTSCAPE_DEFINE_ERROR(EmptyClusterError, ErrorCategory::data)
PARTSCAPE_DEFINE_ERROR(NumericError, ErrorCategory::numeric)
PARTSCAPE_DEFINE_ERROR(ConsistencyError, ErrorCategory::numeric)
PARTSCAPE_DEFINE_ERROR(BalanceError, ErrorCategory::numeric)
PARTSCAPE_DEFINE_ERROR(UndefinedError, ErrorCategory::numeric)
PARTSCAPE_DEFINE_ERROR(IoError, ErrorCategory::io)

#undef PARTSCAPE_DEFINE_ERROR

/// Process exit code for a failure category.
inline int exit_code(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::data: return 3;
        case ErrorCategory::numeric: return 4;
        case ErrorCategory::io: return 5;
    }
    return 1;
}

}  // namespace partscape
