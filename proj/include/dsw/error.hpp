#pragma once

#include <stdexcept>
#include <string>

namespace dsw {

enum class Errc {
    MalformedHeader,
    UnknownSpeaker,
    BadTimestamp,
    MissingColumn,
    NonBinaryLabel,
    DuplicateSession,
    UnlabeledSession,
    BadSpec,
    BadArgs,
    EmptyTrainingSet,
    EmptyTestSet,
    SingleClassTraining,
    DimensionMismatch,
    UnknownFeatureKey,
    MissingManifest,
    IoError,
};

const char* errc_name(Errc code);

// All structured failures in the library throw this. `row` is 1-based and
// refers to a data row of the offending input file when the error is
// row-scoped, -1 otherwise.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, long row = -1)
        : std::runtime_error(format(code, message, row)), code_(code), row_(row) {}

    Errc code() const { return code_; }
    long row() const { return row_; }

private:
    static std::string format(Errc code, const std::string& message, long row);

    Errc code_;
    long row_;
};

}  // namespace dsw
