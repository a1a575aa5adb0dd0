#include "dsw/error.hpp"

namespace dsw {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::MalformedHeader: return "MalformedHeader";
        case Errc::UnknownSpeaker: return "UnknownSpeaker";
        case Errc::BadTimestamp: return "BadTimestamp";
        case Errc::MissingColumn: return "MissingColumn";
        case Errc::NonBinaryLabel: return "NonBinaryLabel";
        case Errc::DuplicateSession: return "DuplicateSession";
        case Errc::UnlabeledSession: return "UnlabeledSession";
        case Errc::BadSpec: return "BadSpec";
        case Errc::BadArgs: return "BadArgs";
        case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
        case Errc::EmptyTestSet: return "EmptyTestSet";
        case Errc::SingleClassTraining: return "SingleClassTraining";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::UnknownFeatureKey: return "UnknownFeatureKey";
        case Errc::MissingManifest: return "MissingManifest";
        case Errc::IoError: return "IoError";
    }
    return "UnknownError";
}

std::string Error::format(Errc code, const std::string& message, long row) {
    std::string out = errc_name(code);
    out += ": ";
    out += message;
    if (row >= 0) {
        out += " (row ";
        out += std::to_string(row);
        out += ")";
    }
    return out;
}

}  // namespace dsw
