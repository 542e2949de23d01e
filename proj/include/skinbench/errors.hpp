#pragma once

#include <stdexcept>
#include <string>

namespace skinbench {

/// Base of every error raised by the library. Callers that only need to
/// report failures can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error { using Error::Error; };
class DecodeError : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class EmptyTrainingSet : public Error { using Error::Error; };
class TooFewSamples : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class VersionError : public Error { using Error::Error; };
class EmptyEnsemble : public Error { using Error::Error; };
class NoPositives : public Error { using Error::Error; };
class MissingGroup : public Error { using Error::Error; };
class IncompleteMatrix : public Error { using Error::Error; };
class MissingPrediction : public Error { using Error::Error; };

/// Bad configuration text (ensemble config, manifest). Carries the 1-based
/// line number when one applies, 0 otherwise.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A required input (model, flag, map directory) is missing.
class UsageError : public Error { using Error::Error; };

}  // namespace skinbench
