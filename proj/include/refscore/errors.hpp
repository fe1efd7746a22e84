#ifndef REFSCORE_ERRORS_HPP
#define REFSCORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace refscore {

// Coarse error class, mapped to process exit codes by the CLI.
enum class ErrorClass { config = 2, data = 3, runtime = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct ReferentialIntegrityError : Error {
  explicit ReferentialIntegrityError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct DuplicationError : Error {
  explicit DuplicationError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct CannotReplaceError : Error {
  explicit CannotReplaceError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct ConfigurationError : Error {
  explicit ConfigurationError(const std::string& what) : Error(ErrorClass::config, what) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error(ErrorClass::config, what) {}
};
struct LabelLossMismatchError : Error {
  explicit LabelLossMismatchError(const std::string& what) : Error(ErrorClass::config, what) {}
};
struct EncoderUnavailableError : Error {
  explicit EncoderUnavailableError(const std::string& what) : Error(ErrorClass::runtime, what) {}
};
struct MissingEmbeddingError : Error {
  explicit MissingEmbeddingError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct UndefinedCorrelationError : Error {
  explicit UndefinedCorrelationError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct UndefinedScoreError : Error {
  explicit UndefinedScoreError(const std::string& what) : Error(ErrorClass::data, what) {}
};
struct IncompatibleModelError : Error {
  explicit IncompatibleModelError(const std::string& what) : Error(ErrorClass::data, what) {}
};

}  // namespace refscore

#endif  // REFSCORE_ERRORS_HPP
