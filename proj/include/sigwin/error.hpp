#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sigwin {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyImage,
  kEmptyFragment,
  kDimensionMismatch,
  kIo,
  kFormat,
  kNoFragments,
  kEmptyRegistry,
  kUnknownWriter,
  kConfigMismatch,
  kEmptyScores,
  kLayout,
  kInsufficientSamples,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sigwin
