#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmgl {

enum class Errc {
  // graph-core
  MalformedRecord,
  MissingEmbedding,
  UnknownLabel,
  BadRatios,
  InvalidNode,
  // numerics / files
  ShapeMismatch,
  LabelOutOfRange,
  NonFiniteGradient,
  NonFinite,
  MalformedFile,
  TruncatedFile,
  Io,
  InvalidArgument,
  // encoders
  ModalityUnavailable,
  DegenerateBatch,
  EmptyTrainSet,
  // vlm-client
  Timeout,
  RateLimited,
  HttpError,
  MalformedResponse,
  ImageUnreadable,
  // vlm-pipelines
  UnboundSlot,
  UnknownDomain,
  NoImage,
  MissingImage,
  MissingDescription,
  EmptyInput,
  Ambiguous,
  Unparseable,
  // harness
  LengthMismatch,
  Empty,
  MissingGroup,
  ConfigInvalid,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so callers
/// (and the CLI's exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mmgl
