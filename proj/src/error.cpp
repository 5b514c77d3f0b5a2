#include "mmgl/error.hpp"

namespace mmgl {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::MissingEmbedding: return "MissingEmbedding";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::BadRatios: return "BadRatios";
    case Errc::InvalidNode: return "InvalidNode";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::NonFinite: return "NonFinite";
    case Errc::MalformedFile: return "MalformedFile";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::Io: return "Io";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ModalityUnavailable: return "ModalityUnavailable";
    case Errc::DegenerateBatch: return "DegenerateBatch";
    case Errc::EmptyTrainSet: return "EmptyTrainSet";
    case Errc::Timeout: return "Timeout";
    case Errc::RateLimited: return "RateLimited";
    case Errc::HttpError: return "HttpError";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::ImageUnreadable: return "ImageUnreadable";
    case Errc::UnboundSlot: return "UnboundSlot";
    case Errc::UnknownDomain: return "UnknownDomain";
    case Errc::NoImage: return "NoImage";
    case Errc::MissingImage: return "MissingImage";
    case Errc::MissingDescription: return "MissingDescription";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::Ambiguous: return "Ambiguous";
    case Errc::Unparseable: return "Unparseable";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::Empty: return "Empty";
    case Errc::MissingGroup: return "MissingGroup";
    case Errc::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace mmgl
