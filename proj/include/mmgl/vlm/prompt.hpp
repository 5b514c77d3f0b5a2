#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mmgl {

struct TextSegment {
  std::string text;
  friend bool operator==(const TextSegment&, const TextSegment&) = default;
};

struct ImageSegment {
  std::filesystem::path path;
  friend bool operator==(const ImageSegment&, const ImageSegment&) = default;
};

using PromptSegment = std::variant<TextSegment, ImageSegment>;

/// Ordered interleaving of text and images for one user turn, plus an
/// optional system message.
struct PromptBundle {
  std::optional<std::string> system;
  std::vector<PromptSegment> segments;

  PromptBundle& text(std::string t);
  PromptBundle& image(std::filesystem::path p);

  /// Throws InvalidArgument when there are no segments.
  void validate() const;
  /// Text with each image replaced by `image_marker`.
  std::string flatten(const std::string& image_marker = "<image>") const;
  std::vector<std::filesystem::path> image_paths() const;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

}  // namespace mmgl
