#include "mmgl/vlm/prompt.hpp"

#include "mmgl/error.hpp"

namespace mmgl {

PromptBundle& PromptBundle::text(std::string t) {
  segments.emplace_back(TextSegment{std::move(t)});
  return *this;
}

PromptBundle& PromptBundle::image(std::filesystem::path p) {
  segments.emplace_back(ImageSegment{std::move(p)});
  return *this;
}

void PromptBundle::validate() const {
  if (segments.empty()) throw Error(Errc::InvalidArgument, "prompt bundle has no segments");
}

std::string PromptBundle::flatten(const std::string& image_marker) const {
  std::string out;
  for (const auto& s : segments) {
    if (const auto* t = std::get_if<TextSegment>(&s)) {
      out += t->text;
    } else {
      out += image_marker;
    }
  }
  return out;
}

std::vector<std::filesystem::path> PromptBundle::image_paths() const {
  std::vector<std::filesystem::path> out;
  for (const auto& s : segments)
    if (const auto* i = std::get_if<ImageSegment>(&s)) out.push_back(i->path);
  return out;
}

}  // namespace mmgl
