#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmgl/vlm/prompt.hpp"

namespace mmgl {

enum class Domain { movies, toys, grocery, cds, arts, reddit };

enum class TemplateKind {
  image_description,
  aligner_summary,
  aligner_summary_structural,
  predictor,
  predictor_structural,
};

std::string_view domain_name(Domain d) noexcept;
/// Throws UnknownDomain.
Domain parse_domain(std::string_view name);
std::string_view template_kind_name(TemplateKind k) noexcept;
TemplateKind parse_template_kind(std::string_view name);

inline constexpr Domain kAllDomains[] = {Domain::movies, Domain::toys,  Domain::grocery,
                                         Domain::cds,    Domain::arts,  Domain::reddit};
inline constexpr TemplateKind kAllTemplateKinds[] = {
    TemplateKind::image_description, TemplateKind::aligner_summary,
    TemplateKind::aligner_summary_structural, TemplateKind::predictor,
    TemplateKind::predictor_structural};

/// Marker standing in for an attached image when a prompt is shown as text.
inline constexpr std::string_view kImageInputMarker = "<image input>";

struct PromptTemplate {
  Domain domain = Domain::movies;
  TemplateKind kind = TemplateKind::image_description;
};

/// Which neighbor attributes a structural predictor prompt lists.
enum class NeighborFields { text, image, both };

struct NeighborSlot {
  std::string text;
  std::filesystem::path image;
};

/// Values substituted into a template. Text slots are inserted verbatim.
struct TemplateBindings {
  std::optional<std::string> text_information;
  std::optional<std::string> image_summary;
  /// Structural aligner only; leaving both unbound selects the fallback sentence.
  std::optional<std::string> neighbor_text;
  std::optional<std::string> neighbor_image_summary;
  std::optional<std::string> candidates;
  /// Predictor kinds only; appends the supervised answer line.
  std::optional<std::string> truth_label;
  /// Target image for the description and predictor kinds.
  std::filesystem::path image;
  /// Structural predictor only, in presentation order. Empty drops the neighbor line.
  std::vector<NeighborSlot> neighbors;
  NeighborFields neighbor_fields = NeighborFields::both;
};

/// Interleaved text and image segments. Throws UnboundSlot.
PromptBundle render_bundle(const PromptTemplate& tmpl, const TemplateBindings& bindings);
/// render_bundle flattened with kImageInputMarker in place of each image.
std::string render_template(const PromptTemplate& tmpl, const TemplateBindings& bindings);

/// Bindings that reproduce the template text with every slot shown as its
/// placeholder, e.g. "<text information>".
TemplateBindings placeholder_bindings(TemplateKind kind, bool with_neighbors = true);

/// Candidate list as it appears in predictor prompts.
std::string join_candidates(const std::vector<std::string>& names);

}  // namespace mmgl
