#include "mmgl/pipelines/templates.hpp"

#include "mmgl/error.hpp"

namespace mmgl {
namespace {

struct DomainWords {
  std::string_view image_item;       // "a movie"
  std::string_view image_source;     // dataset phrase before ", generate"
  std::string_view summary_source;   // dataset name in the plain aligner prompt
  std::string_view structural_source;
};

DomainWords words_for(Domain d) {
  switch (d) {
    case Domain::movies:
      return {"a movie", "Amazon movies dataset ", "Amazon Movies", "Amazon movies"};
    case Domain::toys:
      return {"a toy", "Amazon toys dataset ", "Amazon toys", "Amazon toys"};
    case Domain::grocery:
      return {"a grocery", "Amazon grocery dataset ", "Amazon grocery", "Amazon grocery"};
    case Domain::cds:
      return {"a CD", "Amazon CD dataset ", "Amazon CD", "Amazon CD"};
    case Domain::arts:
      return {"an artwork", "Amazon Art dataset ", "Amazon Art", "Amazon Art"};
    case Domain::reddit:
      return {"a post", "Reddit dataset", "", ""};
  }
  throw Error(Errc::UnknownDomain, "unhandled domain");
}

const std::string& require(const std::optional<std::string>& slot, std::string_view name) {
  if (!slot) throw Error(Errc::UnboundSlot, "slot '" + std::string(name) + "' is not bound");
  return *slot;
}

void image_description(PromptBundle& b, Domain d, const TemplateBindings& in) {
  const auto w = words_for(d);
  const bool reddit = d == Domain::reddit;
  b.image(in.image);
  b.text(std::string(" Given an image of ") + std::string(w.image_item) + " from the " +
         std::string(w.image_source) +
         ", generate a concise and detailed summary. Focus on describing key visual concepts. "
         "Ensure the summary is informative and useful for understanding the " +
         (reddit ? "post as described in the caption" : "product as described in user reviews") +
         ", without losing critical details or introducing unnecessary information.");
}

void aligner_summary(PromptBundle& b, Domain d, const TemplateBindings& in) {
  const auto& text = require(in.text_information, "text_information");
  const auto& summary = require(in.image_summary, "image_summary");
  if (d == Domain::reddit) {
    b.text("Given the text information of a post from the Reddit dataset: " + text +
           ". Image summary: " + summary +
           " Questions: Using the caption and image summary of the post provided above, create an "
           "informative and concise description that effectively highlights the post's key "
           "features.");
    return;
  }
  b.text("Given the text information of a product from the " +
         std::string(words_for(d).summary_source) + " dataset: " + text +
         ". Image summary: " + summary +
         " Questions: Using the title, description, and image summary of the product provided "
         "above, create an informative and concise description that effectively highlights the "
         "product's key features.");
}

void aligner_structural(PromptBundle& b, Domain d, const TemplateBindings& in) {
  const auto& text = require(in.text_information, "text_information");
  const auto& summary = require(in.image_summary, "image_summary");
  const bool reddit = d == Domain::reddit;
  if (in.neighbor_text.has_value() != in.neighbor_image_summary.has_value()) {
    throw Error(Errc::UnboundSlot,
                in.neighbor_text ? "slot 'neighbor_image_summary' is not bound"
                                 : "slot 'neighbor_text' is not bound");
  }
  std::string neighbors;
  if (in.neighbor_text) {
    neighbors = "text information: " + *in.neighbor_text +
                ", image summary: " + *in.neighbor_image_summary;
  } else {
    neighbors = reddit ? "No co-commented post information is available."
                       : "No co-purchased or co-reviewed product information is available.";
  }
  if (reddit) {
    b.text("Given the text information of a post from the Reddit dataset: " + text +
           ". Image summary: " + summary +
           ". Also given the information of co-commented posts: " + neighbors +
           " Questions: Using the post's caption and image summary provided above, along with any "
           "co-commented data, generate a concise yet informative description of the post.");
    return;
  }
  b.text("Given the text information of a product from the " +
         std::string(words_for(d).structural_source) + " dataset: " + text +
         ". Image summary: " + summary +
         ". Also given the information of co-purchased or co-reviewed products: " + neighbors +
         " Questions: Using the product's title, description, and image summary provided above, "
         "along with any co-purchase or co-review data, generate a concise yet informative "
         "description of the product.");
}

void predictor(PromptBundle& b, Domain d, const TemplateBindings& in, bool structural) {
  const auto& text = require(in.text_information, "text_information");
  const auto& candidates = require(in.candidates, "candidates");
  const bool reddit = d == Domain::reddit;
  b.text(reddit ? "Given the target post information on Reddit:\nPicture: "
                : "Given the target product information on Amazon:\nPicture: ");
  b.image(in.image);
  b.text(std::string(reddit ? "\nCaption: " : "\nTitle and description: ") + text + ".\n");

  if (structural && !in.neighbors.empty()) {
    const std::string title = reddit ? "Caption" : "Title";
    const bool pics = in.neighbor_fields != NeighborFields::text;
    const bool texts = in.neighbor_fields != NeighborFields::image;
    b.text(reddit ? "Co-commented posts: " : "Co-purchased or co-reviewed products: ");
    for (std::size_t i = 0; i < in.neighbors.size(); ++i) {
      const std::string n = std::to_string(i + 1);
      if (i > 0) b.text(texts ? " ; " : "; ");
      if (pics) {
        b.text("Picture" + n + ": ");
        b.image(in.neighbors[i].image);
        if (texts) b.text("; ");
      }
      if (texts) b.text(title + n + ": " + in.neighbors[i].text);
    }
    b.text(".\n");
  }

  std::string question;
  if (reddit) {
    question = structural ? "Question: Based on the target post's picture, caption, and related "
                            "posts, which category does the target post belong to?"
                          : "Question: Based on the target post's picture and caption, which "
                            "category does the target post belong to?";
  } else {
    question = structural
                   ? "Question: Based on the target product's picture, title, description, and "
                     "related products, which category does the target product belong to?"
                   : "Question: Based on the target product's picture, title, and description, "
                     "which category does the target product belong to?";
  }
  b.text(question + " Choose from the following options: " + candidates + ".");
  if (in.truth_label) b.text("\n\nAssistant: " + *in.truth_label);
}

// Adjacent text pieces are merged so bundles carry one segment per run of text.
PromptBundle coalesce(const PromptBundle& raw) {
  PromptBundle out;
  out.system = raw.system;
  for (const auto& seg : raw.segments) {
    const auto* t = std::get_if<TextSegment>(&seg);
    if (t && !out.segments.empty()) {
      if (auto* prev = std::get_if<TextSegment>(&out.segments.back())) {
        prev->text += t->text;
        continue;
      }
    }
    out.segments.push_back(seg);
  }
  return out;
}

}  // namespace

std::string_view domain_name(Domain d) noexcept {
  switch (d) {
    case Domain::movies: return "movies";
    case Domain::toys: return "toys";
    case Domain::grocery: return "grocery";
    case Domain::cds: return "cds";
    case Domain::arts: return "arts";
    case Domain::reddit: return "reddit";
  }
  return "unknown";
}

Domain parse_domain(std::string_view name) {
  for (Domain d : kAllDomains) {
    if (domain_name(d) == name) return d;
  }
  throw Error(Errc::UnknownDomain, "no prompt templates for domain '" + std::string(name) + "'");
}

std::string_view template_kind_name(TemplateKind k) noexcept {
  switch (k) {
    case TemplateKind::image_description: return "image_description";
    case TemplateKind::aligner_summary: return "aligner_summary";
    case TemplateKind::aligner_summary_structural: return "aligner_summary_structural";
    case TemplateKind::predictor: return "predictor";
    case TemplateKind::predictor_structural: return "predictor_structural";
  }
  return "unknown";
}

TemplateKind parse_template_kind(std::string_view name) {
  for (TemplateKind k : kAllTemplateKinds) {
    if (template_kind_name(k) == name) return k;
  }
  throw Error(Errc::InvalidArgument, "unknown template kind '" + std::string(name) + "'");
}

PromptBundle render_bundle(const PromptTemplate& tmpl, const TemplateBindings& bindings) {
  PromptBundle b;
  switch (tmpl.kind) {
    case TemplateKind::image_description: image_description(b, tmpl.domain, bindings); break;
    case TemplateKind::aligner_summary: aligner_summary(b, tmpl.domain, bindings); break;
    case TemplateKind::aligner_summary_structural:
      aligner_structural(b, tmpl.domain, bindings);
      break;
    case TemplateKind::predictor: predictor(b, tmpl.domain, bindings, false); break;
    case TemplateKind::predictor_structural: predictor(b, tmpl.domain, bindings, true); break;
  }
  return coalesce(b);
}

std::string render_template(const PromptTemplate& tmpl, const TemplateBindings& bindings) {
  return render_bundle(tmpl, bindings).flatten(std::string(kImageInputMarker));
}

TemplateBindings placeholder_bindings(TemplateKind kind, bool with_neighbors) {
  TemplateBindings b;
  b.image = "image.jpg";
  switch (kind) {
    case TemplateKind::image_description: break;
    case TemplateKind::aligner_summary:
      b.text_information = "<text information>";
      b.image_summary = "<image summary>";
      break;
    case TemplateKind::aligner_summary_structural:
      b.text_information = "<text information>";
      b.image_summary = "<image summary>";
      if (with_neighbors) {
        b.neighbor_text = "<neighbor text information>";
        b.neighbor_image_summary = "<neighbor image summary>";
      }
      break;
    case TemplateKind::predictor:
    case TemplateKind::predictor_structural:
      b.text_information = "<text information>";
      b.candidates = "<candidates set>";
      if (kind == TemplateKind::predictor_structural && with_neighbors) {
        for (int i = 1; i <= 3; ++i) {
          b.neighbors.push_back({"<text information>", "neighbor" + std::to_string(i) + ".jpg"});
        }
      }
      break;
  }
  return b;
}

std::string join_candidates(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace mmgl
