#include "irispad/presentation_class.hpp"

#include "irispad/error.hpp"

namespace irispad {

std::string_view to_string(PresentationClass c) {
  switch (c) {
    case PresentationClass::Live: return "live";
    case PresentationClass::Artificial: return "artificial";
    case PresentationClass::ContactsPrint: return "contacts_print";
    case PresentationClass::Diseased: return "diseased";
    case PresentationClass::PostMortem: return "post_mortem";
    case PresentationClass::Printout: return "printout";
    case PresentationClass::Synthetic: return "synthetic";
    case PresentationClass::TexturedContact: return "textured_contact";
  }
  return "?";
}

std::optional<PresentationClass> parse_class(std::string_view token) {
  for (auto c : kAllClasses) {
    if (to_string(c) == token) return c;
  }
  return std::nullopt;
}

PresentationClass require_class(std::string_view token) {
  if (auto c = parse_class(token)) return *c;
  throw Error(ErrorCode::UnknownClass, std::string(token));
}

}  // namespace irispad
