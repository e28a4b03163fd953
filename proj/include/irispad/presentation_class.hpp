#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace irispad {

/// Ground-truth presentation classes. Declaration order is the canonical
/// order used for every serialized rate table.
enum class PresentationClass {
  Live,
  Artificial,
  ContactsPrint,
  Diseased,
  PostMortem,
  Printout,
  Synthetic,
  TexturedContact,
};

inline constexpr std::size_t kClassCount = 8;

inline constexpr std::array<PresentationClass, kClassCount> kAllClasses = {
    PresentationClass::Live,       PresentationClass::Artificial,
    PresentationClass::ContactsPrint, PresentationClass::Diseased,
    PresentationClass::PostMortem, PresentationClass::Printout,
    PresentationClass::Synthetic,  PresentationClass::TexturedContact,
};

constexpr std::size_t class_index(PresentationClass c) {
  return static_cast<std::size_t>(c);
}

constexpr bool is_bona_fide(PresentationClass c) {
  return c == PresentationClass::Live;
}

/// Canonical lowercase token, e.g. "contacts_print".
std::string_view to_string(PresentationClass c);

std::optional<PresentationClass> parse_class(std::string_view token);

/// Throws Error(UnknownClass) for unrecognized tokens.
PresentationClass require_class(std::string_view token);

}  // namespace irispad
