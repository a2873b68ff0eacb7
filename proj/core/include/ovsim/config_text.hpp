#pragma once

// Sectioned key-value configuration text:
//
//   # comment
//   [materials.bgo]
//   density = 7130
//   name = "BGO"
//   origin = [-5e-3, -5e-3, 25e-3]
//   heater = true
//
// Section order and key order are preserved; duplicate sections or keys are errors.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ovsim::config {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry {
  std::string key;
  Value value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(std::string_view key) const;
  Entry* find(std::string_view key);
};

struct Document {
  std::vector<Section> sections;

  const Section* find(std::string_view name) const;
  Section* find(std::string_view name);
};

/// Parses a document; throws ConfigError carrying the offending line.
Document parse_document(std::string_view text);

/// Parses a single right-hand side value ("1.5", "\"cu\"", "[1, 2]", "true").
Value parse_value(std::string_view text, int line = 0);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

std::string format_value(const Value& v);

/// Renders a document back to text; parse_document(render(d)) reproduces d.
std::string render(const Document& doc);

/// Applies overrides of the form PREFIX__section__key=value. Section dots are written
/// as "__" too, so OVSIM__materials__bgo__density=7200 targets [materials.bgo] density.
/// Matching is case-insensitive. Unknown sections/keys are created and left for the
/// schema check to reject.
void apply_overrides(Document& doc, const std::map<std::string, std::string>& env,
                     std::string_view prefix);

/// Collects PREFIX__* variables from the process environment.
std::map<std::string, std::string> environment_with_prefix(std::string_view prefix);

}  // namespace ovsim::config
