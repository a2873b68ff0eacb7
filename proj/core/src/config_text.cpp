#include "ovsim/config_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "ovsim/error.hpp"

extern char** environ;

namespace ovsim::config {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (!quoted && line[i] == '#') return line.substr(0, i);
  }
  return line;
}

double parse_number(std::string_view s, int line) {
  s = trim(s);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || s.empty()) {
    throw ConfigError("syntax error: expected a number, got '" + std::string(s) + "'", line);
  }
  return v;
}

}  // namespace

const Entry* Section::find(std::string_view key) const {
  auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.key == key; });
  return it == entries.end() ? nullptr : &*it;
}

Entry* Section::find(std::string_view key) {
  auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.key == key; });
  return it == entries.end() ? nullptr : &*it;
}

const Section* Document::find(std::string_view name) const {
  auto it = std::find_if(sections.begin(), sections.end(), [&](const Section& s) { return s.name == name; });
  return it == sections.end() ? nullptr : &*it;
}

Section* Document::find(std::string_view name) {
  auto it = std::find_if(sections.begin(), sections.end(), [&](const Section& s) { return s.name == name; });
  return it == sections.end() ? nullptr : &*it;
}

Value parse_value(std::string_view text, int line) {
  text = trim(text);
  if (text.empty()) throw ConfigError("syntax error: missing value", line);
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ConfigError("syntax error: unterminated string", line);
    std::string_view body = text.substr(1, text.size() - 2);
    if (body.find('"') != std::string_view::npos) throw ConfigError("syntax error: stray quote in string", line);
    return std::string(body);
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError("syntax error: unterminated array", line);
    std::vector<double> items;
    std::string_view body = trim(text.substr(1, text.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      items.push_back(parse_number(body.substr(0, comma), line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
      if (body.empty()) throw ConfigError("syntax error: trailing comma in array", line);
    }
    return items;
  }
  if (text == "true") return true;
  if (text == "false") return false;
  return parse_number(text, line);
}

Document parse_document(std::string_view text) {
  Document doc;
  Section* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("syntax error: unterminated section header", line_no);
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (!valid_name(name)) throw ConfigError("syntax error: invalid section name '" + name + "'", line_no);
      if (doc.find(name)) throw ConfigError("duplicate section [" + name + "]", line_no);
      doc.sections.push_back(Section{name, line_no, {}});
      current = &doc.sections.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("syntax error: expected 'key = value'", line_no);
    std::string key(trim(line.substr(0, eq)));
    if (!valid_name(key)) throw ConfigError("syntax error: invalid key '" + key + "'", line_no);
    if (!current) throw ConfigError("key '" + key + "' outside of any section", line_no);
    if (current->find(key)) throw ConfigError("duplicate key '" + key + "' in [" + current->name + "]", line_no);
    current->entries.push_back(Entry{key, parse_value(line.substr(eq + 1), line_no), line_no});
  }
  return doc;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_value(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_number(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + x + "\"";
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) out += ", ";
            out += format_number(x[i]);
          }
          return out + "]";
        }
      },
      v);
}

std::string render(const Document& doc) {
  std::ostringstream out;
  for (std::size_t s = 0; s < doc.sections.size(); ++s) {
    if (s) out << '\n';
    out << '[' << doc.sections[s].name << "]\n";
    for (const auto& e : doc.sections[s].entries) out << e.key << " = " << format_value(e.value) << '\n';
  }
  return out.str();
}

void apply_overrides(Document& doc, const std::map<std::string, std::string>& env, std::string_view prefix) {
  const std::string head = lower(prefix) + "__";
  for (const auto& [name, raw] : env) {
    const std::string lname = lower(name);
    if (lname.rfind(head, 0) != 0) continue;
    std::vector<std::string> parts;
    std::string_view rest = std::string_view(lname).substr(head.size());
    while (true) {
      const auto sep = rest.find("__");
      parts.emplace_back(rest.substr(0, sep));
      if (sep == std::string_view::npos) break;
      rest = rest.substr(sep + 2);
    }
    if (parts.size() < 2) throw ConfigError("override " + name + " must name a section and a key");
    std::string key = parts.back();
    parts.pop_back();
    std::string section;
    for (std::size_t i = 0; i < parts.size(); ++i) section += (i ? "." : "") + parts[i];

    Section* target = nullptr;
    for (auto& s : doc.sections) {
      if (lower(s.name) == section) target = &s;
    }
    if (!target) {
      doc.sections.push_back(Section{section, 0, {}});
      target = &doc.sections.back();
    }
    Entry* entry = nullptr;
    for (auto& e : target->entries) {
      if (lower(e.key) == key) entry = &e;
    }
    // Shell values are often unquoted strings (OVSIM__electrode__mode=cu_5_4).
    Value value;
    try {
      value = parse_value(raw);
    } catch (const ConfigError&) {
      value = std::string(trim(raw));
    }
    if (entry) {
      entry->value = std::move(value);
    } else {
      target->entries.push_back(Entry{key, std::move(value), 0});
    }
  }
}

std::map<std::string, std::string> environment_with_prefix(std::string_view prefix) {
  std::map<std::string, std::string> out;
  const std::string head = lower(prefix) + "__";
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    std::string name(kv.substr(0, eq));
    if (lower(name).rfind(head, 0) == 0) out.emplace(name, std::string(kv.substr(eq + 1)));
  }
  return out;
}

}  // namespace ovsim::config
