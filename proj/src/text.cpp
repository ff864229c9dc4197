#include "socinstruct/text.hpp"

#include <cctype>

#include "socinstruct/errors.hpp"

namespace socinstruct {
namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Returns the length of a {name} token starting at pos, or 0.
std::size_t placeholder_length(std::string_view tmpl, std::size_t pos) {
  if (tmpl[pos] != '{') return 0;
  std::size_t end = pos + 1;
  while (end < tmpl.size() && is_name_char(tmpl[end])) ++end;
  if (end == pos + 1 || end >= tmpl.size() || tmpl[end] != '}') return 0;
  return end - pos + 1;
}

}  // namespace

std::vector<std::string> template_placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (std::size_t len = placeholder_length(tmpl, i)) {
      names.emplace_back(tmpl.substr(i + 1, len - 2));
      i += len - 1;
    }
  }
  return names;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& fields) {
  std::string out;
  out.reserve(tmpl.size() + 64);
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (std::size_t len = placeholder_length(tmpl, i)) {
      std::string name(tmpl.substr(i + 1, len - 2));
      auto it = fields.find(name);
      if (it == fields.end()) throw MissingField(name);
      out += it->second;
      i += len - 1;
    } else {
      out += tmpl[i];
    }
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace socinstruct
