#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "socinstruct/errors.hpp"

namespace socinstruct {

// Names of the {placeholder} tokens in a template, in order of appearance.
std::vector<std::string> template_placeholders(std::string_view tmpl);

// Single-pass substitution of {name} tokens. Substituted values are not
// rescanned. Throws MissingField for a placeholder without a value.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& fields);

bool starts_with(std::string_view s, std::string_view prefix);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

}  // namespace socinstruct
