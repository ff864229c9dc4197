#include "socinstruct/label_parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <utility>

#include "socinstruct/errors.hpp"
#include "socinstruct/text.hpp"

namespace socinstruct {

namespace {

constexpr std::string_view kEdgeChars = " .,!?:;\"'";
constexpr std::string_view kOutputToken = "output:";

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string_view strip_edges(std::string_view s) {
  auto first = s.find_first_not_of(kEdgeChars);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(kEdgeChars);
  return s.substr(first, last - first + 1);
}

struct SurfaceForm {
  std::string text;   // normalized
  std::size_t label;  // index into label_set
};

std::vector<SurfaceForm> surface_forms(const TaskSpec& task) {
  std::vector<SurfaceForm> forms;
  for (std::size_t i = 0; i < task.label_set.size(); ++i) {
    forms.push_back({normalize(task.label_set[i]), i});
    if (auto it = task.label_aliases.find(task.label_set[i]);
        it != task.label_aliases.end()) {
      for (const auto& alias : it->second) forms.push_back({normalize(alias), i});
    }
  }
  std::stable_sort(forms.begin(), forms.end(), [](const auto& a, const auto& b) {
    return a.text.size() > b.text.size();
  });
  return forms;
}

// Labels matched at word boundaries, longest form first; a match claims its
// span so shorter forms inside it are not counted. anchored restricts matches
// to offset 0.
std::set<std::size_t> find_labels(std::string_view text,
                                  const std::vector<SurfaceForm>& forms,
                                  bool anchored) {
  std::vector<std::pair<std::size_t, std::size_t>> claimed;
  std::set<std::size_t> labels;
  for (const auto& form : forms) {
    if (form.text.empty()) continue;
    for (auto pos = text.find(form.text); pos != std::string_view::npos;
         pos = text.find(form.text, pos + 1)) {
      if (anchored && pos != 0) break;
      const std::size_t end = pos + form.text.size();
      const bool bounded = (pos == 0 || !is_word_char(text[pos - 1])) &&
                           (end == text.size() || !is_word_char(text[end]));
      if (!bounded) continue;
      const bool overlaps = std::any_of(claimed.begin(), claimed.end(), [&](auto span) {
        return pos < span.second && span.first < end;
      });
      if (overlaps) continue;
      claimed.emplace_back(pos, end);
      labels.insert(form.label);
    }
  }
  return labels;
}

}  // namespace

std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::exact: return "exact";
    case MatchKind::prefix: return "prefix";
    case MatchKind::contained: return "contained";
    case MatchKind::none: return "none";
  }
  return "none";
}

std::string_view to_string(ParserStrictness s) {
  return s == ParserStrictness::strict ? "strict" : "contained";
}

std::optional<MatchKind> parse_match_kind(std::string_view s) {
  for (auto k : {MatchKind::exact, MatchKind::prefix, MatchKind::contained, MatchKind::none}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<ParserStrictness> parse_strictness(std::string_view s) {
  if (s == "strict") return ParserStrictness::strict;
  if (s == "contained") return ParserStrictness::contained;
  return std::nullopt;
}

std::string normalize(std::string_view text) {
  std::string collapsed;
  collapsed.reserve(text.size());
  bool in_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !collapsed.empty()) collapsed += ' ';
    in_space = false;
    collapsed += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }

  std::string_view view = collapsed;
  while (true) {
    std::string_view before = view;
    auto first = view.find_first_not_of(' ');
    view = first == std::string_view::npos ? std::string_view{} : view.substr(first);
    if (starts_with(view, kOutputToken)) view.remove_prefix(kOutputToken.size());
    view = strip_edges(view);
    if (view == before) break;
  }
  return std::string(view);
}

Prediction parse_label(const TaskSpec& task, std::string_view raw_text,
                       ParserStrictness strictness, std::size_t prompt_index) {
  Prediction p;
  p.prompt_index = prompt_index;
  p.task_id = task.task_id;
  p.raw_text = std::string(raw_text);

  const std::string text = normalize(raw_text);
  if (text.empty()) return p;
  const auto forms = surface_forms(task);

  for (const auto& form : forms) {
    if (form.text == text) {
      p.parsed = task.label_set[form.label];
      p.match_kind = MatchKind::exact;
      return p;
    }
  }
  if (auto hits = find_labels(text, forms, /*anchored=*/true); hits.size() == 1) {
    p.parsed = task.label_set[*hits.begin()];
    p.match_kind = MatchKind::prefix;
    return p;
  }
  if (strictness == ParserStrictness::contained) {
    if (auto hits = find_labels(text, forms, /*anchored=*/false); hits.size() == 1) {
      p.parsed = task.label_set[*hits.begin()];
      p.match_kind = MatchKind::contained;
    }
  }
  return p;
}

nlohmann::ordered_json to_json(const ScoredPrediction& p) {
  nlohmann::ordered_json j;
  j["prompt_index"] = p.prediction.prompt_index;
  j["task_id"] = p.prediction.task_id;
  j["target_source_index"] = p.target_source_index;
  j["gold"] = p.gold;
  j["raw_text"] = p.prediction.raw_text;
  j["parsed"] = p.prediction.parsed ? nlohmann::ordered_json(*p.prediction.parsed)
                                    : nlohmann::ordered_json(nullptr);
  j["match_kind"] = to_string(p.prediction.match_kind);
  j["backend_error"] = p.backend_error ? nlohmann::ordered_json(*p.backend_error)
                                       : nlohmann::ordered_json(nullptr);
  return j;
}

ScoredPrediction scored_prediction_from_json(const nlohmann::json& j) {
  ScoredPrediction p;
  p.prediction.prompt_index = j.at("prompt_index").get<std::size_t>();
  p.prediction.task_id = j.at("task_id").get<std::string>();
  p.target_source_index = j.at("target_source_index").get<std::int64_t>();
  p.gold = j.at("gold").get<std::string>();
  p.prediction.raw_text = j.at("raw_text").get<std::string>();
  if (!j.at("parsed").is_null()) p.prediction.parsed = j.at("parsed").get<std::string>();
  auto kind = parse_match_kind(j.at("match_kind").get<std::string>());
  if (!kind) throw Error("unknown match_kind in predictions");
  p.prediction.match_kind = *kind;
  if (j.contains("backend_error") && !j.at("backend_error").is_null()) {
    p.backend_error = j.at("backend_error").get<std::string>();
  }
  return p;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<ScoredPrediction>& predictions) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : predictions) out << to_json(p).dump() << '\n';
}

std::vector<ScoredPrediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<ScoredPrediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(scored_prediction_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace socinstruct
