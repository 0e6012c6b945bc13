#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaptifont/json_io.hpp"

namespace adaptifont::session {

struct McQuestion {
  std::string question;
  std::vector<std::string> options;  // exactly six
  int correct_index = 0;
};

struct TextItem {
  std::string id;
  std::string body;
  std::string category;
  int expected_detections = 0;
  std::optional<McQuestion> mc;
};

/// Whitespace-separated token count.
int word_count(const std::string& body);

/// Parses the corpus array; validates ids, option count and answer index.
std::vector<TextItem> corpus_from_json(const Json& doc);
Json corpus_to_json(const std::vector<TextItem>& texts);
std::vector<TextItem> load_corpus(const std::filesystem::path& path);

/// Seeded demo corpus of n texts in a handful of categories, one of them
/// a 51-word text; every text carries a six-option question.
std::vector<TextItem> demo_corpus(int n, std::uint64_t seed);

}  // namespace adaptifont::session
