#include "adaptifont/session/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "adaptifont/error.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::session {

int word_count(const std::string& body) {
  std::istringstream in(body);
  std::string token;
  int n = 0;
  while (in >> token) ++n;
  return n;
}

std::vector<TextItem> corpus_from_json(const Json& doc) {
  if (!doc.is_array()) throw Error(ErrorCode::kMalformedInput, "corpus must be a JSON array");
  std::vector<TextItem> out;
  std::set<std::string> ids;
  try {
    for (const auto& t : doc) {
      TextItem item;
      item.id = t.at("id").get<std::string>();
      item.body = t.at("body").get<std::string>();
      item.category = t.at("category").get<std::string>();
      item.expected_detections = t.value("expected_detections", 0);
      if (item.expected_detections < 0) throw Error(ErrorCode::kMalformedInput, "expected_detections < 0 in " + item.id);
      if (word_count(item.body) == 0) throw Error(ErrorCode::kMalformedInput, "empty text body: " + item.id);
      if (!ids.insert(item.id).second) throw Error(ErrorCode::kMalformedInput, "duplicate text id: " + item.id);
      if (t.contains("mc") && !t["mc"].is_null()) {
        McQuestion q;
        q.question = t["mc"].at("question").get<std::string>();
        q.options = t["mc"].at("options").get<std::vector<std::string>>();
        q.correct_index = t["mc"].at("correct_index").get<int>();
        if (q.options.size() != 6) throw Error(ErrorCode::kMalformedInput, "question needs six options: " + item.id);
        if (q.correct_index < 0 || q.correct_index >= 6)
          throw Error(ErrorCode::kMalformedInput, "correct_index out of range: " + item.id);
        item.mc = std::move(q);
      }
      out.push_back(std::move(item));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("corpus: ") + e.what());
  }
  return out;
}

Json corpus_to_json(const std::vector<TextItem>& texts) {
  Json arr = Json::array();
  for (const auto& t : texts) {
    Json j = {{"id", t.id}, {"body", t.body}, {"category", t.category}, {"expected_detections", t.expected_detections}};
    if (t.mc) j["mc"] = {{"question", t.mc->question}, {"options", t.mc->options}, {"correct_index", t.mc->correct_index}};
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<TextItem> load_corpus(const std::filesystem::path& path) { return corpus_from_json(read_json_file(path)); }

namespace {

struct Category {
  const char* name;
  std::vector<std::string> words;
};

const std::vector<Category>& categories() {
  static const std::vector<Category> c = {
      {"animals", {"otter", "falcon", "badger", "heron", "lynx", "beaver", "walrus", "gecko"}},
      {"food", {"bread", "cheese", "lentils", "plums", "noodles", "pepper", "honey", "olives"}},
      {"weather", {"drizzle", "thunder", "frost", "breeze", "hail", "fog", "monsoon", "sleet"}},
      {"tools", {"hammer", "chisel", "wrench", "pliers", "saw", "drill", "ladder", "shovel"}},
      {"music", {"violin", "drum", "flute", "choir", "banjo", "trumpet", "cello", "harp"}},
  };
  return c;
}

const std::vector<std::string>& filler() {
  static const std::vector<std::string> f = {
      "the", "a", "morning", "road", "old", "town", "people", "walked", "slowly", "through", "quiet", "streets",
      "and", "many", "houses", "stood", "near", "river", "while", "children", "played", "in", "gardens", "before",
      "evening", "light", "faded", "over", "hills", "where", "farmers", "worked", "long", "hours", "every", "day",
      "visitors", "often", "stopped", "to", "watch", "boats", "pass", "under", "stone", "bridge", "of", "market",
      "square", "was", "busy", "with", "traders", "selling", "goods", "from", "distant", "villages", "as", "bells"};
  return f;
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

}  // namespace

std::vector<TextItem> demo_corpus(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "corpus size must be positive");
  Rng rng = make_rng({seed, 0x434f5250});
  const auto& cats = categories();
  const auto& fill = filler();
  std::vector<TextItem> out;
  for (int i = 0; i < n; ++i) {
    const auto& cat = cats[static_cast<std::size_t>(i) % cats.size()];
    const int words = i == n / 2 ? 51 : 80 + static_cast<int>(uniform_index(rng, 81));
    const int detections = 1 + static_cast<int>(uniform_index(rng, 4));
    std::vector<int> slots;
    while (static_cast<int>(slots.size()) < detections) {
      const int s = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(words - 1)));
      if (std::find(slots.begin(), slots.end(), s) == slots.end()) slots.push_back(s);
    }
    std::string first_target;
    std::ostringstream body;
    int since_stop = 0;
    for (int w = 0; w < words; ++w) {
      std::string word;
      if (std::find(slots.begin(), slots.end(), w) != slots.end()) {
        word = cat.words[uniform_index(rng, cat.words.size())];
        if (first_target.empty()) first_target = word;
      } else {
        word = fill[uniform_index(rng, fill.size())];
      }
      if (since_stop == 0) word = capitalize(word);
      ++since_stop;
      const bool last = w + 1 == words;
      if (last || (since_stop >= 6 && uniform_index(rng, 5) == 0)) {
        word += last ? "." : (uniform_index(rng, 3) == 0 ? "," : ".");
        if (word.back() == '.') since_stop = 0;
      }
      body << (w ? " " : "") << word;
    }
    TextItem item;
    char id[16];
    std::snprintf(id, sizeof id, "t%03d", i + 1);
    item.id = id;
    item.body = body.str();
    item.category = cat.name;
    item.expected_detections = detections;
    McQuestion q;
    q.question = "Which of these words appeared in the text?";
    q.correct_index = static_cast<int>(uniform_index(rng, 6));
    std::vector<std::string> pool;
    for (const auto& oc : cats) {
      if (oc.name != cat.name) pool.insert(pool.end(), oc.words.begin(), oc.words.end());
    }
    for (int o = 0; o < 6; ++o) {
      if (o == q.correct_index) {
        q.options.push_back(first_target);
      } else {
        const std::size_t pick = uniform_index(rng, pool.size());
        q.options.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
    item.mc = std::move(q);
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace adaptifont::session
