#include "adaptifont/fontspace/synthetic_corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string_view>

#include "adaptifont/error.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::fontspace {

namespace {

struct P {
  double u, v;  // u across the glyph box, v up from the baseline, both in [0,1]
};

struct Stroke {
  P a, b;
  bool dot = false;
};

// Sixteen-segment skeleton.
const std::map<std::string_view, Stroke>& segments() {
  static const std::map<std::string_view, Stroke> kSegs = {
      {"A1", {{0, 1}, {.5, 1}}}, {"A2", {{.5, 1}, {1, 1}}}, {"B", {{1, 1}, {1, .5}}},
      {"C", {{1, .5}, {1, 0}}},  {"D1", {{1, 0}, {.5, 0}}}, {"D2", {{.5, 0}, {0, 0}}},
      {"E", {{0, 0}, {0, .5}}},  {"F", {{0, .5}, {0, 1}}},  {"G1", {{0, .5}, {.5, .5}}},
      {"G2", {{.5, .5}, {1, .5}}}, {"H", {{0, 1}, {.5, .5}}}, {"I", {{.5, 1}, {.5, .5}}},
      {"J", {{1, 1}, {.5, .5}}}, {"K", {{.5, .5}, {1, 0}}}, {"L", {{.5, .5}, {.5, 0}}},
      {"M", {{.5, .5}, {0, 0}}},
  };
  return kSegs;
}

const std::map<char32_t, std::string_view>& letter_codes() {
  static const std::map<char32_t, std::string_view> kCodes = {
      {U'A', "A1 A2 B C E F G1 G2"}, {U'B', "A1 A2 B C D1 D2 I L G2"}, {U'C', "A1 A2 F E D1 D2"},
      {U'D', "A1 A2 B C D1 D2 I L"},  {U'E', "A1 A2 F E D1 D2 G1 G2"},  {U'F', "A1 A2 F E G1"},
      {U'G', "A1 A2 F E D1 D2 C G2"}, {U'H', "F E B C G1 G2"},          {U'I', "A1 A2 I L D1 D2"},
      {U'J', "B C D1 D2 E"},          {U'K', "F E G1 J K"},             {U'L', "F E D1 D2"},
      {U'M', "F E H J B C"},          {U'N', "F E H K C B"},            {U'O', "A1 A2 B C D1 D2 E F"},
      {U'P', "A1 A2 B F E G1 G2"},    {U'Q', "A1 A2 B C D1 D2 E F K"},  {U'R', "A1 A2 B F E G1 G2 K"},
      {U'S', "A1 A2 F G1 G2 C D1 D2"}, {U'T', "A1 A2 I L"},             {U'U', "F E D1 D2 C B"},
      {U'V', "F E M J"},              {U'W', "F E M K C B"},            {U'X', "H J M K"},
      {U'Y', "H J L"},                {U'Z', "A1 A2 J M D1 D2"},
  };
  return kCodes;
}

std::vector<Stroke> parse_code(std::string_view code) {
  std::vector<Stroke> out;
  std::size_t pos = 0;
  while (pos < code.size()) {
    const std::size_t end = std::min(code.find(' ', pos), code.size());
    out.push_back(segments().at(code.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

struct Shape {
  std::vector<Stroke> strokes;
  double height = 1.0;  // fraction of cap height
  double width = 1.0;   // fraction of the style's box width
};

Shape glyph_shape(char32_t ch, const StrokeStyle& style) {
  if (ch >= U'A' && ch <= U'Z') return {parse_code(letter_codes().at(ch)), 1.0, 1.0};
  if (ch >= U'a' && ch <= U'z') {
    return {parse_code(letter_codes().at(ch - U'a' + U'A')), style.x_height, 0.85};
  }
  const double xh = style.x_height;
  const Stroke dot{{.5, 0}, {.5, 0}, true};
  switch (ch) {
    case U'.': return {{dot}, 1.0, 0.25};
    case U',': return {{dot, {{.5, 0}, {.2, -.2}}}, 1.0, 0.25};
    case U'-': return {{{{0, .5 * xh}, {1, .5 * xh}}}, 1.0, 0.5};
    case U':': return {{dot, {{.5, .6 * xh}, {.5, .6 * xh}, true}}, 1.0, 0.25};
    case U';': return {{dot, {{.5, 0}, {.2, -.2}}, {{.5, .6 * xh}, {.5, .6 * xh}, true}}, 1.0, 0.25};
    case U'!': return {{{{.5, 1}, {.5, .3}}, dot}, 1.0, 0.25};
    case U'?': {
      auto s = parse_code("A1 A2 B G2");
      s.push_back({{.5, .5}, {.5, .3}});
      s.push_back(dot);
      return {s, 1.0, 0.8};
    }
    default: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "synthetic renderer has no shape for this character");
}

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = ax + t * dx - px, qy = ay + t * dy - py;
  return std::sqrt(qx * qx + qy * qy);
}

struct Capsule {
  double ax, ay, bx, by, half_width;
};

}  // namespace

std::u32string synthetic_glyph_set() {
  std::u32string set;
  for (char32_t c = U'A'; c <= U'Z'; ++c) set.push_back(c);
  for (char32_t c = U'a'; c <= U'z'; ++c) set.push_back(c);
  set += U".,-:;!?";
  return set;
}

GlyphAtlas render_atlas(const StrokeStyle& style, const SyntheticCorpusOptions& opts) {
  const std::u32string chars = synthetic_glyph_set();
  if (static_cast<int>(chars.size()) * opts.cell_width > opts.width) {
    throw Error(ErrorCode::kInvalidArgument, "atlas too narrow for the glyph inventory");
  }
  GlyphAtlas atlas;
  atlas.font_name = style.name;
  atlas.point_size = opts.point_size;
  atlas.units_per_em = opts.units_per_em;
  atlas.baseline = opts.baseline;
  atlas.image.height = opts.height;
  atlas.image.width = opts.width;
  atlas.image.pixels.assign(static_cast<std::size_t>(opts.height) * opts.width, 0);
  const double px_to_units = opts.units_per_em / opts.point_size;
  constexpr double kSideBearing = 3.0;

  for (std::size_t gi = 0; gi < chars.size(); ++gi) {
    const Shape shape = glyph_shape(chars[gi], style);
    const double box_w = style.width * shape.width;
    const double box_h = opts.cap_height * shape.height;
    const int cell0 = static_cast<int>(gi) * opts.cell_width;
    const double left = cell0 + 0.5 * (opts.cell_width - box_w - style.slant * opts.cap_height);

    std::vector<Capsule> caps;
    auto to_px = [&](P p, double& x, double& y) {
      y = p.v * box_h;
      x = left + p.u * box_w + style.slant * y;
    };
    const double horizontal_w = style.weight * (1.0 - 0.6 * style.contrast);
    for (const auto& s : shape.strokes) {
      double ax, ay, bx, by;
      to_px(s.a, ax, ay);
      to_px(s.b, bx, by);
      if (s.dot) {
        caps.push_back({ax, ay + style.weight * 1.2, bx, by + style.weight * 1.2, style.weight * 1.3});
        continue;
      }
      const bool vertical = std::abs(by - ay) > std::abs(bx - ax);
      caps.push_back({ax, ay, bx, by, vertical ? style.weight : horizontal_w});
      if (vertical && style.serif > 0) {
        for (const auto& end : {std::pair{ax, ay}, std::pair{bx, by}}) {
          const bool at_edge = end.second <= 0.01 || end.second >= box_h - 0.01;
          if (!at_edge) continue;
          caps.push_back({end.first - style.serif, end.second, end.first + style.serif, end.second, 0.7 * horizontal_w});
        }
      }
    }

    for (int row = 0; row < opts.height; ++row) {
      const double py = opts.baseline - row - 0.5;  // y-up, relative to the baseline
      for (int col = cell0; col < cell0 + opts.cell_width; ++col) {
        const double px = col + 0.5;
        double ink = 0;
        for (const auto& c : caps) {
          const double d = segment_distance(px, py, c.ax, c.ay, c.bx, c.by);
          ink = std::max(ink, std::clamp(c.half_width + 0.5 - d, 0.0, 1.0));
        }
        auto& pix = atlas.image.pixels[static_cast<std::size_t>(row) * opts.width + col];
        pix = static_cast<std::uint8_t>(std::lround(255.0 * ink));
      }
    }

    GlyphEntry e;
    e.character = chars[gi];
    e.span_start = cell0;
    e.span_end = cell0 + opts.cell_width;
    e.advance = std::round((box_w + 2 * style.weight + 2 * kSideBearing) * px_to_units);
    e.lsb = std::round(kSideBearing * px_to_units);
    atlas.glyphs.push_back(e);
  }
  return atlas;
}

std::vector<StrokeStyle> sample_styles(const SyntheticCorpusOptions& opts) {
  Rng rng = make_rng({opts.seed, 0x5354594c});
  std::vector<StrokeStyle> styles;
  for (int i = 0; i < opts.n_fonts; ++i) {
    StrokeStyle s;
    s.name = "Synthetic " + std::to_string(i + 1);
    s.weight = uniform(rng, 1.0, 3.0);
    s.width = uniform(rng, 14.0, 22.0);
    s.slant = uniform(rng, 0.0, 1.0) < 0.3 ? uniform(rng, 0.08, 0.18) : 0.0;
    s.serif = uniform(rng, 0.0, 1.0) < 0.5 ? uniform(rng, 1.5, 3.0) : 0.0;
    s.x_height = uniform(rng, 0.55, 0.72);
    s.contrast = uniform(rng, 0.0, 0.5);
    styles.push_back(s);
  }
  return styles;
}

std::vector<GlyphAtlas> synthetic_corpus(const SyntheticCorpusOptions& opts) {
  std::vector<GlyphAtlas> out;
  for (const auto& style : sample_styles(opts)) out.push_back(render_atlas(style, opts));
  return out;
}

}  // namespace adaptifont::fontspace
