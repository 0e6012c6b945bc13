#include "adaptifont/fontgen/svg.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include "adaptifont/error.hpp"
#include "adaptifont/utf8.hpp"

namespace adaptifont::fontgen {

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

bool xml_char_allowed(char32_t cp) {
  if (cp == 0x9 || cp == 0xA || cp == 0xD) return true;
  if (cp < 0x20) return false;
  if (cp >= 0xD800 && cp <= 0xDFFF) return false;
  if (cp == 0xFFFE || cp == 0xFFFF) return false;
  return cp <= 0x10FFFF;
}

std::string escape(std::u32string_view text) {
  std::string out;
  for (char32_t cp : text) {
    switch (cp) {
      case U'&': out += "&amp;"; break;
      case U'<': out += "&lt;"; break;
      case U'>': out += "&gt;"; break;
      case U'"': out += "&quot;"; break;
      case U'\'': out += "&apos;"; break;
      case U'\t': out += "&#9;"; break;
      case U'\n': out += "&#10;"; break;
      case U'\r': out += "&#13;"; break;
      default: out += encode_utf8(cp);
    }
  }
  return out;
}

std::string font_id(const std::string& name) {
  std::string id;
  for (char c : name) id += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  if (id.empty() || std::isdigit(static_cast<unsigned char>(id.front()))) id = "f" + id;
  return id;
}

}  // namespace

std::string path_data(const std::vector<Contour>& contours) {
  std::string d;
  for (const auto& c : contours) {
    if (c.empty()) continue;
    const std::size_t n = c.front() == c.back() && c.size() > 1 ? c.size() - 1 : c.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!d.empty()) d += ' ';
      d += i == 0 ? "M" : "L";
      d += number(c[i].x) + ' ' + number(c[i].y);
    }
    d += " Z";
  }
  return d;
}

std::string emit_svg_font(const SynthFont& font) {
  for (const auto& g : font.outlines) {
    if (!xml_char_allowed(g.character)) {
      throw Error(ErrorCode::kInvalidArgument, "character U+" + std::to_string(static_cast<unsigned>(g.character)) +
                                                   " cannot be encoded in an SVG font");
    }
  }
  const std::u32string name = decode_utf8(font.name);
  double default_advance = 0;
  for (const auto& g : font.outlines) default_advance += g.advance_width;
  if (!font.outlines.empty()) default_advance /= static_cast<double>(font.outlines.size());

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\">\n"
      << "<defs>\n"
      << "<font id=\"" << font_id(font.name) << "\" horiz-adv-x=\"" << number(default_advance) << "\">\n"
      << "<font-face font-family=\"" << escape(name) << "\" units-per-em=\"" << number(font.units_per_em)
      << "\" ascent=\"" << number(font.ascent) << "\" descent=\"" << number(font.descent) << "\"/>\n"
      << "<missing-glyph horiz-adv-x=\"" << number(default_advance) << "\"/>\n";
  for (const auto& g : font.outlines) {
    char glyph_name[16];
    std::snprintf(glyph_name, sizeof glyph_name, "uni%04X", static_cast<unsigned>(g.character));
    out << "<glyph unicode=\"" << escape(std::u32string(1, g.character)) << "\" glyph-name=\"" << glyph_name
        << "\" horiz-adv-x=\"" << number(g.advance_width) << "\" d=\"" << path_data(g.contours) << "\"/>\n";
  }
  out << "</font>\n</defs>\n</svg>\n";
  return out.str();
}

}  // namespace adaptifont::fontgen
