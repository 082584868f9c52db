#include "dschat/gateway/json_extract.hpp"

#include <cctype>
#include <charconv>
#include <regex>
#include <string>

namespace dschat::gateway {

namespace {

// Index one past the brace matching the '{' at `open`, or npos.
std::size_t match_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// Curly quote openers: 1 for double, 2 for single, 0 otherwise.
int curly_at(std::string_view text, std::size_t i) {
  if (i + 2 >= text.size()) return 0;
  if (static_cast<unsigned char>(text[i]) != 0xE2 || static_cast<unsigned char>(text[i + 1]) != 0x80) return 0;
  const auto third = static_cast<unsigned char>(text[i + 2]);
  if (third == 0x9C || third == 0x9D) return 1;
  if (third == 0x98 || third == 0x99) return 2;
  return 0;
}

class RelaxedParser {
 public:
  explicit RelaxedParser(std::string_view text) : text_(text) {}

  Json parse_document() {
    skip_space();
    Json v = value(0);
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return v;
  }

 private:
  static constexpr int kMaxDepth = 200;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("RelaxedParseError",
                          "relaxed parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  // Returns true when a newline was skipped.
  bool skip_space() {
    bool newline = false;
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') newline = true;
      ++pos_;
    }
    return newline;
  }

  Json value(int depth) {
    if (depth > kMaxDepth) fail("nesting too deep");
    skip_space();
    const char c = peek();
    if (c == '{') return object(depth + 1);
    if (c == '[') return array(depth + 1);
    if (c == '"' || c == '\'' || curly_at(text_, pos_)) return quoted();
    return bare();
  }

  Json object(int depth) {
    ++pos_;  // '{'
    Json obj = Json::object();
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated object");
      if (peek() == '}') {
        ++pos_;
        return obj;
      }
      std::string key;
      if (peek() == '"' || peek() == '\'' || curly_at(text_, pos_)) {
        key = quoted();
        skip_space();
      } else {
        const std::size_t start = pos_;
        while (!at_end() && peek() != ':' && peek() != ',' && peek() != '}' && peek() != '\n') ++pos_;
        key = trim(text_.substr(start, pos_ - start));
      }
      if (peek() != ':') fail("expected ':' after key");
      if (key.empty()) fail("empty key");
      ++pos_;
      obj[key] = value(depth);
      const bool newline = skip_space();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() == '}') {
        continue;
      } else if (!newline) {
        fail("expected ',' or '}'");
      }
    }
  }

  Json array(int depth) {
    ++pos_;  // '['
    Json arr = Json::array();
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value(depth));
      const bool newline = skip_space();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() == ']') {
        continue;
      } else if (!newline) {
        fail("expected ',' or ']'");
      }
    }
  }

  std::string quoted() {
    const int curly = curly_at(text_, pos_);
    const char q = text_[pos_];
    pos_ += curly ? 3 : 1;
    std::string out;
    for (;;) {
      if (at_end()) fail("unterminated string");
      if (curly && curly_at(text_, pos_) == curly) {
        pos_ += 3;
        return out;
      }
      const char c = text_[pos_++];
      if (!curly && c == q) return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("dangling escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'u': {
          if (pos_ + 4 > text_.size()) fail("short unicode escape");
          // Delegate UTF-8 encoding and surrogate pairs to the strict parser.
          std::string probe = "\"\\u" + std::string(text_.substr(pos_, 4));
          unsigned code = 0;
          std::from_chars(text_.data() + pos_, text_.data() + pos_ + 4, code, 16);
          pos_ += 4;
          if (code >= 0xD800 && code <= 0xDBFF && pos_ + 6 <= text_.size() && text_[pos_] == '\\' &&
              text_[pos_ + 1] == 'u') {
            probe += std::string(text_.substr(pos_, 6));
            pos_ += 6;
          }
          probe += "\"";
          try {
            out += Json::parse(probe).get<std::string>();
          } catch (const Json::exception&) {
            fail("bad unicode escape");
          }
          break;
        }
        default: out.push_back(e); break;
      }
    }
  }

  Json bare() {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (c == ',' || c == '}' || c == ']' || c == '\n') break;
      ++pos_;
    }
    return interpret(trim(text_.substr(start, pos_ - start)));
  }

  static std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
  }

  static Json interpret(const std::string& token) {
    std::string lower;
    for (char c : token) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (token.empty() || lower == "null" || lower == "none" || lower == "nil") return nullptr;
    if (lower == "true") return true;
    if (lower == "false") return false;
    static const std::regex number(R"(-?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?)");
    if (std::regex_match(token, number)) {
      const bool integral = token.find_first_of(".eE") == std::string::npos;
      if (integral) {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec == std::errc() && ptr == token.data() + token.size()) return v;
      }
      return Json::parse(token);
    }
    return token;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<BraceRegion> brace_regions(std::string_view text, std::vector<std::size_t>* unbalanced) {
  std::vector<BraceRegion> regions;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    const std::size_t end = match_brace(text, i);
    if (end == std::string_view::npos) {
      if (unbalanced) unbalanced->push_back(i);
      continue;
    }
    regions.push_back({i, end});
  }
  return regions;
}

Json extract_json(std::string_view text) {
  std::vector<std::size_t> unbalanced;
  for (const auto& region : brace_regions(text, &unbalanced)) {
    Json parsed = Json::parse(text.substr(region.begin, region.end - region.begin), nullptr,
                              /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  if (!unbalanced.empty()) throw JsonParseError(unbalanced.front());
  throw NoJsonFound();
}

Json parse_relaxed(std::string_view text) { return RelaxedParser(text).parse_document(); }

Json extract_object(std::string_view text) {
  try {
    return extract_json(text);
  } catch (const ValidationError&) {
  }
  std::vector<std::size_t> unbalanced;
  for (const auto& region : brace_regions(text, &unbalanced)) {
    try {
      Json v = RelaxedParser(text.substr(region.begin, region.end - region.begin)).parse_document();
      if (v.is_object()) return v;
    } catch (const ValidationError&) {
    }
  }
  if (!unbalanced.empty()) throw JsonParseError(unbalanced.front());
  throw NoJsonFound();
}

}  // namespace dschat::gateway
