#include "topo/xml.hpp"

#include <algorithm>
#include <cctype>

namespace topo::xml {

std::optional<std::string> Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return v;
  return std::nullopt;
}

bool Element::has_only_whitespace_text() const {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || c == ':';
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view doc) : doc_(doc) {}

  Element document() {
    skip_misc();
    if (eof()) fail("empty document");
    Element root = element();
    skip_misc();
    if (!eof()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("malformed XML: " + what, line_);
  }

  bool eof() const { return pos_ >= doc_.size(); }
  char peek() const { return eof() ? '\0' : doc_[pos_]; }
  bool starts_with(std::string_view s) const {
    return doc_.substr(pos_, s.size()) == s;
  }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && !eof(); ++i, ++pos_)
      if (doc_[pos_] == '\n') ++line_;
  }
  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    advance(s.size());
  }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }
  void skip_until(std::string_view terminator) {
    auto at = doc_.find(terminator, pos_);
    if (at == std::string_view::npos) fail("unterminated markup");
    advance(at + terminator.size() - pos_);
  }

  // Whitespace, comments and processing instructions outside the root.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--")) {
        skip_until("-->");
      } else if (starts_with("<?")) {
        skip_until("?>");
      } else {
        return;
      }
    }
  }

  std::string name() {
    std::size_t start = pos_;
    while (!eof() && is_name_char(peek())) advance();
    if (start == pos_) fail("expected a name");
    return std::string(doc_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '<') fail("'<' in character data");
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity");
      auto ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "amp") out += '&';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (ent.size() > 1 && ent[0] == '#') {
        unsigned long cp = 0;
        try {
          cp = ent[1] == 'x' ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                             : std::stoul(std::string(ent.substr(1)), nullptr, 10);
        } catch (const std::exception&) {
          fail("bad character reference");
        }
        append_utf8(out, cp);
      } else {
        fail("unknown entity &" + std::string(ent) + ";");
      }
      i = semi;
    }
    return out;
  }

  Element element() {
    Element el;
    el.line = line_;
    expect("<");
    el.name = name();
    for (;;) {
      skip_ws();
      if (starts_with("/>")) {
        advance(2);
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      std::string key = name();
      skip_ws();
      expect("=");
      skip_ws();
      char quote = peek();
      if (quote != '"' && quote != '\'') fail("attribute value must be quoted");
      advance();
      auto end = doc_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      std::string value = decode_entities(doc_.substr(pos_, end - pos_));
      advance(end - pos_ + 1);
      el.attributes.emplace_back(std::move(key), std::move(value));
    }
    for (;;) {
      if (eof()) fail("unterminated element <" + el.name + ">");
      if (starts_with("</")) {
        advance(2);
        std::string closing = name();
        if (closing != el.name)
          fail("mismatched </" + closing + "> for <" + el.name + ">");
        skip_ws();
        expect(">");
        return el;
      }
      if (starts_with("<!--")) {
        skip_until("-->");
      } else if (starts_with("<?")) {
        skip_until("?>");
      } else if (peek() == '<') {
        el.children.push_back(element());
      } else {
        auto end = doc_.find('<', pos_);
        if (end == std::string_view::npos) end = doc_.size();
        el.text += decode_entities(doc_.substr(pos_, end - pos_));
        advance(end - pos_);
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Element parse(std::string_view document) { return Reader(document).document(); }

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace topo::xml
