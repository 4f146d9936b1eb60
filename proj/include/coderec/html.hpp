#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coderec {

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::optional<std::uint32_t> parse_entity(std::string_view name) {
  if (name == "lt") return '<';
  if (name == "gt") return '>';
  if (name == "amp") return '&';
  if (name == "quot") return '"';
  if (name == "apos") return '\'';
  if (name == "nbsp") return 0xA0;
  if (name.size() < 2 || name[0] != '#') return std::nullopt;
  std::uint32_t cp = 0;
  bool hex = name[1] == 'x' || name[1] == 'X';
  std::size_t i = hex ? 2 : 1;
  if (i >= name.size()) return std::nullopt;
  for (; i < name.size(); ++i) {
    char c = name[i];
    std::uint32_t digit;
    if (c >= '0' && c <= '9') {
      digit = static_cast<std::uint32_t>(c - '0');
    } else if (hex && c >= 'a' && c <= 'f') {
      digit = static_cast<std::uint32_t>(c - 'a' + 10);
    } else if (hex && c >= 'A' && c <= 'F') {
      digit = static_cast<std::uint32_t>(c - 'A' + 10);
    } else {
      return std::nullopt;
    }
    cp = cp * (hex ? 16 : 10) + digit;
    if (cp > 0x10FFFF) return std::nullopt;
  }
  if (cp >= 0xD800 && cp <= 0xDFFF) return std::nullopt;
  return cp;
}

inline bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = text[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

// Matches "<name" followed by '>' or whitespace/attributes; returns the index
// one past the closing '>' of the tag.
inline std::optional<std::size_t> match_open_tag(std::string_view html, std::size_t pos,
                                                 std::string_view name) {
  if (pos >= html.size() || html[pos] != '<') return std::nullopt;
  if (!starts_with_ci(html, pos + 1, name)) return std::nullopt;
  std::size_t after = pos + 1 + name.size();
  if (after >= html.size()) return std::nullopt;
  char c = html[after];
  if (c != '>' && c != ' ' && c != '\t' && c != '\n' && c != '\r') return std::nullopt;
  std::size_t close = html.find('>', after);
  if (close == std::string_view::npos) return std::nullopt;
  return close + 1;
}

inline std::size_t skip_space(std::string_view s, std::size_t pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r')) {
    ++pos;
  }
  return pos;
}

}  // namespace detail

/// Decodes named (lt, gt, amp, quot, apos, nbsp) and numeric character
/// references in a single pass. Unknown or malformed references are copied
/// through unchanged, so "&amp;lt;" decodes to "&lt;" and not to "<".
inline std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '&') {
      std::size_t semi = text.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 12) {
        if (auto cp = detail::parse_entity(text.substr(i + 1, semi - i - 1))) {
          detail::append_utf8(out, *cp);
          i = semi + 1;
          continue;
        }
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

inline bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < s.size()) {
    unsigned char c = byte(i);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cc = byte(i + k);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

/// Number of code points in a valid UTF-8 string.
inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

/// Removes anything of the form <...>. Used on raw block contents before
/// entity decoding, so escaped generics such as "&lt;T&gt;" survive.
inline std::string strip_tags(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<') {
      std::size_t close = html.find('>', i + 1);
      if (close == std::string_view::npos) {
        out.append(html.substr(i));
        break;
      }
      i = close + 1;
      continue;
    }
    out.push_back(html[i++]);
  }
  return out;
}

struct BlockExtraction {
  std::vector<std::string> blocks;
  std::size_t malformed = 0;
};

/// Returns the decoded inner text of every <pre><code>...</code></pre> region
/// in document order. Attributes on either tag are allowed (dumps carry
/// class="lang-java" and similar). Inline <code> outside <pre> is ignored.
/// A region whose closing tags never appear is skipped and counted.
inline BlockExtraction extract_code_blocks(std::string_view body_html) {
  BlockExtraction result;
  std::size_t pos = 0;
  while (true) {
    std::size_t lt = body_html.find('<', pos);
    if (lt == std::string_view::npos) break;
    auto pre_end = detail::match_open_tag(body_html, lt, "pre");
    if (!pre_end) {
      pos = lt + 1;
      continue;
    }
    std::size_t code_start = detail::skip_space(body_html, *pre_end);
    auto code_end = detail::match_open_tag(body_html, code_start, "code");
    if (!code_end) {
      pos = *pre_end;
      continue;
    }
    std::size_t close_code = body_html.find("</code>", *code_end);
    if (close_code == std::string_view::npos) {
      ++result.malformed;
      break;
    }
    std::size_t after = detail::skip_space(body_html, close_code + 7);
    if (!detail::starts_with_ci(body_html, after, "</pre>")) {
      ++result.malformed;
      pos = close_code + 7;
      continue;
    }
    auto raw = body_html.substr(*code_end, close_code - *code_end);
    result.blocks.push_back(decode_entities(strip_tags(raw)));
    pos = after + 6;
  }
  return result;
}

}  // namespace coderec
