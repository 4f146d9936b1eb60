#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coderec/error.hpp"
#include "coderec/html.hpp"

namespace coderec {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" and "YYYY-MM-DDTHH:MM:SS.fff",
/// each with an optional trailing 'Z'. All times are UTC.
inline std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  std::string buf(text);
  int consumed = 0;
  if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3) return std::nullopt;
  std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty()) {
    int c2 = 0;
    std::string tail(rest);
    if (std::sscanf(tail.c_str(), "T%2d:%2d:%2d%n", &h, &mi, &s, &c2) != 3) return std::nullopt;
    rest = rest.substr(static_cast<std::size_t>(c2));
    if (!rest.empty()) {
      if (rest[0] != '.' || rest.size() < 2) return std::nullopt;
      std::string frac(rest.substr(1));
      if (!std::all_of(frac.begin(), frac.end(), [](unsigned char c) { return std::isdigit(c); })) {
        return std::nullopt;
      }
      frac.resize(3, '0');
      ms = std::stoi(frac);
    }
  }
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms}};
}

inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  auto rem = t - day_point;
  auto h = duration_cast<hours>(rem);
  auto mi = duration_cast<minutes>(rem - h);
  auto s = duration_cast<seconds>(rem - h - mi);
  auto ms = duration_cast<milliseconds>(rem - h - mi - s);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(h.count()), static_cast<int>(mi.count()), static_cast<int>(s.count()),
                static_cast<int>(ms.count()));
  return buf;
}

enum class PostType : int { kOther = 0, kQuestion = 1, kAnswer = 2 };

struct RawPost {
  std::uint64_t id = 0;
  PostType type = PostType::kOther;
  std::optional<std::uint64_t> accepted_answer_id;
  std::optional<std::uint64_t> parent_id;
  std::int64_t score = 0;
  std::vector<std::string> tags;
  std::string body_html;
  Timestamp creation_date{};
};

struct CodeExample {
  std::uint64_t example_id = 0;
  std::uint64_t answer_post_id = 0;
  std::uint64_t question_post_id = 0;
  std::int64_t score = 0;
  std::string code_text;
  Timestamp creation_date{};

  friend bool operator==(const CodeExample&, const CodeExample&) = default;
};

using FunnelCounts = std::vector<std::pair<std::string, std::size_t>>;

/// Splits a decoded Tags attribute. Both the "<java><swing>" and the newer
/// "|java|swing|" dump conventions are understood.
inline std::vector<std::string> split_tags(std::string_view decoded) {
  std::vector<std::string> tags;
  std::string current;
  for (char c : decoded) {
    if (c == '<' || c == '>' || c == '|') {
      if (!current.empty()) tags.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) tags.push_back(std::move(current));
  return tags;
}

namespace detail {

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-') {
    neg = true;
    i = 1;
    if (s.size() == 1) return std::nullopt;
  }
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

inline std::optional<std::uint64_t> parse_positive(std::string_view s) {
  auto v = parse_int(s);
  if (!v || *v <= 0) return std::nullopt;
  return static_cast<std::uint64_t>(*v);
}

}  // namespace detail

/// Streaming reader over a Posts.xml rows document. Only the current <row>
/// element is buffered, so memory stays bounded by the largest single row.
class PostReader {
 public:
  explicit PostReader(std::istream& in, bool strict = false) : in_(in), strict_(strict) {}

  /// Next well-formed row, or nullopt at end of input. Malformed rows are
  /// skipped and counted, or raise in strict mode.
  std::optional<RawPost> next() {
    while (true) {
      auto element = next_element();
      if (!element) return std::nullopt;
      auto post = parse_row(element->first, element->second);
      if (post) return post;
    }
  }

  std::size_t malformed_count() const { return malformed_; }
  const std::string& last_error() const { return last_error_; }
  /// Largest number of input bytes held at once.
  std::size_t peak_buffered() const { return peak_; }

 private:
  static constexpr std::size_t kChunk = 1 << 16;

  bool fill() {
    if (consumed_ > 0) {
      buf_.erase(0, consumed_);
      base_offset_ += consumed_;
      consumed_ = 0;
    }
    std::array<char, kChunk> chunk;
    in_.read(chunk.data(), chunk.size());
    auto got = static_cast<std::size_t>(in_.gcount());
    buf_.append(chunk.data(), got);
    peak_ = std::max(peak_, buf_.size());
    return got > 0;
  }

  // Returns (absolute byte offset, element text) for the next <row ...> tag.
  std::optional<std::pair<std::uint64_t, std::string>> next_element() {
    while (true) {
      std::size_t start = find_row_start(consumed_);
      if (start == std::string::npos) {
        // keep a short tail in case "<row" straddles the chunk boundary
        if (buf_.size() > consumed_ + 4) consumed_ = buf_.size() - 4;
        if (!fill()) return std::nullopt;
        continue;
      }
      consumed_ = start;
      char quote = 0;
      for (std::size_t i = start + 4;; ++i) {
        if (i >= buf_.size()) {
          std::size_t rel = i - consumed_;
          if (!fill()) {
            malformed("unterminated row element", base_offset_ + consumed_);
            consumed_ = buf_.size();
            return std::nullopt;
          }
          i = consumed_ + rel - 1;
          continue;
        }
        char c = buf_[i];
        if (quote) {
          if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
          quote = c;
        } else if (c == '>') {
          std::uint64_t offset = base_offset_ + consumed_;
          std::string element = buf_.substr(consumed_, i + 1 - consumed_);
          consumed_ = i + 1;
          return std::make_pair(offset, std::move(element));
        }
      }
    }
  }

  std::size_t find_row_start(std::size_t from) const {
    std::size_t pos = from;
    while (true) {
      pos = buf_.find("<row", pos);
      if (pos == std::string::npos) return pos;
      if (pos + 4 < buf_.size()) {
        char c = buf_[pos + 4];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '/' || c == '>') return pos;
        pos += 4;
        continue;
      }
      return std::string::npos;
    }
  }

  void malformed(const std::string& what, std::uint64_t offset) {
    last_error_ = what + " at byte offset " + std::to_string(offset);
    ++malformed_;
    if (strict_) throw Error(ErrorCode::kMalformedRecord, last_error_);
  }

  std::optional<RawPost> parse_row(std::uint64_t offset, std::string_view element) {
    if (!is_valid_utf8(element)) {
      last_error_ = "invalid UTF-8 in row at byte offset " + std::to_string(offset);
      ++malformed_;
      if (strict_) throw Error(ErrorCode::kEncodingError, last_error_);
      return std::nullopt;
    }
    std::unordered_map<std::string_view, std::string_view> attrs;
    std::size_t i = 4;
    while (i < element.size()) {
      while (i < element.size() && std::isspace(static_cast<unsigned char>(element[i]))) ++i;
      std::size_t name_start = i;
      while (i < element.size() && element[i] != '=' && element[i] != '>' && element[i] != '/' &&
             !std::isspace(static_cast<unsigned char>(element[i]))) {
        ++i;
      }
      if (i >= element.size() || element[i] != '=') break;
      auto name = element.substr(name_start, i - name_start);
      ++i;
      if (i >= element.size() || (element[i] != '"' && element[i] != '\'')) break;
      char quote = element[i++];
      std::size_t close = element.find(quote, i);
      if (close == std::string_view::npos) break;
      attrs[name] = element.substr(i, close - i);
      i = close + 1;
    }

    auto attr = [&](std::string_view key) -> std::optional<std::string_view> {
      auto it = attrs.find(key);
      if (it == attrs.end()) return std::nullopt;
      return it->second;
    };

    auto id_text = attr("Id");
    auto body = attr("Body");
    std::optional<std::uint64_t> id;
    if (id_text) id = detail::parse_positive(*id_text);
    if (!id) {
      malformed("row missing a valid Id attribute", offset);
      return std::nullopt;
    }
    if (!body) {
      malformed("row " + std::to_string(*id) + " missing Body attribute", offset);
      return std::nullopt;
    }

    RawPost post;
    post.id = *id;
    if (auto t = attr("PostTypeId")) {
      auto v = detail::parse_int(*t);
      if (v && (*v == 1 || *v == 2)) post.type = static_cast<PostType>(*v);
    }
    if (auto a = attr("AcceptedAnswerId")) post.accepted_answer_id = detail::parse_positive(*a);
    if (auto p = attr("ParentId")) post.parent_id = detail::parse_positive(*p);
    if (auto s = attr("Score")) post.score = detail::parse_int(*s).value_or(0);
    if (auto t = attr("Tags")) post.tags = split_tags(decode_entities(*t));
    post.body_html = decode_entities(*body);
    if (auto c = attr("CreationDate")) {
      if (auto ts = parse_timestamp(*c)) post.creation_date = *ts;
    }
    return post;
  }

  std::istream& in_;
  bool strict_;
  std::string buf_;
  std::size_t consumed_ = 0;
  std::uint64_t base_offset_ = 0;
  std::size_t malformed_ = 0;
  std::size_t peak_ = 0;
  std::string last_error_;
};

inline const std::vector<std::string>& default_excluded_tags() {
  static const std::vector<std::string> tags = {"javascript", "c",     "c++",    "c#",   "python", "php",
                                                "ruby",       "kotlin", "scala", "html", "css"};
  return tags;
}

inline bool is_java_only(const RawPost& question,
                         const std::vector<std::string>& excluded_tags = default_excluded_tags()) {
  const auto& tags = question.tags;
  if (std::find(tags.begin(), tags.end(), "java") == tags.end()) return false;
  return std::none_of(tags.begin(), tags.end(), [&](const std::string& t) {
    return std::find(excluded_tags.begin(), excluded_tags.end(), t) != excluded_tags.end();
  });
}

struct JoinedAnswer {
  std::uint64_t question_id;
  RawPost answer;
};

/// Incremental join of java-only questions to their accepted answers.
///
/// Dumps are ordered by Id and an answer always has a larger Id than its
/// question, so answers normally arrive after the question that claims them.
/// An answer whose ParentId is above every Id seen so far is parked until its
/// question shows up; nothing else is buffered.
class AcceptedAnswerJoiner {
 public:
  explicit AcceptedAnswerJoiner(std::vector<std::string> excluded_tags = default_excluded_tags())
      : excluded_(std::move(excluded_tags)) {}

  std::optional<JoinedAnswer> offer(RawPost post) {
    std::uint64_t id = post.id;
    std::optional<JoinedAnswer> joined;
    if (post.type == PostType::kQuestion) {
      if (!post.tags.empty() && is_java_only(post, excluded_)) {
        ++java_questions_;
        if (post.accepted_answer_id) {
          auto parked = pending_.find(*post.accepted_answer_id);
          if (parked != pending_.end()) {
            joined = JoinedAnswer{id, std::move(parked->second)};
            pending_.erase(parked);
          } else {
            wanted_.emplace(*post.accepted_answer_id, id);
          }
        }
      }
    } else if (auto it = wanted_.find(id); it != wanted_.end()) {
      joined = JoinedAnswer{it->second, std::move(post)};
      wanted_.erase(it);
    } else if (post.parent_id && *post.parent_id > watermark_) {
      pending_.emplace(id, std::move(post));
    }
    watermark_ = std::max(watermark_, id);
    return joined;
  }

  /// Drops parked answers nobody claimed; accepted ids never seen become
  /// dangling references.
  void finish() {
    dangling_ += wanted_.size();
    wanted_.clear();
    pending_.clear();
  }

  std::size_t java_questions() const { return java_questions_; }
  std::size_t dangling() const { return dangling_; }

 private:
  std::vector<std::string> excluded_;
  std::unordered_map<std::uint64_t, std::uint64_t> wanted_;  // answer id -> question id
  std::unordered_map<std::uint64_t, RawPost> pending_;
  std::uint64_t watermark_ = 0;
  std::size_t java_questions_ = 0;
  std::size_t dangling_ = 0;
};

struct AcceptedAnswers {
  std::map<std::uint64_t, RawPost> by_question;
  std::size_t dangling = 0;
};

inline AcceptedAnswers select_accepted_answers(
    const std::vector<RawPost>& posts, const std::vector<std::string>& excluded_tags = default_excluded_tags()) {
  AcceptedAnswerJoiner joiner(excluded_tags);
  AcceptedAnswers result;
  for (const auto& p : posts) {
    if (auto j = joiner.offer(p)) result.by_question.emplace(j->question_id, std::move(j->answer));
  }
  joiner.finish();
  result.dangling = joiner.dangling();
  return result;
}

/// Heuristic code detector: at least two of {';', a brace, '(', a common Java
/// keyword as a whole word} must be present.
inline bool looks_like_code(std::string_view text) {
  static constexpr std::array<std::string_view, 7> kKeywords = {"class", "public", "void",  "new",
                                                               "import", "return", "static"};
  int signals = 0;
  if (text.find(';') != std::string_view::npos) ++signals;
  if (text.find_first_of("{}") != std::string_view::npos) ++signals;
  if (text.find('(') != std::string_view::npos) ++signals;

  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && is_word(text[i])) ++i;
    auto word = text.substr(start, i - start);
    if (std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end()) {
      ++signals;
      break;
    }
  }
  return signals >= 2;
}

struct CorpusOptions {
  std::int64_t min_score = 2;
  std::size_t min_len = 100;
  std::optional<Timestamp> cutoff_date;
  bool strict = false;
  std::vector<std::string> excluded_tags = default_excluded_tags();
};

struct CorpusBuild {
  std::vector<CodeExample> examples;
  FunnelCounts funnel;
  std::size_t dangling_references = 0;
  std::size_t malformed_records = 0;
  std::size_t malformed_blocks = 0;
};

namespace stage {
inline constexpr std::string_view kJavaOnly = "java_only_questions";
inline constexpr std::string_view kAccepted = "accepted_answers";
inline constexpr std::string_view kWithCode = "with_code_blocks";
inline constexpr std::string_view kMinLength = "min_length";
inline constexpr std::string_view kCodeLike = "code_like";
inline constexpr std::string_view kMinScore = "min_score";
}  // namespace stage

/// Runs the ingestion funnel over a Posts.xml stream.
///
/// Funnel counts are in answer posts: an answer survives a stage while at
/// least one of its code blocks does. Each surviving block becomes its own
/// CodeExample, numbered from 1 in emission order.
inline CorpusBuild build_corpus(std::istream& dump, const CorpusOptions& options = {}) {
  if (options.min_score <= 0 || options.min_len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "thresholds must be positive");
  }
  PostReader reader(dump, options.strict);
  AcceptedAnswerJoiner joiner(options.excluded_tags);
  CorpusBuild out;
  std::size_t accepted = 0, with_code = 0, long_enough = 0, code_like = 0, scored = 0;

  auto process = [&](JoinedAnswer joined) {
    ++accepted;
    auto extraction = extract_code_blocks(joined.answer.body_html);
    out.malformed_blocks += extraction.malformed;
    auto& blocks = extraction.blocks;
    if (blocks.empty()) return;
    ++with_code;
    std::erase_if(blocks, [&](const std::string& b) { return utf8_length(b) <= options.min_len; });
    if (blocks.empty()) return;
    ++long_enough;
    std::erase_if(blocks, [](const std::string& b) { return !looks_like_code(b); });
    if (blocks.empty()) return;
    ++code_like;
    if (joined.answer.score < options.min_score) return;
    ++scored;
    for (auto& b : blocks) {
      CodeExample ex;
      ex.example_id = out.examples.size() + 1;
      ex.answer_post_id = joined.answer.id;
      ex.question_post_id = joined.question_id;
      ex.score = joined.answer.score;
      ex.code_text = std::move(b);
      ex.creation_date = joined.answer.creation_date;
      out.examples.push_back(std::move(ex));
    }
  };

  while (auto post = reader.next()) {
    if (options.cutoff_date && post->creation_date > *options.cutoff_date) continue;
    if (auto joined = joiner.offer(std::move(*post))) process(std::move(*joined));
  }
  joiner.finish();

  out.dangling_references = joiner.dangling();
  out.malformed_records = reader.malformed_count();
  out.funnel = {{std::string(stage::kJavaOnly), joiner.java_questions()},
                {std::string(stage::kAccepted), accepted},
                {std::string(stage::kWithCode), with_code},
                {std::string(stage::kMinLength), long_enough},
                {std::string(stage::kCodeLike), code_like},
                {std::string(stage::kMinScore), scored}};
  return out;
}

inline void write_funnel(std::ostream& out, const FunnelCounts& funnel) {
  for (const auto& [name, count] : funnel) out << name << '\t' << count << '\n';
}

// Corpus files are JSON Lines with a fixed key order.
inline void write_corpus(std::ostream& out, const std::vector<CodeExample>& examples) {
  for (const auto& ex : examples) {
    nlohmann::ordered_json j;
    j["example_id"] = ex.example_id;
    j["answer_post_id"] = ex.answer_post_id;
    j["question_post_id"] = ex.question_post_id;
    j["score"] = ex.score;
    j["creation_date"] = format_timestamp(ex.creation_date);
    j["code_text"] = ex.code_text;
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing corpus");
}

inline std::vector<CodeExample> read_corpus(std::istream& in) {
  std::vector<CodeExample> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      CodeExample ex;
      ex.example_id = j.at("example_id").get<std::uint64_t>();
      ex.answer_post_id = j.at("answer_post_id").get<std::uint64_t>();
      ex.question_post_id = j.at("question_post_id").get<std::uint64_t>();
      ex.score = j.at("score").get<std::int64_t>();
      auto date = parse_timestamp(j.at("creation_date").get<std::string>());
      if (!date) throw Error(ErrorCode::kParseError, "bad creation_date");
      ex.creation_date = *date;
      ex.code_text = j.at("code_text").get<std::string>();
      examples.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, "corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return examples;
}

}  // namespace coderec
