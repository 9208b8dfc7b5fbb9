#include "simpson/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "simpson/error.hpp"

namespace simpson {
namespace {

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::vector<double> parse_prob_row(std::string_view text, std::string_view source,
                                   std::size_t line) {
  std::vector<double> row;
  for (auto field : split(text, ',')) {
    auto v = parse_number<double>(field);
    if (!v) fail(source, line, "malformed probability '" + std::string(field) + "'");
    row.push_back(*v);
  }
  return row;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

BinaryPredictionSet parse_binary_labels(std::istream& in, std::string_view source) {
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> yhat;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (skippable(raw)) continue;
    const auto fields = split(trim(raw), '\t');
    if (fields.size() != 2) fail(source, line, "expected two tab-separated fields");
    const auto a = trim(fields[0]);
    const auto b = trim(fields[1]);
    if ((a != "0" && a != "1") || (b != "0" && b != "1")) {
      fail(source, line, "labels must be 0 or 1");
    }
    y.push_back(a == "1");
    yhat.push_back(b == "1");
  }
  if (y.empty()) throw ParseError(std::string(source) + ": no samples");
  return BinaryPredictionSet(std::move(y), std::move(yhat));
}

BinaryPredictionSet read_binary_labels(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_binary_labels(in, path);
}

void write_binary_labels(std::ostream& out, const BinaryPredictionSet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << int{set.y()[i]} << '\t' << int{set.yhat()[i]} << '\n';
  }
}

MultiClassSet parse_multiclass(std::istream& in, std::string_view source,
                               std::optional<std::size_t> classes) {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> decisions;
  std::vector<double> probs;
  std::optional<bool> soft;
  std::size_t width = 0;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (skippable(raw)) continue;
    const auto fields = split(trim(raw), '\t');
    if (fields.size() != 2) fail(source, line, "expected two tab-separated fields");
    auto label = parse_number<std::size_t>(fields[0]);
    if (!label) fail(source, line, "malformed label index");
    const bool row_is_soft = fields[1].find(',') != std::string_view::npos;
    if (soft && *soft != row_is_soft) {
      fail(source, line, "mixes decision and probability records");
    }
    soft = row_is_soft;
    labels.push_back(*label);
    if (row_is_soft) {
      auto row = parse_prob_row(fields[1], source, line);
      if (width == 0) width = row.size();
      if (row.size() != width) fail(source, line, "probability row width changes");
      probs.insert(probs.end(), row.begin(), row.end());
    } else {
      auto decision = parse_number<std::size_t>(fields[1]);
      if (!decision) fail(source, line, "malformed decision index");
      decisions.push_back(*decision);
    }
  }
  if (labels.empty()) throw ParseError(std::string(source) + ": no samples");
  if (*soft) {
    if (classes && *classes != width) {
      throw ParseError(std::string(source) + ": probability rows have " +
                       std::to_string(width) + " entries, expected " +
                       std::to_string(*classes));
    }
    return MultiClassSet::with_probabilities(width, std::move(labels), std::move(probs));
  }
  std::size_t k = classes.value_or(0);
  if (!classes) {
    k = 2;
    for (auto v : labels) k = std::max(k, v + 1);
    for (auto v : decisions) k = std::max(k, v + 1);
  }
  return MultiClassSet::with_decisions(k, std::move(labels), std::move(decisions));
}

MultiClassSet read_multiclass(const std::string& path, std::optional<std::size_t> classes) {
  auto in = open_or_throw(path);
  return parse_multiclass(in, path, classes);
}

TaggedSentenceBatch parse_ner_batch(std::istream& in, std::string_view source) {
  std::vector<TaggedSentence> sentences;
  TaggedSentence current;
  std::string current_id;
  std::size_t width = 0;
  std::string raw;
  std::size_t line = 0;

  auto flush = [&] {
    if (!current.labels.empty()) sentences.push_back(std::move(current));
    current = TaggedSentence{};
    current_id.clear();
  };

  while (std::getline(in, raw)) {
    ++line;
    const auto t = trim(raw);
    if (t.empty()) {
      flush();
      continue;
    }
    if (t.front() == '#') continue;
    const auto fields = split(t, '\t');
    if (fields.size() != 3) fail(source, line, "expected three tab-separated fields");
    const std::string id(trim(fields[0]));
    if (!current.labels.empty() && id != current_id) {
      fail(source, line, "sentence id changes without a blank line");
    }
    current_id = id;
    auto label = parse_number<int>(fields[1]);
    if (!label || *label < kPaddingLabel) fail(source, line, "malformed label index");
    auto row = parse_prob_row(fields[2], source, line);
    if (width == 0) width = row.size();
    if (row.size() != width) fail(source, line, "probability row width changes");
    current.labels.push_back(*label);
    current.probs.insert(current.probs.end(), row.begin(), row.end());
  }
  flush();
  if (sentences.empty()) throw ParseError(std::string(source) + ": no sentences");
  return TaggedSentenceBatch(width, std::move(sentences));
}

TaggedSentenceBatch read_ner_batch(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_ner_batch(in, path);
}

}  // namespace simpson
