#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "simpson/binary.hpp"
#include "simpson/multiclass.hpp"

namespace simpson {

// Shortest decimal form that parses back to the same double.
std::string format_real(double value);

// Binary label file: "y<TAB>yhat" per line, '#' comments and blank lines skipped.
BinaryPredictionSet parse_binary_labels(std::istream& in, std::string_view source);
BinaryPredictionSet read_binary_labels(const std::string& path);
void write_binary_labels(std::ostream& out, const BinaryPredictionSet& set);

// Multiclass file: "label<TAB>decision" or "label<TAB>p_1,...,p_K"; 0-based
// class indices, one record kind per file. When classes is unset, K is the
// probability row width, or max index + 1 (at least 2) for decisions.
MultiClassSet parse_multiclass(std::istream& in, std::string_view source,
                               std::optional<std::size_t> classes = std::nullopt);
MultiClassSet read_multiclass(const std::string& path,
                              std::optional<std::size_t> classes = std::nullopt);

// NER batch file: "sentence_id<TAB>label<TAB>p_1,...,p_K" per token, blank line
// between sentences, label -1 marks padding.
TaggedSentenceBatch parse_ner_batch(std::istream& in, std::string_view source);
TaggedSentenceBatch read_ner_batch(const std::string& path);

}  // namespace simpson
