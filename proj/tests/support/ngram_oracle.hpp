#pragma once

// Reference BLEU statistics computed by brute force: every hypothesis n-gram
// is matched against reference positions one at a time, consuming each
// reference occurrence at most once. No maps, no shared code with the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace simpson::testing {

struct OracleStats {
  std::array<std::int64_t, 4> h{};
  std::array<std::int64_t, 4> l{};
  std::int64_t m1 = 0;
};

inline std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

inline OracleStats oracle_stats(const std::string& hyp_line, const std::string& ref_line) {
  const auto hyp = split_words(hyp_line);
  const auto ref = split_words(ref_line);
  OracleStats s;
  s.m1 = static_cast<std::int64_t>(ref.size());
  for (std::size_t k = 1; k <= 4; ++k) {
    if (hyp.size() < k) continue;
    const std::size_t hyp_count = hyp.size() - k + 1;
    s.l[k - 1] = static_cast<std::int64_t>(hyp_count);
    if (ref.size() < k) continue;
    std::vector<bool> used(ref.size() - k + 1, false);
    for (std::size_t i = 0; i < hyp_count; ++i) {
      for (std::size_t j = 0; j < used.size(); ++j) {
        if (used[j]) continue;
        bool same = true;
        for (std::size_t t = 0; t < k && same; ++t) same = hyp[i + t] == ref[j + t];
        if (same) {
          used[j] = true;
          ++s.h[k - 1];
          break;
        }
      }
    }
  }
  return s;
}

inline OracleStats pooled(const std::vector<OracleStats>& parts) {
  OracleStats total;
  for (const auto& p : parts) {
    for (int k = 0; k < 4; ++k) {
      total.h[k] += p.h[k];
      total.l[k] += p.l[k];
    }
    total.m1 += p.m1;
  }
  return total;
}

// Log form: sum_k log(H_k/L_k)/4 - max(M/L_1, 1).
inline double oracle_log_bleu(const OracleStats& s) {
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) acc += std::log(static_cast<double>(s.h[k]) / s.l[k]) / 4.0;
  const double ratio = static_cast<double>(s.m1) / static_cast<double>(s.l[0]);
  return acc - (ratio > 1.0 ? ratio : 1.0);
}

}  // namespace simpson::testing
