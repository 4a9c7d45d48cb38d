#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace scfdma {

inline constexpr int kMaxSubchannels = 32;

/// Contiguous run of sub-channels [first, first + length), zero-based.
/// A zero length is the empty pattern (user gets nothing).
struct Pattern {
  int first = 0;
  int length = 0;

  bool empty() const { return length == 0; }
  int last() const { return first + length - 1; }
  bool contains(int n) const { return n >= first && n < first + length; }

  std::uint64_t mask() const {
    if (length == 0) return 0;
    return ((std::uint64_t{1} << length) - 1) << first;
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// One-based label used in reports: "-" for empty, "3", or "2-5".
inline std::string label(const Pattern& p) {
  if (p.empty()) return "-";
  if (p.length == 1) return std::to_string(p.first + 1);
  return std::to_string(p.first + 1) + "-" + std::to_string(p.last() + 1);
}

/// All contiguous patterns of N sub-channels plus the empty one.
/// Column 0 is empty, the rest ascend by (length, first).
class PatternSet {
 public:
  explicit PatternSet(int n_subchannels, int max_subchannels = kMaxSubchannels)
      : n_(n_subchannels) {
    if (max_subchannels > kMaxSubchannels)
      throw std::invalid_argument("pattern ceiling cannot exceed " + std::to_string(kMaxSubchannels));
    if (n_subchannels < 1 || n_subchannels > max_subchannels)
      throw std::out_of_range("sub-channel count " + std::to_string(n_subchannels) +
                              " outside [1, " + std::to_string(max_subchannels) + "]");
    columns_.reserve(count(n_));
    columns_.push_back(Pattern{});
    for (int len = 1; len <= n_; ++len)
      for (int first = 0; first + len <= n_; ++first) columns_.push_back(Pattern{first, len});
  }

  /// J = N(N+1)/2 + 1.
  static std::size_t count(int n) { return static_cast<std::size_t>(n) * (n + 1) / 2 + 1; }

  int n_subchannels() const { return n_; }
  std::size_t size() const { return columns_.size(); }
  const Pattern& operator[](std::size_t j) const { return columns_[j]; }
  const std::vector<Pattern>& columns() const { return columns_; }

  std::size_t index_of(const Pattern& p) const {
    if (p.empty()) return 0;
    if (p.first < 0 || p.length < 0 || p.first + p.length > n_)
      throw std::out_of_range("pattern " + label(p) + " does not fit " + std::to_string(n_) + " sub-channels");
    const std::size_t before = static_cast<std::size_t>(p.length - 1) * (n_ + 1) -
                               static_cast<std::size_t>(p.length - 1) * p.length / 2;
    return 1 + before + static_cast<std::size_t>(p.first);
  }

  /// Binary N x J incidence matrix, entry (n, j) = 1 iff pattern j holds sub-channel n.
  Eigen::MatrixXi matrix() const {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n_, static_cast<Eigen::Index>(columns_.size()));
    for (std::size_t j = 0; j < columns_.size(); ++j)
      for (int n = columns_[j].first; n < columns_[j].first + columns_[j].length; ++n)
        a(n, static_cast<Eigen::Index>(j)) = 1;
    return a;
  }

 private:
  int n_;
  std::vector<Pattern> columns_;
};

inline PatternSet enumerate_patterns(int n_subchannels, int max_subchannels = kMaxSubchannels) {
  return PatternSet(n_subchannels, max_subchannels);
}

/// Reads patterns back out of an incidence matrix. Throws if a column is not contiguous.
inline std::vector<Pattern> columns_from_matrix(const Eigen::MatrixXi& a) {
  std::vector<Pattern> out;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Pattern p;
    int seen = 0;
    for (Eigen::Index n = 0; n < a.rows(); ++n) {
      if (a(n, j) == 0) continue;
      if (a(n, j) != 1) throw std::invalid_argument("incidence entries must be 0 or 1");
      if (seen == 0) p.first = static_cast<int>(n);
      ++seen;
    }
    p.length = seen;
    for (int n = p.first; n < p.first + p.length; ++n)
      if (a(n, j) != 1) throw std::invalid_argument("column " + std::to_string(j) + " is not contiguous");
    if (seen == 0) p.first = 0;
    out.push_back(p);
  }
  return out;
}

/// Which (user, modulation, pattern) triples meet the per-modulation
/// minimum sub-channel count. The empty pattern is never allowed here.
class FeasibilityMask {
 public:
  FeasibilityMask(const PatternSet& patterns, Eigen::MatrixXi min_counts)
      : min_counts_(std::move(min_counts)), n_patterns_(patterns.size()) {
    if ((min_counts_.array() < 1).any())
      throw std::invalid_argument("minimum sub-channel counts must be at least 1");
    for (Eigen::Index k = 0; k < min_counts_.rows(); ++k)
      for (Eigen::Index m = 1; m < min_counts_.cols(); ++m)
        if (min_counts_(k, m) > min_counts_(k, m - 1))
          throw std::invalid_argument("minimum counts must not increase with modulation order");
    allowed_.assign(static_cast<std::size_t>(min_counts_.size()) * n_patterns_, 0);
    for (int k = 0; k < n_users(); ++k)
      for (int m = 0; m < n_modulations(); ++m)
        for (std::size_t j = 0; j < n_patterns_; ++j)
          allowed_[flat(k, m, j)] = patterns[j].length >= min_counts_(k, m) ? 1 : 0;
  }

  int n_users() const { return static_cast<int>(min_counts_.rows()); }
  int n_modulations() const { return static_cast<int>(min_counts_.cols()); }
  std::size_t n_patterns() const { return n_patterns_; }
  int min_count(int k, int m) const { return min_counts_(k, m); }
  const Eigen::MatrixXi& min_counts() const { return min_counts_; }

  bool allowed(int k, int m, std::size_t j) const { return allowed_[flat(k, m, j)] != 0; }

  std::size_t allowed_count(int k, int m) const {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n_patterns_; ++j) c += allowed(k, m, j);
    return c;
  }

  /// (user, modulation) pairs for which nothing is allowed.
  std::vector<std::pair<int, int>> empty_options() const {
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < n_users(); ++k)
      for (int m = 0; m < n_modulations(); ++m)
        if (allowed_count(k, m) == 0) out.emplace_back(k, m);
    return out;
  }

 private:
  std::size_t flat(int k, int m, std::size_t j) const {
    return (static_cast<std::size_t>(k) * n_modulations() + m) * n_patterns_ + j;
  }

  Eigen::MatrixXi min_counts_;
  std::size_t n_patterns_;
  std::vector<std::uint8_t> allowed_;
};

inline FeasibilityMask build_feasibility_mask(const PatternSet& patterns, const Eigen::MatrixXi& min_counts) {
  return FeasibilityMask(patterns, min_counts);
}

}  // namespace scfdma
