#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "scfdma/patterns.hpp"

namespace scfdma {

struct UserAllocation {
  std::size_t pattern = 0;                 // column index in the PatternSet
  std::optional<std::size_t> modulation;   // set for rate-constrained allocations
};

/// One entry per user.
using Allocation = std::vector<UserAllocation>;

/// Lists every broken constraint: wrong user count, bad pattern index,
/// sub-channels left uncovered or covered twice. Empty result means valid.
inline std::vector<std::string> validate_allocation(const PatternSet& patterns, const Allocation& alloc,
                                                    std::size_t n_users) {
  std::vector<std::string> out;
  if (alloc.size() != n_users)
    out.push_back("expected " + std::to_string(n_users) + " users, got " + std::to_string(alloc.size()));
  std::vector<int> cover(static_cast<std::size_t>(patterns.n_subchannels()), 0);
  for (std::size_t k = 0; k < alloc.size(); ++k) {
    if (alloc[k].pattern >= patterns.size()) {
      out.push_back("user " + std::to_string(k) + ": pattern index out of range");
      continue;
    }
    const Pattern& p = patterns[alloc[k].pattern];
    for (int n = p.first; n < p.first + p.length; ++n) ++cover[static_cast<std::size_t>(n)];
  }
  for (std::size_t n = 0; n < cover.size(); ++n)
    if (cover[n] != 1)
      out.push_back("sub-channel " + std::to_string(n + 1) + ": covered " + std::to_string(cover[n]) + " times");
  return out;
}

}  // namespace scfdma
