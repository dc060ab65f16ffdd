#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "relsim/errors.hpp"
#include "relsim/finset.hpp"

namespace relsim {

/// A finite commutative monoid given by its addition table.
class MonoidTable {
 public:
  MonoidTable(FinSet carrier, std::size_t unit, std::vector<std::vector<std::size_t>> add)
      : carrier_(std::move(carrier)), unit_(unit), add_(std::move(add)) {
    const std::size_t n = carrier_.size();
    if (n == 0) throw SpecError("monoid carrier must be non-empty");
    if (unit_ >= n) throw SpecError("monoid unit outside carrier");
    if (add_.size() != n) throw SpecError("monoid table has wrong number of rows");
    for (const auto& row : add_) {
      if (row.size() != n) throw SpecError("monoid table has a row of wrong length");
      for (auto v : row)
        if (v >= n) throw SpecError("monoid table entry outside carrier");
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (add_[unit_][a] != a || add_[a][unit_] != a) throw SpecError("monoid unit law fails");
      for (std::size_t b = 0; b < n; ++b) {
        if (add_[a][b] != add_[b][a]) throw SpecError("monoid addition is not commutative");
        for (std::size_t c = 0; c < n; ++c)
          if (add_[add_[a][b]][c] != add_[a][add_[b][c]])
            throw SpecError("monoid addition is not associative");
      }
    }
  }

  /// Z_n under addition mod n.
  static MonoidTable cyclic(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
    return MonoidTable(FinSet(std::move(names)), 0, std::move(t));
  }

  /// {0, ..., cap} with addition truncated at cap.
  static MonoidTable capped(std::size_t cap) {
    const std::size_t n = cap + 1;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) t[a][b] = std::min(a + b, cap);
    return MonoidTable(FinSet(std::move(names)), 0, std::move(t));
  }

  const FinSet& carrier() const noexcept { return carrier_; }
  std::size_t size() const noexcept { return carrier_.size(); }
  std::size_t unit() const noexcept { return unit_; }
  std::size_t add(std::size_t a, std::size_t b) const { return add_[a][b]; }
  const std::vector<std::vector<std::size_t>>& table() const noexcept { return add_; }

  friend bool operator==(const MonoidTable& a, const MonoidTable& b) {
    return a.carrier_ == b.carrier_ && a.unit_ == b.unit_ && a.add_ == b.add_;
  }

 private:
  FinSet carrier_;
  std::size_t unit_;
  std::vector<std::vector<std::size_t>> add_;
};

/// m + n = 0 implies m = n = 0.
inline bool is_positive(const MonoidTable& m) {
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m.size(); ++b)
      if (m.add(a, b) == m.unit() && (a != m.unit() || b != m.unit())) return false;
  return true;
}

/// a1 + a2 = b1 + b2 implies a 2x2 matrix with row sums a_i and column sums b_j.
inline bool is_refinable(const MonoidTable& m) {
  const std::size_t n = m.size();
  for (std::size_t a1 = 0; a1 < n; ++a1)
    for (std::size_t a2 = 0; a2 < n; ++a2)
      for (std::size_t b1 = 0; b1 < n; ++b1)
        for (std::size_t b2 = 0; b2 < n; ++b2) {
          if (m.add(a1, a2) != m.add(b1, b2)) continue;
          bool found = false;
          for (std::size_t m11 = 0; m11 < n && !found; ++m11)
            for (std::size_t m12 = 0; m12 < n && !found; ++m12) {
              if (m.add(m11, m12) != a1) continue;
              for (std::size_t m21 = 0; m21 < n && !found; ++m21) {
                if (m.add(m11, m21) != b1) continue;
                for (std::size_t m22 = 0; m22 < n && !found; ++m22)
                  found = m.add(m21, m22) == a2 && m.add(m12, m22) == b2;
              }
            }
          if (!found) return false;
        }
  return true;
}

}  // namespace relsim
