#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relsim/errors.hpp"

namespace relsim {

/// A finite carrier: an ordered list of distinct element names.
///
/// Carriers produced by functor evaluation are *anonymous*: they only know their
/// size and render element `i` as its index. Two carriers are compatible when
/// their sizes agree and, if both are named, their names agree elementwise.
class FinSet {
 public:
  FinSet() = default;

  explicit FinSet(std::vector<std::string> names) : size_(names.size()) {
    auto table = std::make_shared<Table>();
    table->names = std::move(names);
    for (std::size_t i = 0; i < table->names.size(); ++i) {
      if (!table->index.emplace(table->names[i], i).second)
        throw SpecError("duplicate element '" + table->names[i] + "' in finite set");
    }
    table_ = std::move(table);
  }

  FinSet(std::initializer_list<const char*> names)
      : FinSet(std::vector<std::string>(names.begin(), names.end())) {}

  static FinSet anonymous(std::size_t n) {
    FinSet s;
    s.size_ = n;
    return s;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool named() const noexcept { return table_ != nullptr; }

  std::string name(std::size_t i) const {
    return table_ ? table_->names.at(i) : std::to_string(i);
  }

  std::vector<std::string> names() const {
    if (table_) return table_->names;
    std::vector<std::string> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.push_back(std::to_string(i));
    return out;
  }

  std::optional<std::size_t> index_of(const std::string& name) const {
    if (table_) {
      auto it = table_->index.find(name);
      if (it == table_->index.end()) return std::nullopt;
      return it->second;
    }
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(name, &pos);
      if (pos == name.size() && v < size_) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }

  friend bool compatible(const FinSet& a, const FinSet& b) {
    if (a.size_ != b.size_) return false;
    if (!a.table_ || !b.table_ || a.table_ == b.table_) return true;
    return a.table_->names == b.table_->names;
  }

  friend bool operator==(const FinSet& a, const FinSet& b) { return compatible(a, b); }

 private:
  struct Table {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> index;
  };

  std::size_t size_ = 0;
  std::shared_ptr<const Table> table_;
};

inline void require_compatible(const FinSet& a, const FinSet& b, const char* where) {
  if (!compatible(a, b))
    throw CarrierMismatch(std::string(where) + ": carrier of size " + std::to_string(a.size()) +
                          " does not match carrier of size " + std::to_string(b.size()));
}

/// Disjoint union X+Y; names are kept when they do not collide, else prefixed.
inline FinSet disjoint_union(const FinSet& x, const FinSet& y) {
  if (!x.named() && !y.named()) return FinSet::anonymous(x.size() + y.size());
  std::vector<std::string> names;
  names.reserve(x.size() + y.size());
  bool clash = false;
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& n : x.names()) seen[n]++;
    for (const auto& n : y.names())
      if (seen.count(n)) clash = true;
  }
  for (const auto& n : x.names()) names.push_back(clash ? "inl:" + n : n);
  for (const auto& n : y.names()) names.push_back(clash ? "inr:" + n : n);
  return FinSet(std::move(names));
}

/// A total function between finite carriers, stored as a lookup table.
class FinFun {
 public:
  FinFun() = default;
  FinFun(FinSet dom, FinSet cod, std::vector<std::size_t> table)
      : dom_(std::move(dom)), cod_(std::move(cod)), table_(std::move(table)) {
    if (table_.size() != dom_.size())
      throw SpecError("function table has " + std::to_string(table_.size()) +
                      " entries for a domain of size " + std::to_string(dom_.size()));
    for (auto v : table_)
      if (v >= cod_.size())
        throw SpecError("function value " + std::to_string(v) + " outside codomain of size " +
                        std::to_string(cod_.size()));
  }

  static FinFun identity(const FinSet& x) {
    std::vector<std::size_t> t(x.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = i;
    return FinFun(x, x, std::move(t));
  }

  static FinFun constant(const FinSet& dom, const FinSet& cod, std::size_t value) {
    return FinFun(dom, cod, std::vector<std::size_t>(dom.size(), value));
  }

  const FinSet& dom() const noexcept { return dom_; }
  const FinSet& cod() const noexcept { return cod_; }
  const std::vector<std::size_t>& table() const noexcept { return table_; }
  std::size_t operator()(std::size_t x) const { return table_.at(x); }

  bool injective() const {
    std::vector<bool> hit(cod_.size(), false);
    for (auto v : table_) {
      if (hit[v]) return false;
      hit[v] = true;
    }
    return true;
  }

  bool surjective() const {
    std::vector<bool> hit(cod_.size(), false);
    for (auto v : table_) hit[v] = true;
    for (bool h : hit)
      if (!h) return false;
    return true;
  }

  friend bool operator==(const FinFun& a, const FinFun& b) {
    return a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.table_ == b.table_;
  }

 private:
  FinSet dom_;
  FinSet cod_;
  std::vector<std::size_t> table_;
};

/// Applicative composition: `then(f, g)` is g∘f (first f, then g).
inline FinFun then(const FinFun& f, const FinFun& g) {
  require_compatible(f.cod(), g.dom(), "function composition");
  std::vector<std::size_t> t(f.dom().size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = g(f(i));
  return FinFun(f.dom(), g.cod(), std::move(t));
}

}  // namespace relsim
