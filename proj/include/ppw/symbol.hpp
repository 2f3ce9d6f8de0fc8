#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace ppw {

/// Interned identifier. Equal spellings share one id for the life of the
/// process, so comparisons and hashing are integer operations.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);

  /// The symbol with a previously issued id.
  static Symbol from_id(std::uint32_t id) {
    Symbol s;
    s.id_ = id;
    return s;
  }

  std::string_view str() const;
  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  // Orders by interning id, not spelling. Use str() when a stable
  // lexicographic order is required.
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

 private:
  std::uint32_t id_ = 0;
};

}  // namespace ppw

template <>
struct std::hash<ppw::Symbol> {
  std::size_t operator()(ppw::Symbol s) const noexcept { return std::hash<std::uint32_t>{}(s.id()); }
};
