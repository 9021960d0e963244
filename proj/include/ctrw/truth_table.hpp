#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctrw {

inline constexpr int kMaxVars = 16;

/// Complete truth table over `num_vars` variables. Pattern p assigns bit (i-1)
/// of p to variable i, so variable 1 is the least significant pattern bit.
/// Storage is 64-bit words; unused high bits of a short table stay zero.
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(int num_vars, bool value = false);

  static TruthTable nth_var(int num_vars, int var);  // var is 1-based

  int num_vars() const { return num_vars_; }
  std::size_t num_bits() const { return std::size_t{1} << num_vars_; }
  std::size_t num_words() const { return words_.size(); }

  std::span<uint64_t> words() { return words_; }
  std::span<const uint64_t> words() const { return words_; }

  bool get(std::size_t p) const { return (words_[p >> 6] >> (p & 63)) & 1u; }
  void set(std::size_t p, bool v) {
    uint64_t m = uint64_t{1} << (p & 63);
    if (v)
      words_[p >> 6] |= m;
    else
      words_[p >> 6] &= ~m;
  }

  std::size_t popcount() const;
  bool is_zero() const;
  bool is_ones() const;

  TruthTable operator~() const;
  TruthTable operator&(const TruthTable& o) const;
  TruthTable operator|(const TruthTable& o) const;
  TruthTable operator^(const TruthTable& o) const;
  TruthTable& operator&=(const TruthTable& o);
  TruthTable& operator|=(const TruthTable& o);
  TruthTable& operator^=(const TruthTable& o);

  /// Complement when `c` is set.
  TruthTable flip_if(bool c) const { return c ? ~*this : *this; }

  bool operator==(const TruthTable& o) const = default;

  /// Most-significant-first hex; one digit for tables shorter than 4 bits.
  std::string to_hex() const;
  static TruthTable from_hex(std::string_view hex, int num_vars);

  std::size_t hash() const;

  /// Mask of the padding-free bits of the last word.
  uint64_t tail_mask() const;

 private:
  void clear_tail();

  int num_vars_ = 0;
  std::vector<uint64_t> words_{0};
};

/// Strict IWLS reader: exactly 2^K/4 hex digits, K >= 2.
TruthTable parse_truth_hex(std::string_view hex, int num_vars);

/// Reads one hex table per non-empty line. The variable count follows from
/// the line length.
std::vector<TruthTable> parse_truth_file(std::string_view text);

/// True when `t` agrees with `val` on every bit of `care`.
inline bool matches_on(const TruthTable& t, const TruthTable& care,
                       const TruthTable& val) {
  auto tw = t.words(), cw = care.words(), vw = val.words();
  for (std::size_t i = 0; i < tw.size(); ++i)
    if ((tw[i] ^ vw[i]) & cw[i]) return false;
  return true;
}

struct TruthTableHash {
  std::size_t operator()(const TruthTable& t) const { return t.hash(); }
};

}  // namespace ctrw
