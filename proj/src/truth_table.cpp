#include "ctrw/truth_table.hpp"

#include <cctype>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

constexpr uint64_t kVarMasks[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

std::size_t words_for(int num_vars) {
  return num_vars <= 6 ? 1 : std::size_t{1} << (num_vars - 6);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

TruthTable::TruthTable(int num_vars, bool value)
    : num_vars_(num_vars), words_(words_for(num_vars), value ? ~uint64_t{0} : 0) {
  if (num_vars < 0 || num_vars > kMaxVars)
    throw CapacityError("truth table over " + std::to_string(num_vars) +
                        " variables (limit " + std::to_string(kMaxVars) + ")");
  clear_tail();
}

TruthTable TruthTable::nth_var(int num_vars, int var) {
  TruthTable t(num_vars);
  if (var < 1 || var > num_vars)
    throw DomainError("variable " + std::to_string(var) + " out of range");
  int b = var - 1;
  if (b < 6) {
    for (auto& w : t.words_) w = kVarMasks[b];
  } else {
    std::size_t stride = std::size_t{1} << (b - 6);
    for (std::size_t i = 0; i < t.words_.size(); ++i)
      t.words_[i] = (i / stride) & 1 ? ~uint64_t{0} : 0;
  }
  t.clear_tail();
  return t;
}

uint64_t TruthTable::tail_mask() const {
  return num_vars_ >= 6 ? ~uint64_t{0} : (uint64_t{1} << num_bits()) - 1;
}

void TruthTable::clear_tail() { words_.back() &= tail_mask(); }

std::size_t TruthTable::popcount() const {
  std::size_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

bool TruthTable::is_zero() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

bool TruthTable::is_ones() const { return (~*this).is_zero(); }

TruthTable TruthTable::operator~() const {
  TruthTable r = *this;
  for (auto& w : r.words_) w = ~w;
  r.clear_tail();
  return r;
}

TruthTable& TruthTable::operator&=(const TruthTable& o) {
  assert(o.num_vars_ == num_vars_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

TruthTable& TruthTable::operator|=(const TruthTable& o) {
  assert(o.num_vars_ == num_vars_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

TruthTable& TruthTable::operator^=(const TruthTable& o) {
  assert(o.num_vars_ == num_vars_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

TruthTable TruthTable::operator&(const TruthTable& o) const {
  TruthTable r = *this;
  return r &= o;
}

TruthTable TruthTable::operator|(const TruthTable& o) const {
  TruthTable r = *this;
  return r |= o;
}

TruthTable TruthTable::operator^(const TruthTable& o) const {
  TruthTable r = *this;
  return r ^= o;
}

std::string TruthTable::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::size_t digits = num_bits() < 4 ? 1 : num_bits() / 4;
  std::string s(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    std::size_t base = d * 4;
    unsigned v = 0;
    for (std::size_t b = 0; b < 4 && base + b < num_bits(); ++b)
      v |= static_cast<unsigned>(get(base + b)) << b;
    s[digits - 1 - d] = kDigits[v];
  }
  return s;
}

TruthTable TruthTable::from_hex(std::string_view hex, int num_vars) {
  TruthTable t(num_vars);
  std::size_t digits = t.num_bits() < 4 ? 1 : t.num_bits() / 4;
  if (hex.size() != digits)
    throw DomainError("hex table has " + std::to_string(hex.size()) +
                      " digits, expected " + std::to_string(digits));
  for (std::size_t d = 0; d < digits; ++d) {
    int v = hex_value(hex[digits - 1 - d]);
    if (v < 0) throw DomainError(std::string("non-hex character '") + hex[digits - 1 - d] + "'");
    for (std::size_t b = 0; b < 4; ++b) {
      std::size_t p = d * 4 + b;
      if ((v >> b) & 1) {
        if (p >= t.num_bits())
          throw DomainError("hex digit sets bits beyond the table");
        t.set(p, true);
      }
    }
  }
  return t;
}

std::size_t TruthTable::hash() const {
  std::size_t h = static_cast<std::size_t>(num_vars_) * 0x9E3779B97F4A7C15ull;
  for (auto w : words_) {
    h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  }
  return h;
}

TruthTable parse_truth_hex(std::string_view hex, int num_vars) {
  if (num_vars < 2) throw DomainError("hex truth tables need at least 2 variables");
  return TruthTable::from_hex(hex, num_vars);
}

std::vector<TruthTable> parse_truth_file(std::string_view text) {
  std::vector<TruthTable> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front())))
      line.remove_prefix(1);
    if (line.empty()) continue;
    std::size_t bits = line.size() * 4;
    int k = std::countr_zero(bits);
    if (!std::has_single_bit(bits) || k < 2 || k > kMaxVars)
      throw ParseError(line_no, "hex length " + std::to_string(line.size()) +
                                    " is not 2^K/4 for 2 <= K <= 16");
    if (!out.empty() && out.front().num_vars() != k)
      throw ParseError(line_no, "outputs disagree on the input count");
    try {
      out.push_back(parse_truth_hex(line, k));
    } catch (const DomainError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace ctrw
