#pragma once

// Automorphisms as pairs of sliding block codes (forward, inverse) with
// symmetric memory.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autdrift/errors.hpp"
#include "autdrift/shift_space.hpp"
#include "autdrift/symbolic.hpp"

namespace autdrift {

inline constexpr std::size_t kMaxBlockTable = std::size_t{1} << 24;

// [φx]_m = table(x_{m-k}, …, x_{m+k}). The table is indexed by the window
// read as a base-|A| number, most significant symbol first.
class BlockMap {
 public:
  using Rule = std::function<Symbol(std::span<const Symbol>)>;

  BlockMap() = default;

  BlockMap(std::size_t alphabet_size, Coord memory, std::vector<Symbol> table)
      : q_(alphabet_size), k_(memory), table_(std::move(table)) {
    if (memory < 0) throw InputError("block map memory must be non-negative");
    if (table_.size() != table_size(q_, k_)) throw InputError("block map table has wrong size");
    for (Symbol s : table_)
      if (s >= q_) throw InputError("block map output outside alphabet");
  }

  static BlockMap from_rule(std::size_t alphabet_size, Coord memory, const Rule& rule) {
    const std::size_t n = table_size(alphabet_size, memory);
    std::vector<Symbol> table(n);
    Word w(static_cast<std::size_t>(2 * memory + 1), 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
      decode(idx, alphabet_size, w);
      table[idx] = rule(w);
    }
    return BlockMap(alphabet_size, memory, std::move(table));
  }

  static std::size_t table_size(std::size_t q, Coord k) {
    std::size_t n = 1;
    for (Coord i = 0; i < 2 * k + 1; ++i) {
      if (n > kMaxBlockTable / q)
        throw ResourceError("block map table exceeds " + std::to_string(kMaxBlockTable) + " entries");
      n *= q;
    }
    return n;
  }

  static void decode(std::size_t idx, std::size_t q, Word& w) {
    for (std::size_t i = w.size(); i-- > 0;) {
      w[i] = static_cast<Symbol>(idx % q);
      idx /= q;
    }
  }

  Coord memory() const noexcept { return k_; }
  std::size_t alphabet_size() const noexcept { return q_; }
  const std::vector<Symbol>& table() const noexcept { return table_; }

  Symbol operator()(std::span<const Symbol> window) const {
    std::size_t idx = 0;
    for (Symbol s : window) idx = idx * q_ + s;
    return table_[idx];
  }

  friend bool operator==(const BlockMap&, const BlockMap&) = default;

 private:
  std::size_t q_ = 1;
  Coord k_ = 0;
  std::vector<Symbol> table_{0};
};

inline Word apply_block_map_word(const BlockMap& b, const Word& w) {
  const auto width = static_cast<std::size_t>(2 * b.memory() + 1);
  if (w.size() < width) throw InputError("word shorter than block map window");
  Word out(w.size() - width + 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = b(std::span<const Symbol>(w.data() + i, width));
  return out;
}

// Exact image of an eventually periodic point.
inline Point apply_block_map_point(const BlockMap& b, const Point& p) {
  const Coord k = b.memory();
  const Coord lo = p.left_bound() - k;
  const Coord hi = p.right_start() + k;
  const Coord pl = p.left_period();
  const Coord pr = p.right_period();
  const Word src = window(p, lo - pl - k, hi + pr + k - 1);
  const Coord base = lo - pl - k;
  auto image = [&](Coord m) {
    return b(std::span<const Symbol>(src.data() + (m - k - base), static_cast<std::size_t>(2 * k + 1)));
  };
  Word core(static_cast<std::size_t>(hi - lo));
  for (Coord m = lo; m < hi; ++m) core[static_cast<std::size_t>(m - lo)] = image(m);
  Word rper(static_cast<std::size_t>(pr));
  for (Coord i = 0; i < pr; ++i) rper[static_cast<std::size_t>(i)] = image(hi + i);
  Word lper(static_cast<std::size_t>(pl));
  for (Coord i = 0; i < pl; ++i) lper[static_cast<std::size_t>(i)] = image(lo - 1 - i);
  return Point(Tail({}, std::move(lper)), std::move(core), Tail({}, std::move(rper)), lo);
}

// b_outer ∘ b_inner as a single block map of memory k_outer + k_inner.
// Built by a suffix recursion: for the last L − j symbols of a window,
// idx_j holds the outer-table digits contributed by inner outputs j..2k_outer.
inline BlockMap compose_block_maps(const BlockMap& outer, const BlockMap& inner) {
  if (outer.alphabet_size() != inner.alphabet_size()) throw InputError("compose: alphabet mismatch");
  const Coord k = outer.memory() + inner.memory();
  const std::size_t q = outer.alphabet_size();
  const std::size_t n = BlockMap::table_size(q, k);
  const auto len = static_cast<std::size_t>(2 * k + 1);
  const auto wi = static_cast<std::size_t>(2 * inner.memory() + 1);
  const auto outs = static_cast<std::size_t>(2 * outer.memory() + 1);
  std::vector<std::size_t> pow(len + 1, 1);
  for (std::size_t i = 1; i <= len; ++i) pow[i] = pow[i - 1] * q;

  // j = outs − 1: a single inner window.
  std::vector<std::uint32_t> cur(pow[wi]);
  for (std::size_t s = 0; s < cur.size(); ++s) cur[s] = inner.table()[s];
  std::vector<std::uint32_t> next;
  for (std::size_t j = outs - 1; j-- > 0;) {
    const std::size_t m = len - j;  // suffix length
    const std::size_t digit = pow[outs - 1 - j];
    next.resize(pow[m]);
    for (std::size_t s = 0; s < next.size(); ++s)
      next[s] = static_cast<std::uint32_t>(inner.table()[s / pow[m - wi]] * digit + cur[s % pow[m - 1]]);
    cur.swap(next);
  }
  std::vector<Symbol> table(n);
  for (std::size_t idx = 0; idx < n; ++idx) table[idx] = outer.table()[cur[idx]];
  return BlockMap(q, k, std::move(table));
}

class Automorphism {
 public:
  Automorphism() = default;
  Automorphism(std::string label, BlockMap forward, BlockMap inverse)
      : label_(std::move(label)), forward_(std::move(forward)), inverse_(std::move(inverse)) {
    if (forward_.alphabet_size() != inverse_.alphabet_size())
      throw InputError("automorphism: forward and inverse alphabets differ");
  }

  const std::string& label() const noexcept { return label_; }
  const BlockMap& forward() const noexcept { return forward_; }
  const BlockMap& inverse() const noexcept { return inverse_; }
  std::size_t alphabet_size() const noexcept { return forward_.alphabet_size(); }

  Automorphism inverted() const { return Automorphism(label_ + "^-1", inverse_, forward_); }
  Automorphism relabeled(std::string label) const { return Automorphism(std::move(label), forward_, inverse_); }

  friend bool operator==(const Automorphism& a, const Automorphism& b) {
    return a.forward_ == b.forward_ && a.inverse_ == b.inverse_;
  }

 private:
  std::string label_;
  BlockMap forward_;
  BlockMap inverse_;
};

inline Point apply_to_point(const Automorphism& a, const Point& p) {
  return apply_block_map_point(a.forward(), p);
}

// a ∘ b: apply b first.
inline Automorphism compose(const Automorphism& a, const Automorphism& b) {
  if (a.alphabet_size() != b.alphabet_size()) throw InputError("compose: alphabet mismatch");
  return Automorphism(a.label() + "*" + b.label(), compose_block_maps(a.forward(), b.forward()),
                      compose_block_maps(b.inverse(), a.inverse()));
}

struct MemoryBound {
  Coord forward;
  Coord inverse;
  friend bool operator==(const MemoryBound&, const MemoryBound&) = default;
};

inline MemoryBound memory_bound(const Automorphism& a) {
  return {a.forward().memory(), a.inverse().memory()};
}

// --- builtins --------------------------------------------------------------

inline Automorphism identity_automorphism(const Alphabet& alphabet) {
  std::vector<Symbol> t(alphabet.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Symbol>(i);
  BlockMap b(alphabet.size(), 0, t);
  return Automorphism("identity", b, b);
}

// σ^k with [σ^k x]_m = x_{m-k}; memory |k|.
inline BlockMap shift_block_map(std::size_t q, Coord k) {
  const Coord mem = k < 0 ? -k : k;
  const auto pos = static_cast<std::size_t>(mem - k);
  return BlockMap::from_rule(q, mem, [pos](std::span<const Symbol> w) { return w[pos]; });
}

inline Automorphism shift_automorphism(const Alphabet& alphabet, Coord k = 1) {
  std::string label = k == 1 ? "shift" : "shift^" + std::to_string(k);
  return Automorphism(label, shift_block_map(alphabet.size(), k), shift_block_map(alphabet.size(), -k));
}

// Memory-0 automorphism from a symbol permutation.
inline Automorphism permutation_automorphism(const Alphabet& alphabet, const std::vector<Symbol>& perm,
                                             std::string label) {
  if (perm.size() != alphabet.size()) throw InputError("permutation has wrong size");
  std::vector<Symbol> inv(perm.size());
  std::vector<bool> hit(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size() || hit[perm[i]]) throw InputError("not a permutation");
    hit[perm[i]] = true;
    inv[perm[i]] = static_cast<Symbol>(i);
  }
  return Automorphism(std::move(label), BlockMap(alphabet.size(), 0, perm),
                      BlockMap(alphabet.size(), 0, inv));
}

// (u, v) ↦ (v, u) on a product alphabet with equal factors.
inline Automorphism swap_automorphism(const Alphabet& product) {
  if (!product.is_product() || !(product.first_factor() == product.second_factor()))
    throw InputError("swap needs a product alphabet with equal factors");
  std::vector<Symbol> perm(product.size());
  for (std::size_t s = 0; s < perm.size(); ++s) {
    auto [u, v] = product.unpack(static_cast<Symbol>(s));
    perm[s] = product.pack(v, u);
  }
  return permutation_automorphism(product, perm, "swap");
}

// If `a` is σ^k for some |k| ≤ max_power, returns k.
inline std::optional<Coord> as_shift_power(const Automorphism& a, Coord max_power = 16) {
  const Coord k = a.forward().memory();
  if (k > max_power) return std::nullopt;
  // σ^c read through a window of memory k ≥ |c| picks position k − c.
  for (Coord i = 0; i <= 2 * k; ++i) {
    const Coord c = i % 2 ? (i + 1) / 2 : -i / 2;
    const auto pos = static_cast<std::size_t>(k - c);
    const auto padded = BlockMap::from_rule(a.alphabet_size(), k, [pos](std::span<const Symbol> w) { return w[pos]; });
    if (a.forward() == padded) return c;
  }
  return std::nullopt;
}

// --- verification ----------------------------------------------------------

struct VerificationReport {
  std::string label;
  std::size_t verified_length = 0;
  bool forward_preserves_language = true;
  bool inverse_preserves_language = true;
  bool inverse_after_forward = true;
  bool forward_after_inverse = true;
  std::vector<std::string> failures;

  bool passed() const {
    return forward_preserves_language && inverse_preserves_language && inverse_after_forward &&
           forward_after_inverse;
  }

  std::string render() const {
    std::string out = "automorphism " + label + ": " + (passed() ? "pass" : "FAIL") +
                      " (verified length " + std::to_string(verified_length) + ")\n";
    auto line = [&](const char* name, bool ok) {
      out += std::string("  ") + name + ": " + (ok ? "pass" : "fail") + "\n";
    };
    line("forward preserves language", forward_preserves_language);
    line("inverse preserves language", inverse_preserves_language);
    line("inverse o forward = id", inverse_after_forward);
    line("forward o inverse = id", forward_after_inverse);
    for (const auto& f : failures) out += "  failed: " + f + "\n";
    return out;
  }
};

// Finite certificate: checks every word of Σ of length ≤ L.
inline VerificationReport verify_automorphism(const ShiftSpace& s, const Automorphism& a, std::size_t L,
                                              const EnumerationCap& cap = {}) {
  if (a.alphabet_size() != s.alphabet().size()) throw InputError("verify: alphabet mismatch");
  const Coord kf = a.forward().memory();
  const Coord ki = a.inverse().memory();
  if (static_cast<Coord>(L) < 2 * (kf + ki) + 1)
    throw InputError("verify: L must be at least 2(k_fwd + k_inv) + 1");
  const auto& alpha = s.alphabet();
  VerificationReport r;
  r.label = a.label();
  r.verified_length = L;
  for (std::size_t n = 1; n <= L; ++n) {
    const Coord len = static_cast<Coord>(n);
    for (const auto& w : words(s, n, cap)) {
      if (len >= 2 * kf + 1) {
        Word img = apply_block_map_word(a.forward(), w);
        if (!contains_word(s, img)) {
          r.forward_preserves_language = false;
          r.failures.push_back("language: forward image of " + alpha.format_compact(w) + " is " +
                               alpha.format_compact(img) + ", not a word of " + s.name());
        }
      }
      if (len >= 2 * ki + 1) {
        Word img = apply_block_map_word(a.inverse(), w);
        if (!contains_word(s, img)) {
          r.inverse_preserves_language = false;
          r.failures.push_back("language: inverse image of " + alpha.format_compact(w) + " is " +
                               alpha.format_compact(img) + ", not a word of " + s.name());
        }
      }
      if (len >= 2 * (kf + ki) + 1) {
        const Word centre(w.begin() + (kf + ki), w.end() - (kf + ki));
        Word back = apply_block_map_word(a.inverse(), apply_block_map_word(a.forward(), w));
        if (back != centre) {
          r.inverse_after_forward = false;
          r.failures.push_back("inverse: inverse(forward(" + alpha.format_compact(w) + ")) = " +
                               alpha.format_compact(back) + ", expected " + alpha.format_compact(centre));
        }
        Word fwd = apply_block_map_word(a.forward(), apply_block_map_word(a.inverse(), w));
        if (fwd != centre) {
          r.forward_after_inverse = false;
          r.failures.push_back("inverse: forward(inverse(" + alpha.format_compact(w) + ")) = " +
                               alpha.format_compact(fwd) + ", expected " + alpha.format_compact(centre));
        }
      }
    }
  }
  return r;
}

}  // namespace autdrift
