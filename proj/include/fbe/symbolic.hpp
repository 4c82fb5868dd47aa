// Copyright 2026 The fbe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbe/errors.hpp"
#include "fbe/random.hpp"

namespace fbe {

// Signed digits: +i selects f_i, -i selects its inverse.
using Word = std::vector<int>;

// A finite word (empty period) or an eventually periodic infinite word
// pre . per per per ...  Stored in canonical form: the period is primitive
// and the preperiod as short as possible, so == is equality of words.
class Address {
 public:
  Address() = default;

  static Address finite(Word w) {
    Address a;
    a.pre_ = std::move(w);
    return a;
  }

  static Address periodic(Word pre, Word period) {
    if (period.empty()) throw Error(ErrorCode::Domain, "periodic address needs a nonempty period");
    Address a;
    a.pre_ = std::move(pre);
    a.per_ = std::move(period);
    a.canonicalize();
    return a;
  }

  const Word& preperiod() const noexcept { return pre_; }
  const Word& period() const noexcept { return per_; }
  bool is_finite() const noexcept { return per_.empty(); }
  bool empty() const noexcept { return pre_.empty() && per_.empty(); }
  std::size_t finite_length() const noexcept { return pre_.size(); }

  // 0-based digit access; infinite words never run out.
  int digit(std::size_t i) const {
    if (i < pre_.size()) return pre_[i];
    if (per_.empty()) throw Error(ErrorCode::Depth, "index past end of finite word");
    return per_[(i - pre_.size()) % per_.size()];
  }

  Word prefix(std::size_t k) const {
    if (is_finite() && k > pre_.size()) throw Error(ErrorCode::Depth, "prefix longer than finite word");
    Word w(k);
    for (std::size_t i = 0; i < k; ++i) w[i] = digit(i);
    return w;
  }

  bool operator==(const Address&) const = default;

 private:
  void canonicalize() {
    const std::size_t p = per_.size();
    for (std::size_t d = 1; d < p; ++d) {
      if (p % d != 0) continue;
      bool ok = true;
      for (std::size_t i = d; i < p && ok; ++i) ok = per_[i] == per_[i - d];
      if (ok) {
        per_.resize(d);
        break;
      }
    }
    while (!pre_.empty() && pre_.back() == per_.back()) {
      pre_.pop_back();
      std::rotate(per_.begin(), per_.end() - 1, per_.end());
    }
  }

  Word pre_;
  Word per_;
};

struct AddressClass {
  bool finite = false;
  bool reduced = false;  // no adjacent cancelling pair, wraps included
  bool in_I0 = false;
  bool in_I = false;
  bool in_Iplus = false;
  bool in_Iminus = false;
  bool in_Ihat = false;
  bool in_Ihat_star = false;
  bool in_Jplus = false;
  bool in_Jminus = false;
};

inline void check_digits(const Word& w, int n_maps) {
  for (int d : w) {
    if (d == 0 || std::abs(d) > n_maps)
      throw Error(ErrorCode::InvalidDigit, "digit " + std::to_string(d) + " outside alphabet of " +
                                               std::to_string(n_maps) + " maps");
  }
}

inline bool is_reduced(const Address& a) {
  const Word& pre = a.preperiod();
  const Word& per = a.period();
  for (std::size_t i = 0; i + 1 < pre.size(); ++i)
    if (pre[i] == -pre[i + 1]) return false;
  if (per.empty()) return true;
  if (!pre.empty() && pre.back() == -per.front()) return false;
  for (std::size_t i = 0; i + 1 < per.size(); ++i)
    if (per[i] == -per[i + 1]) return false;
  return per.back() != -per.front();
}

inline AddressClass validate(const Address& a, int n_maps) {
  check_digits(a.preperiod(), n_maps);
  check_digits(a.period(), n_maps);
  AddressClass c;
  c.finite = a.is_finite();
  c.reduced = is_reduced(a);
  if (c.finite) return c;
  c.in_I0 = true;
  c.in_I = c.reduced;
  if (!c.in_I) return c;
  const auto pos = [](int d) { return d > 0; };
  const auto neg = [](int d) { return d < 0; };
  const Word& pre = a.preperiod();
  const Word& per = a.period();
  const bool per_pos = std::all_of(per.begin(), per.end(), pos);
  const bool per_neg = std::all_of(per.begin(), per.end(), neg);
  c.in_Jplus = per_pos;
  c.in_Jminus = per_neg;
  c.in_Iplus = per_pos && std::all_of(pre.begin(), pre.end(), pos);
  c.in_Iminus = per_neg && std::all_of(pre.begin(), pre.end(), neg);
  // negatives then positives: no positive digit followed by a negative one
  bool up = true, down = true;
  for (std::size_t i = 0; i + 1 < pre.size(); ++i) {
    if (pre[i] > 0 && pre[i + 1] < 0) up = false;
    if (pre[i] < 0 && pre[i + 1] > 0) down = false;
  }
  if (!pre.empty() && pre.back() > 0 && per_neg) up = false;
  if (!pre.empty() && pre.back() < 0 && per_pos) down = false;
  c.in_Ihat = per_pos && up;
  c.in_Ihat_star = per_neg && down;
  return c;
}

inline Address shift(const Address& a) {
  if (a.empty()) throw Error(ErrorCode::EmptyAddress, "shift of the empty word");
  const Word& pre = a.preperiod();
  if (a.is_finite()) return Address::finite(Word(pre.begin() + 1, pre.end()));
  if (!pre.empty()) return Address::periodic(Word(pre.begin() + 1, pre.end()), a.period());
  Word per = a.period();
  std::rotate(per.begin(), per.begin() + 1, per.end());
  return Address::periodic({}, std::move(per));
}

inline Address shift(const Address& a, std::size_t k) {
  Address r = a;
  for (std::size_t i = 0; i < k; ++i) r = shift(r);
  return r;
}

// Inverse shift: prepends n, or cancels a leading -n.
inline Address sigma(int n, const Address& a) {
  if (n == 0) throw Error(ErrorCode::InvalidDigit, "digit 0");
  if (!a.empty() && a.digit(0) == -n) return shift(a);
  Word pre;
  pre.reserve(a.preperiod().size() + 1);
  pre.push_back(n);
  pre.insert(pre.end(), a.preperiod().begin(), a.preperiod().end());
  if (a.is_finite()) return Address::finite(std::move(pre));
  return Address::periodic(std::move(pre), a.period());
}

inline Address negate(const Address& a) {
  Word pre = a.preperiod(), per = a.period();
  for (int& d : pre) d = -d;
  for (int& d : per) d = -d;
  if (per.empty()) return Address::finite(std::move(pre));
  return Address::periodic(std::move(pre), std::move(per));
}

inline Word negate(Word w) {
  for (int& d : w) d = -d;
  return w;
}

// 1-based index of the first differing digit, 0 when the words are equal.
// A finite word that is a proper prefix of the other differs just past its end.
inline std::size_t first_difference(const Address& a, const Address& b) {
  if (a == b) return 0;
  std::size_t bound;
  if (a.is_finite() || b.is_finite()) {
    bound = std::min(a.is_finite() ? a.finite_length() : SIZE_MAX, b.is_finite() ? b.finite_length() : SIZE_MAX);
  } else {
    bound = std::max(a.preperiod().size(), b.preperiod().size()) +
            std::lcm(a.period().size(), b.period().size());
  }
  for (std::size_t i = 0; i < bound; ++i)
    if (a.digit(i) != b.digit(i)) return i + 1;
  return bound + 1;
}

inline double metric(const Address& a, const Address& b) {
  const std::size_t k = first_difference(a, b);
  return k == 0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1074)));
}

// Concatenation of all positive words in length-then-lexicographic order.
inline Word disjunctive_prefix(int n_maps, std::size_t length) {
  if (n_maps < 1) throw Error(ErrorCode::Domain, "need at least one map");
  Word out;
  out.reserve(length);
  for (std::size_t len = 1; out.size() < length; ++len) {
    Word w(len, 1);
    while (out.size() < length) {
      for (std::size_t i = 0; i < len && out.size() < length; ++i) out.push_back(w[i]);
      std::size_t j = len;
      while (j > 0 && w[j - 1] == n_maps) w[--j] = 1;
      if (j == 0) break;
      ++w[j - 1];
    }
  }
  return out;
}

// Text form: digits separated by '.', period as "(...)*", e.g. -1.-1.(2)*
inline std::string join_digits(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

inline std::string to_string(const Address& a) {
  std::string s = join_digits(a.preperiod());
  if (!a.is_finite()) {
    if (!s.empty()) s += '.';
    s += '(' + join_digits(a.period()) + ")*";
  }
  return s;
}

inline Word parse_digits(std::string_view text) {
  Word w;
  if (text.empty()) return w;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = text.find('.', pos);
    std::string_view tok = text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || v == 0)
      throw Error(ErrorCode::Parse, "bad digit '" + std::string(tok) + "'");
    w.push_back(v);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return w;
}

inline Address parse_address(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.size() >= 2 && text.substr(text.size() - 2) == ")*") {
    const std::size_t open = text.rfind('(');
    if (open == std::string_view::npos) throw Error(ErrorCode::Parse, "unbalanced period in '" + std::string(text) + "'");
    std::string_view head = text.substr(0, open);
    if (!head.empty()) {
      if (head.back() != '.') throw Error(ErrorCode::Parse, "expected '.' before period");
      head.remove_suffix(1);
      if (head.empty()) throw Error(ErrorCode::Parse, "empty preperiod before '.'");
    }
    Word per = parse_digits(text.substr(open + 1, text.size() - open - 3));
    if (per.empty()) throw Error(ErrorCode::Parse, "empty period");
    return Address::periodic(parse_digits(head), std::move(per));
  }
  if (text.find_first_of("()*") != std::string_view::npos)
    throw Error(ErrorCode::Parse, "malformed address '" + std::string(text) + "'");
  return Address::finite(parse_digits(text));
}

// Random eventually periodic addresses for property checks.
enum class AddressKind { Positive, Hat, PositiveTail, Reduced };

inline Address random_address(Rng& rng, int n_maps, AddressKind kind, int max_pre = 6, int max_period = 4) {
  const auto any_digit = [&] {
    const int d = uniform_int(rng, 1, n_maps);
    return uniform_below(rng, 2) ? d : -d;
  };
  while (true) {
    const int lp = uniform_int(rng, 0, max_pre);
    const int lq = uniform_int(rng, 1, max_period);
    Word pre(lp), per(lq);
    switch (kind) {
      case AddressKind::Positive:
        for (int& d : pre) d = uniform_int(rng, 1, n_maps);
        for (int& d : per) d = uniform_int(rng, 1, n_maps);
        break;
      case AddressKind::Hat: {
        const int neg = uniform_int(rng, 0, lp);
        for (int i = 0; i < lp; ++i) pre[i] = i < neg ? -uniform_int(rng, 1, n_maps) : uniform_int(rng, 1, n_maps);
        for (int& d : per) d = uniform_int(rng, 1, n_maps);
        break;
      }
      case AddressKind::PositiveTail:
        for (int& d : pre) d = any_digit();
        for (int& d : per) d = uniform_int(rng, 1, n_maps);
        break;
      case AddressKind::Reduced:
        for (int& d : pre) d = any_digit();
        for (int& d : per) d = any_digit();
        break;
    }
    Address a = Address::periodic(std::move(pre), std::move(per));
    if (is_reduced(a)) return a;
  }
}

// Truncated words of a common length, the state space of the symbolic IFS.
struct SymbolicSet {
  std::set<Word> elements;
  std::size_t length = 0;
};

inline SymbolicSet truncation(const Address& a, std::size_t length) {
  return SymbolicSet{{a.prefix(length)}, length};
}

// k steps of the set map s -> union over n of sigma_n(s), each step
// truncating to one digit less.
inline SymbolicSet iterate_symbolic_ifs(const SymbolicSet& s, std::span<const int> maps, std::size_t k) {
  if (s.length <= k) throw Error(ErrorCode::TruncationDepth, "truncation depth exhausted");
  SymbolicSet cur = s;
  for (std::size_t step = 0; step < k; ++step) {
    SymbolicSet next;
    next.length = cur.length - 1;
    for (const Word& w : cur.elements) {
      for (int n : maps) {
        Word v;
        v.reserve(next.length);
        if (w.front() == -n) {
          v.assign(w.begin() + 1, w.end());
        } else {
          v.push_back(n);
          v.insert(v.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(next.length - 1));
        }
        next.elements.insert(std::move(v));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

// A distance of the form 2^-exponent, or exactly zero.
struct DyadicDistance {
  bool zero = true;
  int exponent = 0;

  double value() const { return zero ? 0.0 : std::ldexp(1.0, -exponent); }
  // exact test d <= 2^-e
  bool at_most_pow2(int e) const { return zero || exponent >= e; }
  static DyadicDistance pow2(int e) { return {false, e}; }
  static DyadicDistance max(DyadicDistance a, DyadicDistance b) {
    if (a.zero) return b;
    if (b.zero) return a;
    return a.exponent <= b.exponent ? a : b;
  }
};

// Hausdorff distance between s and the set of all positive words of the same
// length, both under the truncated code-space metric.
inline DyadicDistance hausdorff_to_positive(const SymbolicSet& s, int n_maps) {
  if (s.elements.empty()) throw Error(ErrorCode::Domain, "empty symbolic set");
  DyadicDistance d;
  std::set<Word> prefixes;  // positive prefixes of elements
  for (const Word& w : s.elements) {
    std::size_t i = 0;
    while (i < w.size() && w[i] > 0) ++i;
    if (i < w.size()) d = DyadicDistance::max(d, DyadicDistance::pow2(static_cast<int>(i + 1)));
    for (std::size_t j = 0; j <= i; ++j) prefixes.emplace(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j));
  }
  // worst positive word: walk the trie of positive prefixes
  std::vector<Word> stack{Word{}};
  while (!stack.empty()) {
    Word p = std::move(stack.back());
    stack.pop_back();
    if (p.size() == s.length) continue;
    for (int n = 1; n <= n_maps; ++n) {
      Word c = p;
      c.push_back(n);
      if (prefixes.count(c))
        stack.push_back(std::move(c));
      else
        d = DyadicDistance::max(d, DyadicDistance::pow2(static_cast<int>(p.size() + 1)));
    }
  }
  return d;
}

}  // namespace fbe
