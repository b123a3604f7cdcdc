// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "rankarena/corpus.hpp"

namespace rankarena {
namespace {

// Words whose endings look inflectional but are not.
constexpr std::array<std::string_view, 52> kInvariant = {
    "afterwards", "always", "anything", "bed", "breed", "ceiling", "does",
    "during", "evening", "everything", "exceed", "feed", "gas", "greed",
    "has", "his", "hundred", "indeed", "its", "kindred", "lens", "less",
    "morning", "naked", "need", "news", "nothing", "perhaps", "proceed",
    "red", "ragged", "rugged", "sacred", "seed", "series", "shed", "sometimes",
    "something", "species", "speed", "spring", "string", "succeed", "this",
    "thing", "thus", "towards", "unless", "was", "weed", "wicked", "yes"};

bool invariant(std::string_view w) {
  return std::find(kInvariant.begin(), kInvariant.end(), w) != kInvariant.end();
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_vowel(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    case 'y': return i > 0 && !is_vowel(w, i - 1);
    default: return false;
  }
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel(w, i)) return true;
  }
  return false;
}

// Porter's measure: number of vowel-consonant sequences.
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel(w, i);
    if (prev_vowel && !v) ++m;
    prev_vowel = v;
  }
  return m;
}

bool ends_cvc(std::string_view w) {
  const auto n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel(w, n - 3) && is_vowel(w, n - 2) && !is_vowel(w, n - 1) &&
         last != 'w' && last != 'x' && last != 'y';
}

bool ends_double_consonant(std::string_view w) {
  const auto n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && !is_vowel(w, n - 1);
}

// Restores the base form after an -ed/-ing suffix was removed.
std::string restore_base(std::string base) {
  const auto n = base.size();
  if (n == 2 && base[1] == 'y') return std::string(1, base[0]) + "ie";  // dying
  if (base == "us") return "use";
  if (ends_with(base, "at") || ends_with(base, "bl") || ends_with(base, "iz")) {
    return base + 'e';
  }
  if (ends_double_consonant(base)) {
    const char last = base.back();
    if (last != 'l' && last != 's' && last != 'z') base.pop_back();
    return base;
  }
  const char last = base.back();
  if ((last == 's' && !ends_with(base, "ss") && !ends_with(base, "us") &&
       !ends_with(base, "is")) ||
      last == 'c' || last == 'v' || last == 'u') {
    return base + 'e';
  }
  if (measure(base) == 1 && ends_cvc(base)) return base + 'e';
  return base;
}

std::string strip_plural(std::string w) {
  const auto n = w.size();
  if (ends_with(w, "ies") && n >= 4) {
    if (n == 4) {
      w.pop_back();  // ties -> tie
    } else {
      w.resize(n - 3);
      w += 'y';
    }
    return w;
  }
  if (ends_with(w, "sses")) {
    w.resize(n - 2);
    return w;
  }
  if (ends_with(w, "es") && n >= 4) {
    std::string_view base(w.data(), n - 2);
    if (ends_with(base, "x") || ends_with(base, "z") || ends_with(base, "ch") ||
        ends_with(base, "sh") || (ends_with(base, "o") && base.size() >= 2)) {
      w.resize(n - 2);
    } else {
      w.pop_back();
    }
    return w;
  }
  if (ends_with(w, "s") && n >= 4 && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    w.pop_back();
  }
  return w;
}

std::string strip_verbal(std::string w) {
  const auto n = w.size();
  if (ends_with(w, "eed")) {
    if (measure(std::string_view(w).substr(0, n - 3)) > 0) w.pop_back();
    return w;
  }
  if (ends_with(w, "ied") && n >= 4) {
    if (n == 4) {
      w.pop_back();  // tied -> tie
    } else {
      w.resize(n - 3);
      w += 'y';
    }
    return w;
  }
  if (ends_with(w, "ed") && n >= 4 && has_vowel(std::string_view(w).substr(0, n - 2))) {
    return restore_base(w.substr(0, n - 2));
  }
  if (ends_with(w, "ing") && n >= 5 &&
      has_vowel(std::string_view(w).substr(0, n - 3))) {
    return restore_base(w.substr(0, n - 3));
  }
  return w;
}

}  // namespace

std::string stem(std::string_view word) {
  std::string w(word);
  if (w.size() < 4 || invariant(w)) return w;
  if (!std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
    return w;
  }
  w = strip_plural(std::move(w));
  if (w.size() < 4 || invariant(w)) return w;
  return strip_verbal(std::move(w));
}

}  // namespace rankarena
