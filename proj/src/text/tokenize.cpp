#include "astres/text/tokenize.hpp"

#include <array>
#include <cctype>
#include <functional>
#include <utility>

namespace astres::text {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// 'y' is a consonant at the start of a word or after a vowel.
std::vector<bool> consonant_flags(std::string_view w) {
  std::vector<bool> flags(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel(w[i]))
      flags[i] = false;
    else if (w[i] == 'y')
      flags[i] = i == 0 ? true : !flags[i - 1];
    else
      flags[i] = true;
  }
  return flags;
}

bool is_consonant(std::string_view w, std::size_t i) { return consonant_flags(w.substr(0, i + 1))[i]; }

int measure(std::string_view stem) {
  auto f = consonant_flags(stem);
  int m = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    m += !f[i - 1] && f[i];
  return m;
}

bool positive_measure(std::string_view stem) { return measure(stem) > 0; }

bool contains_vowel(std::string_view stem) {
  for (bool c : consonant_flags(stem))
    if (!c)
      return true;
  return false;
}

bool ends_double_consonant(std::string_view w) {
  return w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && is_consonant(w, w.size() - 1);
}

bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n >= 3 && is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
      w[n - 1] != 'w' && w[n - 1] != 'x' && w[n - 1] != 'y')
    return true;
  return n == 2 && !is_consonant(w, 0) && is_consonant(w, 1);
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

using Condition = std::function<bool(std::string_view)>;

struct Rule {
  std::string_view suffix;
  std::string replacement;
  Condition condition;
};

// The first rule whose suffix matches decides; a failed condition leaves the
// word unchanged.
std::string apply_rules(const std::string &w, const std::vector<Rule> &rules) {
  for (const Rule &r : rules) {
    if (r.suffix == "*d") {
      if (ends_double_consonant(w)) {
        std::string stem = w.substr(0, w.size() - 2);
        return !r.condition || r.condition(stem) ? stem + r.replacement : w;
      }
      continue;
    }
    if (ends_with(w, r.suffix)) {
      std::string stem = w.substr(0, w.size() - r.suffix.size());
      return !r.condition || r.condition(stem) ? stem + r.replacement : w;
    }
  }
  return w;
}

std::string replace_suffix(std::string_view w, std::string_view suffix, std::string_view rep) {
  return std::string(w.substr(0, w.size() - suffix.size())) + std::string(rep);
}

std::string step1a(const std::string &w) {
  if (ends_with(w, "ies") && w.size() == 4)
    return replace_suffix(w, "ies", "ie");
  return apply_rules(w, {{"sses", "ss", {}}, {"ies", "i", {}}, {"ss", "ss", {}}, {"s", "", {}}});
}

std::string step1b(const std::string &w) {
  if (ends_with(w, "ied"))
    return replace_suffix(w, "ied", w.size() == 4 ? "ie" : "i");
  if (ends_with(w, "eed")) {
    std::string stem = replace_suffix(w, "eed", "");
    return measure(stem) > 0 ? stem + "ee" : w;
  }
  std::string inter;
  bool succeeded = false;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (ends_with(w, suffix)) {
      inter = replace_suffix(w, suffix, "");
      if (contains_vowel(inter)) {
        succeeded = true;
        break;
      }
    }
  }
  if (!succeeded)
    return w;
  char last = inter.back();
  return apply_rules(inter, {
                                {"at", "ate", {}},
                                {"bl", "ble", {}},
                                {"iz", "ize", {}},
                                {"*d", std::string(1, last),
                                 [last](std::string_view) { return last != 'l' && last != 's' && last != 'z'; }},
                                {"", "e", [](std::string_view s) { return measure(s) == 1 && ends_cvc(s); }},
                            });
}

std::string step1c(const std::string &w) {
  return apply_rules(w, {{"y", "i", [](std::string_view s) {
                            return s.size() > 1 && is_consonant(s, s.size() - 1);
                          }}});
}

std::string step2(const std::string &w) {
  if (ends_with(w, "alli") && positive_measure(replace_suffix(w, "alli", "")))
    return step2(replace_suffix(w, "alli", "al"));
  Condition pos = positive_measure;
  std::vector<Rule> rules = {
      {"ational", "ate", pos}, {"tional", "tion", pos}, {"enci", "ence", pos},
      {"anci", "ance", pos},   {"izer", "ize", pos},    {"bli", "ble", pos},
      {"alli", "al", pos},     {"entli", "ent", pos},   {"eli", "e", pos},
      {"ousli", "ous", pos},   {"ization", "ize", pos}, {"ation", "ate", pos},
      {"ator", "ate", pos},    {"alism", "al", pos},    {"iveness", "ive", pos},
      {"fulness", "ful", pos}, {"ousness", "ous", pos}, {"aliti", "al", pos},
      {"iviti", "ive", pos},   {"biliti", "ble", pos},  {"fulli", "ful", pos},
      {"logi", "log", [&w](std::string_view) { return positive_measure(std::string_view(w).substr(0, w.size() - 3)); }},
  };
  return apply_rules(w, rules);
}

std::string step3(const std::string &w) {
  Condition pos = positive_measure;
  return apply_rules(w, {{"icate", "ic", pos},
                         {"ative", "", pos},
                         {"alize", "al", pos},
                         {"iciti", "ic", pos},
                         {"ical", "ic", pos},
                         {"ful", "", pos},
                         {"ness", "", pos}});
}

std::string step4(const std::string &w) {
  Condition gt1 = [](std::string_view s) { return measure(s) > 1; };
  return apply_rules(w, {{"al", "", gt1},
                         {"ance", "", gt1},
                         {"ence", "", gt1},
                         {"er", "", gt1},
                         {"ic", "", gt1},
                         {"able", "", gt1},
                         {"ible", "", gt1},
                         {"ant", "", gt1},
                         {"ement", "", gt1},
                         {"ment", "", gt1},
                         {"ent", "", gt1},
                         {"ion", "",
                          [](std::string_view s) {
                            return measure(s) > 1 && !s.empty() && (s.back() == 's' || s.back() == 't');
                          }},
                         {"ou", "", gt1},
                         {"ism", "", gt1},
                         {"ate", "", gt1},
                         {"iti", "", gt1},
                         {"ous", "", gt1},
                         {"ive", "", gt1},
                         {"ize", "", gt1}});
}

std::string step5a(const std::string &w) {
  if (ends_with(w, "e")) {
    std::string stem = replace_suffix(w, "e", "");
    int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem)))
      return stem;
  }
  return w;
}

std::string step5b(const std::string &w) {
  return apply_rules(w, {{"ll", "l", [&w](std::string_view) {
                            return measure(std::string_view(w).substr(0, w.size() - 1)) > 1;
                          }}});
}

const std::pair<std::string_view, std::string_view> kIrregular[] = {
    {"sky", "sky"},         {"skies", "sky"},      {"dying", "die"},     {"lying", "lie"},
    {"tying", "tie"},       {"news", "news"},      {"innings", "inning"}, {"inning", "inning"},
    {"outings", "outing"},  {"outing", "outing"},  {"cannings", "canning"}, {"canning", "canning"},
    {"howe", "howe"},       {"proceed", "proceed"}, {"exceed", "exceed"}, {"succeed", "succeed"},
};

bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

} // namespace

std::string porter_stem(std::string_view word) {
  for (const auto &[form, stem] : kIrregular)
    if (word == form)
      return std::string(stem);
  std::string w(word);
  if (w.size() <= 2)
    return w;
  w = step1a(w);
  w = step1b(w);
  w = step1c(w);
  w = step2(w);
  w = step3(w);
  w = step4(w);
  w = step5a(w);
  w = step5b(w);
  return w;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_word_byte(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty())
    out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out = split_words(text);
  for (auto &w : out)
    w = porter_stem(w);
  return out;
}

} // namespace astres::text
