#include "refscore/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "refscore/errors.hpp"

namespace refscore {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool word_internal(const std::string& text, std::size_t i) {
  char c = text[i];
  if (c != '\'' && c != '-') return false;
  return i > 0 && i + 1 < text.size() && is_alnum(text[i - 1]) && is_alnum(text[i + 1]);
}

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }

}  // namespace

std::string TokenSequence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

void Vocabulary::add(const std::string& token) {
  ++counts_[token];
}

void Vocabulary::add_all(const TokenSequence& seq) {
  for (const auto& t : seq.tokens) add(t);
}

std::size_t Vocabulary::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

const std::vector<std::string>& Vocabulary::sorted_tokens() const {
  if (sorted_.size() != counts_.size()) {
    sorted_.clear();
    sorted_.reserve(counts_.size());
    for (const auto& [tok, n] : counts_) sorted_.push_back(tok);
  }
  return sorted_;
}

TokenSequence tokenize(const std::string& text, const std::string& source_id) {
  TokenSequence seq;
  seq.source_id = source_id;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (is_space(c)) {
      if (!cur.empty()) {
        seq.tokens.push_back(cur);
        cur.clear();
      }
    } else if (is_punct(c) && !word_internal(text, i)) {
      if (!cur.empty()) {
        seq.tokens.push_back(cur);
        cur.clear();
      }
      seq.tokens.push_back(std::string(1, c));
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) seq.tokens.push_back(cur);
  return seq;
}

std::vector<std::string> split_sentences(const std::string& text,
                                         const std::set<std::string>& abbreviations) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    std::size_t a = start;
    while (a < end && is_space(text[a])) ++a;
    std::size_t b = end;
    while (b > a && is_space(text[b - 1])) --b;
    if (b > a) sentences.push_back(text.substr(a, b - a));
    start = end;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t end = i + 1;
      while (end < text.size() && is_closer(text[end])) ++end;
      bool boundary = end < text.size() && is_space(text[end]);
      if (boundary && c == '.') {
        // the whitespace-delimited token ending at this period
        std::size_t w = i + 1;
        while (w > start && !is_space(text[w - 1])) --w;
        if (abbreviations.count(text.substr(w, i + 1 - w))) boundary = false;
      }
      if (boundary) {
        flush(end);
        i = end;
        continue;
      }
    }
    ++i;
  }
  flush(text.size());
  return sentences;
}

std::vector<std::string> split_sentences(const std::string& text) {
  return split_sentences(text, default_abbreviations());
}

const std::set<std::string>& default_abbreviations() {
  static const std::set<std::string> abbrevs = {
      "Mr.",   "Mrs.",  "Ms.",   "Dr.",    "Prof.", "St.",   "Jr.",  "Sr.",
      "vs.",   "etc.",  "e.g.",  "i.e.",   "cf.",   "al.",   "Inc.", "Co.",
      "Corp.", "Ltd.",  "No.",   "Fig.",   "Mt.",   "U.S.",  "U.K.", "U.N.",
      "a.m.",  "p.m.",  "Jan.",  "Feb.",   "Mar.",  "Apr.",  "Jun.", "Jul.",
      "Aug.",  "Sep.",  "Sept.", "Oct.",   "Nov.",  "Dec.",  "Gen.", "Gov.",
      "Sen.",  "Rep.",  "Rev.",  "approx."};
  return abbrevs;
}

std::set<std::string> load_abbreviations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open abbreviation list: " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && is_space(line.back())) line.pop_back();
    if (!line.empty()) out.insert(line);
  }
  return out;
}

}  // namespace refscore
