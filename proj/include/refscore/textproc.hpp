#ifndef REFSCORE_TEXTPROC_HPP
#define REFSCORE_TEXTPROC_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

namespace refscore {

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_id;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::string joined() const;
};

// Token inventory with occurrence counts. Sampling is uniform over the
// distinct token set (sorted, so draws are reproducible).
class Vocabulary {
 public:
  Vocabulary() = default;

  void add(const std::string& token);
  void add_all(const TokenSequence& seq);

  bool contains(const std::string& token) const { return counts_.count(token) > 0; }
  std::size_t count(const std::string& token) const;
  std::size_t size() const { return counts_.size(); }
  const std::vector<std::string>& sorted_tokens() const;
  const std::map<std::string, std::size_t>& counts() const { return counts_; }

 private:
  std::map<std::string, std::size_t> counts_;
  mutable std::vector<std::string> sorted_;
};

// Tokenization rule set (frozen; mutation labels depend on it):
//   - tokens are split on ASCII whitespace;
//   - every ASCII punctuation character becomes its own token, except
//     apostrophes and hyphens between alphanumerics, which stay word-internal;
//   - case is preserved.
TokenSequence tokenize(const std::string& text, const std::string& source_id = "");

// Sentence boundary rule set:
//   - a boundary follows '.', '!' or '?' (plus trailing closing quotes or
//     brackets) when the next character is whitespace and more text follows;
//   - for '.', the whitespace-delimited token ending at it must not be in the
//     abbreviation exception list ("U.S.", "Mr." and friends).
// The default list ships as data/abbreviations.txt (one token per line).
std::vector<std::string> split_sentences(const std::string& text,
                                         const std::set<std::string>& abbreviations);
std::vector<std::string> split_sentences(const std::string& text);

const std::set<std::string>& default_abbreviations();
std::set<std::string> load_abbreviations(const std::string& path);

}  // namespace refscore

#endif  // REFSCORE_TEXTPROC_HPP
