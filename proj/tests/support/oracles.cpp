#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "stylo/resources.hpp"

namespace stylo::testing {

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::map<std::string, double> writeprints_oracle(const std::string& text) {
  std::map<std::string, double> f;
  const std::string low = lower(text);
  for (char c = 'a'; c <= 'z'; ++c) f[std::string("letter:") + c] = static_cast<double>(std::count(low.begin(), low.end(), c));
  for (char c = '0'; c <= '9'; ++c) f[std::string("digit:") + c] = static_cast<double>(std::count(text.begin(), text.end(), c));
  for (char c : std::string("~@#$%^&*-_=+><[]{}/\\|"))
    f[std::string("special:") + c] = static_cast<double>(std::count(text.begin(), text.end(), c));
  for (char c : std::string(".,?!;:'\""))
    f[std::string("punct:") + c] = static_cast<double>(std::count(text.begin(), text.end(), c));
  for (const auto& g : resource_lines("char_bigrams.txt")) f["bigram:" + g] = static_cast<double>(count_substr(low, g));
  for (const auto& g : resource_lines("char_trigrams.txt")) f["trigram:" + g] = static_cast<double>(count_substr(low, g));

  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string item; in >> item;)
    if (std::all_of(item.begin(), item.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
      words.push_back(item);
  std::map<std::string, int> types;
  double letters = 0, short_words = 0;
  for (const auto& w : words) {
    letters += static_cast<double>(w.size());
    short_words += w.size() <= 3;
    ++types[lower(w)];
  }
  double hapax = 0, dis = 0;
  for (const auto& [w, n] : types) {
    hapax += n == 1;
    dis += n == 2;
  }
  f["rich:hapax_legomena"] = hapax;
  f["rich:dis_legomena"] = dis;
  for (const auto& fw : resource_lines("writeprints_function_words.txt"))
    f["fw:" + fw] = types.contains(fw) ? types[fw] : 0;

  const double chars = static_cast<double>(text.size());
  double digits = 0, upper = 0;
  for (char c : text) {
    digits += std::isdigit(static_cast<unsigned char>(c)) != 0;
    upper += std::isupper(static_cast<unsigned char>(c)) != 0;
  }
  f["lex:total_chars"] = chars;
  f["lex:total_words"] = static_cast<double>(words.size());
  f["lex:short_words"] = short_words;
  f["lex:avg_word_length"] = words.empty() ? 0.0 : letters / static_cast<double>(words.size());
  f["lex:pct_digits"] = digits / chars;
  f["lex:pct_uppercase"] = upper / chars;
  return f;
}

std::map<std::string, double> koppel_oracle(const std::string& text) {
  std::map<std::string, int> types;
  std::istringstream in(text);
  for (std::string item; in >> item;) ++types[lower(item)];
  std::map<std::string, double> f;
  for (const auto& w : resource_lines("koppel512.txt")) f["fw:" + w] = types.contains(w) ? types[w] : 0;
  return f;
}

}  // namespace stylo::testing
