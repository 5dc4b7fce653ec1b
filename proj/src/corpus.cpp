#include "qbfchan/corpus.hpp"

#include <stdexcept>

namespace qbfchan {

std::vector<Clause> corpus_clauses(int n) {
  // Each variable is absent (0), positive (1) or negative (2); skip the
  // all-absent combination.
  std::vector<Clause> out;
  long combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  for (long code = 1; code < combos; ++code) {
    Clause clause;
    long rest = code;
    for (int var = 1; var <= n; ++var) {
      int digit = rest % 3;
      rest /= 3;
      if (digit == 1) clause.literals.push_back({var, true});
      else if (digit == 2) clause.literals.push_back({var, false});
    }
    out.push_back(std::move(clause));
  }
  return out;
}

std::vector<CorpusInstance> small_formula_corpus(int max_n, int max_m) {
  if (max_n < 1 || max_n > 4 || max_m < 1 || max_m > 2)
    throw std::invalid_argument("small_formula_corpus: supported ranges n in 1..4, m in 1..2");

  std::vector<CorpusInstance> corpus;
  for (int n = 1; n <= max_n; ++n) {
    const auto clauses = corpus_clauses(n);
    for (unsigned prefix = 0; prefix < (1u << n); ++prefix) {
      std::vector<Quantifier> quants;
      std::string prefix_str;
      for (int j = 0; j < n; ++j) {
        const bool universal = (prefix >> j) & 1;
        quants.push_back(universal ? Quantifier::Universal : Quantifier::Existential);
        prefix_str += universal ? 'a' : 'e';
      }
      auto add = [&](std::vector<Clause> cs, const std::string& cid) {
        QbfFormula f;
        f.n = n;
        f.quants = quants;
        f.clauses = std::move(cs);
        corpus.push_back({std::move(f), "n" + std::to_string(n) + "_" + prefix_str + "_" + cid});
      };
      for (size_t c = 0; c < clauses.size(); ++c) add({clauses[c]}, "c" + std::to_string(c));
      if (max_m >= 2) {
        for (size_t c1 = 0; c1 < clauses.size(); ++c1)
          for (size_t c2 = c1; c2 < clauses.size(); ++c2)
            add({clauses[c1], clauses[c2]},
                "c" + std::to_string(c1) + "_" + std::to_string(c2));
      }
    }
  }
  return corpus;
}

}  // namespace qbfchan
