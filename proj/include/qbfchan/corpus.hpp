#ifndef QBFCHAN_CORPUS_HPP
#define QBFCHAN_CORPUS_HPP

#include <string>
#include <vector>

#include "qbfchan/qbf.hpp"

namespace qbfchan {

struct CorpusInstance {
  QbfFormula formula;
  std::string id;
};

// The exhaustive small-formula suite: for each n in 1..max_n, every
// quantifier prefix, and every formula of one clause or an unordered pair
// of clauses (repetition allowed) drawn from the 3^n - 1 non-tautological
// non-empty clauses over x1..xn. Deterministic order.
std::vector<CorpusInstance> small_formula_corpus(int max_n = 3, int max_m = 2);

// All candidate clauses over n variables, in the corpus' canonical order.
std::vector<Clause> corpus_clauses(int n);

}  // namespace qbfchan

#endif
