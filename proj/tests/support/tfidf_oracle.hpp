#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainforge/featurize.hpp"
#include "chainforge/text.hpp"

namespace testing {

// Dense reference: enumerate n-grams, count df, truncate, weight, normalize.
struct DenseTfidf {
  std::vector<std::string> terms;
  std::vector<double> idf;
  bool normalize = true;
  std::size_t lo = 1, hi = 1;

  static std::vector<std::string> grams(const std::string& doc, std::size_t lo, std::size_t hi) {
    const auto cps = chainforge::text::fold_case(chainforge::text::decode_utf8(doc));
    std::vector<std::string> out;
    for (std::size_t n = lo; n <= hi; ++n)
      for (std::size_t i = 0; i + n <= cps.size(); ++i) out.push_back(chainforge::text::encode_utf8(cps.substr(i, n)));
    return out;
  }

  DenseTfidf(const std::vector<std::string>& docs, const chainforge::NgramParams& p)
      : normalize(p.normalize), lo(p.n_min), hi(p.n_max) {
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
      const auto g = grams(d, lo, hi);
      for (const auto& t : std::set<std::string>(g.begin(), g.end())) ++df[t];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [t, c] : df)
      if (c >= p.min_df) kept.emplace_back(t, c);
    std::stable_sort(kept.begin(), kept.end(), [](auto& a, auto& b) { return a.second > b.second; });
    if (kept.size() > p.max_features) kept.resize(p.max_features);
    std::sort(kept.begin(), kept.end());
    const double n = static_cast<double>(docs.size());
    for (const auto& [t, c] : kept) {
      terms.push_back(t);
      idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(c))) + 1.0);
    }
  }

  std::vector<double> transform(const std::string& doc) const {
    std::vector<double> v(terms.size(), 0.0);
    for (const auto& g : grams(doc, lo, hi)) {
      auto it = std::lower_bound(terms.begin(), terms.end(), g);
      if (it != terms.end() && *it == g) v[static_cast<std::size_t>(it - terms.begin())] += 1.0;
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= idf[i];
    if (normalize) {
      double s = 0.0;
      for (double x : v) s += x * x;
      if (s > 0)
        for (double& x : v) x /= std::sqrt(s);
    }
    return v;
  }
};

}  // namespace testing
