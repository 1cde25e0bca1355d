#include "astres/schema/values.hpp"

#include <algorithm>
#include <set>

#include "astres/text/tokenize.hpp"

namespace astres::schema {

std::map<ColumnId, ValueSelection> select_values(const SchemaCatalog &catalog, const SubSchema &sub,
                                                 std::string_view question, std::size_t top_k) {
  std::map<ColumnId, ValueSelection> out;
  auto q = text::tokenize(question);
  std::set<std::string> qset(q.begin(), q.end());

  for (const auto &[id, prov] : sub.columns) {
    const Column &col = catalog.column(id);
    if (col.type == ColumnType::Number || col.values.empty())
      continue;

    std::vector<std::pair<std::size_t, const std::string *>> hits;
    std::vector<const std::string *> misses;
    std::set<std::string_view> seen;
    for (const auto &v : col.values) {
      if (!seen.insert(v).second)
        continue;
      auto toks = text::tokenize(v);
      std::set<std::string> distinct(toks.begin(), toks.end());
      std::size_t score = 0;
      for (const auto &t : distinct)
        score += qset.count(t);
      if (score > 0)
        hits.emplace_back(score, &v);
      else
        misses.push_back(&v);
    }
    std::sort(hits.begin(), hits.end(), [](const auto &a, const auto &b) {
      if (a.first != b.first)
        return a.first > b.first;
      return *a.second < *b.second;
    });

    ValueSelection sel{id, {}, !hits.empty()};
    for (const auto &h : hits) {
      if (sel.values.size() >= top_k)
        break;
      sel.values.push_back(*h.second);
    }
    for (const auto *m : misses) {
      if (sel.values.size() >= top_k)
        break;
      sel.values.push_back(*m);
    }
    out.emplace(id, std::move(sel));
  }
  return out;
}

} // namespace astres::schema
