#include "tmkit/event.hpp"

#include <cctype>
#include <map>

namespace tmkit {

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ei = i;
      std::size_t ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      // Compare digit runs by value: strip leading zeros, then length, then text.
      std::size_t si = i;
      std::size_t sj = j;
      while (si + 1 < ei && a[si] == '0') ++si;
      while (sj + 1 < ej && b[sj] == '0') ++sj;
      const std::size_t li = ei - si;
      const std::size_t lj = ej - sj;
      if (li != lj) return li < lj;
      const int cmp = a.compare(si, li, b, sj, lj);
      if (cmp != 0) return cmp < 0;
      if (ei - i != ej - j) return ei - i < ej - j;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

std::set<std::pair<EventId, EventId>> transitive_closure(const std::vector<PrecedenceEdge>& edges) {
  std::map<EventId, std::set<EventId>> succ;
  for (const auto& e : edges) succ[e.before].insert(e.after);
  std::set<std::pair<EventId, EventId>> out;
  for (const auto& [start, _] : succ) {
    std::vector<EventId> stack(succ[start].begin(), succ[start].end());
    std::set<EventId> seen;
    while (!stack.empty()) {
      EventId node = std::move(stack.back());
      stack.pop_back();
      if (!seen.insert(node).second) continue;
      out.emplace(start, node);
      if (auto it = succ.find(node); it != succ.end()) {
        stack.insert(stack.end(), it->second.begin(), it->second.end());
      }
    }
  }
  return out;
}

}  // namespace tmkit
