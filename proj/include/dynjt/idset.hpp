#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace dynjt {

using VarId = std::int32_t;

// Sorted, duplicate-free vector of variable ids. A plain sorted vector keeps
// iteration deterministic, which text dumps and operation counts rely on.
using IdSet = std::vector<VarId>;

inline void canonicalize(IdSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline IdSet id_set(std::initializer_list<VarId> xs) {
    IdSet s(xs);
    canonicalize(s);
    return s;
}

inline bool contains(const IdSet& s, VarId x) {
    return std::binary_search(s.begin(), s.end(), x);
}

inline IdSet set_union(const IdSet& a, const IdSet& b) {
    IdSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline void set_union_into(IdSet& a, const IdSet& b) {
    if (b.empty()) return;
    a = set_union(a, b);
}

inline IdSet set_intersection(const IdSet& a, const IdSet& b) {
    IdSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline IdSet set_difference(const IdSet& a, const IdSet& b) {
    IdSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// a subset-of b
inline bool is_subset(const IdSet& a, const IdSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace dynjt
