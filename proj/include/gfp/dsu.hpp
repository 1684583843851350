#ifndef GFP_DSU_HPP
#define GFP_DSU_HPP

#include <cstdint>
#include <numeric>
#include <vector>

namespace gfp {

// Union-find with path halving.
struct DSU {
    std::vector<int32_t> parent;

    explicit DSU(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int32_t find(int32_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(int32_t a, int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b] = a;
    }
    bool connected(int32_t a, int32_t b) { return find(a) == find(b); }
};

}  // namespace gfp

#endif
