#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace fracmetric {

/// Disjoint sets with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

    size_t size() const { return parent_.size(); }

private:
    std::vector<size_t> parent_;
    std::vector<size_t> size_;
};

} // namespace fracmetric
