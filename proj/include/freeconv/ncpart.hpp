#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

// The lattice NC(n) of non-crossing partitions of {1..n}: enumeration,
// refinement order, Moebius function relative to the top element, and the
// Kreweras complement. Everything here is exact integer combinatorics.

namespace freeconv::ncpart {

/// Set partition of {1..n} in canonical form: each block ascending,
/// blocks ordered by least element.
struct Partition {
    int n = 0;
    std::vector<std::vector<int>> blocks;

    Partition() = default;
    Partition(int n_, std::vector<std::vector<int>> blocks_) : n(n_), blocks(std::move(blocks_)) {
        canonicalize_and_validate();
    }

    bool operator==(const Partition& o) const { return n == o.n && blocks == o.blocks; }
    bool operator<(const Partition& o) const { return blocks < o.blocks; }

    /// block id of each element, 0-based, indexed by element-1
    std::vector<int> block_ids() const {
        std::vector<int> id(static_cast<size_t>(n), -1);
        for (size_t b = 0; b < blocks.size(); ++b)
            for (int e : blocks[b]) id[static_cast<size_t>(e - 1)] = static_cast<int>(b);
        return id;
    }

  private:
    void canonicalize_and_validate() {
        if (n < 1) throw std::invalid_argument("Partition: n must be positive");
        std::vector<char> seen(static_cast<size_t>(n), 0);
        for (auto& b : blocks) {
            if (b.empty()) throw std::invalid_argument("Partition: empty block");
            std::sort(b.begin(), b.end());
            for (int e : b) {
                if (e < 1 || e > n) throw std::invalid_argument("Partition: element out of range");
                if (seen[static_cast<size_t>(e - 1)]) throw std::invalid_argument("Partition: duplicate element");
                seen[static_cast<size_t>(e - 1)] = 1;
            }
        }
        for (char s : seen)
            if (!s) throw std::invalid_argument("Partition: blocks do not cover {1..n}");
        std::sort(blocks.begin(), blocks.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
    }
};

inline Partition singletons(int n) {
    std::vector<std::vector<int>> b;
    b.reserve(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) b.push_back({i});
    return Partition(n, std::move(b));
}

inline Partition one_block(int n) {
    std::vector<int> b(static_cast<size_t>(n));
    std::iota(b.begin(), b.end(), 1);
    return Partition(n, {b});
}

/// "{{1,4,5},{2},{3},{6,8},{7}}", whitespace-insensitive
inline std::string to_string(const Partition& p) {
    std::ostringstream os;
    os << '{';
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        if (b) os << ',';
        os << '{';
        for (size_t i = 0; i < p.blocks[b].size(); ++i) {
            if (i) os << ',';
            os << p.blocks[b][i];
        }
        os << '}';
    }
    os << '}';
    return os.str();
}

inline Partition parse_partition(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    size_t pos = 0;
    auto expect = [&](char c) {
        if (pos >= s.size() || s[pos] != c)
            throw std::invalid_argument("parse_partition: expected '" + std::string(1, c) + "' in " + text);
        ++pos;
    };
    expect('{');
    std::vector<std::vector<int>> blocks;
    int maxel = 0;
    while (pos < s.size() && s[pos] == '{') {
        ++pos;
        std::vector<int> block;
        while (pos < s.size() && s[pos] != '}') {
            size_t used = 0;
            int v = std::stoi(s.substr(pos), &used);
            block.push_back(v);
            maxel = std::max(maxel, v);
            pos += used;
            if (pos < s.size() && s[pos] == ',') ++pos;
        }
        expect('}');
        blocks.push_back(std::move(block));
        if (pos < s.size() && s[pos] == ',') ++pos;
    }
    expect('}');
    if (pos != s.size()) throw std::invalid_argument("parse_partition: trailing characters in " + text);
    return Partition(maxel, std::move(blocks));
}

/// Catalan number (2n)!/(n!(n+1)!), exact. Valid for 0 <= n <= 30; the
/// largest value c_30 = 3814986502092304 fits comfortably in 64 bits.
inline long long catalan(int n) {
    if (n < 0 || n > 30) throw std::out_of_range("catalan: n must be in [0,30]");
    static const std::vector<long long> table = [] {
        std::vector<long long> t(31);
        t[0] = 1;
        for (int k = 0; k < 30; ++k) t[static_cast<size_t>(k) + 1] = t[static_cast<size_t>(k)] * 2 * (2 * k + 1) / (k + 2);
        return t;
    }();
    return table[static_cast<size_t>(n)];
}

/// A partition crosses iff some i<j<k<l has i,k in one block and j,l in
/// another. Single left-to-right sweep with a stack of open blocks: when a
/// block reappears it must be the innermost open one.
inline bool is_noncrossing(const Partition& p) {
    const auto id = p.block_ids();
    std::vector<int> last(p.blocks.size());
    for (size_t b = 0; b < p.blocks.size(); ++b) last[b] = p.blocks[b].back();
    std::vector<char> open(p.blocks.size(), 0);
    std::vector<int> stack;
    for (int e = 1; e <= p.n; ++e) {
        const int b = id[static_cast<size_t>(e - 1)];
        if (!open[static_cast<size_t>(b)]) {
            open[static_cast<size_t>(b)] = 1;
            stack.push_back(b);
        } else if (stack.back() != b) {
            return false;
        }
        if (e == last[static_cast<size_t>(b)]) stack.pop_back();
    }
    return true;
}

/// p <= q in refinement order: every block of p lies inside a block of q.
inline bool leq(const Partition& p, const Partition& q) {
    if (p.n != q.n) throw std::invalid_argument("leq: partitions of different ground sets");
    const auto qid = q.block_ids();
    for (const auto& block : p.blocks) {
        const int target = qid[static_cast<size_t>(block.front() - 1)];
        for (int e : block)
            if (qid[static_cast<size_t>(e - 1)] != target) return false;
    }
    return true;
}

namespace detail {

// All non-crossing partitions of an m-element interval, as 0-based block
// lists. The block containing the first point is chosen as an increasing
// index sequence; the gaps between consecutive chosen points are independent
// sub-intervals, so recursion generates each partition exactly once.
inline void enum_nc_rec(int m, std::vector<std::vector<std::vector<int>>>& out) {
    out.clear();
    if (m == 0) {
        out.push_back({});
        return;
    }
    // memoized per length
    static std::vector<std::vector<std::vector<std::vector<int>>>> cache(1, {{}});
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::function<const std::vector<std::vector<std::vector<int>>>&(int)> get =
        [&](int len) -> const std::vector<std::vector<std::vector<int>>>& {
        while (static_cast<int>(cache.size()) <= len) {
            const int L = static_cast<int>(cache.size());
            std::vector<std::vector<std::vector<int>>> acc;
            // first block: 0 = i_0 < i_1 < ... < i_{k-1} < L, built left to right;
            // each gap (i_j, i_{j+1}) and the tail (i_last, L) filled recursively.
            std::vector<int> first;
            std::function<void(int, std::vector<std::vector<int>>&)> extend =
                [&](int from, std::vector<std::vector<int>>& partial) {
                    // close the first block here: tail (from, L) is one sub-interval
                    {
                        const auto& tail = cache[static_cast<size_t>(L - 1 - from)];
                        for (const auto& tp : tail) {
                            std::vector<std::vector<int>> blocks;
                            blocks.push_back(first);
                            for (const auto& b : partial) blocks.push_back(b);
                            for (const auto& b : tp) {
                                std::vector<int> shifted;
                                shifted.reserve(b.size());
                                for (int e : b) shifted.push_back(e + from + 1);
                                blocks.push_back(std::move(shifted));
                            }
                            acc.push_back(std::move(blocks));
                        }
                    }
                    // or extend it with a next point `to`
                    for (int to = from + 1; to < L; ++to) {
                        const auto& gap = cache[static_cast<size_t>(to - from - 1)];
                        first.push_back(to);
                        for (const auto& gp : gap) {
                            auto saved = partial;
                            for (const auto& b : gp) {
                                std::vector<int> shifted;
                                shifted.reserve(b.size());
                                for (int e : b) shifted.push_back(e + from + 1);
                                partial.push_back(std::move(shifted));
                            }
                            extend(to, partial);
                            partial = std::move(saved);
                        }
                        first.pop_back();
                    }
                };
            first.assign(1, 0);
            std::vector<std::vector<int>> empty_partial;
            extend(0, empty_partial);
            cache.push_back(std::move(acc));
        }
        return cache[static_cast<size_t>(len)];
    };
    out = get(m);
}

}  // namespace detail

/// All of NC(n) in a deterministic order, with a rank lookup keyed on the
/// canonical text form.
struct NCIndex {
    int n = 0;
    std::vector<Partition> partitions;
    std::unordered_map<std::string, int> rank;

    int index_of(const Partition& p) const {
        auto it = rank.find(to_string(p));
        if (it == rank.end()) throw std::invalid_argument("NCIndex: partition not in NC(n)");
        return it->second;
    }
};

/// Enumerate NC(n), 1 <= n <= 14 (c_14 ~ 2.67M is the practical memory limit).
/// Order: lexicographic on the canonical block form.
inline NCIndex enumerate_nc(int n) {
    if (n < 1 || n > 14) throw std::out_of_range("enumerate_nc: n must be in [1,14]");
    std::vector<std::vector<std::vector<int>>> raw;
    detail::enum_nc_rec(n, raw);
    NCIndex idx;
    idx.n = n;
    idx.partitions.reserve(raw.size());
    for (auto& blocks : raw) {
        for (auto& b : blocks)
            for (int& e : b) ++e;  // 0-based interval -> elements 1..n
        idx.partitions.emplace_back(n, std::move(blocks));
    }
    std::sort(idx.partitions.begin(), idx.partitions.end());
    if (static_cast<long long>(idx.partitions.size()) != catalan(n))
        throw std::logic_error("enumerate_nc: count does not match the Catalan number");
    idx.rank.reserve(idx.partitions.size() * 2);
    for (size_t i = 0; i < idx.partitions.size(); ++i)
        idx.rank.emplace(to_string(idx.partitions[i]), static_cast<int>(i));
    return idx;
}

/// Kreweras complement. Blocks read as cycles in increasing order give a
/// permutation p; the complement is the partition whose cycles are
/// p^{-1} composed with the full cycle (1 2 ... n). An anti-automorphism of
/// NC(n); applying it twice rotates labels by one step.
inline Partition kreweras(const Partition& p) {
    if (!is_noncrossing(p)) throw std::invalid_argument("kreweras: partition has a crossing");
    const int n = p.n;
    std::vector<int> perm(static_cast<size_t>(n));  // 0-based: block cycles
    for (const auto& b : p.blocks) {
        for (size_t i = 0; i + 1 < b.size(); ++i) perm[static_cast<size_t>(b[i] - 1)] = b[i + 1] - 1;
        perm[static_cast<size_t>(b.back() - 1)] = b.front() - 1;
    }
    std::vector<int> inv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) inv[static_cast<size_t>(perm[static_cast<size_t>(i)])] = i;
    // composite(i) = inv(gamma(i)) with gamma the full cycle i -> i+1 mod n
    std::vector<int> comp(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) comp[static_cast<size_t>(i)] = inv[static_cast<size_t>((i + 1) % n)];
    std::vector<char> done(static_cast<size_t>(n), 0);
    std::vector<std::vector<int>> blocks;
    for (int i = 0; i < n; ++i) {
        if (done[static_cast<size_t>(i)]) continue;
        std::vector<int> cyc;
        int j = i;
        do {
            done[static_cast<size_t>(j)] = 1;
            cyc.push_back(j + 1);
            j = comp[static_cast<size_t>(j)];
        } while (j != i);
        blocks.push_back(std::move(cyc));
    }
    return Partition(n, std::move(blocks));
}

namespace detail {

// mu(pi, 1_n) for every pi in NC(n) by the defining lattice recursion
// sum_{sigma >= pi} mu(sigma, 1_n) = [pi == 1_n], filled from coarse to fine.
inline const std::pair<NCIndex, std::vector<long long>>& moebius_table(int n) {
    static std::map<int, std::pair<NCIndex, std::vector<long long>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    NCIndex idx = enumerate_nc(n);
    const size_t m = idx.partitions.size();
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return idx.partitions[a].blocks.size() < idx.partitions[b].blocks.size();
    });
    std::vector<long long> mu_of(m, 0);
    for (size_t oi = 0; oi < m; ++oi) {
        const size_t pi = order[oi];
        const auto& p = idx.partitions[pi];
        long long acc = (p.blocks.size() == 1) ? 1 : 0;
        for (size_t oj = 0; oj < oi; ++oj) {
            const size_t sj = order[oj];
            const auto& s = idx.partitions[sj];
            if (s.blocks.size() >= p.blocks.size()) continue;
            if (leq(p, s)) acc -= mu_of[sj];
        }
        mu_of[pi] = acc;
    }
    auto [ins, ok] = cache.emplace(n, std::make_pair(std::move(idx), std::move(mu_of)));
    (void)ok;
    return ins->second;
}

}  // namespace detail

inline constexpr int moebius_recursion_limit = 9;

/// mu(pi, 1_n) for every pi in NC(n), computed by the lattice recursion.
/// Quadratic in |NC(n)|, so capped at n <= moebius_recursion_limit.
inline long long moebius_to_top_recursive(const Partition& p) {
    if (!is_noncrossing(p)) throw std::invalid_argument("moebius_to_top: partition has a crossing");
    if (p.n > moebius_recursion_limit)
        throw std::out_of_range("moebius_to_top_recursive: n too large for the lattice recursion");
    const auto& [idx, mu] = detail::moebius_table(p.n);
    return mu[static_cast<size_t>(idx.index_of(p))];
}

/// mu(pi, 1_n) as a product over the Kreweras complement's block sizes,
/// prod_{V in K(pi)} (-1)^{|V|-1} c_{|V|-1}. Matches the lattice recursion
/// on all of NC(n) for n <= 7 (checked exhaustively in the test suite) and
/// is used as the fast path beyond the recursion limit.
inline long long moebius_to_top(const Partition& p) {
    if (!is_noncrossing(p)) throw std::invalid_argument("moebius_to_top: partition has a crossing");
    if (p.n <= moebius_recursion_limit) return moebius_to_top_recursive(p);
    const Partition k = kreweras(p);
    long long acc = 1;
    for (const auto& v : k.blocks) {
        const int sz = static_cast<int>(v.size());
        acc *= ((sz - 1) % 2 == 0 ? 1 : -1) * catalan(sz - 1);
    }
    return acc;
}

}  // namespace freeconv::ncpart
