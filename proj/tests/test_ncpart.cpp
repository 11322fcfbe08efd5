#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "freeconv/ncpart.hpp"
#include "oracles.hpp"

using namespace freeconv::ncpart;

TEST_CASE("catalan numbers") {
    CHECK(catalan(0) == 1);
    CHECK(catalan(1) == 1);
    // evaluate the factorial formula (2n)!/(n!(n+1)!) independently
    CHECK(catalan(3) == oracles::factorial(6) / (oracles::factorial(3) * oracles::factorial(4)));
    CHECK(catalan(3) == 5);
    CHECK(catalan(4) == 14);
    CHECK(catalan(14) == 2674440);
    CHECK(catalan(30) == 3814986502092304LL);
    CHECK_THROWS_AS(catalan(-1), std::out_of_range);
    CHECK_THROWS_AS(catalan(31), std::out_of_range);
}

TEST_CASE("partition text form") {
    const Partition p = parse_partition("{{1,4,5},{2},{3},{6,8},{7}}");
    CHECK(p.n == 8);
    CHECK(to_string(p) == "{{1,4,5},{2},{3},{6,8},{7}}");
    // whitespace-insensitive, canonical reordering
    const Partition q = parse_partition("  { {6, 8}, {2}, {1, 4,5}, {7}, {3} } ");
    CHECK(p == q);
    CHECK_THROWS_AS(parse_partition("{{1,2},{2,3}}"), std::invalid_argument);
    CHECK_THROWS_AS(parse_partition("{{1,3}}"), std::invalid_argument);
    CHECK_THROWS_AS(parse_partition("{{1,2}"), std::invalid_argument);
}

TEST_CASE("is_noncrossing") {
    CHECK_FALSE(is_noncrossing(parse_partition("{{1,3},{2,4}}")));
    CHECK(is_noncrossing(parse_partition("{{1,4,5},{2},{3},{6,8},{7}}")));
    for (int n : {1, 3, 6}) CHECK(is_noncrossing(singletons(n)));
    CHECK(is_noncrossing(one_block(5)));

    SECTION("agrees with the quadruple-scan definition on all partitions, n <= 7") {
        for (int n = 1; n <= 7; ++n)
            for (const auto& p : oracles::all_set_partitions(n))
                CHECK(is_noncrossing(p) == !oracles::noncrossing_by_quadruples(p));
    }
}

TEST_CASE("enumerate_nc") {
    CHECK(enumerate_nc(1).partitions == std::vector<Partition>{singletons(1)});
    for (int n = 1; n <= 10; ++n)
        CHECK(static_cast<long long>(enumerate_nc(n).partitions.size()) == catalan(n));

    SECTION("n=3: every set partition is non-crossing") {
        const auto idx = enumerate_nc(3);
        const auto all = oracles::all_set_partitions(3);
        CHECK(all.size() == 5);
        for (const auto& p : all) CHECK(idx.rank.count(to_string(p)) == 1);
    }

    SECTION("n=4: exactly {{1,3},{2,4}} is excluded") {
        const auto idx = enumerate_nc(4);
        const auto all = oracles::all_set_partitions(4);
        CHECK(all.size() == 15);
        CHECK(idx.partitions.size() == 14);
        std::vector<std::string> missing;
        for (const auto& p : all)
            if (!idx.rank.count(to_string(p))) missing.push_back(to_string(p));
        REQUIRE(missing.size() == 1);
        CHECK(missing[0] == "{{1,3},{2,4}}");
    }

    SECTION("matches the brute-force filter exactly, n <= 7") {
        for (int n = 1; n <= 7; ++n) {
            std::set<std::string> brute;
            for (const auto& p : oracles::all_set_partitions(n))
                if (!oracles::noncrossing_by_quadruples(p)) brute.insert(to_string(p));
            std::set<std::string> enumerated;
            for (const auto& p : enumerate_nc(n).partitions) enumerated.insert(to_string(p));
            CHECK(brute == enumerated);
        }
    }

    SECTION("deterministic order and valid entries") {
        const auto idx = enumerate_nc(6);
        CHECK(std::is_sorted(idx.partitions.begin(), idx.partitions.end()));
        for (const auto& p : idx.partitions) CHECK(is_noncrossing(p));
    }

    CHECK_THROWS_AS(enumerate_nc(0), std::out_of_range);
    CHECK_THROWS_AS(enumerate_nc(15), std::out_of_range);
}

TEST_CASE("leq refinement order") {
    const auto p12 = parse_partition("{{1,2},{3}}");
    const auto p13 = parse_partition("{{1,3},{2}}");
    CHECK(leq(singletons(3), p12));
    CHECK(leq(p12, p12));
    CHECK_FALSE(leq(p12, p13));
    CHECK(leq(p12, one_block(3)));
    CHECK_THROWS_AS(leq(singletons(2), singletons(3)), std::invalid_argument);

    SECTION("partial order on NC(n), n <= 6, exhaustively") {
        for (int n = 2; n <= 6; ++n) {
            const auto idx = enumerate_nc(n);
            const auto& ps = idx.partitions;
            for (const auto& p : ps) CHECK(leq(p, p));
            for (size_t i = 0; i < ps.size(); ++i)
                for (size_t j = 0; j < ps.size(); ++j) {
                    if (leq(ps[i], ps[j]) && leq(ps[j], ps[i])) CHECK(i == j);
                }
            if (n <= 5) {
                for (size_t i = 0; i < ps.size(); ++i)
                    for (size_t j = 0; j < ps.size(); ++j) {
                        if (!leq(ps[i], ps[j])) continue;
                        for (size_t k = 0; k < ps.size(); ++k)
                            if (leq(ps[j], ps[k])) CHECK(leq(ps[i], ps[k]));
                    }
            }
        }
    }
}

TEST_CASE("moebius function") {
    for (int n : {1, 2, 4, 6}) CHECK(moebius_to_top(one_block(n)) == 1);
    CHECK(moebius_to_top(singletons(2)) == -1);
    CHECK(moebius_to_top(singletons(3)) == 2);

    SECTION("defining identity: sum over sigma >= pi vanishes off the top, n <= 6") {
        for (int n = 2; n <= 6; ++n) {
            const auto idx = enumerate_nc(n);
            for (const auto& p : idx.partitions) {
                long long acc = 0;
                for (const auto& s : idx.partitions)
                    if (leq(p, s)) acc += moebius_to_top(s);
                CHECK(acc == (p.blocks.size() == 1 ? 1 : 0));
            }
        }
    }

    SECTION("singleton partition: (-1)^{n-1} c_{n-1}, n <= 8") {
        for (int n = 1; n <= 8; ++n) {
            const long long expect = ((n - 1) % 2 == 0 ? 1 : -1) * catalan(n - 1);
            CHECK(moebius_to_top(singletons(n)) == expect);
        }
    }

    SECTION("Kreweras product formula matches the lattice recursion exhaustively, n <= 7") {
        for (int n = 1; n <= 7; ++n) {
            for (const auto& p : enumerate_nc(n).partitions) {
                long long prod = 1;
                for (const auto& v : kreweras(p).blocks) {
                    const int sz = static_cast<int>(v.size());
                    prod *= ((sz - 1) % 2 == 0 ? 1 : -1) * catalan(sz - 1);
                }
                CHECK(prod == moebius_to_top_recursive(p));
            }
        }
    }

    SECTION("fast path beyond the recursion limit stays consistent on segments") {
        // moebius of the singleton partition is known in closed form at any n
        for (int n = 10; n <= 12; ++n) {
            const long long expect = ((n - 1) % 2 == 0 ? 1 : -1) * catalan(n - 1);
            CHECK(moebius_to_top(singletons(n)) == expect);
            CHECK(moebius_to_top(one_block(n)) == 1);
        }
    }

    CHECK_THROWS_AS(moebius_to_top(parse_partition("{{1,3},{2,4}}")), std::invalid_argument);
}

TEST_CASE("kreweras complement") {
    CHECK(kreweras(one_block(4)) == singletons(4));
    CHECK(kreweras(singletons(4)) == one_block(4));
    CHECK(kreweras(parse_partition("{{1,2},{3}}")) == parse_partition("{{1},{2,3}}"));

    SECTION("maximality: the complement is the coarsest partition whose union with p is non-crossing") {
        // brute force over NC(3): interleave p on odd positions, q on even
        auto interleaved_ok = [](const Partition& p, const Partition& q) {
            std::vector<std::vector<int>> blocks;
            for (const auto& b : p.blocks) {
                std::vector<int> nb;
                for (int e : b) nb.push_back(2 * e - 1);
                blocks.push_back(nb);
            }
            for (const auto& b : q.blocks) {
                std::vector<int> nb;
                for (int e : b) nb.push_back(2 * e);
                blocks.push_back(nb);
            }
            return is_noncrossing(Partition(2 * p.n, std::move(blocks)));
        };
        for (int n = 2; n <= 5; ++n) {
            const auto idx = enumerate_nc(n);
            for (const auto& p : idx.partitions) {
                const auto k = kreweras(p);
                CHECK(interleaved_ok(p, k));
                // no strictly coarser q keeps the interleaving non-crossing
                for (const auto& q : idx.partitions)
                    if (leq(k, q) && !(q == k)) CHECK_FALSE(interleaved_ok(p, q));
            }
        }
    }

    SECTION("involution up to rotating labels, n <= 6") {
        auto rotate_down = [](const Partition& p) {
            std::vector<std::vector<int>> blocks;
            for (const auto& b : p.blocks) {
                std::vector<int> nb;
                for (int e : b) nb.push_back(e == 1 ? p.n : e - 1);
                blocks.push_back(nb);
            }
            return Partition(p.n, std::move(blocks));
        };
        for (int n = 2; n <= 6; ++n)
            for (const auto& p : enumerate_nc(n).partitions) CHECK(kreweras(kreweras(p)) == rotate_down(p));
    }

    SECTION("order-reversing") {
        const auto idx = enumerate_nc(5);
        for (const auto& p : idx.partitions)
            for (const auto& q : idx.partitions)
                if (leq(p, q)) CHECK(leq(kreweras(q), kreweras(p)));
    }

    CHECK_THROWS_AS(kreweras(parse_partition("{{1,3},{2,4}}")), std::invalid_argument);
}
