#include <gtest/gtest.h>

#include <set>

#include "cantor/builders.hpp"
#include "cantor/chain_ops.hpp"
#include "cantor/holonomy.hpp"
#include "cantor/mealy.hpp"

using namespace cantor;

namespace {

// Brute force: does w fix every depth-N point over the level-l vertex v?
bool fiber_fixed(const ChainAction& chain, const Word& w, std::size_t l, std::uint32_t v, std::size_t depth) {
    for (auto x : fiber(chain, l, depth, v))
        if (act(chain, w, depth, x) != x) return false;
    return true;
}

struct BruteFixedSet {
    std::vector<Cylinder> maximal;
    Rational interior = 0;
    Rational fixed_ratio = 0;
};

BruteFixedSet brute_fixed_set(const ChainAction& chain, const Word& w, std::size_t depth) {
    BruteFixedSet out;
    for (std::size_t l = 0; l < depth; ++l)
        for (std::uint32_t v = 0; v < chain.size(l); ++v) {
            if (!fiber_fixed(chain, w, l, v, depth)) continue;
            if (l > 0 && fiber_fixed(chain, w, l - 1, chain.level(l).parent(v), depth)) continue;
            out.maximal.push_back({l, v});
            out.interior += Rational(1, static_cast<std::int64_t>(chain.size(l)));
        }
    std::size_t fixed = 0;
    for (std::uint32_t x = 0; x < chain.size(depth); ++x) fixed += act(chain, w, depth, x) == x;
    out.fixed_ratio = ratio(fixed, chain.size(depth));
    return out;
}

// Brute-force scale from the definition: k is blocked when some word fixes a level-k
// vertex v, fixes the depth-N fiber of a strictly deeper cylinder (level <= N-1) below v,
// and moves a depth-N point over v.
std::optional<std::size_t> brute_lqa(const ChainAction& chain, std::size_t max_len, std::size_t depth) {
    std::optional<std::size_t> blocked;
    for (const auto& w : enumerate_words(chain.alphabet().size(), max_len, 100000))
        for (std::size_t k = 0; k + 2 <= depth; ++k)
            for (std::uint32_t v = 0; v < chain.size(k); ++v) {
                if (act(chain, w, k, v) != v || fiber_fixed(chain, w, k, v, depth)) continue;
                bool hit = false;
                for (std::size_t l = k + 1; l < depth && !hit; ++l)
                    for (auto u : fiber(chain, k, l, v))
                        if (fiber_fixed(chain, w, l, u, depth)) {
                            hit = true;
                            break;
                        }
                if (hit && (!blocked || k > *blocked)) blocked = k;
            }
    const std::size_t k = blocked ? *blocked + 1 : 0;
    if (k + 2 > depth) return std::nullopt;
    return k;
}

} // namespace

TEST(FixedSetReport, FragmentedG) {
    auto f = build_fragmented();
    const auto r = fixed_set_report(f, parse_word("g", f.alphabet()), 5);
    EXPECT_EQ(r.fixed_ratio(), Rational(1, 2));
    ASSERT_EQ(r.maximal_fixed_cylinders.size(), 1u);
    EXPECT_EQ(r.maximal_fixed_cylinders[0].level, 1u);
    EXPECT_EQ(r.maximal_fixed_cylinders[0].vertex, 0u);
    EXPECT_EQ(r.interior_bound, Rational(1, 2));
    EXPECT_EQ(r.hol_estimate, Rational(0));
}

TEST(FixedSetReport, HeisenbergB) {
    auto h = build_heisenberg(2);
    const auto r = fixed_set_report(h, parse_word("B", h.alphabet()), 3);
    EXPECT_EQ(r.fixed_ratio(), Rational(1, 8));
    EXPECT_TRUE(r.maximal_fixed_cylinders.empty());
    EXPECT_EQ(r.hol_estimate, Rational(1, 8));
}

TEST(FixedSetReport, RejectsIdentity) {
    auto f = build_fragmented();
    EXPECT_THROW(fixed_set_report(f, Word{}, 3), InvalidInput);
    EXPECT_THROW(fixed_set_report(f, parse_word("h*h^-1", f.alphabet()), 3), InvalidInput);
}

TEST(FixedSetReport, MatchesBruteForce) {
    std::vector<ChainAction> chains{build_fragmented(), build_dihedral(), build_heisenberg(2), build_fat_cantor(),
                                    build_odometer(3)};
    for (const auto& chain : chains) {
        for (const auto& w : enumerate_words(chain.alphabet().size(), 2, 1000)) {
            for (std::size_t depth : {1u, 3u, 4u}) {
                const auto r = fixed_set_report(chain, w, depth);
                const auto b = brute_fixed_set(chain, w, depth);
                EXPECT_EQ(r.fixed_ratio(), b.fixed_ratio);
                EXPECT_EQ(r.interior_bound, b.interior);
                EXPECT_EQ(r.maximal_fixed_cylinders, b.maximal);
                EXPECT_LE(r.interior_bound, r.fixed_ratio());
                EXPECT_GE(r.hol_estimate, 0);
                for (std::size_t i = 1; i < r.fixed_ratios.size(); ++i) EXPECT_LE(r.fixed_ratios[i], r.fixed_ratios[i - 1]);
            }
        }
    }
}

TEST(FixedSetReport, RefutedCylindersNeverReappear) {
    std::vector<ChainAction> chains{build_fragmented(), build_fat_cantor(), build_dihedral()};
    for (const auto& chain : chains) {
        for (const auto& w : enumerate_words(chain.alphabet().size(), 2, 1000)) {
            std::set<std::pair<std::size_t, std::uint32_t>> refuted;
            for (std::size_t depth = 1; depth <= 6; ++depth) {
                for (std::size_t l = 0; l < depth; ++l)
                    for (std::uint32_t v = 0; v < chain.size(l); ++v) {
                        const bool fixed = fiber_fixed(chain, w, l, v, depth);
                        if (fixed) EXPECT_FALSE(refuted.count({l, v}));
                        // a cylinder fixed at an earlier depth that fails now is refuted for good
                        if (!fixed && depth > l + 1 && fiber_fixed(chain, w, l, v, depth - 1)) refuted.insert({l, v});
                    }
            }
        }
    }
}

TEST(FixedSetReport, OdometerPowers) {
    auto o = build_odometer(2);
    for (int m = 1; m <= 8; ++m) {
        const auto r = fixed_set_report(o, parse_word("a^" + std::to_string(m), o.alphabet()), 6);
        for (std::size_t l = 1; l <= 6; ++l)
            EXPECT_EQ(r.fixed_ratios[l - 1], m % (1 << l) == 0 ? Rational(1) : Rational(0));
    }
}

TEST(DensityProfile, Examples) {
    auto o = build_odometer(2);
    const auto p = density_profile(o, parse_word("a", o.alphabet()), {4, 5});
    for (const auto& e : p.entries) EXPECT_EQ(e, Rational(0));

    auto f = build_fragmented();
    const auto q = density_profile(f, parse_word("g", f.alphabet()), {6, 4});
    EXPECT_EQ(q.entries[0], Rational(1, 2));
    EXPECT_EQ(q.entries[1], Rational(1));  // fiber of the even level-1 vertex is fixed

    // Heisenberg B around (0,0): fixed points over x's ancestors have x-coordinate 0 mod 2^N
    auto h = build_heisenberg(2);
    const auto b = density_profile(h, parse_word("B", h.alphabet()), {3, 0});
    EXPECT_EQ(b.entries, (std::vector<Rational>{Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(1)}));
}

TEST(DensityProfile, MatchesFiberScan) {
    auto chain = build_fat_cantor();
    const auto w = parse_word("g*h^3*g^-1", chain.alphabet());
    for (std::uint32_t x = 0; x < chain.size(4); x += 7) {
        const auto p = density_profile(chain, w, {4, x});
        for (std::size_t l = 0; l <= 4; ++l) {
            const auto v = ancestor(chain, 4, x, l);
            std::size_t fixed = 0;
            const auto f = fiber(chain, l, 4, v);
            for (auto y : f) fixed += act(chain, w, 4, y) == y;
            EXPECT_EQ(p.entries[l], ratio(fixed, f.size()));
            EXPECT_GE(p.entries[l], 0);
            EXPECT_LE(p.entries[l], 1);
        }
    }
}

TEST(Witnesses, Fragmented) {
    auto f = build_fragmented();
    const auto ws = partial_triviality_witnesses(f, 6, {1});
    bool found = false;
    for (const auto& w : ws) {
        EXPECT_FALSE(w.exact_checked);
        if (render(w.word, f.alphabet()) == "g" && w.cylinder.level == 1 && w.cylinder.vertex == 0) found = true;
    }
    EXPECT_TRUE(found);
}

TEST(Witnesses, OdometerHasNone) {
    EXPECT_TRUE(partial_triviality_witnesses(build_odometer(2), 8, {3}).empty());
}

TEST(Witnesses, SoundAndExactOnMealy) {
    MealyMachine m(2, {"a", "b", "e"}, {{2, 0}, {2, 0}, {2, 2}}, {{1, 0}, {0, 1}, {0, 1}}, {{"a", 0}, {"b", 1}});
    auto chain = build_mealy(m);
    const auto ws = partial_triviality_witnesses(chain, 6, {2});
    ASSERT_FALSE(ws.empty());
    bool b_exact = false;
    for (const auto& w : ws) {
        EXPECT_TRUE(w.exact_checked);
        EXPECT_TRUE(fiber_fixed(chain, w.word, w.cylinder.level, w.cylinder.vertex, 6));
        EXPECT_LT(fixed_count(chain, w.word, 6), chain.size(6));
        if (render(w.word, chain.alphabet()) == "b" && w.cylinder.level == 1 && w.cylinder.vertex == 0)
            b_exact = w.exact;
    }
    EXPECT_TRUE(b_exact);
}

TEST(Witnesses, ThreadCountDoesNotChangeOutput) {
    auto chain = build_fat_cantor();
    const auto one = partial_triviality_witnesses(chain, 5, {2, 100000, 1});
    const auto four = partial_triviality_witnesses(chain, 5, {2, 100000, 4});
    ASSERT_EQ(one.size(), four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].word, four[i].word);
        EXPECT_EQ(one[i].cylinder, four[i].cylinder);
    }
}

TEST(Lqa, Examples) {
    const auto frag = lqa_scale_estimate(build_fragmented(), 8, {2});
    ASSERT_TRUE(frag.level);
    EXPECT_EQ(*frag.level, 1u);
    EXPECT_EQ(frag.scale(), Rational(1, 2));
    const auto odo = lqa_scale_estimate(build_odometer(2), 8, {3});
    ASSERT_TRUE(odo.level);
    EXPECT_EQ(*odo.level, 0u);
    EXPECT_FALSE(odo.last_blocking_word);
    const auto fat = lqa_scale_estimate(build_fat_cantor(), 8, {1});
    if (fat.level) EXPECT_LE(*fat.level, 8u);
}

TEST(Lqa, MatchesDefinition) {
    std::vector<ChainAction> chains{build_fragmented(), build_dihedral(), build_fat_cantor(), build_heisenberg(2)};
    for (const auto& chain : chains)
        for (std::size_t depth : {3u, 5u})
            EXPECT_EQ(lqa_scale_estimate(chain, depth, {2}).level, brute_lqa(chain, 2, depth)) << chain.name();
}
