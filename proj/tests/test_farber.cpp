#include <gtest/gtest.h>

#include <array>
#include <functional>

#include "cantor/builders.hpp"
#include "cantor/farber.hpp"
#include "cantor/finite_image.hpp"
#include "cantor/holonomy.hpp"

using namespace cantor;

namespace {

// Brute force: ratio of even residues mod 2^i fixed by w, on the fragmented tower.
Rational even_fiber_ratio(const ChainAction& chain, const Word& w, std::size_t i) {
    const std::uint32_t m = 1u << i;
    std::size_t fixed = 0, total = 0;
    for (std::uint32_t x = 0; x < m; x += 2, ++total) fixed += act(chain, w, i, x) == x;
    return ratio(fixed, total);
}

} // namespace

TEST(Farber, DihedralReflection) {
    auto d = build_dihedral();
    const auto r = parse_word("r", d.alphabet());
    const auto rep = farber_check(d, {r}, 10, Rational(1, 100));
    ASSERT_EQ(rep.words.size(), 1u);
    for (std::size_t l = 1; l <= 10; ++l)
        EXPECT_EQ(rep.words[0].trajectory[l - 1], Rational(2, std::int64_t{1} << l)) << l;
    EXPECT_EQ(rep.words[0].verdict, Verdict::pass);
    EXPECT_TRUE(rep.overall_pass);
}

TEST(Farber, FragmentedFails) {
    auto f = build_fragmented();
    const auto rep = farber_check(f, {parse_word("g", f.alphabet())}, 10, Rational(49, 100));
    for (std::size_t l = 2; l <= 10; ++l) EXPECT_EQ(rep.words[0].trajectory[l - 1], Rational(1, 2));
    EXPECT_EQ(rep.words[0].verdict, Verdict::fail);
    EXPECT_FALSE(rep.overall_pass);
}

TEST(Farber, OdometerPasses) {
    const auto rep = farber_check(build_odometer(2), 3, 10, Rational(1, 100));
    EXPECT_EQ(rep.words.size(), 6u);
    for (const auto& w : rep.words) {
        EXPECT_EQ(w.verdict, Verdict::pass);
        EXPECT_EQ(w.trajectory.back(), Rational(0));
    }
    EXPECT_TRUE(rep.overall_pass);
    EXPECT_EQ(rep.max_word_length, 3u);
}

TEST(Farber, VerdictInvariants) {
    for (const auto& chain : {build_fragmented(), build_heisenberg(2), build_fat_cantor()}) {
        const Rational tau(1, 16);
        const auto rep = farber_check(chain, 2, 5, tau);
        for (const auto& w : rep.words) {
            for (std::size_t i = 1; i < w.trajectory.size(); ++i) EXPECT_LE(w.trajectory[i], w.trajectory[i - 1]);
            const bool moves = fixed_count(chain, w.word, 5) < chain.size(5);
            if (!moves) EXPECT_EQ(w.verdict, Verdict::indistinguishable);
            else EXPECT_EQ(w.verdict == Verdict::pass, w.trajectory.back() < tau);
        }
    }
}

TEST(Farber, OdometerPowerIsIndistinguishable) {
    auto o = build_odometer(2);
    const auto rep = farber_check(o, {parse_word("a^16", o.alphabet())}, 4, Rational(1, 64));
    EXPECT_EQ(rep.words[0].verdict, Verdict::indistinguishable);
    EXPECT_TRUE(rep.overall_pass);
}

TEST(Farber, RejectsBadInput) {
    auto o = build_odometer(2);
    const auto a = parse_word("a", o.alphabet());
    EXPECT_THROW(farber_check(o, {a}, 4, Rational(0)), InvalidInput);
    EXPECT_THROW(farber_check(o, {a}, 4, Rational(1)), InvalidInput);
    EXPECT_THROW(farber_check(o, {Word{}}, 4, Rational(1, 2)), InvalidInput);
    EXPECT_THROW(local_farber_check(o, 4, 2, 4, Rational(1, 2)), InvalidInput);
    EXPECT_THROW(core_membership(o, a, 3, 2), InvalidInput);
}

TEST(Farber, PassLeavesOnlyTruncationWitnesses) {
    // A pass at depth N can coexist with witnesses on level N-1 cylinders whose whole
    // depth-N fiber happens to be fixed (r fixes 0 and 2^(N-1) on the dihedral tower).
    // Each such witness must be refuted one level deeper.
    for (const auto& chain : {build_odometer(2), build_dihedral(), build_toral(2, 2)}) {
        const auto rep = farber_check(chain, 2, 6, Rational(1, 16));
        ASSERT_TRUE(rep.overall_pass) << chain.name();
        for (const auto& w : partial_triviality_witnesses(chain, 6, {2})) {
            EXPECT_EQ(w.cylinder.level, 5u);
            bool refuted = false;
            for (auto x : fiber(chain, w.cylinder.level, 7, w.cylinder.vertex)) refuted = refuted || act(chain, w.word, 7, x) != x;
            EXPECT_TRUE(refuted) << chain.name() << " " << render(w.word, chain.alphabet());
        }
    }
}

TEST(Core, Examples) {
    auto f = build_fragmented();
    EXPECT_TRUE(core_membership(f, parse_word("g", f.alphabet()), 1, 6));
    auto d = build_dihedral();
    EXPECT_FALSE(core_membership(d, parse_word("r", d.alphabet()), 1, 3));
    EXPECT_EQ(act(d, parse_word("r", d.alphabet()), 3, 2), 6u);
    for (std::size_t k = 0; k <= 4; ++k)
        for (std::size_t i = k; i <= 4; ++i) EXPECT_TRUE(core_membership(d, Word{}, k, i));
}

TEST(Core, ResidualFinitenessProbe) {
    // Faithful affine models on Z^2: a word is a nonidentity element iff it moves
    // one of (0,0), (1,0), (0,1).
    using P = std::array<std::int64_t, 2>;
    using Gen = std::function<P(P, int)>;
    const std::vector<std::pair<ChainAction, std::vector<Gen>>> cases{
        {build_odometer(2), {[](P x, int s) { return P{x[0] + s, x[1]}; }}},
        {build_dihedral(),
         {[](P x, int s) { return P{x[0] + s, x[1]}; }, [](P x, int) { return P{-x[0], x[1]}; }}},
        {build_heisenberg(2),
         {[](P x, int s) { return P{x[0] + s, x[1]}; }, [](P x, int s) { return P{x[0], x[1] + s * x[0]}; },
          [](P x, int s) { return P{x[0], x[1] - s}; }}},
    };
    for (const auto& [chain, gens] : cases) {
        for (const auto& w : enumerate_words(chain.alphabet().size(), 3, 10000)) {
            bool nontrivial = false;
            for (P x : {P{0, 0}, P{1, 0}, P{0, 1}}) {
                P y = x;
                const auto& ls = w.letters();
                for (auto it = ls.rbegin(); it != ls.rend(); ++it) y = gens[it->gen](y, it->sign);
                nontrivial = nontrivial || y != x;
            }
            bool exits = false;
            for (std::size_t n = 1; n <= 10 && !exits; ++n) exits = !core_membership(chain, w, 0, n);
            EXPECT_EQ(exits, nontrivial) << chain.name() << " " << render(w, chain.alphabet());
        }
    }
}

TEST(LocalFarber, FragmentedPasses) {
    auto f = build_fragmented();
    const auto rep = local_farber_check(f, 1, 4, 10, Rational(1, 64));
    EXPECT_TRUE(rep.overall_pass);
    bool saw_core = false;
    for (const auto& w : rep.words) {
        // brute-force ratio over the even fiber
        for (std::size_t i = 2; i <= 10; i += 4) EXPECT_EQ(w.trajectory[i - 2], even_fiber_ratio(f, w.word, i));
        if (w.verdict == Verdict::indistinguishable) {
            saw_core = true;
            EXPECT_TRUE(core_membership(f, w.word, 1, 10));
        }
    }
    EXPECT_TRUE(saw_core);
}

TEST(LocalFarber, OdometerPasses) {
    const auto rep = local_farber_check(build_odometer(2), 1, 3, 10, Rational(1, 64));
    EXPECT_TRUE(rep.overall_pass);
    ASSERT_EQ(rep.schreier_generators.size(), 1u);
    for (const auto& w : rep.words) EXPECT_EQ(w.trajectory.back(), Rational(0));
}

TEST(LocalFarber, BaseLevelZeroIsClassic) {
    for (const auto& chain : {build_dihedral(), build_fragmented(), build_heisenberg(2)}) {
        const auto classic = farber_check(chain, 3, 6, Rational(1, 64));
        const auto local = local_farber_check(chain, 0, 3, 6, Rational(1, 64));
        ASSERT_EQ(classic.words.size(), local.words.size());
        for (std::size_t i = 0; i < classic.words.size(); ++i) {
            EXPECT_EQ(classic.words[i].word, local.words[i].word);
            EXPECT_EQ(classic.words[i].trajectory, local.words[i].trajectory);
            EXPECT_EQ(classic.words[i].verdict, local.words[i].verdict);
        }
        EXPECT_EQ(classic.overall_pass, local.overall_pass);
    }
}

TEST(LocalFarber, SchreierCap) {
    auto h = build_heisenberg(2);
    EXPECT_THROW(local_farber_check(h, 2, 1, 3, Rational(1, 64), {1'000'000, 2, 1}), ResourceError);
}

TEST(StabilizerCount, Examples) {
    auto d = build_dihedral();
    const auto s = stabilizer_count_oracle(d, parse_word("r", d.alphabet()), 3, 4096);
    EXPECT_EQ(s.group_order, 16u);
    EXPECT_EQ(s.fixed_ratio, Rational(2, 8));
    EXPECT_EQ(s.subgroup_ratio, Rational(2, 8));

    auto o = build_odometer(2);
    const auto t = stabilizer_count_oracle(o, parse_word("a", o.alphabet()), 4, 4096);
    EXPECT_EQ(t.stabilizers, 1u);
    EXPECT_EQ(t.subgroup_ratio, Rational(0));

    auto h = build_heisenberg(2);
    const auto u = stabilizer_count_oracle(h, parse_word("B", h.alphabet()), 2, 4096);
    EXPECT_EQ(u.group_order, 64u);
    EXPECT_EQ(u.subgroup_ratio, u.fixed_ratio);
}

TEST(StabilizerCount, OrderCap) {
    auto d = build_dihedral();
    try {
        stabilizer_count_oracle(d, parse_word("r", d.alphabet()), 5, 10);
        FAIL() << "expected a resource error";
    } catch (const ResourceError& e) {
        EXPECT_EQ(e.budget(), "max_order");
        EXPECT_NE(std::string(e.what()).find("frontier"), std::string::npos);
    }
}

TEST(FiniteImage, LowerCentralSeries) {
    auto h = build_heisenberg(2);
    const auto g = FiniteImage::close(h.level(2), 4096);
    const auto series = g.lower_central_series(3);
    EXPECT_EQ(series[0].order(), 64u);
    EXPECT_EQ(series[1].order(), 4u);  // the centre ⟨C⟩ mod 4
    EXPECT_EQ(series[2].order(), 1u);
}
