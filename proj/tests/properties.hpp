#pragma once

// Seeded property suites shared by the unit tests and the acceptance binary.
// Each suite runs `cases` random cases and returns a description of every failure.

#include <functional>
#include <string>
#include <vector>

#include "cantor/cantor.hpp"

namespace cantor::props {

struct Fixture {
    std::vector<ChainAction> chains;
    std::size_t max_level = 5;

    Fixture()
        : chains{build_odometer(2), build_odometer(3), build_toral(2, 2), build_dihedral(), build_heisenberg(2),
                 build_fragmented(), build_fat_cantor()} {
        for (const auto& c : chains) c.materialize(max_level + 1);
    }
};

inline const Fixture& fixture() {
    static const Fixture f;
    return f;
}

class Gen {
public:
    explicit Gen(std::uint64_t seed) : s_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(s_.below(n)); }
    const ChainAction& chain() { return fixture().chains[below(fixture().chains.size())]; }
    std::size_t level(std::size_t lo = 0) { return lo + below(fixture().max_level - lo + 1); }
    std::uint32_t point(const ChainAction& c, std::size_t l) { return static_cast<std::uint32_t>(below(c.size(l))); }

    Word word(const ChainAction& c, std::size_t max_len = 4) {
        Word w;
        const auto len = below(max_len + 1);
        for (std::size_t i = 0; i < len; ++i)
            w *= Word::generator(static_cast<std::uint32_t>(below(c.alphabet().size())), below(2) ? 1 : -1);
        return w;
    }

private:
    PointSampler s_;
};

using Failures = std::vector<std::string>;

inline std::string describe(const ChainAction& c, const Word& w, const std::string& what) {
    return c.name() + " " + render(w, c.alphabet()) + ": " + what;
}

inline Failures action_axioms(std::size_t cases, std::uint64_t seed) {
    Gen g(seed);
    Failures out;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& c = g.chain();
        const auto u = g.word(c), v = g.word(c);
        const auto l = g.level();
        const auto x = g.point(c, l);
        if (act(c, u * v, l, x) != act(c, u, l, act(c, v, l, x))) out.push_back(describe(c, u * v, "composition"));
        if (act(c, Word{}, l, x) != x) out.push_back(describe(c, Word{}, "identity"));
        if (act(c, u.inverse(), l, act(c, u, l, x)) != x) out.push_back(describe(c, u, "inverse"));
    }
    return out;
}

inline Failures equivariance(std::size_t cases, std::uint64_t seed) {
    Gen g(seed);
    Failures out;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& c = g.chain();
        const auto w = g.word(c);
        const auto l = g.level(1);
        const auto x = g.point(c, l);
        const auto& lvl = c.level(l);
        if (lvl.parent(act(c, w, l, x)) != act(c, w, l - 1, lvl.parent(x))) out.push_back(describe(c, w, "projection"));
    }
    return out;
}

inline Failures ratio_monotonicity(std::size_t cases, std::uint64_t seed) {
    Gen g(seed);
    Failures out;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& c = g.chain();
        const auto w = g.word(c);
        const auto l = g.level(0);
        if (l >= fixture().max_level) continue;
        const auto a = ratio(fixed_count(c, w, l), c.size(l));
        const auto b = ratio(fixed_count(c, w, l + 1), c.size(l + 1));
        if (b > a) out.push_back(describe(c, w, "ratio grew at level " + std::to_string(l + 1)));
    }
    return out;
}

inline Failures conjugation_invariance(std::size_t cases, std::uint64_t seed) {
    Gen g(seed);
    Failures out;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& c = g.chain();
        const auto w = g.word(c), t = g.word(c);
        const auto l = g.level();
        if (fixed_count(c, t * w * t.inverse(), l) != fixed_count(c, w, l))
            out.push_back(describe(c, w, "conjugate by " + render(t, c.alphabet())));
    }
    return out;
}

inline Failures core_monotonicity(std::size_t cases, std::uint64_t seed) {
    Gen g(seed);
    Failures out;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& c = g.chain();
        // bias toward stabilizer elements so the implication is exercised
        auto w = g.word(c);
        const auto k = g.level();
        if (g.below(2)) w = w.pow(static_cast<int>(c.size(k)));
        const auto i0 = k + g.below(fixture().max_level - k + 1);
        if (i0 >= fixture().max_level) continue;
        if (core_membership(c, w, k, i0 + 1) && !core_membership(c, w, k, i0))
            out.push_back(describe(c, w, "core at " + std::to_string(i0 + 1) + " but not " + std::to_string(i0)));
    }
    return out;
}

inline Failures ultrametric(std::size_t cases, std::uint64_t seed) {
    Gen g(seed);
    Failures out;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& c = g.chain();
        const auto l = g.level();
        const PointApprox x{l, g.point(c, l)}, y{l, g.point(c, l)}, z{l, g.point(c, l)};
        const auto dxz = distance(c, x, z).value;
        if (dxz > std::max(distance(c, x, y).value, distance(c, y, z).value))
            out.push_back(c.name() + ": ultrametric inequality");
        const auto w = g.word(c);
        const PointApprox wx{l, act(c, w, l, x.index)}, wy{l, act(c, w, l, y.index)};
        if (distance(c, wx, wy).value != distance(c, x, y).value) out.push_back(describe(c, w, "not an isometry"));
    }
    return out;
}

inline Failures base_level_zero_reduction(std::size_t cases, std::uint64_t seed) {
    Gen g(seed);
    Failures out;
    for (std::size_t i = 0; i < cases; ++i) {
        const auto& c = g.chain();
        const auto L = 1 + g.below(2);
        const auto N = 1 + g.below(4);
        const Rational tau(1 + static_cast<std::int64_t>(g.below(63)), 64);
        const auto classic = farber_check(c, L, N, tau);
        const auto local = local_farber_check(c, 0, L, N, tau);
        bool same = classic.words.size() == local.words.size() && classic.overall_pass == local.overall_pass;
        for (std::size_t j = 0; same && j < classic.words.size(); ++j)
            same = classic.words[j].word == local.words[j].word &&
                   classic.words[j].trajectory == local.words[j].trajectory &&
                   classic.words[j].verdict == local.words[j].verdict;
        if (!same) out.push_back(c.name() + ": k=0 localization differs at L=" + std::to_string(L));
    }
    return out;
}

struct Suite {
    const char* name;
    std::function<Failures(std::size_t, std::uint64_t)> run;
};

inline std::vector<Suite> all_suites() {
    return {{"action axioms", action_axioms},
            {"equivariance", equivariance},
            {"ratio monotonicity", ratio_monotonicity},
            {"conjugation invariance", conjugation_invariance},
            {"core monotonicity", core_monotonicity},
            {"ultrametric and isometry", ultrametric},
            {"base level zero reduction", base_level_zero_reduction}};
}

} // namespace cantor::props
