#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cantor/chain.hpp"
#include "cantor/chain_ops.hpp"
#include "cantor/errors.hpp"
#include "cantor/parallel.hpp"
#include "cantor/rational.hpp"
#include "cantor/word.hpp"

namespace cantor {

enum class Verdict { pass, fail, indistinguishable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass-at-depth";
        case Verdict::fail: return "fail-at-depth";
        case Verdict::indistinguishable: return "indistinguishable-from-identity";
    }
    return "unknown";
}

struct WordVerdict {
    Word word;
    std::size_t first_level = 1;      // trajectory[0] is at this level
    std::vector<Rational> trajectory;  // fixed fraction per level up to the depth
    Verdict verdict = Verdict::pass;
};

/// Finite-depth evidence for the (local) Farber criterion. A pass is
/// evidence at (depth, tolerance, word cap), not a proof of the limit.
struct FarberReport {
    std::size_t depth = 0;
    Rational tolerance;
    std::optional<std::size_t> max_word_length;  // unset when words were given explicitly
    std::optional<std::size_t> base_level;       // set for the localized check
    std::vector<Word> schreier_generators;       // localized check only
    std::vector<WordVerdict> words;
    bool overall_pass = true;
};

struct FarberLimits {
    unsigned long long max_words = 1'000'000;
    std::size_t max_schreier_generators = 4096;
    std::size_t threads = 1;
};

namespace detail {

inline void check_tolerance(const Rational& tau) {
    if (tau <= 0 || tau >= 1) throw InvalidInput("tolerance must lie strictly between 0 and 1, got " + to_string(tau));
}

inline Verdict classify(bool trivial_at_depth, const Rational& final_ratio, const Rational& tau) {
    if (trivial_at_depth) return Verdict::indistinguishable;
    return final_ratio < tau ? Verdict::pass : Verdict::fail;
}

inline void finish(FarberReport& r) {
    r.overall_pass = true;
    for (const auto& w : r.words)
        if (w.verdict == Verdict::fail) r.overall_pass = false;
}

} // namespace detail

/// Classic criterion: fix_ℓ(w)/n_ℓ for ℓ = 1..N on each non-identity word.
inline FarberReport farber_check(const ChainAction& chain, const std::vector<Word>& words, std::size_t depth,
                                 const Rational& tau, const FarberLimits& limits = {}) {
    detail::check_tolerance(tau);
    if (depth < 1) throw InvalidInput("depth must be at least 1");
    for (const auto& w : words)
        if (w.is_identity()) throw InvalidInput("candidate words must exclude the identity");
    chain.materialize(depth);
    FarberReport r;
    r.depth = depth;
    r.tolerance = tau;
    r.words = parallel_map<WordVerdict>(words.size(), limits.threads, [&](std::size_t i) {
        WordVerdict v;
        v.word = words[i];
        std::size_t last_fixed = 0;
        for (std::size_t l = 1; l <= depth; ++l) {
            last_fixed = fixed_count(chain, words[i], l);
            v.trajectory.push_back(ratio(last_fixed, chain.size(l)));
        }
        v.verdict = detail::classify(last_fixed == chain.size(depth), v.trajectory.back(), tau);
        return v;
    });
    detail::finish(r);
    return r;
}

inline FarberReport farber_check(const ChainAction& chain, std::size_t max_word_length, std::size_t depth,
                                 const Rational& tau, const FarberLimits& limits = {}) {
    auto r = farber_check(chain, enumerate_words(chain.alphabet().size(), max_word_length, limits.max_words), depth,
                          tau, limits);
    r.max_word_length = max_word_length;
    return r;
}

/// w ∈ C_{k,i}: w ∈ Γ_k and w fixes every point of the fiber over the level-k basepoint at level i.
inline bool core_membership(const ChainAction& chain, const Word& w, std::size_t k, std::size_t i) {
    if (k > i) throw InvalidInput("core membership requires k <= i");
    if (!stabilizer_contains(chain, w, k)) return false;
    const auto& level = chain.level(i);
    for (auto x : fiber(chain, k, i, 0))
        if (act(level, w, x) != x) return false;
    return true;
}

/// Elements of H_{k,0} as words of length <= L over the Schreier generators of Γ_k,
/// expanded to reduced words over the generators, deduplicated in order of first appearance.
inline std::vector<Word> localized_candidates(const std::vector<Word>& schreier, std::size_t max_word_length,
                                              unsigned long long max_words) {
    const auto s_words = enumerate_words(schreier.size(), max_word_length, max_words);
    std::unordered_set<Word, WordHash> seen;
    std::vector<Word> out;
    for (const auto& s : s_words) {
        Word w;
        for (const auto& l : s.letters()) w *= l.sign > 0 ? schreier[l.gen] : schreier[l.gen].inverse();
        if (w.is_identity() || !seen.insert(w).second) continue;
        out.push_back(std::move(w));
    }
    return out;
}

/// Local criterion at base level k: the action of Γ_k on the fibers
/// F_{k,i} over the basepoint, with depth-N core words set aside.
inline FarberReport local_farber_check(const ChainAction& chain, std::size_t k, std::size_t max_word_length,
                                       std::size_t depth, const Rational& tau, const FarberLimits& limits = {}) {
    detail::check_tolerance(tau);
    if (k >= depth) throw InvalidInput("base level must be below the depth");
    chain.materialize(depth);
    FarberReport r;
    r.depth = depth;
    r.tolerance = tau;
    r.max_word_length = max_word_length;
    r.base_level = k;
    r.schreier_generators = schreier_generators(chain, k);
    if (r.schreier_generators.size() > limits.max_schreier_generators)
        throw ResourceError("max_schreier_generators",
                            std::to_string(r.schreier_generators.size()) + " Schreier generators at level " +
                                std::to_string(k) + " exceed the cap of " +
                                std::to_string(limits.max_schreier_generators));
    const auto words = localized_candidates(r.schreier_generators, max_word_length, limits.max_words);
    std::vector<std::vector<std::uint32_t>> fibers;
    for (std::size_t i = k + 1; i <= depth; ++i) fibers.push_back(fiber(chain, k, i, 0));

    r.words = parallel_map<WordVerdict>(words.size(), limits.threads, [&](std::size_t idx) {
        const auto& w = words[idx];
        WordVerdict v;
        v.word = w;
        v.first_level = k + 1;
        std::size_t last_fixed = 0;
        for (std::size_t i = k + 1; i <= depth; ++i) {
            const auto& level = chain.level(i);
            const auto& f = fibers[i - k - 1];
            last_fixed = 0;
            for (auto x : f) last_fixed += act(level, w, x) == x;
            v.trajectory.push_back(ratio(last_fixed, f.size()));
        }
        v.verdict = detail::classify(last_fixed == fibers.back().size(), v.trajectory.back(), tau);
        return v;
    });
    detail::finish(r);
    return r;
}

} // namespace cantor
