#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cantor/chain.hpp"
#include "cantor/chain_ops.hpp"
#include "cantor/errors.hpp"
#include "cantor/parallel.hpp"
#include "cantor/rational.hpp"
#include "cantor/word.hpp"

namespace cantor {

/// Depth-stamped fixed-set statistics of one word.
///
/// A cylinder (ℓ, v) with ℓ < N is fixed at depth N when every level-N point
/// over v is fixed. The interior bound is the measure of the maximal such
/// cylinders; the holonomy estimate is what remains of the fixed ratio.
struct FixedSetReport {
    Word word;
    std::size_t depth = 0;
    std::vector<std::size_t> fixed_counts;  // ℓ = 1..N
    std::vector<std::size_t> level_sizes;   // ℓ = 1..N
    std::vector<Rational> fixed_ratios;     // ℓ = 1..N
    Rational interior_bound;
    Rational hol_estimate;
    std::vector<Cylinder> maximal_fixed_cylinders;

    const Rational& fixed_ratio() const { return fixed_ratios.back(); }
    /// w fixes every depth-N point.
    bool acts_trivially() const { return fixed_counts.back() == level_sizes.back(); }
};

namespace detail {

/// Per-level "every depth-N point below is fixed" flags, ℓ = 0..N.
inline std::vector<std::vector<char>> fully_fixed_flags(const ChainAction& chain, std::size_t depth,
                                                        const std::vector<std::uint32_t>& image) {
    std::vector<std::vector<char>> flags(depth + 1);
    flags[depth].resize(image.size());
    for (std::uint32_t x = 0; x < image.size(); ++x) flags[depth][x] = image[x] == x;
    for (std::size_t l = depth; l-- > 0;) {
        const auto& below = chain.level(l + 1);
        flags[l].assign(chain.size(l), 1);
        for (std::uint32_t x = 0; x < below.size(); ++x)
            if (!flags[l + 1][x]) flags[l][below.parent(x)] = 0;
    }
    return flags;
}

inline void require_nonidentity(const Word& w) {
    if (w.is_identity()) throw InvalidInput("the identity word is not a valid request here");
}

} // namespace detail

inline FixedSetReport fixed_set_report(const ChainAction& chain, const Word& w, std::size_t depth) {
    detail::require_nonidentity(w);
    if (depth < 1) throw InvalidInput("depth must be at least 1");
    chain.materialize(depth);
    FixedSetReport r;
    r.word = w;
    r.depth = depth;
    for (std::size_t l = 1; l <= depth; ++l) {
        const auto count = fixed_count(chain, w, l);
        r.fixed_counts.push_back(count);
        r.level_sizes.push_back(chain.size(l));
        r.fixed_ratios.push_back(ratio(count, chain.size(l)));
    }
    const auto image = word_permutation(chain.level(depth), w);
    const auto flags = detail::fully_fixed_flags(chain, depth, image);
    r.interior_bound = 0;
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& level = chain.level(l);
        for (std::uint32_t v = 0; v < level.size(); ++v) {
            if (!flags[l][v]) continue;
            if (l > 0 && flags[l - 1][level.parent(v)]) continue;
            r.maximal_fixed_cylinders.push_back({l, v});
            r.interior_bound += unit_fraction(level.size());
        }
    }
    r.hol_estimate = r.fixed_ratio() - r.interior_bound;
    return r;
}

/// Relative density of the depth-N fixed set of w in the shrinking cylinders around x.
struct DensityProfile {
    Word word;
    PointApprox center;
    std::vector<Rational> entries;  // ℓ = 0..N
};

inline DensityProfile density_profile(const ChainAction& chain, const Word& w, const PointApprox& x) {
    const auto depth = x.depth;
    check_point(chain, depth, x.index);
    const auto image = word_permutation(chain.level(depth), w);
    // counts[ℓ][v] = number of fixed level-N points over v
    std::vector<std::vector<std::uint64_t>> counts(depth + 1);
    counts[depth].resize(image.size());
    for (std::uint32_t y = 0; y < image.size(); ++y) counts[depth][y] = image[y] == y;
    for (std::size_t l = depth; l-- > 0;) {
        counts[l].assign(chain.size(l), 0);
        const auto& below = chain.level(l + 1);
        for (std::uint32_t y = 0; y < below.size(); ++y) counts[l][below.parent(y)] += counts[l + 1][y];
    }
    DensityProfile p;
    p.word = w;
    p.center = x;
    p.entries.resize(depth + 1);
    std::uint32_t v = x.index;
    for (std::size_t l = depth + 1; l-- > 0;) {
        const auto fiber_size = chain.size(depth) / chain.size(l);
        p.entries[l] = ratio(counts[l][v], fiber_size);
        if (l > 0) v = chain.level(l).parent(v);
    }
    return p;
}

/// w fixes the depth-N fiber of `cylinder` (level 1..N-1) but moves some depth-N point.
struct PartialTrivialityWitness {
    Word word;
    Cylinder cylinder;
    bool exact = false;          // confirmed on the whole subtree by an exact oracle
    bool exact_checked = false;  // an exact oracle was available
};

struct WitnessSearchLimits {
    std::size_t max_word_length = 4;
    unsigned long long max_words = 1'000'000;
    std::size_t threads = 1;
};

namespace detail {

inline std::vector<PartialTrivialityWitness> witnesses_for_word(const ChainAction& chain, const Word& w,
                                                                std::size_t depth) {
    const auto image = word_permutation(chain.level(depth), w);
    const auto flags = fully_fixed_flags(chain, depth, image);
    std::vector<PartialTrivialityWitness> out;
    if (flags[0][0]) return out;  // moves nothing at depth N
    for (std::size_t l = 1; l < depth; ++l) {
        const auto& level = chain.level(l);
        for (std::uint32_t v = 0; v < level.size(); ++v) {
            if (!flags[l][v] || flags[l - 1][level.parent(v)]) continue;
            PartialTrivialityWitness wit{w, {l, v}};
            if (const auto* oracle = chain.oracle()) {
                wit.exact_checked = true;
                wit.exact = oracle->acts_trivially_below(w, l, v);
            }
            out.push_back(std::move(wit));
        }
    }
    return out;
}

} // namespace detail

/// Depth-N witnesses of non-quasi-analyticity among reduced words of length <= L,
/// in canonical word order, one per maximal fixed cylinder of level >= 1.
inline std::vector<PartialTrivialityWitness> partial_triviality_witnesses(const ChainAction& chain, std::size_t depth,
                                                                          const WitnessSearchLimits& limits = {}) {
    if (depth < 1) throw InvalidInput("depth must be at least 1");
    const auto words = enumerate_words(chain.alphabet().size(), limits.max_word_length, limits.max_words);
    chain.materialize(depth);
    auto per_word = parallel_map<std::vector<PartialTrivialityWitness>>(
        words.size(), limits.threads, [&](std::size_t i) { return detail::witnesses_for_word(chain, words[i], depth); });
    std::vector<PartialTrivialityWitness> out;
    for (auto& ws : per_word)
        for (auto& w : ws) out.push_back(std::move(w));
    return out;
}

/// Candidate locally-quasi-analytic scale 2^-k at the stated depth and word length.
struct LqaEstimate {
    std::optional<std::size_t> level;  // none: every level up to N-2 is blocked
    std::size_t depth = 0;
    std::size_t max_word_length = 0;
    std::size_t words_examined = 0;
    std::optional<Word> last_blocking_word;  // a word realizing the deepest blocking level

    std::optional<Rational> scale() const {
        if (!level) return std::nullopt;
        return Rational(1, std::int64_t{1} << *level);
    }
};

namespace detail {

/// Deepest level k at which w, restricted to some level-k cylinder it maps to
/// itself, fixes the depth-N fiber of a strictly deeper sub-cylinder (level <= N-1)
/// while moving a depth-N point of the ambient fiber.
inline std::optional<std::size_t> deepest_local_witness(const ChainAction& chain, const Word& w, std::size_t depth) {
    const auto image = word_permutation(chain.level(depth), w);
    const auto flags = fully_fixed_flags(chain, depth, image);
    // ff_below[ℓ][v]: some cylinder of level in (ℓ, N-1] below v is fixed at depth N.
    std::vector<std::vector<char>> ff_below(depth + 1);
    ff_below[depth].assign(chain.size(depth), 0);
    for (std::size_t l = depth; l-- > 0;) {
        const auto& below = chain.level(l + 1);
        ff_below[l].assign(chain.size(l), 0);
        for (std::uint32_t x = 0; x < below.size(); ++x) {
            const bool hit = ff_below[l + 1][x] || (l + 1 <= depth - 1 && flags[l + 1][x]);
            if (hit) ff_below[l][below.parent(x)] = 1;
        }
    }
    for (std::size_t k = depth - 1; k-- > 0;) {
        const auto& level = chain.level(k);
        const auto perm = word_permutation(level, w);
        for (std::uint32_t v = 0; v < level.size(); ++v)
            if (perm[v] == v && !flags[k][v] && ff_below[k][v]) return k;
    }
    return std::nullopt;
}

} // namespace detail

inline LqaEstimate lqa_scale_estimate(const ChainAction& chain, std::size_t depth, const WitnessSearchLimits& limits = {}) {
    if (depth < 1) throw InvalidInput("depth must be at least 1");
    const auto words = enumerate_words(chain.alphabet().size(), limits.max_word_length, limits.max_words);
    chain.materialize(depth);
    const auto deepest = parallel_map<std::optional<std::size_t>>(
        words.size(), limits.threads, [&](std::size_t i) { return detail::deepest_local_witness(chain, words[i], depth); });
    LqaEstimate est;
    est.depth = depth;
    est.max_word_length = limits.max_word_length;
    est.words_examined = words.size();
    std::optional<std::size_t> blocked;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (deepest[i] && (!blocked || *deepest[i] > *blocked)) {
            blocked = deepest[i];
            est.last_blocking_word = words[i];
        }
    }
    const std::size_t k = blocked ? *blocked + 1 : 0;
    if (depth >= 2 && k <= depth - 2) est.level = k;
    if (depth < 2) est.level = std::nullopt;
    return est;
}

} // namespace cantor
