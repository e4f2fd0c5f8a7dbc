#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "cantor/chain.hpp"
#include "cantor/holonomy.hpp"
#include "cantor/parallel.hpp"
#include "cantor/word.hpp"

namespace cantor {

/// A word in γ_n(Γ) by construction: class 1 is a generator word; class n+1
/// is t·[w, u]·t⁻¹ with w a generator word and u a class-n candidate.
struct LcsCandidate {
    Word word;
    std::size_t cls = 1;
    Word generator_word;                 // w (class >= 2)
    std::optional<std::size_t> parent;   // index of u in the class-n list
    Word conjugator;                     // t, identity when unconjugated
};

struct LcsLimits {
    std::size_t max_word_length = 4;       // L
    std::size_t conjugator_length = 2;     // c
    std::size_t max_candidates = 20'000;   // per class
    unsigned long long max_attempts = 2'000'000;  // per class, counting duplicates
    std::size_t threads = 1;
};

struct CandidateClass {
    std::size_t cls = 1;
    std::vector<LcsCandidate> candidates;
    bool truncated = false;
};

/// Candidate lists for classes 1..n_max, each deduplicated by reduced form and
/// sorted shortlex. Identity words are dropped.
inline std::vector<CandidateClass> gamma_n_candidates(const Alphabet& alphabet, std::size_t n_max,
                                                      const LcsLimits& limits = {}) {
    if (n_max < 1) throw InvalidInput("class must be at least 1");
    const auto total = count_reduced_words(alphabet.size(), limits.max_word_length) - 1;
    const auto generator_words =
        enumerate_words(alphabet.size(), limits.max_word_length, std::max<unsigned long long>(total, 1));
    std::vector<Word> conjugators{Word{}};
    for (auto& t : enumerate_words(alphabet.size(), limits.conjugator_length, ~0ull)) conjugators.push_back(t);

    std::vector<CandidateClass> out;
    CandidateClass first;
    for (const auto& w : generator_words) {
        if (first.candidates.size() >= limits.max_candidates) {
            first.truncated = true;
            break;
        }
        first.candidates.push_back({w, 1, {}, std::nullopt, {}});
    }
    out.push_back(std::move(first));

    for (std::size_t n = 2; n <= n_max; ++n) {
        const auto& prev = out.back().candidates;
        CandidateClass next;
        next.cls = n;
        std::unordered_set<Word, WordHash> seen;
        unsigned long long attempts = 0;
        bool stop = false;
        for (std::size_t ui = 0; ui < prev.size() && !stop; ++ui) {
            for (const auto& w : generator_words) {
                if (stop) break;
                const Word x = commutator(w, prev[ui].word);
                if (x.is_identity()) {
                    ++attempts;
                    continue;
                }
                for (const auto& t : conjugators) {
                    if (++attempts > limits.max_attempts || next.candidates.size() >= limits.max_candidates) {
                        next.truncated = true;
                        stop = true;
                        break;
                    }
                    Word y = t * x * t.inverse();
                    if (!seen.insert(y).second) continue;
                    next.candidates.push_back({std::move(y), n, w, ui, t});
                }
            }
        }
        std::stable_sort(next.candidates.begin(), next.candidates.end(),
                         [](const LcsCandidate& a, const LcsCandidate& b) { return a.word < b.word; });
        out.push_back(std::move(next));
    }
    return out;
}

struct LcsWitnessReport {
    std::size_t cls = 1;
    std::size_t depth = 0;
    std::size_t max_word_length = 0;
    std::size_t conjugator_length = 0;
    std::size_t candidates_examined = 0;
    bool truncated = false;
    std::optional<FixedSetReport> best;

    /// Some candidate has a positive holonomy estimate at this depth.
    bool nonvanishing() const { return best && best->hol_estimate > 0; }
};

/// Per class, the candidate with the largest depth-N holonomy estimate
/// (ties: shortlex-first).
inline std::vector<LcsWitnessReport> witness_search(const ChainAction& chain, std::size_t n_max, std::size_t depth,
                                                    const LcsLimits& limits = {}) {
    const auto classes = gamma_n_candidates(chain.alphabet(), n_max, limits);
    chain.materialize(depth);
    std::vector<LcsWitnessReport> out;
    for (const auto& c : classes) {
        LcsWitnessReport r;
        r.cls = c.cls;
        r.depth = depth;
        r.max_word_length = limits.max_word_length;
        r.conjugator_length = limits.conjugator_length;
        r.candidates_examined = c.candidates.size();
        r.truncated = c.truncated;
        auto reports = parallel_map<FixedSetReport>(c.candidates.size(), limits.threads, [&](std::size_t i) {
            return fixed_set_report(chain, c.candidates[i].word, depth);
        });
        for (auto& rep : reports)
            if (!r.best || rep.hol_estimate > r.best->hol_estimate) r.best = std::move(rep);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace cantor
