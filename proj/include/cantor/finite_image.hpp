#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cantor/chain.hpp"
#include "cantor/chain_ops.hpp"
#include "cantor/errors.hpp"
#include "cantor/rational.hpp"

namespace cantor {

using Permutation = std::vector<std::uint32_t>;

struct PermutationHash {
    std::size_t operator()(const Permutation& p) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto x : p) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

inline Permutation compose(const Permutation& a, const Permutation& b) {
    Permutation out(b.size());
    for (std::size_t x = 0; x < b.size(); ++x) out[x] = a[b[x]];
    return out;
}

inline Permutation invert(const Permutation& a) {
    Permutation out(a.size());
    for (std::uint32_t x = 0; x < a.size(); ++x) out[a[x]] = x;
    return out;
}

/// The finite permutation group generated by the generator permutations of one level.
class FiniteImage {
public:
    static FiniteImage close(const Level& level, std::size_t max_order) {
        std::vector<Permutation> gens;
        for (std::size_t g = 0; g < level.generator_count(); ++g) gens.push_back(level.raw().perms[g]);
        Permutation id(level.size());
        for (std::uint32_t x = 0; x < id.size(); ++x) id[x] = x;
        return close(std::move(gens), std::move(id), max_order);
    }

    /// Subgroup generated by `gens` (permutations of id.size() points).
    static FiniteImage close(std::vector<Permutation> gens, Permutation id, std::size_t max_order) {
        FiniteImage g;
        g.add(id);
        std::deque<std::size_t> frontier{0};
        while (!frontier.empty()) {
            const auto e = frontier.front();
            frontier.pop_front();
            for (const auto& s : gens) {
                auto p = compose(s, g.elements_[e]);
                if (g.index_.count(p)) continue;
                if (g.elements_.size() >= max_order)
                    throw ResourceError("max_order", "group closure exceeds max order " + std::to_string(max_order) +
                                                         " (BFS frontier " + std::to_string(frontier.size() + 1) +
                                                         ", " + std::to_string(g.elements_.size()) + " elements found)");
                frontier.push_back(g.add(std::move(p)));
            }
        }
        return g;
    }

    std::size_t order() const noexcept { return elements_.size(); }
    const std::vector<Permutation>& elements() const noexcept { return elements_; }
    const Permutation& element(std::size_t i) const { return elements_[i]; }

    std::optional<std::size_t> find(const Permutation& p) const {
        if (auto it = index_.find(p); it != index_.end()) return it->second;
        return std::nullopt;
    }

    /// γ_1 = G, γ_{i+1} = ⟨[g, h] : g ∈ G, h ∈ γ_i⟩, for i < classes.
    std::vector<FiniteImage> lower_central_series(std::size_t classes) const {
        std::vector<FiniteImage> series{*this};
        while (series.size() < classes) {
            const auto& prev = series.back();
            std::set<Permutation> commutators;
            for (const auto& g : elements_) {
                const auto gi = invert(g);
                for (const auto& h : prev.elements_) commutators.insert(compose(compose(g, h), compose(gi, invert(h))));
            }
            series.push_back(close({commutators.begin(), commutators.end()}, elements_[0], order()));
        }
        return series;
    }

private:
    std::size_t add(Permutation p) {
        const auto i = elements_.size();
        index_.emplace(p, i);
        elements_.push_back(std::move(p));
        return i;
    }

    std::vector<Permutation> elements_;
    std::unordered_map<Permutation, std::size_t, PermutationHash> index_;
};

/// Counts, inside the finite image G_ℓ, the distinct point stabilizers (n) and
/// those containing w (n_w), next to the fixed-coset ratio of w.
struct StabilizerCount {
    std::size_t level = 0;
    std::size_t group_order = 0;
    std::size_t stabilizers = 0;          // n
    std::size_t stabilizers_with_word = 0;  // n_w
    Rational subgroup_ratio;              // n_w / n
    Rational fixed_ratio;                 // fix / |X_ℓ|
};

inline StabilizerCount stabilizer_count_oracle(const ChainAction& chain, const Word& w, std::size_t level,
                                               std::size_t max_order) {
    const auto& lvl = chain.level(level);
    const auto group = FiniteImage::close(lvl, max_order);
    const auto sigma = word_permutation(lvl, w);
    const auto w_index = group.find(sigma);
    if (!w_index) throw std::logic_error("word image is missing from the generated group");

    std::set<std::vector<char>> stabilizers;
    for (std::uint32_t x = 0; x < lvl.size(); ++x) {
        std::vector<char> members(group.order(), 0);
        for (std::size_t e = 0; e < group.order(); ++e) members[e] = group.element(e)[x] == x;
        stabilizers.insert(std::move(members));
    }
    std::size_t with_word = 0;
    for (const auto& s : stabilizers) with_word += s[*w_index];

    StabilizerCount out;
    out.level = level;
    out.group_order = group.order();
    out.stabilizers = stabilizers.size();
    out.stabilizers_with_word = with_word;
    out.subgroup_ratio = ratio(with_word, stabilizers.size());
    out.fixed_ratio = ratio(fixed_count(lvl, w), lvl.size());
    // Stabilizers of a transitive action form one conjugacy class and each is
    // hit by the same number of points, so the two ratios agree.
    if (out.subgroup_ratio != out.fixed_ratio)
        throw std::logic_error("stabilizer count ratio " + to_string(out.subgroup_ratio) +
                               " differs from fixed ratio " + to_string(out.fixed_ratio));
    return out;
}

} // namespace cantor
