#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/word.hpp"

namespace cantor {

/// Raw description of one finite quotient X_ℓ = Γ/Γ_ℓ.
///
/// `parent[x]` is the image of x in X_{ℓ-1}; `perms[g][x]` is the image of x
/// under generator g. Point 0 is the basepoint coset.
struct LevelAction {
    std::size_t level = 0;
    std::size_t size = 0;
    std::vector<std::uint32_t> parent;
    std::vector<std::vector<std::uint32_t>> perms;
};

/// A materialized level: the raw action plus inverse permutations and a
/// children index. Immutable once built.
class Level {
public:
    explicit Level(LevelAction action, std::size_t parent_size) : action_(std::move(action)) {
        const auto n = action_.size;
        inverse_.resize(action_.perms.size());
        for (std::size_t g = 0; g < action_.perms.size(); ++g) {
            const auto& p = action_.perms[g];
            if (p.size() != n) continue;
            std::vector<std::uint32_t> inv(n, kUnset);
            bool bijective = true;
            for (std::uint32_t x = 0; x < n && bijective; ++x) {
                if (p[x] >= n || inv[p[x]] != kUnset) bijective = false;
                else inv[p[x]] = x;
            }
            if (bijective) inverse_[g] = std::move(inv);
        }
        if (action_.level == 0) return;
        child_offsets_.assign(parent_size + 1, 0);
        if (action_.parent.size() != n) return;
        for (auto p : action_.parent)
            if (p < parent_size) ++child_offsets_[p + 1];
        for (std::size_t v = 0; v < parent_size; ++v) child_offsets_[v + 1] += child_offsets_[v];
        children_.resize(child_offsets_.back());
        auto cursor = child_offsets_;
        for (std::uint32_t x = 0; x < n; ++x)
            if (action_.parent[x] < parent_size) children_[cursor[action_.parent[x]]++] = x;
    }

    std::size_t level() const noexcept { return action_.level; }
    std::size_t size() const noexcept { return action_.size; }
    std::size_t generator_count() const noexcept { return action_.perms.size(); }
    const LevelAction& raw() const noexcept { return action_; }

    std::uint32_t parent(std::uint32_t x) const { return action_.level == 0 ? 0 : action_.parent[x]; }

    bool is_bijective(std::size_t gen) const { return !inverse_[gen].empty(); }

    std::uint32_t image(const Letter& l, std::uint32_t x) const {
        if (l.sign > 0) return action_.perms[l.gen][x];
        const auto& inv = inverse_[l.gen];
        if (inv.empty())
            throw InvalidInput("generator " + std::to_string(l.gen) + " is not a permutation at level " +
                               std::to_string(action_.level));
        return inv[x];
    }

    /// Points of this level lying over vertex v of the previous level, ascending.
    std::span<const std::uint32_t> children(std::uint32_t v) const {
        if (action_.level == 0) return {};
        return {children_.data() + child_offsets_[v], children_.data() + child_offsets_[v + 1]};
    }

    static Level point_level(std::size_t generators) {
        LevelAction a;
        a.level = 0;
        a.size = 1;
        a.perms.assign(generators, std::vector<std::uint32_t>{0});
        return Level(std::move(a), 0);
    }

private:
    static constexpr std::uint32_t kUnset = 0xffffffffu;

    LevelAction action_;
    std::vector<std::vector<std::uint32_t>> inverse_;
    std::vector<std::uint32_t> child_offsets_;
    std::vector<std::uint32_t> children_;
};

/// Exact subtree-triviality queries for chains backed by a self-similar model.
class SubtreeOracle {
public:
    virtual ~SubtreeOracle() = default;

    /// True iff w acts as the identity on the entire subtree below `vertex`
    /// (a vertex of the given level, assumed fixed by w).
    virtual bool acts_trivially_below(const Word& w, std::size_t level, std::uint32_t vertex) const = 0;
};

/// Produces level ℓ ≥ 1 from the already materialized level ℓ-1.
using LevelProvider = std::function<LevelAction(std::size_t level, const Level& previous)>;

inline constexpr std::uint64_t kDefaultMemoryBudget = 1ull << 25;

/// A tower of finite permutation actions X_1 ← X_2 ← … with memoized,
/// on-demand materialization. Copies share the same materialized levels.
class ChainAction {
public:
    ChainAction(std::string name, Alphabet alphabet, LevelProvider provider, std::size_t depth_limit,
                std::uint64_t memory_budget = kDefaultMemoryBudget)
        : state_(std::make_shared<State>()) {
        state_->name = std::move(name);
        state_->alphabet = std::move(alphabet);
        state_->provider = std::move(provider);
        state_->depth_limit = depth_limit;
        state_->memory_budget = memory_budget;
        state_->levels.resize(depth_limit + 1);
        state_->levels[0] = std::make_unique<const Level>(Level::point_level(state_->alphabet.size()));
        state_->stored_points = 1;
    }

    /// A chain over explicitly given levels (levels[i] describes X_{i+1}); not validated.
    static ChainAction from_levels(std::string name, Alphabet alphabet, std::vector<LevelAction> levels,
                                   std::uint64_t memory_budget = kDefaultMemoryBudget) {
        auto shared = std::make_shared<std::vector<LevelAction>>(std::move(levels));
        for (std::size_t i = 0; i < shared->size(); ++i) (*shared)[i].level = i + 1;
        const auto depth = shared->size();
        return ChainAction(
            std::move(name), std::move(alphabet),
            [shared](std::size_t level, const Level&) { return (*shared)[level - 1]; }, depth, memory_budget);
    }

    const std::string& name() const noexcept { return state_->name; }
    const Alphabet& alphabet() const noexcept { return state_->alphabet; }
    std::size_t depth_limit() const noexcept { return state_->depth_limit; }
    std::uint64_t memory_budget() const noexcept { return state_->memory_budget; }
    std::size_t materialized_depth() const noexcept { return state_->count.load(std::memory_order_acquire) - 1; }

    /// Optional closed-form level sizes, consulted before a level is built.
    void set_size_hint(std::function<std::uint64_t(std::size_t)> hint) { state_->size_hint = std::move(hint); }

    const SubtreeOracle* oracle() const noexcept { return state_->oracle.get(); }
    void set_oracle(std::shared_ptr<const SubtreeOracle> oracle) { state_->oracle = std::move(oracle); }

    /// Level ℓ, materializing levels up to ℓ if needed. Thread-safe.
    const Level& level(std::size_t l) const {
        if (l < state_->count.load(std::memory_order_acquire)) return *state_->levels[l];
        materialize(l);
        return *state_->levels[l];
    }

    std::size_t size(std::size_t l) const { return level(l).size(); }

    void materialize(std::size_t depth) const {
        auto& s = *state_;
        if (depth > s.depth_limit)
            throw ResourceError("depth_limit", "depth " + std::to_string(depth) + " exceeds the depth limit " +
                                                   std::to_string(s.depth_limit) + " of chain '" + s.name + "'");
        std::lock_guard lock(s.mutex);
        for (std::size_t l = s.count.load(std::memory_order_relaxed); l <= depth; ++l) {
            const Level& previous = *s.levels[l - 1];
            if (s.size_hint) check_budget(s, l, s.size_hint(l));
            LevelAction action = s.provider(l, previous);
            action.level = l;
            const auto cost = static_cast<std::uint64_t>(action.size);
            check_budget(s, l, cost);
            s.levels[l] = std::make_unique<const Level>(std::move(action), previous.size());
            s.stored_points += cost;
            s.count.store(l + 1, std::memory_order_release);
        }
    }

private:
    struct State;

    static void check_budget(const State& s, std::size_t l, std::uint64_t cost) {
        if (cost > 0xfffffff0ull || s.stored_points + cost > s.memory_budget)
            throw ResourceError("memory_budget", "materializing level " + std::to_string(l) + " (" +
                                                     std::to_string(cost) + " points) exceeds the memory budget of " +
                                                     std::to_string(s.memory_budget) + " stored points");
    }

    struct State {
        std::string name;
        Alphabet alphabet;
        LevelProvider provider;
        std::size_t depth_limit = 0;
        std::uint64_t memory_budget = 0;
        std::vector<std::unique_ptr<const Level>> levels;
        std::atomic<std::size_t> count{1};
        std::uint64_t stored_points = 0;
        std::mutex mutex;
        std::shared_ptr<const SubtreeOracle> oracle;
        std::function<std::uint64_t(std::size_t)> size_hint;
    };

    std::shared_ptr<State> state_;
};

} // namespace cantor
