#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "cantor/chain.hpp"
#include "cantor/errors.hpp"
#include "cantor/rational.hpp"
#include "cantor/word.hpp"

namespace cantor {

/// Truncation of a boundary point: the level-`depth` vertex it lies over.
struct PointApprox {
    std::size_t depth = 0;
    std::uint32_t index = 0;

    friend bool operator==(const PointApprox&, const PointApprox&) = default;
};

/// The clopen set of boundary points over a level-ℓ vertex.
struct Cylinder {
    std::size_t level = 0;
    std::uint32_t vertex = 0;

    friend bool operator==(const Cylinder&, const Cylinder&) = default;
    friend auto operator<=>(const Cylinder&, const Cylinder&) = default;
};

// ---------------------------------------------------------------- validation

enum class ViolationKind { shape, size_growth, basepoint, bijectivity, equivariance, fiber_size, transitivity };

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::shape: return "shape";
        case ViolationKind::size_growth: return "size_growth";
        case ViolationKind::basepoint: return "basepoint";
        case ViolationKind::bijectivity: return "bijectivity";
        case ViolationKind::equivariance: return "equivariance";
        case ViolationKind::fiber_size: return "fiber_size";
        case ViolationKind::transitivity: return "transitivity";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::size_t level = 0;
    std::optional<std::size_t> generator;
    std::uint32_t point = 0;
    std::string message;
};

struct ValidationReport {
    std::size_t depth = 0;
    std::vector<Violation> violations;

    bool valid() const noexcept { return violations.empty(); }
};

namespace detail {

inline void validate_level(const Alphabet& alphabet, const Level& level, const Level& previous,
                           std::vector<Violation>& out) {
    const auto l = level.level();
    const auto& raw = level.raw();
    const auto n = raw.size;
    const auto prev_n = previous.size();
    auto add = [&](ViolationKind kind, std::optional<std::size_t> gen, std::uint32_t point, std::string msg) {
        std::string where = "level " + std::to_string(l);
        if (gen) where += ", generator '" + alphabet.name(*gen) + "'";
        where += ", point " + std::to_string(point);
        out.push_back({kind, l, gen, point, where + ": " + msg});
    };

    bool shape_ok = true;
    if (raw.parent.size() != n) {
        add(ViolationKind::shape, std::nullopt, 0,
            "parent array has length " + std::to_string(raw.parent.size()) + ", expected " + std::to_string(n));
        shape_ok = false;
    }
    if (raw.perms.size() != alphabet.size()) {
        add(ViolationKind::shape, std::nullopt, 0,
            std::to_string(raw.perms.size()) + " permutations for " + std::to_string(alphabet.size()) + " generators");
        return;
    }
    for (std::size_t g = 0; g < raw.perms.size(); ++g) {
        if (raw.perms[g].size() != n) {
            add(ViolationKind::shape, g, 0,
                "permutation has length " + std::to_string(raw.perms[g].size()) + ", expected " + std::to_string(n));
            shape_ok = false;
        }
    }
    if (n == 0) {
        add(ViolationKind::shape, std::nullopt, 0, "level is empty");
        return;
    }
    if (n <= prev_n)
        add(ViolationKind::size_growth, std::nullopt, 0,
            "size " + std::to_string(n) + " does not exceed previous size " + std::to_string(prev_n));
    if (!shape_ok) return;

    for (std::uint32_t x = 0; x < n; ++x) {
        if (raw.parent[x] >= prev_n) {
            add(ViolationKind::shape, std::nullopt, x, "parent " + std::to_string(raw.parent[x]) + " out of range");
            return;
        }
    }
    if (raw.parent[0] != 0) add(ViolationKind::basepoint, std::nullopt, 0, "parent of the basepoint is not 0");

    for (std::size_t g = 0; g < raw.perms.size(); ++g) {
        if (level.is_bijective(g)) continue;
        std::vector<char> hit(n, 0);
        for (std::uint32_t x = 0; x < n; ++x) {
            const auto y = raw.perms[g][x];
            if (y >= n) {
                add(ViolationKind::bijectivity, g, x, "image " + std::to_string(y) + " out of range");
                break;
            }
            if (hit[y]) {
                add(ViolationKind::bijectivity, g, x, "image " + std::to_string(y) + " is hit twice");
                break;
            }
            hit[y] = 1;
        }
    }

    for (std::size_t g = 0; g < raw.perms.size(); ++g) {
        const auto& perm = raw.perms[g];
        const auto& prev_perm = previous.raw().perms[g];
        if (prev_perm.size() != prev_n) continue;
        for (std::uint32_t x = 0; x < n; ++x) {
            if (perm[x] >= n) continue;
            if (raw.parent[perm[x]] != prev_perm[raw.parent[x]]) {
                add(ViolationKind::equivariance, g, x,
                    "parent(g·x) = " + std::to_string(raw.parent[perm[x]]) + " but g·parent(x) = " +
                        std::to_string(prev_perm[raw.parent[x]]));
                break;
            }
        }
    }

    if (n % prev_n != 0) {
        add(ViolationKind::fiber_size, std::nullopt, 0,
            "size " + std::to_string(n) + " is not a multiple of " + std::to_string(prev_n));
    } else {
        const auto expected = n / prev_n;
        for (std::uint32_t v = 0; v < prev_n; ++v) {
            const auto count = level.children(v).size();
            if (count != expected) {
                add(ViolationKind::fiber_size, std::nullopt, v,
                    "vertex " + std::to_string(v) + " of level " + std::to_string(l - 1) + " has " +
                        std::to_string(count) + " preimages, expected " + std::to_string(expected));
                break;
            }
        }
    }

    // Forward orbit of 0 equals the group orbit for permutations of a finite set.
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        for (const auto& perm : raw.perms) {
            const auto y = perm[x];
            if (y < n && !seen[y]) {
                seen[y] = 1;
                ++reached;
                stack.push_back(y);
            }
        }
    }
    if (reached != n) {
        std::uint32_t first = 0;
        while (seen[first]) ++first;
        add(ViolationKind::transitivity, std::nullopt, first,
            "orbit of the basepoint has " + std::to_string(reached) + " of " + std::to_string(n) + " points");
    }
}

} // namespace detail

/// Checks the tower invariants on levels 1..depth.
inline ValidationReport validate_chain(const ChainAction& chain, std::size_t depth) {
    ValidationReport report;
    report.depth = depth;
    chain.materialize(depth);
    for (std::size_t l = 1; l <= depth; ++l)
        detail::validate_level(chain.alphabet(), chain.level(l), chain.level(l - 1), report.violations);
    return report;
}

// ---------------------------------------------------------------- action

inline void check_point(const ChainAction& chain, std::size_t l, std::uint32_t x) {
    if (x >= chain.size(l))
        throw InvalidInput("point " + std::to_string(x) + " is out of range at level " + std::to_string(l) +
                           " (size " + std::to_string(chain.size(l)) + ")");
}

/// Image of x under w; letters act right to left.
inline std::uint32_t act(const Level& level, const Word& w, std::uint32_t x) {
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) x = level.image(*it, x);
    return x;
}

inline std::uint32_t act(const ChainAction& chain, const Word& w, std::size_t l, std::uint32_t x) {
    const auto& level = chain.level(l);
    check_point(chain, l, x);
    return act(level, w, x);
}

/// The full permutation induced by w on a level, as an image table.
inline std::vector<std::uint32_t> word_permutation(const Level& level, const Word& w) {
    std::vector<std::uint32_t> img(level.size());
    for (std::uint32_t x = 0; x < img.size(); ++x) img[x] = x;
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it)
        for (auto& y : img) y = level.image(*it, y);
    return img;
}

inline bool stabilizer_contains(const ChainAction& chain, const Word& w, std::size_t l) {
    return act(chain.level(l), w, 0) == 0;
}

/// |Γ : Γ_ℓ|, the number of level-ℓ points.
inline std::size_t index(const ChainAction& chain, std::size_t l) { return chain.size(l); }

/// The level-`to` ancestor of level-`from` point x.
inline std::uint32_t ancestor(const ChainAction& chain, std::size_t from, std::uint32_t x, std::size_t to) {
    for (std::size_t l = from; l > to; --l) x = chain.level(l).parent(x);
    return x;
}

/// Level-i points over level-k vertex v, ascending.
inline std::vector<std::uint32_t> fiber(const ChainAction& chain, std::size_t k, std::size_t i, std::uint32_t v) {
    if (k > i) throw InvalidInput("fiber requires k <= i");
    check_point(chain, k, v);
    std::vector<std::uint32_t> current{v};
    for (std::size_t l = k + 1; l <= i; ++l) {
        const auto& level = chain.level(l);
        std::vector<std::uint32_t> next;
        next.reserve(current.size() * (level.size() / chain.size(l - 1)));
        for (auto u : current) {
            const auto kids = level.children(u);
            next.insert(next.end(), kids.begin(), kids.end());
        }
        current = std::move(next);
    }
    std::sort(current.begin(), current.end());
    return current;
}

inline std::size_t fixed_count(const Level& level, const Word& w) {
    std::size_t count = 0;
    for (std::uint32_t x = 0; x < level.size(); ++x)
        if (act(level, w, x) == x) ++count;
    return count;
}

inline std::size_t fixed_count(const ChainAction& chain, const Word& w, std::size_t l) {
    return fixed_count(chain.level(l), w);
}

// ---------------------------------------------------------------- transversals

/// Breadth-first coset representatives: t[x] is a shortest word with t[x]·0 = x.
/// Ties go to the earlier generator, then to +1 before -1.
inline std::vector<Word> transversal(const ChainAction& chain, std::size_t l) {
    const auto& level = chain.level(l);
    const auto n = level.size();
    std::vector<std::optional<Word>> reps(n);
    reps[0] = Word{};
    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
        const auto x = queue.front();
        queue.pop_front();
        for (std::uint32_t g = 0; g < chain.alphabet().size(); ++g) {
            for (int sign : {1, -1}) {
                const Letter l{g, static_cast<std::int8_t>(sign)};
                const auto y = level.image(l, x);
                if (reps[y]) continue;
                reps[y] = Word({l}) * *reps[x];
                queue.push_back(y);
            }
        }
    }
    std::vector<Word> out;
    out.reserve(n);
    for (std::uint32_t x = 0; x < n; ++x) {
        if (!reps[x])
            throw InvalidInput("chain '" + chain.name() + "' is not transitive at level " + std::to_string(l) +
                               ": point " + std::to_string(x) + " is unreachable");
        out.push_back(std::move(*reps[x]));
    }
    return out;
}

/// Schreier generators t_{g·x}⁻¹ · g · t_x of Γ_ℓ, reduced, deduplicated and
/// sorted shortlex; the identity is dropped.
inline std::vector<Word> schreier_generators(const ChainAction& chain, std::size_t l) {
    const auto& level = chain.level(l);
    const auto reps = transversal(chain, l);
    std::unordered_set<Word, WordHash> seen;
    std::vector<Word> out;
    for (std::uint32_t x = 0; x < level.size(); ++x) {
        for (std::uint32_t g = 0; g < chain.alphabet().size(); ++g) {
            const auto y = level.image(Letter{g, 1}, x);
            Word s = reps[y].inverse() * Word::generator(g) * reps[x];
            if (s.is_identity() || !seen.insert(s).second) continue;
            out.push_back(std::move(s));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- metric and measure

/// d(x, y) = 2^-m where m is the last level at which x and y agree. When they
/// agree at their full depth N the value is 2^-N and `indistinguishable` is set.
struct Distance {
    Rational value;
    bool indistinguishable = false;
};

inline Distance distance(const ChainAction& chain, const PointApprox& x, const PointApprox& y) {
    if (x.depth != y.depth)
        throw InvalidInput("distance requires equal depths, got " + std::to_string(x.depth) + " and " +
                           std::to_string(y.depth));
    const auto depth = x.depth;
    if (depth > 62) throw InvalidInput("distance depth above 62 is not representable");
    check_point(chain, depth, x.index);
    check_point(chain, depth, y.index);
    std::uint32_t a = x.index;
    std::uint32_t b = y.index;
    std::size_t m = depth;
    while (a != b) {
        a = chain.level(m).parent(a);
        b = chain.level(m).parent(b);
        --m;
    }
    return {Rational(1, std::int64_t{1} << m), m == depth};
}

inline Rational cylinder_measure(const ChainAction& chain, const Cylinder& c) {
    check_point(chain, c.level, c.vertex);
    return unit_fraction(chain.size(c.level));
}

/// Identifier of the pseudorandom algorithm recorded in reports.
inline constexpr const char* kRngAlgorithm = "mt19937_64+rejection";

/// Seeded uniform sampler of depth-N points. Uses rejection on raw 64-bit
/// output, so results do not depend on the standard library's distributions.
class PointSampler {
public:
    explicit PointSampler(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do r = engine_();
        while (r >= limit);
        return r % bound;
    }

    PointApprox sample(const ChainAction& chain, std::size_t depth) {
        return {depth, static_cast<std::uint32_t>(below(chain.size(depth)))};
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline PointApprox sample_uniform(const ChainAction& chain, std::size_t depth, std::uint64_t seed) {
    PointSampler sampler(seed);
    return sampler.sample(chain, depth);
}

} // namespace cantor
