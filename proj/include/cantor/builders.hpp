#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cantor/chain.hpp"
#include "cantor/chain_io.hpp"
#include "cantor/errors.hpp"
#include "cantor/mealy.hpp"
#include "cantor/rational.hpp"

namespace cantor {

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, std::size_t exp) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > (1ull << 40) / base) return 1ull << 40;
        r *= base;
    }
    return r;
}

/// Largest depth whose level size base^(dim·ℓ) stays indexable by 32 bits.
inline std::size_t max_depth(std::uint64_t base, std::size_t dim) {
    std::size_t depth = 0;
    while (checked_pow(base, dim * (depth + 1)) <= 0x7fffffffull) ++depth;
    return depth;
}

inline ChainAction make_chain(std::string name, std::vector<std::string> generators, LevelProvider provider,
                              std::uint64_t base, std::size_t dim, std::uint64_t memory_budget) {
    ChainAction chain(std::move(name), Alphabet(std::move(generators)), std::move(provider), max_depth(base, dim),
                      memory_budget);
    chain.set_size_hint([base, dim](std::size_t l) { return checked_pow(base, dim * l); });
    return chain;
}

/// Level of (Z/m)^dim with coordinates packed little-endian; each generator
/// is an affine map given as a function of the coordinate vector.
template <typename Map>
LevelAction torus_level(std::uint64_t base, std::size_t dim, std::size_t l, std::size_t generators, Map&& map) {
    const auto m = checked_pow(base, l);
    const auto m_prev = m / base;
    const auto n = checked_pow(m, dim);
    LevelAction a;
    a.size = n;
    a.parent.resize(n);
    a.perms.assign(generators, std::vector<std::uint32_t>(n));
    std::vector<std::uint64_t> coords(dim), image(dim);
    for (std::uint64_t x = 0; x < n; ++x) {
        auto rest = x;
        for (auto& c : coords) {
            c = rest % m;
            rest /= m;
        }
        std::uint64_t parent = 0;
        for (std::size_t i = dim; i-- > 0;) parent = parent * m_prev + coords[i] % m_prev;
        a.parent[x] = static_cast<std::uint32_t>(parent);
        for (std::size_t g = 0; g < generators; ++g) {
            map(g, coords, image, m);
            std::uint64_t y = 0;
            for (std::size_t i = dim; i-- > 0;) y = y * m + image[i];
            a.perms[g][x] = static_cast<std::uint32_t>(y);
        }
    }
    return a;
}

inline std::uint64_t mod_add(std::uint64_t a, std::int64_t delta, std::uint64_t m) {
    const auto d = static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(((static_cast<std::int64_t>(a) + delta) % d + d) % d);
}

} // namespace detail

/// p-adic odometer: X_ℓ = Z/p^ℓ, generator a: x ↦ x+1.
inline ChainAction build_odometer(std::uint64_t p, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    if (p < 2) throw InvalidInput("odometer base must be at least 2");
    return detail::make_chain(
        "odometer(" + std::to_string(p) + ")", {"a"},
        [p](std::size_t l, const Level&) {
            return detail::torus_level(p, 1, l, 1, [](std::size_t, const auto& x, auto& y, std::uint64_t m) {
                y[0] = (x[0] + 1) % m;
            });
        },
        p, 1, memory_budget);
}

/// X_ℓ = (Z/p^ℓ)^d with one +1 generator t1..td per coordinate.
inline ChainAction build_toral(std::size_t d, std::uint64_t p, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    if (p < 2) throw InvalidInput("toral base must be at least 2");
    if (d < 1) throw InvalidInput("toral dimension must be at least 1");
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= d; ++i) names.push_back("t" + std::to_string(i));
    return detail::make_chain(
        "toral(" + std::to_string(d) + "," + std::to_string(p) + ")", std::move(names),
        [p, d](std::size_t l, const Level&) {
            return detail::torus_level(p, d, l, d, [](std::size_t g, const auto& x, auto& y, std::uint64_t m) {
                y = x;
                y[g] = (x[g] + 1) % m;
            });
        },
        p, d, memory_budget);
}

/// Infinite dihedral group on Z/2^ℓ: a: x ↦ x+1, r: x ↦ -x.
inline ChainAction build_dihedral(std::uint64_t memory_budget = kDefaultMemoryBudget) {
    return detail::make_chain(
        "dihedral", {"a", "r"},
        [](std::size_t l, const Level&) {
            return detail::torus_level(2, 1, l, 2, [](std::size_t g, const auto& x, auto& y, std::uint64_t m) {
                y[0] = g == 0 ? (x[0] + 1) % m : (m - x[0]) % m;
            });
        },
        2, 1, memory_budget);
}

/// Discrete Heisenberg group on (Z/p^ℓ)²: A: (x,y) ↦ (x+1,y), B: (x,y) ↦ (x,y+x),
/// C: (x,y) ↦ (x,y-1). With words acting right to left, [A,B] = C.
inline ChainAction build_heisenberg(std::uint64_t p, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    if (p < 2) throw InvalidInput("heisenberg base must be at least 2");
    return detail::make_chain(
        "heisenberg(" + std::to_string(p) + ")", {"A", "B", "C"},
        [p](std::size_t l, const Level&) {
            return detail::torus_level(p, 2, l, 3, [](std::size_t g, const auto& x, auto& y, std::uint64_t m) {
                y = x;
                if (g == 0) y[0] = (x[0] + 1) % m;
                if (g == 1) y[1] = (x[1] + x[0]) % m;
                if (g == 2) y[1] = detail::mod_add(x[1], -1, m);
            });
        },
        p, 2, memory_budget);
}

/// Z/2^ℓ with h: x ↦ x+1 and g fixing the even points and moving odd x to x+2.
inline ChainAction build_fragmented(std::uint64_t memory_budget = kDefaultMemoryBudget) {
    return detail::make_chain(
        "fragmented", {"h", "g"},
        [](std::size_t l, const Level&) {
            return detail::torus_level(2, 1, l, 2, [](std::size_t gen, const auto& x, auto& y, std::uint64_t m) {
                if (gen == 0)
                    y[0] = (x[0] + 1) % m;
                else
                    y[0] = x[0] % 2 == 0 ? x[0] : (x[0] + 2) % m;
            });
        },
        2, 1, memory_budget);
}

// ---------------------------------------------------------------- fat Cantor

/// Puncture levels L_j = first_level + (j-1)·step for j = 1, 2, ….
struct FatCantorSchedule {
    std::size_t first_level = 3;
    std::size_t step = 1;

    std::size_t level_of(std::size_t j) const { return first_level + (j - 1) * step; }

    /// Σ_j 2·3^-(L_j+1), the limiting punctured measure.
    Rational total_punctured() const {
        // 2·3^-(f+1) · 3^s / (3^s - 1)
        const auto f = static_cast<std::int64_t>(detail::checked_pow(3, first_level + 1));
        const auto s = static_cast<std::int64_t>(detail::checked_pow(3, step));
        return Rational(2, f) * Rational(s, s - 1);
    }
};

struct Puncture {
    std::size_t index = 0;   // j
    Cylinder enumerated;     // the j-th cylinder still meeting the fixed set
    Cylinder site;           // u, at level L_j
    Rational measure;        // 2·3^-(L_j+1)
};

/// Record of the punctures made by the fat-Cantor builder, extended on demand.
/// The generator g fixes the level-1 vertex 0 and swaps the subtrees of 1 and 2;
/// each puncture at u swaps the u1- and u2-subtrees below it.
class FatCantorLedger {
public:
    explicit FatCantorLedger(FatCantorSchedule schedule) : schedule_(schedule) {
        if (schedule_.first_level < 1 || schedule_.step < 1)
            throw InvalidInput("fat_cantor schedule needs first_level >= 1 and step >= 1");
        if (schedule_.first_level > 20 || schedule_.step > 20)
            throw InvalidInput("fat_cantor schedule levels above 20 are not supported");
        if (schedule_.total_punctured() >= initial_fixed_measure())
            throw InvalidInput("fat_cantor schedule punctures measure " + to_string(schedule_.total_punctured()) +
                               ", which is not below the fixed-set measure 1/3");
    }

    const FatCantorSchedule& schedule() const noexcept { return schedule_; }

    static Rational initial_fixed_measure() { return Rational(1, 3); }

    /// All punctures whose site lies at a level < max_level (they act on levels <= max_level).
    std::vector<Puncture> punctures_below(std::size_t max_level) {
        std::lock_guard lock(mutex_);
        while (next_site_level() < max_level) add_next();
        std::vector<Puncture> out;
        for (const auto& p : punctures_)
            if (p.site.level < max_level) out.push_back(p);
        return out;
    }

    /// Punctured measure acting by level `level`; density there is 1/3 minus this.
    Rational punctured_measure_by(std::size_t level) {
        Rational total = 0;
        for (const auto& p : punctures_below(level)) total += p.measure;
        return total;
    }

    /// g's image of a vertex given the punctures affecting its level.
    static std::uint32_t image(std::uint32_t x, std::size_t level, const std::vector<std::vector<std::uint32_t>>& sites) {
        std::uint32_t prefix = 0;
        std::uint32_t scale = 1;
        std::uint32_t rest = x;
        for (std::size_t k = 0; k < level; ++k) {
            const auto digit = rest % 3;
            rest /= 3;
            const bool mirror = (k == 0) || std::binary_search(sites[k].begin(), sites[k].end(), prefix);
            if (mirror && digit != 0) return x + (digit == 1 ? scale : -scale);
            prefix += digit * scale;
            scale *= 3;
        }
        return x;
    }

private:
    std::size_t next_site_level() const { return schedule_.level_of(punctures_.size() + 1); }

    bool is_fixed(std::size_t level, std::uint32_t v) const {
        std::vector<std::vector<std::uint32_t>> sites(level + 1);
        for (const auto& p : punctures_)
            if (p.site.level < level) sites[p.site.level].push_back(p.site.vertex);
        for (auto& s : sites) std::sort(s.begin(), s.end());
        return image(v, level, sites) == v;
    }

    void add_next() {
        const auto j = punctures_.size() + 1;
        const auto site_level = schedule_.level_of(j);
        // Advance the canonical (level, vertex) enumeration to the next cylinder meeting the fixed set.
        while (true) {
            const bool fixed = is_fixed(cursor_.level, cursor_.vertex);
            const Cylinder c = cursor_;
            const auto size = static_cast<std::uint32_t>(detail::checked_pow(3, cursor_.level));
            if (++cursor_.vertex >= size) cursor_ = {cursor_.level + 1, 0};
            if (!fixed) continue;
            if (site_level < c.level)
                throw InvalidInput("fat_cantor schedule level " + std::to_string(site_level) +
                                   " is above enumerated cylinder level " + std::to_string(c.level));
            // Smallest fixed descendant at the site level: v followed by zeros keeps the same index.
            Puncture p;
            p.index = j;
            p.enumerated = c;
            p.site = {site_level, c.vertex};
            p.measure = Rational(2, static_cast<std::int64_t>(detail::checked_pow(3, site_level + 1)));
            punctures_.push_back(p);
            return;
        }
    }

    FatCantorSchedule schedule_;
    std::vector<Puncture> punctures_;
    Cylinder cursor_{0, 0};
    std::mutex mutex_;
};

/// Ternary tree with h the 3-adic odometer and g fixing a closed set of
/// positive measure and empty interior (see FatCantorLedger).
inline ChainAction build_fat_cantor(std::shared_ptr<FatCantorLedger> ledger,
                                    std::uint64_t memory_budget = kDefaultMemoryBudget) {
    const auto s = ledger->schedule();
    return detail::make_chain(
        "fat_cantor(" + std::to_string(s.first_level) + "," + std::to_string(s.step) + ")", {"h", "g"},
        [ledger](std::size_t l, const Level&) {
            std::vector<std::vector<std::uint32_t>> sites(l + 1);
            for (const auto& p : ledger->punctures_below(l)) sites[p.site.level].push_back(p.site.vertex);
            for (auto& v : sites) std::sort(v.begin(), v.end());
            auto a = detail::torus_level(3, 1, l, 2, [](std::size_t g, const auto& x, auto& y, std::uint64_t m) {
                y[0] = g == 0 ? (x[0] + 1) % m : x[0];
            });
            for (std::uint32_t x = 0; x < a.size; ++x) a.perms[1][x] = FatCantorLedger::image(x, l, sites);
            return a;
        },
        3, 1, memory_budget);
}

inline ChainAction build_fat_cantor(FatCantorSchedule schedule = {}, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    return build_fat_cantor(std::make_shared<FatCantorLedger>(schedule), memory_budget);
}

// ---------------------------------------------------------------- Mealy

/// X_ℓ = words of length ℓ (first letter least significant); generators act by transduction.
inline ChainAction build_mealy(const MealyMachine& machine, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    const auto d = machine.alphabet_size();
    std::vector<StateWord> gens;
    for (const auto& [name, q] : machine.generators()) gens.push_back(StateWord::generator(q));
    auto chain = detail::make_chain(
        "mealy", machine.generator_alphabet().names(),
        [machine, gens, d](std::size_t l, const Level&) {
            const auto n = detail::checked_pow(d, l);
            LevelAction a;
            a.size = n;
            a.parent.resize(n);
            a.perms.assign(gens.size(), std::vector<std::uint32_t>(n));
            const auto prev = n / d;
            for (std::uint32_t x = 0; x < n; ++x) {
                a.parent[x] = static_cast<std::uint32_t>(x % prev);
                const auto letters = vertex_letters(x, l, d);
                for (std::size_t g = 0; g < gens.size(); ++g)
                    a.perms[g][x] = vertex_index(machine.apply(gens[g], letters), d);
            }
            return a;
        },
        d, 1, memory_budget);
    chain.set_oracle(std::make_shared<MealyOracle>(machine));
    return chain;
}

// ---------------------------------------------------------------- family specs

enum class Family { odometer, toral, dihedral, heisenberg, fragmented, fat_cantor, mealy, file };

struct FamilySpec {
    Family family = Family::odometer;
    std::uint64_t base = 2;
    std::size_t dimension = 2;
    FatCantorSchedule schedule;
    std::string path;  // Mealy machine file or chain file
};

inline const char* to_string(Family f) {
    switch (f) {
        case Family::odometer: return "odometer";
        case Family::toral: return "toral";
        case Family::dihedral: return "dihedral";
        case Family::heisenberg: return "heisenberg";
        case Family::fragmented: return "fragmented";
        case Family::fat_cantor: return "fat_cantor";
        case Family::mealy: return "mealy";
        case Family::file: return "file";
    }
    return "unknown";
}

inline Family parse_family(const std::string& name) {
    for (auto f : {Family::odometer, Family::toral, Family::dihedral, Family::heisenberg, Family::fragmented,
                   Family::fat_cantor, Family::mealy, Family::file})
        if (name == to_string(f)) return f;
    throw InvalidInput("unknown family '" + name + "'");
}

/// Parses "family[:param,param]", e.g. "odometer:3", "toral:2,3", "fat_cantor:3,1", "mealy:machine.json".
inline FamilySpec parse_family_spec(const std::string& text) {
    const auto colon = text.find(':');
    FamilySpec spec;
    spec.family = parse_family(text.substr(0, colon));
    std::vector<std::string> params;
    if (colon != std::string::npos) {
        std::string rest = text.substr(colon + 1);
        if (spec.family == Family::mealy || spec.family == Family::file) {
            spec.path = rest;
            return spec;
        }
        std::size_t start = 0;
        while (true) {
            const auto comma = rest.find(',', start);
            params.push_back(rest.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    auto number = [&](std::size_t i) -> std::uint64_t {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(params.at(i), &used);
            if (used != params[i].size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw InvalidInput("bad parameter in family spec '" + text + "'");
        }
    };
    auto expect = [&](std::size_t max) {
        if (params.size() > max) throw InvalidInput("too many parameters in family spec '" + text + "'");
    };
    switch (spec.family) {
        case Family::odometer:
        case Family::heisenberg:
            expect(1);
            if (!params.empty()) spec.base = number(0);
            break;
        case Family::toral:
            expect(2);
            if (params.size() > 0) spec.dimension = number(0);
            if (params.size() > 1) spec.base = number(1);
            break;
        case Family::fat_cantor:
            expect(2);
            if (params.size() > 0) spec.schedule.first_level = number(0);
            if (params.size() > 1) spec.schedule.step = number(1);
            break;
        case Family::dihedral:
        case Family::fragmented:
            expect(0);
            break;
        case Family::mealy:
        case Family::file:
            throw InvalidInput("family '" + std::string(to_string(spec.family)) + "' needs a path");
    }
    return spec;
}

inline ChainAction build(const FamilySpec& spec, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    switch (spec.family) {
        case Family::odometer: return build_odometer(spec.base, memory_budget);
        case Family::toral: return build_toral(spec.dimension, spec.base, memory_budget);
        case Family::dihedral: return build_dihedral(memory_budget);
        case Family::heisenberg: return build_heisenberg(spec.base, memory_budget);
        case Family::fragmented: return build_fragmented(memory_budget);
        case Family::fat_cantor: return build_fat_cantor(spec.schedule, memory_budget);
        case Family::mealy: return build_mealy(mealy_from_json(read_json_file(spec.path)), memory_budget);
        case Family::file: return load_chain(spec.path, memory_budget);
    }
    throw InvalidInput("unknown family");
}

} // namespace cantor
