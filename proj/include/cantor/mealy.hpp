#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cantor/chain.hpp"
#include "cantor/chain_io.hpp"
#include "cantor/errors.hpp"
#include "cantor/word.hpp"

namespace cantor {

/// Words over the states of a Mealy machine (and their inverses).
using StateWord = Word;

/// An invertible letter-to-letter transducer over the alphabet {0, …, d-1}.
/// Each state acts on finite words by reading the first letter, writing
/// outputs(q, x) and continuing from transitions(q, x).
class MealyMachine {
public:
    MealyMachine(std::size_t alphabet_size, std::vector<std::string> states,
                 std::vector<std::vector<std::uint32_t>> transitions, std::vector<std::vector<std::uint32_t>> outputs,
                 std::vector<std::pair<std::string, std::uint32_t>> generators)
        : alphabet_size_(alphabet_size),
          states_(std::move(states)),
          transitions_(std::move(transitions)),
          outputs_(std::move(outputs)),
          generators_(std::move(generators)) {
        if (alphabet_size_ < 2) throw InvalidInput("Mealy machine: alphabet size must be at least 2");
        if (states_.empty()) throw InvalidInput("Mealy machine: no states");
        for (std::size_t s = 0; s < states_.size(); ++s) {
            if (states_[s].empty()) throw InvalidInput("Mealy machine: state names must be non-empty");
            if (!state_index_.emplace(states_[s], static_cast<std::uint32_t>(s)).second)
                throw InvalidInput("Mealy machine: duplicate state '" + states_[s] + "'");
        }
        const auto q = states_.size();
        if (transitions_.size() != q || outputs_.size() != q)
            throw InvalidInput("Mealy machine: transition/output tables do not cover every state");
        inverse_outputs_.assign(q, std::vector<std::uint32_t>(alphabet_size_, kUnset));
        for (std::size_t s = 0; s < q; ++s) {
            if (transitions_[s].size() != alphabet_size_ || outputs_[s].size() != alphabet_size_)
                throw InvalidInput("Mealy machine: state '" + states_[s] + "' does not cover every letter");
            for (std::uint32_t x = 0; x < alphabet_size_; ++x) {
                if (transitions_[s][x] >= q)
                    throw InvalidInput("Mealy machine: state '" + states_[s] + "' has a transition to an unknown state");
                const auto y = outputs_[s][x];
                if (y >= alphabet_size_ || inverse_outputs_[s][y] != kUnset)
                    throw InvalidInput("Mealy machine: outputs of state '" + states_[s] +
                                       "' are not a permutation of the alphabet");
                inverse_outputs_[s][y] = x;
            }
        }
        std::vector<std::string> gen_names;
        for (const auto& [name, state] : generators_) {
            if (state >= q) throw InvalidInput("Mealy machine: generator '" + name + "' maps to an unknown state");
            gen_names.push_back(name);
        }
        generator_alphabet_ = Alphabet(gen_names);
        compute_identity_states();
    }

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t state_count() const noexcept { return states_.size(); }
    const std::vector<std::string>& states() const noexcept { return states_; }
    std::optional<std::uint32_t> find_state(const std::string& name) const {
        if (auto it = state_index_.find(name); it != state_index_.end()) return it->second;
        return std::nullopt;
    }

    std::string render_state_word(const StateWord& w) const {
        if (w.is_identity()) return std::string(kIdentitySymbol);
        std::string out;
        for (const auto& l : w.letters()) {
            if (!out.empty()) out += '*';
            out += states_[l.gen];
            if (l.sign < 0) out += "^-1";
        }
        return out;
    }
    const Alphabet& generator_alphabet() const noexcept { return generator_alphabet_; }
    const std::vector<std::pair<std::string, std::uint32_t>>& generators() const noexcept { return generators_; }
    std::uint32_t transition(std::uint32_t q, std::uint32_t x) const { return transitions_[q][x]; }
    std::uint32_t output(std::uint32_t q, std::uint32_t x) const { return outputs_[q][x]; }

    /// True for states acting as the identity on the whole tree.
    bool is_identity_state(std::uint32_t q) const { return identity_[q]; }

    std::optional<std::uint32_t> identity_state() const {
        for (std::uint32_t q = 0; q < identity_.size(); ++q)
            if (identity_[q]) return q;
        return std::nullopt;
    }

    /// Translates a word over generators into a word over states.
    StateWord to_state_word(const Word& w) const {
        std::vector<Letter> letters;
        for (const auto& l : w.letters()) letters.push_back({generators_.at(l.gen).second, l.sign});
        return drop_identity(StateWord(letters));
    }

    /// Image of one letter under a state word (letters act right to left).
    std::uint32_t apply_letter(const StateWord& w, std::uint32_t x) const {
        const auto& ls = w.letters();
        for (auto it = ls.rbegin(); it != ls.rend(); ++it)
            x = it->sign > 0 ? outputs_[it->gen][x] : inverse_outputs_[it->gen][x];
        return x;
    }

    /// Transduces a whole finite word.
    std::vector<std::uint32_t> apply(const StateWord& w, std::vector<std::uint32_t> letters) const {
        StateWord current = w;
        for (auto& x : letters) {
            const auto y = apply_letter(current, x);
            current = section_at_letter(current, x);
            x = y;
        }
        return letters;
    }

    /// The state word governing the action below the one-letter vertex x.
    StateWord section_at_letter(const StateWord& w, std::uint32_t x) const {
        const auto& ls = w.letters();
        std::vector<Letter> rev;
        rev.reserve(ls.size());
        for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
            if (it->sign > 0) {
                rev.push_back({transitions_[it->gen][x], 1});
                x = outputs_[it->gen][x];
            } else {
                const auto pre = inverse_outputs_[it->gen][x];
                rev.push_back({transitions_[it->gen][pre], -1});
                x = pre;
            }
        }
        std::vector<Letter> fwd(rev.rbegin(), rev.rend());
        return drop_identity(StateWord(fwd));
    }

    /// The state word governing the action below `vertex`.
    StateWord section(const StateWord& w, const std::vector<std::uint32_t>& vertex) const {
        StateWord current = w;
        for (auto x : vertex) {
            if (x >= alphabet_size_) throw InvalidInput("vertex letter out of range");
            current = section_at_letter(current, x);
        }
        return current;
    }

    /// Exact: does w act as the identity on the whole tree? Explores the
    /// finite set of sections of w (each has length <= |w|).
    bool is_trivial(const StateWord& w, std::size_t max_sections = 1u << 22) const {
        std::unordered_set<StateWord, WordHash> seen;
        std::vector<StateWord> stack{drop_identity(w)};
        seen.insert(stack.back());
        while (!stack.empty()) {
            const StateWord u = std::move(stack.back());
            stack.pop_back();
            if (u.is_identity()) continue;
            for (std::uint32_t x = 0; x < alphabet_size_; ++x)
                if (apply_letter(u, x) != x) return false;
            for (std::uint32_t x = 0; x < alphabet_size_; ++x) {
                auto s = section_at_letter(u, x);
                if (seen.insert(s).second) {
                    if (seen.size() > max_sections)
                        throw ResourceError("max_sections", "triviality check explored more than " +
                                                                std::to_string(max_sections) + " sections");
                    stack.push_back(std::move(s));
                }
            }
        }
        return true;
    }

    /// Merges behaviourally equivalent states by partition refinement. State
    /// names are taken from the first member of each class.
    MealyMachine minimize() const {
        const auto q = states_.size();
        std::vector<std::uint32_t> cls(q);
        {
            std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
            for (std::uint32_t s = 0; s < q; ++s)
                cls[s] = ids.emplace(outputs_[s], static_cast<std::uint32_t>(ids.size())).first->second;
        }
        while (true) {
            std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
            std::vector<std::uint32_t> next(q);
            for (std::uint32_t s = 0; s < q; ++s) {
                std::vector<std::uint32_t> signature{cls[s]};
                for (std::uint32_t x = 0; x < alphabet_size_; ++x) signature.push_back(cls[transitions_[s][x]]);
                next[s] = ids.emplace(std::move(signature), static_cast<std::uint32_t>(ids.size())).first->second;
            }
            const bool stable = std::set<std::uint32_t>(next.begin(), next.end()).size() ==
                                std::set<std::uint32_t>(cls.begin(), cls.end()).size();
            cls = std::move(next);
            if (stable) break;
        }
        // Renumber classes in order of first appearance.
        std::vector<std::int64_t> order(q, -1);
        std::vector<std::uint32_t> representative;
        for (std::uint32_t s = 0; s < q; ++s) {
            if (order[cls[s]] < 0) {
                order[cls[s]] = static_cast<std::int64_t>(representative.size());
                representative.push_back(s);
            }
        }
        std::vector<std::string> names;
        std::vector<std::vector<std::uint32_t>> transitions, outputs;
        for (auto s : representative) {
            names.push_back(states_[s]);
            std::vector<std::uint32_t> t(alphabet_size_);
            for (std::uint32_t x = 0; x < alphabet_size_; ++x)
                t[x] = static_cast<std::uint32_t>(order[cls[transitions_[s][x]]]);
            transitions.push_back(std::move(t));
            outputs.push_back(outputs_[s]);
        }
        std::vector<std::pair<std::string, std::uint32_t>> gens;
        for (const auto& [name, s] : generators_)
            gens.emplace_back(name, static_cast<std::uint32_t>(order[cls[s]]));
        return MealyMachine(alphabet_size_, std::move(names), std::move(transitions), std::move(outputs),
                            std::move(gens));
    }

private:
    static constexpr std::uint32_t kUnset = 0xffffffffu;

    // Greatest set of states with identity output whose transitions stay inside the set.
    void compute_identity_states() {
        const auto q = states_.size();
        identity_.assign(q, true);
        for (std::uint32_t s = 0; s < q; ++s)
            for (std::uint32_t x = 0; x < alphabet_size_; ++x)
                if (outputs_[s][x] != x) identity_[s] = false;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::uint32_t s = 0; s < q; ++s) {
                if (!identity_[s]) continue;
                for (std::uint32_t x = 0; x < alphabet_size_; ++x) {
                    if (!identity_[transitions_[s][x]]) {
                        identity_[s] = false;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    StateWord drop_identity(const StateWord& w) const {
        std::vector<Letter> kept;
        for (const auto& l : w.letters())
            if (!identity_[l.gen]) kept.push_back(l);
        return StateWord(kept);
    }

    std::size_t alphabet_size_;
    std::vector<std::string> states_;
    std::vector<std::vector<std::uint32_t>> transitions_;
    std::vector<std::vector<std::uint32_t>> outputs_;
    std::vector<std::vector<std::uint32_t>> inverse_outputs_;
    std::vector<std::pair<std::string, std::uint32_t>> generators_;
    std::unordered_map<std::string, std::uint32_t> state_index_;
    Alphabet generator_alphabet_;
    std::vector<bool> identity_;
};

/// Mealy file: { "alphabet": d, "states": [...], "transitions": {state: {letter: state}},
/// "outputs": {state: {letter: letter}}, "generators": {gen: state} }.
inline MealyMachine mealy_from_json(const OrderedJson& doc) {
    auto fail = [](const std::string& what) { throw InvalidInput("Mealy file: " + what); };
    if (!doc.is_object()) fail("expected an object");
    for (const char* key : {"alphabet", "states", "transitions", "outputs", "generators"})
        if (!doc.contains(key)) fail(std::string("missing key '") + key + "'");
    if (!doc["alphabet"].is_number_integer() || doc["alphabet"].get<long long>() < 2) fail("'alphabet' must be >= 2");
    const auto d = doc["alphabet"].get<std::size_t>();
    std::vector<std::string> states;
    if (!doc["states"].is_array()) fail("'states' must be an array");
    for (const auto& s : doc["states"]) {
        if (!s.is_string()) fail("state names must be strings");
        states.push_back(s.get<std::string>());
    }
    auto state_index = [&](const OrderedJson& v, const std::string& where) {
        if (!v.is_string()) fail(where + ": expected a state name");
        const auto it = std::find(states.begin(), states.end(), v.get<std::string>());
        if (it == states.end()) fail(where + ": unknown state '" + v.get<std::string>() + "'");
        return static_cast<std::uint32_t>(it - states.begin());
    };
    auto letter_index = [&](const std::string& key, const std::string& where) {
        std::size_t used = 0;
        long long x = -1;
        try {
            x = std::stoll(key, &used);
        } catch (const std::logic_error&) {
        }
        if (used != key.size() || x < 0 || static_cast<std::size_t>(x) >= d)
            fail(where + ": letter '" + key + "' out of range");
        return static_cast<std::uint32_t>(x);
    };
    auto table = [&](const char* key, bool letters_out) {
        std::vector<std::vector<std::uint32_t>> out(states.size(), std::vector<std::uint32_t>(d, 0xffffffffu));
        if (!doc[key].is_object()) fail(std::string("'") + key + "' must be an object");
        for (const auto& [state, row] : doc[key].items()) {
            const auto s = state_index(OrderedJson(state), key);
            if (!row.is_object()) fail(std::string(key) + "." + state + ": expected an object");
            for (const auto& [letter, value] : row.items()) {
                const auto x = letter_index(letter, std::string(key) + "." + state);
                if (letters_out) {
                    // output letters may be written as integers or as letter keys
                    const auto where = std::string(key) + "." + state + "." + letter;
                    if (value.is_string()) {
                        out[s][x] = letter_index(value.get<std::string>(), where);
                    } else {
                        if (!value.is_number_integer() || value.get<long long>() < 0 || value.get<std::size_t>() >= d)
                            fail(where + ": output letter out of range");
                        out[s][x] = value.get<std::uint32_t>();
                    }
                } else {
                    out[s][x] = state_index(value, std::string(key) + "." + state + "." + letter);
                }
            }
        }
        for (std::size_t s = 0; s < states.size(); ++s)
            for (std::size_t x = 0; x < d; ++x)
                if (out[s][x] == 0xffffffffu)
                    fail(std::string(key) + ": state '" + states[s] + "' has no entry for letter " + std::to_string(x));
        return out;
    };
    auto transitions = table("transitions", false);
    auto outputs = table("outputs", true);
    if (!doc["generators"].is_object()) fail("'generators' must be an object");
    std::vector<std::pair<std::string, std::uint32_t>> gens;
    for (const auto& [gen, state] : doc["generators"].items())
        gens.emplace_back(gen, state_index(state, "generators." + gen));
    return MealyMachine(d, std::move(states), std::move(transitions), std::move(outputs), std::move(gens));
}

inline OrderedJson mealy_to_json(const MealyMachine& m) {
    OrderedJson doc;
    doc["alphabet"] = m.alphabet_size();
    doc["states"] = m.states();
    OrderedJson transitions = OrderedJson::object(), outputs = OrderedJson::object();
    for (std::uint32_t q = 0; q < m.state_count(); ++q) {
        OrderedJson t = OrderedJson::object(), o = OrderedJson::object();
        for (std::uint32_t x = 0; x < m.alphabet_size(); ++x) {
            t[std::to_string(x)] = m.states()[m.transition(q, x)];
            o[std::to_string(x)] = m.output(q, x);
        }
        transitions[m.states()[q]] = std::move(t);
        outputs[m.states()[q]] = std::move(o);
    }
    doc["transitions"] = std::move(transitions);
    doc["outputs"] = std::move(outputs);
    OrderedJson gens = OrderedJson::object();
    for (const auto& [name, q] : m.generators()) gens[name] = m.states()[q];
    doc["generators"] = std::move(gens);
    return doc;
}

/// The binary adding machine: a reads 0 → writes 1, becomes e; reads 1 → writes 0, stays a.
inline MealyMachine adding_machine() {
    return MealyMachine(2, {"a", "e"}, {{1, 0}, {1, 1}}, {{1, 0}, {0, 1}}, {{"a", 0}});
}

/// Letters of a level-ℓ vertex; the first letter is the least significant digit.
inline std::vector<std::uint32_t> vertex_letters(std::uint32_t index, std::size_t level, std::size_t d) {
    std::vector<std::uint32_t> letters(level);
    for (auto& x : letters) {
        x = index % d;
        index /= static_cast<std::uint32_t>(d);
    }
    return letters;
}

inline std::uint32_t vertex_index(const std::vector<std::uint32_t>& letters, std::size_t d) {
    std::uint64_t index = 0;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) index = index * d + *it;
    return static_cast<std::uint32_t>(index);
}

/// Exact subtree oracle for chains built from a Mealy machine.
class MealyOracle final : public SubtreeOracle {
public:
    explicit MealyOracle(MealyMachine machine) : machine_(std::move(machine)) {}

    bool acts_trivially_below(const Word& w, std::size_t level, std::uint32_t vertex) const override {
        const auto section = machine_.section(machine_.to_state_word(w),
                                              vertex_letters(vertex, level, machine_.alphabet_size()));
        return machine_.is_trivial(section);
    }

    const MealyMachine& machine() const noexcept { return machine_; }

private:
    MealyMachine machine_;
};

} // namespace cantor
