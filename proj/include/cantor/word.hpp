#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cantor/errors.hpp"

namespace cantor {

/// Symbol reserved for the identity word in parsing and rendering.
inline constexpr std::string_view kIdentitySymbol = "e";

/// Names of the formal generators of the acting group.
class Alphabet {
public:
    Alphabet() = default;

    explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            const auto& name = names_[i];
            if (name.empty()) throw InvalidInput("generator names must be non-empty");
            if (name == kIdentitySymbol)
                throw InvalidInput("generator name '" + name + "' is reserved for the identity");
            for (char c : name) {
                const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                                (c >= '0' && c <= '9') || c == '_';
                if (!ok) throw InvalidInput("generator name '" + name + "' has characters outside [A-Za-z0-9_]");
            }
            if (!index_.emplace(name, i).second)
                throw InvalidInput("duplicate generator name '" + name + "'");
        }
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::optional<std::size_t> find(std::string_view name) const {
        if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
        return std::nullopt;
    }

    bool operator==(const Alphabet& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Letter {
    std::uint32_t gen = 0;
    std::int8_t sign = 1;  // +1 or -1

    Letter inverse() const { return {gen, static_cast<std::int8_t>(-sign)}; }

    // Canonical letter order: generator index, then +1 before -1.
    std::uint32_t key() const { return 2 * gen + (sign < 0 ? 1u : 0u); }

    friend bool operator==(const Letter&, const Letter&) = default;
    friend std::strong_ordering operator<=>(const Letter& a, const Letter& b) {
        return a.key() <=> b.key();
    }
};

/// A freely reduced word in the generators and their formal inverses.
class Word {
public:
    Word() = default;

    explicit Word(std::span<const Letter> letters) {
        for (const auto& l : letters) push(l);
    }
    Word(std::initializer_list<Letter> letters) : Word(std::span<const Letter>(letters.begin(), letters.size())) {}

    static Word generator(std::uint32_t gen, int sign = 1) {
        return Word({Letter{gen, static_cast<std::int8_t>(sign < 0 ? -1 : 1)}});
    }

    const std::vector<Letter>& letters() const noexcept { return letters_; }
    std::size_t length() const noexcept { return letters_.size(); }
    bool is_identity() const noexcept { return letters_.empty(); }

    Word inverse() const {
        Word out;
        out.letters_.reserve(letters_.size());
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.letters_.push_back(it->inverse());
        return out;
    }

    Word pow(long long exponent) const {
        const Word base = exponent < 0 ? inverse() : *this;
        Word out;
        for (long long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) out *= base;
        return out;
    }

    Word& operator*=(const Word& rhs) {
        for (const auto& l : rhs.letters_) push(l);
        return *this;
    }
    friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }

    friend bool operator==(const Word&, const Word&) = default;

    // Shortlex: length first, then lexicographic in the letter order.
    friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
        if (auto c = a.length() <=> b.length(); c != 0) return c;
        for (std::size_t i = 0; i < a.length(); ++i)
            if (auto c = a.letters_[i] <=> b.letters_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

private:
    void push(const Letter& l) {
        if (!letters_.empty() && letters_.back() == l.inverse())
            letters_.pop_back();
        else
            letters_.push_back(l);
    }

    std::vector<Letter> letters_;
};

/// Reduced u·v·u⁻¹·v⁻¹.
inline Word commutator(const Word& u, const Word& v) {
    return u * v * u.inverse() * v.inverse();
}

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (const auto& l : w.letters()) {
            h ^= l.key() + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

/// Renders runs of equal letters as powers: "a^4*b^-1*a".
inline std::string render(const Word& w, const Alphabet& alphabet) {
    if (w.is_identity()) return std::string(kIdentitySymbol);
    std::string out;
    const auto& ls = w.letters();
    for (std::size_t i = 0; i < ls.size();) {
        std::size_t j = i;
        while (j < ls.size() && ls[j] == ls[i]) ++j;
        const long long exponent = static_cast<long long>(j - i) * ls[i].sign;
        if (!out.empty()) out += '*';
        out += alphabet.name(ls[i].gen);
        if (exponent != 1) out += "^" + std::to_string(exponent);
        i = j;
    }
    return out;
}

namespace detail {

class WordParser {
public:
    WordParser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

    Word parse() {
        Word w = expr();
        skip_space();
        if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
        return w;
    }

private:
    Word expr() {
        Word w = term();
        while (peek() == '*') {
            ++pos_;
            w *= term();
        }
        return w;
    }

    Word term() {
        Word w = atom();
        if (peek() == '^') {
            ++pos_;
            w = w.pow(integer());
        }
        return w;
    }

    Word atom() {
        const char c = peek();
        if (c == '[') {
            ++pos_;
            Word u = expr();
            expect(',');
            Word v = expr();
            expect(']');
            return commutator(u, v);
        }
        if (c == '(') {
            ++pos_;
            Word w = expr();
            expect(')');
            return w;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        if (start == pos_) error(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'"
                                                     : "unexpected end of word");
        const auto name = text_.substr(start, pos_ - start);
        if (name == kIdentitySymbol) return {};
        auto gen = alphabet_.find(name);
        if (!gen) error("unknown generator '" + std::string(name) + "'");
        return Word::generator(static_cast<std::uint32_t>(*gen));
    }

    long long integer() {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        const std::size_t digits = pos_;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
        if (digits == pos_) error("expected an integer exponent");
        if (pos_ - digits > 9) error("exponent too large");
        return std::stoll(std::string(text_.substr(start, pos_ - start)));
    }

    static bool is_name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) error(std::string("expected '") + c + "'");
        ++pos_;
    }

    [[noreturn]] void error(const std::string& what) const {
        throw InvalidInput("word '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    const Alphabet& alphabet_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Grammar: generator names, `e`, `x^n` powers, `u*v` products, `[u,v]` commutators, parentheses.
inline Word parse_word(std::string_view text, const Alphabet& alphabet) {
    return detail::WordParser(text, alphabet).parse();
}

/// Number of reduced words of length <= max_length over `generators` generators.
inline unsigned long long count_reduced_words(std::size_t generators, std::size_t max_length) {
    unsigned long long total = 1;
    unsigned long long at_length = 1;
    for (std::size_t k = 1; k <= max_length; ++k) {
        at_length = (k == 1) ? 2 * generators : at_length * (2 * generators - 1);
        total += at_length;
        if (total > (1ull << 62)) return total;
    }
    return total;
}

/// All reduced non-identity words of length <= max_length, in shortlex order.
inline std::vector<Word> enumerate_words(std::size_t generators, std::size_t max_length,
                                         unsigned long long max_count) {
    const auto total = count_reduced_words(generators, max_length) - 1;
    if (total > max_count)
        throw ResourceError("max_words", std::to_string(total) + " candidate words of length <= " +
                                             std::to_string(max_length) + " exceed the word budget of " +
                                             std::to_string(max_count));
    std::vector<Word> out;
    out.reserve(total);
    std::vector<Word> frontier{Word{}};
    for (std::size_t k = 1; k <= max_length; ++k) {
        std::vector<Word> next;
        for (const auto& w : frontier) {
            for (std::uint32_t g = 0; g < generators; ++g) {
                for (int sign : {1, -1}) {
                    const Letter l{g, static_cast<std::int8_t>(sign)};
                    if (!w.is_identity() && w.letters().back() == l.inverse()) continue;
                    next.push_back(w * Word({l}));
                }
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

} // namespace cantor
