#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cantor/chain.hpp"
#include "cantor/chain_ops.hpp"
#include "cantor/errors.hpp"

namespace cantor {

using OrderedJson = nlohmann::ordered_json;

/// Chain file: { "name", "generators": [...], "levels": [ { "size", "parent", "perms": {gen: [...]} } ] }.
/// levels[i] describes X_{i+1}; only levels[0] may have "parent": null.
inline OrderedJson chain_to_json(const ChainAction& chain, std::size_t depth) {
    chain.materialize(depth);
    OrderedJson doc;
    doc["name"] = chain.name();
    doc["generators"] = chain.alphabet().names();
    auto levels = OrderedJson::array();
    for (std::size_t l = 1; l <= depth; ++l) {
        const auto& raw = chain.level(l).raw();
        OrderedJson entry;
        entry["size"] = raw.size;
        if (l == 1)
            entry["parent"] = nullptr;
        else
            entry["parent"] = raw.parent;
        OrderedJson perms = OrderedJson::object();
        for (std::size_t g = 0; g < chain.alphabet().size(); ++g) perms[chain.alphabet().name(g)] = raw.perms[g];
        entry["perms"] = std::move(perms);
        levels.push_back(std::move(entry));
    }
    doc["levels"] = std::move(levels);
    return doc;
}

/// Parses a chain document without validating the tower invariants.
inline ChainAction chain_from_json_unchecked(const OrderedJson& doc, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    auto fail = [](const std::string& where, const std::string& what) -> void {
        throw InvalidInput("chain file: " + where + ": " + what);
    };
    if (!doc.is_object()) fail("document", "expected an object");
    for (const char* key : {"name", "generators", "levels"})
        if (!doc.contains(key)) fail("document", std::string("missing key '") + key + "'");
    if (!doc["name"].is_string()) fail("name", "expected a string");
    if (!doc["generators"].is_array()) fail("generators", "expected an array");
    std::vector<std::string> names;
    for (const auto& g : doc["generators"]) {
        if (!g.is_string()) fail("generators", "expected strings");
        names.push_back(g.get<std::string>());
    }
    Alphabet alphabet(names);
    if (!doc["levels"].is_array() || doc["levels"].empty()) fail("levels", "expected a non-empty array");

    auto read_indices = [&](const OrderedJson& arr, const std::string& where) {
        if (!arr.is_array()) fail(where, "expected an array of integers");
        std::vector<std::uint32_t> out;
        out.reserve(arr.size());
        for (const auto& v : arr) {
            if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 0xfffffff0ll)
                fail(where, "expected non-negative integers");
            out.push_back(v.get<std::uint32_t>());
        }
        return out;
    };

    std::vector<LevelAction> levels;
    for (std::size_t i = 0; i < doc["levels"].size(); ++i) {
        const auto& entry = doc["levels"][i];
        const std::string where = "levels[" + std::to_string(i) + "]";
        if (!entry.is_object()) fail(where, "expected an object");
        if (!entry.contains("size") || !entry["size"].is_number_integer() || entry["size"].get<long long>() <= 0)
            fail(where, "'size' must be a positive integer");
        LevelAction level;
        level.size = entry["size"].get<std::size_t>();
        const auto& parent = entry.contains("parent") ? entry["parent"] : OrderedJson(nullptr);
        if (parent.is_null()) {
            if (i != 0) fail(where, "'parent' may be null only for the first level");
            level.parent.assign(level.size, 0);
        } else {
            level.parent = read_indices(parent, where + ".parent");
        }
        if (!entry.contains("perms") || !entry["perms"].is_object()) fail(where, "'perms' must be an object");
        level.perms.resize(alphabet.size());
        std::vector<char> present(alphabet.size(), 0);
        for (const auto& [gen, perm] : entry["perms"].items()) {
            auto g = alphabet.find(gen);
            if (!g) fail(where + ".perms", "unknown generator '" + gen + "'");
            level.perms[*g] = read_indices(perm, where + ".perms." + gen);
            present[*g] = 1;
        }
        for (std::size_t g = 0; g < alphabet.size(); ++g)
            if (!present[g]) fail(where + ".perms", "missing generator '" + alphabet.name(g) + "'");
        levels.push_back(std::move(level));
    }
    return ChainAction::from_levels(doc["name"].get<std::string>(), std::move(alphabet), std::move(levels),
                                    memory_budget);
}

inline std::string describe(const ValidationReport& report) {
    std::string out;
    for (const auto& v : report.violations) out += std::string(to_string(v.kind)) + " violation at " + v.message + "\n";
    return out;
}

/// Parses and validates; any violated invariant is an InvalidInput error.
inline ChainAction chain_from_json(const OrderedJson& doc, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    auto chain = chain_from_json_unchecked(doc, memory_budget);
    const auto report = validate_chain(chain, chain.depth_limit());
    if (!report.valid()) throw InvalidInput("chain '" + chain.name() + "' is invalid:\n" + describe(report));
    return chain;
}

inline OrderedJson read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    try {
        return OrderedJson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline ChainAction load_chain(const std::string& path, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    return chain_from_json(read_json_file(path), memory_budget);
}

inline void save_chain(const ChainAction& chain, std::size_t depth, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << chain_to_json(chain, depth).dump() << "\n";
}

} // namespace cantor
