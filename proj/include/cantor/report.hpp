#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cantor/chain_io.hpp"
#include "cantor/chain_ops.hpp"
#include "cantor/farber.hpp"
#include "cantor/finite_image.hpp"
#include "cantor/holonomy.hpp"
#include "cantor/lcs.hpp"
#include "cantor/rational.hpp"
#include "cantor/word.hpp"

namespace cantor {

inline constexpr const char* kToolName = "cantor";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kCsvSchemaVersion = 1;

inline OrderedJson to_json(const Rational& r) {
    OrderedJson j;
    j["num"] = r.numerator();
    j["den"] = r.denominator();
    return j;
}

inline OrderedJson to_json(const std::vector<Rational>& rs) {
    auto j = OrderedJson::array();
    for (const auto& r : rs) j.push_back(to_json(r));
    return j;
}

inline OrderedJson to_json(const ValidationReport& r, const Alphabet& alphabet) {
    OrderedJson j;
    j["depth"] = r.depth;
    j["valid"] = r.valid();
    auto vs = OrderedJson::array();
    for (const auto& v : r.violations) {
        OrderedJson e;
        e["kind"] = to_string(v.kind);
        e["level"] = v.level;
        e["generator"] = v.generator ? OrderedJson(alphabet.name(*v.generator)) : OrderedJson(nullptr);
        e["point"] = v.point;
        e["message"] = v.message;
        vs.push_back(std::move(e));
    }
    j["violations"] = std::move(vs);
    return j;
}

inline OrderedJson to_json(const FixedSetReport& r, const Alphabet& alphabet) {
    OrderedJson j;
    j["word"] = render(r.word, alphabet);
    j["depth"] = r.depth;
    j["fixed_counts"] = r.fixed_counts;
    j["level_sizes"] = r.level_sizes;
    j["fixed_ratios"] = to_json(r.fixed_ratios);
    j["fixed_ratio"] = to_json(r.fixed_ratio());
    j["interior_bound"] = to_json(r.interior_bound);
    j["hol_estimate"] = to_json(r.hol_estimate);
    auto cyl = OrderedJson::array();
    for (const auto& c : r.maximal_fixed_cylinders) cyl.push_back({{"level", c.level}, {"vertex", c.vertex}});
    j["maximal_fixed_cylinders"] = std::move(cyl);
    return j;
}

inline OrderedJson to_json(const DensityProfile& p, const Alphabet& alphabet) {
    OrderedJson j;
    j["word"] = render(p.word, alphabet);
    j["point"] = {{"depth", p.center.depth}, {"index", p.center.index}};
    j["densities"] = to_json(p.entries);
    return j;
}

inline OrderedJson to_json(const FarberReport& r, const Alphabet& alphabet) {
    OrderedJson j;
    j["criterion"] = r.base_level ? "local" : "classic";
    j["depth"] = r.depth;
    j["tolerance"] = to_json(r.tolerance);
    j["max_word_length"] = r.max_word_length ? OrderedJson(*r.max_word_length) : OrderedJson(nullptr);
    if (r.base_level) {
        j["base_level"] = *r.base_level;
        auto s = OrderedJson::array();
        for (const auto& w : r.schreier_generators) s.push_back(render(w, alphabet));
        j["schreier_generators"] = std::move(s);
    }
    j["overall"] = r.overall_pass ? "pass-at-depth" : "fail-at-depth";
    j["note"] = "a pass is evidence at the stated depth, tolerance and word cap, not a proof of the limit";
    auto ws = OrderedJson::array();
    for (const auto& v : r.words) {
        OrderedJson e;
        e["word"] = render(v.word, alphabet);
        e["verdict"] = to_string(v.verdict);
        e["first_level"] = v.first_level;
        e["trajectory"] = to_json(v.trajectory);
        ws.push_back(std::move(e));
    }
    j["words"] = std::move(ws);
    return j;
}

inline OrderedJson to_json(const std::vector<PartialTrivialityWitness>& ws, const Alphabet& alphabet) {
    auto j = OrderedJson::array();
    for (const auto& w : ws) {
        OrderedJson e;
        e["word"] = render(w.word, alphabet);
        e["cylinder"] = {{"level", w.cylinder.level}, {"vertex", w.cylinder.vertex}};
        e["exact"] = w.exact_checked ? OrderedJson(w.exact) : OrderedJson(nullptr);
        j.push_back(std::move(e));
    }
    return j;
}

inline OrderedJson to_json(const LqaEstimate& e, const Alphabet& alphabet) {
    OrderedJson j;
    j["level"] = e.level ? OrderedJson(*e.level) : OrderedJson("none");
    j["scale"] = e.scale() ? to_json(*e.scale()) : OrderedJson(nullptr);
    j["depth"] = e.depth;
    j["max_word_length"] = e.max_word_length;
    j["words_examined"] = e.words_examined;
    j["blocking_word"] = e.last_blocking_word ? OrderedJson(render(*e.last_blocking_word, alphabet)) : OrderedJson(nullptr);
    return j;
}

inline OrderedJson to_json(const std::vector<LcsWitnessReport>& rs, const Alphabet& alphabet) {
    auto j = OrderedJson::array();
    for (const auto& r : rs) {
        OrderedJson e;
        e["class"] = r.cls;
        e["depth"] = r.depth;
        e["max_word_length"] = r.max_word_length;
        e["conjugator_length"] = r.conjugator_length;
        e["candidates_examined"] = r.candidates_examined;
        e["truncated"] = r.truncated;
        e["nonvanishing"] = r.nonvanishing();
        if (!r.nonvanishing()) e["note"] = "no nonvanishing candidate";
        e["best"] = r.best ? to_json(*r.best, alphabet) : OrderedJson(nullptr);
        j.push_back(std::move(e));
    }
    return j;
}

inline OrderedJson to_json(const StabilizerCount& s) {
    OrderedJson j;
    j["level"] = s.level;
    j["group_order"] = s.group_order;
    j["stabilizers"] = s.stabilizers;
    j["stabilizers_with_word"] = s.stabilizers_with_word;
    j["subgroup_ratio"] = to_json(s.subgroup_ratio);
    j["fixed_ratio"] = to_json(s.fixed_ratio);
    j["identity_holds"] = s.subgroup_ratio == s.fixed_ratio;
    return j;
}

/// Report envelope: tool, config echo, seed and RNG id, then the result.
inline OrderedJson make_report(const std::string& command, const OrderedJson& config, std::uint64_t seed,
                               OrderedJson result) {
    OrderedJson j;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["rng"] = kRngAlgorithm;
    j["result"] = std::move(result);
    return j;
}

/// A CSV table with a versioned preamble of `# key=value` lines.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void meta(std::string key, std::string value) { meta_.emplace_back(std::move(key), std::move(value)); }
    /// Preamble lines written ahead of meta(), for the tool and config echo.
    void header(std::string key, std::string value) { header_.emplace_back(std::move(key), std::move(value)); }

    /// Cells are appended left to right; a Rational fills a decimal and an exact column.
    class Row {
    public:
        Row& operator<<(const std::string& s) { cells_.push_back(s); return *this; }
        Row& operator<<(const char* s) { cells_.emplace_back(s); return *this; }
        Row& operator<<(std::uint64_t v) { cells_.push_back(std::to_string(v)); return *this; }
        Row& operator<<(bool b) { cells_.emplace_back(b ? "true" : "false"); return *this; }
        Row& operator<<(const Rational& r) {
            cells_.push_back(to_decimal(r));
            cells_.push_back(to_string(r));
            return *this;
        }

    private:
        friend class CsvTable;
        std::vector<std::string> cells_;
    };

    Row& row() { return rows_.emplace_back(); }

    std::string str() const {
        std::ostringstream out;
        out << "# " << kToolName << " csv v" << kCsvSchemaVersion << "\n";
        for (const auto& [k, v] : header_) out << "# " << k << "=" << v << "\n";
        for (const auto& [k, v] : meta_) out << "# " << k << "=" << v << "\n";
        write_line(out, columns_);
        for (const auto& r : rows_) {
            if (r.cells_.size() != columns_.size()) throw std::logic_error("CSV row width mismatch");
            write_line(out, r.cells_);
        }
        return out.str();
    }

private:
    static std::string escape(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }

    static void write_line(std::ostringstream& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << escape(cells[i]);
        out << "\n";
    }

    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> header_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<Row> rows_;
};

} // namespace cantor
