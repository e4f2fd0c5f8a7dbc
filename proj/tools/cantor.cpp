// Command-line front end: build, validate and analyze tower models of Cantor actions.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cantor/cantor.hpp"
#include "cantor/report.hpp"

namespace {

using namespace cantor;

struct Options {
    std::string chain;
    std::size_t depth = 10;
    std::string format = "json";
    std::string output;
    std::optional<std::size_t> threads;
    bool timing = false;
    std::uint64_t seed = 0;
    std::uint64_t memory_budget = kDefaultMemoryBudget;
    unsigned long long max_words = 1'000'000;

    // analysis-specific
    std::size_t max_word_length = 4;
    std::string words_file;
    std::string tolerance = "1/64";
    std::size_t base_level = 1;
    std::size_t max_schreier = 4096;
    std::string word;
    std::optional<std::uint32_t> point;
    std::size_t lcs_class = 3;
    std::size_t conj_length = 2;
    std::size_t max_candidates = 20'000;
    std::size_t level = 1;
    std::size_t max_order = 4096;

    // build
    std::string family;
    std::uint64_t base = 2;
    std::size_t dimension = 2;
    std::size_t first_level = 3;
    std::size_t step = 1;
    std::string machine;
};

std::size_t thread_count(const Options& o) {
    if (o.threads) return std::max<std::size_t>(1, *o.threads);
    if (const char* env = std::getenv("CANTOR_THREADS")) {
        try {
            return std::max<std::size_t>(1, std::stoul(env));
        } catch (const std::exception&) {
            throw InvalidInput(std::string("CANTOR_THREADS is not a number: '") + env + "'");
        }
    }
    return 1;
}

bool is_mealy_document(const OrderedJson& doc) { return doc.is_object() && doc.contains("transitions"); }

/// A chain source is an existing file (chain or Mealy JSON) or a family spec such as "odometer:2".
ChainAction load_source(const std::string& source, std::uint64_t budget, bool validate_file = true) {
    if (std::filesystem::exists(source)) {
        const auto doc = read_json_file(source);
        if (is_mealy_document(doc)) return build_mealy(mealy_from_json(doc), budget);
        return validate_file ? chain_from_json(doc, budget) : chain_from_json_unchecked(doc, budget);
    }
    try {
        return build(parse_family_spec(source), budget);
    } catch (const InvalidInput& e) {
        throw InvalidInput("'" + source + "' is neither a readable file nor a family spec (" + e.what() + ")");
    }
}

void require_depth(const ChainAction& chain, std::size_t depth) {
    if (depth > chain.depth_limit())
        throw InvalidInput("depth " + std::to_string(depth) + " exceeds the " + std::to_string(chain.depth_limit()) +
                           " levels available in chain '" + chain.name() + "'");
}

std::vector<Word> read_words(const std::string& path, const Alphabet& alphabet) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open word file '" + path + "'");
    std::vector<Word> words;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            words.push_back(parse_word(line, alphabet));
        } catch (const InvalidInput& e) {
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return words;
}

OrderedJson base_config(const std::string& command, const Options& o) {
    OrderedJson c;
    c["command"] = command;
    c["chain"] = o.chain;
    c["depth"] = o.depth;
    c["format"] = o.format;
    c["memory_budget"] = o.memory_budget;
    return c;
}

void emit(const Options& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.output);
    if (!out) throw InvalidInput("cannot write '" + o.output + "'");
    out << text;
}

template <typename Csv>
void emit_report(const Options& o, const std::string& command, const OrderedJson& config, OrderedJson result,
                 Csv&& csv, double seconds) {
    if (o.format == "csv") {
        CsvTable table = csv();
        table.header("tool", std::string(kToolName) + " " + kToolVersion);
        table.header("command", command);
        for (const auto& [k, v] : config.items()) table.header("config." + k, v.is_string() ? v.template get<std::string>() : v.dump());
        table.header("seed", std::to_string(o.seed));
        table.header("rng", kRngAlgorithm);
        if (o.timing) table.header("wall_time_seconds", std::to_string(seconds));
        emit(o, table.str());
        return;
    }
    auto report = make_report(command, config, o.seed, std::move(result));
    if (o.timing) report["wall_time_seconds"] = seconds;
    emit(o, report.dump(2) + "\n");
}

void add_common(CLI::App* sub, Options& o, bool with_depth = true) {
    sub->add_option("chain", o.chain, "chain file, Mealy file, or family spec (e.g. odometer:2)")->required();
    if (with_depth) sub->add_option("--depth,-N", o.depth, "truncation depth N")->capture_default_str();
    sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("-o,--output", o.output, "write the report here instead of stdout");
    sub->add_option("--threads", o.threads, "worker threads (default: CANTOR_THREADS or 1)");
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sub->add_option("--memory-budget", o.memory_budget, "maximum stored points across materialized levels")
        ->capture_default_str();
    sub->add_flag("--timing", o.timing, "include wall time in the report (breaks byte-identical output)");
}

void add_word_cap(CLI::App* sub, Options& o) {
    sub->add_option("--max-word-len,-L", o.max_word_length, "word length cap L")->capture_default_str();
    sub->add_option("--max-words", o.max_words, "budget on enumerated words")->capture_default_str();
}

OrderedJson word_cap_config(OrderedJson c, const Options& o) {
    c["max_word_length"] = o.max_word_length;
    c["max_words"] = o.max_words;
    return c;
}

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

int run_build(const Options& o) {
    FamilySpec spec;
    spec.family = parse_family(o.family);
    spec.base = o.base;
    spec.dimension = o.dimension;
    spec.schedule.first_level = o.first_level;
    spec.schedule.step = o.step;
    spec.path = o.machine;
    if ((spec.family == Family::mealy || spec.family == Family::file) && spec.path.empty())
        throw InvalidInput("family '" + o.family + "' needs --machine <path>");
    auto chain = build(spec, o.memory_budget);
    const auto report = validate_chain(chain, o.depth);
    if (!report.valid()) throw InvalidInput("built chain is invalid:\n" + describe(report));
    emit(o, chain_to_json(chain, o.depth).dump() + "\n");
    return 0;
}

int run_validate(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget, false);
    // a file is checked through its last stored level when it holds fewer than N
    const auto report = validate_chain(chain, std::min(o.depth, chain.depth_limit()));
    emit_report(o, "validate", base_config("validate", o), to_json(report, chain.alphabet()), [&] {
        CsvTable t({"kind", "level", "generator", "point", "message"});
        for (const auto& v : report.violations)
            t.row() << to_string(v.kind) << std::uint64_t{v.level}
                    << (v.generator ? chain.alphabet().name(*v.generator) : std::string()) << std::uint64_t{v.point}
                    << v.message;
        return t;
    }, elapsed(start));
    if (!report.valid()) {
        std::cerr << "invalid chain '" << chain.name() << "':\n" << describe(report);
        return 1;
    }
    return 0;
}

CsvTable farber_csv(const FarberReport& r, const Alphabet& alphabet) {
    CsvTable t({"word", "verdict", "level", "ratio", "ratio_exact"});
    t.meta("overall", r.overall_pass ? "pass-at-depth" : "fail-at-depth");
    for (const auto& v : r.words)
        for (std::size_t i = 0; i < v.trajectory.size(); ++i)
            t.row() << render(v.word, alphabet) << to_string(v.verdict) << std::uint64_t{v.first_level + i}
                    << v.trajectory[i];
    return t;
}

int run_farber(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.depth);
    const auto tau = parse_rational(o.tolerance);
    FarberLimits limits{o.max_words, o.max_schreier, thread_count(o)};
    auto config = word_cap_config(base_config("farber", o), o);
    config["tolerance"] = to_json(tau);
    FarberReport r;
    if (!o.words_file.empty()) {
        config["words_file"] = o.words_file;
        config.erase("max_word_length");
        r = farber_check(chain, read_words(o.words_file, chain.alphabet()), o.depth, tau, limits);
    } else {
        r = farber_check(chain, o.max_word_length, o.depth, tau, limits);
    }
    emit_report(o, "farber", config, to_json(r, chain.alphabet()), [&] { return farber_csv(r, chain.alphabet()); },
                elapsed(start));
    return 0;
}

int run_local_farber(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.depth);
    const auto tau = parse_rational(o.tolerance);
    auto config = word_cap_config(base_config("local-farber", o), o);
    config["tolerance"] = to_json(tau);
    config["base_level"] = o.base_level;
    config["max_schreier_generators"] = o.max_schreier;
    const auto r = local_farber_check(chain, o.base_level, o.max_word_length, o.depth, tau,
                                      {o.max_words, o.max_schreier, thread_count(o)});
    emit_report(o, "local-farber", config, to_json(r, chain.alphabet()),
                [&] { return farber_csv(r, chain.alphabet()); }, elapsed(start));
    return 0;
}

int run_holonomy(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.depth);
    const auto w = parse_word(o.word, chain.alphabet());
    const auto r = fixed_set_report(chain, w, o.depth);
    auto config = base_config("holonomy", o);
    config["word"] = o.word;
    emit_report(o, "holonomy", config, to_json(r, chain.alphabet()), [&] {
        CsvTable t({"word", "level", "fixed_count", "level_size", "fixed_ratio", "fixed_ratio_exact"});
        t.meta("interior_bound", to_string(r.interior_bound));
        t.meta("hol_estimate", to_string(r.hol_estimate));
        for (std::size_t i = 0; i < r.fixed_ratios.size(); ++i)
            t.row() << render(w, chain.alphabet()) << std::uint64_t{i + 1} << std::uint64_t{r.fixed_counts[i]}
                    << std::uint64_t{r.level_sizes[i]} << r.fixed_ratios[i];
        return t;
    }, elapsed(start));
    return 0;
}

int run_density(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.depth);
    const auto w = parse_word(o.word, chain.alphabet());
    const auto x = o.point ? PointApprox{o.depth, *o.point} : sample_uniform(chain, o.depth, o.seed);
    const auto p = density_profile(chain, w, x);
    auto config = base_config("density", o);
    config["word"] = o.word;
    config["point"] = o.point ? OrderedJson(*o.point) : OrderedJson("sampled");
    emit_report(o, "density", config, to_json(p, chain.alphabet()), [&] {
        CsvTable t({"word", "point", "level", "density", "density_exact"});
        for (std::size_t l = 0; l < p.entries.size(); ++l)
            t.row() << render(w, chain.alphabet()) << std::uint64_t{x.index} << std::uint64_t{l} << p.entries[l];
        return t;
    }, elapsed(start));
    return 0;
}

int run_witnesses(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.depth);
    const auto ws = partial_triviality_witnesses(chain, o.depth, {o.max_word_length, o.max_words, thread_count(o)});
    emit_report(o, "witnesses", word_cap_config(base_config("witnesses", o), o), to_json(ws, chain.alphabet()), [&] {
        CsvTable t({"word", "cylinder_level", "cylinder_vertex", "exact"});
        for (const auto& w : ws)
            t.row() << render(w.word, chain.alphabet()) << std::uint64_t{w.cylinder.level}
                    << std::uint64_t{w.cylinder.vertex} << (w.exact_checked ? (w.exact ? "true" : "false") : "");
        return t;
    }, elapsed(start));
    return 0;
}

int run_lqa(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.depth);
    const auto e = lqa_scale_estimate(chain, o.depth, {o.max_word_length, o.max_words, thread_count(o)});
    emit_report(o, "lqa", word_cap_config(base_config("lqa", o), o), to_json(e, chain.alphabet()), [&] {
        CsvTable t({"level", "scale", "scale_exact", "depth", "max_word_length", "words_examined", "blocking_word"});
        auto& row = t.row() << (e.level ? std::to_string(*e.level) : std::string("none"));
        if (e.scale())
            row << *e.scale();
        else
            row << "" << "";
        row << std::uint64_t{e.depth} << std::uint64_t{e.max_word_length} << std::uint64_t{e.words_examined}
            << (e.last_blocking_word ? render(*e.last_blocking_word, chain.alphabet()) : std::string());
        return t;
    }, elapsed(start));
    return 0;
}

int run_lcs(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.depth);
    LcsLimits limits;
    limits.max_word_length = o.max_word_length;
    limits.conjugator_length = o.conj_length;
    limits.max_candidates = o.max_candidates;
    limits.threads = thread_count(o);
    const auto rs = witness_search(chain, o.lcs_class, o.depth, limits);
    auto config = base_config("lcs-witness", o);
    config["class"] = o.lcs_class;
    config["max_word_length"] = o.max_word_length;
    config["conjugator_length"] = o.conj_length;
    config["max_candidates"] = o.max_candidates;
    emit_report(o, "lcs-witness", config, to_json(rs, chain.alphabet()), [&] {
        CsvTable t({"class", "candidates", "truncated", "nonvanishing", "best_word", "fixed_ratio", "fixed_ratio_exact",
                    "hol_estimate", "hol_estimate_exact"});
        for (const auto& r : rs) {
            auto& row = t.row() << std::uint64_t{r.cls} << std::uint64_t{r.candidates_examined} << r.truncated
                                << r.nonvanishing();
            if (r.best)
                row << render(r.best->word, chain.alphabet()) << r.best->fixed_ratio() << r.best->hol_estimate;
            else
                row << "" << "" << "" << "" << "";
        }
        return t;
    }, elapsed(start));
    return 0;
}

int run_stab_count(const Options& o) {
    const auto start = Clock::now();
    auto chain = load_source(o.chain, o.memory_budget);
    require_depth(chain, o.level);
    const auto w = parse_word(o.word, chain.alphabet());
    const auto s = stabilizer_count_oracle(chain, w, o.level, o.max_order);
    OrderedJson config;
    config["command"] = "oracle stab-count";
    config["chain"] = o.chain;
    config["level"] = o.level;
    config["word"] = o.word;
    config["max_order"] = o.max_order;
    config["format"] = o.format;
    config["memory_budget"] = o.memory_budget;
    auto result = to_json(s);
    result["word"] = render(w, chain.alphabet());
    emit_report(o, "oracle stab-count", config, std::move(result), [&] {
        CsvTable t({"word", "level", "group_order", "stabilizers", "stabilizers_with_word", "subgroup_ratio",
                    "subgroup_ratio_exact", "fixed_ratio", "fixed_ratio_exact"});
        t.row() << render(w, chain.alphabet()) << std::uint64_t{s.level} << std::uint64_t{s.group_order}
                << std::uint64_t{s.stabilizers} << std::uint64_t{s.stabilizers_with_word} << s.subgroup_ratio
                << s.fixed_ratio;
        return t;
    }, elapsed(start));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-depth analysis of equicontinuous Cantor actions given as towers of permutation actions"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);
    Options o;
    int (*action)(const Options&) = nullptr;

    auto* build_cmd = app.add_subcommand("build", "write a bundled family as a chain file");
    build_cmd->add_option("family", o.family, "odometer | toral | dihedral | heisenberg | fragmented | fat_cantor | mealy")
        ->required();
    build_cmd->add_option("--base,-p", o.base, "prime base")->capture_default_str();
    build_cmd->add_option("--dim,-d", o.dimension, "torus dimension")->capture_default_str();
    build_cmd->add_option("--first-level", o.first_level, "fat_cantor: level of the first puncture")->capture_default_str();
    build_cmd->add_option("--step", o.step, "fat_cantor: levels between punctures")->capture_default_str();
    build_cmd->add_option("--machine", o.machine, "mealy: machine file");
    build_cmd->add_option("--depth,-N", o.depth, "levels to write")->capture_default_str();
    build_cmd->add_option("-o,--output", o.output, "chain file (default stdout)");
    build_cmd->add_option("--memory-budget", o.memory_budget, "maximum stored points")->capture_default_str();
    build_cmd->callback([&] { action = run_build; });

    auto* validate_cmd = app.add_subcommand("validate", "check the tower invariants up to a depth");
    add_common(validate_cmd, o);
    validate_cmd->callback([&] { action = run_validate; });

    auto* farber_cmd = app.add_subcommand("farber", "classic Farber criterion at finite depth");
    add_common(farber_cmd, o);
    add_word_cap(farber_cmd, o);
    farber_cmd->add_option("--words", o.words_file, "file with one word per line (instead of --max-word-len)");
    farber_cmd->add_option("--tol", o.tolerance, "tolerance, e.g. 0.01 or 1/64")->capture_default_str();
    farber_cmd->callback([&] { action = run_farber; });

    auto* local_cmd = app.add_subcommand("local-farber", "local Farber criterion on the fibers over a base level");
    add_common(local_cmd, o);
    add_word_cap(local_cmd, o);
    local_cmd->add_option("--base-level,-k", o.base_level, "base level k")->capture_default_str();
    local_cmd->add_option("--tol", o.tolerance, "tolerance, e.g. 0.01 or 1/64")->capture_default_str();
    local_cmd->add_option("--max-schreier", o.max_schreier, "cap on Schreier generators")->capture_default_str();
    local_cmd->callback([&] { action = run_local_farber; });

    auto* hol_cmd = app.add_subcommand("holonomy", "fixed-set statistics and holonomy estimate of a word");
    add_common(hol_cmd, o);
    hol_cmd->add_option("--word,-w", o.word, "word, e.g. a*b^-1 or [a,b]")->required();
    hol_cmd->callback([&] { action = run_holonomy; });

    auto* density_cmd = app.add_subcommand("density", "density profile of a fixed set around a point");
    add_common(density_cmd, o);
    density_cmd->add_option("--word,-w", o.word, "word")->required();
    density_cmd->add_option("--point,-P", o.point, "point index at the depth (default: sampled with --seed)");
    density_cmd->callback([&] { action = run_density; });

    auto* wit_cmd = app.add_subcommand("witnesses", "partial-triviality witnesses at finite depth");
    add_common(wit_cmd, o);
    add_word_cap(wit_cmd, o);
    wit_cmd->callback([&] { action = run_witnesses; });

    auto* lqa_cmd = app.add_subcommand("lqa", "candidate locally quasi-analytic scale");
    add_common(lqa_cmd, o);
    add_word_cap(lqa_cmd, o);
    lqa_cmd->callback([&] { action = run_lqa; });

    auto* lcs_cmd = app.add_subcommand("lcs-witness", "holonomy witnesses along the lower central series");
    add_common(lcs_cmd, o);
    lcs_cmd->add_option("--class,-n", o.lcs_class, "largest class n")->capture_default_str();
    lcs_cmd->add_option("--max-word-len,-L", o.max_word_length, "generator word cap L")->capture_default_str();
    lcs_cmd->add_option("--conj-len,-c", o.conj_length, "conjugator length cap c")->capture_default_str();
    lcs_cmd->add_option("--max-candidates", o.max_candidates, "candidates per class")->capture_default_str();
    lcs_cmd->callback([&] { action = run_lcs; });

    auto* oracle_cmd = app.add_subcommand("oracle", "finite-image oracles");
    oracle_cmd->require_subcommand(1);
    auto* stab_cmd = oracle_cmd->add_subcommand("stab-count", "point-stabilizer count in the finite image");
    add_common(stab_cmd, o, false);
    stab_cmd->add_option("--level,-l", o.level, "level")->capture_default_str();
    stab_cmd->add_option("--word,-w", o.word, "word")->required();
    stab_cmd->add_option("--max-order", o.max_order, "cap on the finite image order")->capture_default_str();
    stab_cmd->callback([&] { action = run_stab_count; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        return action(o);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ResourceError& e) {
        std::cerr << "budget '" << e.budget() << "' exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
