#pragma once

// The `pnk` command line: equiv, leq, dist, query, sample and casestudy.
// run_cli() is the whole program minus main(), so it can be driven from
// tests with captured streams.
//
// Exit codes: 0 success (equal / leq), 1 negative verdict or failed
// check, 2 usage, parse or resource error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnk/analysis.hpp"
#include "pnk/casestudy.hpp"
#include "pnk/desugar.hpp"
#include "pnk/io.hpp"
#include "pnk/sampler.hpp"
#include "pnk/syntax.hpp"

namespace pnk::cli {

struct SessionConfig {
    std::optional<bool> exact;  // unset: exact, except float for case studies
    double tol = kDefaultTolerance;
    std::size_t max_states = KernelOptions{}.max_states;
    std::size_t cap_subsets = 12;
    std::uint64_t seed = 1;
    std::string format = "json";
    unsigned jobs = 1;

    KernelOptions kernel_options() const {
        KernelOptions o;
        o.max_states = max_states;
        return o;
    }
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A program argument names a file; anything that is not a readable file
/// is taken as program text.
inline std::string read_source(const std::string& arg) {
    std::ifstream in(arg);
    if (!in) return arg;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_json_arg(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '[' || arg[first] == '{')) return arg;
    std::ifstream in(arg);
    if (!in) throw UsageError("cannot read '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Parses one or more programs over a shared universe: an explicit
/// --universe wins, otherwise the first file's header. Later headers must
/// agree with it.
inline std::pair<PacketUniverse, std::vector<Program>> load_programs(const std::vector<std::string>& args,
                                                                     const std::string& universe_arg) {
    std::optional<PacketUniverse> u;
    if (!universe_arg.empty()) u = universe_from_json(json::parse(read_json_arg(universe_arg)));
    std::vector<Program> progs;
    for (const auto& a : args) {
        auto text = read_source(a);
        auto f = parse_program_file(text, u);
        if (u && !(f.universe == *u))
            throw UniverseError("'" + a + "' declares fields " + pretty(f.universe) + " but the session uses " +
                                pretty(*u));
        if (!u) u = f.universe;
        progs.push_back(desugar(f.program));
    }
    return {*u, progs};
}

inline InputSpec load_inputs(const std::string& spec, const PacketUniverse& u, const SessionConfig& cfg) {
    if (spec == "all") return InputSpec::all(u, cfg.cap_subsets);
    if (spec == "singletons") return InputSpec::singletons(u);
    return InputSpec::of(sets_from_json(u, json::parse(read_json_arg(spec))));
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
    os << "\n";
}

inline void write_tables(std::ostream& os, const std::vector<study::Table>& tables, const std::string& format,
                         const char* mode) {
    if (format == "csv") {
        for (std::size_t i = 0; i < tables.size(); ++i) {
            if (i) os << "\n";
            os << "# " << tables[i].name << "\n";
            write_csv_row(os, tables[i].columns);
            for (const auto& r : tables[i].rows) write_csv_row(os, r);
        }
        return;
    }
    json j = {{"mode", mode}};
    for (const auto& t : tables) {
        json rows = json::array();
        for (const auto& r : t.rows) {
            json row = json::object();
            for (std::size_t c = 0; c < t.columns.size(); ++c) row[t.columns[c]] = r[c];
            rows.push_back(row);
        }
        j[t.name] = rows;
    }
    os << j.dump(2) << "\n";
}

template <class S>
void write_verdict(std::ostream& os, const PacketUniverse& u, const Verdict<S>& v, const std::string& format) {
    if (format == "csv") {
        write_csv_row(os, {"result", "input", "output", "left", "right"});
        if (v.witness)
            write_csv_row(os, {to_string(v.result), format_set(u, v.witness->input), format_set(u, v.witness->output),
                               scalar_traits<S>::str(v.witness->left), scalar_traits<S>::str(v.witness->right)});
        else
            write_csv_row(os, {to_string(v.result), "", "", "", ""});
        return;
    }
    os << verdict_to_json(u, v).dump(2) << "\n";
}

// ---------------------------------------------------------------------------

struct DecideArgs {
    std::vector<std::string> files;
    std::string inputs = "all";
    std::string universe;
};

template <class S>
int cmd_decide(bool order, const DecideArgs& a, const SessionConfig& cfg, std::ostream& os) {
    auto [u, ps] = load_programs(a.files, a.universe);
    auto rows = load_inputs(a.inputs, u, cfg);
    Kernel<S> kp(ps[0], u, cfg.kernel_options()), kq(ps[1], u, cfg.kernel_options());
    auto v = order ? leq(kp, kq, rows, cfg.tol) : equiv(kp, kq, rows, cfg.tol);
    write_verdict(os, u, v, cfg.format);
    return v.positive() ? 0 : 1;
}

struct DistArgs {
    std::string file;
    std::string inputs = "all";
    std::string universe;
};

template <class S>
int cmd_dist(const DistArgs& a, const SessionConfig& cfg, std::ostream& os) {
    auto [u, ps] = load_programs({a.file}, a.universe);
    auto rows = load_inputs(a.inputs, u, cfg);
    Kernel<S> k(ps[0], u, cfg.kernel_options());
    if (cfg.format == "csv") {
        write_csv_row(os, {"input", "output", "prob"});
        for (const auto& in : rows.sets)
            for (const auto& [b, p] : k.apply(in))
                write_csv_row(os, {format_set(u, in), format_set(u, b), scalar_traits<S>::str(p)});
        return 0;
    }
    json out = json::array();
    for (const auto& in : rows.sets) out.push_back(dist_to_json(u, in, k.apply(in)));
    os << json{{"mode", scalar_traits<S>::name}, {"rows", out}}.dump(2) << "\n";
    return 0;
}

struct QueryArgs {
    std::string file;
    std::string inputs;
    std::string universe;
    std::string measure;
    bool unconditional = false;
};

/// Measures: nonempty | all:PRED | some:PRED | expect:FIELD | cdf:FIELD.
template <class S>
int cmd_query(const QueryArgs& a, const SessionConfig& cfg, std::ostream& os) {
    using T = scalar_traits<S>;
    auto [u, ps] = load_programs({a.file}, a.universe);
    auto rows = load_inputs(a.inputs, u, cfg);
    Kernel<S> k(ps[0], u, cfg.kernel_options());
    const auto colon = a.measure.find(':');
    const std::string kind = a.measure.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : a.measure.substr(colon + 1);
    if (kind != "nonempty" && arg.empty()) throw UsageError("measure '" + kind + "' needs an argument");

    std::vector<std::pair<PacketSet, std::vector<std::string>>> results;
    for (const auto& in : rows.sets) {
        const auto& d = k.apply(in);
        std::vector<std::string> vals;
        if (kind == "nonempty") {
            vals.push_back(T::str(prob_nonempty(d)));
        } else if (kind == "all" || kind == "some") {
            auto pred = desugar(parse(arg, u));
            vals.push_back(T::str(prob_satisfies(d, pred, u, kind == "all" ? Quantifier::All : Quantifier::Some)));
        } else if (kind == "expect") {
            vals.push_back(T::str(expected_field(d, u, arg)));
        } else if (kind == "cdf") {
            for (const auto& v : field_cdf(d, u, arg, !a.unconditional)) vals.push_back(T::str(v));
        } else {
            throw UsageError("unknown measure '" + kind + "' (nonempty, all:P, some:P, expect:F, cdf:F)");
        }
        results.emplace_back(in, std::move(vals));
    }
    if (cfg.format == "csv") {
        write_csv_row(os, kind == "cdf" ? std::vector<std::string>{"input", "value", "cdf"}
                                        : std::vector<std::string>{"input", "value"});
        for (const auto& [in, vals] : results) {
            if (kind == "cdf")
                for (std::size_t v = 0; v < vals.size(); ++v)
                    write_csv_row(os, {format_set(u, in), std::to_string(v), vals[v]});
            else
                write_csv_row(os, {format_set(u, in), vals[0]});
        }
        return 0;
    }
    json out = json::array();
    for (const auto& [in, vals] : results) {
        json row = {{"input", set_to_json(u, in)}};
        if (kind == "cdf")
            row["cdf"] = vals;
        else
            row["value"] = vals[0];
        out.push_back(row);
    }
    os << json{{"mode", T::name}, {"measure", a.measure}, {"rows", out}}.dump(2) << "\n";
    return 0;
}

struct SampleArgs {
    std::string file;
    std::string inputs;
    std::string universe;
    std::size_t samples = 10000;
    std::size_t depth_cap = 100000;
    bool check = false;
};

/// Monte Carlo estimate per input; with --check also compares against the
/// exact distribution and fails unless every point is within 3 standard
/// errors.
inline int cmd_sample(const SampleArgs& a, const SessionConfig& cfg, std::ostream& os) {
    auto [u, ps] = load_programs({a.file}, a.universe);
    auto rows = load_inputs(a.inputs, u, cfg);
    std::optional<Kernel<Rational>> exact;
    if (a.check) exact.emplace(ps[0], u, cfg.kernel_options());
    bool ok = true;
    json out = json::array();
    std::vector<std::vector<std::string>> csv;
    for (std::size_t i = 0; i < rows.sets.size(); ++i) {
        const auto& in = rows.sets[i];
        auto est = estimate(ps[0], u, in, a.samples, split_seed(cfg.seed, i), a.depth_cap);
        json support = json::array();
        for (const auto& [b, c] : est.counts) {
            support.push_back({{"set", set_to_json(u, b)}, {"count", c}, {"freq", est.frequency(b)}});
            csv.push_back({format_set(u, in), format_set(u, b), std::to_string(c), scalar_traits<double>::str(est.frequency(b))});
        }
        json row = {{"input", set_to_json(u, in)},
                    {"completed", est.completed},
                    {"truncated", est.truncated},
                    {"support", support}};
        if (exact) {
            auto ag = agreement(exact->apply(in), est);
            row["agreement"] = {{"ok", ag.ok}, {"points", ag.points}, {"failures", ag.failures}, {"worst_z", ag.worst_z}};
            ok = ok && ag.ok;
        }
        out.push_back(row);
    }
    if (cfg.format == "csv") {
        write_csv_row(os, {"input", "output", "count", "freq"});
        for (const auto& r : csv) write_csv_row(os, r);
    } else {
        os << json{{"seed", cfg.seed}, {"samples", a.samples}, {"rows", out}}.dump(2) << "\n";
    }
    return ok ? 0 : 1;
}

struct CaseArgs {
    std::string name;
    std::string topology = "abfattree";
    std::string ks = "0,1,2,3,4,inf";
    std::string p = "1/4";
    std::string ps;
    std::uint32_t counter_size = 16;
};

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

inline std::optional<std::uint32_t> parse_k(const std::string& s) {
    if (s == "inf") return std::nullopt;
    try {
        std::size_t used = 0;
        auto v = std::stoul(s, &used);
        if (used == s.size() && v < 64) return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("bad failure bound '" + s + "' (expected 0..63 or inf)");
}

inline Rational parse_probability(const std::string& s) {
    Rational q;
    try {
        q = parse_rational(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (q < 0 || q >= 1) throw UsageError("failure probability must lie in [0,1), got " + s);
    return q;
}

template <class S>
int cmd_casestudy(const CaseArgs& a, const SessionConfig& cfg, std::ostream& os) {
    const char* mode = scalar_traits<S>::name;
    auto failed = [](const study::Table& t) {
        for (const auto& r : t.rows)
            if (r.back() == "no") return true;
        return false;
    };
    if (a.name == "toy-overview") {
        auto t = study::toy_overview<S>(cfg.kernel_options(), cfg.tol);
        write_tables(os, {t}, cfg.format, mode);
        return failed(t) ? 1 : 0;
    }
    if (a.name == "f10-resilience" || a.name == "f10-invariants") {
        study::F10Config c;
        c.topology = a.topology;
        c.ks.clear();
        for (const auto& k : split_list(a.ks)) c.ks.push_back(parse_k(k));
        c.p = parse_probability(a.p);
        c.opts = cfg.kernel_options();
        c.tol = cfg.tol;
        c.jobs = cfg.jobs;
        if (a.name == "f10-resilience") {
            write_tables(os, study::f10_resilience<S>(c), cfg.format, mode);
            return 0;
        }
        auto t = study::f10_invariants<S>(c);
        write_tables(os, {t}, cfg.format, mode);
        return failed(t) ? 1 : 0;
    }
    if (a.name == "f10-latency") {
        study::LatencyConfig c;
        c.topology = a.topology;
        auto ks = split_list(a.ks);
        c.k = parse_k(ks.size() == 1 ? ks[0] : "inf");
        for (const auto& p : split_list(a.ps)) c.ps.push_back(parse_probability(p));
        c.cdf_p = parse_probability(a.p);
        c.counter_size = a.counter_size;
        c.opts = cfg.kernel_options();
        c.jobs = cfg.jobs;
        write_tables(os, study::f10_latency<S>(c), cfg.format, mode);
        return 0;
    }
    throw UsageError("unknown case study '" + a.name +
                     "' (toy-overview, f10-resilience, f10-invariants, f10-latency)");
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact equivalence and quantitative queries for history-free ProbNetKAT"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pnk 1.0");

    SessionConfig cfg;
    if (const char* env = std::getenv("PNK_MAX_STATES")) {
        try {
            cfg.max_states = std::stoull(env);
        } catch (const std::exception&) {
            err << "error: PNK_MAX_STATES must be a positive integer\n";
            return 2;
        }
    }
    bool exact_flag = false, float_flag = false;
    auto* ex = app.add_flag("--exact", exact_flag, "Exact rational arithmetic (default except casestudy)");
    app.add_flag("--float", float_flag, "Binary floating point with tolerance --tol")->excludes(ex);
    app.add_option("--tol", cfg.tol, "Float comparison tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-states", cfg.max_states, "Pair-state budget per star (env PNK_MAX_STATES)")
        ->check(CLI::PositiveNumber);
    app.add_option("--cap-subsets", cfg.cap_subsets, "Largest universe for --inputs all");
    app.add_option("--seed", cfg.seed, "Sampler seed");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs", cfg.jobs, "Parallel case-study cells")->check(CLI::PositiveNumber);
    app.fallthrough();

    const std::string inputs_help = "all | singletons | JSON list of packet sets (inline or file)";
    DecideArgs eq, lq;
    auto* equiv_cmd = app.add_subcommand("equiv", "Decide p == q on the input rows");
    auto* leq_cmd = app.add_subcommand("leq", "Decide p <= q on the input rows");
    for (auto [sub, args] : {std::pair{equiv_cmd, &eq}, std::pair{leq_cmd, &lq}}) {
        sub->add_option("programs", args->files, "Two program files")->required()->expected(2);
        sub->add_option("--inputs", args->inputs, inputs_help);
        sub->add_option("--universe", args->universe, "Universe JSON when files lack a fields header");
    }
    DistArgs da;
    auto* dist = app.add_subcommand("dist", "Print the output distribution per input");
    dist->add_option("program", da.file)->required();
    dist->add_option("--inputs,--input", da.inputs, inputs_help);
    dist->add_option("--universe", da.universe);

    QueryArgs qa;
    auto* query = app.add_subcommand("query", "Evaluate a measure of the output distribution");
    query->add_option("program", qa.file)->required();
    query->add_option("--inputs,--input", qa.inputs, inputs_help)->required();
    query->add_option("--measure", qa.measure, "nonempty | all:PRED | some:PRED | expect:FIELD | cdf:FIELD")
        ->required();
    query->add_flag("--unconditional", qa.unconditional, "cdf without conditioning on delivery");
    query->add_option("--universe", qa.universe);

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "Monte Carlo estimate of the output distribution");
    sample->add_option("program", sa.file)->required();
    sample->add_option("--inputs,--input", sa.inputs, inputs_help)->required();
    sample->add_option("--samples", sa.samples)->check(CLI::PositiveNumber);
    sample->add_option("--depth-cap", sa.depth_cap, "Iteration cap per star")->check(CLI::PositiveNumber);
    sample->add_flag("--check", sa.check, "Compare with the exact distribution (3 standard errors)");
    sample->add_option("--universe", sa.universe);

    CaseArgs ca;
    auto* cs = app.add_subcommand("casestudy", "Reproduce a case study as tables");
    cs->add_option("name", ca.name, "toy-overview | f10-resilience | f10-invariants | f10-latency")->required();
    cs->add_option("--topo", ca.topology, "abfattree | fattree | abfattree-reduced");
    cs->add_option("--k", ca.ks, "Failure bounds, comma separated (inf = unbounded)");
    cs->add_option("--p", ca.p, "Link failure probability (hop CDF for f10-latency)");
    cs->add_option("--ps", ca.ps, "Failure probabilities for the delivery sweep");
    cs->add_option("--counter-size", ca.counter_size, "Hop counter domain")->check(CLI::Range(2u, 256u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << e.what() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (exact_flag) cfg.exact = true;
    if (float_flag) cfg.exact = false;

    try {
        const bool casestudy = cs->parsed();
        const bool exact = cfg.exact.value_or(!casestudy);
        if (equiv_cmd->parsed())
            return exact ? cmd_decide<Rational>(false, eq, cfg, out) : cmd_decide<double>(false, eq, cfg, out);
        if (leq_cmd->parsed())
            return exact ? cmd_decide<Rational>(true, lq, cfg, out) : cmd_decide<double>(true, lq, cfg, out);
        if (dist->parsed()) return exact ? cmd_dist<Rational>(da, cfg, out) : cmd_dist<double>(da, cfg, out);
        if (query->parsed()) return exact ? cmd_query<Rational>(qa, cfg, out) : cmd_query<double>(qa, cfg, out);
        if (sample->parsed()) return cmd_sample(sa, cfg, out);
        return exact ? cmd_casestudy<Rational>(ca, cfg, out) : cmd_casestudy<double>(ca, cfg, out);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << "\n";
    } catch (const json::exception& e) {
        err << "bad JSON: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return 2;
}

}  // namespace pnk::cli
