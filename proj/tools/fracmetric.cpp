// fracmetric: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 validation failure (bad spec,
// rejected certificate), 3 undecided check.

#include <fracmetric/fracmetric.hpp>
#include <fracmetric/json_io.hpp>

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace fracmetric;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kUndecided = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string spec;
    std::string alpha;
    std::string format = "text";
    int level = 0;
    int max_depth = CheckOptions{}.max_depth;
    int cell_depth = 1;
    std::string from, to, cell, iota, cert;
    size_t limit = 1000;
};

bool json_out(const Options& o) { return o.format == "json"; }

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

FractalSpec parse_or_fail(const std::string& text, const std::string& source) {
    try {
        return parse_spec(text);
    } catch (const SpecError& e) {
        throw ValidationFailure(source + ": " + e.what());
    }
}

/// A built-in name or a spec file path.
FractalSpec load_spec_unchecked(const std::string& source) {
    if (is_builtin(source)) return builtin(source);
    std::ifstream in(source);
    if (!in) throw UsageError("cannot read spec '" + source + "' (not a file or built-in name)");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_or_fail(buf.str(), source);
}

FractalSpec load_spec(const std::string& source) {
    auto spec = load_spec_unchecked(source);
    auto report = validate_spec(spec);
    if (!report.ok()) {
        std::string why;
        for (const auto& c : report.checks)
            if (!c.passed) why += "\n  " + c.axiom + (c.detail.empty() ? "" : ": " + c.detail);
        throw ValidationFailure("spec '" + source + "' fails validation:" + why);
    }
    return spec;
}

PolyRatio load_alpha(const Options& o, const FractalSpec& spec) {
    if (o.alpha.empty()) throw UsageError("--alpha is required");
    PolyRatio a;
    try {
        a = PolyRatio::parse(o.alpha);
    } catch (const std::exception& e) {
        throw UsageError("bad --alpha '" + o.alpha + "': " + e.what());
    }
    if (a.size() != static_cast<size_t>(spec.k))
        throw UsageError("--alpha has " + std::to_string(a.size()) + " entries, the fractal has " +
                         std::to_string(spec.k) + " cells");
    return a;
}

void check_level(const Options& o, const FractalSpec& spec) {
    if (o.level < 0) throw UsageError("--level must be nonnegative");
    double addresses = spec.n;
    for (int i = 0; i < o.level; ++i) addresses *= spec.k;
    if (addresses > 2e7) throw UsageError("level " + std::to_string(o.level) + " is too large for this fractal");
}

Address load_address(const std::string& text, const FractalSpec& spec, int level, const char* flag) {
    if (text.empty()) throw UsageError(std::string(flag) + " is required");
    Address a;
    try {
        a = Address::parse(text, spec.k);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad ") + flag + " '" + text + "': " + e.what());
    }
    if (a.word.size() > static_cast<size_t>(level))
        throw UsageError(std::string(flag) + " '" + text + "' lies below level " + std::to_string(level));
    if (a.boundary < 1 || a.boundary > spec.n) throw UsageError(std::string(flag) + " '" + text + "': boundary index out of range");
    return a;
}

Word load_word(const std::string& text, const FractalSpec& spec, int level) {
    if (text.empty()) throw UsageError("--cell is required");
    Word w;
    try {
        w = Word::parse(text, spec.k);
    } catch (const std::exception& e) {
        throw UsageError("bad --cell '" + text + "': " + e.what());
    }
    if (w.size() > static_cast<size_t>(level)) throw UsageError("--cell is longer than --level");
    return w;
}

Json alpha_json(const PolyRatio& a) {
    Json j = Json::array();
    for (const auto& x : a.values()) j.push_back(to_string(x));
    return j;
}

int cmd_validate(const Options& o) {
    auto spec = load_spec_unchecked(o.spec);
    auto report = validate_spec(spec);
    if (json_out(o)) {
        Json j;
        j["fractal"] = spec.name;
        j["cells"] = spec.k;
        j["boundary"] = spec.n;
        j["valid"] = report.ok();
        Json checks = Json::array();
        for (const auto& c : report.checks)
            checks.push_back({{"axiom", c.axiom}, {"passed", c.passed}, {"detail", c.detail}});
        j["checks"] = checks;
        emit(j);
    } else {
        std::cout << "fractal " << spec.name << " (cells " << spec.k << ", boundary " << spec.n << ")\n";
        for (const auto& c : report.checks)
            std::cout << (c.passed ? "  pass  " : "  FAIL  ") << c.axiom << (c.detail.empty() ? "" : ": " + c.detail)
                      << '\n';
        std::cout << (report.ok() ? "VALID" : "INVALID") << '\n';
    }
    return report.ok() ? kOk : kInvalid;
}

std::string verdict_line(const Verdict& v) {
    if (std::holds_alternative<ProvenUp>(v)) return "METRIC (ProvenUP)";
    if (auto* no = std::get_if<ProvenNotUp>(&v))
        return "NOT_METRIC (ProvenNotUP \xce\xbb=" + to_string(no->certificate.lambda) + ")";
    return "UNDECIDED (depth " + std::to_string(std::get<Undecided>(v).depth) + ")";
}

int cmd_check(const Options& o) {
    auto spec = load_spec(o.spec);
    auto alpha = load_alpha(o, spec);
    if (o.max_depth < 1) throw UsageError("--max-depth must be at least 1");
    CheckOptions opt;
    opt.max_depth = o.max_depth;
    auto v = check_up(spec, alpha, opt);
    if (json_out(o)) {
        BellmanOperator op(spec, alpha);
        Json j;
        j["fractal"] = spec.name;
        j["alpha"] = alpha_json(alpha);
        j["status"] = to_string(metric_verdict(v));
        if (auto* up = std::get_if<ProvenUp>(&v)) {
            j["verdict"] = "ProvenUP";
            j["method"] = up->method;
            Rational c3 = up->u.front();
            for (const auto& x : up->u) c3 = std::min(c3, x);
            j["c3"] = to_string(c3);
            j["certificate"] = certificate_to_json(op, v);
        } else if (std::holds_alternative<ProvenNotUp>(v)) {
            j["verdict"] = "ProvenNotUP";
            j["certificate"] = certificate_to_json(op, v);
        } else {
            const auto& u = std::get<Undecided>(v);
            j["verdict"] = "Undecided";
            j["depth"] = u.depth;
            j["floor"] = u.floor;
        }
        emit(j);
    } else {
        std::cout << verdict_line(v) << '\n';
    }
    return std::holds_alternative<Undecided>(v) ? kUndecided : kOk;
}

int cmd_verify_cert(const Options& o) {
    auto spec = load_spec(o.spec);
    auto alpha = load_alpha(o, spec);
    if (o.cert.empty()) throw UsageError("--cert is required");
    std::ifstream in(o.cert);
    if (!in) throw UsageError("cannot read certificate '" + o.cert + "'");
    BellmanOperator op(spec, alpha);
    Verdict v;
    try {
        Json j = Json::parse(in);
        if (j.contains("certificate")) j = j["certificate"];
        v = certificate_from_json(op, j);
    } catch (const std::exception& e) {
        throw ValidationFailure(std::string("certificate rejected: ") + e.what());
    }
    bool ok = verify_certificate(op, v);
    const char* kind = std::holds_alternative<ProvenUp>(v) ? "ProvenUP" : "ProvenNotUP";
    if (json_out(o))
        emit({{"valid", ok}, {"verdict", kind}, {"status", ok ? to_string(metric_verdict(v)) : "REJECTED"}});
    else
        std::cout << (ok ? "VALID " : "INVALID ") << kind << (ok ? std::string(" -> ") + to_string(metric_verdict(v)) : "")
                  << '\n';
    return ok ? kOk : kInvalid;
}

int print_distance(const Options& o, const FractalSpec& spec, const Address& a, const Address& b, const Rational& d) {
    if (json_out(o))
        emit({{"level", o.level},
              {"from", a.str(spec.k)},
              {"to", b.str(spec.k)},
              {"distance", to_string(d)},
              {"decimal", to_decimal(d)}});
    else
        std::cout << to_string(d) << '\n';
    return kOk;
}

int cmd_dist(const Options& o) {
    auto spec = load_spec(o.spec);
    auto alpha = load_alpha(o, spec);
    check_level(o, spec);
    auto a = load_address(o.from, spec, o.level, "--from");
    auto b = load_address(o.to, spec, o.level, "--to");
    return print_distance(o, spec, a, b, path_distance(spec, alpha, o.level, a, b));
}

int cmd_chains(const Options& o) {
    auto spec = load_spec(o.spec);
    auto alpha = load_alpha(o, spec);
    check_level(o, spec);
    auto a = load_address(o.from, spec, o.level, "--from");
    auto b = load_address(o.to, spec, o.level, "--to");
    return print_distance(o, spec, a, b, chain_distance(spec, alpha, o.level, a, b));
}

int cmd_diam(const Options& o) {
    auto spec = load_spec(o.spec);
    auto alpha = load_alpha(o, spec);
    check_level(o, spec);
    auto w = load_word(o.cell, spec, o.level);
    LevelGraph g(spec, o.level);
    Rational d = cell_diameter(g, alpha, w);
    if (json_out(o))
        emit({{"level", o.level},
              {"cell", w.str(spec.k)},
              {"alpha_w", to_string(word_weight(alpha, w))},
              {"diameter", to_string(d)},
              {"decimal", to_decimal(d)}});
    else
        std::cout << to_string(d) << '\n';
    return kOk;
}

int cmd_scaling_report(const Options& o) {
    auto spec = load_spec(o.spec);
    auto alpha = load_alpha(o, spec);
    check_level(o, spec);
    if (o.cell_depth < 0 || o.cell_depth > o.level) throw UsageError("--cell-depth must lie in [0, level]");
    auto r = scaling_report(spec, alpha, o.level, o.cell_depth);
    if (json_out(o)) {
        emit(scaling_report_to_json(r, spec.k));
        return kOk;
    }
    std::vector<std::vector<std::string>> rows{{"cell", "alpha_w", "diameter", "ratio", "decimal", "coarse"}};
    for (const auto& row : r.rows)
        rows.push_back({row.word.str(spec.k), to_string(row.weight), to_string(row.diameter), to_string(row.ratio),
                        to_decimal(row.ratio), to_string(row.coarse_ratio)});
    std::vector<size_t> width(rows.front().size(), 0);
    for (const auto& row : rows)
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    std::cout << "level " << r.level << ", cell depth " << r.cell_depth << ", total diameter "
              << to_string(r.total_diameter) << " (" << to_decimal(r.total_diameter) << ")\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c)
            std::cout << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << row[c];
        std::cout << '\n';
    }
    std::cout << "min ratio " << to_string(r.min_ratio) << " (" << to_decimal(r.min_ratio) << "), max ratio "
              << to_string(r.max_ratio) << " (" << to_decimal(r.max_ratio) << "), max coarse ratio "
              << to_string(r.max_coarse_ratio) << '\n';
    return kOk;
}

int cmd_paths(const Options& o) {
    auto spec = load_spec(o.spec);
    Iota io;
    {
        auto comma = o.iota.find(',');
        if (o.iota.empty() || comma == std::string::npos) throw UsageError("--iota takes j1,j2");
        try {
            io = {std::stoi(o.iota.substr(0, comma)), std::stoi(o.iota.substr(comma + 1))};
        } catch (const std::exception&) {
            throw UsageError("bad --iota '" + o.iota + "'");
        }
        if (io.from < 1 || io.to < 1 || io.from > spec.n || io.to > spec.n || io.from == io.to)
            throw UsageError("--iota needs two distinct boundary indices in 1.." + std::to_string(spec.n));
    }
    LevelGraph g1(spec, 1);
    auto paths = enumerate_strict_paths(g1, io);
    const size_t shown = std::min(paths.size(), o.limit);
    if (json_out(o)) {
        Json list = Json::array();
        for (size_t i = 0; i < shown; ++i)
            list.push_back({{"vertices", paths[i].vertex_labels(g1)}, {"text", paths[i].str(g1)}});
        emit({{"iota", io.str()}, {"count", paths.size()}, {"shown", shown}, {"paths", list}});
    } else {
        for (size_t i = 0; i < shown; ++i) std::cout << paths[i].str(g1) << '\n';
        std::cout << paths.size() << " strict paths for " << io.str();
        if (shown < paths.size()) std::cout << ", first " << shown << " shown";
        std::cout << '\n';
    }
    return kOk;
}

int cmd_export_dot(const Options& o) {
    auto spec = load_spec(o.spec);
    check_level(o, spec);
    std::optional<PolyRatio> alpha;
    if (!o.alpha.empty()) alpha = load_alpha(o, spec);
    LevelGraph g(spec, o.level);
    write_dot(std::cout, g, alpha ? &*alpha : nullptr);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar metrics on p.c.f. fractals: exact checks and finite-level distances"};
    app.require_subcommand(1);
    Options o;

    auto spec_arg = [&](CLI::App* c) { c->add_option("spec", o.spec, "spec file or built-in name")->required(); };
    auto alpha_opt = [&](CLI::App* c, bool required) {
        auto* opt = c->add_option("--alpha", o.alpha, "comma-separated ratios, p/q or decimals");
        if (required) opt->required();
    };
    auto level_opt = [&](CLI::App* c) { c->add_option("--level", o.level, "level m")->required(); };
    auto format_opt = [&](CLI::App* c) {
        c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));
    };

    std::vector<std::pair<CLI::App*, int (*)(const Options&)>> commands;
    auto add = [&](const char* name, const char* help, int (*run)(const Options&)) {
        auto* c = app.add_subcommand(name, help);
        spec_arg(c);
        format_opt(c);
        commands.emplace_back(c, run);
        return c;
    };

    add("validate", "check the structural axioms of a spec", cmd_validate);
    {
        auto* c = add("check", "decide whether alpha is a metric polyratio", cmd_check);
        alpha_opt(c, true);
        c->add_option("--max-depth", o.max_depth, "Bellman iteration cap");
    }
    for (auto [name, help, run] : {std::tuple{"dist", "level-m path distance", cmd_dist},
                                   std::tuple{"chains", "level-m chain distance", cmd_chains}}) {
        auto* c = add(name, help, run);
        alpha_opt(c, true);
        level_opt(c);
        c->add_option("--from", o.from, "address <word>.<j>")->required();
        c->add_option("--to", o.to, "address <word>.<j>")->required();
    }
    {
        auto* c = add("diam", "level-m diameter of a cell", cmd_diam);
        alpha_opt(c, true);
        level_opt(c);
        c->add_option("--cell", o.cell, "cell word, e for the whole")->required();
    }
    {
        auto* c = add("scaling-report", "cell diameters against alpha_w", cmd_scaling_report);
        alpha_opt(c, true);
        level_opt(c);
        c->add_option("--cell-depth", o.cell_depth, "longest cell word")->required();
    }
    {
        auto* c = add("paths", "strict level-1 paths between two boundary points", cmd_paths);
        c->add_option("--iota", o.iota, "j1,j2")->required();
        c->add_option("--limit", o.limit, "paths to print");
    }
    {
        auto* c = add("export-dot", "level-m graph in DOT format", cmd_export_dot);
        level_opt(c);
        alpha_opt(c, false);
    }
    {
        auto* c = add("verify-cert", "re-verify a certificate emitted by check --format json", cmd_verify_cert);
        alpha_opt(c, true);
        c->add_option("--cert", o.cert, "certificate JSON file")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        for (const auto& [sub, run] : commands)
            if (sub->parsed()) return run(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ValidationFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
