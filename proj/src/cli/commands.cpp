#include "qdeform/cli.hpp"

#include "qdeform/coherent.hpp"
#include "qdeform/error.hpp"
#include "qdeform/fock.hpp"
#include "qdeform/moments.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace qdeform::cli
{

using nlohmann::json;

namespace
{

enum class Format { Table, Json, Csv };

struct CommonArgs
{
    std::string configPath;
    std::string builtin;
    std::vector<std::string> params;
    std::string format = "table";
    std::string outPath;
};

struct Output
{
    std::string text;
    int exit = kSuccess;
};

constexpr double kStructureTol = 1e-10;
constexpr int kHumanDigits = 6;
constexpr int kMachineDigits = 17;

Format parse_format(const std::string& s)
{
    if (s == "table") return Format::Table;
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    throw ConfigError("unknown format '" + s + "' (expected table, json or csv)");
}

Config resolve_config(const CommonArgs& args)
{
    if (!args.configPath.empty() && !args.builtin.empty()) {
        throw ConfigError("--config and --builtin are mutually exclusive");
    }
    if (args.configPath.empty() && args.builtin.empty()) {
        throw ConfigError("one of --config or --builtin is required");
    }
    Bindings overrides;
    for (const auto& kv : args.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects k=v, got '" + kv + "'");
        try {
            overrides[kv.substr(0, eq)] = parse_complex(kv.substr(eq + 1));
        } catch (const Error& e) {
            throw ConfigError("--param " + kv + ": " + e.what());
        }
    }
    if (!args.builtin.empty()) {
        std::string name = args.builtin;
        if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
        return builtin_config(name, overrides);
    }
    Config cfg = load_config(args.configPath);
    for (const auto& [k, v] : overrides) cfg.params[k] = v;
    return cfg;
}

StructureTable make_table(const Config& cfg)
{
    StructureTable table(to_spec(cfg));
    if (cfg.overrides.injectFault) {
        table = table.with_fault(cfg.overrides.injectFault->n, cfg.overrides.injectFault->delta);
    }
    return table;
}

json algebra_json(const Config& cfg)
{
    json params = json::object();
    for (const auto& [k, v] : cfg.params) params[k] = format_complex(v);
    json j{{"name", cfg.name}, {"F", cfg.F}, {"G", cfg.G}, {"params", params}};
    if (cfg.overrides.injectFault) {
        j["fault"] = json{{"n", cfg.overrides.injectFault->n}, {"delta", cfg.overrides.injectFault->delta}};
    }
    return j;
}

json radius_json(const RadiusEstimate& r)
{
    json j{{"kind", to_string(r.kind)}, {"probe_depth", r.probeDepth}};
    j["value"] = r.kind == RadiusEstimate::Kind::Finite ? json(r.value) : json(nullptr);
    return j;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string num(double v, Format fmt)
{
    return format_number(v, fmt == Format::Table ? kHumanDigits : kMachineDigits);
}

// Fixed-width human table.
std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            os << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << cells[c];
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

std::string render_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
    std::ostringstream os;
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
        os << '\n';
    }
    return os.str();
}

std::string render_rows(Format fmt, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
    return fmt == Format::Csv ? render_csv(header, rows) : render_table(header, rows);
}

// ---------------------------------------------------------------- structure

Output cmd_structure(const Config& cfg, int nMax, Format fmt)
{
    if (nMax < 0) throw ConfigError("--n-max must be >= 0");
    const StructureTable table = make_table(cfg);
    table.ensure(nMax);

    std::optional<int> inapplicableAt;
    double maxDiscrepancy = 0.0;
    json rows = json::array();
    std::vector<std::vector<std::string>> cells;
    for (int n = 0; n <= nMax; ++n) {
        const auto e = table.entry(n);
        std::optional<complex> closed;
        if (!inapplicableAt) {
            try {
                closed = phi_closed_form(table.spec(), n);
            } catch (const ClosedFormInapplicable& ex) {
                inapplicableAt = ex.k();
            }
        }
        double discrepancy = 0.0;
        if (closed) {
            discrepancy = std::abs(*closed - e.phi) / (1.0 + std::abs(e.phi));
            maxDiscrepancy = std::max(maxDiscrepancy, discrepancy);
        }
        json row{{"n", n},
                 {"phi_re", e.phi.real()},
                 {"phi_im", e.phi.imag()},
                 {"f", e.f},
                 {"log_f_factorial", number_or_null(e.logFactorial)}};
        row["closed_re"] = closed ? json(closed->real()) : json(nullptr);
        row["closed_im"] = closed ? json(closed->imag()) : json(nullptr);
        row["discrepancy"] = closed ? json(discrepancy) : json(nullptr);
        rows.push_back(row);
        cells.push_back({std::to_string(n), num(e.phi.real(), fmt), num(e.phi.imag(), fmt), num(e.f, fmt),
                         num(e.logFactorial, fmt), closed ? num(closed->real(), fmt) : "-",
                         closed ? num(closed->imag(), fmt) : "-", closed ? num(discrepancy, fmt) : "-"});
    }
    const bool pass = maxDiscrepancy <= kStructureTol;

    Output out;
    out.exit = pass ? kSuccess : kVerdictFail;
    const auto degeneracy = table.degeneracy_within(nMax);
    if (fmt == Format::Json) {
        json doc{{"command", "structure"}, {"algebra", algebra_json(cfg)}, {"n_max", nMax}, {"rows", rows}, {"pass", pass}};
        doc["degeneracy"] = degeneracy ? json(*degeneracy) : json(nullptr);
        doc["closed_form"] = json{{"applicable", !inapplicableAt.has_value()},
                                  {"inapplicable_at", inapplicableAt ? json(*inapplicableAt) : json(nullptr)},
                                  {"max_discrepancy", maxDiscrepancy},
                                  {"tolerance", kStructureTol}};
        out.text = canonical_json(doc);
        return out;
    }
    const std::vector<std::string> header{"n", "phi_re", "phi_im", "f", "log_f_factorial", "closed_re", "closed_im", "discrepancy"};
    out.text = render_rows(fmt, header, cells);
    if (fmt == Format::Table) {
        std::ostringstream os;
        os << "algebra " << cfg.name << ": F = " << cfg.F << ", G = " << cfg.G << '\n';
        os << out.text;
        os << "max closed-form discrepancy " << num(maxDiscrepancy, fmt);
        if (inapplicableAt) os << " (closed form inapplicable from F(" << *inapplicableAt << ") = 0)";
        if (degeneracy) os << "\ndegenerate ladder: phi(" << *degeneracy << ") = 0";
        os << '\n' << (pass ? "PASS" : "FAIL") << '\n';
        out.text = os.str();
    }
    return out;
}

// ---------------------------------------------------------------- certify

Output cmd_certify(const Config& cfg, int D, double tol, Format fmt)
{
    const StructureTable table = make_table(cfg);
    const FockRep rep = build_rep(table, D);
    const CertificationReport report = certify(rep, tol);

    Output out;
    out.exit = report.pass ? kSuccess : kVerdictFail;
    if (fmt == Format::Json) {
        json rels = json::array();
        for (const auto& r : report.relations) {
            rels.push_back(json{{"relation", r.relation},
                                {"absolute", r.absolute},
                                {"scale", r.scale},
                                {"relative", r.relative},
                                {"pass", r.pass}});
        }
        json doc{{"command", "certify"},
                 {"algebra", algebra_json(cfg)},
                 {"requested_top", rep.requested_top()},
                 {"top", rep.top()},
                 {"dim", rep.dim()},
                 {"subspace_top", report.subspaceTop},
                 {"tol", report.tol},
                 {"relations", rels},
                 {"pass", report.pass}};
        out.text = canonical_json(doc);
        return out;
    }
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : report.relations) {
        cells.push_back({r.relation, num(r.absolute, fmt), num(r.scale, fmt), num(r.relative, fmt), r.pass ? "pass" : "FAIL"});
    }
    out.text = render_rows(fmt, {"relation", "absolute", "scale", "relative", "verdict"}, cells);
    if (fmt == Format::Table) {
        std::ostringstream os;
        os << "algebra " << cfg.name << ": representation on |0>..|" << rep.top() << ">, relations on n <= "
           << report.subspaceTop << ", tol " << num(tol, fmt) << '\n'
           << out.text << (report.pass ? "PASS" : "FAIL") << '\n';
        out.text = os.str();
    }
    return out;
}

// ---------------------------------------------------------------- coherent

double scan_radius(const RadiusEstimate& radius)
{
    return radius.kind == RadiusEstimate::Kind::Finite ? 0.9 * std::sqrt(radius.value) : 2.0;
}

Output cmd_coherent(const Config& cfg, complex z, double tailTol, int scan, Format fmt)
{
    const StructureTable table = make_table(cfg);
    RadiusOptions ro;
    if (cfg.overrides.probeDepth) ro.probeDepth = *cfg.overrides.probeDepth;
    const RadiusEstimate radius = estimate_radius(table, ro);

    StateOptions so;
    so.tailTol = tailTol;
    const CoherentState state = make_state(table, z, radius, so);
    const int M = state.truncation();
    const FockRep rep = build_rep(table, M + 1);
    const double residual = eigen_residual(state, rep);
    const PhotonStatistics stats = photon_statistics(state);
    const double product = uncertainty_product(state, rep);
    const double bound = robertson_bound(state, rep);
    double norm = 0.0;
    for (double p : stats.pmf) norm += p;

    struct ScanPoint
    {
        complex w, value;
    };
    std::vector<ScanPoint> points;
    if (scan > 0) {
        const double r = scan_radius(radius);
        for (int i = 0; i < scan; ++i) {
            for (int j = 0; j < scan; ++j) {
                const double re = scan == 1 ? 0.0 : -r + 2.0 * r * i / (scan - 1);
                const double im = scan == 1 ? 0.0 : -r + 2.0 * r * j / (scan - 1);
                const complex w(re, im);
                if (std::norm(w) > r * r) continue;
                const CoherentState sw = make_state(table, w, radius, so);
                points.push_back({w, overlap(state, sw)});
            }
        }
    }

    Output out;
    if (fmt == Format::Json) {
        json pmf = json::array();
        for (double p : stats.pmf) pmf.push_back(p);
        json doc{{"command", "coherent"},
                 {"algebra", algebra_json(cfg)},
                 {"z", json{{"re", z.real()}, {"im", z.imag()}}},
                 {"radius", radius_json(radius)},
                 {"truncation", M},
                 {"tail_bound", state.tail_bound()},
                 {"tail_tol", tailTol},
                 {"log_normalization", state.normalization_log()},
                 {"normalization", norm},
                 {"near_boundary", state.near_boundary()},
                 {"eigen_residual", residual},
                 {"mean_n", stats.meanN},
                 {"var_n", stats.varN},
                 {"uncertainty_product", product},
                 {"robertson_bound", bound},
                 {"pmf", pmf}};
        doc["mandel_q"] = stats.mandelQ ? json(*stats.mandelQ) : json(nullptr);
        if (scan > 0) {
            json rows = json::array();
            for (const auto& p : points) {
                rows.push_back(json{{"w_re", p.w.real()},
                                    {"w_im", p.w.imag()},
                                    {"overlap_re", p.value.real()},
                                    {"overlap_im", p.value.imag()},
                                    {"overlap_abs", std::abs(p.value)}});
            }
            doc["overlap_scan"] = rows;
        }
        out.text = canonical_json(doc);
        return out;
    }
    if (fmt == Format::Csv) {
        std::vector<std::vector<std::string>> cells;
        if (scan > 0) {
            for (const auto& p : points) {
                cells.push_back({num(p.w.real(), fmt), num(p.w.imag(), fmt), num(p.value.real(), fmt),
                                 num(p.value.imag(), fmt), num(std::abs(p.value), fmt)});
            }
            out.text = render_csv({"w_re", "w_im", "overlap_re", "overlap_im", "overlap_abs"}, cells);
        } else {
            for (std::size_t n = 0; n < stats.pmf.size(); ++n) {
                cells.push_back({std::to_string(n), num(stats.pmf[n], fmt)});
            }
            out.text = render_csv({"n", "p"}, cells);
        }
        return out;
    }
    std::ostringstream os;
    os << "algebra " << cfg.name << ", z = " << format_number(z.real(), kHumanDigits) << (z.imag() < 0 ? " - " : " + ")
       << format_number(std::abs(z.imag()), kHumanDigits) << "i\n";
    os << "R_f " << to_string(radius.kind);
    if (radius.kind == RadiusEstimate::Kind::Finite) os << " = " << num(radius.value, fmt);
    os << (state.near_boundary() ? "  (near boundary)" : "") << '\n';
    const std::vector<std::vector<std::string>> cells{
        {"truncation", std::to_string(M)},
        {"tail bound", num(state.tail_bound(), fmt)},
        {"normalization", num(norm, fmt)},
        {"ln N_f(|z|^2)", num(state.normalization_log(), fmt)},
        {"eigen residual", num(residual, fmt)},
        {"<N>", num(stats.meanN, fmt)},
        {"Var N", num(stats.varN, fmt)},
        {"Mandel Q", stats.mandelQ ? num(*stats.mandelQ, fmt) : "undefined"},
        {"dQ dP", num(product, fmt)},
        {"|<[Q,P]>|/2", num(bound, fmt)},
    };
    os << render_table({"quantity", "value"}, cells);
    if (scan > 0) {
        std::vector<std::vector<std::string>> sc;
        for (const auto& p : points) {
            sc.push_back({num(p.w.real(), fmt), num(p.w.imag(), fmt), num(std::abs(p.value), fmt)});
        }
        os << "overlap scan\n" << render_table({"w_re", "w_im", "|<z|w>|"}, sc);
    }
    out.text = os.str();
    return out;
}

// ---------------------------------------------------------------- moments

Output cmd_moments(const Config& cfg, const std::string& weightArg, int nMax, double relTol, Format fmt)
{
    const StructureTable table = make_table(cfg);
    RadiusOptions ro;
    if (cfg.overrides.probeDepth) ro.probeDepth = *cfg.overrides.probeDepth;
    const RadiusEstimate radius = estimate_radius(table, ro);

    WeightSpec weight;
    if (weightArg.rfind("builtin:", 0) == 0) {
        weight = builtin_weight(weightArg.substr(8));
    } else {
        const double support = radius.kind == RadiusEstimate::Kind::Finite ? radius.value
                                                                            : std::numeric_limits<double>::infinity();
        weight = expression_weight(weightArg, cfg.params, support);
    }

    MomentOptions mo;
    mo.nMax = nMax;
    mo.relTol = relTol;
    const MomentReport report = check_moments(table, weight, radius, mo);
    const CarlemanDiagnostic carleman = carleman_diagnostic(table);

    Output out;
    out.exit = report.pass ? kSuccess : kVerdictFail;
    if (fmt == Format::Json) {
        json moments = json::array();
        for (const auto& m : report.moments) {
            moments.push_back(json{{"n", m.n},
                                   {"log_target", number_or_null(m.logTarget)},
                                   {"log_value", number_or_null(m.logValue)},
                                   {"relative_error", m.relativeError},
                                   {"quadrature_error", number_or_null(m.quadratureError)},
                                   {"evaluations", m.evaluations},
                                   {"intervals", m.intervals},
                                   {"converged", m.converged},
                                   {"pass", m.pass}});
        }
        const auto ff = report.first_failure();
        json doc{{"command", "moments"},
                 {"algebra", algebra_json(cfg)},
                 {"weight", json{{"kind", weight.kind == WeightSpec::Kind::Builtin ? "builtin" : "expression"},
                                 {"name", weight.name},
                                 {"support", weight.infinite_support() ? "infinite" : "finite"},
                                 {"support_end", number_or_null(weight.supportEnd)}}},
                 {"radius", radius_json(radius)},
                 {"n_max", nMax},
                 {"rel_tol", report.relTol},
                 {"quadrature_tol", report.quadratureTol},
                 {"moments", moments},
                 {"first_failure", ff ? json(*ff) : json(nullptr)},
                 {"warnings", report.warnings},
                 {"carleman", json{{"partial_sum", carleman.partialSum},
                                   {"trend", to_string(carleman.trend)},
                                   {"depth", carleman.depth},
                                   {"decade_ratio", number_or_null(carleman.decadeRatio)}}},
                 {"pass", report.pass}};
        out.text = canonical_json(doc);
        return out;
    }
    std::vector<std::vector<std::string>> cells;
    for (const auto& m : report.moments) {
        cells.push_back({std::to_string(m.n), num(m.logTarget, fmt), num(m.logValue, fmt), num(m.relativeError, fmt),
                         num(m.quadratureError, fmt), m.pass ? "pass" : "FAIL"});
    }
    out.text = render_rows(fmt, {"n", "log_target", "log_value", "relative_error", "quadrature_error", "verdict"}, cells);
    if (fmt == Format::Table) {
        std::ostringstream os;
        os << "algebra " << cfg.name << ", weight " << weight.name << '\n' << out.text;
        for (const auto& w : report.warnings) os << "warning: " << w << '\n';
        os << "Carleman partial sum " << num(carleman.partialSum, fmt) << " over " << carleman.depth << " terms: "
           << to_string(carleman.trend) << '\n';
        os << (report.pass ? "PASS" : "FAIL") << '\n';
        out.text = os.str();
    }
    return out;
}

void add_common(CLI::App* sub, CommonArgs& args)
{
    sub->add_option("--config", args.configPath, "Deformation config (JSON)");
    sub->add_option("--builtin", args.builtin, "Builtin algebra: harmonic, arik-coon, biedenharn, pq");
    sub->add_option("--param", args.params, "Parameter override k=v (repeatable)");
    sub->add_option("--format", args.format, "table | json | csv");
    sub->add_option("--out", args.outPath, "Write output to PATH");
}

} // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Structure functions, coherent states and moment checks for deformed oscillator algebras", "qdeform"};
    app.require_subcommand(1);

    CommonArgs common;
    int nMax = -1;
    int dim = -1;
    int scan = 0;
    std::string zText;
    std::string weightArg;
    std::optional<double> tol;

    auto* structure = app.add_subcommand("structure", "Tabulate phi(n), f(n), log f(n)! and the closed-form cross-check");
    add_common(structure, common);
    structure->add_option("--n-max", nMax, "Largest n (default 10)");

    auto* certifyCmd = app.add_subcommand("certify", "Check the algebra relations on a truncated Fock representation");
    add_common(certifyCmd, common);
    certifyCmd->add_option("--dim", dim, "Highest Fock index D (default 32)");
    certifyCmd->add_option("--tol", tol, "Relative residual tolerance (default 1e-10)");

    auto* coherentCmd = app.add_subcommand("coherent", "Coherent state diagnostics");
    add_common(coherentCmd, common);
    coherentCmd->add_option("--z", zText, "Eigenvalue z, e.g. 0.5+0.25i")->required();
    coherentCmd->add_option("--tol", tol, "Tail tolerance (default 1e-14)");
    coherentCmd->add_option("--scan", scan, "Overlap scan on a KxK grid inside the disk");

    auto* momentsCmd = app.add_subcommand("moments", "Check a radial weight against the moments f(n)!");
    add_common(momentsCmd, common);
    momentsCmd->add_option("--weight", weightArg, "Weight expression in x, or builtin:NAME")->required();
    momentsCmd->add_option("--n-max", nMax, "Largest moment (default 20)");
    momentsCmd->add_option("--tol", tol, "Relative tolerance (default 1e-6)");

    try {
        std::vector<std::string> reversed(argv.rbegin(), argv.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        const Format fmt = parse_format(common.format);
        const Config cfg = resolve_config(common);
        Output result;
        if (structure->parsed()) {
            result = cmd_structure(cfg, nMax >= 0 ? nMax : 10, fmt);
        } else if (certifyCmd->parsed()) {
            const int D = dim >= 0 ? dim : cfg.overrides.certDim.value_or(32);
            result = cmd_certify(cfg, D, tol.value_or(cfg.overrides.certTol.value_or(1e-10)), fmt);
        } else if (coherentCmd->parsed()) {
            complex z;
            try {
                z = parse_complex(zText);
            } catch (const Error& e) {
                throw ConfigError(std::string("--z: ") + e.what());
            }
            if (scan < 0) throw ConfigError("--scan must be >= 0");
            result = cmd_coherent(cfg, z, tol.value_or(cfg.overrides.tailTol.value_or(1e-14)), scan, fmt);
        } else {
            result = cmd_moments(cfg, weightArg, nMax >= 0 ? nMax : 20, tol.value_or(cfg.overrides.momentTol.value_or(1e-6)),
                                 fmt);
        }

        if (!common.outPath.empty()) {
            std::ofstream file(common.outPath, std::ios::binary);
            if (!file) throw ConfigError("cannot write '" + common.outPath + "'");
            file << result.text;
        } else {
            out << result.text;
        }
        return result.exit;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    } catch (const EvalError& e) {
        err << "error: " << e.what() << '\n';
        return kEvaluationError;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kEvaluationError;
    } catch (const OverflowError& e) {
        err << "error: " << e.what() << '\n';
        return kEvaluationError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

} // namespace qdeform::cli
