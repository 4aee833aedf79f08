#include "delaydirac/runner.hpp"

#include <algorithm>
#include <charconv>
#include <memory>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "delaydirac/charfn.hpp"
#include "delaydirac/isofamily.hpp"
#include "delaydirac/series.hpp"
#include "delaydirac/solver.hpp"
#include "delaydirac/spectrum.hpp"

namespace dd {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(Errc::parse, "config field '" + where + "': " + what);
}

json parse_text(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error(Errc::parse, std::string(what) + " is not valid JSON");
    return j;
}

double get_real(const json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where, "expected a number");
    return j.get<double>();
}

cplx get_complex(const json& j, const std::string& where) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    parse_fail(where, "expected a number or an [re, im] pair");
}

/// Shortest round-trip decimal form; keeps output files byte-stable.
std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

Segment parse_segment(const json& j, const std::string& where) {
    if (!j.is_object()) parse_fail(where, "expected a segment object");
    if (!j.contains("from") || !j.contains("to")) parse_fail(where, "needs 'from' and 'to'");
    const double x0 = get_real(j.at("from"), where + ".from");
    const double x1 = get_real(j.at("to"), where + ".to");
    const std::string shape = j.value("shape", "constant");
    if (shape == "zero") return Segment::zero(x0, x1);
    if (shape == "constant") {
        if (!j.contains("value")) parse_fail(where, "constant segment needs 'value'");
        return Segment::constant(x0, x1, get_complex(j.at("value"), where + ".value"));
    }
    if (shape == "cosine") {
        if (!j.contains("amplitude") || !j.contains("angular_frequency"))
            parse_fail(where, "cosine segment needs 'amplitude' and 'angular_frequency'");
        return Segment::cosine(x0, x1, get_complex(j.at("amplitude"), where + ".amplitude"),
                               get_real(j.at("angular_frequency"), where + ".angular_frequency"),
                               j.contains("phase") ? get_real(j.at("phase"), where + ".phase")
                                                   : 0.0,
                               j.contains("offset")
                                   ? get_complex(j.at("offset"), where + ".offset")
                                   : cplx{});
    }
    if (shape == "samples") {
        if (!j.contains("values") || !j.at("values").is_array())
            parse_fail(where, "samples segment needs a 'values' array");
        std::vector<cplx> vals;
        for (std::size_t i = 0; i < j.at("values").size(); ++i)
            vals.push_back(get_complex(j.at("values")[i], where + ".values"));
        return Segment::sampled(x0, x1, std::move(vals));
    }
    parse_fail(where + ".shape", "unknown shape '" + shape + "'");
}

PiecewiseFunction parse_piecewise(const json& j, const std::string& where) {
    if (j.is_null()) return PiecewiseFunction::zero();
    if (!j.is_array()) parse_fail(where, "expected an array of segments");
    std::vector<Segment> parts;
    for (std::size_t i = 0; i < j.size(); ++i)
        parts.push_back(parse_segment(j[i], where + "[" + std::to_string(i) + "]"));
    return PiecewiseFunction::from_parts(std::move(parts));
}

struct ParsedConfig {
    Model model;
    json command;  // may be null
    bool has_potential = false;
};

ParsedConfig parse_config(const std::string& text, const std::string& overrides_text) {
    const json root = parse_text(text, "config");
    if (!root.is_object()) throw Error(Errc::parse, "config must be a JSON object");
    if (!root.contains("a")) parse_fail("a", "missing delay");
    ParsedConfig out;
    out.model.cfg = make_delay_config(get_real(root.at("a"), "a"));
    if (root.contains("potential")) {
        const json& pot = root.at("potential");
        if (!pot.is_object()) parse_fail("potential", "expected an object");
        out.model.potentials.p = parse_piecewise(pot.value("p", json()), "potential.p");
        out.model.potentials.q = parse_piecewise(pot.value("q", json()), "potential.q");
        out.has_potential = true;
    }
    validate_potentials(out.model.potentials, out.model.cfg);
    out.command = root.value("command", json::object());
    if (!out.command.is_object()) parse_fail("command", "expected an object");
    if (!overrides_text.empty()) {
        const json over = parse_text(overrides_text, "overrides");
        if (!over.is_object()) throw Error(Errc::parse, "overrides must be a JSON object");
        for (auto it = over.begin(); it != over.end(); ++it) out.command[it.key()] = it.value();
    }
    return out;
}

std::vector<cplx> parse_lambda_grid(const json& cmd, const std::string& fallback_desc,
                                    double def_min, double def_max, int def_count) {
    std::vector<cplx> grid;
    if (cmd.contains("lambda_list")) {
        const json& l = cmd.at("lambda_list");
        if (!l.is_array()) parse_fail("lambda_list", "expected an array");
        for (std::size_t i = 0; i < l.size(); ++i)
            grid.push_back(get_complex(l[i], "lambda_list"));
        if (grid.empty()) parse_fail("lambda_list", "must not be empty");
        return grid;
    }
    double lo = def_min, hi = def_max;
    int count = def_count;
    if (cmd.contains("lambda_grid")) {
        const json& g = cmd.at("lambda_grid");
        if (!g.is_object()) parse_fail("lambda_grid", "expected {min, max, count}");
        lo = get_real(g.value("min", json(def_min)), "lambda_grid.min");
        hi = get_real(g.value("max", json(def_max)), "lambda_grid.max");
        count = g.value("count", def_count);
    } else if (!fallback_desc.empty() && fallback_desc == "require") {
        parse_fail("lambda_grid", "missing (give lambda_grid or lambda_list)");
    }
    if (count < 1) parse_fail("lambda_grid.count", "must be positive");
    if (count == 1) {
        grid.push_back(cplx(lo));
        return grid;
    }
    for (int i = 0; i < count; ++i)
        grid.push_back(cplx(lo + (hi - lo) * i / (count - 1)));
    return grid;
}

enum class Engine { solver, series };

Engine parse_engine(const json& cmd) {
    const std::string e = cmd.value("engine", "solver");
    if (e == "solver") return Engine::solver;
    if (e == "series") return Engine::series;
    parse_fail("engine", "expected 'solver' or 'series'");
}

AdaptiveOptions parse_adaptive(const json& cmd) {
    AdaptiveOptions opts;
    if (cmd.contains("m")) opts.m_start = cmd.at("m").get<int>();
    if (cmd.contains("m_cap")) opts.m_cap = cmd.at("m_cap").get<int>();
    if (cmd.contains("tol")) opts.tol = get_real(cmd.at("tol"), "tol");
    opts.m_cap = std::max(opts.m_cap, opts.m_start);
    return opts;
}

SeriesOptions parse_series_opts(const json& cmd) {
    SeriesOptions opts;
    if (cmd.contains("g")) opts.g = cmd.at("g").get<int>();
    return opts;
}

DeltaFn make_delta_fn(const Model& model, Engine engine, const json& cmd, int j) {
    if (engine == Engine::series) {
        const SeriesOptions sopts = parse_series_opts(cmd);
        const int K = cmd.value("series_k", 3);
        auto fine = [model, sopts, K, j](cplx z) {
            auto r = series_charfn(model.potentials, model.cfg, z, K, sopts);
            return j == 1 ? r.delta1 : r.delta2;
        };
        return DeltaFn{fine, {}};
    }
    auto eval = std::make_shared<AdaptiveCharfn>(model.potentials, model.cfg, parse_adaptive(cmd));
    DeltaFn fn;
    fn.fine = [eval, j](cplx z) { return (*eval)(z)[static_cast<std::size_t>(j - 1)]; };
    const int coarse_m = 256;
    fn.coarse = [eval, j, coarse_m](cplx z) {
        return eval->eval_fixed(z, coarse_m)[static_cast<std::size_t>(j - 1)];
    };
    return fn;
}

const char* flag_name(EntryFlag f) {
    switch (f) {
        case EntryFlag::ok: return "ok";
        case EntryFlag::drift: return "drift";
        case EntryFlag::multiple: return "multiple";
        case EntryFlag::no_convergence: return "no_convergence";
    }
    return "unknown";
}

EntryFlag flag_from_name(const std::string& s) {
    if (s == "ok") return EntryFlag::ok;
    if (s == "drift") return EntryFlag::drift;
    if (s == "multiple") return EntryFlag::multiple;
    if (s == "no_convergence") return EntryFlag::no_convergence;
    throw Error(Errc::parse, "unknown spectrum entry flag '" + s + "'");
}

json spectrum_json(const Spectrum& spec) {
    json out;
    out["j"] = spec.j();
    out["n_max"] = spec.n_max();
    json entries = json::array();
    for (int n = -spec.n_max(); n <= spec.n_max(); ++n) {
        const SpectrumEntry& e = spec.at(n);
        json row;
        row["n"] = n;
        row["re"] = e.value.real();
        row["im"] = e.value.imag();
        if (e.flag != EntryFlag::ok) row["flag"] = flag_name(e.flag);
        entries.push_back(row);
    }
    out["entries"] = entries;
    return out;
}

RootSearchOptions parse_root_opts(const json& cmd) {
    RootSearchOptions opts;
    if (cmd.contains("disk_radius")) opts.disk_radius = get_real(cmd.at("disk_radius"), "disk_radius");
    if (cmd.contains("newton_tol")) opts.newton_tol = get_real(cmd.at("newton_tol"), "newton_tol");
    if (cmd.contains("contour_points")) opts.contour_points = cmd.at("contour_points").get<int>();
    return opts;
}

FamilyMode parse_mode(const json& cmd) {
    const std::string m = cmd.value("mode", "");
    if (m == "p_only") return FamilyMode::p_only;
    if (m == "q_only") return FamilyMode::q_only;
    if (m == "both") return FamilyMode::both;
    parse_fail("mode", "expected 'p_only', 'q_only' or 'both'");
}

json scalar_json(cplx z) {
    if (z.imag() == 0.0) return json(z.real());
    return cplx_json(z);
}

/// Inverse of parse_segment; keeps iso reports replayable as configs.
json segments_json(const PiecewiseFunction& f) {
    json out = json::array();
    for (const Segment& s : f.segments()) {
        if (s.is_zero_shape()) continue;
        json seg;
        seg["from"] = s.x0;
        seg["to"] = s.x1;
        switch (s.kind) {
            case ShapeKind::zero:
                seg["shape"] = "zero";
                break;
            case ShapeKind::constant:
                seg["shape"] = "constant";
                seg["value"] = scalar_json(s.value);
                break;
            case ShapeKind::cosine:
                seg["shape"] = "cosine";
                seg["amplitude"] = scalar_json(s.amplitude);
                seg["angular_frequency"] = s.angular_frequency;
                seg["phase"] = s.phase;
                if (s.offset != cplx(0.0)) seg["offset"] = scalar_json(s.offset);
                break;
            case ShapeKind::samples: {
                seg["shape"] = "samples";
                json vals = json::array();
                for (const cplx& v : s.samples) vals.push_back(scalar_json(v));
                seg["values"] = vals;
                break;
            }
        }
        out.push_back(seg);
    }
    return out;
}

}  // namespace

Model parse_model(const std::string& json_text) {
    return parse_config(json_text, "").model;
}

Spectrum spectrum_from_json(const std::string& json_text) {
    const json root = parse_text(json_text, "spectrum");
    if (!root.is_object() || !root.contains("j") || !root.contains("n_max") ||
        !root.contains("entries"))
        throw Error(Errc::parse, "spectrum document needs j, n_max and entries");
    Spectrum spec(root.at("j").get<int>(), root.at("n_max").get<int>());
    const json& entries = root.at("entries");
    if (!entries.is_array()) throw Error(Errc::parse, "spectrum entries must be an array");
    std::vector<bool> seen(2 * static_cast<std::size_t>(spec.n_max()) + 1, false);
    for (const json& row : entries) {
        const int n = row.at("n").get<int>();
        if (n < -spec.n_max() || n > spec.n_max())
            throw Error(Errc::parse, "spectrum entry index out of range");
        SpectrumEntry e;
        e.value = cplx(row.at("re").get<double>(), row.at("im").get<double>());
        if (row.contains("flag")) e.flag = flag_from_name(row.at("flag").get<std::string>());
        spec.at(n) = e;
        seen[static_cast<std::size_t>(n + spec.n_max())] = true;
    }
    for (bool b : seen)
        if (!b) throw Error(Errc::parse, "spectrum document misses entries");
    return spec;
}

std::string spectrum_to_json(const Spectrum& spec) { return spectrum_json(spec).dump(2) + "\n"; }

CommandOutput run_charfn(const std::string& config_json, const std::string& overrides_json) {
    ParsedConfig cfg = parse_config(config_json, overrides_json);
    const auto grid = parse_lambda_grid(cfg.command, "", -20.0, 20.0, 81);
    const Engine engine = parse_engine(cfg.command);

    std::ostringstream os;
    os << "re_lambda,im_lambda,re_d1,im_d1,re_d2,im_d2\n";
    if (engine == Engine::solver) {
        const SolverOptions sopts{cfg.command.value("m", 64)};
        CharfnTable table = charfn_table(cfg.model.potentials, cfg.model.cfg, grid, sopts);
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << num(grid[i].real()) << ',' << num(grid[i].imag()) << ','
               << num(table.delta1[i].real()) << ',' << num(table.delta1[i].imag()) << ','
               << num(table.delta2[i].real()) << ',' << num(table.delta2[i].imag()) << '\n';
    } else {
        const SeriesOptions sopts = parse_series_opts(cfg.command);
        const int K = cfg.command.value("series_k", 3);
        for (cplx lam : grid) {
            auto r = series_charfn(cfg.model.potentials, cfg.model.cfg, lam, K, sopts);
            os << num(lam.real()) << ',' << num(lam.imag()) << ',' << num(r.delta1.real()) << ','
               << num(r.delta1.imag()) << ',' << num(r.delta2.real()) << ','
               << num(r.delta2.imag()) << '\n';
        }
    }
    return CommandOutput{os.str(), "", 0};
}

CommandOutput run_spectrum(const std::string& config_json, const std::string& overrides_json) {
    ParsedConfig cfg = parse_config(config_json, overrides_json);
    const int j = cfg.command.value("j", 1);
    const int n_max = cfg.command.value("n_max", 10);
    const Engine engine = parse_engine(cfg.command);
    DeltaFn fn = make_delta_fn(cfg.model, engine, cfg.command, j);
    Spectrum spec = locate_eigenvalues(fn, j, n_max, parse_root_opts(cfg.command));
    CommandOutput out;
    out.body = spectrum_to_json(spec);
    out.exit_code = spec.complete() ? 0 : 2;
    out.summary = "flagged_entries=" + std::to_string(spec.flagged_count());
    return out;
}

CommandOutput run_iso(const std::string& config_json, const std::string& overrides_json) {
    ParsedConfig cfg = parse_config(config_json, overrides_json);
    const json& cmd = cfg.command;
    const FamilyMode mode = parse_mode(cmd);
    const DelayConfig& dc = cfg.model.cfg;

    IsoOptions iopts;
    if (cmd.contains("nystrom_m")) iopts.nystrom_m = cmd.at("nystrom_m").get<int>();
    iopts.solver = parse_adaptive(cmd);

    PiecewiseFunction h;
    json tuned_info;
    if (cmd.contains("tune")) {
        const json& t = cmd.at("tune");
        auto h0 = parse_piecewise(t.value("h0", json()), "tune.h0");
        auto h1 = parse_piecewise(t.value("h1", json()), "tune.h1");
        const double lo = get_real(t.value("theta_min", json(-4.0)), "tune.theta_min");
        const double hi = get_real(t.value("theta_max", json(0.0)), "tune.theta_max");
        TuneResult tr = tune_h_for_pair(h0, h1, lo, hi, dc, iopts);
        h = tr.h;
        tuned_info["theta"] = tr.theta;
        tuned_info["scale"] = tr.scale;
    } else if (cmd.contains("h")) {
        h = parse_piecewise(cmd.at("h"), "h");
        if (cmd.value("auto_scale", false)) {
            const Segment* seg = nullptr;
            for (const Segment& s : h.segments())
                if (!s.is_zero_shape()) seg = &s;
            if (!seg || seg->kind != ShapeKind::constant)
                parse_fail("auto_scale", "only constant kernels can be auto-scaled");
            const double c = seg->value.real();
            if (c == 0.0) parse_fail("h", "kernel constant must be nonzero");
            const double target =
                (mode == FamilyMode::q_only ? kPi : 3.0 * kPi) / dc.a;
            h = combine_scaled(h, PiecewiseFunction::zero(), 0.0, target / c);
        }
    } else {
        parse_fail("h", "iso command needs 'h' segments or a 'tune' block");
    }

    std::vector<std::pair<cplx, cplx>> params;
    if (cmd.contains("samples")) {
        const json& s = cmd.at("samples");
        if (!s.is_array()) parse_fail("samples", "expected an array of [alpha, beta] pairs");
        for (const json& row : s) {
            if (!row.is_array() || row.size() != 2)
                parse_fail("samples", "each sample is [alpha, beta]");
            params.emplace_back(get_complex(row[0], "samples.alpha"),
                                get_complex(row[1], "samples.beta"));
        }
    } else {
        switch (mode) {
            case FamilyMode::p_only:
                params = {{cplx(0.0), cplx(0.0)}, {cplx(1.0), cplx(0.0)}, {cplx(5.0), cplx(0.0)}};
                break;
            case FamilyMode::q_only:
                params = {{cplx(0.0), cplx(0.0)}, {cplx(0.0), cplx(1.0)}, {cplx(0.0), cplx(3.0)}};
                break;
            case FamilyMode::both:
                params = {{cplx(1.0), cplx(1.0)}, {cplx(2.0), cplx(-1.0)}, {cplx(0.0), cplx(0.0)}};
                break;
        }
    }

    const double tol = cmd.contains("tol") ? get_real(cmd.at("tol"), "tol")
                                           : (mode == FamilyMode::both ? 1e-5 : 1e-6);
    const auto grid = parse_lambda_grid(cmd, "", -15.0, 15.0, 31);
    IsoVerifyReport rep = verify_isospectrality(h, dc, mode, params, grid, tol, iopts);

    // one build for the eigenpair metadata echoed in the report
    FamilyBuild fam = build_family(dc, h, mode, params[0].first, params[0].second, iopts);

    json out;
    out["a"] = dc.a;
    out["mode"] = cmd.at("mode");
    out["tol"] = tol;
    out["h"] = segments_json(h);  // the report replays as a config
    json grid_json = json::array();
    for (cplx lam : grid) grid_json.push_back(scalar_json(lam));
    out["lambda_grid"] = grid_json;
    out["analytic_eigenfunctions"] = fam.spec.analytic_eigenfunctions;
    if (!tuned_info.is_null()) out["tuned"] = tuned_info;
    json eig;
    if (fam.spec.pair_minus) {
        eig["minus"] = {{"mu", fam.spec.pair_minus->mu},
                        {"residual", fam.spec.pair_minus->residual}};
    }
    if (fam.spec.pair_plus) {
        eig["plus"] = {{"mu", fam.spec.pair_plus->mu},
                       {"residual", fam.spec.pair_plus->residual}};
    }
    out["eigenpairs"] = eig;
    json rows = json::array();
    for (const auto& s : rep.samples) {
        json row;
        row["alpha"] = cplx_json(s.alpha);
        row["beta"] = cplx_json(s.beta);
        row["max_dev_solver"] = s.max_dev_solver;
        row["max_dev_series"] = s.max_dev_series;
        row["pass"] = s.pass;
        rows.push_back(row);
    }
    out["samples"] = rows;
    out["all_pass"] = rep.all_pass;

    CommandOutput res;
    res.body = out.dump(2) + "\n";
    res.summary = rep.all_pass ? "all samples pass" : "deviations exceed tol";
    if (cmd.value("emit_potentials", false)) {
        std::ostringstream os;
        os << "sample,re_alpha,im_alpha,re_beta,im_beta,x,re_p,im_p,re_q,im_q\n";
        for (std::size_t s = 0; s < params.size(); ++s) {
            FamilyBuild member =
                build_family(dc, h, mode, params[s].first, params[s].second, iopts);
            for (int i = 0; i <= 640; ++i) {
                const double x = kPi * i / 640.0;
                const auto [p, q] = eval_potential(member.potentials, x);
                os << s << ',' << num(params[s].first.real()) << ','
                   << num(params[s].first.imag()) << ',' << num(params[s].second.real()) << ','
                   << num(params[s].second.imag()) << ',' << num(x) << ',' << num(p.real())
                   << ',' << num(p.imag()) << ',' << num(q.real()) << ',' << num(q.imag())
                   << '\n';
            }
        }
        res.attachment = os.str();
    }
    return res;
}

CommandOutput run_ambarzumian(const std::string& config_json, const std::string& overrides_json) {
    ParsedConfig cfg = parse_config(config_json, overrides_json);
    const json& cmd = cfg.command;
    const int n_max = cmd.value("n_max", 10);
    const DelayConfig& dc = cfg.model.cfg;

    json out;
    out["a"] = dc.a;
    out["n_max"] = n_max;
    out["regime_warning"] = !(dc.a < 0.4 * kPi);

    const PotentialPair zero;
    for (int j : {1, 2}) {
        DeltaFn fn = make_delta_fn(cfg.model, Engine::solver, cmd, j);
        Spectrum spec = locate_eigenvalues(fn, j, n_max, parse_root_opts(cmd));
        if (!spec.complete())
            throw Error(Errc::flagged,
                        "spectrum j=" + std::to_string(j) +
                            " has flagged entries; residual undefined");
        Model base{dc, zero};
        DeltaFn base_fn = make_delta_fn(base, Engine::solver, cmd, j);
        Spectrum base_spec = locate_eigenvalues(base_fn, j, n_max, parse_root_opts(cmd));
        const std::string key = "j" + std::to_string(j);
        out["residual_" + key] = ambarzumian_residual(spec);
        out["baseline_" + key] = ambarzumian_residual(base_spec);
    }

    if (cmd.contains("windows")) {
        const json& w = cmd.at("windows");
        if (!w.is_array()) parse_fail("windows", "expected an array");
        json rows = json::array();
        for (const json& row : w) {
            const int nu = row.at("nu").get<int>();
            const cplx lam = get_complex(row.at("lambda"), "windows.lambda");
            WindowTransforms wt = window_transforms(cfg.model.potentials, dc, nu, lam);
            json r;
            r["nu"] = nu;
            r["lambda"] = cplx_json(lam);
            r["F"] = cplx_json(wt.F);
            r["G"] = cplx_json(wt.G);
            rows.push_back(r);
        }
        out["windows"] = rows;
    }

    CommandOutput res;
    res.body = out.dump(2) + "\n";
    return res;
}

CommandOutput run_hadamard(const std::string& config_json, const std::string& overrides_json,
                           const std::string& spectrum_json_text) {
    ParsedConfig cfg = parse_config(config_json, overrides_json);
    const Spectrum spec = spectrum_from_json(spectrum_json_text);
    if (!spec.complete())
        throw Error(Errc::flagged, "spectrum document carries flagged entries");

    const auto grid = parse_lambda_grid(cfg.command, "", -3.0, 3.0, 61);
    const bool with_direct = cfg.has_potential;
    std::ostringstream os;
    os << (with_direct ? "lambda,re_reconstructed,re_direct,abs_error\n"
                       : "lambda,re_reconstructed\n");
    AdaptiveCharfn direct(cfg.model.potentials, cfg.model.cfg, parse_adaptive(cfg.command));
    for (cplx lam : grid) {
        const cplx recon = hadamard_delta(spec, lam);
        os << num(lam.real()) << ',' << num(recon.real());
        if (with_direct) {
            const cplx d = direct(lam)[static_cast<std::size_t>(spec.j() - 1)];
            os << ',' << num(d.real()) << ',' << num(std::abs(recon - d));
        }
        os << '\n';
    }
    return CommandOutput{os.str(), "", 0};
}

CommandOutput run_trace(const std::string& config_json, const std::string& overrides_json) {
    ParsedConfig cfg = parse_config(config_json, overrides_json);
    const cplx lam = cfg.command.contains("lambda")
                         ? get_complex(cfg.command.at("lambda"), "lambda")
                         : cplx(1.0, 0.0);
    const SolverOptions sopts{cfg.command.value("m", 64)};
    const SolutionTrace tr = evolve_fundamental(cfg.model.potentials, cfg.model.cfg, lam, sopts);
    std::ostringstream os;
    os << "x,re_s1,im_s1,re_s2,im_s2\n";
    for (std::size_t i = 0; i < tr.x.size(); ++i)
        os << num(tr.x[i]) << ',' << num(tr.values[i][0].real()) << ','
           << num(tr.values[i][0].imag()) << ',' << num(tr.values[i][1].real()) << ','
           << num(tr.values[i][1].imag()) << '\n';
    return CommandOutput{os.str(), "", 0};
}

CommandOutput run_asymfit(const std::string& config_json, const std::string& overrides_json) {
    ParsedConfig cfg = parse_config(config_json, overrides_json);
    RemainderFitOptions opts;
    opts.t_lo = get_real(cfg.command.value("t_min", json(2.0)), "t_min");
    opts.t_hi = get_real(cfg.command.value("t_max", json(12.0)), "t_max");
    opts.count = cfg.command.value("count", 21);
    const std::string engine = cfg.command.value("engine", "auto");
    if (engine == "series")
        opts.engine = RemainderFitOptions::Engine::series;
    else if (engine == "solver")
        opts.engine = RemainderFitOptions::Engine::solver;
    else if (engine != "auto")
        parse_fail("engine", "expected 'auto', 'series' or 'solver'");
    opts.solver_opts = parse_adaptive(cfg.command);

    AsymptoticFit fit = asymptotic_remainder_fit(cfg.model.potentials, cfg.model.cfg, opts);
    std::ostringstream os;
    os << "t,log_abs_r\n";
    for (const auto& [t, lr] : fit.samples) os << num(t) << ',' << num(lr) << '\n';
    CommandOutput out;
    out.body = os.str();
    std::ostringstream sm;
    sm << "fitted_slope=" << num(fit.fitted_slope) << " target_slope=" << num(fit.target_slope)
       << " degenerate=" << (fit.degenerate ? "true" : "false");
    out.summary = sm.str();
    return out;
}

}  // namespace dd
