// Command-line front end; all domain work goes through the shared C API.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "delaydirac.h"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& out_path, const char* body) {
    if (out_path.empty()) {
        std::fputs(body, stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "cannot write file: %s\n", out_path.c_str());
        std::exit(1);
    }
    out << body;
}

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string engine;
    int m = 0;
    int g = 0;
    double tol = 0.0;
    bool has_m = false, has_g = false, has_tol = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_path, "output path (stdout when omitted)");
    cmd->add_option("--engine", args.engine, "evaluator engine: solver | series");
    cmd->add_option("--m", args.m, "steps per delay interval")
        ->each([&](const std::string&) { args.has_m = true; });
    cmd->add_option("--g", args.g, "quadrature order per panel")
        ->each([&](const std::string&) { args.has_g = true; });
    cmd->add_option("--tol", args.tol, "refinement tolerance")
        ->each([&](const std::string&) { args.has_tol = true; });
}

std::string overrides_json(const CommonArgs& args) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    auto sep = [&] {
        if (!first) os << ',';
        first = false;
    };
    if (!args.engine.empty()) {
        sep();
        os << "\"engine\":\"" << args.engine << '"';
    }
    if (args.has_m) {
        sep();
        os << "\"m\":" << args.m;
    }
    if (args.has_g) {
        sep();
        os << "\"g\":" << args.g;
    }
    if (args.has_tol) {
        sep();
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", args.tol);
        os << "\"tol\":" << buf;
    }
    os << '}';
    return os.str();
}

int report_failure(int status) {
    std::fprintf(stderr, "error (%s): %s\n", dd_status_name(status), dd_last_error());
    return status == DD_ERR_FLAGGED ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forward and inverse spectral computations for Dirac-type systems "
                 "with a constant delay"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dd_version()));

    CommonArgs charfn_args, spectrum_args, iso_args, amb_args, had_args, trace_args, asym_args;
    std::string spectrum_path;

    add_common(app.add_subcommand("charfn", "characteristic-function table (CSV)"), charfn_args);
    add_common(app.add_subcommand("spectrum", "locate eigenvalues (JSON)"), spectrum_args);
    CLI::App* iso = app.add_subcommand("iso", "build and verify an iso-bispectral family (JSON)");
    add_common(iso, iso_args);
    std::string potentials_path;
    iso->add_option("--potentials-out", potentials_path,
                    "also write the built family potentials as CSV");
    add_common(app.add_subcommand("ambarzumian",
                                  "residuals against the unperturbed spectra plus window "
                                  "transforms (JSON)"),
               amb_args);
    CLI::App* had = app.add_subcommand(
        "hadamard", "reconstruct a characteristic function from a spectrum file (CSV)");
    add_common(had, had_args);
    had->add_option("--spectrum", spectrum_path, "spectrum JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(app.add_subcommand("trace", "fundamental-solution trace (CSV)"), trace_args);
    add_common(app.add_subcommand("asymfit", "remainder growth fit along the imaginary ray (CSV)"),
               asym_args);

    CLI11_PARSE(app, argc, argv);

    try {
        char* body = nullptr;
        char* summary = nullptr;
        int status = DD_OK;
        int exit_code = 0;
        const CommonArgs* args = nullptr;

        if (app.got_subcommand("charfn")) {
            args = &charfn_args;
            status = dd_run_charfn(read_file(args->config_path).c_str(),
                                   overrides_json(*args).c_str(), &body);
        } else if (app.got_subcommand("spectrum")) {
            args = &spectrum_args;
            status = dd_run_spectrum(read_file(args->config_path).c_str(),
                                     overrides_json(*args).c_str(), &body, &exit_code);
        } else if (app.got_subcommand("iso")) {
            args = &iso_args;
            char* pots = nullptr;
            std::string over = overrides_json(*args);
            if (!potentials_path.empty()) {
                // request the attachment through the config override
                over.insert(over.size() - 1,
                            std::string(over.size() > 2 ? "," : "") + "\"emit_potentials\":true");
            }
            status = dd_run_iso(read_file(args->config_path).c_str(), over.c_str(), &body, &pots);
            if (status == DD_OK && !potentials_path.empty()) {
                write_output(potentials_path, pots);
            }
            dd_string_free(pots);
        } else if (app.got_subcommand("ambarzumian")) {
            args = &amb_args;
            status = dd_run_ambarzumian(read_file(args->config_path).c_str(),
                                        overrides_json(*args).c_str(), &body);
        } else if (app.got_subcommand("hadamard")) {
            args = &had_args;
            status = dd_run_hadamard(read_file(args->config_path).c_str(),
                                     overrides_json(*args).c_str(),
                                     read_file(spectrum_path).c_str(), &body);
        } else if (app.got_subcommand("trace")) {
            args = &trace_args;
            status = dd_run_trace(read_file(args->config_path).c_str(),
                                  overrides_json(*args).c_str(), &body);
        } else if (app.got_subcommand("asymfit")) {
            args = &asym_args;
            status = dd_run_asymfit(read_file(args->config_path).c_str(),
                                    overrides_json(*args).c_str(), &body, &summary);
        }

        if (status != DD_OK) return report_failure(status);
        write_output(args->out_path, body);
        if (summary && summary[0]) std::fprintf(stdout, "%s\n", summary);
        dd_string_free(body);
        dd_string_free(summary);
        return exit_code;
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
