#include "delaydirac.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "delaydirac/runner.hpp"
#include "delaydirac/series.hpp"
#include "delaydirac/solver.hpp"
#include "delaydirac/spectrum.hpp"

struct dd_model {
    dd::Model model;
};

struct dd_spectrum {
    dd::Spectrum spec;
};

namespace {

thread_local std::string g_last_error;

int status_of(dd::Errc code) {
    switch (code) {
        case dd::Errc::invalid_argument: return DD_ERR_INVALID_ARGUMENT;
        case dd::Errc::parse: return DD_ERR_PARSE;
        case dd::Errc::domain: return DD_ERR_DOMAIN;
        case dd::Errc::numeric: return DD_ERR_NUMERIC;
        case dd::Errc::unsupported: return DD_ERR_UNSUPPORTED;
        case dd::Errc::flagged: return DD_ERR_FLAGGED;
        case dd::Errc::not_found: return DD_ERR_NOT_FOUND;
    }
    return DD_ERR_INTERNAL;
}

int fail(int status, const char* what) {
    g_last_error = what ? what : "";
    return status;
}

/// Runs fn(), translating exceptions into status codes.
template <class Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return DD_OK;
    } catch (const dd::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(DD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(DD_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int require(bool cond, const char* what) {
    if (cond) return DD_OK;
    return fail(DD_ERR_INVALID_ARGUMENT, what);
}

std::string text_or_empty(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

const char* dd_version(void) { return "1.0.0"; }

const char* dd_status_name(int status) {
    switch (status) {
        case DD_OK: return "ok";
        case DD_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case DD_ERR_PARSE: return "parse_error";
        case DD_ERR_DOMAIN: return "domain_error";
        case DD_ERR_NUMERIC: return "numeric_error";
        case DD_ERR_UNSUPPORTED: return "unsupported";
        case DD_ERR_FLAGGED: return "flagged";
        case DD_ERR_NOT_FOUND: return "not_found";
        default: return "internal_error";
    }
}

const char* dd_last_error(void) { return g_last_error.c_str(); }

void dd_string_free(char* s) { delete[] s; }

int dd_model_create_json(const char* config_json, dd_model** out) {
    if (int rc = require(config_json && out, "null argument")) return rc;
    *out = nullptr;
    return guarded([&] {
        auto m = new dd_model{dd::parse_model(config_json)};
        *out = m;
    });
}

void dd_model_destroy(dd_model* m) { delete m; }

int dd_model_delay(const dd_model* m, double* a, int* bracket_index) {
    if (int rc = require(m != nullptr, "null model")) return rc;
    if (a) *a = m->model.cfg.a;
    if (bracket_index) *bracket_index = m->model.cfg.bracket_index;
    return DD_OK;
}

int dd_model_eval_potential(const dd_model* m, double x, double p_out[2], double q_out[2]) {
    if (int rc = require(m && p_out && q_out, "null argument")) return rc;
    return guarded([&] {
        auto [p, q] = dd::eval_potential(m->model.potentials, x);
        p_out[0] = p.real();
        p_out[1] = p.imag();
        q_out[0] = q.real();
        q_out[1] = q.imag();
    });
}

int dd_model_charfn(const dd_model* m, double lambda_re, double lambda_im, int engine,
                    double d1_out[2], double d2_out[2]) {
    if (int rc = require(m && d1_out && d2_out, "null argument")) return rc;
    return guarded([&] {
        const dd::cplx lam(lambda_re, lambda_im);
        dd::cplx d1, d2;
        if (engine == DD_ENGINE_SERIES) {
            auto r = dd::series_charfn(m->model.potentials, m->model.cfg, lam, 3);
            d1 = r.delta1;
            d2 = r.delta2;
        } else {
            dd::AdaptiveCharfn eval(m->model.potentials, m->model.cfg);
            auto r = eval(lam);
            d1 = r[0];
            d2 = r[1];
        }
        d1_out[0] = d1.real();
        d1_out[1] = d1.imag();
        d2_out[0] = d2.real();
        d2_out[1] = d2.imag();
    });
}

int dd_model_spectrum(const dd_model* m, int j, int n_max, dd_spectrum** out) {
    if (int rc = require(m && out, "null argument")) return rc;
    *out = nullptr;
    return guarded([&] {
        auto eval = std::make_shared<dd::AdaptiveCharfn>(m->model.potentials, m->model.cfg);
        dd::DeltaFn fn;
        fn.fine = [eval, j](dd::cplx z) { return (*eval)(z)[static_cast<std::size_t>(j - 1)]; };
        fn.coarse = [eval, j](dd::cplx z) {
            return eval->eval_fixed(z, 256)[static_cast<std::size_t>(j - 1)];
        };
        *out = new dd_spectrum{dd::locate_eigenvalues(fn, j, n_max)};
    });
}

int dd_spectrum_from_json(const char* json_text, dd_spectrum** out) {
    if (int rc = require(json_text && out, "null argument")) return rc;
    *out = nullptr;
    return guarded([&] { *out = new dd_spectrum{dd::spectrum_from_json(json_text)}; });
}

int dd_spectrum_to_json(const dd_spectrum* s, char** json_out) {
    if (int rc = require(s && json_out, "null argument")) return rc;
    return guarded([&] { *json_out = dup_string(dd::spectrum_to_json(s->spec)); });
}

int dd_spectrum_info(const dd_spectrum* s, int* j, int* n_max, int* flagged_count) {
    if (int rc = require(s != nullptr, "null spectrum")) return rc;
    if (j) *j = s->spec.j();
    if (n_max) *n_max = s->spec.n_max();
    if (flagged_count) *flagged_count = s->spec.flagged_count();
    return DD_OK;
}

int dd_spectrum_entry(const dd_spectrum* s, int n, double value_out[2], int* flagged) {
    if (int rc = require(s && value_out, "null argument")) return rc;
    return guarded([&] {
        const dd::SpectrumEntry& e = s->spec.at(n);
        value_out[0] = e.value.real();
        value_out[1] = e.value.imag();
        if (flagged) *flagged = e.flag == dd::EntryFlag::ok ? 0 : 1;
    });
}

int dd_spectrum_hadamard(const dd_spectrum* s, double lambda_re, double lambda_im,
                         double value_out[2]) {
    if (int rc = require(s && value_out, "null argument")) return rc;
    return guarded([&] {
        const dd::cplx v = dd::hadamard_delta(s->spec, dd::cplx(lambda_re, lambda_im));
        value_out[0] = v.real();
        value_out[1] = v.imag();
    });
}

int dd_spectrum_ambarzumian_residual(const dd_spectrum* s, double* residual_out) {
    if (int rc = require(s && residual_out, "null argument")) return rc;
    return guarded([&] { *residual_out = dd::ambarzumian_residual(s->spec); });
}

void dd_spectrum_destroy(dd_spectrum* s) { delete s; }

int dd_run_charfn(const char* config_json, const char* overrides_json, char** csv_out) {
    if (int rc = require(config_json && csv_out, "null argument")) return rc;
    return guarded([&] {
        *csv_out = dup_string(dd::run_charfn(config_json, text_or_empty(overrides_json)).body);
    });
}

int dd_run_spectrum(const char* config_json, const char* overrides_json, char** json_out,
                    int* exit_code_out) {
    if (int rc = require(config_json && json_out, "null argument")) return rc;
    return guarded([&] {
        auto out = dd::run_spectrum(config_json, text_or_empty(overrides_json));
        *json_out = dup_string(out.body);
        if (exit_code_out) *exit_code_out = out.exit_code;
    });
}

int dd_run_iso(const char* config_json, const char* overrides_json, char** json_out,
               char** potentials_csv_out) {
    if (int rc = require(config_json && json_out, "null argument")) return rc;
    return guarded([&] {
        auto out = dd::run_iso(config_json, text_or_empty(overrides_json));
        *json_out = dup_string(out.body);
        if (potentials_csv_out) *potentials_csv_out = dup_string(out.attachment);
    });
}

int dd_run_ambarzumian(const char* config_json, const char* overrides_json, char** json_out) {
    if (int rc = require(config_json && json_out, "null argument")) return rc;
    return guarded([&] {
        *json_out =
            dup_string(dd::run_ambarzumian(config_json, text_or_empty(overrides_json)).body);
    });
}

int dd_run_hadamard(const char* config_json, const char* overrides_json,
                    const char* spectrum_json, char** csv_out) {
    if (int rc = require(config_json && spectrum_json && csv_out, "null argument")) return rc;
    return guarded([&] {
        *csv_out = dup_string(
            dd::run_hadamard(config_json, text_or_empty(overrides_json), spectrum_json).body);
    });
}

int dd_run_trace(const char* config_json, const char* overrides_json, char** csv_out) {
    if (int rc = require(config_json && csv_out, "null argument")) return rc;
    return guarded([&] {
        *csv_out = dup_string(dd::run_trace(config_json, text_or_empty(overrides_json)).body);
    });
}

int dd_run_asymfit(const char* config_json, const char* overrides_json, char** csv_out,
                   char** summary_out) {
    if (int rc = require(config_json && csv_out, "null argument")) return rc;
    return guarded([&] {
        auto out = dd::run_asymfit(config_json, text_or_empty(overrides_json));
        *csv_out = dup_string(out.body);
        if (summary_out) *summary_out = dup_string(out.summary);
    });
}

}  // extern "C"
