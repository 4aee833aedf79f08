/* C interface to the delay Dirac spectral library.
 *
 * All functions return a dd_status code (DD_OK on success); the message for
 * the most recent failure on the calling thread is available through
 * dd_last_error().  Objects are opaque handles released with the matching
 * _destroy call; strings returned through char** are heap blocks released
 * with dd_string_free.
 */
#ifndef DELAYDIRAC_H
#define DELAYDIRAC_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DD_API __declspec(dllexport)
#else
#define DD_API __attribute__((visibility("default")))
#endif

typedef struct dd_model dd_model;
typedef struct dd_spectrum dd_spectrum;

enum dd_status {
    DD_OK = 0,
    DD_ERR_INVALID_ARGUMENT = 1,
    DD_ERR_PARSE = 2,
    DD_ERR_DOMAIN = 3,
    DD_ERR_NUMERIC = 4,
    DD_ERR_UNSUPPORTED = 5,
    DD_ERR_FLAGGED = 6,
    DD_ERR_NOT_FOUND = 7,
    DD_ERR_INTERNAL = 8
};

enum dd_engine { DD_ENGINE_SOLVER = 0, DD_ENGINE_SERIES = 1 };

DD_API const char* dd_version(void);
DD_API const char* dd_status_name(int status);
DD_API const char* dd_last_error(void);
DD_API void dd_string_free(char* s);

/* --- model: delay + potentials, from {"a": ..., "potential": {...}} --- */
DD_API int dd_model_create_json(const char* config_json, dd_model** out);
DD_API void dd_model_destroy(dd_model* m);
DD_API int dd_model_delay(const dd_model* m, double* a, int* bracket_index);
DD_API int dd_model_eval_potential(const dd_model* m, double x, double p_out[2], double q_out[2]);

/* characteristic functions (Delta_1, Delta_2) at lambda = re + i im */
DD_API int dd_model_charfn(const dd_model* m, double lambda_re, double lambda_im, int engine,
                           double d1_out[2], double d2_out[2]);

/* eigenvalue localisation near the asymptotic centers */
DD_API int dd_model_spectrum(const dd_model* m, int j, int n_max, dd_spectrum** out);

/* --- spectra --- */
DD_API int dd_spectrum_from_json(const char* json_text, dd_spectrum** out);
DD_API int dd_spectrum_to_json(const dd_spectrum* s, char** json_out);
DD_API int dd_spectrum_info(const dd_spectrum* s, int* j, int* n_max, int* flagged_count);
DD_API int dd_spectrum_entry(const dd_spectrum* s, int n, double value_out[2], int* flagged);
DD_API int dd_spectrum_hadamard(const dd_spectrum* s, double lambda_re, double lambda_im,
                                double value_out[2]);
DD_API int dd_spectrum_ambarzumian_residual(const dd_spectrum* s, double* residual_out);
DD_API void dd_spectrum_destroy(dd_spectrum* s);

/* --- command layer: config document in, result document out ---
 * overrides_json may be NULL; recognized keys: engine, m, g, tol.
 * exit_code_out (when non-NULL) receives the CLI exit contract value
 * (0 clean, 2 numerical flag). */
DD_API int dd_run_charfn(const char* config_json, const char* overrides_json, char** csv_out);
DD_API int dd_run_spectrum(const char* config_json, const char* overrides_json, char** json_out,
                           int* exit_code_out);
DD_API int dd_run_iso(const char* config_json, const char* overrides_json, char** json_out,
                      char** potentials_csv_out /* may be NULL; empty unless requested */);
DD_API int dd_run_ambarzumian(const char* config_json, const char* overrides_json,
                              char** json_out);
DD_API int dd_run_hadamard(const char* config_json, const char* overrides_json,
                           const char* spectrum_json, char** csv_out);
DD_API int dd_run_trace(const char* config_json, const char* overrides_json, char** csv_out);
DD_API int dd_run_asymfit(const char* config_json, const char* overrides_json, char** csv_out,
                          char** summary_out);

#ifdef __cplusplus
}
#endif

#endif
