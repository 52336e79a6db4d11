/* C interface to the excitation toolkit. All matrices cross the boundary as
 * row-major double arrays; a signal of dimension q and length N is a q x N
 * matrix whose column k is sample k. Strings returned through char** are
 * owned by the caller and released with wfl_string_free. */
#ifndef WFL_WFL_H
#define WFL_WFL_H

#include <stdint.h>

#if defined(_WIN32)
#if defined(WFL_BUILDING)
#define WFL_API __declspec(dllexport)
#else
#define WFL_API __declspec(dllimport)
#endif
#else
#define WFL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  WFL_OK = 0,
  WFL_ERR_INVALID_ARGUMENT = 1, /* bad shapes, malformed documents, null handles */
  WFL_ERR_GENERATION = 2,       /* random instance not found within the attempt budget */
  WFL_ERR_IO = 3,
  WFL_ERR_INTERNAL = 4
} wfl_status;

typedef struct wfl_system wfl_system;
typedef struct wfl_signal wfl_signal;

/* Message for the most recent failure on the calling thread. */
WFL_API const char* wfl_last_error(void);
WFL_API const char* wfl_version(void);
WFL_API void wfl_string_free(char* s);

/* ---- systems ---- */

/* B, C, D must be non-null; A may be null when n == 0. */
WFL_API wfl_status wfl_system_create(int64_t n, int64_t m, int64_t p, const double* A,
                                     const double* B, const double* C, const double* D,
                                     wfl_system** out);
WFL_API wfl_status wfl_system_from_json(const char* json, wfl_system** out);
WFL_API wfl_status wfl_system_to_json(const wfl_system* sys, char** json);
WFL_API wfl_status wfl_system_dims(const wfl_system* sys, int64_t* n, int64_t* m, int64_t* p);
WFL_API void wfl_system_free(wfl_system* sys);

/* Random system; relative_degree 0 keeps a dense D. */
WFL_API wfl_status wfl_generate_system(int64_t n, int64_t m, int64_t p,
                                       double spectral_radius_cap, double controllability_floor,
                                       int require_output_reachable, int64_t relative_degree,
                                       uint64_t seed, wfl_system** out);

/* ---- signals ---- */

WFL_API wfl_status wfl_signal_create(int64_t dim, int64_t length, const double* data,
                                     wfl_signal** out);
WFL_API wfl_status wfl_signal_from_csv(const char* csv, wfl_signal** out);
WFL_API wfl_status wfl_signal_to_csv(const wfl_signal* s, char** csv);
WFL_API wfl_status wfl_signal_dims(const wfl_signal* s, int64_t* dim, int64_t* length);
/* Copies dim * length values into `data` (row-major). */
WFL_API wfl_status wfl_signal_copy_data(const wfl_signal* s, double* data);
WFL_API void wfl_signal_free(wfl_signal* s);

/* Gaussian input scaled so its order-`order` Gram dominates K_floor
 * ((m order) x (m order), null for no floor). The certificate is written to
 * `certificate_json` when that pointer is non-null. */
WFL_API wfl_status wfl_generate_pe_input(int64_t m, int64_t length, int64_t order,
                                         const double* K_floor, uint64_t seed, wfl_signal** out,
                                         char** certificate_json);

/* x0 may be null for a zero initial state. Either output may be null. */
WFL_API wfl_status wfl_simulate(const wfl_system* sys, const double* x0, const wfl_signal* u,
                                wfl_signal** x_out, wfl_signal** y_out);

/* ---- excitation ---- */

/* Depth-L Hankel matrix (gram == 0) or its Gram (gram != 0) as CSV. */
WFL_API wfl_status wfl_hankel_csv(const wfl_signal* u, int64_t depth, int gram, char** csv);
/* Rank test plus an unbounded certificate, as JSON. */
WFL_API wfl_status wfl_pe_check(const wfl_signal* u, int64_t depth, double rank_rtol,
                                double psd_tol, char** json);
/* Quantitative check against K (row-major, (q depth)^2 values). */
WFL_API wfl_status wfl_kpe_check(const wfl_signal* u, int64_t depth, const double* K,
                                 double psd_tol, char** json);

/* ---- bounds ---- */

typedef struct {
  double rank_rtol;
  double psd_tol;
  int64_t depth;         /* state-input checks; 0 selects 1 */
  const double* K_u;     /* null selects 0.9 x the achieved Gram */
  int64_t claimed_r;     /* relaxed check; negative means unspecified */
  double eps;            /* robust check */
  const double* Z_hat;   /* robust check; null draws Z + E with ||E|| = eps / 2 */
  uint64_t seed;         /* draws E when Z_hat is null */
} wfl_bound_options;

WFL_API void wfl_bound_options_default(wfl_bound_options* opts);

/* Runs one check by name and writes its report as JSON. Names:
 * io-representation, filtered-input-excitation, output-excitation,
 * output-directional, input-directional, relaxed-excitation,
 * state-input-excitation, robust-state-input-excitation, and "all" for an
 * array of every applicable report. full != 0 includes lhs/rhs matrices. */
WFL_API wfl_status wfl_bound_report(const wfl_system* sys, const double* x0, const wfl_signal* u,
                                    const char* check, const wfl_bound_options* opts, int full,
                                    char** json);
/* Same reports as CSV rows. */
WFL_API wfl_status wfl_bound_report_csv(const wfl_system* sys, const double* x0,
                                        const wfl_signal* u, const char* check,
                                        const wfl_bound_options* opts, char** csv);

/* Smallest k_u whose (k_u I)-excitation of order n+1 guarantees an output
 * Gram >= K_y (p x p, row-major). */
WFL_API wfl_status wfl_design_input_gain(const wfl_system* sys, const double* K_y,
                                         double rank_rtol, double* k_u);

/* ---- trajectory space ---- */

/* Rank condition and image equality for the trajectory from x0 under u. */
WFL_API wfl_status wfl_fundamental_report(const wfl_system* sys, const double* x0,
                                          const wfl_signal* u, int64_t depth, double rank_rtol,
                                          char** json);
/* Solves [H_L(u); H_L(y)] g = [ubar; ybar] in the least-squares sense.
 * `target` has dimension m + p and length L (inputs first). */
WFL_API wfl_status wfl_parametrize(const wfl_signal* u_data, const wfl_signal* y_data,
                                   const wfl_signal* target, char** json);

/* Necessity counterexample. probes is 2 x count row-major (null for the
 * default probe set). Either output may be null. */
WFL_API wfl_status wfl_counterexample(int64_t length, const double* probes, int64_t count,
                                      char** json, char** summary);

/* Structured matrices as {"metadata": {...}, "csv": {"M": "...", ...}}.
 * depth <= 0 omits Z and T; relaxation < 0 omits the relaxed M. */
WFL_API wfl_status wfl_structured_export(const wfl_system* sys, int64_t depth,
                                         int64_t relaxation, char** json);

/* ---- sweep ---- */

/* Runs a sweep described by a JSON config. The result is
 * {"summary": {...}, "summary_csv": "...", "trials": [...]} where each trial is a
 * JSON object (format "json") or a CSV string (format "csv"). `exit_code`
 * receives 0 when nothing failed and 1 otherwise. Config errors return
 * WFL_ERR_INVALID_ARGUMENT. */
WFL_API wfl_status wfl_sweep(const char* config_json, const char* format, char** result_json,
                             int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
