/*
 * entsol - bounded entire solutions of nonlinear ODE/PDE systems by domain
 * truncation: Dirichlet solves on expanding intervals/squares via homotopy
 * Newton or energy minimization, window-convergence detection, a priori
 * bound validation.
 *
 * C API over the C++ core. All functions return entsol_status; every handle
 * is opaque and freed by the matching *_destroy call. Functions returning
 * strings keep ownership: the pointers stay valid until the owning handle is
 * destroyed. On any failure entsol_last_error() describes the problem
 * (thread-local).
 */
#ifndef ENTSOL_H
#define ENTSOL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum entsol_status {
    ENTSOL_OK = 0,
    ENTSOL_ERROR_INVALID_ARGUMENT = 1, /* null pointers, bad enum values */
    ENTSOL_ERROR_PARSE = 2,            /* expression / problem-file syntax */
    ENTSOL_ERROR_CONFIG = 3,           /* inconsistent run configuration */
    ENTSOL_ERROR_SOLVE = 4,            /* Newton/line-search/CG breakdown */
    ENTSOL_ERROR_NO_CONVERGENCE = 5,   /* homotopy or domain expansion gave up;
                                          partial results are still returned */
    ENTSOL_ERROR_IO = 6,               /* file system */
    ENTSOL_ERROR_UNKNOWN = 7
} entsol_status;

typedef struct entsol_problem entsol_problem;
typedef struct entsol_result entsol_result;

/* Last error message of the current thread; never NULL. */
const char* entsol_last_error(void);

const char* entsol_version(void);

/* --- problems ---------------------------------------------------------- */

/* Presets: model_constant, counterexample_91, example1, example2,
 * pde_quartic. */
entsol_status entsol_problem_create_preset(const char* name, entsol_problem** out);

/* Key = value problem description (same schema as problem files). */
entsol_status entsol_problem_create_from_text(const char* text, entsol_problem** out);
entsol_status entsol_problem_create_from_file(const char* path, entsol_problem** out);

void entsol_problem_destroy(entsol_problem* problem);

/* "scalar" | "coupled" | "hamiltonian" | "pde" */
const char* entsol_problem_kind(const entsol_problem* problem);

/* --- run configuration --------------------------------------------------
 * One options struct serves every run; each run reads the fields it needs.
 * entsol_options_init fills defaults (call it first, then override).
 */
typedef struct entsol_options {
    double L;          /* single-solve half-length            (solve)        */
    double L0;         /* first half-length                   (study, mms)   */
    double Lmax;       /* last half-length, L0 * 2^k          (study, mms)   */
    double W;          /* comparison window half-length        (study, blowup)*/
    double h;          /* grid spacing (2 L / h integral)                    */
    double tol;        /* convergence tolerance of the run                   */
    double solve_tol;  /* sup-residual tolerance of inner solves             */
    double box;        /* sampling box half-width             (psd, validate)*/
    const char* Ls;    /* comma list like "4,8,16"      (blowup, energy-mono)*/
    const char* solver;/* "continuation" | "variational" | "newton" |
                          "minimize" (per problem kind)                      */
    const char* u_star;/* manufactured solution expression     (mms)         */
    int dim;           /* 1 or 2                               (mms)         */
    int samples;       /* sample count                 (psd, validate)       */
    int seeds;         /* initialization count         (uniqueness probe)    */
    unsigned long long seed;  /* RNG seed for randomized checks              */
} entsol_options;

void entsol_options_init(entsol_options* options);

/* --- runs ----------------------------------------------------------------
 * Each run produces a result handle carrying a JSON report plus zero or
 * more named CSV artifacts. On ENTSOL_ERROR_NO_CONVERGENCE the result is
 * still created with the partial data; every other error leaves *out
 * untouched.
 */
entsol_status entsol_run_solve(const entsol_problem* problem, const entsol_options* options,
                               entsol_result** out);
entsol_status entsol_run_study(const entsol_problem* problem, const entsol_options* options,
                               entsol_result** out);
entsol_status entsol_run_validate(const entsol_problem* problem, const entsol_options* options,
                                  entsol_result** out);
entsol_status entsol_run_uniqueness(const entsol_problem* problem, const entsol_options* options,
                                    entsol_result** out);
entsol_status entsol_run_blowup_demo(const entsol_problem* problem,
                                     const entsol_options* options, entsol_result** out);
entsol_status entsol_run_psd_check(const entsol_problem* problem, const entsol_options* options,
                                   entsol_result** out);
entsol_status entsol_run_energy_monotone(const entsol_problem* problem,
                                         const entsol_options* options, entsol_result** out);
/* mms builds its own manufactured problem; pass dim = 1 or 2. */
entsol_status entsol_run_mms(const entsol_options* options, entsol_result** out);

/* --- results ------------------------------------------------------------ */

const char* entsol_result_report_json(const entsol_result* result);
int entsol_result_artifact_count(const entsol_result* result);
const char* entsol_result_artifact_name(const entsol_result* result, int index);
const char* entsol_result_artifact_data(const entsol_result* result, int index);
void entsol_result_destroy(entsol_result* result);

#ifdef __cplusplus
}
#endif

#endif /* ENTSOL_H */
