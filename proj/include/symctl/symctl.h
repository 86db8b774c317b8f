#ifndef SYMCTL_H
#define SYMCTL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define SYMCTL_API __attribute__((visibility("default")))
#else
#define SYMCTL_API
#endif

/* Status codes, also used as process exit codes by the command-line tool. */
enum {
  SYMCTL_OK = 0,
  SYMCTL_E_IO = 1,
  SYMCTL_E_PARAM = 2,
  SYMCTL_E_UNSUPPORTED = 3,
  SYMCTL_E_INTERNAL = 4
};

typedef struct symctl_project symctl_project;
typedef struct symctl_abstraction symctl_abstraction;
typedef struct symctl_synthesis symctl_synthesis;
typedef struct symctl_batch symctl_batch;

/* Message of the last failing call on this thread. */
SYMCTL_API const char* symctl_last_error(void);
SYMCTL_API const char* symctl_version(void);

/* Project: config file, model, atlas and spec. Strings returned by accessors live as long as the handle. */
SYMCTL_API int symctl_project_open(const char* config_path, symctl_project** out);
SYMCTL_API int symctl_project_set_output(symctl_project* p, const char* dir);
SYMCTL_API int symctl_project_set_sound_only(symctl_project* p, int on);
SYMCTL_API const char* symctl_project_output(const symctl_project* p);
SYMCTL_API void symctl_project_free(symctl_project* p);

/* Abstraction build; workers = 0 uses every core. */
SYMCTL_API int symctl_abstract(const symctl_project* p, unsigned workers, symctl_abstraction** out);
SYMCTL_API int symctl_abstraction_load(const symctl_project* p, const char* dir, symctl_abstraction** out);
SYMCTL_API int symctl_abstraction_write(const symctl_abstraction* a, const char* dir);
SYMCTL_API uint64_t symctl_abstraction_states(const symctl_abstraction* a);
SYMCTL_API uint64_t symctl_abstraction_transitions(const symctl_abstraction* a);
SYMCTL_API const char* symctl_abstraction_manifest(const symctl_abstraction* a);
SYMCTL_API void symctl_abstraction_free(symctl_abstraction* a);

/* Controller synthesis; an unrealizable spec is a successful call with realizable = 0. */
SYMCTL_API int symctl_synthesize(const symctl_project* p, const symctl_abstraction* a, symctl_synthesis** out);
SYMCTL_API int symctl_synthesis_load(const symctl_project* p, const char* dir, symctl_synthesis** out);
SYMCTL_API int symctl_synthesis_write(const symctl_synthesis* s, const char* dir);
SYMCTL_API int symctl_synthesis_realizable(const symctl_synthesis* s);
SYMCTL_API uint64_t symctl_synthesis_winning(const symctl_synthesis* s);
SYMCTL_API const char* symctl_synthesis_manifest(const symctl_synthesis* s);
SYMCTL_API void symctl_synthesis_free(symctl_synthesis* s);

typedef struct symctl_sim_options {
  uint64_t runs;
  uint64_t horizon;
  uint64_t seed;
  double delta;
  double eps_meas;
  int corners; /* worst-case corner sampling instead of uniform */
  unsigned workers;
  uint64_t csv_runs;
} symctl_sim_options;

/* Fills the options from the project's simulation section. */
SYMCTL_API int symctl_sim_defaults(const symctl_project* p, symctl_sim_options* out);
SYMCTL_API int symctl_simulate(const symctl_project* p, const symctl_synthesis* s, const symctl_sim_options* o,
                               symctl_batch** out);
SYMCTL_API void symctl_batch_counts(const symctl_batch* b, uint64_t* sat, uint64_t* violated, uint64_t* unknown);
/* Verdict of run i: 0 SAT, 1 VIOLATED, 2 UNKNOWN, -1 out of range. */
SYMCTL_API int symctl_batch_verdict(const symctl_batch* b, uint64_t i);
SYMCTL_API const char* symctl_batch_summary(const symctl_batch* b);
SYMCTL_API int symctl_batch_write(const symctl_batch* b, const char* dir);
SYMCTL_API void symctl_batch_free(symctl_batch* b);

/*
 * Relation check between two text transition systems. mode is "abstraction",
 * "feedback" or "alternating". The report is copied into buf (truncated, NUL
 * terminated) when buf is not NULL.
 */
SYMCTL_API int symctl_check(const char* ts1_path, const char* ts2_path, const char* relation_path, const char* mode,
                            int* pass, char* buf, size_t buf_size);

#ifdef __cplusplus
}
#endif

#endif
