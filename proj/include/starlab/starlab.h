#ifndef STARLAB_STARLAB_H
#define STARLAB_STARLAB_H

#include <stddef.h>

#if defined(_WIN32)
#define STARLAB_API __declspec(dllexport)
#else
#define STARLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum starlab_status {
  STARLAB_OK = 0,
  STARLAB_ERR_CONFIG = 1,
  STARLAB_ERR_RUNTIME = 2,
  STARLAB_ERR_IO = 3,
  STARLAB_ERR_REFUSED_OVERWRITE = 4,
  STARLAB_ERR_INVALID_ARGUMENT = 5
} starlab_status;

typedef struct starlab_config starlab_config;
typedef struct starlab_report starlab_report;

/* Row status values returned by starlab_report_row. */
typedef enum starlab_row_status {
  STARLAB_ROW_PASS = 0,
  STARLAB_ROW_FAIL = 1,
  STARLAB_ROW_DIAGNOSTIC = 2
} starlab_row_status;

typedef struct starlab_row {
  const char* check_id; /* owned by the report */
  double lhs;
  double rhs;
  double abs_err;
  double rel_err;
  double tolerance; /* NaN for diagnostic rows */
  starlab_row_status status;
} starlab_row;

STARLAB_API const char* starlab_version(void);

/* Message for the last failing call on this thread; "" if none. */
STARLAB_API const char* starlab_last_error(void);

STARLAB_API starlab_status starlab_config_load(const char* path, starlab_config** out);
/* base_dir resolves relative includes; may be NULL. */
STARLAB_API starlab_status starlab_config_parse(const char* toml_text, const char* base_dir, starlab_config** out);
STARLAB_API void starlab_config_free(starlab_config* cfg);

STARLAB_API starlab_status starlab_run_suite(const starlab_config* cfg, const char* suite, starlab_report** out);

STARLAB_API int starlab_report_all_passed(const starlab_report* report);
STARLAB_API size_t starlab_report_row_count(const starlab_report* report);
STARLAB_API starlab_status starlab_report_row(const starlab_report* report, size_t index, starlab_row* out);
/* *out is released with starlab_string_free. */
STARLAB_API starlab_status starlab_report_to_json(const starlab_report* report, char** out);
STARLAB_API starlab_status starlab_report_write_json(const starlab_report* report, const char* path, int force);
STARLAB_API void starlab_report_free(starlab_report* report);

STARLAB_API void starlab_string_free(char* s);

/* Coupled run. csv_path and dump_dir may be NULL. */
STARLAB_API starlab_status starlab_run_flow(const starlab_config* cfg, const char* csv_path, const char* dump_dir,
                                            int force);

/* which: "F" or "omega". */
STARLAB_API starlab_status starlab_functional(const starlab_config* cfg, const char* which, double* out);

#ifdef __cplusplus
}
#endif

#endif
