/* Flat-surface toolkit: exact polygon-gluing metrics, holonomy and covers,
 * saddle connections, cylinders, and deterministic reports.
 *
 * Every entry point either succeeds or records a status retrievable through
 * qf_last_error()/qf_last_error_message() (both thread-local). Functions
 * returning pointers yield NULL on failure; strings returned as char* are
 * owned by the caller and released with qf_string_free(). All exact inputs
 * (lengths, build parameters) are strings in the surface-file term grammar.
 */
#ifndef QFLAT_H
#define QFLAT_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define QF_API __declspec(dllexport)
#else
#define QF_API __attribute__((visibility("default")))
#endif

/* Status codes mirroring the library's error taxonomy. */
enum {
  QF_OK = 0,
  QF_ERROR_PARSE = 1,    /* malformed input text */
  QF_ERROR_INVALID = 2,  /* well-formed input violating a surface invariant */
  QF_ERROR_LIMIT = 3,    /* resource limit exceeded (field order, budget) */
  QF_ERROR_USAGE = 4,    /* bad call: unknown name, bad parameter */
  QF_ERROR_INTERNAL = 5  /* broken internal invariant; always a bug */
};

typedef struct qf_surface qf_surface;

/* Status of the current thread's most recent qf_* call. */
QF_API int qf_last_error(void);
QF_API const char* qf_last_error_message(void);

/* Parse and validate a surface description (the line-oriented file format).
 * allow_boundary != 0 accepts unglued edges as surface boundary. */
QF_API qf_surface* qf_surface_parse(const char* text, int allow_boundary);

/* Run a named constructor. Arguments are flag/value pairs, e.g.
 *   qf_surface_build("4g-gon", (const char*[]){"--g", "3"}, 2).
 * Names: torus | 4g-gon --g N | twelve-gon | building-block --chords N |
 * fig7 | fig6 | slit-cap [--eps R] [--direction EXPR] |
 * deform --spec-text TEXT. */
QF_API qf_surface* qf_surface_build(const char* name, const char* const* args, int nargs);

QF_API void qf_surface_free(qf_surface* s);

/* Canonical surface-file text. */
QF_API char* qf_surface_format(const qf_surface* s);

/* Reports: deterministic plain text, one record per line; max_length is an
 * exact length expression ("4", "1/2", "3*u(1)"). workers >= 1 may
 * parallelize enumeration without changing any output byte. */
QF_API char* qf_report_info(const qf_surface* s);
QF_API char* qf_report_cover(const qf_surface* s);
QF_API char* qf_report_saddles(const qf_surface* s, const char* max_length, int with_embedded,
                               int with_words, int workers);
QF_API char* qf_report_cylinders(const qf_surface* s, const char* max_length, int embedded_only,
                                 int workers);
QF_API char* qf_report_intersections(const qf_surface* s, const char* max_length, int workers);
QF_API char* qf_report_graph(const qf_surface* s, const char* max_length, int workers);

/* SVG 1.1 figure: polygons to scale; optional shaded cylinders and labeled
 * saddle connections up to the given length expressions (NULL omits each). */
QF_API char* qf_render_svg(const qf_surface* s, const char* cylinders_max_length,
                           const char* saddles_max_length, int workers);

QF_API void qf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* QFLAT_H */
