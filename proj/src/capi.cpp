#include "qflat.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qflat/builders.hpp"
#include "qflat/error.hpp"
#include "qflat/format.hpp"
#include "qflat/report.hpp"
#include "qflat/svg.hpp"

using namespace qf;

struct qf_surface {
  FlatSurface S;
};

namespace {

thread_local int g_code = QF_OK;
thread_local std::string g_message;

int status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::parse: return QF_ERROR_PARSE;
    case ErrorCode::invalid: return QF_ERROR_INVALID;
    case ErrorCode::limit: return QF_ERROR_LIMIT;
    case ErrorCode::usage: return QF_ERROR_USAGE;
    case ErrorCode::internal: return QF_ERROR_INTERNAL;
  }
  return QF_ERROR_INTERNAL;
}

// Every API body runs under guard(): success clears the thread status, any
// library error records it, and the failure value is returned.
template <class T, class Fn>
T guard(T on_error, Fn&& fn) {
  g_code = QF_OK;
  g_message.clear();
  try {
    return fn();
  } catch (const Error& e) {
    g_code = status_of(e.code());
    g_message = e.what();
  } catch (const std::exception& e) {
    g_code = QF_ERROR_INTERNAL;
    g_message = e.what();
  }
  return on_error;
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) fail(ErrorCode::limit, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const FlatSurface& deref(const qf_surface* s) {
  if (!s) fail(ErrorCode::usage, "null surface handle");
  return s->S;
}

std::string require(const char* p, const char* what) {
  if (!p) fail(ErrorCode::usage, std::string("missing ") + what);
  return p;
}

long parse_long(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    long v = std::stol(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::usage, what + " must be an integer, got '" + text + "'");
}

// Flag/value argument pairs; every recognized flag takes a value.
std::map<std::string, std::string> arg_map(const char* const* args, int nargs) {
  std::map<std::string, std::string> m;
  for (int i = 0; i < nargs; i += 2) {
    std::string key = require(args[i], "argument");
    if (i + 1 >= nargs) fail(ErrorCode::usage, "flag " + key + " needs a value");
    if (m.count(key)) fail(ErrorCode::usage, "duplicate flag " + key);
    m[key] = require(args[i + 1], "argument value");
  }
  return m;
}

std::string take(std::map<std::string, std::string>& m, const std::string& key,
                 const std::string& fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  std::string v = it->second;
  m.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, std::string>& m, const std::string& name) {
  if (!m.empty())
    fail(ErrorCode::usage, "unknown flag " + m.begin()->first + " for build " + name);
}

// Deformation description:
//   bottom <label>:<len> ...
//   top <label>:<len> ...
//   tilt <label> <psi/pi> [weight <n>] [factor <rational>]
//   allow-nonzero-rotation
// '#' starts a comment; an omitted base uses the staircase base.
std::pair<SquareTiledBase, DeformationSpec> parse_deform_spec(const std::string& text) {
  SquareTiledBase base;
  DeformationSpec spec;
  std::vector<std::string> tilt_labels;
  bool has_bottom = false, has_top = false;
  auto parse_row = [](const std::vector<std::string>& tok) {
    std::vector<std::pair<std::string, Rat>> row;
    for (size_t i = 1; i < tok.size(); ++i) {
      size_t colon = tok[i].find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok[i].size())
        fail(ErrorCode::parse, "expected <label>:<length>, got '" + tok[i] + "'");
      row.emplace_back(tok[i].substr(0, colon), parse_rat(tok[i].substr(colon + 1)));
    }
    if (row.empty()) fail(ErrorCode::parse, "empty interval row");
    return row;
  };

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    if (size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "bottom") {
      base.bottom = parse_row(tok);
      has_bottom = true;
    } else if (tok[0] == "top") {
      base.top = parse_row(tok);
      has_top = true;
    } else if (tok[0] == "tilt") {
      if (tok.size() < 3) fail(ErrorCode::parse, "usage: tilt <label> <psi> [weight <n>] [factor <r>]");
      DeformationEntry e;
      e.psi_over_pi = parse_rat(tok[2]);
      long weight = 1;
      if ((tok.size() - 3) % 2 != 0) fail(ErrorCode::parse, "dangling tilt option");
      for (size_t i = 3; i + 1 < tok.size(); i += 2) {
        if (tok[i] == "weight")
          weight = parse_long(tok[i + 1], "tilt weight");
        else if (tok[i] == "factor")
          e.length_factor = parse_rat(tok[i + 1]);
        else
          fail(ErrorCode::parse, "unknown tilt option '" + tok[i] + "'");
      }
      spec.entries.push_back(e);
      spec.weights.push_back(weight);
      tilt_labels.push_back(tok[1]);
    } else if (tok[0] == "allow-nonzero-rotation") {
      spec.allow_nonzero_rotation = true;
    } else {
      fail(ErrorCode::parse, "unknown deform directive '" + tok[0] + "'");
    }
  }
  if (!has_bottom && !has_top) base = fig7_base();
  else if (has_bottom != has_top)
    fail(ErrorCode::parse, "bottom and top rows must both be given");
  for (size_t i = 0; i < tilt_labels.size(); ++i) {
    int idx = -1;
    for (size_t j = 0; j < base.bottom.size(); ++j)
      if (base.bottom[j].first == tilt_labels[i]) idx = static_cast<int>(j);
    if (idx < 0)
      fail(ErrorCode::parse, "tilt label '" + tilt_labels[i] + "' is not a bottom interval");
    spec.entries[i].interval = idx;
  }
  return {base, spec};
}

qf_surface* wrap(FlatSurface s) { return new qf_surface{std::move(s)}; }

FlatSurface run_build(const std::string& name, std::map<std::string, std::string> m) {
  if (name == "torus") {
    reject_leftovers(m, name);
    return square_torus();
  }
  if (name == "4g-gon") {
    long g = parse_long(take(m, "--g", "2"), "--g");
    reject_leftovers(m, name);
    return regular_4g_gon(static_cast<int>(g));
  }
  if (name == "twelve-gon") {
    reject_leftovers(m, name);
    return twelve_gon_genus3();
  }
  if (name == "building-block") {
    long chords = parse_long(take(m, "--chords", "4"), "--chords");
    reject_leftovers(m, name);
    return building_block(static_cast<int>(chords));
  }
  if (name == "fig7") {
    reject_leftovers(m, name);
    return fig7_square_tiled();
  }
  if (name == "fig6") {
    reject_leftovers(m, name);
    return fig6_translation();
  }
  if (name == "slit-cap") {
    std::string eps = take(m, "--eps", "");
    std::string dir = take(m, "--direction", "1");
    reject_leftovers(m, name);
    FlatSurface base = fig6_translation();
    const Field& F = base.field();
    int cls = -1;
    for (const ConeClass& c : base.classes())
      if (c.angle_over_pi == 4 && cls < 0) cls = c.id;
    if (cls < 0) fail(ErrorCode::internal, "no 4pi cone on the slit base");
    SlitSpec spec{cls, parse_scalar_terms(F, dir), {}};
    if (!eps.empty()) spec.slit_length = parse_scalar_terms(F, eps);
    return slit_and_cap(base, spec);
  }
  if (name == "deform") {
    std::string text = take(m, "--spec-text", "");
    if (text.empty()) fail(ErrorCode::usage, "build deform needs --spec-text");
    reject_leftovers(m, name);
    auto [base, spec] = parse_deform_spec(text);
    return deform_square_tiled(base, spec);
  }
  fail(ErrorCode::usage, "unknown build name '" + name + "'");
}

}  // namespace

extern "C" {

int qf_last_error(void) { return g_code; }

const char* qf_last_error_message(void) { return g_message.c_str(); }

qf_surface* qf_surface_parse(const char* text, int allow_boundary) {
  return guard<qf_surface*>(nullptr, [&] {
    return wrap(surface_from_text(require(text, "surface text"), allow_boundary != 0));
  });
}

qf_surface* qf_surface_build(const char* name, const char* const* args, int nargs) {
  return guard<qf_surface*>(nullptr, [&] {
    if (nargs < 0 || (nargs > 0 && !args)) fail(ErrorCode::usage, "bad argument array");
    return wrap(run_build(require(name, "build name"), arg_map(args, nargs)));
  });
}

void qf_surface_free(qf_surface* s) { delete s; }

char* qf_surface_format(const qf_surface* s) {
  return guard<char*>(nullptr, [&] { return copy_out(surface_to_text(deref(s))); });
}

char* qf_report_info(const qf_surface* s) {
  return guard<char*>(nullptr, [&] { return copy_out(info_report(deref(s))); });
}

char* qf_report_cover(const qf_surface* s) {
  return guard<char*>(nullptr, [&] { return copy_out(cover_report(deref(s))); });
}

char* qf_report_saddles(const qf_surface* s, const char* max_length, int with_embedded,
                        int with_words, int workers) {
  return guard<char*>(nullptr, [&] {
    const FlatSurface& S = deref(s);
    Scalar budget = parse_length_budget(S, require(max_length, "--max-length"));
    return copy_out(saddles_report(S, budget, with_embedded != 0, with_words != 0, workers));
  });
}

char* qf_report_cylinders(const qf_surface* s, const char* max_length, int embedded_only,
                          int workers) {
  return guard<char*>(nullptr, [&] {
    const FlatSurface& S = deref(s);
    Scalar budget = parse_length_budget(S, require(max_length, "--max-length"));
    return copy_out(cylinders_report(S, budget, embedded_only != 0, workers));
  });
}

char* qf_report_intersections(const qf_surface* s, const char* max_length, int workers) {
  return guard<char*>(nullptr, [&] {
    const FlatSurface& S = deref(s);
    Scalar budget = parse_length_budget(S, require(max_length, "--max-length"));
    return copy_out(intersections_report(S, budget, workers));
  });
}

char* qf_report_graph(const qf_surface* s, const char* max_length, int workers) {
  return guard<char*>(nullptr, [&] {
    const FlatSurface& S = deref(s);
    Scalar budget = parse_length_budget(S, require(max_length, "--max-length"));
    return copy_out(graph_report(S, budget, workers));
  });
}

char* qf_render_svg(const qf_surface* s, const char* cylinders_max_length,
                    const char* saddles_max_length, int workers) {
  return guard<char*>(nullptr, [&] {
    const FlatSurface& S = deref(s);
    SvgOverlays ov;
    std::vector<Cylinder> cyls;
    std::vector<SaddleConnection> scs;
    if (cylinders_max_length) {
      cyls = enumerate_cylinders(S, parse_length_budget(S, cylinders_max_length), workers);
      ov.cylinders = &cyls;
    }
    if (saddles_max_length) {
      scs = saddle_connections(S, parse_length_budget(S, saddles_max_length), workers);
      ov.saddles = &scs;
    }
    return copy_out(svg_document(S, ov));
  });
}

void qf_string_free(char* s) { std::free(s); }

}  // extern "C"
