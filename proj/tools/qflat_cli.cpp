// Command-line front end; everything goes through the public C API.
#include "qflat.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

const char kUsage[] =
    "usage: qflat <verb> [options]\n"
    "\n"
    "verbs (surface input: a file path, or - for stdin):\n"
    "  validate <in> [--boundary]            parse and check; exit 0 iff valid\n"
    "  info <in> [--boundary]                cone angles, genus, area, rotation order\n"
    "  cover <in> [--boundary]               rotation-trivializing cover, surface text\n"
    "  saddles <in> --max-length <expr> [--embedded] [--words] [--workers N] [--boundary]\n"
    "  cylinders <in> --max-length <expr> [--embedded-only] [--svg <file>] [--workers N] [--boundary]\n"
    "  intersections <in> --max-length <expr> [--workers N] [--boundary]\n"
    "  graph <in> --max-length <expr> [--workers N] [--boundary]\n"
    "  svg <in> [--cylinders <expr>] [--saddles <expr>] [--workers N] [--boundary]\n"
    "  build <name> [flags...]               emit a constructed surface as text\n"
    "\n"
    "build names and their flags:\n"
    "  torus | twelve-gon | fig7 | fig6\n"
    "  4g-gon --g N\n"
    "  building-block --chords N\n"
    "  slit-cap [--eps <rational>] [--direction <expr>]\n"
    "  deform --spec-text <text> | deform --spec-file <path>\n"
    "\n"
    "common options:\n"
    "  -o <file>      write the result there instead of stdout\n"
    "  --max-length   exact length bound, e.g. 4 or 3/2 or 2*u(1)+1*u(0)\n"
    "  --help         this message\n";

int exit_code_for(int status) {
  switch (status) {
    case QF_OK: return 0;
    case QF_ERROR_PARSE:
    case QF_ERROR_INVALID: return 1;
    case QF_ERROR_USAGE: return 2;
    default: return 3;
  }
}

[[noreturn]] void die_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n" << "run 'qflat --help' for usage\n";
  std::exit(2);
}

[[noreturn]] void die_api() {
  std::cerr << "error: " << qf_last_error_message() << "\n";
  std::exit(exit_code_for(qf_last_error()));
}

std::string read_input(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) die_usage("cannot open input file '" + path + "'");
    buf << in.rdbuf();
  }
  return buf.str();
}

void write_output(const std::string& path, const char* text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) die_usage("cannot open output file '" + path + "'");
  out << text;
  if (!out) die_usage("failed writing '" + path + "'");
}

int parse_workers(const std::string& text) {
  char* end = nullptr;
  long v = std::strtol(text.c_str(), &end, 10);
  if (!end || *end != '\0' || v < 1 || v > 256) die_usage("--workers wants an integer in [1,256]");
  return static_cast<int>(v);
}

// Walks argv after the verb: positional input path, then flag handling shared
// by every surface-reading verb.
struct Args {
  std::vector<std::string> raw;
  size_t next = 0;

  bool done() const { return next >= raw.size(); }
  std::string pop(const std::string& what) {
    if (done()) die_usage("missing " + what);
    return raw[next++];
  }
  std::string peek() const { return done() ? std::string() : raw[next]; }
};

struct CommonOpts {
  std::string input;
  std::string output;       // empty = stdout
  std::string max_length;   // empty = absent
  std::string svg_path;     // cylinders verb only
  std::string cyl_budget;   // svg verb only
  std::string sad_budget;   // svg verb only
  bool boundary = false;
  bool embedded = false;
  bool words = false;
  bool embedded_only = false;
  int workers = 1;
};

CommonOpts parse_common(Args& a, bool wants_input) {
  CommonOpts o;
  bool have_input = false;
  while (!a.done()) {
    std::string t = a.pop("argument");
    if (t == "--boundary") o.boundary = true;
    else if (t == "--embedded") o.embedded = true;
    else if (t == "--words") o.words = true;
    else if (t == "--embedded-only") o.embedded_only = true;
    else if (t == "--max-length") o.max_length = a.pop("--max-length value");
    else if (t == "--workers") o.workers = parse_workers(a.pop("--workers value"));
    else if (t == "--svg") o.svg_path = a.pop("--svg value");
    else if (t == "--cylinders") o.cyl_budget = a.pop("--cylinders value");
    else if (t == "--saddles") o.sad_budget = a.pop("--saddles value");
    else if (t == "-o") o.output = a.pop("-o value");
    else if (!t.empty() && t[0] == '-' && t != "-") die_usage("unknown option '" + t + "'");
    else if (wants_input && !have_input) { o.input = t; have_input = true; }
    else die_usage("unexpected argument '" + t + "'");
  }
  if (wants_input && !have_input) die_usage("missing surface input (path or -)");
  return o;
}

qf_surface* load_surface(const CommonOpts& o) {
  std::string text = read_input(o.input);
  qf_surface* s = qf_surface_parse(text.c_str(), o.boundary ? 1 : 0);
  if (!s) die_api();
  return s;
}

int run_report(const std::string& verb, Args& a) {
  CommonOpts o = parse_common(a, true);
  qf_surface* s = load_surface(o);
  char* text = nullptr;
  if (verb == "validate") {
    qf_surface_free(s);
    write_output(o.output, "ok\n");
    return 0;
  }
  if (verb == "info") text = qf_report_info(s);
  else if (verb == "cover") text = qf_report_cover(s);
  else {
    if (o.max_length.empty()) die_usage(verb + " needs --max-length");
    const char* L = o.max_length.c_str();
    if (verb == "saddles")
      text = qf_report_saddles(s, L, o.embedded ? 1 : 0, o.words ? 1 : 0, o.workers);
    else if (verb == "cylinders")
      text = qf_report_cylinders(s, L, o.embedded_only ? 1 : 0, o.workers);
    else if (verb == "intersections")
      text = qf_report_intersections(s, L, o.workers);
    else if (verb == "graph")
      text = qf_report_graph(s, L, o.workers);
  }
  if (!text) { qf_surface_free(s); die_api(); }
  write_output(o.output, text);
  qf_string_free(text);
  if (verb == "cylinders" && !o.svg_path.empty()) {
    char* pic = qf_render_svg(s, o.max_length.c_str(), nullptr, o.workers);
    if (!pic) { qf_surface_free(s); die_api(); }
    write_output(o.svg_path, pic);
    qf_string_free(pic);
  }
  qf_surface_free(s);
  return 0;
}

int run_svg(Args& a) {
  CommonOpts o = parse_common(a, true);
  qf_surface* s = load_surface(o);
  char* pic = qf_render_svg(s, o.cyl_budget.empty() ? nullptr : o.cyl_budget.c_str(),
                            o.sad_budget.empty() ? nullptr : o.sad_budget.c_str(), o.workers);
  if (!pic) { qf_surface_free(s); die_api(); }
  write_output(o.output, pic);
  qf_string_free(pic);
  qf_surface_free(s);
  return 0;
}

int run_build(Args& a) {
  std::string name = a.pop("build name");
  std::string output;
  std::vector<std::string> pass;  // flag/value pairs forwarded to the library
  while (!a.done()) {
    std::string t = a.pop("argument");
    if (t == "-o") { output = a.pop("-o value"); continue; }
    if (t == "--spec-file") {
      pass.push_back("--spec-text");
      pass.push_back(read_input(a.pop("--spec-file value")));
      continue;
    }
    if (t.size() < 3 || t[0] != '-' || t[1] != '-') die_usage("build flags look like --name value, got '" + t + "'");
    pass.push_back(t);
    pass.push_back(a.pop(t + " value"));
  }
  std::vector<const char*> argv;
  for (const std::string& p : pass) argv.push_back(p.c_str());
  qf_surface* s = qf_surface_build(name.c_str(), argv.empty() ? nullptr : argv.data(),
                                   static_cast<int>(argv.size()));
  if (!s) die_api();
  char* text = qf_surface_format(s);
  if (!text) { qf_surface_free(s); die_api(); }
  write_output(output, text);
  qf_string_free(text);
  qf_surface_free(s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  for (int i = 1; i < argc; ++i) a.raw.emplace_back(argv[i]);
  if (a.done()) die_usage("missing verb");
  std::string verb = a.pop("verb");
  if (verb == "--help" || verb == "-h" || verb == "help") {
    std::cout << kUsage;
    return 0;
  }
  if (verb == "validate" || verb == "info" || verb == "cover" || verb == "saddles" ||
      verb == "cylinders" || verb == "intersections" || verb == "graph")
    return run_report(verb, a);
  if (verb == "svg") return run_svg(a);
  if (verb == "build") return run_build(a);
  die_usage("unknown verb '" + verb + "'");
}
