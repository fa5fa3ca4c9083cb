#include "qflat/format.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qf {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(ErrorCode::parse, "line " + std::to_string(line) + ": " + msg);
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int parse_int(int line, const std::string& tok, const std::string& what) {
  size_t i = (tok.size() > 1 && (tok[0] == '-' || tok[0] == '+')) ? 1 : 0;
  if (!all_digits(tok.substr(i))) parse_fail(line, "expected " + what + ", got '" + tok + "'");
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    parse_fail(line, what + " out of range: '" + tok + "'");
  }
}

// r or r/s, digits only (sign handled by the term scanner).
Rat scan_rat(int line, const std::string& tok, size_t& pos) {
  size_t start = pos;
  while (pos < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos]))) ++pos;
  if (pos == start) parse_fail(line, "expected a rational in vertex '" + tok + "'");
  std::string num = tok.substr(start, pos - start);
  std::string den = "1";
  if (pos < tok.size() && tok[pos] == '/') {
    ++pos;
    size_t dstart = pos;
    while (pos < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos == dstart) parse_fail(line, "expected a denominator in vertex '" + tok + "'");
    den = tok.substr(dstart, pos - dstart);
  }
  Rat r{mpz_class{num}, mpz_class{den}};
  if (r.get_den() == 0) parse_fail(line, "zero denominator in vertex '" + tok + "'");
  r.canonicalize();
  return r;
}

// u(<k>) with k in [0, N).
int scan_basis_index(int line, const std::string& tok, size_t& pos, int order) {
  if (pos + 2 >= tok.size() || tok[pos] != 'u' || tok[pos + 1] != '(')
    parse_fail(line, "expected u(k) in vertex '" + tok + "'");
  pos += 2;
  size_t start = pos;
  while (pos < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos]))) ++pos;
  if (pos == start || pos >= tok.size() || tok[pos] != ')')
    parse_fail(line, "malformed u(k) in vertex '" + tok + "'");
  int k = parse_int(line, tok.substr(start, pos - start), "basis index");
  ++pos;  // ')'
  if (k < 0 || k >= order)
    parse_fail(line, "u(" + std::to_string(k) + ") index out of range for order " + std::to_string(order));
  return k;
}

Scalar parse_vertex(int line, const std::string& tok, const Field& F) {
  Scalar acc = F.zero();
  size_t pos = 0;
  bool first = true;
  while (pos < tok.size()) {
    int sign = 1;
    if (tok[pos] == '+' || tok[pos] == '-') {
      if (tok[pos] == '-') sign = -1;
      ++pos;
    } else if (!first) {
      parse_fail(line, "expected + or - between vertex terms in '" + tok + "'");
    }
    first = false;
    Rat coeff = 1;
    int k = 0;
    if (tok.compare(pos, 2, "u(") == 0) {
      k = scan_basis_index(line, tok, pos, F.order());
    } else {
      coeff = scan_rat(line, tok, pos);
      if (pos < tok.size() && tok[pos] == '*') {
        ++pos;
        k = scan_basis_index(line, tok, pos, F.order());
      }
    }
    if (sign < 0) coeff = -coeff;
    acc = acc + F.zeta_pow(k).scaled(coeff);
  }
  if (first) parse_fail(line, "empty vertex");
  return acc;
}

// <name>.<index>
std::pair<std::string, int> parse_selector(int line, const std::string& tok, const std::string& what) {
  size_t dot = tok.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == tok.size())
    parse_fail(line, "expected <name>.<index> for " + what + ", got '" + tok + "'");
  std::string idx = tok.substr(dot + 1);
  if (!all_digits(idx)) parse_fail(line, "expected <name>.<index> for " + what + ", got '" + tok + "'");
  return {tok.substr(0, dot), parse_int(line, idx, what + " index")};
}

}  // namespace

SurfaceData parse_surface_text(const std::string& text) {
  SurfaceData data;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "order") {
      if (data.field) parse_fail(line, "duplicate order line");
      if (tok.size() != 2) parse_fail(line, "usage: order <N>");
      int n = parse_int(line, tok[1], "order");
      if (n < 1) parse_fail(line, "order must be positive");
      data.field = &Field::get(n);
      continue;
    }
    if (!data.field) parse_fail(line, "the order line must come first");
    if (kw == "polygon") {
      if (tok.size() < 2) parse_fail(line, "usage: polygon <name> <vertex>...");
      PolygonSpec P{tok[1], {}};
      for (size_t i = 2; i < tok.size(); ++i) P.vertices.push_back(parse_vertex(line, tok[i], *data.field));
      if (P.vertices.size() < 3) parse_fail(line, "polygon " + P.name + " needs at least 3 vertices");
      data.polygons.push_back(std::move(P));
    } else if (kw == "glue") {
      if (tok.size() != 5 || tok[3] != "rot")
        parse_fail(line, "usage: glue <name>.<edge> <name>.<edge> rot <k>");
      auto [pa, ea] = parse_selector(line, tok[1], "edge");
      auto [pb, eb] = parse_selector(line, tok[2], "edge");
      int n = data.field->order();
      int rot = ((parse_int(line, tok[4], "rotation") % n) + n) % n;
      data.gluings.push_back({pa, ea, pb, eb, rot});
    } else if (kw == "puncture") {
      if (tok.size() != 2) parse_fail(line, "usage: puncture <name>.<vertex>");
      auto [p, v] = parse_selector(line, tok[1], "vertex");
      data.punctures.push_back({p, v});
    } else {
      parse_fail(line, "unknown directive '" + kw + "'");
    }
  }
  if (!data.field) fail(ErrorCode::parse, "missing order line");
  return data;
}

FlatSurface surface_from_text(const std::string& text, bool allow_boundary) {
  SurfaceData d = parse_surface_text(text);
  return build_surface(*d.field, std::move(d.polygons), std::move(d.gluings), std::move(d.punctures),
                       allow_boundary);
}

Scalar parse_scalar_terms(const Field& F, const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  if (!(in >> tok)) fail(ErrorCode::parse, "empty scalar expression");
  std::string rest;
  if (in >> rest) fail(ErrorCode::parse, "scalar expression must be a single token, got '" + text + "'");
  return parse_vertex(0, tok, F);
}

std::string scalar_to_terms(const Scalar& x) {
  std::string out;
  const auto& c = x.coeffs();
  for (size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    Rat r = c[j];
    if (out.empty()) {
      if (r < 0) out += '-';
    } else {
      out += r < 0 ? '-' : '+';
    }
    out += rat_str(Rat(abs(r))) + "*u(" + std::to_string(j) + ")";
  }
  if (out.empty()) out = "0*u(0)";
  return out;
}

std::string surface_to_text(const FlatSurface& S,
                            const std::function<std::string(const std::string&)>& polygon_comment) {
  std::ostringstream out;
  out << "order " << S.order() << "\n";
  std::vector<const Polygon*> ps;
  for (const Polygon& P : S.polygons()) ps.push_back(&P);
  std::sort(ps.begin(), ps.end(), [](const Polygon* a, const Polygon* b) { return a->name < b->name; });
  for (const Polygon* P : ps) {
    if (polygon_comment) {
      std::string c = polygon_comment(P->name);
      if (!c.empty()) out << "# " << c << "\n";
    }
    out << "polygon " << P->name;
    for (const Scalar& v : P->vertices) out << ' ' << scalar_to_terms(v);
    out << "\n";
  }
  struct Side {
    std::string pa;
    int ea;
    std::string pb;
    int eb;
    int rot;
  };
  std::vector<Side> gs;
  int n = S.order();
  for (const Gluing& G : S.gluings()) {
    Side s{S.polygons()[static_cast<size_t>(G.poly_a)].name, G.edge_a,
           S.polygons()[static_cast<size_t>(G.poly_b)].name, G.edge_b, G.rot};
    if (std::tie(s.pb, s.eb) < std::tie(s.pa, s.ea)) {
      std::swap(s.pa, s.pb);
      std::swap(s.ea, s.eb);
      s.rot = (n - s.rot) % n;
    }
    gs.push_back(std::move(s));
  }
  std::sort(gs.begin(), gs.end(), [](const Side& a, const Side& b) {
    return std::tie(a.pa, a.ea, a.pb, a.eb) < std::tie(b.pa, b.ea, b.pb, b.eb);
  });
  for (const Side& s : gs)
    out << "glue " << s.pa << '.' << s.ea << ' ' << s.pb << '.' << s.eb << " rot " << s.rot << "\n";
  for (const PunctureSpec& p : S.puncture_specs()) out << "puncture " << p.poly << '.' << p.vertex << "\n";
  return out.str();
}

}  // namespace qf
