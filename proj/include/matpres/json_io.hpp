#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "matpres/certify.hpp"
#include "matpres/lognormal.hpp"
#include "matpres/measures.hpp"
#include "matpres/operator.hpp"

namespace matpres {

using Json = nlohmann::json;

/// JSON wire format is double-valued; exact scalars round-trip through the
/// nearest double on write and come back as exact dyadic rationals on read.
template <class R>
R scalar_from_double(double v) {
  if constexpr (scalar_traits<R>::exact)
    return exact_from_double(v);
  else
    return v;
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("malformed JSON in " + path);
  return j;
}

inline void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

namespace json_detail {

inline const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field: ") + key);
  return *it;
}

inline int int_field(const Json& j, const char* key) {
  const Json& f = field(j, key);
  if (!f.is_number_integer()) throw ValidationError(std::string(key) + " must be an integer");
  return f.get<int>();
}

inline void check_shape(int n, int m, int d = 0) {
  if (n < 1 || m < 1 || d < 0)
    throw ValidationError("shape fields must satisfy n >= 1, m >= 1, d >= 0");
}

inline MultiIndex multi_index(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ValidationError("exponent vector has wrong arity");
  MultiIndex a(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 0)
      throw ValidationError("exponents must be nonnegative integers");
    a[i] = j[i].get<int>();
  }
  return a;
}

template <class R>
std::vector<R> point(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ValidationError("point has wrong arity");
  std::vector<R> t;
  t.reserve(n);
  for (const auto& v : j) t.push_back(scalar_from_double<R>(v.get<double>()));
  return t;
}

}  // namespace json_detail

// ---------------------------------------------------------------------------
// Hermitian matrices: { "m": m, "entries": dense m x m of [re, im] }.

template <class R>
Json to_json(const HermMatrix<R>& h) {
  Json rows = Json::array();
  for (int i = 0; i < h.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < h.dim(); ++j) {
      Cplx<R> z = h.at(i, j);
      row.push_back(Json::array({scalar_traits<R>::to_double(z.re),
                                 scalar_traits<R>::to_double(z.im)}));
    }
    rows.push_back(std::move(row));
  }
  return Json{{"m", h.dim()}, {"entries", std::move(rows)}};
}

template <class R>
HermMatrix<R> herm_from_json(const Json& j) {
  int m = json_detail::int_field(j, "m");
  if (m <= 0) throw ValidationError("matrix dimension must be positive");
  const Json& rows = json_detail::field(j, "entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != m)
    throw ValidationError("matrix entries must be a dense m x m array");
  DenseMat<double> d(m);
  for (int i = 0; i < m; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != m)
      throw ValidationError("matrix entries must be a dense m x m array");
    for (int k = 0; k < m; ++k) {
      const Json& cell = row[k];
      if (!cell.is_array() || cell.size() != 2)
        throw ValidationError("matrix entries must be [re, im] pairs");
      d.at(i, k) = Cplx<double>(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  HermMatrix<double> checked = d.to_hermitian(1e-12);  // reports offending entry
  HermMatrix<R> out(m);
  for (int i = 0; i < m; ++i)
    out.set_diag(i, scalar_from_double<R>(checked.diag(i)));
  for (int i = 1; i < m; ++i)
    for (int k = 0; k < i; ++k) {
      Cplx<double> z = checked.at(i, k);
      out.set_lower(i, k, Cplx<R>(scalar_from_double<R>(z.re), scalar_from_double<R>(z.im)));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix polynomials: { n, m, terms: [ { alpha, coeff: <matrix> } ] },
// terms in graded-lex order; zero coefficients never written, dropped on read.

template <class R>
Json to_json(const MatrixPoly<R>& p) {
  Json terms = Json::array();
  for (const auto& [a, c] : p.terms())  // map iterates in graded-lex order
    terms.push_back(Json{{"alpha", a}, {"coeff", to_json(c)}});
  return Json{{"n", p.vars()}, {"m", p.mat_dim()}, {"terms", std::move(terms)}};
}

template <class R>
MatrixPoly<R> poly_from_json(const Json& j) {
  int n = json_detail::int_field(j, "n");
  int m = json_detail::int_field(j, "m");
  json_detail::check_shape(n, m);
  MatrixPoly<R> p(n, m);
  for (const Json& t : json_detail::field(j, "terms")) {
    MultiIndex a = json_detail::multi_index(json_detail::field(t, "alpha"), n);
    HermMatrix<R> c = herm_from_json<R>(json_detail::field(t, "coeff"));
    if (c.dim() != m) throw ValidationError("coefficient dimension mismatch");
    p.add_term(a, c);  // accumulates duplicates, drops zeros
  }
  return p;
}

// Scalar polynomials (measure-family entries): { terms: [ { alpha, c } ] }.
template <class R>
Json to_json_scalar(const RealPoly<R>& p) {
  Json terms = Json::array();
  for (const auto& [a, c] : p.terms())
    terms.push_back(Json{{"alpha", a}, {"c", scalar_traits<R>::to_double(c)}});
  return Json{{"terms", std::move(terms)}};
}

template <class R>
RealPoly<R> scalar_poly_from_json(const Json& j, int n) {
  RealPoly<R> p(n);
  for (const Json& t : json_detail::field(j, "terms")) {
    MultiIndex a = json_detail::multi_index(json_detail::field(t, "alpha"), n);
    p.add_term(a, scalar_from_double<R>(json_detail::field(t, "c").get<double>()));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Operator tables: { n, m, d, action: [ { i, j, beta, image: <poly> } ] };
// i, j are 1-based on the wire. Missing basis monomials act as zero.

template <class R>
Json to_json(const OperatorTable<R>& t) {
  Json action = Json::array();
  for (const MultiIndex& beta : t.betas())
    for (int i = 0; i < t.mat_dim(); ++i)
      for (int j = 0; j < t.mat_dim(); ++j) {
        const MatrixPoly<R>& img = t.action(i, j, beta);
        if (img.is_zero()) continue;
        action.push_back(
            Json{{"i", i + 1}, {"j", j + 1}, {"beta", beta}, {"image", to_json(img)}});
      }
  return Json{{"n", t.vars()}, {"m", t.mat_dim()}, {"d", t.max_degree()},
              {"action", std::move(action)}};
}

template <class R>
OperatorTable<R> table_from_json(const Json& j) {
  int n = json_detail::int_field(j, "n");
  int m = json_detail::int_field(j, "m");
  int d = json_detail::int_field(j, "d");
  json_detail::check_shape(n, m, d);
  OperatorTable<R> t(n, m, d);
  for (const Json& e : json_detail::field(j, "action")) {
    int i = json_detail::int_field(e, "i");
    int jj = json_detail::int_field(e, "j");
    if (i < 1 || jj < 1 || i > m || jj > m)
      throw ValidationError("basis index out of range (1-based)");
    MultiIndex beta = json_detail::multi_index(json_detail::field(e, "beta"), n);
    if (mi_degree(beta) > d) throw ValidationError("action monomial exceeds degree bound");
    MatrixPoly<R> img;
    try {
      img = poly_from_json<R>(json_detail::field(e, "image"));
    } catch (const ValidationError& err) {
      throw NonHermitianImageError(
          "image of basis element (" + std::to_string(i) + "," + std::to_string(jj) +
              "): " + err.what(),
          i, jj);
    }
    if (img.vars() != n || img.mat_dim() != m)
      throw ValidationError("image polynomial shape mismatch");
    t.set_action(i - 1, jj - 1, beta, std::move(img));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Canonical representations: { n, m, d, q: [ { alpha, images: [m^2 polys] } ] },
// images in row-major (i, j) order, i outer.

template <class R>
Json to_json(const CanonicalRep<R>& rep) {
  Json q = Json::array();
  for (const MultiIndex& alpha : rep.alphas()) {
    Json images = Json::array();
    bool all_zero = true;
    for (int i = 0; i < rep.mat_dim(); ++i)
      for (int j = 0; j < rep.mat_dim(); ++j) {
        const MatrixPoly<R>& img = rep.q_image(i, j, alpha);
        all_zero = all_zero && img.is_zero();
        images.push_back(to_json(img));
      }
    if (!all_zero) q.push_back(Json{{"alpha", alpha}, {"images", std::move(images)}});
  }
  return Json{{"n", rep.vars()}, {"m", rep.mat_dim()}, {"d", rep.max_degree()},
              {"q", std::move(q)}};
}

template <class R>
CanonicalRep<R> rep_from_json(const Json& j) {
  int n = json_detail::int_field(j, "n");
  int m = json_detail::int_field(j, "m");
  int d = json_detail::int_field(j, "d");
  json_detail::check_shape(n, m, d);
  CanonicalRep<R> rep(n, m, d);
  for (const Json& e : json_detail::field(j, "q")) {
    MultiIndex alpha = json_detail::multi_index(json_detail::field(e, "alpha"), n);
    if (mi_degree(alpha) > d) throw ValidationError("coefficient index exceeds degree bound");
    const Json& images = json_detail::field(e, "images");
    if (static_cast<int>(images.size()) != m * m)
      throw ValidationError("canonical entry needs m^2 images");
    int idx = 0;
    for (int i = 0; i < m; ++i)
      for (int jj = 0; jj < m; ++jj) {
        MatrixPoly<R> img = poly_from_json<R>(images[idx++]);
        if (img.vars() != n || img.mat_dim() != m)
          throw ValidationError("image polynomial shape mismatch");
        rep.set_q_image(i, jj, alpha, std::move(img));
      }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Measures: { n, m, kind: "matrix"|"operator"|"family", atoms: [...] } with
//   matrix atoms   { t, weight: <matrix> },
//   operator atoms { t, map: m^2 x m^2 real array } (H-basis, row-major),
//   family atoms   { t, map: m^2 x m^2 array of scalar polynomials }.

template <class R>
Json to_json(const AtomicMatrixMeasure<R>& mu) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) {
    Json t = Json::array();
    for (const R& c : a.t) t.push_back(scalar_traits<R>::to_double(c));
    atoms.push_back(Json{{"t", std::move(t)}, {"weight", to_json(a.w)}});
  }
  return Json{{"n", mu.vars()}, {"m", mu.mat_dim()}, {"kind", "matrix"},
              {"atoms", std::move(atoms)}};
}

template <class R>
Json linmap_rows(const LinMap<R>& phi) {
  Json rows = Json::array();
  for (int r = 0; r < phi.coord_dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < phi.coord_dim(); ++c)
      row.push_back(scalar_traits<R>::to_double(phi.entry(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class R>
Json to_json(const AtomicOperatorMeasure<R>& mu) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) {
    Json t = Json::array();
    for (const R& c : a.t) t.push_back(scalar_traits<R>::to_double(c));
    atoms.push_back(Json{{"t", std::move(t)}, {"map", linmap_rows(a.phi)}});
  }
  return Json{{"n", mu.vars()}, {"m", mu.mat_dim()}, {"kind", "operator"},
              {"atoms", std::move(atoms)}};
}

template <class R>
Json to_json(const MeasureFamily<R>& f) {
  Json atoms = Json::array();
  for (const auto& a : f.atoms()) {
    Json t = Json::array();
    for (const R& c : a.t) t.push_back(scalar_traits<R>::to_double(c));
    Json rows = Json::array();
    for (int r = 0; r < a.phi.coord_dim(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < a.phi.coord_dim(); ++c)
        row.push_back(to_json_scalar(a.phi.entry(r, c)));
      rows.push_back(std::move(row));
    }
    atoms.push_back(Json{{"t", std::move(t)}, {"map", std::move(rows)}});
  }
  return Json{{"n", f.vars()}, {"m", f.mat_dim()}, {"kind", "family"},
              {"atoms", std::move(atoms)}};
}

inline std::string measure_kind(const Json& j) {
  const Json& k = json_detail::field(j, "kind");
  if (!k.is_string()) throw ValidationError("measure kind must be a string");
  std::string s = k.get<std::string>();
  if (s != "matrix" && s != "operator" && s != "family")
    throw ValidationError("unknown measure kind: " + s);
  return s;
}

template <class R>
AtomicMatrixMeasure<R> matrix_measure_from_json(const Json& j) {
  if (measure_kind(j) != "matrix") throw ValidationError("expected a matrix measure");
  int n = json_detail::int_field(j, "n");
  int m = json_detail::int_field(j, "m");
  json_detail::check_shape(n, m);
  AtomicMatrixMeasure<R> mu(n, m);
  for (const Json& a : json_detail::field(j, "atoms")) {
    std::vector<R> t = json_detail::point<R>(json_detail::field(a, "t"), n);
    HermMatrix<R> w = herm_from_json<R>(json_detail::field(a, "weight"));
    if (w.dim() != m) throw ValidationError("atom weight dimension mismatch");
    mu.add_atom(std::move(t), std::move(w));
  }
  return mu;
}

template <class R>
LinMap<R> linmap_from_rows(const Json& rows, int m) {
  int mm = m * m;
  if (!rows.is_array() || static_cast<int>(rows.size()) != mm)
    throw ValidationError("operator atom map must be an m^2 x m^2 array");
  LinMap<R> phi(m);
  for (int r = 0; r < mm; ++r) {
    const Json& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != mm)
      throw ValidationError("operator atom map must be an m^2 x m^2 array");
    for (int c = 0; c < mm; ++c)
      phi.entry(r, c) = scalar_from_double<R>(row[c].get<double>());
  }
  return phi;
}

template <class R>
AtomicOperatorMeasure<R> operator_measure_from_json(const Json& j) {
  if (measure_kind(j) != "operator") throw ValidationError("expected an operator measure");
  int n = json_detail::int_field(j, "n");
  int m = json_detail::int_field(j, "m");
  json_detail::check_shape(n, m);
  AtomicOperatorMeasure<R> mu(n, m);
  for (const Json& a : json_detail::field(j, "atoms"))
    mu.add_atom(json_detail::point<R>(json_detail::field(a, "t"), n),
                linmap_from_rows<R>(json_detail::field(a, "map"), m));
  return mu;
}

template <class R>
MeasureFamily<R> family_from_json(const Json& j) {
  std::string kind = measure_kind(j);
  int n = json_detail::int_field(j, "n");
  int m = json_detail::int_field(j, "m");
  json_detail::check_shape(n, m);
  if (kind == "operator")  // constant family written as a plain operator measure
    return MeasureFamily<R>::constant(operator_measure_from_json<R>(j));
  if (kind != "family") throw ValidationError("expected a measure family");
  int mm = m * m;
  std::vector<typename MeasureFamily<R>::Atom> atoms;
  int max_deg = 0;
  for (const Json& a : json_detail::field(j, "atoms")) {
    std::vector<R> t = json_detail::point<R>(json_detail::field(a, "t"), n);
    const Json& rows = json_detail::field(a, "map");
    if (!rows.is_array() || static_cast<int>(rows.size()) != mm)
      throw ValidationError("family atom map must be an m^2 x m^2 array");
    LinMapPoly<R> phi(n, m);
    for (int r = 0; r < mm; ++r) {
      const Json& row = rows[r];
      if (!row.is_array() || static_cast<int>(row.size()) != mm)
        throw ValidationError("family atom map must be an m^2 x m^2 array");
      for (int c = 0; c < mm; ++c)
        phi.entry(r, c) = scalar_poly_from_json<R>(row[c], n);
    }
    max_deg = std::max(max_deg, phi.degree());
    atoms.push_back({std::move(t), std::move(phi)});
  }
  MeasureFamily<R> f(n, m,
                     max_deg == 0 ? MeasureFamily<R>::Dependence::Constant
                                  : MeasureFamily<R>::Dependence::PolynomialWeights);
  for (auto& a : atoms) f.add_atom(std::move(a.t), std::move(a.phi));
  return f;
}

// ---------------------------------------------------------------------------
// Certification reports.

inline Json to_json(const Witness& w) {
  Json v = Json::array();
  for (const auto& z : w.v) v.push_back(Json::array({z.re, z.im}));
  return Json{{"p", to_json(w.p)}, {"x", w.x}, {"v", std::move(v)}, {"value", w.value}};
}

inline Json to_json(const CertReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"y", c.y}, {"M", to_json(c.mat)}, {"d", c.half_d},
                          {"min_eig", c.min_eig}, {"passed", c.passed}});
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(to_json(w));
  Json j{{"verdict", verdict_name(r.verdict)}, {"checks", std::move(checks)},
         {"witnesses", std::move(witnesses)}};
  if (r.unconfirmed_failures > 0) j["unconfirmed_failures"] = r.unconfirmed_failures;
  return j;
}

// ---------------------------------------------------------------------------
// Lab reports.

inline Json to_json(const LabReport& r) {
  Json moments = Json::array();
  for (const auto& m : r.moments)
    moments.push_back(Json{{"k", m.k}, {"computed", m.computed},
                           {"reference", m.reference}, {"rel_err", m.rel_err}});
  Json vanishing = Json::array();
  for (const auto& v : r.vanishing)
    vanishing.push_back(Json{{"k", v.k}, {"value", v.value}});
  Json agreement = Json::array();
  for (const auto& a : r.agreement)
    agreement.push_back(Json{{"k", a.k}, {"mu", a.mu_moment}, {"nu", a.nu_moment},
                             {"rel_diff", a.rel_diff}});
  Json convergence = Json::array();
  for (const auto& c : r.convergence)
    convergence.push_back(Json{{"quantity", c.quantity}, {"change", c.change}});
  return Json{
      {"window", r.window},
      {"nodes", r.nodes},
      {"mass_defect", r.mass_defect},
      {"moments", std::move(moments)},
      {"vanishing", std::move(vanishing)},
      {"agreement", std::move(agreement)},
      {"tail", to_json(r.tail)},
      {"tail_min_eig", r.tail_min_eig},
      {"tail_diag_err", r.tail_diag_err},
      {"tail_not_psd", r.tail_not_psd},
      {"tail_sign_stable", r.tail_sign_stable},
      {"convergence", std::move(convergence)},
      {"gates",
       Json{{"mass", r.gate_mass},
            {"moments", r.gate_moments},
            {"vanishing", r.gate_vanishing},
            {"agreement", r.gate_agreement},
            {"tail", r.gate_tail},
            {"convergence", r.gate_convergence}}},
      {"verdict", r.verdict()}};
}

// ---------------------------------------------------------------------------
// Provenance embedding: an operator built from a measure family carries the
// family in its own file, so later checks can re-derive the construction.

template <class R>
Json operator_with_provenance(const OperatorTable<R>& t, const MeasureFamily<R>& f) {
  Json j = to_json(t);
  j["provenance"] = Json{{"family", to_json(f)}, {"degree", t.max_degree()}};
  return j;
}

template <class R>
std::optional<Provenance<R>> provenance_from_json(const Json& operator_json) {
  auto it = operator_json.find("provenance");
  if (it == operator_json.end()) return std::nullopt;
  Provenance<R> p;
  p.family = family_from_json<R>(json_detail::field(*it, "family"));
  p.degree = json_detail::int_field(*it, "degree");
  return p;
}

}  // namespace matpres
