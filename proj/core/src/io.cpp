#include "homog/io.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "homog/version.hpp"

namespace homog::io {

using fields::CoefficientField;
using fields::Kind;
using fields::ScalarExpr;
using fields::Structure;
using fields::Term;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!obj.is_object())
    throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

namespace {

json term_to_json(const Term& t, const std::string& component) {
  json j;
  j["component"] = component;
  switch (t.type) {
    case Term::Type::constant:
      j["type"] = "const";
      j["value"] = t.value;
      break;
    case Term::Type::trig:
      j["type"] = "trig";
      j["fn"] = t.is_sin ? "sin" : "cos";
      j["coef"] = t.coef;
      j["kx"] = t.kx;
      j["ky"] = t.ky;
      break;
    case Term::Type::gaussian:
      j["type"] = "gaussian";
      j["amp"] = t.amp;
      j["cx"] = t.cx;
      j["cy"] = t.cy;
      j["sigma"] = t.sigma;
      break;
  }
  return j;
}

Term term_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  Term t;
  if (type == "const") {
    check_keys(j, {"type", "component", "value"}, "const term");
    t.type = Term::Type::constant;
    t.value = j.at("value").get<double>();
  } else if (type == "trig") {
    check_keys(j, {"type", "component", "fn", "coef", "kx", "ky"}, "trig term");
    t.type = Term::Type::trig;
    const std::string fn = j.value("fn", "cos");
    if (fn != "cos" && fn != "sin")
      throw ConfigError("trig term fn must be cos or sin");
    t.is_sin = fn == "sin";
    t.coef = j.at("coef").get<double>();
    t.kx = j.value("kx", 0.0);
    t.ky = j.value("ky", 0.0);
  } else if (type == "gaussian") {
    check_keys(j, {"type", "component", "amp", "cx", "cy", "sigma"},
               "gaussian term");
    t.type = Term::Type::gaussian;
    t.amp = j.at("amp").get<double>();
    t.cx = j.value("cx", 0.0);
    t.cy = j.value("cy", 0.0);
    t.sigma = j.at("sigma").get<double>();
  } else {
    throw ConfigError("unknown term type '" + type + "'");
  }
  return t;
}

}  // namespace

json field_to_json(const CoefficientField& f) {
  json j;
  j["kind"] = fields::to_string(f.kind());
  j["structure"] = fields::to_string(f.structure());
  json terms = json::array();
  const auto& comps = f.components();
  static const char* matrix_names[] = {"a11", "a12", "a22"};
  static const char* vector_names[] = {"v1", "v2"};
  for (size_t c = 0; c < comps.size(); ++c) {
    std::string name;
    if (f.kind() == Kind::matrix2) name = matrix_names[c];
    else if (f.kind() == Kind::vector2) name = vector_names[c];
    else name = "u";
    for (const Term& t : comps[c].terms) terms.push_back(term_to_json(t, name));
  }
  j["terms"] = std::move(terms);
  if (f.kind() == Kind::matrix2) {
    j["alpha"] = f.alpha();
    j["beta"] = f.beta();
  } else {
    j["alpha0"] = f.alpha0();
  }
  return j;
}

CoefficientField field_from_json(const json& j) {
  check_keys(j, {"kind", "structure", "terms", "alpha", "beta", "alpha0"},
             "field");
  const Kind kind = fields::kind_from_string(j.at("kind").get<std::string>());
  const Structure structure =
      fields::structure_from_string(j.at("structure").get<std::string>());

  const size_t ncomp = kind == Kind::matrix2 ? 3 : (kind == Kind::vector2 ? 2 : 1);
  std::vector<ScalarExpr> comps(ncomp);
  auto comp_index = [&](const std::string& name) -> std::vector<size_t> {
    if (kind == Kind::matrix2) {
      if (name == "a11") return {0};
      if (name == "a12") return {1};
      if (name == "a22") return {2};
      if (name == "iso") return {0, 2};
    } else if (kind == Kind::vector2) {
      if (name == "v1") return {0};
      if (name == "v2") return {1};
    } else {
      if (name == "u" || name.empty()) return {0};
    }
    throw ConfigError("unknown component '" + name + "' for kind " +
                      fields::to_string(kind));
  };

  if (j.contains("terms")) {
    for (const json& tj : j.at("terms")) {
      const Term t = term_from_json(tj);
      const std::string comp =
          tj.value("component", kind == Kind::scalar ? "u" : "");
      for (size_t c : comp_index(comp)) comps[c].terms.push_back(t);
    }
  }

  if (kind == Kind::matrix2) {
    const double alpha = j.at("alpha").get<double>();
    const double beta = j.at("beta").get<double>();
    return CoefficientField::matrix(comps[0], comps[1], comps[2], structure,
                                    alpha, beta);
  }
  const double alpha0 = j.value("alpha0", 0.0);
  if (kind == Kind::vector2)
    return CoefficientField::vector(comps[0], comps[1], structure, alpha0);
  return CoefficientField::scalar(comps[0], structure, alpha0);
}

json expr_to_json(const ScalarExpr& e) {
  json terms = json::array();
  for (const Term& t : e.terms) terms.push_back(term_to_json(t, "u"));
  return json{{"terms", std::move(terms)}};
}

ScalarExpr expr_from_json(const json& j) {
  check_keys(j, {"terms"}, "expression");
  ScalarExpr e;
  if (j.contains("terms"))
    for (const json& tj : j.at("terms")) e.terms.push_back(term_from_json(tj));
  return e;
}

json cell_solution_to_json(const cell::CellSolution& sol) {
  json j;
  j["n"] = sol.grid.n;
  j["chi1"] = sol.chi1.values;
  j["chi2"] = sol.chi2.values;
  j["chi0"] = sol.chi0.values;
  j["sup_chi1"] = sol.sup_chi1;
  j["sup_chi2"] = sol.sup_chi2;
  j["sup_chi0"] = sol.sup_chi0;
  j["version"] = kVersion;
  return j;
}

json homogenized_to_json(const cell::HomogenizedCoefficients& c) {
  json j;
  j["A_hat"] = {{c.A_hat.a11, c.A_hat.a12}, {c.A_hat.a21, c.A_hat.a22}};
  j["B_hat"] = {c.B_hat.x, c.B_hat.y};
  j["V_hat"] = {c.V_hat.x, c.V_hat.y};
  j["a0_hat"] = c.a0_hat;
  j["mu"] = c.mu;
  j["version"] = kVersion;
  return j;
}

json meanvalue_to_json(const fields::MeanValueEstimate& est) {
  json j;
  j["value"] = est.value;
  j["radii"] = est.radii;
  j["partials"] = est.partials;
  j["converged"] = est.converged;
  j["version"] = kVersion;
  return j;
}

json rate_report_to_json(const rates::RateReport& report) {
  json rows = json::array();
  for (const rates::RateRow& r : report.rows) {
    rows.push_back({{"eps", r.eps},
                    {"m_fine", r.m_fine},
                    {"ok", r.ok},
                    {"errL2_zero_order", r.errL2_zero_order},
                    {"errH1_first_order", r.errH1_first_order},
                    {"errH1_plain", r.errH1_plain},
                    {"errH1_interior", r.errH1_interior},
                    {"normH1_ueps", r.normH1_ueps},
                    {"stability", r.stability},
                    {"fem_budget", r.fem_budget},
                    {"budget_ok", r.budget_ok},
                    {"note", r.note}});
  }
  json j;
  j["rows"] = std::move(rows);
  j["has_slopes"] = report.has_slopes;
  if (report.has_slopes) {
    auto fit = [](const rates::SlopeFit& f) {
      return json{{"slope", f.slope},
                  {"prefactor", f.prefactor},
                  {"r_squared", f.r_squared}};
    };
    j["slopeL2"] = fit(report.slopeL2);
    j["slopeH1"] = fit(report.slopeH1);
    j["slopeH1_plain"] = fit(report.slopeH1_plain);
    j["slopeH1_interior"] = fit(report.slopeH1_interior);
  }
  j["fit_note"] = report.fit_note;
  j["mu_effective"] = report.mu_effective;
  j["homogenized"] = homogenized_to_json(report.coeffs);
  j["sup_chi"] = report.sup_chi;
  j["config_digest"] = report.config_digest;
  j["version"] = kVersion;
  return j;
}

std::string fnv1a_digest(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_field_binary(const grid::DiscreteField& u, const std::string& dir,
                        const std::string& stem, const std::string& digest) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string data_name = stem + ".f64";
  json header;
  header["type"] = "discrete_field";
  header["m"] = u.m;
  header["boundary"] = u.boundary == grid::BoundaryTag::dirichlet ? "dirichlet"
                       : u.boundary == grid::BoundaryTag::periodic ? "periodic"
                                                                   : "free";
  header["dtype"] = "float64";
  header["byte_order"] = "little";
  header["order"] = "row-major";
  header["count"] = u.values.size();
  header["data_file"] = data_name;
  header["config_digest"] = digest;
  header["version"] = kVersion;
  write_text_file((fs::path(dir) / (stem + ".json")).string(), header.dump(2) + "\n");

  std::ofstream out(fs::path(dir) / data_name, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + data_name);
  out.write(reinterpret_cast<const char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
}

grid::DiscreteField read_field_binary(const std::string& header_path) {
  namespace fs = std::filesystem;
  std::ifstream in(header_path);
  if (!in) throw ConfigError("cannot open field header " + header_path);
  json header = json::parse(in);
  grid::DiscreteField u;
  u.m = header.at("m").get<int>();
  const std::string b = header.at("boundary").get<std::string>();
  u.boundary = b == "dirichlet" ? grid::BoundaryTag::dirichlet
               : b == "periodic" ? grid::BoundaryTag::periodic
                                 : grid::BoundaryTag::free;
  const size_t count = header.at("count").get<size_t>();
  u.values.resize(count);
  const fs::path data_path =
      fs::path(header_path).parent_path() / header.at("data_file").get<std::string>();
  std::ifstream data(data_path, std::ios::binary);
  if (!data) throw ConfigError("cannot open field data " + data_path.string());
  data.read(reinterpret_cast<char*>(u.values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<size_t>(data.gcount()) != count * sizeof(double))
    throw ConfigError("field data file truncated: " + data_path.string());
  return u;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path);
  out << content;
}

}  // namespace homog::io
