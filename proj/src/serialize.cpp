#include "hiw/serialize.hpp"

#include "hiw/error.hpp"

namespace hiw {

using nlohmann::json;

namespace {

json cj(cplx z) { return json::array({z.real(), z.imag()}); }
cplx jc(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json vec_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const cplx& z : v) out.push_back(cj(z));
  return out;
}
std::vector<cplx> json_vec(const json& j) {
  std::vector<cplx> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(jc(e));
  return v;
}

json vector_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(cj(v(i)));
  return out;
}
Eigen::VectorXcd json_vector(const json& j) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = jc(j[i]);
  return v;
}

json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cj(m(r, c)));
    rows.push_back(row);
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}
Eigen::MatrixXcd json_matrix(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
  Eigen::MatrixXcd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index l = 0; l < c; ++l) m(i, l) = jc(j.at("data").at(i).at(l));
  return m;
}

json prime_map_json(const std::map<int, cplx>& m) {
  json out = json::object();
  for (const auto& [p, v] : m) out[std::to_string(p)] = cj(v);
  return out;
}

}  // namespace

json to_json(const QExpansion& f) {
  return json{{"constant", cj(f.constant)},
              {"coeffs", vec_json(f.coeffs)},
              {"coeff_error", f.coeff_error},
              {"tail_bound_exponent", f.tail_bound_exponent},
              {"tail_constant", f.tail_constant}};
}

QExpansion qexpansion_from_json(const json& j) {
  QExpansion f;
  f.constant = jc(j.at("constant"));
  f.coeffs = json_vec(j.at("coeffs"));
  f.coeff_error = j.at("coeff_error").get<std::vector<double>>();
  f.tail_bound_exponent = j.at("tail_bound_exponent").get<double>();
  f.tail_constant = j.at("tail_constant").get<double>();
  return f;
}

json to_json(const Space& s) {
  json basis = json::array();
  for (const auto& b : s.basis) basis.push_back(to_json(b));
  return json{{"params", {{"k", s.params.k}, {"N", s.params.N}, {"character_index", s.params.character_index}}},
              {"M", s.M},
              {"c_max", s.c_max},
              {"d", s.d},
              {"generators", s.generators},
              {"basis", basis},
              {"gram_spectrum", s.gram_spectrum},
              {"gram", matrix_json(s.gram)},
              {"hecke_primes", s.hecke_primes},
              {"theta_ring_dimension", s.theta_ring_dimension}};
}

Space space_from_json(const json& j) {
  Space s;
  const auto& p = j.at("params");
  s.params = make_space_params(p.at("k").get<int>(), p.at("N").get<int>(), p.at("character_index").get<int>());
  s.M = j.at("M").get<int>();
  s.c_max = j.at("c_max").get<std::int64_t>();
  s.d = j.at("d").get<int>();
  s.generators = j.at("generators").get<std::vector<int>>();
  for (const auto& b : j.at("basis")) s.basis.push_back(qexpansion_from_json(b));
  s.gram_spectrum = j.at("gram_spectrum").get<std::vector<double>>();
  s.gram = json_matrix(j.at("gram"));
  s.hecke_primes = j.at("hecke_primes").get<std::vector<int>>();
  s.theta_ring_dimension = j.at("theta_ring_dimension").get<int>();
  if (static_cast<int>(s.basis.size()) != s.d || static_cast<int>(s.generators.size()) != s.d)
    fail(ErrorKind::InvalidArgument, "space document: basis size does not match d");
  return s;
}

json to_json(const Eigenbasis& eb) {
  json forms = json::array();
  for (const auto& r : eb.forms)
    forms.push_back(json{{"expansion", to_json(r.expansion)},
                         {"fricke_image", to_json(r.fricke_image)},
                         {"hecke_eigenvalues", prime_map_json(r.hecke_eigenvalues)},
                         {"lambda", r.lambda},
                         {"petersson_norm", r.petersson_norm},
                         {"a1", cj(r.a1)},
                         {"poincare_coords", vector_json(r.poincare_coords)},
                         {"unresolved_multiplicity", r.unresolved_multiplicity}});
  json hecke = json::object();
  for (const auto& [p, m] : eb.hecke) hecke[std::to_string(p)] = matrix_json(m);
  return json{{"forms", forms},
              {"hecke", hecke},
              {"fricke", {{"matrix", matrix_json(eb.fricke.matrix)}, {"residual", eb.fricke.residual}}},
              {"fricke_target_character", eb.fricke_target_character}};
}

Eigenbasis eigenbasis_from_json(const json& j) {
  Eigenbasis eb;
  for (const auto& f : j.at("forms")) {
    EigenformRecord r;
    r.expansion = qexpansion_from_json(f.at("expansion"));
    r.fricke_image = qexpansion_from_json(f.at("fricke_image"));
    for (const auto& [p, v] : f.at("hecke_eigenvalues").items()) r.hecke_eigenvalues[std::stoi(p)] = jc(v);
    r.lambda = f.at("lambda").get<int>();
    r.petersson_norm = f.at("petersson_norm").get<double>();
    r.a1 = jc(f.at("a1"));
    r.poincare_coords = json_vector(f.at("poincare_coords"));
    r.unresolved_multiplicity = f.at("unresolved_multiplicity").get<bool>();
    eb.forms.push_back(std::move(r));
  }
  for (const auto& [p, m] : j.at("hecke").items()) eb.hecke[std::stoi(p)] = json_matrix(m);
  eb.fricke.matrix = json_matrix(j.at("fricke").at("matrix"));
  eb.fricke.residual = j.at("fricke").at("residual").get<double>();
  eb.fricke_target_character = j.at("fricke_target_character").get<int>();
  return eb;
}

json to_json(const FormsDocument& doc) {
  json j{{"schema", "hiw-forms"}, {"version", kFormsSchemaVersion}, {"space", to_json(doc.space)},
         {"eigenbasis", to_json(doc.eigen)}};
  j["twisted"] = doc.twisted ? to_json(*doc.twisted) : json(nullptr);
  return j;
}

FormsDocument forms_from_json(const json& j) {
  if (j.value("schema", "") != "hiw-forms" || j.value("version", 0) != kFormsSchemaVersion)
    fail(ErrorKind::InvalidArgument, "not a hiw-forms document of version " + std::to_string(kFormsSchemaVersion));
  FormsDocument doc;
  doc.space = space_from_json(j.at("space"));
  if (!j.at("twisted").is_null()) doc.twisted = space_from_json(j.at("twisted"));
  doc.eigen = eigenbasis_from_json(j.at("eigenbasis"));
  return doc;
}

FormsDocument build_forms(const SpaceParams& params, const SpaceOptions& options) {
  FormsDocument doc;
  doc.space = space_basis(params, options);
  const int target = fricke_character_index(params);
  if (target != params.character_index && doc.space.d > 0) {
    SpaceOptions opt = options;
    opt.M = doc.space.M;
    opt.c_max = doc.space.c_max;
    doc.twisted = space_basis(make_space_params(params.k, params.N, target), opt);
  }
  doc.eigen = eigenbasis(doc.space, doc.twisted ? &*doc.twisted : nullptr);
  return doc;
}

const Space& fricke_target(const FormsDocument& doc) { return doc.twisted ? *doc.twisted : doc.space; }

std::string dump(const json& j) { return j.dump(1); }

}  // namespace hiw
