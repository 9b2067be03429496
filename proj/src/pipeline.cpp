#include "superosp/pipeline.hpp"

#include <fstream>
#include <sstream>

namespace superosp {

using nlohmann::ordered_json;

namespace {

Rat json_rat(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rat(v.get<long>());
  if (v.is_string()) return parse_rat(v.get<std::string>());
  throw std::invalid_argument(
      "rational entries must be integers or \"p/q\" strings");
}

}  // namespace

InstanceSpec parse_instance_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  InstanceSpec spec;
  if (j.contains("name")) spec.name = j["name"].get<std::string>();

  const nlohmann::json& f = j.contains("form") ? j.at("form") : j;
  const nlohmann::json& alg = f.at("algebra");
  spec.algebra = alg.is_string() ? preset_table(alg.get<std::string>())
                                 : table_from_json_text(alg.dump());
  {
    ValidationReport vr = validate_table(*spec.algebra);
    if (!vr.ok)
      throw std::invalid_argument("algebra table violates axiom: " +
                                  vr.violations.front().axiom);
  }

  int rank = f.at("rank").get<int>();
  std::vector<Parity> degs;
  for (int d : f.at("degrees").get<std::vector<int>>()) {
    if (d != 0 && d != 1)
      throw std::invalid_argument("module degrees must be 0/1");
    degs.push_back(d ? Parity::odd : Parity::even);
  }
  if (static_cast<int>(degs.size()) != rank)
    throw std::invalid_argument("degrees length does not match rank");
  ModulePtr mod = make_module(spec.algebra, degs);

  const nlohmann::json& gram = f.at("gram");
  if (static_cast<int>(gram.size()) != rank)
    throw std::invalid_argument("gram must be rank x rank");
  std::vector<std::vector<AlgebraElement>> g;
  for (const auto& row : gram) {
    if (static_cast<int>(row.size()) != rank)
      throw std::invalid_argument("gram must be rank x rank");
    std::vector<AlgebraElement> grow;
    for (const auto& ent : row) {
      if (ent.is_array()) {
        if (static_cast<int>(ent.size()) != spec.algebra->dim)
          throw std::invalid_argument(
              "gram coefficient vector has wrong length");
        RatVec c;
        for (const auto& x : ent) c.push_back(json_rat(x));
        grow.push_back({spec.algebra, c});
      } else {
        grow.push_back(
            scale(json_rat(ent), AlgebraElement::one(spec.algebra)));
      }
    }
    g.push_back(std::move(grow));
  }
  spec.form = make_form(mod, g);

  std::string e = j.value("E", std::string("eosp"));
  if (e == "eosp")
    spec.e_choice = EChoice::eosp;
  else if (e == "osp")
    spec.e_choice = EChoice::osp;
  else
    throw std::invalid_argument("E must be \"eosp\" or \"osp\"");
  return spec;
}

InstanceSpec load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance_text(ss.str());
}

int default_max_dim() {
  if (const char* env = std::getenv("SUPEROSP_MAX_DIM")) {
    try {
      return std::stoi(env);
    } catch (...) {
    }
  }
  return 40;
}

namespace {

struct LoadedInstance {
  InstanceSpec spec;
  EInftyAlgebra L;
  BuildReport build;
};

// Shared front section of every command: parse, validate, build.
// Returns exit 2 on parse problems, exit 1 with a named axiom on validation
// failure; on success fills `out`.
int front_checks(const std::string& path, ordered_json& rep,
                 InstanceSpec& spec) {
  try {
    spec = load_instance(path);
  } catch (const nlohmann::json::exception& e) {
    rep["error"] = std::string("parse error: ") + e.what();
    return 2;
  } catch (const std::invalid_argument& e) {
    // distinguish malformed input (parse) from axiom violations
    std::string msg = e.what();
    rep["error"] = msg;
    return msg.find("axiom") != std::string::npos ? 1 : 2;
  }
  rep["instance"] = spec.name;
  ValidationReport fv = spec.form->validate();
  if (!fv.ok) {
    rep["error"] = "form violates axiom: " + fv.violations.front().axiom;
    return 1;
  }
  return 0;
}

ordered_json dims_of(const EInftyAlgebra& L, const Subspace& z) {
  ordered_json d;
  d["L"] = L.dim;
  d["L0"] = L.dim_a + L.dim_e;
  d["Lplus"] = L.qdim;
  d["Lminus"] = L.qdim;
  d["centre"] = z.dim();
  return d;
}

}  // namespace

CmdResult cmd_verify(const std::string& spec_path, const CmdOptions& opt) {
  CmdResult res;
  ordered_json& rep = res.report;
  InstanceSpec spec;
  int rc = front_checks(spec_path, rep, spec);
  if (rc) {
    res.exit_code = rc;
    return res;
  }

  OspBasis osp = osp_basis(spec.form);
  OspBasis eosp = eosp_basis(spec.form);
  rep["dims_osp"] = ordered_json{{"osp", osp.dim()},
                                 {"osp_even", osp.dim_of(Parity::even)},
                                 {"osp_odd", osp.dim_of(Parity::odd)},
                                 {"eosp", eosp.dim()}};

  EIdentityReport eid = check_E_identities(spec.form, opt.samples, opt.seed);
  rep["e_identities"] =
      ordered_json{{"ok", eid.ok},
                   {"samples", eid.samples},
                   {"first_failure", eid.first_failure}};

  BuildReport build;
  EInftyAlgebra L;
  try {
    L = build_einfty(spec.form, spec.e_choice, {}, &build);
  } catch (const std::exception& e) {
    rep["jacobi"] = build.jacobi;
    rep["toral"] = build.toral;
    rep["error"] = e.what();
    res.exit_code = 1;
    return res;
  }
  Subspace z = centre(L);
  rep["dims"] = dims_of(L, z);
  rep["sl1"] = build.sl1;
  rep["jacobi"] = build.jacobi;
  rep["grading"] = build.grading3;
  rep["toral"] = build.toral;

  bool iso_ok = true;
  if (spec.e_choice == EChoice::eosp) {
    IsoReport ir = iso_to_eosp_qinf(L);
    iso_ok = ir.ok();
    rep["iso_qinf"] = ordered_json{{"ok", ir.ok()},
                                   {"dim_l", ir.dim_l},
                                   {"dim_eosp_qinf", ir.dim_eosp_qinf},
                                   {"first_failure", ir.first_failure}};
  }

  bool ok = build.ok() && eid.ok && iso_ok && z.dim() == 0;
  rep["ok"] = ok;
  res.exit_code = ok ? 0 : 1;
  if (!ok && rep.find("error") == rep.end()) {
    if (!eid.ok)
      rep["error"] = eid.first_failure;
    else if (!iso_ok)
      rep["error"] = "iso_to_eosp_qinf failed";
    else
      rep["error"] = build.first_failure;
  }
  return res;
}

CmdResult cmd_derive(const std::string& spec_path, const CmdOptions& opt) {
  CmdResult res;
  ordered_json& rep = res.report;
  InstanceSpec spec;
  int rc = front_checks(spec_path, rep, spec);
  if (rc) {
    res.exit_code = rc;
    return res;
  }

  EInftyAlgebra L;
  try {
    L = build_einfty(spec.form, spec.e_choice);
  } catch (const std::exception& e) {
    rep["error"] = e.what();
    res.exit_code = 1;
    return res;
  }
  if (L.dim > opt.max_dim && !opt.force) {
    rep["error"] = "instance dimension " + std::to_string(L.dim) +
                   " exceeds the guardrail " + std::to_string(opt.max_dim) +
                   " (use --force)";
    res.exit_code = 1;
    return res;
  }

  DerivationAnalysis A = analyze_derivations(L);
  SDecompReport sd = verify_s_decompositions(spec.form);
  const MainTheoremReport& m = A.main;

  rep["dims"] = ordered_json{
      {"der", m.dim_der}, {"ad", m.dim_ad},   {"der0", m.dim_der0},
      {"S", m.dim_s},     {"S1", m.dim_s1},   {"S2", m.dim_s2},
      {"S3", m.dim_s3},   {"T", m.dim_t},     {"T1", m.dim_t1},
      {"T2", m.dim_t2},   {"T3", m.dim_t3},   {"DM", m.dim_dm},
      {"outer", m.dim_outer}};
  bool s_decomp_ok = !sd.applicable || sd.ok();
  rep["checks"] = ordered_json{
      {"main1", m.main1},       {"main2", m.main2},
      {"main3", m.main3},       {"main4_split", m.main4_split},
      {"toral", m.toral_ok},    {"t_is_AId", m.t_is_a_id},
      {"s_decomp", s_decomp_ok}};
  rep["splitting"] = ordered_json{
      {"inner_ideal", m.inner_ideal},
      {"complement_subalgebra", m.complement_subalgebra}};
  rep["s_shape"] = sd.shape;
  rep["dm_injective"] = m.dm_injective;

  bool ok = m.main1 && m.main2 && m.main3 && m.toral_ok && m.dm_injective &&
            s_decomp_ok;
  rep["ok"] = ok;
  res.exit_code = ok ? 0 : 1;
  if (!ok) rep["error"] = "a structure check failed; see checks";
  return res;
}

CmdResult cmd_jordan(const std::string& spec_path, const CmdOptions& opt) {
  CmdResult res;
  ordered_json& rep = res.report;
  InstanceSpec spec;
  int rc = front_checks(spec_path, rep, spec);
  if (rc) {
    res.exit_code = rc;
    return res;
  }

  std::vector<SuperEndo> ebasis = spec.e_choice == EChoice::eosp
                                      ? eosp_basis(spec.form).vecs
                                      : osp_basis(spec.form).vecs;
  JordanQF J = make_jordan(spec.form);
  JordanModuleX X = make_jordan_module(spec.form, ebasis);
  JordanAxiomReport ja = verify_jordan_axioms(J, opt.seed);
  JordanModuleReport jm = verify_module_axioms(J, X);
  DerStarReport ds = der_star_isos(J, X);

  ordered_json jj;
  jj["dims"] = ordered_json{{"J", J.dim},
                            {"X", X.dim},
                            {"der_star_J", ds.dim_der_star_j},
                            {"S1capS2", ds.dim_s12},
                            {"der_star_JX", ds.dim_der_star_jx},
                            {"T1capT2", ds.dim_t12}};
  jj["axioms"] = ordered_json{{"JSA1", ja.jsa1},
                              {"JSA2", ja.jsa2},
                              {"JSA3", ja.jsa3},
                              {"JSA2_sampled", ja.jsa2_sampled},
                              {"JSA2_checks", ja.jsa2_checks},
                              {"JSAM1", jm.jsam1},
                              {"JSAM2", jm.jsam2},
                              {"JSAM3", jm.jsam3}};
  jj["isos"] = ordered_json{
      {"s_restriction_bijective", ds.s_restriction_bijective},
      {"s_bracket_compatible", ds.s_bracket_compatible},
      {"t_restriction_bijective", ds.t_restriction_bijective}};
  rep["jordan"] = jj;

  bool ok = ja.ok() && jm.ok() && ds.ok();
  rep["ok"] = ok;
  res.exit_code = ok ? 0 : 1;
  if (!ok) {
    std::string msg = ja.first_failure + jm.first_failure + ds.first_failure;
    rep["error"] = msg.empty() ? "jordan checks failed" : msg;
  }
  return res;
}

CmdResult cmd_dims(const std::string& spec_path, const CmdOptions& opt) {
  (void)opt;
  CmdResult res;
  ordered_json& rep = res.report;
  InstanceSpec spec;
  int rc = front_checks(spec_path, rep, spec);
  if (rc) {
    res.exit_code = rc;
    return res;
  }
  OspBasis osp = osp_basis(spec.form);
  OspBasis eosp = eosp_basis(spec.form);
  GradedSubspace rad = radical(*spec.form);
  GradedSubspace ders = algebra_derivations(spec.algebra);
  rep["algebra"] = ordered_json{{"dim", spec.algebra->dim},
                                {"derivations", ders.dim()}};
  rep["module"] = ordered_json{{"rank", spec.form->mod()->rank},
                               {"qdim", spec.form->qdim()},
                               {"radical", rad.dim()}};
  rep["osp"] = ordered_json{{"total", osp.dim()},
                            {"even", osp.dim_of(Parity::even)},
                            {"odd", osp.dim_of(Parity::odd)}};
  rep["eosp"] = ordered_json{{"total", eosp.dim()},
                             {"even", eosp.dim_of(Parity::even)},
                             {"odd", eosp.dim_of(Parity::odd)}};
  int dim_e = spec.e_choice == EChoice::eosp ? eosp.dim() : osp.dim();
  rep["L"] = spec.algebra->dim + 2 * spec.form->qdim() + dim_e;
  rep["ok"] = true;
  return res;
}

namespace {
void flatten(const ordered_json& j, const std::string& prefix,
             std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    out << prefix << ": " << j.dump() << "\n";
  }
}
}  // namespace

std::string report_text(const ordered_json& j) {
  std::ostringstream out;
  flatten(j, "", out);
  return out.str();
}

}  // namespace superosp
