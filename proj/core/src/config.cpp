#include <porofss/config.hpp>

#include <porofss/error.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace porofss {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& section) {
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError("config: unknown key '" + section + "." + item.key() +
                        "'");
    }
  }
}

const json& require(const json& obj, const std::string& key,
                    const std::string& section) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError("config: missing required key '" + section + "." + key +
                      "'");
  }
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) {
    throw ConfigError("config: '" + where + "' must be a number");
  }
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) {
    throw ConfigError("config: '" + where + "' must be an integer");
  }
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) {
    throw ConfigError("config: '" + where + "' must be a boolean");
  }
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) {
    throw ConfigError("config: '" + where + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<double> as_array(const json& v, size_t n, const std::string& where) {
  if (!v.is_array() || v.size() != n) {
    throw ConfigError("config: '" + where + "' must be an array of " +
                      std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

/// Symmetric 3x3 from 6 entries in 11, 22, 33, 23, 13, 12 order, or a
/// scalar multiple of the identity.
Mat3 as_sym_tensor(const json& v, const std::string& where) {
  if (v.is_number()) {
    return v.get<double>() * Mat3::Identity();
  }
  const auto a = as_array(v, 6, where);
  Mat3 m;
  m << a[0], a[5], a[4],
       a[5], a[1], a[3],
       a[4], a[3], a[2];
  return m;
}

ElasticityTensor parse_stiffness(const json& v) {
  if (v.is_object()) {
    reject_unknown_keys(v, {"E", "nu"}, "materials.D");
    const double E = as_number(require(v, "E", "materials.D"), "materials.D.E");
    const double nu =
        as_number(require(v, "nu", "materials.D"), "materials.D.nu");
    return ElasticityTensor::isotropic(E, nu);
  }
  if (v.is_array() && v.size() == 21) {
    // Upper triangle of the 6x6 stiffness, row major.
    const auto a = as_array(v, 21, "materials.D");
    Mat6 m;
    int idx = 0;
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) {
        m(i, j) = a[idx];
        m(j, i) = a[idx];
        ++idx;
      }
    }
    return ElasticityTensor::from_matrix(m);
  }
  throw ConfigError("config: 'materials.D' must be either {E, nu} or an "
                    "array of the 21 independent stiffness entries "
                    "(upper triangle, row major)");
}

FaceBoundary parse_plane(const json& v, const std::string& section) {
  if (!v.is_object()) {
    throw ConfigError("config: '" + section + "' must be an object");
  }
  reject_unknown_keys(v, {"flow", "g", "mech", "t"}, section);
  FaceBoundary fb;

  const std::string flow =
      as_string(require(v, "flow", section), section + ".flow");
  if (flow == "pressure") {
    fb.flow = FlowBc::Pressure;
    if (v.contains("g")) {
      fb.pressure = as_number(v["g"], section + ".g");
    }
  } else if (flow == "noflux") {
    fb.flow = FlowBc::NoFlux;
    if (v.contains("g")) {
      throw ConfigError("config: '" + section + ".g' is only valid with "
                        "flow = 'pressure'");
    }
  } else {
    throw ConfigError("config: '" + section + ".flow' must be 'pressure' or "
                      "'noflux', got '" + flow + "'");
  }

  const std::string mech =
      as_string(require(v, "mech", section), section + ".mech");
  if (mech == "fixed") {
    fb.mech = MechBc::Fixed;
  } else if (mech == "roller") {
    fb.mech = MechBc::Roller;
  } else if (mech == "traction") {
    fb.mech = MechBc::Traction;
    if (v.contains("t")) {
      const auto t = as_array(v["t"], 3, section + ".t");
      fb.traction = Vec3(t[0], t[1], t[2]);
    }
  } else {
    throw ConfigError("config: '" + section + ".mech' must be 'fixed', "
                      "'roller' or 'traction', got '" + mech + "'");
  }
  if (mech != "traction" && v.contains("t")) {
    throw ConfigError("config: '" + section + ".t' is only valid with "
                      "mech = 'traction'");
  }
  return fb;
}

SimConfig parse_json(const json& root) {
  if (!root.is_object()) {
    throw ConfigError("config: top level must be a JSON object");
  }
  reject_unknown_keys(root,
                      {"grid", "materials", "yield", "bc", "time", "coupling",
                       "output", "source", "initial"},
                      "<top>");

  // grid + bc (the grid constructor needs the boundary tags)
  const json& jg = require(root, "grid", "<top>");
  reject_unknown_keys(jg, {"nx", "ny", "nz", "lx", "ly", "lz"}, "grid");
  const int nx = as_int(require(jg, "nx", "grid"), "grid.nx");
  const int ny = as_int(require(jg, "ny", "grid"), "grid.ny");
  const int nz = as_int(require(jg, "nz", "grid"), "grid.nz");
  const double lx = as_number(require(jg, "lx", "grid"), "grid.lx");
  const double ly = as_number(require(jg, "ly", "grid"), "grid.ly");
  const double lz = as_number(require(jg, "lz", "grid"), "grid.lz");
  if (nx < 1 || ny < 1 || nz < 1) {
    throw ConfigError("config: grid.nx/ny/nz must be >= 1");
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0)) {
    throw ConfigError("config: grid.lx/ly/lz must be > 0");
  }

  const json& jb = require(root, "bc", "<top>");
  static const char* plane_keys[6] = {"xmin", "xmax", "ymin",
                                      "ymax", "zmin", "zmax"};
  reject_unknown_keys(jb, {plane_keys[0], plane_keys[1], plane_keys[2],
                           plane_keys[3], plane_keys[4], plane_keys[5]},
                      "bc");
  BoundarySpec bc;
  for (int p = 0; p < 6; ++p) {
    const std::string section = std::string("bc.") + plane_keys[p];
    bc.plane[p] = parse_plane(require(jb, plane_keys[p], "bc"), section);
  }

  SimConfig cfg(Grid(nx, ny, nz, lx / nx, ly / ny, lz / nz, bc));

  // materials
  const json& jm = require(root, "materials", "<top>");
  reject_unknown_keys(jm,
                      {"D", "alpha", "M", "beta", "K", "mu", "c", "rho0",
                       "rho_r", "phi0", "gravity"},
                      "materials");
  cfg.materials.D = parse_stiffness(require(jm, "D", "materials"));

  const Mat3 alpha =
      as_sym_tensor(require(jm, "alpha", "materials"), "materials.alpha");
  const double M = as_number(require(jm, "M", "materials"), "materials.M");
  std::optional<Mat3> beta;
  if (jm.contains("beta")) {
    const json& jbeta = jm["beta"];
    if (jbeta.is_string()) {
      if (as_string(jbeta, "materials.beta") != "alpha") {
        throw ConfigError("config: 'materials.beta' as a string must be "
                          "'alpha'");
      }
    } else {
      beta = as_sym_tensor(jbeta, "materials.beta");
    }
  }
  cfg.materials.couple =
      derive_coupling_constants(cfg.materials.D, alpha, M, beta);

  FlowProps& fp = cfg.materials.flow;
  const json& jk = require(jm, "K", "materials");
  if (jk.is_number()) {
    fp.K = jk.get<double>() * Mat3::Identity();
  } else {
    const auto kd = as_array(jk, 3, "materials.K");
    fp.K = Mat3::Zero();
    fp.K(0, 0) = kd[0];
    fp.K(1, 1) = kd[1];
    fp.K(2, 2) = kd[2];
  }
  fp.mu = as_number(require(jm, "mu", "materials"), "materials.mu");
  fp.c = jm.contains("c") ? as_number(jm["c"], "materials.c") : 0.0;
  fp.rho0 = jm.contains("rho0") ? as_number(jm["rho0"], "materials.rho0") : 0.0;
  fp.rho_r =
      jm.contains("rho_r") ? as_number(jm["rho_r"], "materials.rho_r") : 0.0;
  fp.phi0 = jm.contains("phi0") ? as_number(jm["phi0"], "materials.phi0") : 0.1;
  if (jm.contains("gravity")) {
    const auto gv = as_array(jm["gravity"], 3, "materials.gravity");
    fp.gravity = Vec3(gv[0], gv[1], gv[2]);
  }
  validate_flow_props(fp, cfg.grid.num_cells());

  // yield (optional; absent = elasticity only)
  if (root.contains("yield")) {
    const json& jy = root["yield"];
    reject_unknown_keys(jy, {"kind", "sigma_y", "eta"}, "yield");
    YieldModel y;
    const std::string kind =
        as_string(require(jy, "kind", "yield"), "yield.kind");
    if (kind == "von_mises") {
      y.kind = YieldKind::VonMises;
      if (jy.contains("eta")) {
        throw ConfigError("config: 'yield.eta' is only valid with "
                          "kind = 'drucker_prager'");
      }
    } else if (kind == "drucker_prager") {
      y.kind = YieldKind::DruckerPrager;
      y.eta = jy.contains("eta") ? as_number(jy["eta"], "yield.eta") : 0.0;
      if (y.eta < 0.0) {
        throw ConfigError("config: 'yield.eta' must be >= 0");
      }
    } else {
      throw ConfigError("config: 'yield.kind' must be 'von_mises' or "
                        "'drucker_prager', got '" + kind + "'");
    }
    y.sigma_y = as_number(require(jy, "sigma_y", "yield"), "yield.sigma_y");
    if (!(y.sigma_y > 0.0)) {
      throw ConfigError("config: 'yield.sigma_y' must be > 0");
    }
    cfg.materials.yield = y;
  }

  // time
  const json& jt = require(root, "time", "<top>");
  reject_unknown_keys(jt, {"dt", "T"}, "time");
  cfg.dt = as_number(require(jt, "dt", "time"), "time.dt");
  cfg.t_end = as_number(require(jt, "T", "time"), "time.T");
  if (!(cfg.dt > 0.0)) throw ConfigError("config: 'time.dt' must be > 0");
  if (!(cfg.t_end > 0.0)) throw ConfigError("config: 'time.T' must be > 0");

  // coupling
  if (root.contains("coupling")) {
    const json& jc = root["coupling"];
    reject_unknown_keys(jc,
                        {"tol", "k_max", "criterion_mode", "relative",
                         "fatal_contraction", "halve_on_failure"},
                        "coupling");
    if (jc.contains("tol")) {
      cfg.coupling.tol = as_number(jc["tol"], "coupling.tol");
      if (!(cfg.coupling.tol > 0.0)) {
        throw ConfigError("config: 'coupling.tol' must be > 0");
      }
    }
    if (jc.contains("k_max")) {
      cfg.coupling.k_max = as_int(jc["k_max"], "coupling.k_max");
      if (cfg.coupling.k_max < 1) {
        throw ConfigError("config: 'coupling.k_max' must be >= 1");
      }
    }
    if (jc.contains("criterion_mode")) {
      const std::string m =
          as_string(jc["criterion_mode"], "coupling.criterion_mode");
      if (m == "standard") {
        cfg.coupling.criterion_mode = CriterionMode::Standard;
      } else if (m == "stress_change") {
        cfg.coupling.criterion_mode = CriterionMode::StressChange;
      } else {
        throw ConfigError("config: 'coupling.criterion_mode' must be "
                          "'standard' or 'stress_change', got '" + m + "'");
      }
    }
    if (jc.contains("relative")) {
      cfg.coupling.relative = as_bool(jc["relative"], "coupling.relative");
    }
    if (jc.contains("fatal_contraction")) {
      cfg.coupling.fatal_contraction =
          as_bool(jc["fatal_contraction"], "coupling.fatal_contraction");
    }
    if (jc.contains("halve_on_failure")) {
      cfg.coupling.halve_on_failure =
          as_bool(jc["halve_on_failure"], "coupling.halve_on_failure");
    }
  }

  // output
  if (root.contains("output")) {
    const json& jo = root["output"];
    reject_unknown_keys(jo, {"directory", "vtk_every", "csv_name"}, "output");
    if (jo.contains("directory")) {
      cfg.output.directory = as_string(jo["directory"], "output.directory");
    }
    if (jo.contains("vtk_every")) {
      cfg.output.vtk_every = as_int(jo["vtk_every"], "output.vtk_every");
      if (cfg.output.vtk_every < 0) {
        throw ConfigError("config: 'output.vtk_every' must be >= 0");
      }
    }
    if (jo.contains("csv_name")) {
      cfg.output.csv_name = as_string(jo["csv_name"], "output.csv_name");
    }
  }

  // optional uniform source and initial pressure
  if (root.contains("source")) {
    const json& js = root["source"];
    reject_unknown_keys(js, {"q"}, "source");
    if (js.contains("q")) cfg.source_q = as_number(js["q"], "source.q");
  }
  if (root.contains("initial")) {
    const json& ji = root["initial"];
    reject_unknown_keys(ji, {"p"}, "initial");
    if (ji.contains("p")) cfg.initial_p = as_number(ji["p"], "initial.p");
  }

  return cfg;
}

} // namespace

SimConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
  }
  return parse_json(root);
}

SimConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Simulation make_simulation(const SimConfig& cfg) {
  const int n = cfg.grid.num_cells();
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(n, cfg.source_q);
  const Eigen::VectorXd p0 = Eigen::VectorXd::Constant(n, cfg.initial_p);
  return Simulation(cfg.grid, cfg.materials, cfg.coupling, q, p0);
}

} // namespace porofss
