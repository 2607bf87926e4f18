#include "qproc/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qproc {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError("json: " + what);
}

std::vector<int> dims_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "dims must be a nonempty array");
  std::vector<int> dims;
  for (const auto& v : j) dims.push_back(v.get<int>());
  return dims;
}

}  // namespace

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "matrix must be a nonempty array of rows");
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Mat m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    require(j[r].is_array() && j[r].size() == cols, "matrix rows must have equal length");
    for (size_t c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      require(e.is_array() && e.size() == 2, "matrix entries must be [re, im] pairs");
      m(r, c) = Cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json state_to_json(const DensityMatrix& s) {
  Json j;
  j["type"] = "state";
  j["dims"] = s.dims.dims;
  if (!s.dims.labels.empty()) j["labels"] = s.dims.labels;
  j["matrix"] = matrix_to_json(s.rho);
  return j;
}

DensityMatrix state_from_json(const Json& j) {
  require(j.value("type", "state") == "state", "expected type \"state\"");
  std::vector<int> dims = dims_from_json(j.at("dims"));
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  return DensityMatrix(matrix_from_json(j.at("matrix")), DimFactorization(dims, labels));
}

Json povm_to_json(const Povm& p) {
  Json j;
  j["type"] = "povm";
  j["dims"] = p.dims.dims;
  Json effects = Json::array();
  for (const Mat& e : p.effects) effects.push_back(matrix_to_json(e));
  j["effects"] = std::move(effects);
  return j;
}

Povm povm_from_json(const Json& j) {
  require(j.value("type", "povm") == "povm", "expected type \"povm\"");
  std::vector<int> dims = dims_from_json(j.at("dims"));
  std::vector<Mat> effects;
  for (const auto& e : j.at("effects")) effects.push_back(matrix_from_json(e));
  return Povm(std::move(effects), DimFactorization(dims));
}

Json povm_list_to_json(const std::vector<Povm>& povms) {
  Json j;
  j["type"] = "povm_list";
  Json arr = Json::array();
  for (const Povm& p : povms) arr.push_back(povm_to_json(p));
  j["povms"] = std::move(arr);
  return j;
}

std::vector<Povm> povm_list_from_json(const Json& j) {
  require(j.value("type", "povm_list") == "povm_list", "expected type \"povm_list\"");
  std::vector<Povm> out;
  for (const auto& p : j.at("povms")) out.push_back(povm_from_json(p));
  return out;
}

Json channel_to_json(const QuantumChannel& c) {
  Json j;
  j["type"] = "channel";
  j["in_dims"] = {{"A0", c.dA0}, {"B0", c.dB0}};
  j["out_dims"] = {{"A1", c.dA1}, {"B1", c.dB1}};
  if (c.kraus) {
    j["representation"] = "kraus";
    Json arr = Json::array();
    for (const Mat& k : *c.kraus) arr.push_back(matrix_to_json(k));
    j["kraus"] = std::move(arr);
  } else {
    j["representation"] = "choi";
  }
  j["choi"] = matrix_to_json(c.choi);
  return j;
}

QuantumChannel channel_from_json(const Json& j) {
  require(j.value("type", "channel") == "channel", "expected type \"channel\"");
  const Json& in = j.at("in_dims");
  const Json& out = j.at("out_dims");
  int a0 = in.at("A0").get<int>(), b0 = in.at("B0").get<int>();
  int a1 = out.at("A1").get<int>(), b1 = out.at("B1").get<int>();
  std::string rep = j.value("representation", "choi");
  if (rep == "kraus") {
    std::vector<Mat> kraus;
    for (const auto& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
    return kraus_to_choi(kraus, a0, b0, a1, b1);
  }
  require(rep == "choi", "representation must be \"choi\" or \"kraus\"");
  return QuantumChannel(matrix_from_json(j.at("choi")), a0, b0, a1, b1);
}

Json scenario_to_json(const Scenario& s) {
  return Json{{"nx0", s.nx0}, {"ny0", s.ny0}, {"nx1", s.nx1}, {"ny1", s.ny1}};
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.nx0 = j.at("nx0").get<int>();
  s.ny0 = j.at("ny0").get<int>();
  s.nx1 = j.at("nx1").get<int>();
  s.ny1 = j.at("ny1").get<int>();
  return s;
}

Json behavior_to_json(const Behavior& b) {
  Json j;
  j["type"] = "behavior";
  j["scenario"] = scenario_to_json(b.sc);
  Json t_x0 = Json::array();
  for (int x0 = 0; x0 < b.sc.nx0; ++x0) {
    Json t_y0 = Json::array();
    for (int y0 = 0; y0 < b.sc.ny0; ++y0) {
      Json t_x1 = Json::array();
      for (int x1 = 0; x1 < b.sc.nx1; ++x1) {
        Json t_y1 = Json::array();
        for (int y1 = 0; y1 < b.sc.ny1; ++y1) t_y1.push_back(b.at(x0, y0, x1, y1));
        t_x1.push_back(std::move(t_y1));
      }
      t_y0.push_back(std::move(t_x1));
    }
    t_x0.push_back(std::move(t_y0));
  }
  j["table"] = std::move(t_x0);
  return j;
}

Behavior behavior_from_json(const Json& j) {
  require(j.value("type", "behavior") == "behavior", "expected type \"behavior\"");
  Scenario sc = scenario_from_json(j.at("scenario"));
  const Json& t = j.at("table");
  std::vector<double> table(sc.table_size());
  require(t.is_array() && static_cast<int>(t.size()) == sc.nx0,
          "table must be nested arrays ordered (x0, y0, x1, y1)");
  for (int x0 = 0; x0 < sc.nx0; ++x0)
    for (int y0 = 0; y0 < sc.ny0; ++y0)
      for (int x1 = 0; x1 < sc.nx1; ++x1)
        for (int y1 = 0; y1 < sc.ny1; ++y1)
          table[Behavior::index(sc, x0, y0, x1, y1)] =
              t.at(x0).at(y0).at(x1).at(y1).get<double>();
  return Behavior(sc, std::move(table));
}

Json functional_to_json(const BellFunctional& f) {
  Json j;
  j["type"] = "bell_functional";
  j["scenario"] = scenario_to_json(f.sc);
  j["coefficients"] = f.c;
  j["bound"] = f.bound;
  return j;
}

BellFunctional functional_from_json(const Json& j) {
  BellFunctional f;
  f.sc = scenario_from_json(j.at("scenario"));
  f.c = j.at("coefficients").get<std::vector<double>>();
  f.bound = j.at("bound").get<double>();
  require(static_cast<int>(f.c.size()) == f.sc.table_size(),
          "functional coefficient count must match the scenario");
  return f;
}

Json process_to_json(const Process& p) {
  Json j;
  j["type"] = "process";
  j["channel"] = p.is_classical() ? behavior_to_json(p.behavior())
                                  : channel_to_json(p.quantum());
  if (std::isinf(p.delay)) {
    j["delay"] = "inf";
  } else {
    j["delay"] = p.delay;
  }
  j["separated"] = p.spatially_separated;
  return j;
}

Process process_from_json(const Json& j) {
  require(j.value("type", "process") == "process", "expected type \"process\"");
  double delay = 0.0;
  const Json& d = j.at("delay");
  if (d.is_string()) {
    require(d.get<std::string>() == "inf", "delay must be a number or \"inf\"");
    delay = std::numeric_limits<double>::infinity();
  } else {
    delay = d.get<double>();
  }
  bool sep = j.value("separated", true);
  const Json& ch = j.at("channel");
  std::string kind = ch.value("type", "channel");
  if (kind == "behavior") return Process(behavior_from_json(ch), delay, sep);
  return Process(channel_from_json(ch), delay, sep);
}

namespace {

std::string normalization_tag(WitnessNormalization n) {
  return n == WitnessNormalization::Paper316 ? "paper" : "corrected";
}

WitnessNormalization normalization_from_tag(const std::string& tag) {
  if (tag == "paper") return WitnessNormalization::Paper316;
  require(tag == "corrected", "normalization must be \"paper\" or \"corrected\"");
  return WitnessNormalization::Corrected316DeltaQuarter;
}

}  // namespace

Json witness_to_json(const WitnessOperator& w) {
  Json j;
  j["type"] = "witness";
  j["normalization"] = normalization_tag(w.normalization);
  Json psi = Json::array(), phi = Json::array();
  for (const Mat& m : w.psi) psi.push_back(matrix_to_json(m));
  for (const Mat& m : w.phi) phi.push_back(matrix_to_json(m));
  j["psi"] = std::move(psi);
  j["phi"] = std::move(phi);
  Json blocks;
  const char* names[] = {"00", "01", "10", "11"};
  for (int i = 0; i < 4; ++i) blocks[names[i]] = matrix_to_json(w.blocks[i]);
  j["blocks"] = std::move(blocks);
  return j;
}

WitnessOperator witness_from_json(const Json& j) {
  require(j.value("type", "witness") == "witness", "expected type \"witness\"");
  std::vector<Mat> psi, phi;
  for (const auto& m : j.at("psi")) psi.push_back(matrix_from_json(m));
  for (const auto& m : j.at("phi")) phi.push_back(matrix_from_json(m));
  WitnessOperator w = build_chsh_povm_witness(
      psi, phi, normalization_from_tag(j.at("normalization").get<std::string>()));
  if (j.contains("blocks")) {
    const char* names[] = {"00", "01", "10", "11"};
    for (int i = 0; i < 4; ++i) {
      Mat stored = matrix_from_json(j.at("blocks").at(names[i]));
      if ((stored - w.blocks[i]).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError("json: witness blocks do not match their construction");
    }
  }
  return w;
}

Json measure_result_to_json(const MeasureResult& r) {
  Json j;
  j["value"] = r.value;
  j["weights"] = r.weights;
  j["gap"] = r.gap;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

Json superprocess_to_json(const Superprocess& sp) {
  Json j;
  j["type"] = "superprocess";
  if (std::holds_alternative<GeneralSuperprocess>(sp.impl)) {
    const auto& g = std::get<GeneralSuperprocess>(sp.impl);
    j["form"] = "general";
    j["pre"] = channel_to_json(g.pre);
    j["post"] = channel_to_json(g.post);
    j["env_dim"] = g.env_dim;
    j["pre_delay"] = g.pre_delay;
    j["post_delay"] = g.post_delay;
    j["out_dims"] = {{"A0", g.out_dA0}, {"B0", g.out_dB0}, {"A1", g.out_dA1}, {"B1", g.out_dB1}};
    return j;
  }
  throw ValidationError("json: only general-form superprocesses are serializable");
}

Superprocess superprocess_from_json(const Json& j) {
  require(j.value("type", "superprocess") == "superprocess", "expected type \"superprocess\"");
  require(j.at("form").get<std::string>() == "general",
          "only general-form superprocesses are supported in files");
  GeneralSuperprocess g;
  g.pre = channel_from_json(j.at("pre"));
  g.post = channel_from_json(j.at("post"));
  g.env_dim = j.at("env_dim").get<int>();
  g.pre_delay = j.value("pre_delay", 0.0);
  g.post_delay = j.value("post_delay", 0.0);
  const Json& od = j.at("out_dims");
  g.out_dA0 = od.at("A0").get<int>();
  g.out_dB0 = od.at("B0").get<int>();
  g.out_dA1 = od.at("A1").get<int>();
  g.out_dB1 = od.at("B1").get<int>();
  return Superprocess{g};
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Recover line/column from the byte offset for the diagnostic.
    size_t line = 1, col = 1;
    for (size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << "malformed JSON at line " << line << ", column " << col << ": " << e.what();
    throw JsonFormatError(msg.str());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_json_text(buf.str());
  } catch (const JsonFormatError& e) {
    throw JsonFormatError(path + ": " + e.what());
  }
}

}  // namespace qproc
