#include "entroflow/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "entroflow/errors.hpp"

namespace entroflow {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        emit(e, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

double get_number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw InputError(what + ": expected a number");
}

const Json& require(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object()) throw InputError(what + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(what + ": missing field \"" + key + "\"");
  return *it;
}

Eigen::Index get_dim(const Json& j, const std::string& what) {
  const Json& d = require(j, "dim", what);
  if (!d.is_number_integer() || d.get<long long>() < 1) throw InputError(what + ": dim must be a positive integer");
  return static_cast<Eigen::Index>(d.get<long long>());
}

Eigen::MatrixXd real_rows(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw InputError(what + ": each row must be an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(what + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = get_number(row[static_cast<std::size_t>(c)], what);
      if (!std::isfinite(v)) throw InputError(what + ": non-finite entry");
      m(r, c) = v;
    }
  }
  return m;
}

Json real_rows_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json int_vector_to_json(const Eigen::VectorXi& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  if (indent >= 0) out += '\n';
  return out;
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(origin + ": malformed JSON: " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed: " + path);
}

Json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json extended_to_json(const ExtendedReal& x) { return x.is_infinite() ? Json("inf") : Json(x.value()); }

Json matrix_to_json(const Matrix& m) {
  Json j = Json::object();
  j["re"] = real_rows_to_json(m.real());
  j["im"] = real_rows_to_json(m.imag());
  return j;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  const Eigen::MatrixXd re = real_rows(require(j, "re", what), what + ".re");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = real_rows(j["im"], what + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw InputError(what + ": re/im shapes differ");
  }
  Matrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

Json density_to_json(const Density& rho) {
  Json j = Json::object();
  j["dim"] = rho.dim();
  const Json m = matrix_to_json(rho.matrix());
  j["re"] = m["re"];
  j["im"] = m["im"];
  return j;
}

Density density_from_json(const Json& j) {
  const Eigen::Index d = get_dim(j, "density");
  const Matrix m = matrix_from_json(j, "density");
  if (m.rows() != d || m.cols() != d) throw InputError("density: matrix shape does not match dim");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw InputError("density: matrix is not Hermitian");
  return Density(m);
}

Json generator_spec_to_json(const GeneratorSpec& spec, Eigen::Index dim) {
  Json j = Json::object();
  j["dim"] = dim;
  if (const auto* g = std::get_if<GklsSpec>(&spec)) {
    j["variant"] = "gkls";
    j["H"] = matrix_to_json(g->hamiltonian.matrix());
    Json jumps = Json::array();
    for (const Matrix& J : g->jumps) jumps.push_back(matrix_to_json(J));
    j["jumps"] = std::move(jumps);
  } else if (const auto* s = std::get_if<SchurSpec>(&spec)) {
    j["variant"] = "schur";
    j["symbol"] = real_rows_to_json(s->symbol);
  } else {
    j["variant"] = "raw";
    j["raw"] = matrix_to_json(std::get<RawSpec>(spec).heisenberg.matrix());
  }
  return j;
}

Json generator_to_json(const Generator& gen) { return generator_spec_to_json(gen.spec(), gen.dim()); }

GeneratorSpec generator_spec_from_json(const Json& j) {
  const Eigen::Index d = get_dim(j, "generator");
  const Json& v = require(j, "variant", "generator");
  if (!v.is_string()) throw InputError("generator: variant must be a string");
  const std::string variant = v.get<std::string>();
  if (variant == "gkls") {
    GklsSpec g;
    if (j.contains("H")) {
      const Matrix h = matrix_from_json(j["H"], "generator.H");
      if (h.rows() != d || h.cols() != d) throw InputError("generator.H: wrong shape");
      if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw InputError("generator.H: not Hermitian");
      g.hamiltonian = HermitianOperator(h);
    } else {
      g.hamiltonian = HermitianOperator::zero(d);
    }
    if (j.contains("jumps")) {
      if (!j["jumps"].is_array()) throw InputError("generator.jumps: expected an array");
      for (const Json& jj : j["jumps"]) {
        Matrix J = matrix_from_json(jj, "generator.jumps[]");
        if (J.rows() != d || J.cols() != d) throw InputError("generator.jumps[]: wrong shape");
        g.jumps.push_back(std::move(J));
      }
    }
    return g;
  }
  if (variant == "schur") {
    SchurSpec s{real_rows(require(j, "symbol", "generator"), "generator.symbol")};
    if (s.symbol.rows() != d || s.symbol.cols() != d) throw InputError("generator.symbol: wrong shape");
    return s;
  }
  if (variant == "raw") {
    const Matrix raw = matrix_from_json(require(j, "raw", "generator"), "generator.raw");
    if (raw.rows() != d * d || raw.cols() != d * d) throw InputError("generator.raw: expected dim^2 x dim^2");
    return RawSpec{SuperOperator(d, raw)};
  }
  throw InputError("generator: unknown variant \"" + variant + "\"");
}

Json calculus_to_json(const DiffCalculus& calc) {
  Json j = Json::object();
  j["dim"] = calc.dim();
  Json p = Json::array();
  for (const auto& v : calc.projections()) p.push_back(int_vector_to_json(v));
  j["projections"] = std::move(p);
  j["phi"] = density_to_json(calc.phi());
  return j;
}

DiffCalculus calculus_from_json(const Json& j) {
  const Json& p = require(j, "projections", "calculus");
  if (!p.is_array() || p.empty()) throw InputError("calculus: projections must be a non-empty array");
  std::vector<Eigen::VectorXi> proj;
  for (const Json& row : p) {
    if (!row.is_array() || row.empty()) throw InputError("calculus: each projection must be a non-empty array");
    Eigen::VectorXi v(static_cast<Eigen::Index>(row.size()));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number_integer()) throw InputError("calculus: projection entries must be 0 or 1");
      v(static_cast<Eigen::Index>(k)) = row[k].get<int>();
    }
    proj.push_back(std::move(v));
  }
  const Eigen::Index d = j.contains("dim") ? get_dim(j, "calculus") : proj.front().size();
  Density phi = j.contains("phi") ? density_from_json(j["phi"]) : Density::maximally_mixed(d);
  if (phi.dim() != d) throw InputError("calculus: phi has the wrong dimension");
  return DiffCalculus(std::move(proj), std::move(phi));
}

Json subalgebra_to_json(const SubalgebraSpec& spec) {
  Json j = Json::object();
  j["dim"] = spec.dim;
  if (spec.unitary) j["unitary"] = matrix_to_json(*spec.unitary);
  Json blocks = Json::array();
  for (const auto& b : spec.blocks) {
    Json a = Json::array();
    for (Eigen::Index i : b) a.push_back(i + 1);
    blocks.push_back(std::move(a));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

SubalgebraSpec subalgebra_from_json(const Json& j) {
  SubalgebraSpec s;
  s.dim = get_dim(j, "subalgebra");
  const Json& b = require(j, "blocks", "subalgebra");
  if (!b.is_array()) throw InputError("subalgebra: blocks must be an array");
  for (const Json& blk : b) {
    if (!blk.is_array()) throw InputError("subalgebra: each block must be an array of indices");
    std::vector<Eigen::Index> idx;
    for (const Json& i : blk) {
      if (!i.is_number_integer()) throw InputError("subalgebra: block indices must be integers");
      idx.push_back(static_cast<Eigen::Index>(i.get<long long>()) - 1);
    }
    s.blocks.push_back(std::move(idx));
  }
  if (j.contains("unitary")) s.unitary = matrix_from_json(j["unitary"], "subalgebra.unitary");
  s.validate();
  return s;
}

Json word_to_json(const Word& w) {
  Json a = Json::array();
  for (int l : w) a.push_back(l);
  return a;
}

Json ball_to_json(const GroupBall& ball) {
  Json j = Json::object();
  j["kind"] = group_kind_name(ball.kind);
  j["generators"] = ball.generators;
  j["radius"] = ball.radius;
  j["size"] = ball.size();
  Json words = Json::array();
  for (const Word& w : ball.words) words.push_back(word_to_json(w));
  j["words"] = std::move(words);
  Json len = Json::array();
  for (int l : ball.length) len.push_back(l);
  j["length"] = std::move(len);
  return j;
}

Json semigroup_to_json(const BallSemigroup& sg) {
  Json j = Json::object();
  j["ball"] = ball_to_json(sg.ball);
  Json w = Json::array();
  for (double x : sg.weights) w.push_back(x);
  j["weights"] = std::move(w);
  Json sym = Json::array();
  for (Eigen::Index r = 0; r < sg.symbol.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < sg.symbol.cols(); ++c) row.push_back(static_cast<int>(sg.symbol(r, c)));
    sym.push_back(std::move(row));
  }
  j["symbol"] = std::move(sym);
  Json labels = Json::array();
  for (const Word& l : sg.projection_labels) labels.push_back(word_to_json(l));
  j["projection_labels"] = std::move(labels);
  Json proj = Json::array();
  for (const auto& v : sg.projections) proj.push_back(int_vector_to_json(v));
  j["projections"] = std::move(proj);
  return j;
}

GroupKind group_kind_from_string(const std::string& s) {
  if (s == "free_group" || s == "free-group" || s == "free") return GroupKind::free_group;
  if (s == "free_coxeter" || s == "free-coxeter" || s == "coxeter") return GroupKind::free_coxeter;
  throw InputError("unknown group kind \"" + s + "\" (expected free_group or free_coxeter)");
}

std::string group_kind_name(GroupKind kind) {
  return kind == GroupKind::free_group ? "free_group" : "free_coxeter";
}

bool is_ball_spec(const Json& j) { return j.is_object() && j.contains("ball"); }

BallInput ball_input_from_json(const Json& j) {
  const Json& b = require(j, "ball", "ball spec");
  BallInput in;
  const Json& kind = require(b, "kind", "ball spec");
  if (!kind.is_string()) throw InputError("ball spec: kind must be a string");
  in.kind = group_kind_from_string(kind.get<std::string>());
  const Json& k = require(b, "generators", "ball spec");
  const Json& r = require(b, "radius", "ball spec");
  if (!k.is_number_integer() || !r.is_number_integer()) throw InputError("ball spec: generators and radius must be integers");
  in.generators = k.get<int>();
  in.radius = r.get<int>();
  if (j.contains("weights")) in.weights = j["weights"];
  return in;
}

std::vector<double> resolve_weights(const GroupBall& ball, const Json& weights) {
  if (weights.is_string()) {
    if (weights.get<std::string>() != "uniform") throw InputError("weights: expected \"uniform\", {\"gibbs\": mu} or a list");
    return uniform_weights(ball);
  }
  if (weights.is_object() && weights.contains("gibbs")) return gibbs_weights(ball, get_number(weights["gibbs"], "weights.gibbs"));
  if (weights.is_array()) {
    if (weights.size() != ball.size()) throw InputError("weights: list length differs from the ball size");
    std::vector<double> w;
    for (const Json& x : weights) w.push_back(get_number(x, "weights"));
    return w;
  }
  throw InputError("weights: expected \"uniform\", {\"gibbs\": mu} or a list");
}

Json trajectory_to_json(const TrajectoryRecord& rec) {
  Json j = Json::object();
  const auto arr = [](const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number_to_json(x));
    return a;
  };
  j["t"] = arr(rec.times);
  j["D"] = arr(rec.entropies);
  j["I"] = arr(rec.productions);
  j["alpha"] = arr(rec.alpha_track);
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string trajectory_to_csv(const TrajectoryRecord& rec) {
  const auto num = [](double x) {
    std::string s = format_double(x);
    if (!s.empty() && s.front() == '"') s = s.substr(1, s.size() - 2);
    return csv_field(s);
  };
  std::string out = "t,D,I,alpha\r\n";
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    out += num(rec.times[k]) + ',' + num(rec.entropies[k]) + ',' + num(rec.productions[k]) + ',' +
           num(rec.alpha_track[k]) + "\r\n";
  }
  return out;
}

Json mlsi_report_to_json(const MlsiReport& rep) {
  Json j = Json::object();
  j["beta_ratio"] = number_to_json(rep.beta_ratio);
  j["beta_fit"] = number_to_json(rep.beta_fit);
  j["sample_count"] = rep.sample_count;
  j["evaluations"] = rep.evaluations;
  j["violations"] = rep.violations;
  j["worst_sample"] = density_to_json(rep.worst_sample);
  j["worst_state"] = density_to_json(rep.worst_state);
  j["worst_trajectory"] = trajectory_to_json(rep.worst_trajectory);
  return j;
}

}  // namespace entroflow
