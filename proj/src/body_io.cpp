#include "slicing/body_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "slicing/errors.hpp"
#include "slicing/version.hpp"

namespace slicing {

using nlohmann::json;

namespace {

json rows_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::shared_ptr<const Matrix> rows_from_json(const json& rows, int n) {
  auto m = std::make_shared<Matrix>(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(n)) throw Error("body file: direction has wrong dimension");
    for (int k = 0; k < n; ++k) (*m)(static_cast<Eigen::Index>(i), k) = rows[i][k].get<double>();
  }
  return m;
}

}  // namespace

std::string body_to_json(const CounterexampleBody& body) {
  json doc;
  doc["version"] = kVersion;
  doc["kind"] = to_string(body.kind);
  doc["n"] = body.n;
  if (const auto* s = std::get_if<TwoStageSchedule>(&body.schedule)) {
    doc["schedule"] = {{"N1", s->N1}, {"N2", s->N2}, {"R1", s->R1}, {"R2", s->R2}, {"regime_warning", s->regime_warning}};
  } else {
    const auto& p = std::get<PsiSchedule>(body.schedule);
    doc["schedule"] = {{"alpha", p.alpha}, {"N", p.N}, {"R", p.R}};
  }
  doc["seed"] = body.seed;
  doc["thetas"] = rows_to_json(*body.thetas);
  doc["etas"] = rows_to_json(body.etas ? *body.etas : Matrix(0, body.n));
  return doc.dump() + "\n";
}

CounterexampleBody body_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    CounterexampleBody body;
    body.kind = parse_body_kind(doc.at("kind").get<std::string>());
    body.n = doc.at("n").get<int>();
    body.seed = doc.at("seed").get<std::uint64_t>();
    const json& s = doc.at("schedule");
    if (body.kind == BodyKind::TwoStage) {
      TwoStageSchedule t;
      t.n = body.n;
      t.N1 = s.at("N1").get<std::uint64_t>();
      t.N2 = s.at("N2").get<std::uint64_t>();
      t.R1 = s.at("R1").get<double>();
      t.R2 = s.at("R2").get<double>();
      t.regime_warning = s.value("regime_warning", false);
      body.schedule = t;
    } else {
      PsiSchedule p;
      p.n = body.n;
      p.alpha = s.at("alpha").get<double>();
      p.N = s.at("N").get<double>();
      p.log_N = std::log(p.N);
      p.R = s.at("R").get<double>();
      body.schedule = p;
    }
    body.thetas = rows_from_json(doc.at("thetas"), body.n);
    body.etas = rows_from_json(doc.at("etas"), body.n);
    return body;
  } catch (const json::exception& e) {
    throw Error(std::string("body file: ") + e.what());
  }
}

void save_body(const CounterexampleBody& body, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body_to_json(body);
}

CounterexampleBody load_body(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return body_from_json(buffer.str());
}

}  // namespace slicing
