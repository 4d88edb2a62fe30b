#include "actsub/io.hpp"

#include "actsub/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace actsub {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& cell, const std::filesystem::path& file, std::size_t line) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InvalidInput(file.string() + ":" + std::to_string(line) + ": not a number: '" + cell + "'");
  return v;
}

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= count; ++i) names.push_back(prefix + "_" + std::to_string(i));
  return names;
}

std::ofstream open_for_write(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + file.string());
  return out;
}

nlohmann::json matrix_rows(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const nlohmann::json& rows, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = rows.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

Vector vector_from_json(const nlohmann::json& v) { return from_std(v.get<std::vector<double>>()); }

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }
  return std::string(buf, ptr);
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidInput("cannot read " + file.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(file.string() + ": empty file");
  table.header = split(line, ',');
  std::vector<double> cells;
  std::size_t count = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto parts = split(line, ',');
    if (parts.size() != table.header.size())
      throw InvalidInput(file.string() + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(table.header.size()) + " columns");
    for (const auto& p : parts) cells.push_back(parse_double(p, file, line_no));
    ++count;
  }
  const auto cols = static_cast<Eigen::Index>(table.header.size());
  table.rows.resize(static_cast<Eigen::Index>(count), cols);
  for (Eigen::Index r = 0; r < table.rows.rows(); ++r)
    for (Eigen::Index c = 0; c < cols; ++c) table.rows(r, c) = cells[static_cast<std::size_t>(r * cols + c)];
  return table;
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const Matrix& rows) {
  if (static_cast<Eigen::Index>(header.size()) != rows.cols())
    throw InvalidInput("write_csv: header does not match column count");
  auto out = open_for_write(file);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << format_double(rows(r, c));
    out << '\n';
  }
}

void write_samples_csv(const std::filesystem::path& file, const GradientSampleSet& samples) {
  samples.validate();
  const auto m = samples.dimension();
  auto header = numbered("x", m);
  header.push_back("f");
  for (auto& g : numbered("g", m)) header.push_back(std::move(g));
  Matrix rows(samples.count(), 2 * m + 1);
  rows.leftCols(m) = samples.points.transpose();
  rows.col(m) = samples.values;
  rows.rightCols(m) = samples.gradients.transpose();
  write_csv(file, header, rows);
}

GradientSampleSet read_samples_csv(const std::filesystem::path& file) {
  const auto table = read_csv(file);
  const auto cols = table.rows.cols();
  if (cols < 3 || cols % 2 == 0) throw InvalidInput(file.string() + ": expected 2m+1 columns");
  const auto m = (cols - 1) / 2;
  GradientSampleSet s;
  s.points = table.rows.leftCols(m).transpose();
  s.values = table.rows.col(m);
  s.gradients = table.rows.rightCols(m).transpose();
  s.validate();
  return s;
}

nlohmann::json subspace_to_json(const ActiveSubspace& subspace) {
  const Matrix& w = subspace.basis();
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) row_major.push_back(w(r, c));
  return {{"m", subspace.dimension()},
          {"n", subspace.active_dimension()},
          {"eigenvalues", to_std(subspace.eigenvalues())},
          {"W", row_major}};
}

ActiveSubspace subspace_from_json(const nlohmann::json& doc) {
  try {
    const auto m = doc.at("m").get<Eigen::Index>();
    const auto n = doc.at("n").get<Eigen::Index>();
    const auto w = doc.at("W").get<std::vector<double>>();
    if (m < 1 || static_cast<Eigen::Index>(w.size()) != m * m)
      throw InvalidInput("subspace JSON: W must hold m*m entries");
    Matrix basis(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < m; ++c) basis(r, c) = w[static_cast<std::size_t>(r * m + c)];
    return ActiveSubspace(basis, vector_from_json(doc.at("eigenvalues")), n);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("subspace JSON: ") + e.what());
  }
}

void write_design_csv(const std::filesystem::path& file, const Matrix& design) {
  write_csv(file, numbered("y", design.cols()), design);
}

Matrix read_design_csv(const std::filesystem::path& file) { return read_csv(file).rows; }

void write_training_csv(const std::filesystem::path& file, const Matrix& design,
                        const Vector& values) {
  if (design.rows() != values.size()) throw InvalidInput("write_training_csv: size mismatch");
  auto header = numbered("y", design.cols());
  header.push_back("value");
  Matrix rows(design.rows(), design.cols() + 1);
  rows << design, values;
  write_csv(file, header, rows);
}

std::pair<Matrix, Vector> read_training_csv(const std::filesystem::path& file) {
  const auto table = read_csv(file);
  if (table.rows.cols() < 2) throw InvalidInput(file.string() + ": expected y columns and a value");
  return {table.rows.leftCols(table.rows.cols() - 1), table.rows.rightCols(1)};
}

nlohmann::json model_to_json(const KrigingModel& model) {
  const auto& gp = model.process();
  const auto& h = model.hyperparameters();
  nlohmann::json doc = {
      {"format", "actsub-kriging"},
      {"version", 1},
      {"kernel", "product squared exponential"},
      {"kernel_amplitude", to_string(model.amplitude())},
      {"variance", "universal kriging"},
      {"n", model.active_dimension()},
      {"alpha", h.alpha},
      {"sigma2", h.sigma2},
      {"eta2", h.eta2},
      {"lengths", to_std(h.lengths)},
      {"eigenvalues", to_std(model.eigenvalues())},
      {"mean_basis", to_string(gp.basis())},
      {"design", matrix_rows(gp.design())},
      {"training", to_std(gp.training())},
      {"mean_coefficients", to_std(gp.mean_coefficients())},
      {"weights", to_std(gp.weights())},
      {"jitter", gp.jitter()},
      {"alpha_bracket", {model.bracket().lower, model.bracket().upper}},
  };
  if (model.bracket().warning) doc["warning"] = *model.bracket().warning;
  return doc;
}

KrigingModel model_from_json(const nlohmann::json& doc) {
  try {
    const auto n = doc.at("n").get<Eigen::Index>();
    KrigingModel model(matrix_from_rows(doc.at("design"), n), vector_from_json(doc.at("training")),
                       vector_from_json(doc.at("eigenvalues")), n, doc.at("alpha").get<double>(),
                       mean_basis_from_string(doc.at("mean_basis").get<std::string>()),
                       kernel_amplitude_from_string(doc.value("kernel_amplitude", std::string("process_variance"))));
    model.mutable_process().restore_coefficients(vector_from_json(doc.at("mean_coefficients")),
                                                 vector_from_json(doc.at("weights")));
    if (doc.contains("alpha_bracket")) {
      AlphaBracket b;
      b.lower = doc["alpha_bracket"].at(0).get<double>();
      b.upper = doc["alpha_bracket"].at(1).get<double>();
      if (doc.contains("warning")) b.warning = doc["warning"].get<std::string>();
      model.set_bracket(std::move(b));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("model JSON: ") + e.what());
  }
}

nlohmann::json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidInput("cannot read " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(file.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& file, const nlohmann::json& doc) {
  auto out = open_for_write(file);
  out << doc.dump(2) << '\n';
}

}  // namespace actsub
