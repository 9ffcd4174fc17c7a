#include "moorfd/model_io.hpp"

#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"

namespace moorfd::model_io {

namespace {

void write_rows(std::ostream& out, const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << csv::exact(m(i, j));
    }
    out << '\n';
  }
}

const std::string& line_at(const std::vector<std::string>& lines, std::size_t pos) {
  if (pos >= lines.size()) throw ConfigError("model file truncated");
  return lines[pos];
}

Eigen::MatrixXd read_rows(const std::vector<std::string>& lines, std::size_t& pos,
                          Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  if (cols == 0) return m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto cells = csv::split(line_at(lines, pos++));
    if (static_cast<Eigen::Index>(cells.size()) != cols) {
      throw ConfigError("model file: expected " + std::to_string(cols) + " columns at line " +
                        std::to_string(pos));
    }
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = csv::to_double(cells[j]);
  }
  return m;
}

int read_dim(const std::vector<std::string>& lines, std::size_t& pos, const char* key) {
  const double v = read_scalar(lines, pos, key);
  if (v < 0 || v != static_cast<int>(v)) {
    throw ConfigError(std::string("model file: bad dimension ") + key);
  }
  return static_cast<int>(v);
}

}  // namespace

void write_model(std::ostream& out, const sysid::StateSpaceModel& m) {
  m.validate();
  out << "n," << m.order() << "\nm," << m.inputs() << "\np," << m.outputs() << "\ndt,"
      << csv::exact(m.dt) << '\n';
  write_rows(out, m.a);
  write_rows(out, m.b);
  write_rows(out, m.c);
  write_rows(out, m.d);
}

sysid::StateSpaceModel read_model(const std::vector<std::string>& lines, std::size_t& pos) {
  const int n = read_dim(lines, pos, "n");
  const int mi = read_dim(lines, pos, "m");
  const int p = read_dim(lines, pos, "p");
  const double dt = read_scalar(lines, pos, "dt");
  if (dt < 0.0) throw ConfigError("model file: negative dt");
  sysid::StateSpaceModel m;
  m.a = read_rows(lines, pos, n, n);
  m.b = read_rows(lines, pos, n, mi);
  m.c = read_rows(lines, pos, p, n);
  m.d = read_rows(lines, pos, p, mi);
  m.dt = dt;
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
  return m;
}

void write_model_file(const sysid::StateSpaceModel& m, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  write_model(out, m);
}

sysid::StateSpaceModel read_model_file(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  std::size_t pos = 0;
  auto m = read_model(lines, pos);
  if (pos != lines.size()) throw ConfigError("model file: trailing content in " + path.string());
  return m;
}

void write_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  out << "matrix," << name << ',' << m.rows() << ',' << m.cols() << '\n';
  write_rows(out, m);
}

Eigen::MatrixXd read_matrix(const std::vector<std::string>& lines, std::size_t& pos,
                            const std::string& name) {
  const auto cells = csv::split(line_at(lines, pos++));
  if (cells.size() != 4 || cells[0] != "matrix" || cells[1] != name) {
    throw ConfigError("expected matrix section '" + name + "' at line " + std::to_string(pos));
  }
  const double r = csv::to_double(cells[2]), c = csv::to_double(cells[3]);
  if (r < 0 || c < 0) throw ConfigError("negative size for matrix '" + name + "'");
  return read_rows(lines, pos, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

void write_scalar(std::ostream& out, const std::string& name, double v) {
  out << name << ',' << csv::exact(v) << '\n';
}

double read_scalar(const std::vector<std::string>& lines, std::size_t& pos,
                   const std::string& name) {
  const auto cells = csv::split(line_at(lines, pos++));
  if (cells.size() != 2 || cells[0] != name) {
    throw ConfigError("expected '" + name + "' at line " + std::to_string(pos));
  }
  return csv::to_double(cells[1]);
}

}  // namespace moorfd::model_io
