#pragma once

#include "moorfd/state_space.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace moorfd::model_io {

/// Writes the exchange block: `n,<n>`, `m,<m>`, `p,<p>`, `dt,<dt>`, then the
/// rows of A, B, C and D. Matrices with zero columns contribute no rows.
void write_model(std::ostream& out, const sysid::StateSpaceModel& m);

/// Reads one exchange block starting at lines[pos]; advances pos.
sysid::StateSpaceModel read_model(const std::vector<std::string>& lines, std::size_t& pos);

void write_model_file(const sysid::StateSpaceModel& m, const std::filesystem::path& path);
sysid::StateSpaceModel read_model_file(const std::filesystem::path& path);

/// Labeled matrix section: `matrix,<name>,<rows>,<cols>` followed by rows.
void write_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::vector<std::string>& lines, std::size_t& pos,
                            const std::string& name);

/// Labeled scalar line: `<name>,<value>`.
void write_scalar(std::ostream& out, const std::string& name, double v);
double read_scalar(const std::vector<std::string>& lines, std::size_t& pos,
                   const std::string& name);

}  // namespace moorfd::model_io
