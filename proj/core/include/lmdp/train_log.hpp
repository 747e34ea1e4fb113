#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lmdp/npg.hpp"

namespace lmdp {

inline constexpr int kTrainLogSchemaVersion = 1;

// "schema_version,1" row, header row, then one row per log entry.
void write_train_log_csv(std::ostream& out, const std::vector<TrainLogRow>& rows,
                         bool include_wall = true);
std::vector<TrainLogRow> read_train_log_csv(std::istream& in);

std::vector<std::string> train_log_columns();

// iteration,theta_0,...,theta_{d-1}
void write_theta_trace_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& trace);

// %.17g; non-finite values as inf, -inf, nan.
std::string format_double(double x);
double parse_double(const std::string& s);

}  // namespace lmdp
