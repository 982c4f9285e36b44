#pragma once

#include <string>
#include <vector>

#include "polybill/dynamics.hpp"
#include "polybill/integrals.hpp"

namespace polybill::cli {

/// Number of boundary-parameter columns: 1 for planar tables, 2 otherwise.
int param_columns(const Table& table);

/// `step,param1[,param2],x1..xn,v1..vn,F_1..F_k`, one row per state, every
/// number in %.17g so a re-read reproduces the doubles exactly.
std::string format_trajectory(const Orbit& orbit, int n_params, const std::vector<IntegralSpec>& integrals);

/// Parses a trajectory written by format_trajectory. SchemaMismatch when
/// the header or a row does not fit the schema.
Orbit parse_trajectory(const std::string& text);
Orbit read_trajectory(const std::string& path);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace polybill::cli
