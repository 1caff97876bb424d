#pragma once

#include <string>

#include "varinfer/model.hpp"

namespace varinfer {

/// Round-trip exact formatting for 64-bit floats (17 significant digits).
std::string format_double(double v);

/// Plain numeric matrix, no header.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

/// VarSample series with header t,x1,...,xp and the time index in column t.
void write_series_csv(const std::string& path, const VarSample& sample);

/// Reads a series CSV back; innovation metadata is not stored here (it
/// lives in the JSON sidecar).
VarSample read_series_csv(const std::string& path);

}  // namespace varinfer
