#pragma once

#include <iosfwd>
#include <string>

#include "ttc/model.hpp"
#include "ttc/sparse_tensor.hpp"

namespace ttc {

// Coordinate text format:
//   # comment lines anywhere
//   dims n1 ... nK
//   i1 ... iK value          (1-based indices)
// With `require_values` false, the value column may be omitted (prediction
// queries); missing values read as 0.
SparseTensor load_tensor(const std::string& path, bool require_values = true);
SparseTensor read_tensor(std::istream& is, const std::string& name,
                         bool require_values = true);

// Writes the same format, 17 significant digits.
void save_tensor(const std::string& path, const SparseTensor& t);
void write_tensor(std::ostream& os, const SparseTensor& t);

// Line-oriented model file; reals with 17 significant digits so a
// save/load round trip reproduces predictions bit for bit.
void save_model(const std::string& path, const CompletionModel& model);
void write_model(std::ostream& os, const CompletionModel& model);
CompletionModel load_model(const std::string& path);
CompletionModel read_model(std::istream& is, const std::string& name);

std::string format_double(double v);  // %.17g

}  // namespace ttc
