#include "ttc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ttc/errors.hpp"

namespace ttc {

namespace {

std::string at_line(const std::string& name, std::size_t line) {
  return name + ":" + std::to_string(line);
}

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + tok.size() && !tok.empty();
}

bool parse_index(const std::string& tok, Index& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtoll(begin, &end, 10);
  return end == begin + tok.size() && !tok.empty();
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  return is;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SparseTensor read_tensor(std::istream& is, const std::string& name,
                         bool require_values) {
  std::string line;
  std::size_t lineno = 0;
  bool have_dims = false;
  std::vector<Index> sizes;
  std::vector<std::vector<Index>> indices;
  std::vector<double> values;
  std::vector<std::size_t> entry_lines;

  while (std::getline(is, line)) {
    ++lineno;
    const auto toks = tokens_of(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (!have_dims) {
      if (toks[0] != "dims" || toks.size() < 3) {
        throw ParseError(at_line(name, lineno) +
                         ": expected 'dims n1 ... nK' header");
      }
      for (std::size_t i = 1; i < toks.size(); ++i) {
        Index n;
        if (!parse_index(toks[i], n) || n < 1) {
          throw ParseError(at_line(name, lineno) + ": bad dimension '" +
                           toks[i] + "'");
        }
        sizes.push_back(n);
      }
      have_dims = true;
      continue;
    }
    const std::size_t k = sizes.size();
    if (toks.size() != k + 1 && !(toks.size() == k && !require_values)) {
      throw ParseError(at_line(name, lineno) + ": expected " +
                       std::to_string(k) +
                       (require_values ? " indices and a value"
                                       : " indices and an optional value"));
    }
    std::vector<Index> t(k);
    for (std::size_t j = 0; j < k; ++j) {
      Index idx;
      if (!parse_index(toks[j], idx)) {
        throw ParseError(at_line(name, lineno) + ": bad index '" + toks[j] +
                         "'");
      }
      if (idx < 1 || idx > sizes[j]) {
        throw ParseError(at_line(name, lineno) + ": index " +
                         std::to_string(idx) + " out of range for mode " +
                         std::to_string(j + 1) + " of size " +
                         std::to_string(sizes[j]));
      }
      t[j] = idx - 1;  // 1-based in files, 0-based in core
    }
    double v = 0.0;
    if (toks.size() == k + 1) {
      if (!parse_double(toks[k], v)) {
        throw ParseError(at_line(name, lineno) + ": bad value '" + toks[k] +
                         "'");
      }
    }
    indices.push_back(std::move(t));
    values.push_back(v);
    entry_lines.push_back(lineno);
  }
  if (!have_dims) {
    throw ParseError(name + ": missing 'dims' header");
  }

  // Catch duplicates here so the error can cite both source lines.
  std::vector<std::size_t> perm(indices.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return indices[a] < indices[b];
  });
  for (std::size_t i = 1; i < perm.size(); ++i) {
    if (indices[perm[i]] == indices[perm[i - 1]]) {
      throw ParseError(name + ": duplicate index on lines " +
                       std::to_string(entry_lines[perm[i - 1]]) + " and " +
                       std::to_string(entry_lines[perm[i]]));
    }
  }
  return SparseTensor(Dims(std::move(sizes)), indices, std::move(values));
}

SparseTensor load_tensor(const std::string& path, bool require_values) {
  auto is = open_input(path);
  return read_tensor(is, path, require_values);
}

void write_tensor(std::ostream& os, const SparseTensor& t) {
  os << "dims";
  for (Index n : t.dims().sizes()) os << " " << n;
  os << "\n";
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    for (Index i : t.index(e)) os << i + 1 << " ";
    os << format_double(t.value(e)) << "\n";
  }
}

void save_tensor(const std::string& path, const SparseTensor& t) {
  auto os = open_output(path);
  write_tensor(os, t);
  if (!os) throw ParseError("write to '" + path + "' failed");
}

void write_model(std::ostream& os, const CompletionModel& model) {
  os << "ttc-model 1\n";
  os << "formulation " << to_string(model.formulation) << "\n";
  os << "dims";
  for (Index n : model.dims.sizes()) os << " " << n;
  os << "\n";
  os << "ranks";
  for (Index r : model.ranks) os << " " << r;
  os << "\n";
  os << "lambda " << format_double(model.lambda) << "\n";
  os << "lambdas";
  for (double l : model.lambdas) os << " " << format_double(l);
  os << "\n";
  for (std::size_t k = 0; k < model.factors.size(); ++k) {
    const auto& u = model.factors[k];
    os << "factor " << k << " " << u.rows() << " " << u.cols() << "\n";
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        if (j) os << " ";
        os << format_double(u(i, j));
      }
      os << "\n";
    }
  }
  os << "z " << model.z.nnz() << "\n";
  for (std::size_t e = 0; e < model.z.nnz(); ++e) {
    for (Index i : model.z.index(e)) os << i + 1 << " ";
    os << format_double(model.z.value(e)) << "\n";
  }
}

void save_model(const std::string& path, const CompletionModel& model) {
  auto os = open_output(path);
  write_model(os, model);
  if (!os) throw ParseError("write to '" + path + "' failed");
}

CompletionModel read_model(std::istream& is, const std::string& name) {
  std::size_t lineno = 0;
  const auto next_tokens = [&](const char* what) {
    std::string line;
    while (std::getline(is, line)) {
      ++lineno;
      auto toks = tokens_of(line);
      if (toks.empty() || toks[0][0] == '#') continue;
      return toks;
    }
    throw ParseError(name + ": unexpected end of file, expected " + what);
  };
  const auto expect_key = [&](const std::vector<std::string>& toks,
                              const std::string& key) {
    if (toks.empty() || toks[0] != key) {
      throw ParseError(at_line(name, lineno) + ": expected '" + key + "'");
    }
  };

  auto toks = next_tokens("header");
  if (toks.size() != 2 || toks[0] != "ttc-model" || toks[1] != "1") {
    throw ParseError(at_line(name, lineno) + ": not a ttc model file");
  }

  toks = next_tokens("formulation");
  expect_key(toks, "formulation");
  if (toks.size() != 2) {
    throw ParseError(at_line(name, lineno) + ": bad formulation line");
  }
  const Formulation formulation = formulation_from_string(toks[1]);

  toks = next_tokens("dims");
  expect_key(toks, "dims");
  std::vector<Index> sizes;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    Index n;
    if (!parse_index(toks[i], n)) {
      throw ParseError(at_line(name, lineno) + ": bad dimension");
    }
    sizes.push_back(n);
  }
  Dims dims(sizes);

  toks = next_tokens("ranks");
  expect_key(toks, "ranks");
  std::vector<Index> ranks;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    Index r;
    if (!parse_index(toks[i], r)) {
      throw ParseError(at_line(name, lineno) + ": bad rank");
    }
    ranks.push_back(r);
  }

  toks = next_tokens("lambda");
  expect_key(toks, "lambda");
  double lambda = 0.0;
  if (toks.size() != 2 || !parse_double(toks[1], lambda)) {
    throw ParseError(at_line(name, lineno) + ": bad lambda line");
  }

  toks = next_tokens("lambdas");
  expect_key(toks, "lambdas");
  std::vector<double> lambdas;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    double l;
    if (!parse_double(toks[i], l)) {
      throw ParseError(at_line(name, lineno) + ": bad lambda value");
    }
    lambdas.push_back(l);
  }

  std::vector<Eigen::MatrixXd> factors;
  for (int k = 0; k < dims.order(); ++k) {
    toks = next_tokens("factor");
    expect_key(toks, "factor");
    Index fk, rows, cols;
    if (toks.size() != 4 || !parse_index(toks[1], fk) ||
        !parse_index(toks[2], rows) || !parse_index(toks[3], cols) ||
        fk != k) {
      throw ParseError(at_line(name, lineno) + ": bad factor header");
    }
    Eigen::MatrixXd u(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      toks = next_tokens("factor row");
      if (static_cast<Index>(toks.size()) != cols) {
        throw ParseError(at_line(name, lineno) + ": factor row with " +
                         std::to_string(toks.size()) + " entries, expected " +
                         std::to_string(cols));
      }
      for (Index j = 0; j < cols; ++j) {
        double v;
        if (!parse_double(toks[static_cast<std::size_t>(j)], v)) {
          throw ParseError(at_line(name, lineno) + ": bad factor entry");
        }
        u(i, j) = v;
      }
    }
    factors.push_back(std::move(u));
  }

  toks = next_tokens("z");
  expect_key(toks, "z");
  Index nnz;
  if (toks.size() != 2 || !parse_index(toks[1], nnz) || nnz < 0) {
    throw ParseError(at_line(name, lineno) + ": bad z header");
  }
  std::vector<std::vector<Index>> indices;
  std::vector<double> values;
  for (Index e = 0; e < nnz; ++e) {
    toks = next_tokens("z entry");
    if (static_cast<int>(toks.size()) != dims.order() + 1) {
      throw ParseError(at_line(name, lineno) + ": bad z entry");
    }
    std::vector<Index> t(static_cast<std::size_t>(dims.order()));
    for (int j = 0; j < dims.order(); ++j) {
      Index idx;
      if (!parse_index(toks[static_cast<std::size_t>(j)], idx) || idx < 1 ||
          idx > dims.size(j)) {
        throw ParseError(at_line(name, lineno) + ": bad z index");
      }
      t[static_cast<std::size_t>(j)] = idx - 1;
    }
    double v;
    if (!parse_double(toks[static_cast<std::size_t>(dims.order())], v)) {
      throw ParseError(at_line(name, lineno) + ": bad z value");
    }
    indices.push_back(std::move(t));
    values.push_back(v);
  }

  CompletionModel model{std::move(dims),
                        std::move(ranks),
                        lambda,
                        std::move(lambdas),
                        std::move(factors),
                        SparseTensor(Dims(sizes), indices, std::move(values)),
                        formulation};
  model.validate();
  return model;
}

CompletionModel load_model(const std::string& path) {
  auto is = open_input(path);
  return read_model(is, path);
}

}  // namespace ttc
