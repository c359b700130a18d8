#include "irmerge/costmodel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "irmerge/printer.hpp"

namespace irmerge {

ResourceWeights default_weights() {
  ResourceWeights w;
  for (auto &c : w.per_opcode) c = {10.0, 10.0, 0.0};  // non-measured default
  w.of(Opcode::Load) = {19.0, 21.0, 1.0 / 44.0};
  w.of(Opcode::Store) = {37.0, 16.0, 0.0};
  w.of(Opcode::Phi) = {15.0, 19.0, 1.0 / 197.0};
  w.of(Opcode::Br) = {133.0, 51.0, 1.0 / 6.0};
  w.of(Opcode::CondBr) = {133.0, 51.0, 1.0 / 6.0};  // same branch row
  w.of(Opcode::Alloca) = {120.0, 0.0, 0.0};
  w.of(Opcode::Select) = {65.0, 64.0, 1.0 / 4.0};
  return w;
}

double energy_proxy_of(const ResourceEstimate &r, const EnergyProxyWeights &e) {
  return e.lut * r.lut + e.ff * r.ff + e.dsp * r.dsp;
}

ResourceEstimate estimate_resources(const IrFunction &f, const ResourceWeights &w,
                                    const EnergyProxyWeights &e) {
  ResourceEstimate out;
  out.lut = w.intercept.lut;
  out.ff = w.intercept.ff;
  out.dsp = w.intercept.dsp;
  std::vector<int> counts = f.opcode_counts();
  for (int k = 0; k < kNumOpcodes; ++k) {
    const auto &c = w.per_opcode[static_cast<size_t>(k)];
    out.lut += counts[static_cast<size_t>(k)] * c.lut;
    out.ff += counts[static_cast<size_t>(k)] * c.ff;
    out.dsp += counts[static_cast<size_t>(k)] * c.dsp;
  }
  out.lut = std::max(0.0, out.lut);
  out.ff = std::max(0.0, out.ff);
  out.dsp = std::max(0.0, out.dsp);
  out.energy_proxy = energy_proxy_of(out, e);
  return out;
}

namespace {

// Gaussian elimination with partial (row) pivoting; pivot columns stay in
// order so a vanishing pivot names the offending feature.
std::vector<double> solve_normal(std::vector<std::vector<double>> a,
                                 std::vector<double> b,
                                 const std::vector<std::string> &col_names) {
  const size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-9)
      throw FitError{"rank-deficient design matrix: column '" + col_names[col] +
                     "' is collinear or constant"};
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (size_t k = col; k < n; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace

ResourceWeights fit_weights(const FitDataset &d) {
  const size_t ncols = kNumOpcodes + 1;  // intercept first
  if (d.rows.size() < ncols)
    throw FitError{"need at least " + std::to_string(ncols) + " rows, got " +
                   std::to_string(d.rows.size())};

  std::vector<std::string> names{"intercept"};
  for (int k = 0; k < kNumOpcodes; ++k) names.push_back(opcode_name(static_cast<Opcode>(k)));

  // X^T X and X^T y for the three targets
  std::vector<std::vector<double>> xtx(ncols, std::vector<double>(ncols, 0.0));
  std::vector<std::vector<double>> xty(3, std::vector<double>(ncols, 0.0));
  auto feature = [&](const FitRow &row, size_t col) -> double {
    return col == 0 ? 1.0 : row.counts[col - 1];
  };
  for (const auto &row : d.rows) {
    double target[3] = {row.lut, row.ff, row.dsp};
    for (size_t i = 0; i < ncols; ++i) {
      double fi = feature(row, i);
      for (size_t j = i; j < ncols; ++j) xtx[i][j] += fi * feature(row, j);
      for (int t = 0; t < 3; ++t) xty[static_cast<size_t>(t)][i] += fi * target[t];
    }
  }
  for (size_t i = 0; i < ncols; ++i)
    for (size_t j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];

  ResourceWeights w;
  for (int t = 0; t < 3; ++t) {
    std::vector<double> sol = solve_normal(xtx, xty[static_cast<size_t>(t)], names);
    auto set = [&](size_t col, double v) {
      if (col == 0) {
        if (t == 0) w.intercept.lut = v;
        if (t == 1) w.intercept.ff = v;
        if (t == 2) w.intercept.dsp = v;
        return;
      }
      auto &c = w.per_opcode[col - 1];
      if (t == 0) c.lut = v;
      if (t == 1) c.ff = v;
      if (t == 2) c.dsp = v;
    };
    for (size_t col = 0; col < ncols; ++col) set(col, sol[col]);
  }
  return w;
}

int SavingsVector::total() const {
  int t = 0;
  for (int v : delta) t += v;
  return t;
}

SavingsVector savings_vector(const IrFunction &f1, const IrFunction &f2,
                             const IrFunction &merged) {
  SavingsVector sv;
  std::vector<int> c1 = f1.opcode_counts(), c2 = f2.opcode_counts(),
                   cm = merged.opcode_counts();
  for (int k = 0; k < kNumOpcodes; ++k)
    sv.delta[static_cast<size_t>(k)] = c1[static_cast<size_t>(k)] +
                                       c2[static_cast<size_t>(k)] -
                                       cm[static_cast<size_t>(k)];
  return sv;
}

double improvement(double c_base_i, double c_base_j, double c_merged) {
  if (c_merged <= 0) throw FitError{"improvement: merged cost must be positive"};
  return ((c_base_i + c_base_j) / c_merged - 1.0) * 100.0;
}

double latency_overhead(double l_merged_fi, double l_mono_fi, double l_merged_fj,
                        double l_mono_fj) {
  if (l_mono_fi <= 0 || l_mono_fj <= 0)
    throw FitError{"latency_overhead: baselines must be positive"};
  return ((l_merged_fi / l_mono_fi + l_merged_fj / l_mono_fj) / 2.0 - 1.0) * 100.0;
}

double cgma_improvement(double c_concat, double c_cgma) {
  if (c_cgma <= 0) throw FitError{"cgma_improvement: denominator must be positive"};
  return (c_concat / c_cgma - 1.0) * 100.0;
}

std::string weights_to_text(const ResourceWeights &w) {
  std::ostringstream os;
  os << "#intercept " << format_double(w.intercept.lut) << ' '
     << format_double(w.intercept.ff) << ' ' << format_double(w.intercept.dsp) << '\n';
  for (int k = 0; k < kNumOpcodes; ++k) {
    const auto &c = w.per_opcode[static_cast<size_t>(k)];
    os << opcode_name(static_cast<Opcode>(k)) << ' ' << format_double(c.lut) << ' '
       << format_double(c.ff) << ' ' << format_double(c.dsp) << '\n';
  }
  return os.str();
}

ResourceWeights weights_from_text(const std::string &text) {
  ResourceWeights w;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    double lut, ff, dsp;
    if (!(ls >> lut >> ff >> dsp))
      throw FitError{"bad weights line: " + line};
    if (head == "#intercept") {
      w.intercept = {lut, ff, dsp};
      continue;
    }
    if (head.size() > 0 && head[0] == '#') continue;
    auto op = opcode_from_name(head);
    if (!op) throw FitError{"unknown opcode in weights file: " + head};
    w.of(*op) = {lut, ff, dsp};
  }
  return w;
}

ResourceWeights load_weights_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FitError{"cannot open weights file: " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return weights_from_text(ss.str());
}

std::string dataset_to_csv(const FitDataset &d) {
  std::ostringstream os;
  for (int k = 0; k < kNumOpcodes; ++k) os << opcode_name(static_cast<Opcode>(k)) << ',';
  os << "lut,ff,dsp,energy\n";
  for (const auto &row : d.rows) {
    for (int v : row.counts) os << v << ',';
    os << format_double(row.lut) << ',' << format_double(row.ff) << ','
       << format_double(row.dsp) << ',' << format_double(row.energy) << '\n';
  }
  return os.str();
}

FitDataset dataset_from_csv(const std::string &text) {
  FitDataset d;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw FitError{"empty dataset"};
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.size() != static_cast<size_t>(kNumOpcodes) + 4)
    throw FitError{"dataset header must list every opcode plus lut,ff,dsp,energy"};
  for (int k = 0; k < kNumOpcodes; ++k)
    if (header[static_cast<size_t>(k)] != opcode_name(static_cast<Opcode>(k)))
      throw FitError{"dataset column " + std::to_string(k) + " should be '" +
                     opcode_name(static_cast<Opcode>(k)) + "'"};
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    FitRow row;
    for (int k = 0; k < kNumOpcodes; ++k) {
      if (!std::getline(ls, cell, ',')) throw FitError{"short dataset row"};
      row.counts[static_cast<size_t>(k)] = std::stoi(cell);
    }
    double vals[4];
    for (auto &v : vals) {
      if (!std::getline(ls, cell, ',')) throw FitError{"short dataset row"};
      v = std::stod(cell);
    }
    row.lut = vals[0];
    row.ff = vals[1];
    row.dsp = vals[2];
    row.energy = vals[3];
    d.rows.push_back(row);
  }
  return d;
}

}  // namespace irmerge
