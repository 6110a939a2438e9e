#include "trunclab/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trunclab/errors.hpp"

namespace trunclab {

namespace {

i64 rescale(i64 v, unsigned from, unsigned to) {
  if (to >= from) return v * (i64{1} << (to - from));
  const i64 d = i64{1} << (from - to);
  const i64 q = (std::llabs(v) + d / 2) / d;
  return v < 0 ? -q : q;
}

std::vector<i64> read_ints(std::istringstream& ls, std::size_t n, const std::string& what) {
  std::vector<i64> v;
  i64 t = 0;
  while (ls >> t) v.push_back(t);
  if (v.size() != n)
    throw ParseError(what + ": expected " + std::to_string(n) + " values, got " +
                     std::to_string(v.size()));
  return v;
}

}  // namespace

ToyModel ToyModel::at_frac(unsigned frac) const {
  ToyModel m = *this;
  m.frac_bits = frac;
  for (auto& l : m.layers) {
    for (auto& w : l.w) w = rescale(w, frac_bits, frac);
    for (auto& b : l.b) b = rescale(b, frac_bits, frac);
  }
  return m;
}

double ToyModel::weight(std::size_t layer, std::size_t i, std::size_t o) const {
  const auto& l = layers.at(layer);
  return std::ldexp(static_cast<double>(l.w.at(i * l.out + o)), -static_cast<int>(frac_bits));
}

double ToyModel::bias(std::size_t layer, std::size_t o) const {
  return std::ldexp(static_cast<double>(layers.at(layer).b.at(o)), -static_cast<int>(frac_bits));
}

ToyModel parse_model(std::istream& in) {
  ToyModel m;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    const std::string where = "line " + std::to_string(lineno);
    if (!header) {
      int version = 0;
      if (key != "trunclab-model" || !(ls >> version)) throw ParseError(where + ": missing header");
      if (version != 1) throw ParseError(where + ": unsupported model version");
      header = true;
    } else if (key == "ring") {
      ls >> m.ring;
    } else if (key == "int") {
      ls >> m.int_bits;
    } else if (key == "frac") {
      ls >> m.frac_bits;
    } else if (key == "reference_accuracy") {
      ls >> m.reference_accuracy;
    } else if (key == "layer") {
      DenseLayer l;
      std::string act;
      if (!(ls >> l.in >> l.out >> act) || l.in == 0 || l.out == 0)
        throw ParseError(where + ": bad layer line");
      if (act == "relu") {
        l.act = Activation::relu;
      } else if (act == "none") {
        l.act = Activation::none;
      } else {
        throw ParseError(where + ": unknown activation " + act);
      }
      if (!m.layers.empty() && m.layers.back().out != l.in)
        throw ParseError(where + ": layer input does not match the previous output");
      m.layers.push_back(std::move(l));
    } else if (key == "W") {
      if (m.layers.empty()) throw ParseError(where + ": W before any layer");
      auto& l = m.layers.back();
      if (l.w.size() >= l.in * l.out) throw ParseError(where + ": too many W rows");
      const auto row = read_ints(ls, l.out, where);
      l.w.insert(l.w.end(), row.begin(), row.end());
    } else if (key == "b") {
      if (m.layers.empty()) throw ParseError(where + ": b before any layer");
      auto& l = m.layers.back();
      l.b = read_ints(ls, l.out, where);
    } else {
      throw ParseError(where + ": unknown key " + key);
    }
    if (ls.fail() && !ls.eof()) throw ParseError(where + ": malformed value");
  }
  if (!header) throw ParseError("empty model file");
  if (m.layers.empty()) throw ParseError("model has no layers");
  for (const auto& l : m.layers)
    if (l.w.size() != l.in * l.out || l.b.size() != l.out)
      throw ParseError("layer is missing weights or biases");
  return m;
}

ToyModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open model " + path);
  return parse_model(f);
}

void write_model(std::ostream& out, const ToyModel& m) {
  out << "trunclab-model 1\nring " << m.ring << "\nint " << m.int_bits << "\nfrac " << m.frac_bits
      << "\n";
  if (m.reference_accuracy >= 0) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "reference_accuracy %.4f\n", m.reference_accuracy);
    out << buf;
  }
  for (const auto& l : m.layers) {
    out << "layer " << l.in << ' ' << l.out << ' ' << (l.act == Activation::relu ? "relu" : "none")
        << "\n";
    for (std::size_t i = 0; i < l.in; ++i) {
      out << 'W';
      for (std::size_t o = 0; o < l.out; ++o) out << ' ' << l.w[i * l.out + o];
      out << "\n";
    }
    out << 'b';
    for (i64 v : l.b) out << ' ' << v;
    out << "\n";
  }
}

Dataset parse_dataset(std::istream& in) {
  Dataset d;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2) throw ParseError("dataset line " + std::to_string(lineno) + ": too few columns");
    if (d.dim == 0) d.dim = cells.size() - 1;
    if (cells.size() - 1 != d.dim)
      throw ParseError("dataset line " + std::to_string(lineno) + ": ragged row");
    try {
      for (std::size_t i = 0; i < d.dim; ++i) d.x.push_back(std::stod(cells[i]));
      d.label.push_back(std::stoi(cells.back()));
    } catch (const std::exception&) {
      throw ParseError("dataset line " + std::to_string(lineno) + ": not a number");
    }
  }
  return d;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open dataset " + path);
  return parse_dataset(f);
}

std::vector<double> float_forward(const ToyModel& m, const double* x) {
  std::vector<double> h(x, x + m.layers.front().in);
  for (std::size_t li = 0; li < m.layers.size(); ++li) {
    const auto& l = m.layers[li];
    std::vector<double> o(l.out);
    for (std::size_t j = 0; j < l.out; ++j) {
      double s = m.bias(li, j);
      for (std::size_t i = 0; i < l.in; ++i) s += h[i] * m.weight(li, i, j);
      o[j] = l.act == Activation::relu ? std::max(s, 0.0) : s;
    }
    h = std::move(o);
  }
  return h;
}

int argmax(const double* v, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<int>(best);
}

double float_accuracy(const ToyModel& m, const Dataset& d) {
  if (d.dim != m.layers.front().in) throw ParameterError("dataset width does not match the model");
  std::size_t ok = 0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const auto out = float_forward(m, &d.x[j * d.dim]);
    ok += argmax(out.data(), out.size()) == d.label[j] ? 1 : 0;
  }
  return d.size() ? static_cast<double>(ok) / d.size() : 0.0;
}

}  // namespace trunclab
