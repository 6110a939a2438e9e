#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trunclab/ring.hpp"

namespace trunclab {

enum class Activation { relu, none };

struct DenseLayer {
  std::size_t in = 0, out = 0;
  Activation act = Activation::none;
  std::vector<i64> w;  // in x out, row-major, at the model's fraction bits
  std::vector<i64> b;  // out
};

// Text fixture, version 1:
//   trunclab-model 1
//   ring <ell>  int <bits>  frac <bits>      (one key per line)
//   reference_accuracy <float>               (optional)
//   layer <in> <out> relu|none
//   W <out integers>                         (in lines)
//   b <out integers>
// '#' starts a comment line.
struct ToyModel {
  unsigned ring = 32;
  unsigned int_bits = 5;
  unsigned frac_bits = 16;
  double reference_accuracy = -1;
  std::vector<DenseLayer> layers;

  // weights rounded to a different fraction width
  ToyModel at_frac(unsigned frac) const;
  double weight(std::size_t layer, std::size_t i, std::size_t o) const;
  double bias(std::size_t layer, std::size_t o) const;
};

ToyModel parse_model(std::istream& in);
ToyModel load_model(const std::string& path);
void write_model(std::ostream& out, const ToyModel& m);

struct Dataset {
  std::size_t dim = 0;
  std::vector<double> x;  // rows of dim
  std::vector<int> label;
  std::size_t size() const { return label.size(); }
};

// CSV with a header row; the last column is the integer label
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

// float64 forward pass on the stored weights
std::vector<double> float_forward(const ToyModel& m, const double* x);
int argmax(const double* v, std::size_t n);
double float_accuracy(const ToyModel& m, const Dataset& d);

}  // namespace trunclab
