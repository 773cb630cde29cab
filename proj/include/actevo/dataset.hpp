#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "actevo/rng.hpp"

namespace actevo {

enum class DatasetKind { two_spirals, blobs, circles, checkerboard, csv };

inline std::optional<DatasetKind> dataset_kind_from_name(std::string_view s) {
  if (s == "two_spirals") return DatasetKind::two_spirals;
  if (s == "blobs") return DatasetKind::blobs;
  if (s == "circles") return DatasetKind::circles;
  if (s == "checkerboard") return DatasetKind::checkerboard;
  if (s == "csv") return DatasetKind::csv;
  return std::nullopt;
}

inline constexpr std::string_view dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::two_spirals: return "two_spirals";
    case DatasetKind::blobs: return "blobs";
    case DatasetKind::circles: return "circles";
    case DatasetKind::checkerboard: return "checkerboard";
    case DatasetKind::csv: return "csv";
  }
  return "?";
}

struct DatasetRef {
  DatasetKind kind = DatasetKind::two_spirals;
  int train_size = 512;
  int val_size = 256;
  int test_size = 256;
  int classes = 2;
  double noise = 0.05;
  std::uint64_t seed = 1;
  std::string path;  // csv only
};

/// A split with row-major features.  Labels are 0-based class ids.
struct Split {
  std::vector<double> x;  // size rows * dim
  std::vector<int> y;    // size rows
  int dim = 0;

  int rows() const { return static_cast<int>(y.size()); }
  const double* row(int i) const { return x.data() + static_cast<std::size_t>(i) * dim; }
};

/// Train/val/test splits; features are standardized to zero mean and unit
/// variance on the training split.  The validation split is class-balanced.
struct Dataset {
  Split train, val, test;
  int classes = 2;
  int dim() const { return train.dim; }
};

namespace detail {

using PointFn = void (*)(const DatasetRef&, int cls, Rng&, double*);

inline void two_spirals_point(const DatasetRef& ref, int cls, Rng& rng, double* out) {
  // 1.75 turns per arm; arms evenly phase-offset (pi apart for two classes).
  const double turns = 1.75;
  const double t = rng.uniform(0.0, 1.0);
  const double angle = t * turns * 6.283185307179586;
  const double phase = 6.283185307179586 * cls / ref.classes;
  const double r = 0.15 + 0.85 * t;
  out[0] = r * std::cos(angle + phase) + ref.noise * rng.normal();
  out[1] = r * std::sin(angle + phase) + ref.noise * rng.normal();
}

inline void blobs_point(const DatasetRef& ref, int cls, Rng& rng, double* out) {
  const double angle = 6.283185307179586 * cls / std::max(ref.classes, 1);
  const double cx = 3.0 * std::cos(angle);
  const double cy = 3.0 * std::sin(angle);
  out[0] = cx + ref.noise * rng.normal();
  out[1] = cy + ref.noise * rng.normal();
}

inline void circles_point(const DatasetRef& ref, int cls, Rng& rng, double* out) {
  const double r = (cls + 1.0) / ref.classes;
  const double angle = rng.uniform(0.0, 6.283185307179586);
  out[0] = r * std::cos(angle) + ref.noise * rng.normal();
  out[1] = r * std::sin(angle) + ref.noise * rng.normal();
}

inline void checkerboard_point(const DatasetRef& ref, int cls, Rng& rng, double* out) {
  // Rejection-sample a cell whose parity matches the class, then jitter.
  for (;;) {
    const double px = rng.uniform(-2.0, 2.0);
    const double py = rng.uniform(-2.0, 2.0);
    const int cell = static_cast<int>(std::floor(px) + std::floor(py) + 4000);
    if (cell % ref.classes == cls) {
      out[0] = px + ref.noise * rng.normal();
      out[1] = py + ref.noise * rng.normal();
      return;
    }
  }
}

inline Split synth_split(const DatasetRef& ref, int rows, Rng& rng) {
  Split s;
  s.dim = 2;
  s.x.resize(static_cast<std::size_t>(rows) * 2);
  s.y.resize(static_cast<std::size_t>(rows));
  // Class-balanced: remainder rows go to the lowest class ids.
  for (int i = 0; i < rows; ++i) {
    const int cls = i % ref.classes;
    double* out = s.x.data() + static_cast<std::size_t>(i) * 2;
    switch (ref.kind) {
      case DatasetKind::two_spirals: two_spirals_point(ref, cls, rng, out); break;
      case DatasetKind::blobs: blobs_point(ref, cls, rng, out); break;
      case DatasetKind::circles: circles_point(ref, cls, rng, out); break;
      case DatasetKind::checkerboard: checkerboard_point(ref, cls, rng, out); break;
      case DatasetKind::csv: break;  // handled elsewhere
    }
    s.y[static_cast<std::size_t>(i)] = cls;
  }
  return s;
}

inline Dataset load_csv(const DatasetRef& ref) {
  std::ifstream in(ref.path);
  if (!in) throw std::runtime_error("cannot open csv file: " + ref.path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv file is empty: " + ref.path);
  // Header row: count columns.
  int columns = 1;
  for (char c : line) {
    if (c == ',') ++columns;
  }
  if (columns < 2) throw std::runtime_error("csv needs at least one feature and a label");
  const int dim = columns - 1;

  std::vector<double> features;
  std::vector<int> labels;
  int max_label = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() && cell.find_first_not_of(" \t\r", used) != std::string::npos) {
          throw std::invalid_argument(cell);
        }
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error("csv line " + std::to_string(line_no) +
                                 ": non-numeric value '" + cell + "'");
      }
    }
    if (static_cast<int>(row.size()) != columns) {
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " columns, found " +
                               std::to_string(row.size()));
    }
    const double label_raw = row.back();
    const int label = static_cast<int>(label_raw);
    if (label_raw != label || label < 0) {
      throw std::runtime_error("csv line " + std::to_string(line_no) +
                               ": final column must be a non-negative integer class label");
    }
    max_label = std::max(max_label, label);
    features.insert(features.end(), row.begin(), row.end() - 1);
    labels.push_back(label);
  }
  if (labels.empty()) throw std::runtime_error("csv has no data rows: " + ref.path);

  // Deterministic shuffle, then split by the requested sizes with the
  // validation split class-balanced as far as the data allows.
  const int total = static_cast<int>(labels.size());
  const int want = ref.train_size + ref.val_size + ref.test_size;
  if (want > total) {
    throw std::runtime_error("csv has " + std::to_string(total) + " rows, but " +
                             std::to_string(want) + " were requested");
  }
  Rng rng(ref.seed);
  std::vector<int> order(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = total - 1; i > 0; --i) {
    std::swap(order[static_cast<std::size_t>(i)],
              order[rng.index(static_cast<std::size_t>(i + 1))]);
  }

  const int classes = max_label + 1;
  Dataset ds;
  ds.classes = classes;
  // Pick the class-balanced validation rows first.
  std::vector<bool> taken(static_cast<std::size_t>(total), false);
  auto copy_row = [&](Split& split, int idx) {
    split.x.insert(split.x.end(), features.begin() + static_cast<std::ptrdiff_t>(idx) * dim,
                   features.begin() + static_cast<std::ptrdiff_t>(idx + 1) * dim);
    split.y.push_back(labels[static_cast<std::size_t>(idx)]);
  };
  ds.train.dim = ds.val.dim = ds.test.dim = dim;
  const int per_class = ref.val_size / classes;
  std::vector<int> val_quota(static_cast<std::size_t>(classes), per_class);
  for (int c = 0; c < ref.val_size % classes; ++c) ++val_quota[static_cast<std::size_t>(c)];
  for (int i : order) {
    const int c = labels[static_cast<std::size_t>(i)];
    if (val_quota[static_cast<std::size_t>(c)] > 0) {
      copy_row(ds.val, i);
      --val_quota[static_cast<std::size_t>(c)];
      taken[static_cast<std::size_t>(i)] = true;
    }
  }
  if (ds.val.rows() < ref.val_size) {
    throw std::runtime_error("csv cannot satisfy a class-balanced validation split");
  }
  for (int i : order) {
    if (taken[static_cast<std::size_t>(i)]) continue;
    if (ds.train.rows() < ref.train_size) {
      copy_row(ds.train, i);
    } else if (ds.test.rows() < ref.test_size) {
      copy_row(ds.test, i);
    }
  }
  return ds;
}

inline void standardize(Dataset& ds) {
  const int dim = ds.train.dim;
  std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> sd(static_cast<std::size_t>(dim), 0.0);
  const int n = ds.train.rows();
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      mean[static_cast<std::size_t>(d)] += ds.train.row(i)[d];
    }
  }
  for (double& m : mean) m /= std::max(n, 1);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      const double diff = ds.train.row(i)[d] - mean[static_cast<std::size_t>(d)];
      sd[static_cast<std::size_t>(d)] += diff * diff;
    }
  }
  for (double& s : sd) {
    s = std::sqrt(s / std::max(n, 1));
    if (s == 0.0) s = 1.0;
  }
  for (Split* split : {&ds.train, &ds.val, &ds.test}) {
    for (int i = 0; i < split->rows(); ++i) {
      double* row = split->x.data() + static_cast<std::size_t>(i) * dim;
      for (int d = 0; d < dim; ++d) {
        row[d] = (row[d] - mean[static_cast<std::size_t>(d)]) / sd[static_cast<std::size_t>(d)];
      }
    }
  }
}

}  // namespace detail

/// Deterministic dataset generation.  Synthetic kinds draw disjoint splits
/// from seed-derived streams; csv reads a header row, numeric feature
/// columns, and an integer class label in the final column.
inline Dataset generate_dataset(const DatasetRef& ref) {
  if (ref.train_size < 1 || ref.val_size < 1 || ref.test_size < 1) {
    throw std::invalid_argument("split sizes must be positive");
  }
  if (ref.classes < 2 && ref.kind != DatasetKind::csv) {
    throw std::invalid_argument("need at least two classes");
  }
  Dataset ds;
  if (ref.kind == DatasetKind::csv) {
    ds = detail::load_csv(ref);
  } else {
    ds.classes = ref.classes;
    Rng train_rng(Rng::mix(ref.seed, 1));
    Rng val_rng(Rng::mix(ref.seed, 2));
    Rng test_rng(Rng::mix(ref.seed, 3));
    ds.train = detail::synth_split(ref, ref.train_size, train_rng);
    ds.val = detail::synth_split(ref, ref.val_size, val_rng);
    ds.test = detail::synth_split(ref, ref.test_size, test_rng);
  }
  detail::standardize(ds);
  return ds;
}

}  // namespace actevo
