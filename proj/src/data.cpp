#include "wdro/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wdro/util.hpp"

namespace wdro {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Schema

DatasetSchema DatasetSchema::from_json_text(const std::string& text) {
  DatasetSchema s;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("schema must be a JSON object");
  static const std::set<std::string> known = {"label",       "positive",      "numeric",    "categorical",
                                              "ignore",      "missing",       "missing_token", "standardize"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("unknown schema key: " + key);
  }
  try {
    s.label = j.at("label").get<std::string>();
    if (j.contains("positive")) s.positive = j["positive"].get<std::string>();
    if (j.contains("numeric")) s.numeric = j["numeric"].get<std::vector<std::string>>();
    if (j.contains("categorical")) {
      s.categorical = j["categorical"].get<std::vector<std::string>>();
      s.categorical_is_rest = false;
    }
    if (j.contains("ignore")) s.ignored = j["ignore"].get<std::vector<std::string>>();
    if (j.contains("missing")) {
      const auto m = j["missing"].get<std::string>();
      if (m == "new-category") {
        s.missing = MissingPolicy::NewCategory;
      } else if (m == "drop-row") {
        s.missing = MissingPolicy::DropRow;
      } else {
        throw std::invalid_argument("missing must be new-category or drop-row");
      }
    }
    if (j.contains("missing_token")) s.missing_token = j["missing_token"].get<std::string>();
    if (j.contains("standardize")) s.standardize = j["standardize"].get<bool>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad schema field: ") + e.what());
  }
  if (s.label.empty()) throw std::invalid_argument("schema needs a label column");
  return s;
}

DatasetSchema DatasetSchema::load(const std::string& path) { return from_json_text(read_file(path)); }

std::string DatasetSchema::to_json_text() const {
  json j;
  j["label"] = label;
  j["positive"] = positive;
  j["numeric"] = numeric;
  if (!categorical_is_rest) j["categorical"] = categorical;
  j["ignore"] = ignored;
  j["missing"] = missing == MissingPolicy::NewCategory ? "new-category" : "drop-row";
  j["missing_token"] = missing_token;
  j["standardize"] = standardize;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Dataset

int Dataset::k() const {
  int k = 0;
  for (int c : cardinalities) k += c - 1;
  return k;
}

std::vector<int> Dataset::block_offsets() const {
  std::vector<int> off(cardinalities.size(), 0);
  for (std::size_t j = 1; j < cardinalities.size(); ++j) off[j] = off[j - 1] + cardinalities[j - 1] - 1;
  return off;
}

void Dataset::validate() const {
  if (X.rows() != y.size() || Z.rows() != y.size()) throw std::invalid_argument("row counts disagree");
  if (static_cast<int>(cardinalities.size()) != m()) throw std::invalid_argument("cardinality count != m");
  for (int j = 0; j < m(); ++j) {
    if (cardinalities[static_cast<std::size_t>(j)] < 2) throw std::invalid_argument("cardinality below 2");
  }
  for (int i = 0; i < N(); ++i) {
    if (y[i] != 1 && y[i] != -1) throw std::invalid_argument("labels must be -1 or +1");
    for (int j = 0; j < m(); ++j) {
      if (Z(i, j) < 0 || Z(i, j) >= cardinalities[static_cast<std::size_t>(j)]) {
        throw std::invalid_argument("category index out of range");
      }
    }
  }
  if (!X.allFinite()) throw std::invalid_argument("non-finite numeric feature");
}

Dataset Dataset::subset(std::span<const int> rows) const {
  Dataset d = *this;
  const auto r = static_cast<Eigen::Index>(rows.size());
  d.X.resize(r, X.cols());
  d.Z.resize(r, Z.cols());
  d.y.resize(r);
  for (Eigen::Index q = 0; q < r; ++q) {
    const int i = rows[static_cast<std::size_t>(q)];
    if (i < 0 || i >= N()) throw std::out_of_range("row index out of range");
    d.X.row(q) = X.row(i);
    d.Z.row(q) = Z.row(i);
    d.y[q] = y[i];
  }
  return d;
}

std::vector<int> Dataset::categorical_row(int i) const {
  std::vector<int> z(static_cast<std::size_t>(m()));
  for (int j = 0; j < m(); ++j) z[static_cast<std::size_t>(j)] = Z(i, j);
  return z;
}

Dataset make_dataset(Eigen::MatrixXd X, Eigen::MatrixXi Z, Eigen::VectorXi y, std::vector<int> cardinalities) {
  Dataset d;
  d.X = std::move(X);
  d.Z = std::move(Z);
  d.y = std::move(y);
  d.cardinalities = std::move(cardinalities);
  for (int j = 0; j < d.n(); ++j) d.numeric_names.push_back("x" + std::to_string(j + 1));
  for (int j = 0; j < d.m(); ++j) d.categorical_names.push_back("z" + std::to_string(j + 1));
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  char ch;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };
  while (in.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started || field.find_first_not_of(" \t") == std::string::npos) {
          field.clear();
          quoted = true;
          field_started = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',': end_field(); break;
      case '\r': break;
      case '\n': end_row(); break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted field in CSV");
  if (field_started || !row.empty()) end_row();
  return rows;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t q = 0; q < fields.size(); ++q) {
    if (q) out << ',';
    const auto& f = fields[q];
    if (f.find_first_of(",\"\r\n") != std::string::npos) {
      out << '"';
      for (char c : f) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    } else {
      out << f;
    }
  }
  out << '\n';
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size() && std::isfinite(out);
}

}  // namespace

Dataset ingest_csv(std::istream& in, const DatasetSchema& schema) {
  auto rows = read_csv(in);
  if (rows.empty()) throw std::invalid_argument("CSV has no header");
  std::vector<std::string> header = rows.front();
  for (auto& h : header) h = trim(h);
  rows.erase(rows.begin());

  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("unknown column: " + name);
    return static_cast<int>(it - header.begin());
  };
  const int label_col = column(schema.label);
  std::vector<int> num_cols;
  for (const auto& c : schema.numeric) num_cols.push_back(column(c));
  std::set<int> ignored;
  for (const auto& c : schema.ignored) ignored.insert(column(c));
  std::vector<int> cat_cols;
  if (schema.categorical_is_rest) {
    std::set<int> taken(num_cols.begin(), num_cols.end());
    taken.insert(label_col);
    taken.insert(ignored.begin(), ignored.end());
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
      if (!taken.count(c)) cat_cols.push_back(c);
    }
  } else {
    for (const auto& c : schema.categorical) cat_cols.push_back(column(c));
  }
  {
    std::set<int> seen{label_col};
    for (int c : num_cols) {
      if (!seen.insert(c).second) throw std::invalid_argument("column listed twice: " + header[c]);
    }
    for (int c : cat_cols) {
      if (!seen.insert(c).second) throw std::invalid_argument("column listed twice: " + header[c]);
    }
  }

  // Filter rows: malformed width, missing labels/numerics, and (drop-row) missing categories.
  std::vector<std::vector<std::string>> kept;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.size() != header.size()) {
      throw std::invalid_argument("row " + std::to_string(r + 2) + " has " + std::to_string(row.size()) +
                                  " fields, expected " + std::to_string(header.size()));
    }
    for (auto& f : row) f = trim(f);
    auto missing = [&](int c) { return row[static_cast<std::size_t>(c)] == schema.missing_token || row[c].empty(); };
    bool drop = missing(label_col);
    for (int c : num_cols) drop = drop || missing(c);
    if (schema.missing == MissingPolicy::DropRow) {
      for (int c : cat_cols) drop = drop || missing(c);
    }
    if (!drop) kept.push_back(std::move(row));
  }
  if (kept.empty()) throw std::invalid_argument("dataset is empty after filtering");

  Dataset d;
  d.label_name = schema.label;
  const auto N = static_cast<Eigen::Index>(kept.size());

  // Numeric block.
  d.X.resize(N, static_cast<Eigen::Index>(num_cols.size()));
  for (std::size_t q = 0; q < num_cols.size(); ++q) {
    d.numeric_names.push_back(header[static_cast<std::size_t>(num_cols[q])]);
    for (Eigen::Index i = 0; i < N; ++i) {
      double v;
      const auto& tok = kept[static_cast<std::size_t>(i)][static_cast<std::size_t>(num_cols[q])];
      if (!parse_double(tok, v)) {
        throw std::invalid_argument("non-numeric token '" + tok + "' in column " + d.numeric_names.back());
      }
      d.X(i, static_cast<Eigen::Index>(q)) = v;
    }
  }

  // Categorical block with lexicographic dictionaries; single-valued columns dropped.
  std::vector<std::vector<int>> zcols;
  for (int c : cat_cols) {
    std::set<std::string> values;
    for (const auto& row : kept) values.insert(row[static_cast<std::size_t>(c)]);
    if (values.size() < 2) continue;
    std::vector<std::string> dict(values.begin(), values.end());
    std::map<std::string, int> index;
    for (std::size_t t = 0; t < dict.size(); ++t) index[dict[t]] = static_cast<int>(t);
    std::vector<int> col;
    col.reserve(kept.size());
    for (const auto& row : kept) col.push_back(index.at(row[static_cast<std::size_t>(c)]));
    zcols.push_back(std::move(col));
    d.categorical_names.push_back(header[static_cast<std::size_t>(c)]);
    d.cardinalities.push_back(static_cast<int>(dict.size()));
    d.categories.push_back(std::move(dict));
  }
  d.Z.resize(N, static_cast<Eigen::Index>(zcols.size()));
  for (std::size_t j = 0; j < zcols.size(); ++j) {
    for (Eigen::Index i = 0; i < N; ++i) d.Z(i, static_cast<Eigen::Index>(j)) = zcols[j][static_cast<std::size_t>(i)];
  }

  // Labels: majority class (ties -> lexicographically smallest) or explicit value vs. rest.
  std::map<std::string, int> counts;
  for (const auto& row : kept) ++counts[row[static_cast<std::size_t>(label_col)]];
  std::string positive;
  if (schema.positive == "majority") {
    int best = -1;
    for (const auto& [cls, cnt] : counts) {
      if (cnt > best) {
        best = cnt;
        positive = cls;
      }
    }
  } else {
    positive = schema.positive;
    if (!counts.count(positive)) throw std::invalid_argument("positive class '" + positive + "' not present");
  }
  d.positive_label = positive;
  d.negative_label.clear();
  for (const auto& [cls, _] : counts) {
    if (cls == positive) continue;
    d.negative_label += (d.negative_label.empty() ? "" : "|") + cls;
  }
  d.y.resize(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    d.y[i] = kept[static_cast<std::size_t>(i)][static_cast<std::size_t>(label_col)] == positive ? 1 : -1;
  }
  d.validate();
  return d;
}

Dataset ingest_csv(const std::string& path, const DatasetSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open data file " + path);
  return ingest_csv(in, schema);
}

FeatureEncoding FeatureEncoding::of(const Dataset& data, const DatasetSchema& schema) {
  if (static_cast<int>(data.categories.size()) != data.m()) {
    throw std::invalid_argument("dataset has no category dictionaries");
  }
  FeatureEncoding e;
  e.numeric = data.numeric_names;
  e.categorical = data.categorical_names;
  e.categories = data.categories;
  e.label = data.label_name;
  e.positive = data.positive_label;
  e.missing = schema.missing;
  e.missing_token = schema.missing_token;
  return e;
}

std::string FeatureEncoding::to_json_text() const {
  json j;
  j["numeric"] = numeric;
  j["categorical"] = json::array();
  for (std::size_t q = 0; q < categorical.size(); ++q) {
    j["categorical"].push_back({{"name", categorical[q]}, {"categories", categories[q]}});
  }
  j["label"] = label;
  j["positive"] = positive;
  j["missing"] = missing == MissingPolicy::NewCategory ? "new-category" : "drop-row";
  j["missing_token"] = missing_token;
  if (!mean.empty()) {
    j["mean"] = mean;
    j["scale"] = scale;
  }
  return j.dump(2) + "\n";
}

FeatureEncoding FeatureEncoding::from_json_text(const std::string& text) {
  FeatureEncoding e;
  try {
    const json j = json::parse(text);
    e.numeric = j.at("numeric").get<std::vector<std::string>>();
    for (const auto& c : j.at("categorical")) {
      e.categorical.push_back(c.at("name").get<std::string>());
      e.categories.push_back(c.at("categories").get<std::vector<std::string>>());
    }
    e.label = j.at("label").get<std::string>();
    e.positive = j.at("positive").get<std::string>();
    const std::string m = j.value("missing", std::string("new-category"));
    if (m != "new-category" && m != "drop-row") throw std::invalid_argument("missing must be new-category or drop-row");
    e.missing = m == "new-category" ? MissingPolicy::NewCategory : MissingPolicy::DropRow;
    e.missing_token = j.value("missing_token", std::string("?"));
    e.mean = j.value("mean", std::vector<double>{});
    e.scale = j.value("scale", std::vector<double>{});
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("bad feature encoding: ") + ex.what());
  }
  if (!e.mean.empty() && (e.mean.size() != e.numeric.size() || e.scale.size() != e.numeric.size())) {
    throw std::invalid_argument("standardization vectors do not match the numeric columns");
  }
  for (const auto& dict : e.categories) {
    if (dict.size() < 2) throw std::invalid_argument("category dictionaries need at least two entries");
  }
  return e;
}

Dataset encode_csv(std::istream& in, const FeatureEncoding& enc) {
  auto rows = read_csv(in);
  if (rows.empty()) throw std::invalid_argument("CSV has no header");
  std::vector<std::string> header = rows.front();
  for (auto& h : header) h = trim(h);
  rows.erase(rows.begin());
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("unknown column: " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t label_col = column(enc.label);
  std::vector<std::size_t> num_cols, cat_cols;
  for (const auto& c : enc.numeric) num_cols.push_back(column(c));
  for (const auto& c : enc.categorical) cat_cols.push_back(column(c));

  std::vector<std::vector<std::string>> kept;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.size() != header.size()) {
      throw std::invalid_argument("row " + std::to_string(r + 2) + " has " + std::to_string(row.size()) +
                                  " fields, expected " + std::to_string(header.size()));
    }
    for (auto& f : row) f = trim(f);
    auto missing = [&](std::size_t c) { return row[c] == enc.missing_token || row[c].empty(); };
    bool drop = missing(label_col);
    for (auto c : num_cols) drop = drop || missing(c);
    if (enc.missing == MissingPolicy::DropRow) {
      for (auto c : cat_cols) drop = drop || missing(c);
    }
    if (!drop) kept.push_back(std::move(row));
  }
  if (kept.empty()) throw std::invalid_argument("dataset is empty after filtering");

  const auto N = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd X(N, static_cast<Eigen::Index>(num_cols.size()));
  Eigen::MatrixXi Z(N, static_cast<Eigen::Index>(cat_cols.size()));
  Eigen::VectorXi y(N);
  std::vector<std::map<std::string, int>> index(cat_cols.size());
  std::vector<int> card;
  for (std::size_t q = 0; q < cat_cols.size(); ++q) {
    for (std::size_t t = 0; t < enc.categories[q].size(); ++t) index[q][enc.categories[q][t]] = static_cast<int>(t);
    card.push_back(static_cast<int>(enc.categories[q].size()));
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& row = kept[static_cast<std::size_t>(i)];
    for (std::size_t q = 0; q < num_cols.size(); ++q) {
      double v;
      if (!parse_double(row[num_cols[q]], v)) {
        throw std::invalid_argument("non-numeric token '" + row[num_cols[q]] + "' in column " + enc.numeric[q]);
      }
      if (!enc.mean.empty()) v = (v - enc.mean[q]) / enc.scale[q];
      X(i, static_cast<Eigen::Index>(q)) = v;
    }
    for (std::size_t q = 0; q < cat_cols.size(); ++q) {
      const auto it = index[q].find(row[cat_cols[q]]);
      if (it == index[q].end()) {
        throw std::invalid_argument("category '" + row[cat_cols[q]] + "' of column " + enc.categorical[q] +
                                    " was not seen in training");
      }
      Z(i, static_cast<Eigen::Index>(q)) = it->second;
    }
    y[i] = row[label_col] == enc.positive ? 1 : -1;
  }
  Dataset d = make_dataset(std::move(X), std::move(Z), std::move(y), std::move(card));
  d.numeric_names = enc.numeric;
  d.categorical_names = enc.categorical;
  d.categories = enc.categories;
  d.label_name = enc.label;
  d.positive_label = enc.positive;
  return d;
}

Dataset encode_csv(const std::string& path, const FeatureEncoding& encoding) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open data file " + path);
  return encode_csv(in, encoding);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  std::vector<std::string> header = data.numeric_names;
  header.insert(header.end(), data.categorical_names.begin(), data.categorical_names.end());
  header.push_back(data.label_name);
  write_csv_row(out, header);
  std::vector<std::string> fields;
  for (int i = 0; i < data.N(); ++i) {
    fields.clear();
    for (int j = 0; j < data.n(); ++j) {
      std::ostringstream ss;
      ss.precision(17);
      ss << data.X(i, j);
      fields.push_back(ss.str());
    }
    for (int j = 0; j < data.m(); ++j) {
      const int t = data.Z(i, j);
      const bool has_dict = static_cast<int>(data.categories.size()) == data.m() &&
                            static_cast<int>(data.categories[static_cast<std::size_t>(j)].size()) > t;
      fields.push_back(has_dict ? data.categories[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)]
                                : std::to_string(t));
    }
    fields.push_back(data.y[i] == 1 ? data.positive_label : data.negative_label);
    write_csv_row(out, fields);
  }
}

// ---------------------------------------------------------------------------
// Encoding

std::vector<int> one_hot(int index, int cardinality) {
  if (cardinality < 2) throw std::invalid_argument("cardinality must be at least 2");
  if (index < 0 || index >= cardinality) throw std::out_of_range("category index out of range");
  std::vector<int> block(static_cast<std::size_t>(cardinality - 1), 0);
  if (index > 0) block[static_cast<std::size_t>(index - 1)] = 1;
  return block;
}

int decode_one_hot(std::span<const int> block) {
  int index = 0;
  for (std::size_t t = 0; t < block.size(); ++t) {
    if (block[t] == 0) continue;
    if (block[t] != 1 || index != 0) throw std::invalid_argument("not a one-hot block");
    index = static_cast<int>(t) + 1;
  }
  return index;
}

// ---------------------------------------------------------------------------
// Splits

namespace {

std::vector<int> permutation(int N, std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  // Explicit Fisher-Yates so results do not depend on the standard library's shuffle.
  for (int i = N - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw std::invalid_argument("train fraction must be in (0,1)");
  const int N = data.N();
  const int n_train = static_cast<int>(std::lround(train_fraction * N));
  if (n_train < 1 || n_train >= N) throw std::invalid_argument("split leaves one side empty");
  const auto perm = permutation(N, seed);
  std::vector<int> tr(perm.begin(), perm.begin() + n_train);
  std::vector<int> te(perm.begin() + n_train, perm.end());
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  return {data.subset(tr), data.subset(te)};
}

std::vector<Fold> k_folds(const Dataset& data, int K, std::uint64_t seed) {
  if (K < 2) throw std::invalid_argument("need at least two folds");
  const int N = data.N();
  if (N < K) throw std::invalid_argument("fewer rows than folds");
  const auto perm = permutation(N, seed);
  std::vector<Fold> folds;
  int start = 0;
  for (int f = 0; f < K; ++f) {
    const int size = N / K + (f < N % K ? 1 : 0);
    std::vector<int> val(perm.begin() + start, perm.begin() + start + size);
    std::vector<int> tr(perm.begin(), perm.begin() + start);
    tr.insert(tr.end(), perm.begin() + start + size, perm.end());
    std::sort(val.begin(), val.end());
    std::sort(tr.begin(), tr.end());
    folds.push_back({data.subset(tr), data.subset(val)});
    start += size;
  }
  return folds;
}

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::fit(const Dataset& data) {
  Standardizer s;
  const int n = data.n();
  s.mean = Eigen::VectorXd::Zero(n);
  s.scale = Eigen::VectorXd::Ones(n);
  if (data.N() == 0) return s;
  s.mean = data.X.colwise().mean().transpose();
  for (int j = 0; j < n; ++j) {
    const double var = (data.X.col(j).array() - s.mean[j]).square().mean();
    if (var > 0.0) s.scale[j] = std::sqrt(var);
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
  if (data.n() != mean.size()) throw std::invalid_argument("standardizer dimension mismatch");
  Dataset d = data;
  for (int j = 0; j < d.n(); ++j) d.X.col(j) = (d.X.col(j).array() - mean[j]) / scale[j];
  return d;
}

// ---------------------------------------------------------------------------
// Synthetic data

SyntheticInstance generate_synthetic(int N, int m, std::uint64_t seed) {
  if (N < 1 || m < 1) throw std::invalid_argument("synthetic data needs N >= 1 and m >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SyntheticInstance inst;
  inst.truth = ModelParams::zeros(0, std::vector<int>(static_cast<std::size_t>(m), 2));
  inst.truth.beta0 = normal(rng);
  for (int j = 0; j < m; ++j) inst.truth.beta_cat[j] = normal(rng);
  const double norm = std::sqrt(inst.truth.beta0 * inst.truth.beta0 + inst.truth.beta_cat.squaredNorm());
  inst.truth.beta0 /= norm;
  inst.truth.beta_cat /= norm;

  Eigen::MatrixXi Z(N, m);
  Eigen::VectorXi y(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < m; ++j) Z(i, j) = unif(rng) < 0.5 ? 0 : 1;
    const double score = inst.truth.beta0 + Z.row(i).cast<double>().dot(inst.truth.beta_cat);
    const double p = 1.0 / (1.0 + std::exp(-score));
    y[i] = unif(rng) < p ? 1 : -1;
  }
  inst.data = make_dataset(Eigen::MatrixXd(N, 0), std::move(Z), std::move(y), std::vector<int>(m, 2));
  inst.data.categories.assign(static_cast<std::size_t>(m), {"0", "1"});
  return inst;
}

void export_synthetic(const SyntheticInstance& inst, const std::string& stem) {
  std::ostringstream csv;
  write_dataset_csv(csv, inst.data);
  write_file_atomic(stem + ".csv", csv.str());
  write_file_atomic(stem + ".truth.json", inst.truth.to_json_text());
  DatasetSchema schema;
  schema.label = inst.data.label_name;
  schema.positive = inst.data.positive_label;
  schema.categorical = inst.data.categorical_names;
  schema.categorical_is_rest = false;
  write_file_atomic(stem + ".schema.json", schema.to_json_text());
}

}  // namespace wdro
