#include "saol/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace saol {

namespace {

constexpr char kOperatorFormat[] = "saol-operator-v1";
constexpr char kDatasetMagic[8] = {'S', 'A', 'O', 'L', 'S', 'I', 'G', '1'};

void atomic_write(const std::string& path, const std::string& bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move temporary file into place: " + path);
}

template <typename T>
void append_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  // this build targets little-endian hosts; the format is little-endian
  out.append(buf, sizeof(T));
}

template <typename T>
T read_le(const std::string& bytes, size_t& pos) {
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

void save_operator(const AnalysisOperator& op, const OperatorMetadata& meta,
                   const std::string& path) {
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : op.factors()) {
    std::vector<double> data;
    data.reserve(static_cast<size_t>(f.size()));
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      for (Eigen::Index c = 0; c < f.cols(); ++c) data.push_back(f(r, c));
    factors.push_back({{"rows", f.rows()}, {"cols", f.cols()}, {"data", data}});
  }
  nlohmann::json doc{
      {"format", kOperatorFormat},
      {"separable", op.num_factors() > 1},
      {"factors", factors},
      {"metadata",
       {{"nu", meta.nu},
        {"kappa", meta.kappa},
        {"mu", meta.mu},
        {"seed", meta.seed},
        {"iterations", meta.iterations},
        {"created", meta.created}}},
  };
  atomic_write(path, doc.dump(2) + "\n");
}

LoadedOperator load_operator(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("operator file is not valid JSON: " + path + " (" + e.what() + ")");
  }
  if (!doc.contains("format") || doc["format"] != kOperatorFormat)
    throw FormatError("unrecognized operator format tag in " + path);
  if (!doc.contains("factors") || !doc["factors"].is_array() || doc["factors"].empty())
    throw FormatError("operator file has no factors: " + path);

  LoadedOperator out;
  std::vector<Matrix> fs;
  for (const auto& jf : doc["factors"]) {
    Eigen::Index rows = jf.at("rows").get<Eigen::Index>();
    Eigen::Index cols = jf.at("cols").get<Eigen::Index>();
    const auto& data = jf.at("data");
    if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw FormatError("factor data length does not match dimensions in " + path);
    Matrix f(rows, cols);
    size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) f(r, c) = data[k++].get<double>();
    for (Eigen::Index r = 0; r < rows; ++r) {
      double n = f.row(r).norm();
      if (std::abs(n - 1.0) > 1e-6)
        throw FormatError("operator row norm deviates beyond tolerance in " + path);
      if (std::abs(n - 1.0) > 1e-8) {
        out.renormalized = true;
        f.row(r) /= n;
      }
    }
    fs.push_back(std::move(f));
  }
  out.op = AnalysisOperator(std::move(fs));
  if (doc.contains("metadata")) {
    const auto& md = doc["metadata"];
    out.meta.nu = md.value("nu", out.meta.nu);
    out.meta.kappa = md.value("kappa", out.meta.kappa);
    out.meta.mu = md.value("mu", out.meta.mu);
    out.meta.seed = md.value("seed", out.meta.seed);
    out.meta.iterations = md.value("iterations", out.meta.iterations);
    out.meta.created = md.value("created", out.meta.created);
  }
  return out;
}

void save_dataset(const SignalSet& signals, const std::string& path) {
  Eigen::Index p = 1;
  for (auto s : signals.mode_sizes) p *= s;
  if (p != signals.sample_length())
    throw std::invalid_argument("save_dataset: mode sizes inconsistent with sample length");
  std::string bytes;
  bytes.append(kDatasetMagic, sizeof(kDatasetMagic));
  append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(signals.mode_sizes.size()));
  for (auto s : signals.mode_sizes) append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(s));
  append_le<std::uint64_t>(bytes, static_cast<std::uint64_t>(signals.count()));
  for (Eigen::Index j = 0; j < signals.count(); ++j)
    for (Eigen::Index k = 0; k < p; ++k) append_le<double>(bytes, signals.samples(k, j));
  atomic_write(path, bytes);
}

SignalSet load_dataset(const std::string& path) {
  std::string bytes = slurp(path);
  if (bytes.size() < sizeof(kDatasetMagic) + 4 ||
      std::memcmp(bytes.data(), kDatasetMagic, sizeof(kDatasetMagic)) != 0)
    throw FormatError("bad dataset magic in " + path);
  size_t pos = sizeof(kDatasetMagic);
  auto t = read_le<std::uint32_t>(bytes, pos);
  if (t == 0 || t > 4) throw FormatError("unsupported mode count in " + path);
  if (bytes.size() < pos + 4ull * t + 8) throw FormatError("truncated dataset header in " + path);
  SignalSet out;
  Eigen::Index p = 1;
  for (std::uint32_t k = 0; k < t; ++k) {
    auto s = read_le<std::uint32_t>(bytes, pos);
    if (s == 0) throw FormatError("zero mode size in " + path);
    out.mode_sizes.push_back(static_cast<Eigen::Index>(s));
    p *= static_cast<Eigen::Index>(s);
  }
  auto n = read_le<std::uint64_t>(bytes, pos);
  if (n == 0) throw FormatError("dataset has no samples: " + path);
  size_t expected = pos + 8ull * n * static_cast<size_t>(p);
  if (bytes.size() != expected)
    throw FormatError("dataset truncated or oversized: " + path + " (expected " +
                      std::to_string(expected) + " bytes, have " +
                      std::to_string(bytes.size()) + ")");
  out.samples.resize(p, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < out.samples.cols(); ++j)
    for (Eigen::Index k = 0; k < p; ++k) out.samples(k, j) = read_le<double>(bytes, pos);
  return out;
}

}  // namespace saol
