#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "saol/io.hpp"
#include "test_helpers.hpp"

using namespace saol;
using namespace saol::testing;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("operator save/load round trip is bit exact") {
  Rng rng(1);
  AnalysisOperator op = AnalysisOperator::random({{4, 3}, {3, 3}}, rng);
  OperatorMetadata meta;
  meta.seed = 77;
  meta.iterations = 1234;
  TempFile f("test_op.json");
  save_operator(op, meta, f.path);
  LoadedOperator back = load_operator(f.path);
  REQUIRE(back.op.num_factors() == 2);
  for (size_t k = 0; k < 2; ++k)
    CHECK((back.op.factors()[k] - op.factors()[k]).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(back.meta.seed == 77);
  CHECK(back.meta.iterations == 1234);
  CHECK_FALSE(back.renormalized);
}

TEST_CASE("single scalar factor operator") {
  AnalysisOperator op(std::vector<Matrix>{Matrix::Constant(1, 1, -1.0)});
  TempFile f("test_op_scalar.json");
  save_operator(op, {}, f.path);
  LoadedOperator back = load_operator(f.path);
  CHECK(back.op.factors()[0](0, 0) == -1.0);
}

TEST_CASE("loader renormalizes mild row-norm drift and rejects gross drift") {
  auto write_doc = [](const std::string& path, double scale) {
    std::ofstream out(path);
    out.precision(17);
    out << R"({"format":"saol-operator-v1","separable":false,"factors":[)"
        << R"({"rows":1,"cols":2,"data":[)" << scale << R"(,0.0]}]})";
  };
  TempFile mild("test_op_mild.json");
  write_doc(mild.path, 1.0 + 1e-7);
  LoadedOperator ok = load_operator(mild.path);
  CHECK(ok.renormalized);
  CHECK(std::abs(ok.op.factors()[0].row(0).norm() - 1.0) < 1e-12);

  TempFile gross("test_op_gross.json");
  write_doc(gross.path, 1.1);
  CHECK_THROWS_AS(load_operator(gross.path), FormatError);
}

TEST_CASE("operator loader rejects malformed files") {
  TempFile f("test_op_bad.json");
  {
    std::ofstream out(f.path);
    out << "not json";
  }
  CHECK_THROWS_AS(load_operator(f.path), FormatError);
  {
    std::ofstream out(f.path);
    out << R"({"format":"something-else","factors":[]})";
  }
  CHECK_THROWS_AS(load_operator(f.path), FormatError);
}

TEST_CASE("dataset round trip preserves every double") {
  Rng rng(2);
  SignalSet set{{3, 2}, random_matrix(6, 17, rng)};
  TempFile f("test_data.bin");
  save_dataset(set, f.path);
  SignalSet back = load_dataset(f.path);
  CHECK(back.mode_sizes == set.mode_sizes);
  CHECK((back.samples - set.samples).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("truncated dataset reports the expected byte count") {
  Rng rng(3);
  SignalSet set{{4}, random_matrix(4, 5, rng)};
  TempFile f("test_data_trunc.bin");
  save_dataset(set, f.path);
  std::string bytes;
  {
    std::ifstream in(f.path, std::ios::binary);
    bytes.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  bytes.resize(bytes.size() - 8);
  {
    std::ofstream out(f.path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  try {
    load_dataset(f.path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    // 8 magic + 4 count + 4 mode + 8 N + 5*4*8 payload
    CHECK(std::string(e.what()).find("184") != std::string::npos);
  }
}

TEST_CASE("dataset loader rejects bad magic") {
  TempFile f("test_data_magic.bin");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "WRONGMAG00000000";
  }
  CHECK_THROWS_AS(load_dataset(f.path), FormatError);
}
