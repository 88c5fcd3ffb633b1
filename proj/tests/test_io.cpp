#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vlt2/core.hpp"
#include "vlt2/io.hpp"
#include "vlt2/phantoms.hpp"
#include "vlt2/rng.hpp"
#include "test_helpers.hpp"

using namespace vlt2;
using namespace vlt2::testing;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("FieldFile round trips preserve every byte of the payload") {
    const GridSpec s = GridSpec::square(33, 1.25);
    Rng rng(71);

    ScalarField2 h(s);
    for (double& x : h.v) x = rng.uniform(-3, 3);
    TempFile f1("vlt2_io_scalar.vlt2");
    write_field(f1.path, h);
    CHECK(peek_field_kind(f1.path) == FieldKind::Scalar);
    const ScalarField2 h2 = read_scalar_field(f1.path);
    CHECK(h2.spec == s);
    CHECK(h2.v == h.v);

    VectorField2 g(s);
    for (double& x : g.g1.v) x = rng.uniform(-1, 1);
    for (double& x : g.g2.v) x = rng.gaussian();
    TempFile f2("vlt2_io_vector.vlt2");
    write_field(f2.path, g);
    const VectorField2 g2 = read_vector_field(f2.path);
    CHECK(g2.g1.v == g.g1.v);
    CHECK(g2.g2.v == g.g2.v);

    const SymTensorField2 t = bump_tensor({{0, 0}, 0.5, 1}, {{0.1, 0}, 0.4, -2}, {{0, 0.1}, 0.45, 0.5}, s);
    TempFile f3("vlt2_io_tensor.vlt2");
    write_field(f3.path, t);
    const SymTensorField2 t2 = read_tensor_field(f3.path);
    CHECK(t2.f11.v == t.f11.v);
    CHECK(t2.f12.v == t.f12.v);
    CHECK(t2.f22.v == t.f22.v);

    // kind mismatch and bad magic are input errors
    CHECK_THROWS_AS(read_scalar_field(f3.path), std::invalid_argument);
    TempFile f4("vlt2_io_bad.vlt2");
    {
        std::ofstream os(f4.path, std::ios::binary);
        os << "VLT9 scalar 4 4 0 1 0 1\n";
    }
    CHECK_THROWS_AS(read_scalar_field(f4.path), std::invalid_argument);
    CHECK_THROWS_AS(read_scalar_field("/nonexistent/path.vlt2"), std::invalid_argument);

    // truncated payload
    TempFile f5("vlt2_io_trunc.vlt2");
    {
        std::ofstream os(f5.path, std::ios::binary);
        os << "VLT2 scalar 4 4 0 1 0 1\n";
        const double x = 1.0;
        os.write(reinterpret_cast<const char*>(&x), sizeof(x));
    }
    CHECK_THROWS_AS(read_scalar_field(f5.path), std::invalid_argument);
}

TEST_CASE("identical writes are byte-identical") {
    const GridSpec s = GridSpec::square(17, 0.8);
    ScalarField2 h(s);
    Rng rng(72);
    for (double& x : h.v) x = rng.gaussian();
    TempFile a("vlt2_io_det_a.vlt2");
    TempFile b("vlt2_io_det_b.vlt2");
    write_field(a.path, h);
    write_field(b.path, h);
    std::ifstream ia(a.path, std::ios::binary), ib(b.path, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(ia)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(ib)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(sa.size() == sb.size());
}

TEST_CASE("CSV emission carries one row per vertex") {
    const GridSpec s = GridSpec::square(5, 1.0);
    SymTensorField2 t(s);
    t.f11.at(2, 2) = 3.5;
    TempFile f("vlt2_io_plot.csv");
    write_csv(f.path, t);
    std::ifstream is(f.path);
    std::string line;
    int rows = 0;
    std::getline(is, line);
    CHECK(line == "x,y,f11,f12,f22");
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 25);
}
