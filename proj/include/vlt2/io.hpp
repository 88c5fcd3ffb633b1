#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vlt2/core.hpp"

namespace vlt2 {

static_assert(std::endian::native == std::endian::little,
              "FieldFile payloads are little-endian; big-endian hosts are unsupported");

enum class FieldKind { Scalar, Vector, Tensor2 };

inline const char* to_string(FieldKind k) {
    switch (k) {
        case FieldKind::Scalar: return "scalar";
        case FieldKind::Vector: return "vector";
        case FieldKind::Tensor2: return "tensor2";
    }
    return "?";
}

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Header line: VLT2 <kind> <nx> <ny> <xmin> <xmax> <ymin> <ymax>
inline std::string field_header(FieldKind kind, const GridSpec& s) {
    std::ostringstream os;
    os << "VLT2 " << to_string(kind) << ' ' << s.nx << ' ' << s.ny << ' '
       << format_double(s.x_min) << ' ' << format_double(s.x_max) << ' '
       << format_double(s.y_min) << ' ' << format_double(s.y_max) << '\n';
    return os.str();
}

inline void write_payload(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline void read_payload(std::istream& is, std::vector<double>& v) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw std::invalid_argument("FieldFile: truncated payload");
}

struct ParsedHeader {
    FieldKind kind;
    GridSpec spec;
};

inline ParsedHeader read_header(std::istream& is, const std::string& path) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("FieldFile: cannot read header in " + path);
    std::istringstream hs(line);
    std::string magic, kind_s;
    int nx = 0, ny = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    if (!(hs >> magic >> kind_s >> nx >> ny >> x0 >> x1 >> y0 >> y1) || magic != "VLT2")
        throw std::invalid_argument("FieldFile: bad header in " + path);
    FieldKind kind;
    if (kind_s == "scalar") kind = FieldKind::Scalar;
    else if (kind_s == "vector") kind = FieldKind::Vector;
    else if (kind_s == "tensor2") kind = FieldKind::Tensor2;
    else throw std::invalid_argument("FieldFile: unknown kind '" + kind_s + "' in " + path);
    return {kind, GridSpec(nx, ny, x0, x1, y0, y1)};
}

} // namespace detail

inline void write_field(const std::string& path, const ScalarField2& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("FieldFile: cannot open " + path + " for writing");
    os << detail::field_header(FieldKind::Scalar, f.spec);
    detail::write_payload(os, f.v);
}

inline void write_field(const std::string& path, const VectorField2& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("FieldFile: cannot open " + path + " for writing");
    os << detail::field_header(FieldKind::Vector, g.spec());
    detail::write_payload(os, g.g1.v);
    detail::write_payload(os, g.g2.v);
}

inline void write_field(const std::string& path, const SymTensorField2& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("FieldFile: cannot open " + path + " for writing");
    os << detail::field_header(FieldKind::Tensor2, f.spec());
    detail::write_payload(os, f.f11.v);
    detail::write_payload(os, f.f12.v);
    detail::write_payload(os, f.f22.v);
}

inline FieldKind peek_field_kind(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("FieldFile: cannot open " + path);
    return detail::read_header(is, path).kind;
}

inline ScalarField2 read_scalar_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("FieldFile: cannot open " + path);
    const auto hdr = detail::read_header(is, path);
    if (hdr.kind != FieldKind::Scalar)
        throw std::invalid_argument("FieldFile: expected scalar data in " + path);
    ScalarField2 f(hdr.spec);
    detail::read_payload(is, f.v);
    return f;
}

inline VectorField2 read_vector_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("FieldFile: cannot open " + path);
    const auto hdr = detail::read_header(is, path);
    if (hdr.kind != FieldKind::Vector)
        throw std::invalid_argument("FieldFile: expected vector data in " + path);
    VectorField2 g(hdr.spec);
    detail::read_payload(is, g.g1.v);
    detail::read_payload(is, g.g2.v);
    return g;
}

inline SymTensorField2 read_tensor_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("FieldFile: cannot open " + path);
    const auto hdr = detail::read_header(is, path);
    if (hdr.kind != FieldKind::Tensor2)
        throw std::invalid_argument("FieldFile: expected tensor2 data in " + path);
    SymTensorField2 f(hdr.spec);
    detail::read_payload(is, f.f11.v);
    detail::read_payload(is, f.f12.v);
    detail::read_payload(is, f.f22.v);
    return f;
}

/// CSV emission for external plotting: x, y, then one column per component.
inline void write_csv(const std::string& path, const SymTensorField2& f) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open " + path + " for writing");
    os << "x,y,f11,f12,f22\n";
    for (int j = 0; j < f.spec().ny; ++j)
        for (int i = 0; i < f.spec().nx; ++i)
            os << detail::format_double(f.spec().x(i)) << ',' << detail::format_double(f.spec().y(j))
               << ',' << detail::format_double(f.f11.at(i, j)) << ','
               << detail::format_double(f.f12.at(i, j)) << ','
               << detail::format_double(f.f22.at(i, j)) << '\n';
}

inline void write_csv(const std::string& path, const ScalarField2& f) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open " + path + " for writing");
    os << "x,y,value\n";
    for (int j = 0; j < f.spec.ny; ++j)
        for (int i = 0; i < f.spec.nx; ++i)
            os << detail::format_double(f.spec.x(i)) << ',' << detail::format_double(f.spec.y(j))
               << ',' << detail::format_double(f.at(i, j)) << '\n';
}

} // namespace vlt2
