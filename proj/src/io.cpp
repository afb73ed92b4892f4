#include "gaugelab/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

namespace gaugelab {

namespace {

constexpr char kFieldMagic[8] = {'G', 'L', 'F', 'I', 'E', 'L', 'D', '1'};
constexpr char kPairMagic[8] = {'G', 'L', 'P', 'A', 'I', 'R', '0', '1'};

template <class T>
void put(std::ostream& os, T v) {
    std::array<char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    os.write(b.data(), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    std::array<char, sizeof(T)> b;
    if (!is.read(b.data(), sizeof(T))) throw IoError("truncated field record");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

void put_header(std::ostream& os, const Grid& g, int degree, FieldKind kind) {
    os.write(kFieldMagic, 8);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
    put<double>(os, g.L);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(degree));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(kind));
}

void expect_magic(std::istream& is, const char* magic) {
    char b[8];
    if (!is.read(b, 8) || std::memcmp(b, magic, 8) != 0) throw IoError("bad record magic");
}

struct Header {
    Grid g;
    int degree;
    FieldKind kind;
};

Header get_header(std::istream& is) {
    expect_magic(is, kFieldMagic);
    const auto dim = get<std::uint32_t>(is);
    const auto n = get<std::uint32_t>(is);
    const double L = get<double>(is);
    const auto degree = get<std::uint32_t>(is);
    const auto kind = get<std::uint32_t>(is);
    if (kind != 1 && kind != 2) throw IoError("unknown field kind");
    try {
        Grid g(static_cast<int>(dim), static_cast<int>(n), L);
        if (degree > dim) throw IoError("degree exceeds dimension");
        return {g, static_cast<int>(degree), static_cast<FieldKind>(kind)};
    } catch (const GridError& e) {
        throw IoError(std::string("invalid grid in header: ") + e.what());
    }
}

template <class V>
void csv_rows(std::ostream& os, const Form<V>& f, std::size_t max_sites) {
    const Grid& g = f.grid;
    if (g.sites() > max_sites) throw IoError("grid too large for CSV output");
    os << (g.dim == 2 ? "i,j" : "i,j,k") << ",comp";
    if constexpr (std::is_same_v<V, double>) os << ",value\n";
    else os << ",c1,c2,c3\n";
    char buf[64];
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const auto c = g.coords(s);
        for (int comp = 0; comp < f.ncomp; ++comp) {
            for (int a = 0; a < g.dim; ++a) os << c[a] << ',';
            os << comp;
            if constexpr (std::is_same_v<V, double>) {
                std::snprintf(buf, sizeof buf, ",%.17g", f.at(s, comp));
                os << buf;
            } else {
                for (int i = 0; i < 3; ++i) {
                    std::snprintf(buf, sizeof buf, ",%.17g", f.at(s, comp)[i]);
                    os << buf;
                }
            }
            os << '\n';
        }
    }
}

}  // namespace

void write_field(std::ostream& os, const ScalarField& f) {
    put_header(os, f.grid, f.degree, FieldKind::scalar);
    for (double v : f.data) put<double>(os, v);
}

void write_field(std::ostream& os, const Su2Form& f) {
    put_header(os, f.grid, f.degree, FieldKind::su2);
    for (const Su2& v : f.data)
        for (int i = 0; i < 3; ++i) put<double>(os, v[i]);
}

ScalarField read_scalar_field(std::istream& is) {
    const Header h = get_header(is);
    if (h.kind != FieldKind::scalar) throw IoError("expected a scalar field record");
    ScalarField f(h.g, h.degree);
    for (double& v : f.data) v = get<double>(is);
    return f;
}

Su2Form read_su2_field(std::istream& is) {
    const Header h = get_header(is);
    if (h.kind != FieldKind::su2) throw IoError("expected an su2 field record");
    Su2Form f(h.g, h.degree);
    for (Su2& v : f.data)
        for (int i = 0; i < 3; ++i) v[i] = get<double>(is);
    return f;
}

void write_pair(std::ostream& os, const GaugePair& P) {
    os.write(kPairMagic, 8);
    put<double>(os, P.r);
    write_field(os, P.a);
    write_field(os, P.alpha);
}

GaugePair read_pair(std::istream& is) {
    expect_magic(is, kPairMagic);
    const double r = get<double>(is);
    Su2Form a = read_su2_field(is);
    Su2Form alpha = read_su2_field(is);
    if (!(a.grid == alpha.grid) || a.degree != 1 || alpha.degree != 1) throw IoError("pair records disagree");
    return {std::move(a), std::move(alpha), r};
}

void write_csv(std::ostream& os, const ScalarField& f, std::size_t max_sites) { csv_rows(os, f, max_sites); }
void write_csv(std::ostream& os, const Su2Form& f, std::size_t max_sites) { csv_rows(os, f, max_sites); }

}  // namespace gaugelab
