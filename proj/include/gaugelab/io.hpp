/// Field snapshots: flat little-endian binary records and CSV for small grids.
#pragma once

#include <iosfwd>
#include <stdexcept>

#include "gaugelab/gauge.hpp"

namespace gaugelab {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class FieldKind : std::uint32_t { scalar = 1, su2 = 2 };

/// Record layout: "GLFIELD1", u32 dim, u32 n, f64 L, u32 degree, u32 kind, then
/// sites * ncomp * (1 or 3) little-endian f64 in row-major site order.
void write_field(std::ostream& os, const ScalarField& f);
void write_field(std::ostream& os, const Su2Form& f);
ScalarField read_scalar_field(std::istream& is);
Su2Form read_su2_field(std::istream& is);

/// "GLPAIR01", f64 r, then the connection offset and alpha records.
void write_pair(std::ostream& os, const GaugePair& P);
GaugePair read_pair(std::istream& is);

/// Columns i,j[,k],comp,value[s]; throws IoError above max_sites.
void write_csv(std::ostream& os, const ScalarField& f, std::size_t max_sites = 1u << 16);
void write_csv(std::ostream& os, const Su2Form& f, std::size_t max_sites = 1u << 16);

}  // namespace gaugelab
