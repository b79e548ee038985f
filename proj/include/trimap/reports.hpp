#pragma once

#include <iosfwd>
#include <string>

#include "trimap/nuclear_rep.hpp"
#include "trimap/statistics.hpp"
#include "trimap/transfer_op.hpp"

namespace trimap {

// Serialization of the report types.  CSV uses '.' decimals and no locale;
// JSON numbers are emitted with 17 significant digits so round trips are
// bit-faithful.  Timestamps live only in the metadata block.

void write_frequency_csv(std::ostream& os, const FrequencyReport& rep);
std::string frequency_json(const FrequencyReport& rep, bool with_timestamp = true);

std::string spectral_json(const SpectralReport& rep, bool with_timestamp = true);

std::string nuclear_expansion_json(const NuclearExpansion& e, bool with_timestamp = true);

// Identity-suite rows: (inputs..., lhs, rhs, |lhs - rhs|).
struct IdentityRow {
    std::string suite;
    std::string inputs;
    double lhs;
    double rhs;
};
void write_identity_csv(std::ostream& os, const std::vector<IdentityRow>& rows);

std::string format_double(double v); // %.17g

} // namespace trimap
