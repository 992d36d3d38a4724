#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rh::csv {

/// Quotes a field when it contains a delimiter, quote or line break.
std::string escape(std::string_view field);

/// Splits one CSV record. Quoted fields may contain commas and doubled
/// quotes; embedded line breaks are not supported. Returns false on an
/// unterminated quote.
bool split(std::string_view line, std::vector<std::string>& fields);

}  // namespace rh::csv
