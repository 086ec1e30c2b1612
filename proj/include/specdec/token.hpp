#pragma once

#include <cstdint>
#include <vector>

namespace specdec {

using Token = std::uint32_t;
using TokenSeq = std::vector<Token>;
using TokenRows = std::vector<TokenSeq>;

} // namespace specdec
