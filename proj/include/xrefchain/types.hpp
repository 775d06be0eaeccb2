#pragma once

#include <cstdint>
#include <vector>

namespace xref {

using Bytes = std::vector<std::uint8_t>;

using DomainId = std::uint32_t;
using NodeId = std::uint32_t;
using BlockHeight = std::uint64_t;
using SequenceNumber = std::uint64_t;

} // namespace xref
