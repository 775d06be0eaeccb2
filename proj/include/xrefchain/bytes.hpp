#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "xrefchain/types.hpp"

namespace xref {

// Canonical big-endian encoder used for every signed or hashed byte layout.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }

    void u32be(std::uint32_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v >> 24));
        buf_.push_back(static_cast<std::uint8_t>(v >> 16));
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        buf_.push_back(static_cast<std::uint8_t>(v));
    }

    void u64be(std::uint64_t v) {
        u32be(static_cast<std::uint32_t>(v >> 32));
        u32be(static_cast<std::uint32_t>(v));
    }

    void raw(std::span<const std::uint8_t> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }

    void raw(std::string_view s) {
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    [[nodiscard]] const Bytes& bytes() const { return buf_; }
    [[nodiscard]] Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

[[nodiscard]] std::string to_hex(std::span<const std::uint8_t> data);
[[nodiscard]] std::optional<Bytes> from_hex(std::string_view hex);

} // namespace xref
