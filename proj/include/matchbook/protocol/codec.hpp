#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "matchbook/protocol/messages.hpp"

namespace matchbook::proto {

class EncodeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

enum class DecodeError : std::uint8_t {
  None,
  TruncatedFrame,   // fewer than 20 bytes, or fewer than frame_length
  LengthMismatch,   // frame_length disagrees with the template's fixed size or the datagram
  UnknownTemplate,
  BadVersion,
  InvalidField,     // enum byte, flag bit or password byte out of range
};

std::string_view to_string(DecodeError e);

struct DecodeResult {
  std::optional<Frame> frame;
  DecodeError error{DecodeError::None};

  explicit operator bool() const { return frame.has_value(); }
};

// Throws EncodeError when a field is out of range (negative quantities or
// prices, oversized or non-ASCII passwords, booleans outside the flag set).
std::vector<std::uint8_t> encode(const Frame& frame);
// Writes into `out`, returning the frame length. Throws EncodeError when the
// buffer is too small.
std::size_t encode_into(const Frame& frame, std::span<std::uint8_t> out);

DecodeResult decode(std::span<const std::uint8_t> bytes);

}  // namespace matchbook::proto
