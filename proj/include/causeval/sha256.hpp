#pragma once

#include <string>
#include <string_view>

namespace causeval {

// SHA-256 digest as a lowercase hex string. Used for response-cache keys,
// where collision resistance matters because a key clash would silently
// return the wrong cached answer.
std::string sha256_hex(std::string_view data);

}  // namespace causeval
