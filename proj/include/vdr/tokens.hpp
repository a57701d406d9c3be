#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

namespace vdr {

// Counts tokens in a piece of text. Budgets are enforced through this so an
// exact tokenizer can be plugged in; the default approximates one token per
// four bytes, rounding up.
using TokenCounter = std::function<std::size_t(std::string_view)>;

inline std::size_t count_tokens(std::string_view text) {
    return (text.size() + 3) / 4;
}

inline TokenCounter default_token_counter() {
    return [](std::string_view s) { return count_tokens(s); };
}

}  // namespace vdr
