#pragma once

#include <functional>
#include <string_view>

namespace wrac {

/// Token estimator signature. Plug in an exact tokenizer if one is available;
/// the default below is pure and stable so runs stay reproducible without one.
using TokenCounter = std::function<long(std::string_view)>;

/// Default token approximation: ceil(byte_count / 4).
inline long count_tokens(std::string_view text) {
    return static_cast<long>((text.size() + 3) / 4);
}

inline TokenCounter default_token_counter() {
    return [](std::string_view s) { return count_tokens(s); };
}

}  // namespace wrac
