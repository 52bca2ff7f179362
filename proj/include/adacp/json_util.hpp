#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "adacp/errors.hpp"

namespace adacp {

// Strict-schema helper: reject unknown fields so config typos fail loudly.
inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
    if (!j.is_object()) throw ValidationError(context + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ValidationError(context + ": unknown field '" + it.key() + "'");
    }
}

}  // namespace adacp
