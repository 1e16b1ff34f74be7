#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "attrsig/signif.hpp"

namespace attrsig::cli {

/// Environment variable consulted when --dict is not given.
inline constexpr const char* kDictionaryEnv = "ATTRSIG_DICT";

enum ExitCode : int { kOk = 0, kRejected = 1, kFailure = 2 };

/// Serialized form of one scoring result; reals carry 4 decimals.
nlohmann::ordered_json result_to_json(const SignifResult& result);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace attrsig::cli
