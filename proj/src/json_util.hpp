/*
 * Copyright 2026 The ofprint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Schema helpers shared by the signature, scenario and report documents.

#pragma once

#include "ofprint/signatures.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace ofp {

using ojson = nlohmann::ordered_json;

namespace detail {

[[noreturn]] void field_error(const std::string& where, const std::string& msg);
void reject_unknown_keys(const ojson& obj, std::initializer_list<const char*> allowed,
                         const std::string& where);
const ojson& require(const ojson& obj, const char* key, const std::string& where);
double require_number(const ojson& obj, const char* key, const std::string& where);
bool require_bool(const ojson& obj, const char* key, const std::string& where);
Timeout parse_timeout(const ojson& obj, const char* key, const std::string& where);
std::optional<std::string> optional_pattern(const ojson& obj, const char* key,
                                            const std::string& where);
std::optional<std::uint16_t> optional_ethertype(const ojson& obj, const std::string& where);
LldpProfile parse_lldp(const ojson& v, const std::string& where);
ojson lldp_json(const LldpProfile& p);
std::string line_context(std::string_view text, std::size_t byte);
ojson timeout_json(const Timeout& t);
std::string hex16(std::uint16_t v);
ojson parse_document(std::string_view text, const std::string& what);

} // namespace detail
} // namespace ofp
