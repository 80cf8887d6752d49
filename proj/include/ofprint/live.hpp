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

#pragma once

#include "ofprint/transport.hpp"

#include <memory>
#include <string>

namespace ofp {

/// Raw-socket transport on `iface` (Linux, CAP_NET_RAW). Throws
/// Error{CaptureUnsupported} when the library was built without it or the
/// sockets cannot be opened.
std::unique_ptr<ProbeTransport> open_live_transport(const std::string& iface);

bool live_backend_available();

} // namespace ofp
