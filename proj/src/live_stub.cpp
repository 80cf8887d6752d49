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

#include "ofprint/live.hpp"

namespace ofp {

std::unique_ptr<ProbeTransport> open_live_transport(const std::string& iface)
{
    throw Error(ErrorCode::CaptureUnsupported,
                "live backend not built (configure with -DOFPRINT_LIVE=ON); cannot open '" +
                    iface + "'");
}

bool live_backend_available()
{
    return false;
}

} // namespace ofp
