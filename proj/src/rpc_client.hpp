// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "block_trace.hpp"

namespace gasrec {

struct FetchOptions {
    // Number of concurrent connections used to pull the range. The assembled
    // trace is identical regardless of this value.
    unsigned parallelism{8};
};

// Pulls blocks [from_block, to_block] from a JSON-RPC endpoint via
// eth_getBlockByNumber with full transaction bodies, and reduces each block
// to a BlockRecord. Throws TransportError on connection/HTTP failures and
// ParseError on malformed responses.
BlockTrace fetch_trace(const std::string& rpc_url, uint64_t from_block, uint64_t to_block,
                       const FetchOptions& options = {});

}  // namespace gasrec
