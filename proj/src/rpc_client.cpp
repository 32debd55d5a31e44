// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "rpc_client.hpp"

#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#ifdef GASREC_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "errors.hpp"
#include "wei.hpp"

namespace gasrec {

namespace {

using nlohmann::json;

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. "http://node.example:8545"
    std::string path;              // e.g. "/" or "/rpc"
};

ParsedUrl parse_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ArgumentError("RPC URL '" + url + "' has no scheme");
    }
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ArgumentError("RPC URL scheme '" + scheme + "' not supported");
    }
#ifndef GASREC_HAVE_OPENSSL
    if (scheme == "https") {
        throw TransportError("built without TLS support; use an http:// endpoint");
    }
#endif
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl parsed;
    if (path_start == std::string::npos) {
        parsed.scheme_host_port = url;
        parsed.path = "/";
    } else {
        parsed.scheme_host_port = url.substr(0, path_start);
        parsed.path = url.substr(path_start);
    }
    return parsed;
}

std::string to_hex_quantity(uint64_t value) {
    std::ostringstream out;
    out << "0x" << std::hex << value;
    return out.str();
}

BlockRecord record_from_block(const json& block, uint64_t expected_number) {
    if (!block.is_object()) {
        std::ostringstream msg;
        msg << "block " << expected_number << ": result is not an object";
        throw ParseError(msg.str());
    }
    const auto field = [&](const char* name) -> const json& {
        auto it = block.find(name);
        if (it == block.end() || !it->is_string()) {
            std::ostringstream msg;
            msg << "block " << expected_number << ": missing field '" << name << "'";
            throw ParseError(msg.str());
        }
        return *it;
    };
    BlockRecord record;
    record.number = wei_to_u64(parse_hex_quantity(field("number").get<std::string>()));
    if (record.number != expected_number) {
        std::ostringstream msg;
        msg << "requested block " << expected_number << " but node returned " << record.number;
        throw ParseError(msg.str());
    }
    record.timestamp = wei_to_u64(parse_hex_quantity(field("timestamp").get<std::string>()));
    record.gas_used = wei_to_u64(parse_hex_quantity(field("gasUsed").get<std::string>()));
    record.gas_limit = wei_to_u64(parse_hex_quantity(field("gasLimit").get<std::string>()));

    auto txs = block.find("transactions");
    if (txs == block.end() || !txs->is_array()) {
        std::ostringstream msg;
        msg << "block " << expected_number << ": missing transactions array";
        throw ParseError(msg.str());
    }
    Wei sum = 0;
    std::optional<Wei> min, max;
    for (const auto& tx : *txs) {
        auto price_it = tx.find("gasPrice");
        if (price_it == tx.end() || !price_it->is_string()) {
            std::ostringstream msg;
            msg << "block " << expected_number << ": transaction missing gasPrice";
            throw ParseError(msg.str());
        }
        Wei price = parse_hex_quantity(price_it->get<std::string>());
        sum += price;
        if (!min || price < *min) {
            min = price;
        }
        if (!max || price > *max) {
            max = price;
        }
    }
    record.tx_count = txs->size();
    if (record.tx_count > 0) {
        record.min_gas_price = min;
        record.max_gas_price = max;
        record.avg_gas_price = sum / record.tx_count;  // floor division
    }
    record.validate();
    return record;
}

// A kept-alive connection the server dropped between requests; the request
// never reached a handler and is safe to replay on a fresh connection.
struct StaleConnection : TransportError {
    using TransportError::TransportError;
};

BlockRecord fetch_block(httplib::Client& client, const std::string& path, uint64_t number) {
    json request = {
        {"jsonrpc", "2.0"},
        {"id", number},
        {"method", "eth_getBlockByNumber"},
        {"params", {to_hex_quantity(number), true}},
    };
    auto res = client.Post(path, request.dump(), "application/json");
    if (!res) {
        std::ostringstream msg;
        msg << "block " << number << ": " << httplib::to_string(res.error());
        // Servers close idle or max-count keep-alive connections at will; a
        // read/write failure on a previously working connection is routine,
        // not a verdict on the endpoint.
        if (res.error() == httplib::Error::Read || res.error() == httplib::Error::Write) {
            throw StaleConnection(msg.str());
        }
        throw TransportError(msg.str());
    }
    if (res->status != 200) {
        std::ostringstream msg;
        msg << "block " << number << ": HTTP " << res->status;
        throw TransportError(msg.str());
    }
    json response = json::parse(res->body, nullptr, false);
    if (response.is_discarded() || !response.is_object()) {
        std::ostringstream msg;
        msg << "block " << number << ": response is not valid JSON";
        throw ParseError(msg.str());
    }
    if (auto err = response.find("error"); err != response.end() && !err->is_null()) {
        std::ostringstream msg;
        msg << "block " << number << ": RPC error " << err->dump();
        throw TransportError(msg.str());
    }
    auto result = response.find("result");
    if (result == response.end() || result->is_null()) {
        std::ostringstream msg;
        msg << "block " << number << ": node has no such block";
        throw DataError(msg.str());
    }
    return record_from_block(*result, number);
}

}  // namespace

BlockTrace fetch_trace(const std::string& rpc_url, uint64_t from_block, uint64_t to_block,
                       const FetchOptions& options) {
    if (to_block < from_block) {
        std::ostringstream msg;
        msg << "block range [" << from_block << ", " << to_block << "] is inverted";
        throw ArgumentError(msg.str());
    }
    if (options.parallelism == 0) {
        throw ArgumentError("parallelism must be at least 1");
    }
    const ParsedUrl url = parse_url(rpc_url);
    const uint64_t count = to_block - from_block + 1;
    const unsigned workers =
        static_cast<unsigned>(std::min<uint64_t>(options.parallelism, count));

    std::vector<std::optional<BlockRecord>> slots(count);
    std::atomic<uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto make_client = [&] {
        auto client = std::make_unique<httplib::Client>(url.scheme_host_port);
        client->set_connection_timeout(30);
        client->set_read_timeout(60);
        return client;
    };
    auto worker = [&] {
        auto client = make_client();
        try {
            while (!failed.load(std::memory_order_relaxed)) {
                const uint64_t index = next.fetch_add(1, std::memory_order_relaxed);
                if (index >= count) {
                    break;
                }
                const uint64_t number = from_block + index;
                try {
                    slots[index] = fetch_block(*client, url.path, number);
                } catch (const StaleConnection&) {
                    client = make_client();
                    slots[index] = fetch_block(*client, url.path, number);
                }
            }
        } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) {
        threads.emplace_back(worker);
    }
    for (auto& thread : threads) {
        thread.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    std::vector<BlockRecord> records;
    records.reserve(count);
    for (auto& slot : slots) {
        records.push_back(std::move(*slot));
    }
    return BlockTrace::from_records(std::move(records));
}

}  // namespace gasrec
