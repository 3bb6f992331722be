#include "ccfsync/sync.hpp"

#include <exception>
#include <map>
#include <memory>
#include <thread>

namespace ccfsync {

namespace {

std::vector<uint8_t> config_params_blob(const SyncConfig& cfg) {
    if (cfg.method == SyncMethod::kCbf) {
        return Cbf(cfg.cbf).params_blob();
    }
    return Ccf(cfg.ccf).params_blob();
}

void check_hello(const Hello& peer, SyncMethod method,
                 const std::vector<uint8_t>& expected_blob,
                 Transport& transport) {
    const char* problem = nullptr;
    if (peer.version != kProtocolVersion) {
        problem = "protocol version mismatch";
    } else if (peer.method != method) {
        problem = "sync method mismatch";
    } else if (peer.params_blob != expected_blob) {
        problem = "filter parameter mismatch";
    }
    if (problem != nullptr) {
        try {
            transport.send(make_error(problem));
        } catch (const transport_error&) {
            // Peer may already be gone; the local failure still stands.
        }
        throw sync_error(problem);
    }
}

}  // namespace

EndpointOutcome run_sync_endpoint(const Multiset& local, const SyncConfig& cfg,
                                  SyncRole role, Transport& transport) {
    const bool initiate = role == SyncRole::kInitiator;
    std::vector<uint8_t> blob = config_params_blob(cfg);

    // Round 0: HELLO handshake.
    if (initiate) {
        transport.send(make_hello(cfg.method, blob));
        check_hello(parse_hello(transport.recv()), cfg.method, blob, transport);
    } else {
        check_hello(parse_hello(transport.recv()), cfg.method, blob, transport);
        transport.send(make_hello(cfg.method, blob));
    }

    EndpointOutcome out;

    // Round 1: represent the local multiset and exchange filters.
    std::unique_ptr<Ccf> local_ccf;
    std::unique_ptr<Cbf> local_cbf;
    std::vector<uint8_t> serialized;
    if (cfg.method == SyncMethod::kCbf) {
        local_cbf = std::make_unique<Cbf>(cfg.cbf);
        for (const auto& [x, m] : local) {
            local_cbf->insert(x, m);
        }
        serialized = local_cbf->serialize();
    } else {
        local_ccf = std::make_unique<Ccf>(cfg.ccf);
        for (const auto& [x, m] : local) {
            if (!local_ccf->insert(x, m)) {
                ++out.insert_failures;
            }
        }
        serialized = local_ccf->serialize();
    }
    out.bytes_filter_sent = serialized.size();

    Frame remote_filter_frame;
    if (initiate) {
        transport.send(make_filter(std::move(serialized)));
        remote_filter_frame = transport.recv();
    } else {
        remote_filter_frame = transport.recv();
        transport.send(make_filter(std::move(serialized)));
    }
    if (remote_filter_frame.type == FrameType::kError) {
        throw sync_error("peer error: " + parse_error_frame(remote_filter_frame));
    }
    if (remote_filter_frame.type != FrameType::kFilter) {
        throw sync_error("unexpected frame, wanted FILTER");
    }
    out.bytes_filter_received = remote_filter_frame.payload.size();

    // Classify differences against the received filter.
    if (cfg.method == SyncMethod::kCbf) {
        Cbf remote = Cbf::deserialize(remote_filter_frame.payload);
        out.diff = diff_cbf(local, remote);
    } else {
        Ccf remote = Ccf::deserialize(remote_filter_frame.payload);
        if (cfg.method == SyncMethod::kCcfQuery) {
            out.diff = diff_query(local, remote);
        } else {
            out.diff = diff_decode(local, *local_ccf, remote);
        }
    }

    // Round 2: exchange d_E payloads; d_M is satisfied locally.
    Frame diff_frame = make_diff(out.diff.d_e);
    out.bytes_diff_sent = diff_frame.payload.size();
    Frame remote_diff_frame;
    if (initiate) {
        transport.send(diff_frame);
        remote_diff_frame = transport.recv();
    } else {
        remote_diff_frame = transport.recv();
        transport.send(diff_frame);
    }
    out.received_d_e = parse_diff(remote_diff_frame);
    out.bytes_diff_received = remote_diff_frame.payload.size();

    out.final =
        apply_diff(local, out.received_d_e, out.diff.d_m, &out.apply_stats);

    size_t flagged = out.apply_stats.dm_missing + out.apply_stats.de_present;
    size_t denom = out.final.root_size() == 0 ? 1 : out.final.root_size();
    out.alpha_local =
        1.0 - static_cast<double>(flagged) / static_cast<double>(denom);

    if (initiate) {
        transport.send(make_done(out.alpha_local));
        out.alpha_peer = parse_done(transport.recv());
    } else {
        out.alpha_peer = parse_done(transport.recv());
        transport.send(make_done(out.alpha_local));
    }
    return out;
}

size_t count_mismatches(const DiffResult& got, const DiffResult& want) {
    auto tally = [](const EntryList& list) {
        std::map<Element, uint64_t> m;
        for (const auto& [x, c] : list) {
            m[x] = c;
        }
        return m;
    };
    auto compare = [&](const EntryList& got_list, const EntryList& want_list) {
        auto g = tally(got_list);
        auto w = tally(want_list);
        size_t n = 0;
        for (const auto& [x, c] : g) {
            auto it = w.find(x);
            if (it == w.end() || it->second != c) {
                ++n;
            }
        }
        for (const auto& [x, c] : w) {
            if (!g.contains(x)) {
                ++n;
            }
        }
        return n;
    };
    return compare(got.d_e, want.d_e) + compare(got.d_m, want.d_m);
}

SyncResult synchronize(const Multiset& a, const Multiset& b,
                       const SyncConfig& cfg) {
    auto [transport_a, transport_b] = ChannelTransport::make_pair();

    EndpointOutcome outcome_b;
    std::exception_ptr responder_error;
    std::thread responder([&] {
        try {
            outcome_b =
                run_sync_endpoint(b, cfg, SyncRole::kResponder, *transport_b);
        } catch (...) {
            responder_error = std::current_exception();
            transport_b->close();
        }
    });

    EndpointOutcome outcome_a;
    std::exception_ptr initiator_error;
    try {
        outcome_a =
            run_sync_endpoint(a, cfg, SyncRole::kInitiator, *transport_a);
    } catch (...) {
        initiator_error = std::current_exception();
        transport_a->close();
    }
    responder.join();
    if (initiator_error) {
        std::rethrow_exception(initiator_error);
    }
    if (responder_error) {
        std::rethrow_exception(responder_error);
    }

    SyncResult result;
    result.final_a = std::move(outcome_a.final);
    result.final_b = std::move(outcome_b.final);

    SyncReport& r = result.report;
    r.alpha = accuracy(result.final_a, result.final_b);
    r.bytes_filter_a_to_b = outcome_a.bytes_filter_sent;
    r.bytes_filter_b_to_a = outcome_b.bytes_filter_sent;
    r.bytes_de_a_to_b = outcome_a.bytes_diff_sent;
    r.bytes_de_b_to_a = outcome_b.bytes_diff_sent;
    r.misclassified_a = count_mismatches(outcome_a.diff, diff_exact(a, b));
    r.misclassified_b = count_mismatches(outcome_b.diff, diff_exact(b, a));
    r.insert_failures_a = outcome_a.insert_failures;
    r.insert_failures_b = outcome_b.insert_failures;
    r.inconsistencies = outcome_a.apply_stats.dm_missing +
                        outcome_a.apply_stats.de_present +
                        outcome_b.apply_stats.dm_missing +
                        outcome_b.apply_stats.de_present;
    return result;
}

}  // namespace ccfsync
