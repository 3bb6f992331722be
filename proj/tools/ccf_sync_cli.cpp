// Experiment runner and two-host synchronization CLI.
//
// Subcommands: gen, occupancy, fpr, accuracy, timing, sync. Experiment
// subcommands emit CSV; `sync` runs a live session over TCP.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ccfsync/experiments.hpp"
#include "ccfsync/sync.hpp"
#include "ccfsync/theory.hpp"

namespace {

using namespace ccfsync;

// Flat key=value config files; '#' starts a comment line.
std::map<std::string, std::string> load_config(const std::string& path) {
    std::map<std::string, std::string> out;
    std::ifstream in(path);
    if (!in) {
        throw CLI::ValidationError("config", "cannot open " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("config", "expected key=value: " + line);
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

class ConfigMap {
public:
    explicit ConfigMap(std::map<std::string, std::string> kv)
        : kv_(std::move(kv)) {}

    template <typename T>
    void get(const std::string& key, T& into) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            return;
        }
        std::istringstream is(it->second);
        is >> into;
        if (is.fail()) {
            throw CLI::ValidationError("config", "bad value for " + key);
        }
    }

    void get_list(const std::string& key, std::vector<uint32_t>& into) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            return;
        }
        into.clear();
        std::istringstream is(it->second);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            into.push_back(static_cast<uint32_t>(std::stoul(tok)));
        }
    }

    void get_spec(PairSpec& spec) const {
        get("n_common_equal", spec.n_common_equal);
        get("n_common_multdiff", spec.n_common_multdiff);
        get("n_unique_a", spec.n_unique_a);
        get("n_unique_b", spec.n_unique_b);
        get("max_multiplicity", spec.max_multiplicity);
        get("fixed_multiplicity", spec.fixed_multiplicity);
    }

private:
    std::map<std::string, std::string> kv_;
};

std::ostream& open_out(std::ofstream& file, const std::string& out_path) {
    if (out_path.empty()) {
        return std::cout;
    }
    file.open(out_path);
    if (!file) {
        throw CLI::ValidationError("--out", "cannot open " + out_path);
    }
    return file;
}

void print_report(const EndpointOutcome& outcome) {
    std::cout << "final_root_size=" << outcome.final.root_size() << '\n'
              << "final_cardinality=" << outcome.final.cardinality() << '\n'
              << "d_e_sent=" << outcome.diff.d_e.size() << '\n'
              << "d_m_local=" << outcome.diff.d_m.size() << '\n'
              << "d_e_received=" << outcome.received_d_e.size() << '\n'
              << "bytes_filter_sent=" << outcome.bytes_filter_sent << '\n'
              << "bytes_filter_received=" << outcome.bytes_filter_received
              << '\n'
              << "bytes_de_sent=" << outcome.bytes_diff_sent << '\n'
              << "bytes_de_received=" << outcome.bytes_diff_received << '\n'
              << "insert_failures=" << outcome.insert_failures << '\n'
              << "alpha_local=" << outcome.alpha_local << '\n'
              << "alpha_peer=" << outcome.alpha_peer << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counting cuckoo filter multiset synchronization toolkit"};
    app.require_subcommand(1);

    uint64_t seed = 1;
    std::string out_path;
    std::string config_path;
    app.add_option("--seed", seed, "Base RNG seed")->capture_default_str();
    app.add_option("--out", out_path, "Output path (default: stdout)");
    app.add_option("--config", config_path, "key=value config file");

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "Generate a multiset fixture");
    uint64_t gen_n = 1000;
    uint32_t gen_max_mult = 255;
    uint32_t gen_fixed_mult = 0;
    gen->add_option("--n", gen_n, "Distinct elements")->capture_default_str();
    gen->add_option("--max-multiplicity", gen_max_mult, "Multiplicity cap")
        ->capture_default_str();
    gen->add_option("--fixed-multiplicity", gen_fixed_mult,
                    "Use a fixed multiplicity instead of uniform draws");

    // --- occupancy ---
    auto* occ = app.add_subcommand("occupancy",
                                   "Slot utilization as |X| scales");
    // --- fpr ---
    auto* fpr = app.add_subcommand("fpr",
                                   "Collided elements and false positive rate");
    // --- accuracy ---
    auto* acc = app.add_subcommand("accuracy", "Synchronization accuracy");
    std::string acc_method = "ccf-query";
    acc->add_option("--method", acc_method, "ccf-query | ccf-decode | cbf")
        ->capture_default_str();
    // --- timing ---
    auto* tim = app.add_subcommand("timing", "Per-operation wall-clock trends");

    // --- sync ---
    auto* sync = app.add_subcommand("sync", "Run a live TCP sync session");
    std::string sync_input;
    std::string sync_connect;
    uint16_t sync_listen = 0;
    std::string sync_method = "ccf-query";
    uint64_t sync_capacity = 0;
    uint32_t sync_f = 12;
    uint32_t sync_counter_bits = 16;
    uint32_t sync_cbf_counters = 0;
    sync->add_option("--input", sync_input, "Multiset fixture file")
        ->required();
    sync->add_option("--connect", sync_connect,
                     "host:port to connect to (initiator)");
    sync->add_option("--listen", sync_listen, "Port to listen on (responder)");
    sync->add_option("--method", sync_method, "ccf-query | ccf-decode | cbf")
        ->capture_default_str();
    sync->add_option("--capacity", sync_capacity,
                     "Filter capacity (default: local root size)");
    sync->add_option("--fingerprint-bits", sync_f, "CCF fingerprint bits")
        ->capture_default_str();
    sync->add_option("--counter-bits", sync_counter_bits, "Counter bits")
        ->capture_default_str();
    sync->add_option("--cbf-counters", sync_cbf_counters,
                     "CBF counter vector length (cbf method)");

    // Let --seed/--out/--config appear after the subcommand too.
    for (auto* sub : app.get_subcommands(
             [](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    ConfigMap cfg(config_path.empty()
                      ? std::map<std::string, std::string>{}
                      : load_config(config_path));

    std::ofstream out_file;

    try {
        if (gen->parsed()) {
            PairSpec spec{.n_common_equal = gen_n,
                          .max_multiplicity = gen_max_mult,
                          .fixed_multiplicity = gen_fixed_mult};
            cfg.get_spec(spec);
            MultisetPair pair = gen_multiset_pair(spec, seed);
            write_fixture(open_out(out_file, out_path), pair.a);
        } else if (occ->parsed()) {
            OccupancyConfig c;
            c.seed = seed;
            cfg.get("k_min", c.k_min);
            cfg.get("k_max", c.k_max);
            cfg.get("repetitions", c.repetitions);
            write_csv(open_out(out_file, out_path), run_occupancy(c));
        } else if (fpr->parsed()) {
            FprConfig c;
            c.seed = seed;
            cfg.get("b_sweep_min_log2", c.b_sweep_min_log2);
            cfg.get("b_sweep_max_log2", c.b_sweep_max_log2);
            cfg.get("b_sweep_f", c.b_sweep_f);
            cfg.get("f_sweep_min", c.f_sweep_min);
            cfg.get("f_sweep_max", c.f_sweep_max);
            cfg.get("f_sweep_b_log2", c.f_sweep_b_log2);
            cfg.get("probes", c.probes);
            cfg.get("repetitions", c.repetitions);
            write_csv(open_out(out_file, out_path), run_fpr(c));
        } else if (acc->parsed()) {
            AccuracyConfig c;
            c.seed = seed;
            cfg.get_spec(c.spec);
            cfg.get_list("f_values", c.f_values);
            cfg.get("ccf_counter_bits", c.ccf_counter_bits);
            cfg.get("cbf_counter_bits", c.cbf_counter_bits);
            cfg.get("repetitions", c.repetitions);
            write_csv(open_out(out_file, out_path),
                      run_accuracy(c, acc_method));
        } else if (tim->parsed()) {
            TimingConfig c;
            c.seed = seed;
            cfg.get("repetitions", c.repetitions);
            write_csv(open_out(out_file, out_path), run_timing(c));
        } else if (sync->parsed()) {
            // Presence, not value: --listen 0 asks for an ephemeral port.
            bool listening = sync->count("--listen") > 0;
            if (sync_connect.empty() == !listening) {
                throw CLI::ValidationError(
                    "sync", "exactly one of --connect / --listen is required");
            }
            std::ifstream in(sync_input);
            if (!in) {
                throw CLI::ValidationError("--input",
                                           "cannot open " + sync_input);
            }
            Multiset local = read_fixture(in);

            SyncConfig sc;
            uint64_t capacity =
                sync_capacity > 0 ? sync_capacity : local.root_size();
            if (sync_method == "ccf-query" || sync_method == "ccf-decode") {
                sc.method = sync_method == "ccf-query" ? SyncMethod::kCcfQuery
                                                       : SyncMethod::kCcfDecode;
                sc.ccf = {.buckets = CcfParams::buckets_for(capacity),
                          .fingerprint_bits = sync_f,
                          .counter_bits = sync_counter_bits,
                          .seed = seed};
            } else if (sync_method == "cbf") {
                uint32_t m = sync_cbf_counters > 0
                                 ? sync_cbf_counters
                                 : static_cast<uint32_t>(capacity * 8);
                sc.method = SyncMethod::kCbf;
                sc.cbf = {.counters = m,
                          .hashes = optimal_k(m, capacity),
                          .counter_bits = sync_counter_bits,
                          .seed1 = seed,
                          .seed2 = derive_seed(seed, 0xB2)};
            } else {
                throw CLI::ValidationError("--method",
                                           "unknown method " + sync_method);
            }

            EndpointOutcome outcome;
            if (!sync_connect.empty()) {
                size_t colon = sync_connect.rfind(':');
                if (colon == std::string::npos) {
                    throw CLI::ValidationError("--connect", "expected host:port");
                }
                auto port = static_cast<uint16_t>(
                    std::stoul(sync_connect.substr(colon + 1)));
                TcpTransport t = TcpTransport::connect_to(
                    sync_connect.substr(0, colon), port);
                outcome = run_sync_endpoint(local, sc, SyncRole::kInitiator, t);
            } else {
                TcpListener listener(sync_listen);
                std::cerr << "listening on port " << listener.port() << '\n';
                TcpTransport t = listener.accept_one();
                outcome = run_sync_endpoint(local, sc, SyncRole::kResponder, t);
            }
            print_report(outcome);
            if (!out_path.empty()) {
                write_fixture(open_out(out_file, out_path), outcome.final);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
