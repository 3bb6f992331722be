#include "ccfsync/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ccfsync/hash.hpp"
#include "ccfsync/theory.hpp"

namespace ccfsync {

namespace {

// Distinct-element sampling without replacement over the 32-bit space.
std::vector<uint32_t> draw_distinct_u32(size_t count, std::mt19937_64& rng) {
    if (count > (1ull << 31)) {
        throw std::invalid_argument("too many distinct elements requested");
    }
    std::unordered_set<uint32_t> seen;
    seen.reserve(count * 2);
    std::vector<uint32_t> out;
    out.reserve(count);
    while (out.size() < count) {
        auto v = static_cast<uint32_t>(rng());
        if (seen.insert(v).second) {
            out.push_back(v);
        }
    }
    return out;
}

std::vector<Element> to_elements(const std::vector<uint32_t>& keys) {
    std::vector<Element> out;
    out.reserve(keys.size());
    for (uint32_t k : keys) {
        out.push_back(Element::from_u32(k));
    }
    return out;
}

uint64_t grid_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    return derive_seed(derive_seed(derive_seed(base, a), b), c);
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

MultisetPair gen_multiset_pair(const PairSpec& spec, uint64_t seed) {
    if (spec.max_multiplicity < 1) {
        throw std::invalid_argument("max_multiplicity must be >= 1");
    }
    if (spec.fixed_multiplicity > spec.max_multiplicity) {
        throw std::invalid_argument("fixed_multiplicity above max_multiplicity");
    }
    if (spec.n_common_multdiff > 0 && spec.max_multiplicity < 2) {
        throw std::invalid_argument(
            "multiplicity differences need max_multiplicity >= 2");
    }
    std::mt19937_64 rng(derive_seed(seed, 0xDA7A));

    auto draw_mult = [&]() -> uint32_t {
        if (spec.fixed_multiplicity > 0) {
            return spec.fixed_multiplicity;
        }
        return 1 + static_cast<uint32_t>(rng() % spec.max_multiplicity);
    };
    // Uniform over [1, max] \ {m}: guarantees an actual difference.
    auto draw_mult_other = [&](uint32_t m) -> uint32_t {
        uint32_t delta =
            1 + static_cast<uint32_t>(rng() % (spec.max_multiplicity - 1));
        return (m - 1 + delta) % spec.max_multiplicity + 1;
    };

    std::vector<uint32_t> keys = draw_distinct_u32(spec.total_distinct(), rng);
    MultisetPair out;
    size_t pos = 0;

    for (uint64_t i = 0; i < spec.n_common_equal; ++i) {
        Element x = Element::from_u32(keys[pos++]);
        uint32_t m = draw_mult();
        out.a.add(x, m);
        out.b.add(x, m);
    }
    for (uint64_t i = 0; i < spec.n_common_multdiff; ++i) {
        Element x = Element::from_u32(keys[pos++]);
        uint32_t ma = draw_mult();
        uint32_t mb = draw_mult_other(ma);
        out.a.add(x, ma);
        out.b.add(x, mb);
    }
    for (uint64_t i = 0; i < spec.n_unique_a; ++i) {
        out.a.add(Element::from_u32(keys[pos++]), draw_mult());
    }
    for (uint64_t i = 0; i < spec.n_unique_b; ++i) {
        out.b.add(Element::from_u32(keys[pos++]), draw_mult());
    }

    out.truth_at_a = diff_exact(out.a, out.b);
    out.truth_at_b = diff_exact(out.b, out.a);
    out.universe = to_elements(keys);
    return out;
}

std::vector<Element> gen_absent_probes(size_t count, uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, 0xAB5E));
    std::vector<Element> out;
    out.reserve(count);
    std::unordered_set<uint64_t> seen;
    while (out.size() < count) {
        uint64_t v = rng();
        if (!seen.insert(v).second) {
            continue;
        }
        std::string bytes(8, '\0');
        for (int i = 0; i < 8; ++i) {
            bytes[i] = static_cast<char>(v >> ((7 - i) * 8));
        }
        out.push_back(Element(std::move(bytes)));
    }
    return out;
}

std::vector<OccupancyRow> run_occupancy(const OccupancyConfig& cfg) {
    std::vector<OccupancyRow> rows;
    for (uint32_t k = cfg.k_min; k <= cfg.k_max; ++k) {
        const uint64_t n = 500ull << k;
        const uint32_t b = 1u << (k + 7);
        const uint32_t f = k + 7;
        std::vector<double> occupancies;
        std::vector<double> failures;
        for (uint32_t rep = 0; rep < cfg.repetitions; ++rep) {
            std::mt19937_64 rng(grid_seed(cfg.seed, k, rep));
            std::vector<uint32_t> keys = draw_distinct_u32(n, rng);
            Ccf filter({.buckets = b,
                        .fingerprint_bits = f,
                        .counter_bits = 8,
                        .seed = grid_seed(cfg.seed, k, rep, 0xF1)});
            uint64_t full = 0;
            for (uint32_t key : keys) {
                if (!filter.insert(Element::from_u32(key), 1)) {
                    ++full;
                }
            }
            occupancies.push_back(filter.occupancy());
            failures.push_back(static_cast<double>(full));
        }
        rows.push_back({n, b, f, mean(occupancies), mean(failures),
                        static_cast<double>(n) / (4.0 * b)});
    }
    return rows;
}

namespace {

FprRow measure_fpr_point(const std::string& sweep, uint32_t b, uint32_t f,
                         uint64_t n, size_t probes, uint32_t reps,
                         uint64_t seed) {
    std::vector<double> collided;
    std::vector<double> occupancy;
    std::vector<double> fpr;
    for (uint32_t rep = 0; rep < reps; ++rep) {
        std::mt19937_64 rng(grid_seed(seed, b, f, rep));
        std::vector<Element> elems =
            to_elements(draw_distinct_u32(n, rng));
        Ccf filter({.buckets = b,
                    .fingerprint_bits = f,
                    .counter_bits = 8,
                    .seed = grid_seed(seed, b, f, rep + 1000)});
        for (const Element& x : elems) {
            filter.insert(x, 1);
        }
        collided.push_back(
            static_cast<double>(count_tuple_collisions(filter, elems)));
        occupancy.push_back(filter.occupancy());

        size_t hits = 0;
        auto absent = gen_absent_probes(probes, grid_seed(seed, b, f, rep + 2000));
        for (const Element& x : absent) {
            if (filter.query(x) > 0) {
                ++hits;
            }
        }
        fpr.push_back(static_cast<double>(hits) /
                      static_cast<double>(probes));
    }
    double tuple_space =
        static_cast<double>(b) * std::ldexp(1.0, static_cast<int>(f));
    double collided_theory =
        2.0 * static_cast<double>(n) * static_cast<double>(n) / tuple_space;
    return {sweep,     b,
            f,         n,
            mean(occupancy), mean(collided),
            collided_theory, mean(fpr),
            theory::ccf_fpr_bound(4, f)};
}

}  // namespace

std::vector<FprRow> run_fpr(const FprConfig& cfg) {
    std::vector<FprRow> rows;
    for (uint32_t lb = cfg.b_sweep_min_log2; lb <= cfg.b_sweep_max_log2; ++lb) {
        uint32_t b = 1u << lb;
        uint64_t n = static_cast<uint64_t>(b) * 500 / 128;  // 500/512 of 4b
        rows.push_back(measure_fpr_point("b", b, cfg.b_sweep_f, n, cfg.probes,
                                         cfg.repetitions, cfg.seed));
    }
    uint32_t b = 1u << cfg.f_sweep_b_log2;
    uint64_t n = static_cast<uint64_t>(b) * 500 / 128;
    for (uint32_t f = cfg.f_sweep_min; f <= cfg.f_sweep_max; ++f) {
        rows.push_back(measure_fpr_point("f", b, f, n, cfg.probes,
                                         cfg.repetitions, cfg.seed));
    }
    return rows;
}

std::vector<AccuracyRow> run_accuracy(const AccuracyConfig& cfg,
                                      const std::string& method) {
    const uint64_t n_side_a = cfg.spec.n_common_equal +
                              cfg.spec.n_common_multdiff + cfg.spec.n_unique_a;
    const uint64_t n_side_b = cfg.spec.n_common_equal +
                              cfg.spec.n_common_multdiff + cfg.spec.n_unique_b;
    const uint64_t n_side = std::max(n_side_a, n_side_b);

    std::vector<AccuracyRow> rows;

    auto run_point = [&](const SyncConfig& sync_cfg, uint32_t f,
                         uint64_t filter_bits) {
        std::vector<double> alphas;
        std::vector<double> bytes_de;
        std::vector<double> misclassified;
        for (uint32_t rep = 0; rep < cfg.repetitions; ++rep) {
            MultisetPair pair =
                gen_multiset_pair(cfg.spec, grid_seed(cfg.seed, rep));
            SyncConfig point_cfg = sync_cfg;
            uint64_t filter_seed = grid_seed(cfg.seed, rep, f, 0xF2);
            point_cfg.ccf.seed = filter_seed;
            point_cfg.cbf.seed1 = filter_seed;
            point_cfg.cbf.seed2 = derive_seed(filter_seed, 0xB2);
            SyncResult result = synchronize(pair.a, pair.b, point_cfg);
            alphas.push_back(result.report.alpha);
            bytes_de.push_back(static_cast<double>(
                result.report.bytes_de_a_to_b + result.report.bytes_de_b_to_a));
            misclassified.push_back(static_cast<double>(
                result.report.misclassified_a + result.report.misclassified_b));
        }
        rows.push_back({method, f, filter_bits,
                        static_cast<double>(filter_bits) /
                            static_cast<double>(n_side),
                        mean(alphas),
                        *std::min_element(alphas.begin(), alphas.end()),
                        mean(bytes_de), mean(misclassified)});
    };

    if (method == "ccf-query" || method == "ccf-decode") {
        const uint32_t b = CcfParams::buckets_for(n_side);
        for (uint32_t f : cfg.f_values) {
            SyncConfig sync_cfg;
            sync_cfg.method = method == "ccf-query" ? SyncMethod::kCcfQuery
                                                    : SyncMethod::kCcfDecode;
            sync_cfg.ccf = {.buckets = b,
                            .fingerprint_bits = f,
                            .counter_bits = cfg.ccf_counter_bits};
            uint64_t filter_bits =
                sync_cfg.ccf.slot_count() * (f + cfg.ccf_counter_bits);
            run_point(sync_cfg, f, filter_bits);
        }
    } else if (method == "cbf") {
        for (double cpe : cfg.cbf_counters_per_element) {
            auto m = static_cast<uint32_t>(
                std::llround(cpe * static_cast<double>(n_side)));
            SyncConfig sync_cfg;
            sync_cfg.method = SyncMethod::kCbf;
            sync_cfg.cbf = {.counters = m,
                            .hashes = optimal_k(m, n_side),
                            .counter_bits = cfg.cbf_counter_bits};
            run_point(sync_cfg, 0,
                      static_cast<uint64_t>(m) * cfg.cbf_counter_bits);
        }
    } else {
        throw std::invalid_argument("unknown method: " + method);
    }
    return rows;
}

std::vector<TimingRow> run_timing(const TimingConfig& cfg) {
    using clock = std::chrono::steady_clock;
    std::vector<TimingRow> rows;

    auto time_op = [&](auto&& op) {
        auto start = clock::now();
        op();
        auto stop = clock::now();
        return std::chrono::duration<double, std::nano>(stop - start).count();
    };

    for (uint64_t n : cfg.n_values) {
        PairSpec spec{.n_common_equal = n / 2,
                      .n_common_multdiff = 0,
                      .n_unique_a = n - n / 2,
                      .n_unique_b = n - n / 2,
                      .fixed_multiplicity = 10};

        std::vector<double> t_ccf_insert, t_ccf_query, t_ccf_erase;
        std::vector<double> t_cbf_insert, t_cbf_query, t_cbf_remove;
        std::vector<double> t_diff_query, t_diff_decode, t_diff_cbf;

        // One extra repetition as warm-up, discarded below.
        for (uint32_t rep = 0; rep <= cfg.repetitions; ++rep) {
            MultisetPair pair =
                gen_multiset_pair(spec, grid_seed(cfg.seed, n, rep));
            uint64_t fseed = grid_seed(cfg.seed, n, rep, 0xF3);

            CcfParams cp{.buckets = CcfParams::buckets_for(n),
                         .fingerprint_bits = 12,
                         .counter_bits = 16,
                         .seed = fseed};
            Ccf ccf_a(cp);
            Ccf ccf_b(cp);
            double ti = time_op([&] {
                for (const auto& [x, m] : pair.a) {
                    ccf_a.insert(x, m);
                }
            });
            for (const auto& [x, m] : pair.b) {
                ccf_b.insert(x, m);
            }
            uint64_t sink = 0;  // queries also bump the access counter, so
                                // the loops cannot be elided
            double tq = time_op([&] {
                for (const auto& [x, m] : pair.a) {
                    sink += ccf_a.query(x);
                }
            });
            double td_q = time_op([&] { diff_query(pair.a, ccf_b); });
            double td_d = time_op([&] { diff_decode(pair.a, ccf_a, ccf_b); });
            double te = time_op([&] {
                for (const auto& [x, m] : pair.a) {
                    ccf_a.erase(x);
                }
            });

            CbfParams bp{.counters = static_cast<uint32_t>(n * 8),
                         .hashes = optimal_k(n * 8, n),
                         .counter_bits = 16,
                         .seed1 = fseed,
                         .seed2 = derive_seed(fseed, 0xB2)};
            Cbf cbf_a(bp);
            Cbf cbf_b(bp);
            double tbi = time_op([&] {
                for (const auto& [x, m] : pair.a) {
                    cbf_a.insert(x, m);
                }
            });
            for (const auto& [x, m] : pair.b) {
                cbf_b.insert(x, m);
            }
            double tbq = time_op([&] {
                for (const auto& [x, m] : pair.a) {
                    sink += cbf_a.query(x);
                }
            });
            double td_c = time_op([&] { diff_cbf(pair.a, cbf_b); });
            double tbr = time_op([&] {
                for (const auto& [x, m] : pair.a) {
                    cbf_a.remove(x, m);
                }
            });

            if (rep == 0) {
                continue;  // warm-up
            }
            double per = static_cast<double>(pair.a.root_size());
            t_ccf_insert.push_back(ti / per);
            t_ccf_query.push_back(tq / per);
            t_ccf_erase.push_back(te / per);
            t_diff_query.push_back(td_q / per);
            t_diff_decode.push_back(td_d / per);
            t_cbf_insert.push_back(tbi / per);
            t_cbf_query.push_back(tbq / per);
            t_cbf_remove.push_back(tbr / per);
            t_diff_cbf.push_back(td_c / per);
        }

        rows.push_back({"ccf", "insert", n, median(t_ccf_insert)});
        rows.push_back({"ccf", "query", n, median(t_ccf_query)});
        rows.push_back({"ccf", "erase", n, median(t_ccf_erase)});
        rows.push_back({"ccf", "diff-query", n, median(t_diff_query)});
        rows.push_back({"ccf", "diff-decode", n, median(t_diff_decode)});
        rows.push_back({"cbf", "insert", n, median(t_cbf_insert)});
        rows.push_back({"cbf", "query", n, median(t_cbf_query)});
        rows.push_back({"cbf", "erase", n, median(t_cbf_remove)});
        rows.push_back({"cbf", "diff-cbf", n, median(t_diff_cbf)});
    }
    return rows;
}

void write_csv(std::ostream& os, const std::vector<OccupancyRow>& rows) {
    os << "n,buckets,fingerprint_bits,occupancy,insert_failures,ideal\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.buckets << ',' << r.fingerprint_bits << ','
           << fmt(r.occupancy) << ',' << fmt(r.insert_failures) << ','
           << fmt(r.ideal) << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<FprRow>& rows) {
    os << "sweep,buckets,fingerprint_bits,n,occupancy,collided,"
          "collided_theory,fpr,fpr_theory\n";
    for (const auto& r : rows) {
        os << r.sweep << ',' << r.buckets << ',' << r.fingerprint_bits << ','
           << r.n << ',' << fmt(r.occupancy) << ',' << fmt(r.collided) << ','
           << fmt(r.collided_theory) << ',' << fmt(r.fpr) << ','
           << fmt(r.fpr_theory) << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<AccuracyRow>& rows) {
    os << "method,fingerprint_bits,filter_bits,bpe,alpha_mean,alpha_min,"
          "bytes_de_mean,misclassified_mean\n";
    for (const auto& r : rows) {
        os << r.method << ',' << r.fingerprint_bits << ',' << r.filter_bits
           << ',' << fmt(r.bpe) << ',' << fmt(r.alpha_mean) << ','
           << fmt(r.alpha_min) << ',' << fmt(r.bytes_de_mean) << ','
           << fmt(r.misclassified_mean) << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<TimingRow>& rows) {
    os << "structure,op,n,ns_per_op\n";
    for (const auto& r : rows) {
        os << r.structure << ',' << r.op << ',' << r.n << ','
           << fmt(r.ns_per_op) << '\n';
    }
}

}  // namespace ccfsync
