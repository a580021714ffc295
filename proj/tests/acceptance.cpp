// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "kr/generator.hpp"
#include "kr/service.hpp"
#include "support.hpp"

using namespace kr;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto t = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = seconds_since(t);
    if (s >= limit_s) {
        o.pass = false;
        o.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s limit)";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << std::fixed << std::setprecision(2)
              << s << " s]" << std::endl;
}

OntologyClass cls(std::string id, std::optional<std::string> parent, std::set<std::string> triggers = {},
                  std::optional<std::string> callback = std::nullopt) {
    OntologyClass c;
    c.id = id;
    c.name = id;
    c.parent = std::move(parent);
    c.triggers = std::move(triggers);
    c.callback = std::move(callback);
    return c;
}

Outcome traversal() {
    CallbackRegistry<std::string> reg;
    reg.add("cb", [](const std::string& token) { return CallbackResult{token, {}, {}}; });
    Ontology direct("direct", {cls("Class 1", std::nullopt, {}, "cb"), cls("Class 2", "Class 1", {"A"}),
                               cls("Class 3", "Class 1", {"B"}), cls("Class 4", "Class 1", {"C"})});
    Ontology skip("skip", {cls("Class 1", std::nullopt, {}, "cb"), cls("Class 5", "Class 1", {"A", "B"}),
                           cls("Class 2", "Class 5", {"A"}), cls("Class 3", "Class 5", {"B"}),
                           cls("Class 4", "Class 1", {"C"})});
    auto a = classify(direct, reg, std::string("A"));
    auto b = classify(skip, reg, std::string("A"));
    const bool ok = a.path == std::vector<std::string>{"Class 1", "Class 2"} && a.complete &&
                    b.path == std::vector<std::string>{"Class 1", "Class 5", "Class 2"} && b.complete;
    auto join = [](const std::vector<std::string>& p) {
        std::string s;
        for (const auto& c : p) s += (s.empty() ? "" : " > ") + c;
        return s;
    };
    return {ok, "direct [" + join(a.path) + "], skip [" + join(b.path) + "]"};
}

Outcome ontology_fidelity() {
    struct Row {
        const char* id;
        const char* parent;
        std::set<std::string> triggers;
        const char* callback;
    };
    const std::vector<Row> expected{
        {"Incident", nullptr, {}, "callbackFalsePositiveCheck"},
        {"FalsePositive", "Incident", {"True"}, nullptr},
        {"Anomaly", "Incident", {"False"}, "callbackAnomalyType"},
        {"AbnormalValues", "Anomaly", {"abnormal values"}, nullptr},
        {"AbnormalOccurrence", "Anomaly", {"abnormal occurrence"}, "callbackPeriodicTest"},
        {"Periodic", "AbnormalOccurrence", {"1", "2"}, nullptr},
        {"PhaseShift", "Periodic", {"1"}, nullptr},
        {"FrequencyChange", "Periodic", {"2"}, nullptr},
        {"NotPeriodic", "AbnormalOccurrence", {"3"}, "callbackDisruptType"},
        {"PatternDisrupt", "NotPeriodic", {"pattern"}, nullptr},
        {"PeriodDisrupt", "NotPeriodic", {"period"}, nullptr},
    };
    const auto onto = test::sip_ontology();
    if (onto.size() != expected.size()) return {false, std::to_string(onto.size()) + " classes"};
    for (const auto& r : expected) {
        if (!onto.contains(r.id)) return {false, std::string("missing ") + r.id};
        const auto& c = onto.at(r.id);
        const bool parent_ok = r.parent ? c.parent == std::string(r.parent) : !c.parent;
        const bool cb_ok = r.callback ? c.callback == std::string(r.callback) : !c.callback;
        if (!parent_ok || c.triggers != r.triggers || !cb_ok) return {false, std::string("mismatch at ") + r.id};
    }
    if (onto.at("AbnormalValues").qualifiers != std::set<std::string>{"High", "Low"})
        return {false, "qualifiers of AbnormalValues"};
    const auto report = validate(onto, sip::make_registry());
    return {report.clean(), "11 classes, " + std::to_string(report.findings.size()) + " validation findings"};
}

Outcome end_to_end() {
    const auto onto = test::sip_ontology();
    const auto reg = sip::make_registry();
    const gen::Kind kinds[] = {gen::Kind::High,       gen::Kind::Low,           gen::Kind::PhaseShift,
                               gen::Kind::FreqChange, gen::Kind::PeriodDisrupt, gen::Kind::PatternDisrupt};
    std::ostringstream detail;
    bool ok = true;
    for (auto kind : kinds) {
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            gen::GenConfig cfg;
            cfg.seed = seed;
            const auto device = gen::device_name(seed % cfg.devices);
            cfg.injections = {{kind, device, 5000 + (seed * 131) % 8000, 200}};
            const auto g = gen::generate(cfg);
            test::TempDir dir;
            auto store = KnowledgeStore::open(dir.path());
            MatchCache cache;
            const auto tri = triage_dataset(g.data, onto, reg, &store, &cache, {}, {});
            const auto& truth = g.truth.at(0);
            for (const auto& item : tri.result.items) {
                const auto& inc = item.incident;
                if (inc.device != truth.device || inc.end <= truth.start || inc.start >= truth.end) continue;
                if (item.result && item.result->complete && item.result->final_class == truth.expected_class &&
                    item.result->qualifier == truth.qualifier) {
                    ++hits;
                    break;
                }
            }
        }
        const int need = kind == gen::Kind::High || kind == gen::Kind::Low ? 99 : 90;
        ok &= hits >= need;
        detail << gen::to_string(kind) << " " << hits << "/100 ";
    }
    return {ok, detail.str()};
}

Outcome kernel_equivalence() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0, 1);
    int mismatches = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 64 + rng() % (4096 - 64 + 1);
        const std::size_t m = 2 + rng() % 63;
        std::vector<double> s(n);
        switch (trial % 4) {
            case 0: for (auto& v : s) v = g(rng); break;
            case 1: {
                double w = 0;
                for (auto& v : s) v = (w += g(rng));
                break;
            }
            case 2: {
                const double p = 10 + static_cast<double>(rng() % 90);
                for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(6.283185307179586 * i / p) + 0.05 * g(rng);
                break;
            }
            default:
                for (auto& v : s) v = std::round(2 * g(rng));
                for (std::size_t i = n / 4; i < n / 3; ++i) s[i] = 1e3;
        }
        std::vector<double> q(m);
        const std::size_t at = rng() % (n - m + 1);
        for (std::size_t j = 0; j < m; ++j) q[j] = trial % 3 ? s[at + j] * 2.5 + 7 + 0.1 * g(rng) : g(rng);
        const auto bf = ts::sliding_min_distance(q, s, ts::MatchMode::BruteForce);
        const auto ac = ts::sliding_min_distance(q, s, ts::MatchMode::Accelerated);
        worst = std::max(worst, std::abs(bf.d_min - ac.d_min));
        mismatches += std::abs(bf.d_min - ac.d_min) > 1e-6 || bf.position != ac.position;
    }
    std::ostringstream d;
    d << "1000 pairs, " << mismatches << " mismatches, max |dd| " << worst;
    return {mismatches == 0, d.str()};
}

// Direct evaluation of the ranking formula with the brute-force distance.
std::vector<std::pair<std::string, double>> oracle_rank(const LabelSet& current, const KnowledgeStore& store,
                                                        const SeriesMap& data, bool similarity) {
    std::vector<std::pair<std::string, double>> all;
    for (const auto& inst : store.snapshot()) {
        double v = 0.0;
        bool any = false;
        for (const auto& l : inst->labels) {
            if (!current.count(l) || !data.count(l.device)) continue;
            const auto& seg = inst->segments.at(l.device).readings;
            const auto& series = data.at(l.device).readings;
            double d = INFINITY;
            for (std::size_t i = 0; i + seg.size() <= series.size(); ++i)
                d = std::min(d, ts::znorm_distance(seg, std::span<const double>(series).subspan(i, seg.size())));
            v += similarity ? 1.0 / (1.0 + d) : d;
            any = true;
        }
        if (any) all.push_back({inst->id, v});
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (all.size() > 5) all.resize(5);
    return all;
}

Outcome ranking_oracle() {
    const auto onto = test::sip_ontology();
    const std::vector<std::string> classes{"PhaseShift", "FrequencyChange", "AbnormalValues", "FalsePositive"};
    std::mt19937_64 rng(77);
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t ndev = 1 + rng() % 3;
        SeriesMap data;
        for (std::size_t d = 0; d < ndev; ++d) {
            const auto name = gen::device_name(d);
            auto x = test::noise(300, rng());
            if (trial % 3 == 0)
                for (auto& v : x) v = std::round(v * 3);  // coarse values produce distance ties
            data[name] = test::series(name, x);
        }
        test::TempDir dir;
        auto store = KnowledgeStore::open(dir.path());
        for (std::size_t i = 0, n = 1 + rng() % 8; i < n; ++i) {
            StoredInstance inst;
            inst.name = "i";
            for (std::size_t k = 1 + rng() % 3; k > 0; --k) {
                const auto dev = gen::device_name(rng() % 3);  // may name a device missing from the data
                const std::size_t len = 4 + rng() % 30;
                if (data.count(dev) && rng() % 2) {
                    const auto& src = data.at(dev).readings;
                    const std::size_t at = rng() % (src.size() - len);
                    inst.segments[dev] = test::series(dev, {src.begin() + at, src.begin() + at + len});
                } else {
                    inst.segments[dev] = test::series(dev, test::noise(len, rng()));
                }
                inst.labels.insert({dev, classes[rng() % classes.size()]});
            }
            store.add(inst, onto);
        }
        LabelSet current;
        for (std::size_t d = 0; d < 3; ++d)
            for (const auto& c : classes)
                if (rng() % 3 == 0) current.insert({gen::device_name(d), c});

        MatchCache cache;
        for (bool sim : {false, true}) {
            const auto got = rank_instances(current, store, cache, data, sim ? RankMode::Similarity : RankMode::Literal);
            const auto want = oracle_rank(current, store, data, sim);
            bool same = got.size() == want.size();
            for (std::size_t i = 0; same && i < got.size(); ++i)
                same = got[i].instance == want[i].first && got[i].rank_value == want[i].second;
            bad += !same;
        }
    }
    return {bad == 0, "200 stores x 2 modes, " + std::to_string(bad) + " disagreements"};
}

StoredInstance cut(const Dataset& data, const std::string& dev, std::size_t at, std::size_t len, std::string cls) {
    const auto& s = data.at(dev);
    StoredInstance d;
    d.name = cls + " on " + dev;
    DeviceSeries seg;
    seg.device = dev;
    seg.t0 = s.t0 + static_cast<double>(at) * s.dt;
    seg.dt = s.dt;
    seg.readings.assign(s.readings.begin() + at, s.readings.begin() + at + len);
    seg.ratings.assign(s.ratings.begin() + at, s.ratings.begin() + at + len);
    d.segments[dev] = std::move(seg);
    d.labels.insert({dev, std::move(cls)});
    return d;
}

void fill_store(KnowledgeStore& store, const Dataset& data, std::size_t count, std::uint64_t seed) {
    const auto onto = test::sip_ontology();
    const std::vector<std::string> classes{"FalsePositive", "AbnormalValues", "PhaseShift", "FrequencyChange",
                                           "PeriodDisrupt", "PatternDisrupt"};
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& dev = data.devices[rng() % data.devices.size()];
        const std::size_t len = 100 + rng() % 200;
        store.add(cut(data, dev, rng() % (data.steps() - len), len, classes[rng() % classes.size()]), onto);
    }
}

Outcome latency() {
    gen::GenConfig cfg;
    cfg.devices = 4;
    cfg.steps = 10000;
    cfg.seed = 5;
    cfg.injections = {gen::parse_injection("phase-shift@d01:5000")};
    const auto g = gen::generate(cfg);
    test::TempDir dir;
    auto store = KnowledgeStore::open(dir.path());
    fill_store(store, g.data, 24, 9);
    store.add(cut(g.data, "d01", 2000, 200, "FalsePositive"), test::sip_ontology());
    const auto onto = test::sip_ontology();
    const auto reg = sip::make_registry();
    const DetectionConfig det;
    const sip::SipConfig sipcfg;
    const auto incidents = detect_incidents(g.data.at("d01"), det).incidents;
    if (incidents.size() != 1) return {false, std::to_string(incidents.size()) + " incidents detected"};
    const auto ranges = resolve_ranges(&store, g.data.series, det.warning);
    MatchCache cache;
    classify_incidents(incidents, onto, reg, &store, g.data.series, ranges, &cache, sipcfg);  // warm the cache

    std::vector<double> ms;
    std::string final_class;
    for (int i = 0; i < 100; ++i) {
        const auto t = Clock::now();
        auto r = classify_incidents(incidents, onto, reg, &store, g.data.series, ranges, &cache, sipcfg);
        ms.push_back(seconds_since(t) * 1000.0);
        final_class = r.items.at(0).result ? r.items[0].result->final_class : "error";
    }
    std::sort(ms.begin(), ms.end());
    const double median = 0.5 * (ms[49] + ms[50]);
    std::ostringstream d;
    d << std::setprecision(3) << "median " << median << " ms over 100 runs (max " << ms.back() << " ms), class "
      << final_class;
    return {median < 50.0 && final_class == "PhaseShift", d.str()};
}

std::string write_config(const test::TempDir& dir, const std::string& csv) {
    nlohmann::json j = {{"listen", {{"host", "127.0.0.1"}, {"port", 0}}},
                        {"data", csv},
                        {"store", (dir / "store").string()},
                        {"ontology", (test::data_dir() / "sip_ontology.json").string()}};
    const auto path = (dir / "kr.json").string();
    std::ofstream(path) << j.dump();
    return path;
}

Outcome desk_scale() {
    test::TempDir dir;
    gen::GenConfig cfg;
    cfg.devices = 28;
    cfg.steps = 100000;
    cfg.seed = 3;
    cfg.injections = {gen::parse_injection("high@d03:20000"), gen::parse_injection("phase-shift@d11:45000"),
                      gen::parse_injection("pattern-disrupt@d20:70000")};
    {
        const auto g = gen::generate(cfg);
        std::ofstream out(dir / "data.csv", std::ios::binary);
        write_csv(out, g.data);
        auto store = KnowledgeStore::open(dir / "store");
        fill_store(store, g.data, 26, 4);
    }
    const auto config = write_config(dir, (dir / "data.csv").string());

    const auto t = Clock::now();
    auto svc = Service::from_config(load_service_config(config));
    const int port = svc->start("127.0.0.1", 0);
    httplib::Client cli("127.0.0.1", port);
    auto res = cli.Get("/api/series?from=50000&to=51000");
    const double s = seconds_since(t);
    if (!res || res->status != 200) return {false, "no /api/series response"};
    const auto body = nlohmann::json::parse(res->body);
    svc->stop();
    std::ostringstream d;
    d << std::setprecision(3) << "28 x 100000 samples, " << svc->store().size() << " instances, first /api/series after "
      << s << " s";
    return {s < 5.0 && body["devices"].size() == 28 && svc->store().size() == 26, d.str()};
}

Outcome series_fidelity() {
    test::TempDir dir;
    gen::GenConfig cfg;
    cfg.devices = 5;
    cfg.steps = 20000;
    cfg.seed = 8;
    cfg.injections = {gen::parse_injection("high@d02:9000"), gen::parse_injection("low@d04:15000")};
    {
        std::ofstream out(dir / "data.csv", std::ios::binary);
        write_csv(out, gen::generate(cfg).data);
    }
    std::filesystem::create_directories(dir / "store");
    auto svc = Service::from_config(load_service_config(write_config(dir, (dir / "data.csv").string())));
    std::ifstream in(dir / "data.csv", std::ios::binary);
    const auto csv = read_csv(in);
    const int port = svc->start("127.0.0.1", 0);
    httplib::Client cli("127.0.0.1", port);

    std::mt19937_64 rng(99);
    int bad = 0;
    std::string first_problem;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t from = rng() % (csv.steps() + 1), to = rng() % (csv.steps() + 1);
        if (from > to) std::swap(from, to);
        const std::size_t budget = 4 + rng() % 2000;
        auto res = cli.Get("/api/series?from=" + std::to_string(from) + "&to=" + std::to_string(to) +
                           "&budget=" + std::to_string(budget));
        auto fail = [&](const std::string& why) {
            if (first_problem.empty()) first_problem = why + " at window " + std::to_string(from) + ".." + std::to_string(to);
            ++bad;
        };
        if (!res || res->status != 200) {
            fail("bad status");
            continue;
        }
        const auto body = nlohmann::json::parse(res->body);
        for (const auto& dev : body["devices"]) {
            const auto& s = csv.at(dev["device"].get<std::string>());
            std::size_t outside = 0;
            for (const auto& r : dev["regions"]) {
                const auto begin = r["begin"].get<std::size_t>(), end = r["end"].get<std::size_t>();
                const auto rd = r["readings"].get<std::vector<double>>();
                const auto rt = r["ratings"].get<std::vector<double>>();
                if (r["region"] == "window") {
                    bool exact = rd.size() == to - from && rt.size() == to - from;
                    for (std::size_t i = 0; exact && i < rd.size(); ++i)
                        exact = bit_equal(rd[i], s.readings[from + i]) && bit_equal(rt[i], s.ratings[from + i]);
                    if (!exact) fail("window not bit-exact");
                    continue;
                }
                outside += rd.size();
                const auto lo = s.readings.begin() + begin, hi = s.readings.begin() + end;
                if (*std::min_element(rd.begin(), rd.end()) != *std::min_element(lo, hi) ||
                    *std::max_element(rd.begin(), rd.end()) != *std::max_element(lo, hi) ||
                    *std::max_element(rt.begin(), rt.end()) !=
                        *std::max_element(s.ratings.begin() + begin, s.ratings.begin() + end))
                    fail("extreme lost");
            }
            if (outside > budget + 2) fail("over budget");
        }
    }
    svc->stop();
    return {bad == 0, "100 windows, " + std::to_string(bad) + " violations" +
                          (first_problem.empty() ? "" : " (" + first_problem + ")")};
}

Outcome store_round_trip() {
    test::TempDir dir;
    const auto onto = test::sip_ontology();
    std::vector<std::string> classes;
    for (const auto& c : onto.classes()) classes.push_back(c.id);
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-1, 1);
    const double specials[] = {0.0, -0.0, 5e-324, 2.2250738585072014e-308, 1.7976931348623157e308, -1e-300,
                               0.1, 1.0 / 3.0};
    std::map<std::string, StoredInstance> written;
    {
        auto store = KnowledgeStore::open(dir.path());
        for (int i = 0; i < 100; ++i) {
            StoredInstance d;
            d.name = "instance " + std::to_string(i);
            d.instance_annotation = "note " + std::to_string(rng());
            d.vis_settings = {1.0 + static_cast<double>(rng() % 1000), "viridis", 0.0, 0.5 + 0.5 * u(rng) * u(rng) + 0.01};
            for (std::size_t k = 1 + rng() % 4; k > 0; --k) {
                const auto dev = "dev" + std::to_string(rng() % 6);
                DeviceSeries s;
                s.device = dev;
                s.t0 = 1.6e9 + static_cast<double>(rng() % 100000) * 0.25;
                s.dt = 0.25;
                for (std::size_t j = 0, n = 1 + rng() % 400; j < n; ++j) {
                    double v = std::ldexp(u(rng), static_cast<int>(rng() % 200) - 100);
                    if (j % 37 == 0) v = specials[rng() % std::size(specials)];
                    s.readings.push_back(v);
                    s.ratings.push_back(std::abs(u(rng)));
                }
                d.segments[dev] = std::move(s);
                d.labels.insert({dev, classes[rng() % classes.size()]});
                d.device_annotations[dev] = "d" + std::to_string(k);
            }
            const auto id = store.add(d, onto);
            d.id = id;
            written[id] = store.get(id);
        }
    }
    auto reopened = KnowledgeStore::open(dir.path());
    int bad = 0;
    for (const auto& [id, w] : written) {
        const auto r = reopened.get(id);
        bool same = r.name == w.name && r.labels == w.labels && r.segments.size() == w.segments.size() &&
                    r.vis_settings == w.vis_settings && r.device_annotations == w.device_annotations;
        for (const auto& [dev, s] : w.segments) {
            auto it = r.segments.find(dev);
            if (!same || it == r.segments.end() || it->second.size() != s.size()) {
                same = false;
                break;
            }
            for (std::size_t i = 0; same && i < s.size(); ++i)
                same = bit_equal(s.readings[i], it->second.readings[i]) && bit_equal(s.ratings[i], it->second.ratings[i]);
            same = same && bit_equal(s.t0, it->second.t0) && bit_equal(s.dt, it->second.dt);
        }
        bad += !same;
    }
    return {bad == 0 && reopened.size() == 100 && reopened.warnings().empty(),
            "100 instances, " + std::to_string(bad) + " differ after reopen"};
}

Outcome multi_class_query() {
    test::TempDir dir;
    const auto onto = test::sip_ontology();
    auto store = KnowledgeStore::open(dir.path());
    auto make = [](std::vector<Label> labels, std::int64_t created) {
        StoredInstance d;
        d.name = "q";
        d.created_at = created;
        for (const auto& l : labels) {
            d.labels.insert(l);
            d.segments[l.device] = test::series(l.device, {1, 2, 3});
        }
        return d;
    };
    const auto values_only = store.add(make({{"d0", "AbnormalValues"}}, 300), onto);
    const auto both = store.add(make({{"d0", "AbnormalValues"}, {"d1", "PhaseShift"}}, 100), onto);
    const auto freq = store.add(make({{"d1", "FrequencyChange"}}, 200), onto);
    const auto unrelated = store.add(make({{"d2", "FalsePositive"}, {"d3", "PatternDisrupt"}}, 400), onto);
    const auto got = store.query_by_classes(onto, {"AbnormalValues", "Periodic"});
    std::vector<std::string> ids;
    for (const auto& r : got) ids.push_back(r.id);
    const bool ok = ids == std::vector<std::string>{both, values_only, freq} && got[0].score == 2 &&
                    got[1].score == 1 && got[2].score == 1;
    std::string order;
    for (const auto& r : got) order += (order.empty() ? "" : ", ") + r.id + " (" + std::to_string(r.score) + ")";
    return {ok, "order " + order + "; " + unrelated + " excluded"};
}

}  // namespace

int main() {
    criterion("traversal with direct routing and multi-level skip", 1, traversal);
    criterion("incident ontology fidelity", 1, ontology_fidelity);
    criterion("end-to-end classification of generated incidents", 120, end_to_end);
    criterion("accelerated matching equals brute force", 30, kernel_equivalence);
    criterion("suggestion ranking equals the direct formula", 10, ranking_oracle);
    criterion("single-incident classification latency", 60, latency);
    criterion("desk-scale load and first series response", 60, desk_scale);
    criterion("series payload fidelity", 30, series_fidelity);
    criterion("store round trip", 10, store_round_trip);
    criterion("multi-class query ordering", 1, multi_class_query);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
