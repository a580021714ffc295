#pragma once

// JSON-over-HTTP facade: series delivery with reduced resolution outside the
// selected window, incident triage results, suggestions, ontology and store.

#include <algorithm>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "kr/acting.hpp"
#include "kr/downsample.hpp"
#include "kr/error.hpp"
#include "kr/match_cache.hpp"
#include "kr/ontology.hpp"
#include "kr/series.hpp"
#include "kr/sip.hpp"
#include "kr/store.hpp"
#include "kr/triage.hpp"

namespace kr {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_path;
    std::filesystem::path store_path;
    std::filesystem::path ontology_path;
    DetectionConfig detection;
    sip::SipConfig sip;
    std::size_t budget = 1000;  // points per device outside the window
};

/// Throws ConfigError on bad thresholds or a budget below 4.
inline void check_config(const ServiceConfig& cfg) {
    const auto& d = cfg.detection;
    if (!(0.0 <= d.warning && d.warning <= d.alert && d.alert <= 1.0))
        throw ConfigError("thresholds: need 0 <= warning <= alert <= 1");
    if (d.min_len < 1) throw ConfigError("thresholds.min_len must be at least 1");
    if (!(cfg.sip.fp_distance >= 0.0)) throw ConfigError("thresholds.fp_distance must be non-negative");
    if (!(cfg.sip.period.rho >= 0.0 && cfg.sip.period.rho <= 1.0)) throw ConfigError("thresholds.rho must lie in [0,1]");
    if (cfg.sip.period.min_period < 2) throw ConfigError("thresholds.min_period must be at least 2");
    if (cfg.budget < 4) throw ConfigError("budget must be at least 4");
    if (cfg.port < 0 || cfg.port > 65535) throw ConfigError("listen.port out of range");
}

/// Reads a service configuration document. Relative paths resolve against
/// `base`. Paths must exist.
inline ServiceConfig service_config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
    ServiceConfig cfg;
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        if (j.contains("listen")) {
            const auto& l = j["listen"];
            cfg.host = l.value("host", cfg.host);
            cfg.port = l.value("port", cfg.port);
        }
        auto path = [&](const char* key) {
            if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty())
                throw ConfigError(std::string("missing path '") + key + "'");
            std::filesystem::path p = j[key].get<std::string>();
            if (p.is_relative() && !base.empty()) p = base / p;
            if (!std::filesystem::exists(p)) throw ConfigError(std::string(key) + " path '" + p.string() + "' does not exist");
            return p;
        };
        cfg.data_path = path("data");
        cfg.store_path = path("store");
        cfg.ontology_path = path("ontology");
        if (j.contains("thresholds")) {
            const auto& t = j["thresholds"];
            cfg.detection.warning = t.value("warning", cfg.detection.warning);
            cfg.detection.alert = t.value("alert", cfg.detection.alert);
            cfg.detection.min_len = t.value("min_len", cfg.detection.min_len);
            cfg.detection.gap = t.value("gap", cfg.detection.gap);
            cfg.detection.context = t.value("context", cfg.detection.context);
            cfg.sip.fp_distance = t.value("fp_distance", cfg.sip.fp_distance);
            cfg.sip.period.rho = t.value("rho", cfg.sip.period.rho);
            cfg.sip.period.min_period = t.value("min_period", cfg.sip.period.min_period);
            if (t.contains("fp_distance_device"))
                cfg.sip.fp_distance_device = t["fp_distance_device"].get<std::map<std::string, double>>();
        }
        cfg.budget = j.value("budget", cfg.budget);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    check_config(cfg);
    return cfg;
}

inline ServiceConfig load_service_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config '" + file.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + file.string() + "': " + e.what());
    }
    return service_config_from_json(j, file.parent_path());
}

inline std::optional<RankMode> parse_rank_mode(std::string_view s) {
    if (s == "literal") return RankMode::Literal;
    if (s == "similarity") return RankMode::Similarity;
    return std::nullopt;
}

inline nlohmann::json labels_json(const LabelSet& labels) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& l : labels) out.push_back({{"device", l.device}, {"class", l.cls}});
    return out;
}

inline nlohmann::json suggestions_json(const std::vector<Suggestion>& list, const KnowledgeStore& store) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : list) {
        nlohmann::json e = {{"instance", s.instance},
                            {"rank_value", s.rank_value},
                            {"matched_labels", labels_json(s.matched_labels)},
                            {"initial_offset", s.initial_offset}};
        if (auto inst = store.find(s.instance)) {
            e["name"] = inst->name;
            e["vis_settings"] = to_json(*inst)["vis_settings"];
        }
        out.push_back(std::move(e));
    }
    return out;
}

/// Status code and JSON body of one API call.
struct Reply {
    int status = 200;
    nlohmann::json body;
};

using Params = std::multimap<std::string, std::string>;

class Service {
public:
    using Registry = CallbackRegistry<sip::IncidentContext>;

    Service(Ontology ontology, Registry registry, KnowledgeStore store, Dataset data, ServiceConfig cfg)
        : ontology_(std::move(ontology)),
          registry_(std::move(registry)),
          store_(std::move(store)),
          data_(std::move(data)),
          cfg_(std::move(cfg)) {
        check_config(cfg_);
        triage_done_ = std::async(std::launch::async, [this] { run_triage(); }).share();
    }

    /// Loads ontology, store and dataset named by `cfg`.
    static std::unique_ptr<Service> from_config(const ServiceConfig& cfg, Registry registry = sip::make_registry()) {
        std::ifstream onto_in(cfg.ontology_path);
        if (!onto_in) throw ConfigError("cannot read ontology '" + cfg.ontology_path.string() + "'");
        std::stringstream onto_text;
        onto_text << onto_in.rdbuf();
        auto ontology = parse_ontology(onto_text.str());
        std::ifstream data_in(cfg.data_path);
        if (!data_in) throw ConfigError("cannot read data '" + cfg.data_path.string() + "'");
        auto data = read_csv(data_in);
        auto store = KnowledgeStore::open(cfg.store_path);
        return std::make_unique<Service>(std::move(ontology), std::move(registry), std::move(store), std::move(data),
                                         cfg);
    }

    ~Service() {
        stop();
        if (triage_done_.valid()) triage_done_.wait();
    }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    const Ontology& ontology() const { return ontology_; }
    const KnowledgeStore& store() const { return store_; }
    KnowledgeStore& store() { return store_; }
    const Dataset& data() const { return data_; }
    const ServiceConfig& config() const { return cfg_; }

    /// Blocks until the startup triage has finished.
    void wait_triage() const { triage_done_.wait(); }

    // ---- handlers ---------------------------------------------------------

    Reply series(const Params& q) const {
        const std::size_t steps = data_.steps();
        std::size_t from = 0, to = 0, budget = cfg_.budget;
        if (!read_size(q, "from", from) || !read_size(q, "to", to) || !read_size(q, "budget", budget))
            return error(400, "from, to and budget must be non-negative integers");
        if (from > to || to > steps)
            return error(400, "need from <= to <= " + std::to_string(steps));
        if (budget < 4) return error(400, "budget must be at least 4");

        std::vector<std::string> devices;
        if (auto it = q.find("devices"); it != q.end() && !it->second.empty()) {
            std::stringstream ss(it->second);
            for (std::string d; std::getline(ss, d, ',');)
                if (!d.empty()) devices.push_back(d);
        } else {
            devices = data_.devices;
        }
        for (const auto& d : devices)
            if (!data_.series.count(d)) return error(404, "unknown device '" + d + "'");

        // Split the budget between the regions before and after the window.
        const std::size_t before = from, after = steps - to;
        std::size_t b_before = 0, b_after = 0;
        if (before > 0 && after > 0) {
            const auto share = static_cast<std::size_t>(
                std::llround(static_cast<double>(budget) * static_cast<double>(before) / static_cast<double>(before + after)));
            b_before = std::clamp<std::size_t>(share, 2, budget - 2);
            b_after = budget - b_before;
        } else if (before > 0) {
            b_before = budget;
        } else if (after > 0) {
            b_after = budget;
        }

        nlohmann::json out_devices = nlohmann::json::array();
        for (const auto& d : devices) {
            const auto& s = data_.series.at(d);
            nlohmann::json regions = nlohmann::json::array();
            auto reduced = [&](const char* name, std::size_t begin, std::size_t end, std::size_t allot) {
                auto r = ts::downsample(s, allot, begin, end);
                const bool full = r.size() == end - begin;
                regions.push_back({{"region", name},
                                   {"begin", begin},
                                   {"end", end},
                                   {"resolution", full ? "full" : "reduced"},
                                   {"indices", r.indices},
                                   {"readings", r.readings},
                                   {"ratings", r.ratings}});
            };
            if (before > 0) reduced("before", 0, from, b_before);
            {
                std::vector<double> rd(s.readings.begin() + static_cast<std::ptrdiff_t>(from),
                                       s.readings.begin() + static_cast<std::ptrdiff_t>(to));
                std::vector<double> rt(s.ratings.begin() + static_cast<std::ptrdiff_t>(from),
                                       s.ratings.begin() + static_cast<std::ptrdiff_t>(to));
                regions.push_back({{"region", "window"},
                                   {"begin", from},
                                   {"end", to},
                                   {"resolution", "full"},
                                   {"readings", std::move(rd)},
                                   {"ratings", std::move(rt)}});
            }
            if (after > 0) reduced("after", to, steps, b_after);
            out_devices.push_back({{"device", d}, {"regions", std::move(regions)}});
        }
        return {200,
                {{"t0", data_.t0},
                 {"dt", data_.dt},
                 {"steps", steps},
                 {"from", from},
                 {"to", to},
                 {"budget", budget},
                 {"devices", std::move(out_devices)}}};
    }

    Reply incidents() const {
        if (auto failed = triage_failure()) return error(500, *failed);
        std::shared_lock lock(triage_mutex_);
        nlohmann::json list = nlohmann::json::array();
        for (const auto& item : triage_.items) {
            const auto& inc = item.incident;
            nlohmann::json e = {{"id", inc.id()}, {"device", inc.device}, {"start", inc.start}, {"end", inc.end}};
            if (item.result) {
                const auto& r = *item.result;
                nlohmann::json names = nlohmann::json::array();
                for (const auto& c : r.path) names.push_back(ontology_.at(c).name);
                e["path"] = r.path;
                e["path_names"] = names;
                e["tokens"] = r.tokens;
                e["final_class"] = r.final_class;
                e["complete"] = r.complete;
                e["qualifier"] = r.qualifier ? nlohmann::json(*r.qualifier) : nlohmann::json(nullptr);
                e["diagnostics"] = r.diagnostics;
                e["guidance"] = guidance_json(r, inc);
            } else {
                e["complete"] = false;
                e["error"] = item.error;
            }
            if (auto m = manual_.find(inc.id()); m != manual_.end()) e["manual_class"] = m->second;
            list.push_back(std::move(e));
        }
        nlohmann::json marks = nlohmann::json::object();
        for (const auto& [dev, ms] : marks_) {
            nlohmann::json a = nlohmann::json::array();
            for (const auto& m : ms)
                a.push_back({{"start", m.start}, {"end", m.end}, {"level", m.level == Severity::Alert ? "alert" : "warning"}});
            marks[dev] = std::move(a);
        }
        return {200, {{"incidents", std::move(list)}, {"marks", std::move(marks)}, {"unclassified", triage_.unclassified}}};
    }

    Reply suggestions(const Params& q) {
        std::size_t from = 0, to = data_.steps();
        if (!read_size(q, "from", from) || !read_size(q, "to", to))
            return error(400, "from and to must be non-negative integers");
        if (from > to || to > data_.steps()) return error(400, "need from <= to <= " + std::to_string(data_.steps()));
        auto mode = RankMode::Literal;
        if (auto it = q.find("mode"); it != q.end()) {
            auto m = parse_rank_mode(it->second);
            if (!m) return error(400, "mode must be literal or similarity");
            mode = *m;
        }
        if (auto failed = triage_failure()) return error(500, *failed);
        return {200, compute_suggestions(from, to, mode)};
    }

    Reply ontology_doc() const {
        auto doc = to_json(ontology_);
        for (auto& c : doc["classes"]) {
            const auto id = c["id"].get<std::string>();
            c["documentation"] = class_documentation(ontology_, id, registry_);
            nlohmann::json kids = nlohmann::json::array();
            for (const auto* k : ontology_.children(id)) kids.push_back(k->id);
            c["children"] = std::move(kids);
        }
        return {200, std::move(doc)};
    }

    Reply instances(const Params& q) const {
        nlohmann::json out = nlohmann::json::array();
        if (auto it = q.find("classes"); it != q.end()) {
            std::set<std::string> selected;
            std::stringstream ss(it->second);
            for (std::string c; std::getline(ss, c, ',');)
                if (!c.empty()) selected.insert(c);
            std::vector<RankedInstance> ranked;
            try {
                ranked = store_.query_by_classes(ontology_, selected);
            } catch (const NotFound& e) {
                return error(400, e.what());
            }
            for (const auto& r : ranked) {
                auto inst = store_.find(r.id);
                if (!inst) continue;
                auto e = summary(*inst);
                e["score"] = r.score;
                e["matched_classes"] = r.matched_classes;
                out.push_back(std::move(e));
            }
            return {200, std::move(out)};
        }
        for (const auto& inst : store_.snapshot()) out.push_back(summary(*inst));
        return {200, std::move(out)};
    }

    Reply instance(const std::string& id) const {
        auto inst = store_.find(id);
        if (!inst) return error(404, "unknown instance '" + id + "'");
        return {200, to_json(*inst)};
    }

    Reply add_instance(const std::string& body) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            return error(400, std::string("body is not JSON: ") + e.what());
        }
        StoredInstance draft;
        try {
            draft = instance_from_json(j);
        } catch (const ValidationError& e) {
            return validation_errors({{e.field(), e.what()}});
        }
        auto errors = check_instance(draft, ontology_);
        if (!errors.empty()) return validation_errors(errors);
        draft.id.clear();
        try {
            auto id = store_.add(std::move(draft), ontology_);
            return {201, {{"id", id}}};
        } catch (const ValidationError& e) {
            return validation_errors({{e.field(), e.what()}});
        }
    }

    Reply manual_classify(const std::string& body) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            return error(400, std::string("body is not JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("incident") || !j["incident"].is_string())
            return validation_errors({{"incident", "missing incident id"}});
        if (!j.contains("class") || !j["class"].is_string()) return validation_errors({{"class", "missing class id"}});
        auto mode = RankMode::Literal;
        if (j.contains("mode")) {
            auto m = j["mode"].is_string() ? parse_rank_mode(j["mode"].get<std::string>()) : std::nullopt;
            if (!m) return validation_errors({{"mode", "must be literal or similarity"}});
            mode = *m;
        }
        const auto incident = j["incident"].get<std::string>();
        const auto cls = j["class"].get<std::string>();
        if (!ontology_.contains(cls)) return validation_errors({{"class", "unknown class '" + cls + "'"}});
        if (auto failed = triage_failure()) return error(500, *failed);
        {
            std::unique_lock lock(triage_mutex_);
            const bool known = std::any_of(triage_.items.begin(), triage_.items.end(),
                                           [&](const IncidentClassification& i) { return i.incident.id() == incident; });
            if (!known) return error(404, "unknown incident '" + incident + "'");
            manual_[incident] = cls;
            ++labels_version_;
        }
        auto result = compute_suggestions(0, data_.steps(), mode);
        result["incident"] = incident;
        result["class"] = cls;
        return {200, std::move(result)};
    }

    // ---- HTTP -------------------------------------------------------------

    void mount(httplib::Server& srv) {
        auto send = [](httplib::Response& res, const Reply& r) {
            res.status = r.status;
            res.set_content(r.body.dump(), "application/json");
        };
        auto params = [](const httplib::Request& req) {
            Params p;
            for (const auto& [k, v] : req.params) p.emplace(k, v);
            return p;
        };
        auto guard = [send](httplib::Response& res, auto&& fn) {
            try {
                send(res, fn());
            } catch (const std::exception& e) {
                send(res, error(500, e.what()));
            }
        };
        srv.Get("/api/series", [=, this](const httplib::Request& req, httplib::Response& res) {
            guard(res, [&] { return series(params(req)); });
        });
        srv.Get("/api/incidents", [=, this](const httplib::Request&, httplib::Response& res) {
            guard(res, [&] {
                wait_triage();
                return incidents();
            });
        });
        srv.Get("/api/suggestions", [=, this](const httplib::Request& req, httplib::Response& res) {
            guard(res, [&] {
                wait_triage();
                return suggestions(params(req));
            });
        });
        srv.Get("/api/ontology", [=, this](const httplib::Request&, httplib::Response& res) {
            guard(res, [&] { return ontology_doc(); });
        });
        srv.Get("/api/instances", [=, this](const httplib::Request& req, httplib::Response& res) {
            guard(res, [&] { return instances(params(req)); });
        });
        srv.Get(R"(/api/instances/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
            guard(res, [&] { return instance(req.matches[1]); });
        });
        srv.Post("/api/instances", [=, this](const httplib::Request& req, httplib::Response& res) {
            guard(res, [&] { return add_instance(req.body); });
        });
        srv.Post("/api/classify", [=, this](const httplib::Request& req, httplib::Response& res) {
            guard(res, [&] {
                wait_triage();
                return manual_classify(req.body);
            });
        });
    }

    /// Binds host:port (port 0 picks a free one) and serves on a background
    /// thread. Returns the bound port.
    int start(const std::string& host, int port) {
        server_ = std::make_unique<httplib::Server>();
        mount(*server_);
        const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
        if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
        thread_ = std::thread([this] { server_->listen_after_bind(); });
        server_->wait_until_ready();
        return bound;
    }

    /// Blocks serving until stop() is called from another thread.
    void run(const std::string& host, int port) {
        start(host, port);
        wait();
    }

    /// Blocks until the server started by start() stops.
    void wait() {
        if (thread_.joinable()) thread_.join();
    }

    void stop() {
        if (server_) server_->stop();
        if (thread_.joinable()) thread_.join();
    }

private:
    static Reply error(int status, const std::string& message) { return {status, {{"error", message}}}; }

    static Reply validation_errors(const std::vector<FieldError>& errors) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& e : errors) list.push_back({{"field", e.field}, {"message", e.message}});
        return {422, {{"errors", std::move(list)}}};
    }

    static bool read_size(const Params& q, const char* key, std::size_t& out) {
        auto it = q.find(key);
        if (it == q.end() || it->second.empty()) return true;
        const auto& s = it->second;
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) return false;
        out = v;
        return true;
    }

    static nlohmann::json summary(const StoredInstance& inst) {
        nlohmann::json devices = nlohmann::json::array();
        for (const auto& [dev, s] : inst.segments) devices.push_back(dev);
        return {{"id", inst.id},
                {"name", inst.name},
                {"created_at", inst.created_at},
                {"labels", labels_json(inst.labels)},
                {"devices", std::move(devices)},
                {"instance_annotation", inst.instance_annotation}};
    }

    nlohmann::json guidance_json(const ClassificationResult& r, const sip::Incident& inc) const {
        nlohmann::json out = nlohmann::json::array();
        if (!ontology_.contains(r.final_class)) return out;
        for (const auto& g : ontology_.at(r.final_class).guidance) {
            nlohmann::json e = {{"kind", to_string(g.kind)}, {"params", g.params}};
            if (g.kind == GuidanceKind::HighlightPeriod) {
                auto s = r.diagnostics.find("excursion.start");
                auto t = r.diagnostics.find("excursion.end");
                if (s != r.diagnostics.end() && t != r.diagnostics.end())
                    e["interval"] = {std::stoul(s->second), std::stoul(t->second)};
                else
                    e["interval"] = {inc.start, inc.end};
            }
            if (g.kind == GuidanceKind::PrescribeSettings) {
                if (auto b = r.diagnostics.find("fp.best_instance"); b != r.diagnostics.end()) e["instance"] = b->second;
            }
            out.push_back(std::move(e));
        }
        return out;
    }

    std::optional<std::string> triage_failure() const {
        std::shared_lock lock(triage_mutex_);
        return triage_error_;
    }

    void run_triage() {
        try {
            auto t = triage_dataset(data_, ontology_, registry_, &store_, &cache_, cfg_.detection, cfg_.sip);
            std::unique_lock lock(triage_mutex_);
            triage_ = std::move(t.result);
            marks_ = std::move(t.marks);
        } catch (const std::exception& e) {
            std::unique_lock lock(triage_mutex_);
            triage_error_ = std::string("triage failed: ") + e.what();
        }
    }

    /// Labels of incidents overlapping [from, to); an empty window means all.
    LabelSet window_labels(std::size_t from, std::size_t to) const {
        LabelSet labels;
        for (const auto& item : triage_.items) {
            const auto& inc = item.incident;
            if (from < to && (inc.end <= from || inc.start >= to)) continue;
            if (auto m = manual_.find(inc.id()); m != manual_.end())
                labels.insert({inc.device, m->second});
            else if (item.result && item.result->complete)
                labels.insert({inc.device, item.result->final_class});
        }
        return labels;
    }

    nlohmann::json compute_suggestions(std::size_t from, std::size_t to, RankMode mode) {
        LabelSet labels;
        std::uint64_t labels_version = 0;
        {
            std::shared_lock lock(triage_mutex_);
            labels = window_labels(from, to);
            labels_version = labels_version_;
        }
        const auto key = std::make_tuple(from, to, mode == RankMode::Literal ? 0 : 1);
        const auto version = std::make_pair(store_.version(), labels_version);
        {
            std::shared_lock lock(suggest_mutex_);
            if (auto it = suggest_cache_.find(key); it != suggest_cache_.end() && it->second.first == version)
                return it->second.second;
        }
        auto ranked = rank_instances(labels, store_, cache_, data_.series, mode);
        nlohmann::json out = {{"from", from},
                              {"to", to},
                              {"mode", mode == RankMode::Literal ? "literal" : "similarity"},
                              {"labels", labels_json(labels)},
                              {"suggestions", suggestions_json(ranked, store_)}};
        std::unique_lock lock(suggest_mutex_);
        suggest_cache_[key] = {version, out};
        return out;
    }

    Ontology ontology_;
    Registry registry_;
    KnowledgeStore store_;
    Dataset data_;
    ServiceConfig cfg_;
    MatchCache cache_;

    mutable std::shared_mutex triage_mutex_;
    TriageResult triage_;
    std::map<std::string, std::vector<Mark>> marks_;
    std::map<std::string, std::string> manual_;  // incident id -> class id
    std::uint64_t labels_version_ = 0;
    std::optional<std::string> triage_error_;
    std::shared_future<void> triage_done_;

    mutable std::shared_mutex suggest_mutex_;
    std::map<std::tuple<std::size_t, std::size_t, int>, std::pair<std::pair<std::uint64_t, std::uint64_t>, nlohmann::json>>
        suggest_cache_;

    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

}  // namespace kr
