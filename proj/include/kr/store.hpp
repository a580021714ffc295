#pragma once

// File-backed knowledge base: one JSON document per stored instance plus
// ranges.json for per-device normal ranges. Everything is loaded at open;
// writes go through write-temp-then-rename.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kr/error.hpp"
#include "kr/ontology.hpp"
#include "kr/series.hpp"

namespace kr {

struct Label {
    std::string device;
    std::string cls;

    auto operator<=>(const Label&) const = default;
};

using LabelSet = std::set<Label>;

struct VisSettings {
    double period_seconds = 1.0;
    std::string colormap = "viridis";
    double reference_lo = 0.0;
    double reference_hi = 1.0;

    bool operator==(const VisSettings&) const = default;
};

struct StoredInstance {
    std::string id;
    std::string name;
    LabelSet labels;
    std::map<std::string, DeviceSeries> segments;
    std::string instance_annotation;
    std::map<std::string, std::string> device_annotations;
    VisSettings vis_settings;
    std::int64_t created_at = 0;

    bool operator==(const StoredInstance&) const = default;
};

struct NormalRange {
    std::string device;
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const NormalRange&) const = default;
};

struct FieldError {
    std::string field;
    std::string message;
};

// ---- JSON ----------------------------------------------------------------

inline nlohmann::json to_json(const DeviceSeries& s) {
    return {{"t0", s.t0}, {"dt", s.dt}, {"readings", s.readings}, {"ratings", s.ratings}};
}

inline nlohmann::json to_json(const StoredInstance& inst) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : inst.labels) labels.push_back({{"device", l.device}, {"class", l.cls}});
    nlohmann::json segments = nlohmann::json::object();
    for (const auto& [dev, s] : inst.segments) segments[dev] = to_json(s);
    return {
        {"id", inst.id},
        {"name", inst.name},
        {"created_at", inst.created_at},
        {"labels", labels},
        {"segments", segments},
        {"instance_annotation", inst.instance_annotation},
        {"device_annotations", inst.device_annotations},
        {"vis_settings",
         {{"period_seconds", inst.vis_settings.period_seconds},
          {"colormap", inst.vis_settings.colormap},
          {"colormap_reference", {inst.vis_settings.reference_lo, inst.vis_settings.reference_hi}}}},
    };
}

/// Parses an instance document; `id` may be absent (drafts). Throws ValidationError.
inline StoredInstance instance_from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& field, const std::string& msg) { throw ValidationError(field, msg); };
    if (!j.is_object()) fail("$", "instance must be a JSON object");
    StoredInstance inst;
    try {
        if (j.contains("id") && !j["id"].is_null()) inst.id = j.at("id").get<std::string>();
        if (!j.contains("name")) fail("name", "missing");
        inst.name = j.at("name").get<std::string>();
        if (j.contains("created_at")) inst.created_at = j.at("created_at").get<std::int64_t>();
        if (j.contains("labels")) {
            if (!j["labels"].is_array()) fail("labels", "must be an array");
            for (const auto& l : j["labels"]) {
                if (!l.is_object() || !l.contains("device") || !l.contains("class"))
                    fail("labels", "entries need 'device' and 'class'");
                inst.labels.insert({l["device"].get<std::string>(), l["class"].get<std::string>()});
            }
        }
        if (j.contains("segments")) {
            if (!j["segments"].is_object()) fail("segments", "must be an object");
            for (const auto& [dev, js] : j["segments"].items()) {
                const std::string where = "segments." + dev;
                if (!js.is_object()) fail(where, "must be an object");
                DeviceSeries s;
                s.device = dev;
                if (!js.contains("t0") || !js.contains("dt") || !js.contains("readings") || !js.contains("ratings"))
                    fail(where, "needs t0, dt, readings and ratings");
                s.t0 = js["t0"].get<double>();
                s.dt = js["dt"].get<double>();
                s.readings = js["readings"].get<std::vector<double>>();
                s.ratings = js["ratings"].get<std::vector<double>>();
                inst.segments.emplace(dev, std::move(s));
            }
        }
        if (j.contains("instance_annotation")) inst.instance_annotation = j["instance_annotation"].get<std::string>();
        if (j.contains("device_annotations"))
            inst.device_annotations = j["device_annotations"].get<std::map<std::string, std::string>>();
        if (j.contains("vis_settings")) {
            const auto& v = j["vis_settings"];
            if (!v.is_object()) fail("vis_settings", "must be an object");
            if (v.contains("period_seconds")) inst.vis_settings.period_seconds = v["period_seconds"].get<double>();
            if (v.contains("colormap")) inst.vis_settings.colormap = v["colormap"].get<std::string>();
            if (v.contains("colormap_reference")) {
                const auto& ref = v["colormap_reference"];
                if (!ref.is_array() || ref.size() != 2) fail("vis_settings.colormap_reference", "must be [lo, hi]");
                inst.vis_settings.reference_lo = ref[0].get<double>();
                inst.vis_settings.reference_hi = ref[1].get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail("$", std::string("type error: ") + e.what());
    }
    return inst;
}

/// Every violated invariant of `inst` against `ontology`, field by field.
inline std::vector<FieldError> check_instance(const StoredInstance& inst, const Ontology& ontology) {
    std::vector<FieldError> errors;
    if (inst.name.empty()) errors.push_back({"name", "must not be empty"});
    if (inst.segments.empty()) errors.push_back({"segments", "at least one device segment is required"});
    for (const auto& l : inst.labels) {
        if (!ontology.contains(l.cls))
            errors.push_back({"labels", "unknown class '" + l.cls + "' for device '" + l.device + "'"});
        if (!inst.segments.count(l.device))
            errors.push_back({"labels", "device '" + l.device + "' has no segment"});
    }
    for (const auto& [dev, s] : inst.segments) {
        const std::string where = "segments." + dev;
        if (s.readings.empty()) errors.push_back({where, "empty segment"});
        if (s.readings.size() != s.ratings.size()) errors.push_back({where, "readings and ratings differ in length"});
        if (!(s.dt > 0.0)) errors.push_back({where, "dt must be positive"});
        for (double r : s.ratings) {
            if (!(r >= 0.0 && r <= 1.0)) {
                errors.push_back({where, "ratings must lie in [0,1]"});
                break;
            }
        }
    }
    if (!(inst.vis_settings.period_seconds > 0.0))
        errors.push_back({"vis_settings.period_seconds", "must be positive"});
    if (!(inst.vis_settings.reference_lo < inst.vis_settings.reference_hi))
        errors.push_back({"vis_settings.colormap_reference", "lo must be below hi"});
    return errors;
}

struct RankedInstance {
    std::string id;
    std::size_t score = 0;
    std::vector<std::string> matched_classes;
};

/// Thread-safe handle over a store directory. Writers are serialized; readers
/// receive immutable snapshots.
class KnowledgeStore {
public:
    using InstancePtr = std::shared_ptr<const StoredInstance>;

    static KnowledgeStore open(const std::filesystem::path& dir) { return KnowledgeStore(dir); }

    KnowledgeStore(KnowledgeStore&& other) noexcept
        : dir_(std::move(other.dir_)),
          instances_(std::move(other.instances_)),
          ranges_(std::move(other.ranges_)),
          warnings_(std::move(other.warnings_)),
          next_id_(other.next_id_),
          version_(other.version_) {}

    const std::filesystem::path& path() const { return dir_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Monotonic counter bumped by every write.
    std::uint64_t version() const {
        std::shared_lock lock(mutex_);
        return version_;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return instances_.size();
    }

    std::vector<std::string> list() const {
        std::shared_lock lock(mutex_);
        std::vector<std::string> ids;
        for (const auto& [id, inst] : instances_) ids.push_back(id);
        return ids;
    }

    std::vector<InstancePtr> snapshot() const {
        std::shared_lock lock(mutex_);
        std::vector<InstancePtr> out;
        for (const auto& [id, inst] : instances_) out.push_back(inst);
        return out;
    }

    InstancePtr find(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = instances_.find(id);
        return it == instances_.end() ? nullptr : it->second;
    }

    StoredInstance get(const std::string& id) const {
        auto p = find(id);
        if (!p) throw NotFound("unknown instance '" + id + "'");
        return *p;
    }

    /// Validates and persists a draft; returns the new id.
    std::string add(StoredInstance draft, const Ontology& ontology) {
        auto errors = check_instance(draft, ontology);
        if (!errors.empty()) throw ValidationError(errors.front().field, errors.front().message);
        for (auto& [dev, s] : draft.segments) s.device = dev;
        if (draft.created_at == 0)
            draft.created_at = std::chrono::duration_cast<std::chrono::seconds>(
                                   std::chrono::system_clock::now().time_since_epoch())
                                   .count();

        std::unique_lock lock(mutex_);
        const std::string id = format_id(next_id_);
        draft.id = id;
        write_atomic(instance_path(id), to_json(draft).dump());
        ++next_id_;
        write_atomic(dir_ / "meta.json", nlohmann::json{{"next_id", next_id_}}.dump());
        instances_[id] = std::make_shared<const StoredInstance>(std::move(draft));
        ++version_;
        return id;
    }

    void remove(const std::string& id) {
        std::unique_lock lock(mutex_);
        auto it = instances_.find(id);
        if (it == instances_.end()) throw NotFound("unknown instance '" + id + "'");
        std::filesystem::remove(instance_path(id));
        instances_.erase(it);
        ++version_;
    }

    void set_normal_range(const NormalRange& range) {
        if (range.device.empty()) throw ValidationError("device", "must not be empty");
        if (!(range.lo <= range.hi)) throw ValidationError("lo", "must not exceed hi");
        std::unique_lock lock(mutex_);
        ranges_[range.device] = range;
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [dev, r] : ranges_) j[dev] = {r.lo, r.hi};
        write_atomic(dir_ / "ranges.json", j.dump(2));
        ++version_;
    }

    NormalRange get_normal_range(const std::string& device) const {
        std::shared_lock lock(mutex_);
        auto it = ranges_.find(device);
        if (it == ranges_.end()) throw NotFound("no normal range for device '" + device + "'");
        return it->second;
    }

    std::map<std::string, NormalRange> normal_ranges() const {
        std::shared_lock lock(mutex_);
        return ranges_;
    }

    /// Instances whose labels fall into (or below) the selected classes,
    /// scored by how many selected classes they hit.
    std::vector<RankedInstance> query_by_classes(const Ontology& ontology, const std::set<std::string>& selected) const {
        for (const auto& c : selected)
            if (!ontology.contains(c)) throw NotFound("unknown class id '" + c + "'");
        std::vector<std::pair<RankedInstance, std::int64_t>> hits;
        for (const auto& inst : snapshot()) {
            RankedInstance r{inst->id, 0, {}};
            for (const auto& sel : selected) {
                bool hit = std::any_of(inst->labels.begin(), inst->labels.end(), [&](const Label& l) {
                    return ontology.contains(l.cls) && ontology.is_same_or_descendant(l.cls, sel);
                });
                if (hit) {
                    ++r.score;
                    r.matched_classes.push_back(sel);
                }
            }
            if (r.score > 0) hits.emplace_back(std::move(r), inst->created_at);
        }
        std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
            if (a.first.score != b.first.score) return a.first.score > b.first.score;
            if (a.second != b.second) return a.second > b.second;
            return a.first.id < b.first.id;
        });
        std::vector<RankedInstance> out;
        for (auto& h : hits) out.push_back(std::move(h.first));
        return out;
    }

private:
    explicit KnowledgeStore(std::filesystem::path dir) : dir_(std::move(dir)) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(dir_ / "instances", ec);
        if (ec || !fs::is_directory(dir_ / "instances"))
            throw DataError("cannot open store at '" + dir_.string() + "': " + ec.message());

        if (fs::exists(dir_ / "meta.json")) {
            try {
                next_id_ = nlohmann::json::parse(read_file(dir_ / "meta.json")).at("next_id").get<std::uint64_t>();
            } catch (const std::exception& e) {
                warnings_.push_back("meta.json unreadable: " + std::string(e.what()));
            }
        }
        if (fs::exists(dir_ / "ranges.json")) {
            try {
                auto j = nlohmann::json::parse(read_file(dir_ / "ranges.json"));
                for (const auto& [dev, v] : j.items())
                    ranges_[dev] = {dev, v.at(0).get<double>(), v.at(1).get<double>()};
            } catch (const std::exception& e) {
                warnings_.push_back("ranges.json unreadable: " + std::string(e.what()));
            }
        }

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir_ / "instances"))
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            try {
                auto inst = instance_from_json(nlohmann::json::parse(read_file(file)));
                if (inst.id.empty()) throw ValidationError("id", "missing");
                for (auto& [dev, s] : inst.segments) check_series(s);
                if (instances_.count(inst.id)) throw ValidationError("id", "duplicate id '" + inst.id + "'");
                next_id_ = std::max(next_id_, id_number(inst.id) + 1);
                auto id = inst.id;
                instances_[id] = std::make_shared<const StoredInstance>(std::move(inst));
            } catch (const std::exception& e) {
                warnings_.push_back(file.filename().string() + ": skipped (" + e.what() + ")");
            }
        }
    }

    static std::string read_file(const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw DataError("cannot read '" + p.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static void write_atomic(const std::filesystem::path& target, const std::string& content) {
        auto tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write '" + tmp.string() + "'");
            out << content;
            out.flush();
            if (!out) throw DataError("write failed for '" + tmp.string() + "'");
        }
        std::filesystem::rename(tmp, target);
    }

    static std::string format_id(std::uint64_t n) {
        std::string digits = std::to_string(n);
        if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
        return "inst-" + digits;
    }

    static std::uint64_t id_number(const std::string& id) {
        if (id.rfind("inst-", 0) != 0) return 0;
        try {
            return std::stoull(id.substr(5));
        } catch (...) {
            return 0;
        }
    }

    std::filesystem::path instance_path(const std::string& id) const { return dir_ / "instances" / (id + ".json"); }

    std::filesystem::path dir_;
    std::map<std::string, InstancePtr> instances_;
    std::map<std::string, NormalRange> ranges_;
    std::vector<std::string> warnings_;
    std::uint64_t next_id_ = 1;
    std::uint64_t version_ = 0;
    mutable std::shared_mutex mutex_;
};

}  // namespace kr
