#pragma once

// The `kr` command line: serve, classify, suggest, store, ontology, gen-data.
// run() returns the process exit code: 0 ok, 1 data error, 2 config error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kr/acting.hpp"
#include "kr/error.hpp"
#include "kr/generator.hpp"
#include "kr/ontology.hpp"
#include "kr/series.hpp"
#include "kr/service.hpp"
#include "kr/sip.hpp"
#include "kr/store.hpp"
#include "kr/triage.hpp"

namespace kr::cli {

inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kConfigError = 2;

namespace detail {

inline std::string read_text(const std::filesystem::path& p, bool config) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        const std::string msg = "cannot read '" + p.string() + "'";
        if (config) throw ConfigError(msg);
        throw DataError(msg);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Ontology load_ontology(const std::filesystem::path& p) {
    try {
        return parse_ontology(read_text(p, true));
    } catch (const OntologyError& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

inline Dataset load_data(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read '" + p.string() + "'");
    try {
        return read_csv(in);
    } catch (const DataError& e) {
        throw DataError(p.string() + ": " + e.what());
    }
}

inline std::string path_text(const Ontology& onto, const ClassificationResult& r) {
    std::string out;
    for (std::size_t i = 0; i < r.path.size(); ++i) {
        if (i) out += " > ";
        out += onto.at(r.path[i]).name;
    }
    if (r.qualifier) out += " [" + *r.qualifier + "]";
    return out;
}

inline std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

inline void print_tree(std::ostream& out, const Ontology& onto, const OntologyClass& c, int depth) {
    out << std::string(2 * depth, ' ') << c.name << " (" << c.id << ")";
    if (!c.triggers.empty()) out << " triggers=[" << join(c.triggers) << "]";
    if (!c.qualifiers.empty()) out << " qualifiers=[" << join(c.qualifiers) << "]";
    if (c.callback) out << " callback=" << *c.callback;
    out << "\n";
    for (const auto* k : onto.children(c.id)) print_tree(out, onto, *k, depth + 1);
}

struct Thresholds {
    DetectionConfig detection;
    sip::SipConfig sip;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--warning", detection.warning, "warning rating threshold")->capture_default_str();
        cmd->add_option("--alert", detection.alert, "alert rating threshold")->capture_default_str();
        cmd->add_option("--min-len", detection.min_len, "shortest incident in samples")->capture_default_str();
        cmd->add_option("--gap", detection.gap, "merge runs closer than this")->capture_default_str();
        cmd->add_option("--context", detection.context, "context samples on each side")->capture_default_str();
        cmd->add_option("--fp-distance", sip.fp_distance, "false-positive match distance")->capture_default_str();
        cmd->add_option("--rho", sip.period.rho, "periodicity score threshold")->capture_default_str();
    }

    void check() const {
        ServiceConfig c;
        c.detection = detection;
        c.sip = sip;
        check_config(c);
    }
};

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Knowledge-based incident triage for device time series", "kr"};
    app.require_subcommand(1);

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string config_path;
    int port_override = -1;
    bool dry_run = false;
    serve->add_option("--config", config_path, "service config JSON")->required();
    serve->add_option("--port", port_override, "listen port, overrides the config");
    serve->add_flag("--dry-run", dry_run, "load everything, print the listen address and exit");

    // classify / suggest
    std::string data_path, ontology_path, store_path, mode_text = "literal";
    bool as_json = false;
    detail::Thresholds th;
    auto* classify_cmd = app.add_subcommand("classify", "Detect and classify incidents in a dataset");
    classify_cmd->add_option("--data", data_path, "dataset CSV")->required();
    classify_cmd->add_option("--ontology", ontology_path, "ontology JSON")->required();
    classify_cmd->add_option("--store", store_path, "knowledge store directory")->required();
    classify_cmd->add_flag("--json", as_json, "machine-readable output");
    th.add_to(classify_cmd);

    auto* suggest_cmd = app.add_subcommand("suggest", "Rank stored instances against a dataset");
    suggest_cmd->add_option("--data", data_path, "dataset CSV")->required();
    suggest_cmd->add_option("--ontology", ontology_path, "ontology JSON")->required();
    suggest_cmd->add_option("--store", store_path, "knowledge store directory")->required();
    suggest_cmd->add_option("--mode", mode_text, "literal or similarity")
        ->check(CLI::IsMember({"literal", "similarity"}))
        ->capture_default_str();
    suggest_cmd->add_flag("--json", as_json, "machine-readable output");
    th.add_to(suggest_cmd);

    // store
    auto* store_cmd = app.add_subcommand("store", "Manage the knowledge store");
    store_cmd->require_subcommand(1);
    store_cmd->fallthrough();
    store_cmd->add_option("--store", store_path, "knowledge store directory")->required();
    std::string file_arg, id_arg, device_arg;
    double lo = 0.0, hi = 0.0;
    auto* store_add = store_cmd->add_subcommand("add", "Add an instance from a JSON file; prints the id");
    store_add->add_option("file", file_arg, "instance JSON")->required();
    store_add->add_option("--ontology", ontology_path, "ontology JSON")->required();
    auto* store_list = store_cmd->add_subcommand("list", "List instances");
    auto* store_show = store_cmd->add_subcommand("show", "Print one instance as JSON");
    store_show->add_option("id", id_arg)->required();
    auto* store_rm = store_cmd->add_subcommand("rm", "Remove an instance");
    store_rm->add_option("id", id_arg)->required();
    auto* store_range = store_cmd->add_subcommand("range", "Set the normal range of a device");
    store_range->add_option("device", device_arg)->required();
    store_range->add_option("lo", lo)->required();
    store_range->add_option("hi", hi)->required();

    // ontology
    auto* onto_cmd = app.add_subcommand("ontology", "Inspect ontology documents");
    onto_cmd->require_subcommand(1);
    auto* onto_validate = onto_cmd->add_subcommand("validate", "Check a document against the built-in callbacks");
    onto_validate->add_option("file", file_arg)->required();
    auto* onto_show = onto_cmd->add_subcommand("show", "Print a document");
    bool tree = false;
    onto_show->add_option("file", file_arg)->required();
    onto_show->add_flag("--tree", tree, "indented class tree");

    // gen-data
    auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic dataset and its ground truth");
    gen::GenConfig gcfg;
    std::vector<std::string> injections;
    std::string out_path, truth_path;
    gen_cmd->add_option("--devices", gcfg.devices)->capture_default_str();
    gen_cmd->add_option("--steps", gcfg.steps)->capture_default_str();
    gen_cmd->add_option("--seed", gcfg.seed)->capture_default_str();
    gen_cmd->add_option("--inject", injections, "kind@device:t[:length]")->take_all();
    gen_cmd->add_option("--out", out_path, "CSV output")->required();
    gen_cmd->add_option("--truth", truth_path, "ground-truth JSON (default: <out>.truth.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "kr: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (*serve) {
            auto cfg = load_service_config(config_path);
            if (port_override >= 0) cfg.port = port_override;
            check_config(cfg);
            auto svc = Service::from_config(cfg);
            if (dry_run) {
                out << "would listen on " << cfg.host << ":" << cfg.port << "\n";
                return kOk;
            }
            const int port = svc->start(cfg.host, cfg.port);
            out << "listening on " << cfg.host << ":" << port << std::endl;
            svc->wait();
            return kOk;
        }

        if (*classify_cmd || *suggest_cmd) {
            th.check();
            auto onto = detail::load_ontology(ontology_path);
            auto data = detail::load_data(data_path);
            auto store = KnowledgeStore::open(store_path);
            for (const auto& w : store.warnings()) err << "kr: store: " << w << "\n";
            const auto registry = sip::make_registry();
            MatchCache cache;
            auto t = triage_dataset(data, onto, registry, &store, &cache, th.detection, th.sip);

            if (*classify_cmd) {
                if (as_json) {
                    nlohmann::json items = nlohmann::json::array();
                    for (const auto& it : t.result.items) {
                        nlohmann::json e = {{"id", it.incident.id()},
                                            {"device", it.incident.device},
                                            {"start", it.incident.start},
                                            {"end", it.incident.end}};
                        if (it.result) {
                            nlohmann::json names = nlohmann::json::array();
                            for (const auto& c : it.result->path) names.push_back(onto.at(c).name);
                            e["path"] = it.result->path;
                            e["path_names"] = names;
                            e["final_class"] = it.result->final_class;
                            e["final_name"] = onto.at(it.result->final_class).name;
                            e["qualifier"] = it.result->qualifier ? nlohmann::json(*it.result->qualifier) : nullptr;
                            e["complete"] = it.result->complete;
                            e["diagnostics"] = it.result->diagnostics;
                        } else {
                            e["complete"] = false;
                            e["error"] = it.error;
                        }
                        items.push_back(std::move(e));
                    }
                    out << nlohmann::json{{"incidents", items},
                                          {"labels", labels_json(t.result.labels)},
                                          {"unclassified", t.result.unclassified}}
                               .dump(2)
                        << "\n";
                    return kOk;
                }
                if (t.result.items.empty()) {
                    out << "no incidents\n";
                    return kOk;
                }
                for (const auto& it : t.result.items) {
                    out << it.incident.device << " [" << it.incident.start << "," << it.incident.end << ") ";
                    if (!it.result) {
                        out << "unclassified: " << it.error << "\n";
                        continue;
                    }
                    out << detail::path_text(onto, *it.result);
                    if (!it.result->complete) out << " (unclassified)";
                    out << "\n";
                    for (const auto& [k, v] : it.result->diagnostics) out << "    " << k << " = " << v << "\n";
                }
                if (!t.result.unclassified.empty())
                    out << t.result.unclassified.size() << " incident(s) need manual classification\n";
                return kOk;
            }

            const auto mode = *parse_rank_mode(mode_text);
            auto ranked = rank_instances(t.result.labels, store, cache, data.series, mode);
            if (as_json) {
                out << suggestions_json(ranked, store).dump(2) << "\n";
                return kOk;
            }
            if (ranked.empty()) {
                out << "no suggestions\n";
                return kOk;
            }
            for (const auto& s : ranked) {
                std::string labels;
                for (const auto& l : s.matched_labels) labels += (labels.empty() ? "" : " ") + l.device + ":" + l.cls;
                out << s.instance << " rank_value=" << std::setprecision(10) << s.rank_value << " labels=" << labels
                    << " offset=" << s.initial_offset << "\n";
            }
            return kOk;
        }

        if (*store_cmd) {
            auto store = KnowledgeStore::open(store_path);
            for (const auto& w : store.warnings()) err << "kr: store: " << w << "\n";
            if (*store_add) {
                auto onto = detail::load_ontology(ontology_path);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(detail::read_text(file_arg, false));
                } catch (const nlohmann::json::exception& e) {
                    throw DataError(file_arg + ": " + e.what());
                }
                auto draft = instance_from_json(j);
                draft.id.clear();
                out << store.add(std::move(draft), onto) << "\n";
            } else if (*store_list) {
                for (const auto& inst : store.snapshot()) {
                    std::string labels;
                    for (const auto& l : inst->labels) labels += (labels.empty() ? "" : " ") + l.device + ":" + l.cls;
                    out << inst->id << "\t" << inst->name << "\t" << labels << "\n";
                }
            } else if (*store_show) {
                out << to_json(store.get(id_arg)).dump(2) << "\n";
            } else if (*store_rm) {
                store.remove(id_arg);
                out << "removed " << id_arg << "\n";
            } else if (*store_range) {
                store.set_normal_range({device_arg, lo, hi});
            }
            return kOk;
        }

        if (*onto_cmd) {
            auto onto = detail::load_ontology(file_arg);
            if (*onto_validate) {
                auto report = validate(onto, sip::make_registry());
                if (report.clean()) {
                    out << "ok: " << onto.size() << " classes\n";
                    return kOk;
                }
                for (const auto& f : report.findings)
                    out << (f.kind == FindingKind::MissingCallback ? "missing callback" : "unreachable trigger") << " at "
                        << f.class_id << ": " << f.detail << "\n";
                return kConfigError;
            }
            if (tree)
                detail::print_tree(out, onto, onto.root(), 0);
            else
                out << serialize(onto) << "\n";
            return kOk;
        }

        if (*gen_cmd) {
            for (const auto& text : injections) gcfg.injections.push_back(gen::parse_injection(text));
            auto g = gen::generate(gcfg);
            if (truth_path.empty()) {
                std::filesystem::path p(out_path);
                truth_path = (p.parent_path() / p.stem()).string() + ".truth.json";
            }
            {
                std::ofstream csv(out_path, std::ios::binary);
                if (!csv) throw DataError("cannot write '" + out_path + "'");
                write_csv(csv, g.data);
            }
            {
                std::ofstream tj(truth_path, std::ios::binary);
                if (!tj) throw DataError("cannot write '" + truth_path + "'");
                tj << gen::truth_json(g).dump(2) << "\n";
            }
            out << "wrote " << out_path << " (" << gcfg.devices << " devices x " << gcfg.steps << " steps) and "
                << truth_path << "\n";
            return kOk;
        }
    } catch (const ConfigError& e) {
        err << "kr: " << e.what() << "\n";
        return kConfigError;
    } catch (const OntologyError& e) {
        err << "kr: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "kr: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

}  // namespace kr::cli
