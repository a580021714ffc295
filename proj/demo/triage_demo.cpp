// Generates a small fleet with two injected incidents, triages it against an
// empty knowledge store, stores the phase shift, then shows the suggestions
// for a second dataset with a similar incident.
//
//   triage_demo [ontology.json]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kr/generator.hpp"
#include "kr/triage.hpp"

using namespace kr;

namespace {

void print_triage(const DatasetTriage& t) {
    for (const auto& item : t.result.items) {
        std::cout << "  " << item.incident.id() << ": ";
        if (!item.result) {
            std::cout << "error: " << item.error << "\n";
            continue;
        }
        for (std::size_t i = 0; i < item.result->path.size(); ++i)
            std::cout << (i ? " > " : "") << item.result->path[i];
        if (item.result->qualifier) std::cout << " (" << *item.result->qualifier << ")";
        if (!item.result->complete) std::cout << " [needs manual classification]";
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path ontology_path =
        argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::path(KR_DATA_DIR) / "sip_ontology.json";
    std::ifstream in(ontology_path);
    std::stringstream text;
    text << in.rdbuf();
    const auto onto = parse_ontology(text.str());
    const auto reg = sip::make_registry();

    const auto dir = std::filesystem::temp_directory_path() / "kr_triage_demo";
    std::filesystem::remove_all(dir);
    auto store = KnowledgeStore::open(dir);
    MatchCache cache;

    gen::GenConfig cfg;
    cfg.seed = 21;
    cfg.injections = {gen::parse_injection("phase-shift@d01:8000"), gen::parse_injection("high@d02:12000")};
    const auto first = gen::generate(cfg);
    const auto t1 = triage_dataset(first.data, onto, reg, &store, &cache, {}, {});
    std::cout << "first dataset, " << t1.result.items.size() << " incidents\n";
    print_triage(t1);

    for (const auto& item : t1.result.items) {
        if (!item.result || item.result->final_class != "PhaseShift") continue;
        const auto& s = first.data.at(item.incident.device);
        StoredInstance inst;
        inst.name = "phase shift on " + item.incident.device;
        DeviceSeries seg;
        seg.device = s.device;
        seg.dt = s.dt;
        seg.t0 = s.t0 + static_cast<double>(item.incident.start) * s.dt;
        seg.readings = item.incident.segment;
        seg.ratings = item.incident.ratings;
        inst.segments[s.device] = std::move(seg);
        inst.labels.insert({s.device, "PhaseShift"});
        std::cout << "stored " << store.add(inst, onto) << " (" << inst.name << ")\n";
    }

    cfg.seed = 22;
    cfg.injections = {gen::parse_injection("phase-shift@d01:6000")};
    const auto second = gen::generate(cfg);
    MatchCache cache2;
    const auto t2 = triage_dataset(second.data, onto, reg, &store, &cache2, {}, {});
    std::cout << "second dataset, " << t2.result.items.size() << " incidents\n";
    print_triage(t2);
    for (const auto& s : rank_instances(t2.result.labels, store, cache2, second.data.series, RankMode::Similarity))
        std::cout << "  suggestion " << s.instance << ": similarity " << s.rank_value << ", offset "
                  << s.initial_offset << "\n";

    std::filesystem::remove_all(dir);
}
